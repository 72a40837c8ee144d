//! Luby MIS, palette-sampling coloring, the deterministic extenders and the
//! boosted pipelines built on the culled partition.

mod boosted;
mod coloring;
mod extend;
mod mis;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::Graph;

pub use boosted::{boosted_coloring, boosted_mis, BoostError, BoostReport};
pub use coloring::{palette_color, ColoringError};
pub use extend::{extend_palettes, mis_extend_prune, UncoloredCutEndpoint};
pub use mis::luby_mis;

pub const UNCOLORED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub color: Vec<u32>,
}

impl Coloring {
    pub fn uncolored(n: usize) -> Self {
        Self {
            color: vec![UNCOLORED; n],
        }
    }

    pub fn is_colored(&self, v: u32) -> bool {
        self.color[v as usize] != UNCOLORED
    }

    /// Number of distinct colors used.
    pub fn distinct(&self) -> usize {
        let mut c: Vec<u32> = self.color.iter().copied().filter(|&c| c != UNCOLORED).collect();
        c.par_sort_unstable();
        c.dedup();
        c.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisSet {
    pub in_set: Vec<bool>,
}

impl MisSet {
    pub fn members(&self) -> Vec<u32> {
        (0..self.in_set.len() as u32).filter(|&v| self.in_set[v as usize]).collect()
    }

    pub fn len(&self) -> usize {
        self.in_set.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("vertex {vertex} has {size} allowed colors but degree {degree}")]
pub struct PaletteDeficit {
    pub vertex: u32,
    pub size: usize,
    pub degree: usize,
}

/// Per-vertex allowed colors, stored as `[0, universe)` minus a sorted
/// exclusion list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteSet {
    universe: u32,
    excluded: Vec<Vec<u32>>,
}

impl PaletteSet {
    /// Every vertex may use all of `[0, universe)`.
    pub fn full(n: usize, universe: u32) -> Self {
        Self {
            universe,
            excluded: vec![Vec::new(); n],
        }
    }

    /// Exclusion lists may be unsorted and contain repeats; colors outside
    /// the universe are ignored.
    pub fn from_excluded(universe: u32, mut excluded: Vec<Vec<u32>>) -> Self {
        excluded.par_iter_mut().for_each(|e| {
            e.retain(|&c| c < universe);
            e.sort_unstable();
            e.dedup();
        });
        Self { universe, excluded }
    }

    /// Explicit allowed lists.
    pub fn from_allowed(allowed: &[Vec<u32>]) -> Self {
        let universe = allowed.iter().flatten().max().map_or(0, |&c| c + 1);
        let excluded = allowed
            .iter()
            .map(|a| {
                let mut mark = vec![false; universe as usize];
                a.iter().for_each(|&c| mark[c as usize] = true);
                (0..universe).filter(|&c| !mark[c as usize]).collect()
            })
            .collect();
        Self { universe, excluded }
    }

    pub fn len(&self) -> usize {
        self.excluded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excluded.is_empty()
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn excluded(&self, v: usize) -> &[u32] {
        &self.excluded[v]
    }

    pub fn size(&self, v: usize) -> usize {
        self.universe as usize - self.excluded[v].len()
    }

    pub fn contains(&self, v: usize, c: u32) -> bool {
        c < self.universe && self.excluded[v].binary_search(&c).is_err()
    }

    pub fn allowed(&self, v: usize) -> Vec<u32> {
        (0..self.universe).filter(|&c| self.contains(v, c)).collect()
    }

    pub(crate) fn into_excluded(self) -> Vec<Vec<u32>> {
        self.excluded
    }

    /// Checks `size(v) ≥ deg(v) + 1` for every vertex of `g`.
    pub fn check(&self, g: &Graph) -> Result<(), PaletteDeficit> {
        assert_eq!(self.len(), g.n(), "palette count differs from vertex count");
        match (0..g.n() as u32).into_par_iter().find_first(|&v| self.size(v as usize) < g.degree(v) + 1) {
            Some(v) => Err(PaletteDeficit {
                vertex: v,
                size: self.size(v as usize),
                degree: g.degree(v),
            }),
            None => Ok(()),
        }
    }
}

/// The `j`-th smallest color (0-based) of `[0, universe)` not in the sorted
/// list `excluded`.
pub(crate) fn nth_allowed(excluded: &[u32], j: u32) -> u32 {
    // e[i] - i is non-decreasing; entries with e[i] - i <= j lie below the answer.
    let (mut lo, mut hi) = (0, excluded.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if excluded[mid] as usize - mid <= j as usize {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    j + lo as u32
}

/// Independence and maximality of `s` on `g`.
pub fn verify_mis(g: &Graph, s: &MisSet) -> bool {
    s.in_set.len() == g.n()
        && (0..g.n() as u32).into_par_iter().all(|v| {
            let member_neighbor = g.neighbors(v).iter().any(|&u| s.in_set[u as usize]);
            if s.in_set[v as usize] {
                !member_neighbor
            } else {
                member_neighbor
            }
        })
}

/// Every vertex colored from `[0, delta]` and no edge monochromatic.
pub fn verify_coloring(g: &Graph, phi: &Coloring, delta: usize) -> bool {
    phi.color.len() == g.n()
        && (0..g.n() as u32).into_par_iter().all(|v| {
            let c = phi.color[v as usize];
            c != UNCOLORED && c as usize <= delta && g.neighbors(v).iter().all(|&u| phi.color[u as usize] != c)
        })
}
