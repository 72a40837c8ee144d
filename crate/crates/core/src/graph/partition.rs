use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::Graph;
use crate::rng::{below, random_words};
use crate::{ceil_log2, WorkMeter};

/// Assignment value of a culled vertex.
pub const CULLED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("piece count must be at least 1")]
    InvalidK,
    #[error("culling needs at least one edge")]
    Edgeless,
    #[error("phase {phase}: neither degree condition met nor edges halved ({before} -> {after} edges)")]
    NoProgress { phase: usize, before: usize, after: usize },
    #[error("phase {phase} removed {removed} vertices, above the bound {bound}")]
    TooManyRemoved { phase: usize, removed: usize, bound: u128 },
    #[error("{phases} culling phases exceed the bound {bound}")]
    TooManyPhases { phases: usize, bound: usize },
    #[error("max degree {max_degree} above threshold after culling ({edges} edges)")]
    DegreeAboveThreshold { max_degree: usize, edges: usize },
}

/// Deletion-flag view of a graph used by the culling loop.
#[derive(Debug, Clone)]
pub struct CullView<'a> {
    graph: &'a Graph,
    alive: Vec<bool>,
    degree: Vec<u32>,
    // Alive vertices with nonzero degree; every other vertex is inert.
    active: Vec<u32>,
    edges: usize,
}

impl<'a> CullView<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        let n = graph.n();
        let degree: Vec<u32> = (0..n as u32).into_par_iter().map(|v| graph.degree(v) as u32).collect();
        let active = (0..n as u32).into_par_iter().filter(|&v| degree[v as usize] > 0).collect();
        Self {
            graph,
            alive: vec![true; n],
            degree,
            active,
            edges: graph.m(),
        }
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn is_alive(&self, v: u32) -> bool {
        self.alive[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.degree[v as usize] as usize
    }

    pub fn max_degree(&self) -> usize {
        self.active.par_iter().map(|&v| self.degree[v as usize] as usize).max().unwrap_or(0)
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    /// Deletes `removed` and recomputes every surviving degree with one
    /// pass over the surviving active adjacency lists.
    pub fn remove(&mut self, removed: &[u32], meter: &WorkMeter) {
        for &v in removed {
            self.alive[v as usize] = false;
            self.degree[v as usize] = 0;
        }
        let alive = &self.alive;
        let g = self.graph;
        let survivors: Vec<u32> = self.active.par_iter().copied().filter(|&v| alive[v as usize]).collect();
        let scanned: usize = survivors.par_iter().map(|&v| g.degree(v)).sum();
        meter.charge("cull_degrees", (self.active.len() + scanned) as u64);
        let fresh: Vec<u32> = survivors
            .par_iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&u| alive[u as usize]).count() as u32)
            .collect();
        for (&v, &d) in survivors.iter().zip(&fresh) {
            self.degree[v as usize] = d;
        }
        self.active = survivors.into_iter().filter(|&v| self.degree[v as usize] > 0).collect();
        self.edges = fresh.iter().map(|&d| d as usize).sum::<usize>() / 2;
    }
}

/// `k^4 · ⌈log2 n0⌉`, the divisor of the removal threshold.
fn threshold_divisor(k: usize, n0: usize) -> u128 {
    (k as u128).pow(4) * ceil_log2(n0) as u128
}

/// The vertices of degree above `τ/2` for `τ = e / (k^4 ⌈log2 n0⌉)`, all
/// tested against the current degrees.
pub fn phase_cull(view: &CullView<'_>, k: usize, n0: usize) -> Result<Vec<u32>, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidK);
    }
    if view.edges() == 0 {
        return Err(PartitionError::Edgeless);
    }
    let div = threshold_divisor(k, n0);
    let e = view.edges() as u128;
    // deg > e / (2 div)  <=>  2·deg·div > e
    Ok(view
        .active()
        .par_iter()
        .copied()
        .filter(|&v| 2 * view.degree(v) as u128 * div > e)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub edges_before: usize,
    pub max_degree_before: usize,
    pub tau: f64,
    pub removed: usize,
    pub edges_after: usize,
    pub max_degree_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CulledPartition {
    pub k: usize,
    /// Piece id in `[0, k)` per vertex, or [`CULLED`].
    pub assignment: Vec<u32>,
    pub culled: Vec<u32>,
    pub phases: usize,
    pub phase_log: Vec<PhaseRecord>,
    /// Edges left after culling.
    pub remaining_edges: usize,
}

impl CulledPartition {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_culled(&self, v: u32) -> bool {
        self.assignment[v as usize] == CULLED
    }

    pub fn piece(&self, v: u32) -> Option<u32> {
        let p = self.assignment[v as usize];
        (p != CULLED).then_some(p)
    }

    pub fn piece_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &p in &self.assignment {
            if p != CULLED {
                sizes[p as usize] += 1;
            }
        }
        sizes
    }

    /// `phases · 4 k^4 ⌈log2 n⌉`.
    pub fn culled_bound(&self) -> u128 {
        self.phases as u128 * 4 * threshold_divisor(self.k, self.n())
    }
}

/// Edges inside each piece, `e(G'[V_i])`.
pub fn piece_edges(g: &Graph, p: &CulledPartition) -> Vec<usize> {
    let counts = (0..g.n() as u32)
        .into_par_iter()
        .fold(
            || vec![0usize; p.k],
            |mut acc, v| {
                let pv = p.assignment[v as usize];
                if pv != CULLED {
                    acc[pv as usize] += g.neighbors(v).iter().filter(|&&u| u > v && p.assignment[u as usize] == pv).count();
                }
                acc
            },
        )
        .reduce(
            || vec![0usize; p.k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    counts
}

/// Culls high-degree vertices in phases until `Δ ≤ τ`, then assigns every
/// survivor to a uniform piece in `[0, k)`.
///
/// Per-phase progress, the removal count, the phase count and the final
/// degree condition are checked on every run and reported as errors.
pub fn cull_partition(g: &Graph, k: usize, seed: u64, meter: &WorkMeter) -> Result<CulledPartition, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidK);
    }
    let n = g.n();
    let div = threshold_divisor(k, n);
    let log_n = ceil_log2(n) as u64;
    let phase_bound = ceil_log2(g.m()) as usize + 1;

    meter.charge("cull_init", (n + 2 * g.m()) as u64);
    let mut view = CullView::new(g);
    let mut phase_log = Vec::new();
    let mut culled = Vec::new();
    loop {
        let e = view.edges();
        if e == 0 {
            break;
        }
        let delta = view.max_degree();
        meter.charge("cull_max_degree", view.active().len() as u64);
        meter.add_rounds(log_n);
        // Δ ≤ τ  <=>  Δ·div ≤ e
        if delta as u128 * div <= e as u128 {
            break;
        }
        let phase = phase_log.len() + 1;
        if phase > phase_bound {
            return Err(PartitionError::TooManyPhases {
                phases: phase,
                bound: phase_bound,
            });
        }
        let removed = phase_cull(&view, k, n)?;
        meter.charge("cull_test", view.active().len() as u64);
        if removed.len() as u128 > 4 * div {
            return Err(PartitionError::TooManyRemoved {
                phase,
                removed: removed.len(),
                bound: 4 * div,
            });
        }
        view.remove(&removed, meter);
        meter.add_rounds(log_n);
        let after = view.edges();
        let delta_after = view.max_degree();
        let condition_met = after == 0 || delta_after as u128 * div <= after as u128;
        if !condition_met && 2 * after > e {
            return Err(PartitionError::NoProgress { phase, before: e, after });
        }
        phase_log.push(PhaseRecord {
            edges_before: e,
            max_degree_before: delta,
            tau: e as f64 / div as f64,
            removed: removed.len(),
            edges_after: after,
            max_degree_after: delta_after,
        });
        culled.extend(removed);
    }
    let remaining_edges = view.edges();
    let max_degree = view.max_degree();
    if remaining_edges > 0 && max_degree as u128 * div > remaining_edges as u128 {
        return Err(PartitionError::DegreeAboveThreshold {
            max_degree,
            edges: remaining_edges,
        });
    }

    meter.charge("assign", n as u64);
    meter.add_rounds(1);
    let words = random_words(seed, 0, n);
    let assignment: Vec<u32> = (0..n)
        .into_par_iter()
        .map(|v| if view.alive[v] { below(words[v], k as u64) as u32 } else { CULLED })
        .collect();
    culled.par_sort_unstable();
    Ok(CulledPartition {
        k,
        assignment,
        culled,
        phases: phase_log.len(),
        phase_log,
        remaining_edges,
    })
}
