use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{
    extend_palettes, luby_mis, mis_extend_prune, palette_color, Coloring, ColoringError, MisSet,
    UncoloredCutEndpoint,
};
use crate::graph::{cull_partition, reorganize, Graph, PartitionError, ReorganizeError, ReorganizedGraph};
use crate::rng::derive_seed;
use crate::{ceil_log2, WorkMeter};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Reorganize(#[from] ReorganizeError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Extend(#[from] UncoloredCutEndpoint),
    #[error("{total} cut edges counted against {m} edges")]
    CutOvercount { total: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostReport {
    pub k: usize,
    pub phases: usize,
    pub culled: usize,
    /// Vertex count per processed piece; the last entry is the culled set.
    pub piece_sizes: Vec<usize>,
    /// Cut edges into each piece from earlier pieces.
    pub cut_edges: Vec<usize>,
    /// Rounds of the randomized subroutine per piece.
    pub piece_rounds: Vec<u64>,
    pub delta: usize,
}

impl BoostReport {
    pub fn total_rounds(&self) -> u64 {
        self.piece_rounds.iter().sum()
    }

    pub fn total_cut(&self) -> usize {
        self.cut_edges.iter().sum()
    }
}

/// Local graph on `vertices` from their internal adjacency.
fn local_graph(r: &ReorganizedGraph, vertices: &[u32], local_of: &[u32], meter: &WorkMeter) -> Graph {
    let lists: Vec<Vec<u32>> = vertices
        .par_iter()
        .map(|&v| {
            let mut l: Vec<u32> = r.internal(v).iter().map(|&u| local_of[u as usize]).collect();
            l.sort_unstable();
            l
        })
        .collect();
    let work: u64 = lists.iter().map(|l| l.len() as u64 * ceil_log2(l.len().max(1)) as u64).sum();
    meter.charge("boost_local_graph", vertices.len() as u64 + work);
    Graph::from_lists(lists)
}

/// Cut edges `(local target, source)` from `vertices` into already processed
/// vertices.
fn cut_into(r: &ReorganizedGraph, vertices: &[u32], done: &[bool], meter: &WorkMeter) -> Vec<(u32, u32)> {
    let scanned: usize = vertices.par_iter().map(|&v| r.cut(v).len()).sum();
    meter.charge("boost_cut_scan", scanned as u64);
    vertices
        .par_iter()
        .enumerate()
        .flat_map_iter(|(t, &v)| {
            r.cut(v)
                .iter()
                .filter(|&&u| done[u as usize])
                .map(move |&u| (t as u32, u))
        })
        .collect()
}

struct Pipeline {
    r: ReorganizedGraph,
    report: BoostReport,
    local_of: Vec<u32>,
    done: Vec<bool>,
}

fn prepare(g: &Graph, k: usize, seed: u64, meter: &WorkMeter) -> Result<Pipeline, BoostError> {
    let p = cull_partition(g, k, derive_seed(seed, 0), meter)?;
    let r = reorganize(g, &p, derive_seed(seed, 1), meter)?;
    meter.charge("boost_delta", g.n() as u64);
    let report = BoostReport {
        k,
        phases: p.phases,
        culled: p.culled.len(),
        piece_sizes: Vec::with_capacity(k + 1),
        cut_edges: Vec::with_capacity(k + 1),
        piece_rounds: Vec::with_capacity(k + 1),
        delta: g.max_degree(),
    };
    Ok(Pipeline {
        r,
        report,
        local_of: vec![u32::MAX; g.n()],
        done: vec![false; g.n()],
    })
}

impl Pipeline {
    fn finish(self, m: usize) -> Result<BoostReport, BoostError> {
        let total = self.report.total_cut();
        if total > m {
            return Err(BoostError::CutOvercount { total, m });
        }
        Ok(self.report)
    }
}

/// `(Δ+1)`-coloring: partition, then color the pieces one after another,
/// each from the residual palettes left by the earlier pieces, and the
/// culled set last.
pub fn boosted_coloring(g: &Graph, k: usize, seed: u64, meter: &WorkMeter) -> Result<(Coloring, BoostReport), BoostError> {
    let mut pl = prepare(g, k, seed, meter)?;
    let delta = pl.report.delta;
    let mut phi = Coloring::uncolored(g.n());
    for i in 0..=k {
        let vertices = pl.r.piece(i).to_vec();
        for (t, &v) in vertices.iter().enumerate() {
            pl.local_of[v as usize] = t as u32;
        }
        let h = local_graph(&pl.r, &vertices, &pl.local_of, meter);
        let cut = cut_into(&pl.r, &vertices, &pl.done, meter);
        let palettes = extend_palettes(&phi, &cut, vertices.len(), delta, meter)?;
        let (local, rounds) = palette_color(&h, &palettes, derive_seed(seed, 2 + i as u64), meter)?;
        meter.charge("boost_write", vertices.len() as u64);
        for (t, &v) in vertices.iter().enumerate() {
            phi.color[v as usize] = local.color[t];
            pl.done[v as usize] = true;
        }
        pl.report.piece_sizes.push(vertices.len());
        pl.report.cut_edges.push(cut.len());
        pl.report.piece_rounds.push(rounds);
    }
    Ok((phi, pl.finish(g.m())?))
}

/// MIS: partition, then for each piece drop the vertices adjacent to
/// earlier members and run Luby on the rest; the culled set goes last.
pub fn boosted_mis(g: &Graph, k: usize, seed: u64, meter: &WorkMeter) -> Result<(MisSet, BoostReport), BoostError> {
    let mut pl = prepare(g, k, seed, meter)?;
    let mut set = MisSet {
        in_set: vec![false; g.n()],
    };
    for i in 0..=k {
        let vertices = pl.r.piece(i).to_vec();
        let cut = cut_into(&pl.r, &vertices, &pl.done, meter);
        let kept: Vec<u32> = mis_extend_prune(&set, &cut, vertices.len(), meter)
            .into_iter()
            .map(|t| vertices[t as usize])
            .collect();
        for &v in &vertices {
            pl.local_of[v as usize] = u32::MAX;
        }
        for (t, &v) in kept.iter().enumerate() {
            pl.local_of[v as usize] = t as u32;
        }
        let lists: Vec<Vec<u32>> = kept
            .par_iter()
            .map(|&v| {
                let mut l: Vec<u32> = pl
                    .r
                    .internal(v)
                    .iter()
                    .map(|&u| pl.local_of[u as usize])
                    .filter(|&t| t != u32::MAX)
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        let work: u64 = vertices.iter().map(|&v| pl.r.internal(v).len() as u64).sum::<u64>()
            + lists.iter().map(|l| l.len() as u64 * ceil_log2(l.len().max(1)) as u64).sum::<u64>();
        meter.charge("boost_local_graph", vertices.len() as u64 + work);
        let h = Graph::from_lists(lists);
        let (local, rounds) = luby_mis(&h, derive_seed(seed, 2 + i as u64), meter);
        meter.charge("boost_write", vertices.len() as u64);
        for (t, &v) in kept.iter().enumerate() {
            set.in_set[v as usize] = local.in_set[t];
        }
        for &v in &vertices {
            pl.done[v as usize] = true;
        }
        pl.report.piece_sizes.push(vertices.len());
        pl.report.cut_edges.push(cut.len());
        pl.report.piece_rounds.push(rounds);
    }
    Ok((set, pl.finish(g.m())?))
}
