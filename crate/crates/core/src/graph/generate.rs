use std::collections::HashSet;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rand_distr::{weighted::WeightedAliasIndex, Distribution};

use super::{Graph, GraphError};
use crate::rng::{below, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Uniform graph with exactly `m` distinct edges.
    Gnm,
    /// `K_{1,n−1}` centred on vertex 0.
    Star,
    /// `0 – 1 – … – n−1`.
    Path,
    /// Chung–Lu graph with expected degrees proportional to `(i+1)^{-2/3}`
    /// (power-law exponent 2.5), rejecting loops and repeats until `m`
    /// edges exist.
    PowerLaw,
}

impl FromStr for GraphKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gnm" => Ok(Self::Gnm),
            "star" => Ok(Self::Star),
            "path" => Ok(Self::Path),
            "power_law" | "powerlaw" => Ok(Self::PowerLaw),
            _ => Err(GraphError::Infeasible(format!("unknown graph kind {s}"))),
        }
    }
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Gnm => "gnm",
            Self::Star => "star",
            Self::Path => "path",
            Self::PowerLaw => "power_law",
        })
    }
}

fn pair_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

/// Generates a simple undirected graph, deterministic in `seed`. `m` is
/// ignored for stars and paths.
pub fn generate(kind: GraphKind, n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    if n > u32::MAX as usize {
        return Err(GraphError::Infeasible(format!("n = {n} exceeds 32-bit vertex ids")));
    }
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    let mut rng = stream_rng(seed, 0);
    match kind {
        GraphKind::Path => {
            let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Star => {
            if n == 0 {
                return Err(GraphError::Infeasible("a star needs a centre".into()));
            }
            let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Gnm => {
            if m > max_edges {
                return Err(GraphError::Infeasible(format!("{m} edges exceed the {max_edges} possible on {n} vertices")));
            }
            if m > max_edges / 2 {
                // Dense: pick m pairs by a partial shuffle of all pairs.
                let mut all: Vec<(u32, u32)> = (0..n as u32)
                    .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
                    .collect();
                for i in 0..m {
                    let j = i + below(rng.next_u64(), (all.len() - i) as u64) as usize;
                    all.swap(i, j);
                }
                all.truncate(m);
                return Graph::from_edges(n, &all);
            }
            let mut seen = HashSet::with_capacity(m);
            let mut edges = Vec::with_capacity(m);
            while edges.len() < m {
                let u = below(rng.next_u64(), n as u64) as u32;
                let v = below(rng.next_u64(), n as u64) as u32;
                if u != v && seen.insert(pair_key(u, v)) {
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, &edges)
        }
        GraphKind::PowerLaw => {
            if m > max_edges {
                return Err(GraphError::Infeasible(format!("{m} edges exceed the {max_edges} possible on {n} vertices")));
            }
            if m == 0 {
                return Ok(Graph::empty(n));
            }
            let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-2.0 / 3.0)).collect();
            let dist = WeightedAliasIndex::new(weights).map_err(|e| GraphError::Infeasible(e.to_string()))?;
            let mut seen = HashSet::with_capacity(m);
            let mut edges = Vec::with_capacity(m);
            let budget = 64 * m + 1024;
            let mut tries = 0;
            while edges.len() < m {
                if tries == budget {
                    return Err(GraphError::Infeasible(format!(
                        "could not draw {m} distinct power-law edges on {n} vertices"
                    )));
                }
                tries += 1;
                let u = dist.sample(&mut rng) as u32;
                let v = dist.sample(&mut rng) as u32;
                if u != v && seen.insert(pair_key(u, v)) {
                    edges.push((u, v));
                }
            }
            // Randomise labels so high-degree vertices are not all small ids.
            let mut label: Vec<u32> = (0..n as u32).collect();
            for i in (1..n).rev() {
                label.swap(i, rng.random_range(0..=i));
            }
            let edges: Vec<(u32, u32)> = edges.into_iter().map(|(u, v)| (label[u as usize], label[v as usize])).collect();
            Graph::from_edges(n, &edges)
        }
    }
}
