//! Undirected graphs in compressed adjacency form, generators, the culled
//! balanced partition and partition-aware reorganisation.

mod generate;
pub mod io;
mod partition;
mod reorganize;

use rayon::prelude::*;
use thiserror::Error;

pub use generate::{generate, GraphKind};
pub use partition::{
    cull_partition, phase_cull, piece_edges, CullView, CulledPartition, PartitionError, PhaseRecord, CULLED,
};
pub use reorganize::{reorganize, ReorganizeError, ReorganizedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// Simple undirected graph; every edge is stored in both directions and
/// adjacency lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges collapse; self-loops
    /// are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
        }
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for d in &degree[..n] {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; acc];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        let lists: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut l = neighbors[offsets[v]..offsets[v + 1]].to_vec();
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        Ok(Self::from_lists(lists))
    }

    /// Lists must already be sorted, symmetric and loop-free.
    pub(crate) fn from_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut acc = 0;
        for l in &lists {
            offsets.push(acc);
            acc += l.len();
        }
        offsets.push(acc);
        Self {
            offsets,
            neighbors: lists.concat(),
        }
    }

    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_csr(offsets: Vec<usize>, neighbors: Vec<u32>) -> Result<Self, GraphError> {
        let g = Self { offsets, neighbors };
        g.validate()?;
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[u32] {
        &self.neighbors
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as u32).into_par_iter().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Every edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n() as u32).flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::Malformed(m));
        if self.offsets.first() != Some(&0) {
            return bad("offsets must start at 0".into());
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("offsets must be non-decreasing".into());
        }
        if *self.offsets.last().unwrap() != self.neighbors.len() || self.neighbors.len() % 2 != 0 {
            return bad("offsets[n] must equal 2m".into());
        }
        let n = self.n();
        for u in 0..n as u32 {
            let list = self.neighbors(u);
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("adjacency of {u} is not strictly increasing"));
            }
            for &v in list {
                if v as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v as u64, n });
                }
                if v == u {
                    return Err(GraphError::SelfLoop(u));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return bad(format!("edge {u}-{v} is not symmetric"));
                }
            }
        }
        Ok(())
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[u32]) -> Graph {
        let mut local = vec![u32::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let lists: Vec<Vec<u32>> = vertices
            .par_iter()
            .map(|&v| {
                let mut l: Vec<u32> = self
                    .neighbors(v)
                    .iter()
                    .filter_map(|&u| (local[u as usize] != u32::MAX).then(|| local[u as usize]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        Graph::from_lists(lists)
    }
}
