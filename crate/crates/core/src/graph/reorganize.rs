use rayon::prelude::*;
use thiserror::Error;

use super::{CulledPartition, Graph, CULLED};
use crate::primitives::scan;
use crate::rng::derive_seed;
use crate::semisort::{integer_sort_bounded, IntSortError};
use crate::{Record, WorkMeter};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReorganizeError {
    #[error("inconsistent partition: {0}")]
    InconsistentPartition(String),
    #[error(transparent)]
    Sort(#[from] IntSortError),
}

/// A graph laid out piece by piece. Piece `k` holds the culled vertices.
/// Each adjacency list starts with the neighbors in the vertex's own piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorganizedGraph {
    pub k: usize,
    /// Vertex at each position.
    pub order: Vec<u32>,
    /// Position of each vertex.
    pub position: Vec<u32>,
    /// `piece_start[i]..piece_start[i + 1]` are the positions of piece `i`,
    /// for `i` in `0..=k`.
    pub piece_start: Vec<usize>,
    /// Adjacency of the vertex at position `i` is
    /// `neighbors[offsets[i]..offsets[i + 1]]`, in original vertex ids.
    pub offsets: Vec<usize>,
    pub neighbors: Vec<u32>,
    /// Number of internal neighbors of the vertex at each position.
    pub split: Vec<usize>,
}

impl ReorganizedGraph {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Vertices of piece `i`; `i == k` gives the culled set.
    pub fn piece(&self, i: usize) -> &[u32] {
        &self.order[self.piece_start[i]..self.piece_start[i + 1]]
    }

    pub fn adjacency(&self, v: u32) -> &[u32] {
        let p = self.position[v as usize] as usize;
        &self.neighbors[self.offsets[p]..self.offsets[p + 1]]
    }

    pub fn internal(&self, v: u32) -> &[u32] {
        let p = self.position[v as usize] as usize;
        &self.neighbors[self.offsets[p]..self.offsets[p] + self.split[p]]
    }

    pub fn cut(&self, v: u32) -> &[u32] {
        let p = self.position[v as usize] as usize;
        &self.neighbors[self.offsets[p] + self.split[p]..self.offsets[p + 1]]
    }
}

fn check(g: &Graph, p: &CulledPartition) -> Result<(), ReorganizeError> {
    let bad = |m: String| Err(ReorganizeError::InconsistentPartition(m));
    if p.k == 0 {
        return bad("k must be at least 1".into());
    }
    if p.assignment.len() != g.n() {
        return bad(format!("{} assignments for {} vertices", p.assignment.len(), g.n()));
    }
    if let Some(v) = p.assignment.iter().position(|&a| a != CULLED && a as usize >= p.k) {
        return bad(format!("vertex {v} assigned to piece {} of {}", p.assignment[v], p.k));
    }
    let culled = p.assignment.iter().filter(|&&a| a == CULLED).count();
    if culled != p.culled.len() || p.culled.iter().any(|&v| v as usize >= g.n() || p.assignment[v as usize] != CULLED) {
        return bad("culled list disagrees with the assignment".into());
    }
    Ok(())
}

/// Groups vertices by piece and splits every adjacency list into internal
/// and cut neighbors, both with the integer sort.
pub fn reorganize(g: &Graph, p: &CulledPartition, seed: u64, meter: &WorkMeter) -> Result<ReorganizedGraph, ReorganizeError> {
    check(g, p)?;
    let n = g.n();
    let k = p.k;
    let piece_of = |v: u32| match p.assignment[v as usize] {
        CULLED => k as u64,
        a => a as u64,
    };

    let vertex_records: Vec<Record> = (0..n as u32).into_par_iter().map(|v| Record::new(piece_of(v), v as u64)).collect();
    meter.charge("reorganize_vertices", n as u64);
    let sorted = integer_sort_bounded(&vertex_records, k + 1, derive_seed(seed, 1), meter)?;
    let order: Vec<u32> = sorted.par_iter().map(|r| r.payload as u32).collect();
    let mut position = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i as u32;
    }
    let mut piece_start = vec![0usize; k + 2];
    for r in &sorted {
        piece_start[r.key as usize + 1] += 1;
    }
    for i in 0..=k {
        piece_start[i + 1] += piece_start[i];
    }

    let degrees: Vec<usize> = order.par_iter().map(|&v| g.degree(v)).collect();
    let (mut offsets, total) = scan(&degrees, |a, b| a + b, 0, meter);
    offsets.push(total);
    let split: Vec<usize> = order
        .par_iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&u| piece_of(u) == piece_of(v)).count())
        .collect();
    meter.charge("reorganize_split", total as u64);

    let edge_records: Vec<Record> = order
        .par_iter()
        .enumerate()
        .flat_map_iter(|(pos, &v)| {
            let pv = piece_of(v);
            g.neighbors(v).iter().map(move |&u| Record::new(2 * pos as u64 + (piece_of(u) != pv) as u64, u as u64))
        })
        .collect();
    meter.charge("reorganize_edges", total as u64);
    let sorted_edges = integer_sort_bounded(&edge_records, 2 * n.max(1), derive_seed(seed, 2), meter)?;
    let neighbors: Vec<u32> = sorted_edges.par_iter().map(|r| r.payload as u32).collect();

    Ok(ReorganizedGraph {
        k,
        order,
        position,
        piece_start,
        offsets,
        neighbors,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cull_partition, generate, GraphKind};

    fn manual(assignment: Vec<u32>, k: usize) -> CulledPartition {
        let culled = (0..assignment.len() as u32).filter(|&v| assignment[v as usize] == CULLED).collect();
        CulledPartition {
            k,
            assignment,
            culled,
            phases: 0,
            phase_log: Vec::new(),
            remaining_edges: 0,
        }
    }

    #[test]
    fn single_piece_is_all_internal() {
        let g = generate(GraphKind::Path, 5, 0, 0).unwrap();
        let r = reorganize(&g, &manual(vec![0; 5], 1), 0, &WorkMeter::new()).unwrap();
        assert_eq!(r.piece(0).len(), 5);
        for v in 0..5 {
            assert_eq!(r.internal(v).len(), g.degree(v));
            assert!(r.cut(v).is_empty());
        }
    }

    #[test]
    fn two_pieces_split() {
        // a=0, b=1 in piece 0; c=2 in piece 1.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let r = reorganize(&g, &manual(vec![0, 0, 1], 2), 4, &WorkMeter::new()).unwrap();
        assert_eq!(r.internal(1), &[0]);
        assert_eq!(r.cut(1), &[2]);
        assert_eq!(r.split[r.position[1] as usize], 1);
        let mut p0 = r.piece(0).to_vec();
        p0.sort();
        assert_eq!(p0, vec![0, 1]);
        assert_eq!(r.piece(1), &[2]);
        assert!(r.piece(2).is_empty());
    }

    #[test]
    fn rejects_inconsistent() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let m = WorkMeter::new();
        assert!(reorganize(&g, &manual(vec![0, 0], 1), 0, &m).is_err());
        assert!(reorganize(&g, &manual(vec![0, 3, 0], 2), 0, &m).is_err());
        let mut p = manual(vec![0, CULLED, 0], 1);
        p.culled.clear();
        assert!(reorganize(&g, &p, 0, &m).is_err());
    }

    #[test]
    fn random_graph_audit() {
        let g = generate(GraphKind::Gnm, 1 << 12, 1 << 15, 8).unwrap();
        let p = cull_partition(&g, 3, 8, &WorkMeter::new()).unwrap();
        let r = reorganize(&g, &p, 8, &WorkMeter::new()).unwrap();
        let mut seen = vec![false; g.n()];
        for i in 0..=p.k {
            for &v in r.piece(i) {
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
                let want = if i == p.k { CULLED } else { i as u32 };
                assert_eq!(p.assignment[v as usize], want);
            }
        }
        assert!(seen.iter().all(|&s| s));
        for v in 0..g.n() as u32 {
            let a = p.assignment[v as usize];
            assert!(r.internal(v).iter().all(|&u| p.assignment[u as usize] == a));
            assert!(r.cut(v).iter().all(|&u| p.assignment[u as usize] != a));
            let mut adj = r.adjacency(v).to_vec();
            adj.sort();
            assert_eq!(adj, g.neighbors(v));
        }
    }
}
