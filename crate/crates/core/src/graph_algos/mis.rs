use std::sync::atomic::{AtomicBool, AtomicU64, Ordering::Relaxed};

use rayon::prelude::*;

use super::MisSet;
use crate::graph::Graph;
use crate::rng::random_words;
use crate::WorkMeter;

struct Live {
    v: u32,
    // Neighbors still live at the start of the round.
    adj: Vec<u32>,
}

/// Luby's algorithm. Each round every live vertex draws a 64-bit value and
/// joins when it beats all live neighbors (equal values go to the smaller
/// id); members and their neighbors then leave. Returns the set and the
/// number of rounds.
pub fn luby_mis(g: &Graph, seed: u64, meter: &WorkMeter) -> (MisSet, u64) {
    let n = g.n();
    meter.charge("luby_init", (n + 2 * g.m()) as u64);
    let in_set: Vec<AtomicBool> = (0..n).map(|_| AtomicBool::new(false)).collect();
    let removed: Vec<AtomicBool> = (0..n).map(|_| AtomicBool::new(false)).collect();
    let value: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    let mut live: Vec<Live> = (0..n as u32)
        .into_par_iter()
        .map(|v| Live {
            v,
            adj: g.neighbors(v).to_vec(),
        })
        .collect();

    let mut rounds = 0u64;
    while !live.is_empty() {
        let edges: usize = live.par_iter().map(|l| l.adj.len()).sum();
        meter.charge("luby_round", (2 * live.len() + 3 * edges) as u64);
        let words = random_words(seed, rounds, live.len());
        live.par_iter().zip(&words).for_each(|(l, &w)| value[l.v as usize].store(w, Relaxed));
        live.par_iter().for_each(|l| {
            let mine = (value[l.v as usize].load(Relaxed), std::cmp::Reverse(l.v));
            if l.adj.iter().all(|&u| mine > (value[u as usize].load(Relaxed), std::cmp::Reverse(u))) {
                in_set[l.v as usize].store(true, Relaxed);
            }
        });
        live.par_iter().for_each(|l| {
            if in_set[l.v as usize].load(Relaxed) {
                removed[l.v as usize].store(true, Relaxed);
                for &u in &l.adj {
                    removed[u as usize].store(true, Relaxed);
                }
            }
        });
        live.retain(|l| !removed[l.v as usize].load(Relaxed));
        live.par_iter_mut().for_each(|l| l.adj.retain(|&u| !removed[u as usize].load(Relaxed)));
        rounds += 1;
    }
    meter.add_rounds(rounds);
    (
        MisSet {
            in_set: in_set.into_iter().map(AtomicBool::into_inner).collect(),
        },
        rounds,
    )
}
