use std::sync::atomic::{AtomicU32, Ordering::Relaxed};

use rayon::prelude::*;
use thiserror::Error;

use super::{nth_allowed, Coloring, PaletteDeficit, PaletteSet, UNCOLORED};
use crate::graph::Graph;
use crate::rng::{below, random_words};
use crate::{ceil_log2, WorkMeter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error(transparent)]
    PaletteDeficit(#[from] PaletteDeficit),
    #[error("no progress after {0} rounds")]
    RoundLimit(u64),
}

struct Live {
    v: u32,
    adj: Vec<u32>,
    excluded: Vec<u32>,
}

/// Randomized list coloring. Every uncolored vertex samples a color from
/// its residual palette; it keeps the color unless an uncolored neighbor
/// sampled the same one, in which case both discard. Colors kept in a round
/// are removed from the neighbors' palettes before the next round.
///
/// Requires `palettes.size(v) ≥ deg(v) + 1` for every vertex.
pub fn palette_color(
    g: &Graph,
    palettes: &PaletteSet,
    seed: u64,
    meter: &WorkMeter,
) -> Result<(Coloring, u64), ColoringError> {
    let n = g.n();
    palettes.check(g)?;
    let universe = palettes.universe();
    meter.charge("palette_init", (n + 2 * g.m()) as u64);
    let round_limit = 64 * (ceil_log2(n) as u64 + 1);

    let color: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(UNCOLORED)).collect();
    let sample: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(UNCOLORED)).collect();
    let mut live: Vec<Live> = palettes
        .clone()
        .into_excluded()
        .into_par_iter()
        .enumerate()
        .map(|(v, excluded)| Live {
            v: v as u32,
            adj: g.neighbors(v as u32).to_vec(),
            excluded,
        })
        .collect();

    let mut rounds = 0u64;
    while !live.is_empty() {
        if rounds == round_limit {
            return Err(ColoringError::RoundLimit(rounds));
        }
        let edges: usize = live.par_iter().map(|l| l.adj.len()).sum();
        meter.charge("palette_round", (3 * live.len() + 3 * edges) as u64);
        let words = random_words(seed, rounds, live.len());
        live.par_iter().zip(&words).try_for_each(|(l, &w)| {
            let size = universe as usize - l.excluded.len();
            if size < l.adj.len() + 1 {
                return Err(PaletteDeficit {
                    vertex: l.v,
                    size,
                    degree: l.adj.len(),
                });
            }
            let c = nth_allowed(&l.excluded, below(w, size as u64) as u32);
            sample[l.v as usize].store(c, Relaxed);
            Ok(())
        })?;
        live.par_iter().for_each(|l| {
            let c = sample[l.v as usize].load(Relaxed);
            if l.adj.iter().all(|&u| sample[u as usize].load(Relaxed) != c) {
                color[l.v as usize].store(c, Relaxed);
            }
        });
        live.retain(|l| color[l.v as usize].load(Relaxed) == UNCOLORED);
        live.par_iter_mut().for_each(|l| {
            let mut fresh = Vec::new();
            l.adj.retain(|&u| {
                let c = color[u as usize].load(Relaxed);
                if c != UNCOLORED {
                    fresh.push(c);
                }
                c == UNCOLORED
            });
            if !fresh.is_empty() {
                l.excluded.extend(fresh);
                l.excluded.sort_unstable();
                l.excluded.dedup();
            }
        });
        rounds += 1;
    }
    meter.add_rounds(rounds);
    Ok((
        Coloring {
            color: color.into_iter().map(AtomicU32::into_inner).collect(),
        },
        rounds,
    ))
}
