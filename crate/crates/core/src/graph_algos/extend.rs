use rayon::prelude::*;
use thiserror::Error;

use super::{Coloring, MisSet, PaletteSet};
use crate::{ceil_log2, WorkMeter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cut endpoint {endpoint} of target {target} is uncolored")]
pub struct UncoloredCutEndpoint {
    pub target: u32,
    pub endpoint: u32,
}

/// Residual palettes `[0, delta] \ {φ(u) : (v, u) ∈ cut}` for the `targets`
/// vertices of the uncolored side. Each cut entry is `(target, source)`:
/// a local target id and a vertex of the colored side.
pub fn extend_palettes(
    phi: &Coloring,
    cut: &[(u32, u32)],
    targets: usize,
    delta: usize,
    meter: &WorkMeter,
) -> Result<PaletteSet, UncoloredCutEndpoint> {
    meter.charge("extend", cut.len() as u64);
    let mut excluded = vec![Vec::new(); targets];
    for &(target, source) in cut {
        if !phi.is_colored(source) {
            return Err(UncoloredCutEndpoint { target, endpoint: source });
        }
        excluded[target as usize].push(phi.color[source as usize]);
    }
    let normalize: u64 = excluded
        .par_iter()
        .filter(|e| e.len() > 1)
        .map(|e| e.len() as u64 * ceil_log2(e.len()) as u64)
        .sum();
    meter.charge("extend_normalize", normalize);
    Ok(PaletteSet::from_excluded(delta as u32 + 1, excluded))
}

/// Local ids in `[0, targets)` with no cut edge to a member of `m0`.
pub fn mis_extend_prune(m0: &MisSet, cut: &[(u32, u32)], targets: usize, meter: &WorkMeter) -> Vec<u32> {
    meter.charge("prune", (cut.len() + targets) as u64);
    let mut dropped = vec![false; targets];
    for &(target, source) in cut {
        if m0.in_set[source as usize] {
            dropped[target as usize] = true;
        }
    }
    (0..targets as u32).filter(|&t| !dropped[t as usize]).collect()
}
