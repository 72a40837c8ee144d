//! Randomized placement of records into slack-capacity target arrays.
//!
//! The record array is cut into blocks of `d` records (the last block takes
//! the remainder and holds fewer than `2d`). Every round, each block with an
//! unplaced record probes one uniformly random slot of that record's target
//! and claims it if empty. Blocks walk their records in array order.
//!
//! Claims are resolved as a priority write: all probes of a round first
//! propose into the slot with an atomic `fetch_min`, then the lowest
//! proposer commits. Exactly one of several concurrent claimants wins and the
//! outcome is independent of thread scheduling.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::rng::{below, stream_rng};
use crate::{ceil_log2, WorkMeter};

/// Empty-slot sentinel of the arena.
pub const EMPTY_SLOT: u64 = u64::MAX;
const TENTATIVE: u64 = 1 << 63;

/// Default multiplier of `⌈log2 n⌉` for the round cap.
pub const DEFAULT_ROUND_CAP_FACTOR: usize = 8;

pub fn default_round_cap(n: usize) -> usize {
    DEFAULT_ROUND_CAP_FACTOR * ceil_log2(n) as usize
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("placement timed out after {rounds} rounds with {unplaced} records unplaced")]
    TimedOut { rounds: usize, unplaced: usize },
    #[error("invalid placement instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Target {
    pub capacity: usize,
    /// First slot of the target in the shared arena.
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub struct PlacementInstance {
    /// Target id of every record.
    pub target_of: Vec<u32>,
    pub targets: Vec<Target>,
    pub alpha: f64,
    pub block: usize,
}

#[derive(Debug, Clone)]
pub struct PlacementResult {
    /// Arena slot of every record.
    pub slot_of: Vec<usize>,
    /// Arena contents: a record index or [`EMPTY_SLOT`].
    pub arena: Vec<u64>,
    pub rounds_used: usize,
    pub probes: u64,
}

impl PlacementInstance {
    /// Lays targets out back to back in the arena.
    pub fn new(target_of: Vec<u32>, capacities: &[usize], alpha: f64, block: usize) -> Self {
        let mut offset = 0;
        let targets = capacities
            .iter()
            .map(|&capacity| {
                let t = Target { capacity, offset };
                offset += capacity;
                t
            })
            .collect();
        Self {
            target_of,
            targets,
            alpha,
            block,
        }
    }

    pub fn arena_len(&self) -> usize {
        self.targets.iter().map(|t| t.offset + t.capacity).max().unwrap_or(0)
    }

    /// Number of records addressed to each target.
    pub fn loads(&self) -> Vec<usize> {
        let mut loads = vec![0usize; self.targets.len()];
        for &t in &self.target_of {
            if let Some(l) = loads.get_mut(t as usize) {
                *l += 1;
            }
        }
        loads
    }

    pub fn validate(&self) -> Result<(), PlacementError> {
        let bad = |msg: String| Err(PlacementError::InvalidInstance(msg));
        if !(self.alpha >= 2.0) {
            return bad(format!("alpha = {} < 2", self.alpha));
        }
        if self.block == 0 {
            return bad("block size must be at least 1".into());
        }
        if let Some(&t) = self.target_of.iter().find(|&&t| t as usize >= self.targets.len()) {
            return bad(format!("target id {t} out of range"));
        }
        for (i, (t, load)) in self.targets.iter().zip(self.loads()).enumerate() {
            if (t.capacity as f64) < self.alpha * load as f64 {
                return bad(format!(
                    "target {i} has capacity {} < alpha·{load}",
                    t.capacity
                ));
            }
        }
        let mut spans: Vec<(usize, usize)> = self.targets.iter().map(|t| (t.offset, t.capacity)).collect();
        spans.sort_unstable();
        if spans.windows(2).any(|w| w[0].0 + w[0].1 > w[1].0) {
            return bad("targets overlap in the arena".into());
        }
        Ok(())
    }
}

/// Places every record after validating the slack invariant.
pub fn place(
    inst: &PlacementInstance,
    round_cap: usize,
    seed: u64,
    meter: &WorkMeter,
) -> Result<PlacementResult, PlacementError> {
    inst.validate()?;
    if round_cap == 0 {
        return Err(PlacementError::InvalidInstance("round cap must be at least 1".into()));
    }
    place_unchecked(inst, round_cap, seed, meter)
}

struct BlockState {
    next: usize,
    end: usize,
    rng: ChaCha8Rng,
    proposal: Option<(usize, usize)>,
    // Slots of the block's records, in record order.
    placed: Vec<usize>,
}

/// Placement without the slack check. An over-full target never finishes
/// and surfaces as [`PlacementError::TimedOut`].
pub fn place_unchecked(
    inst: &PlacementInstance,
    round_cap: usize,
    seed: u64,
    meter: &WorkMeter,
) -> Result<PlacementResult, PlacementError> {
    let k = inst.target_of.len();
    let arena_len = inst.arena_len();
    meter.charge("placement_init", arena_len as u64);
    let arena: Vec<AtomicU64> = (0..arena_len).map(|_| AtomicU64::new(EMPTY_SLOT)).collect();
    if k == 0 {
        return Ok(PlacementResult {
            slot_of: Vec::new(),
            arena: vec![EMPTY_SLOT; arena_len],
            rounds_used: 0,
            probes: 0,
        });
    }
    if inst.target_of.iter().any(|&t| inst.targets[t as usize].capacity == 0) {
        // Nothing can ever land in a zero-capacity target.
        return Err(PlacementError::TimedOut { rounds: 0, unplaced: k });
    }

    let d = inst.block.max(1);
    let num_blocks = (k / d).max(1);
    let mut blocks: Vec<BlockState> = (0..num_blocks)
        .map(|b| BlockState {
            next: b * d,
            end: if b + 1 == num_blocks { k } else { (b + 1) * d },
            rng: stream_rng(seed, b as u64),
            proposal: None,
            placed: Vec::new(),
        })
        .collect();

    let mut rounds = 0;
    let mut probes = 0u64;
    let mut active = num_blocks;
    while active > 0 {
        if rounds == round_cap {
            let unplaced = blocks.iter().map(|b| b.end - b.next).sum();
            meter.charge("placement_probe", probes);
            meter.add_rounds(rounds as u64);
            return Err(PlacementError::TimedOut { rounds, unplaced });
        }
        rounds += 1;
        // Propose.
        blocks.par_iter_mut().filter(|b| b.next < b.end).for_each(|b| {
            let rec = b.next;
            let t = inst.targets[inst.target_of[rec] as usize];
            let slot = t.offset + below(b.rng.next_u64(), t.capacity as u64) as usize;
            let cell = &arena[slot];
            if cell.load(Ordering::Acquire) >= TENTATIVE {
                cell.fetch_min(TENTATIVE | rec as u64, Ordering::AcqRel);
            }
            b.proposal = Some((rec, slot));
        });
        probes += active as u64;
        // Commit.
        blocks.par_iter_mut().filter(|b| b.next < b.end).for_each(|b| {
            let (rec, slot) = b.proposal.take().expect("active block proposed");
            let cell = &arena[slot];
            if cell.load(Ordering::Acquire) == TENTATIVE | rec as u64 {
                cell.store(rec as u64, Ordering::Release);
                b.placed.push(slot);
                b.next += 1;
            }
        });
        active = blocks.iter().filter(|b| b.next < b.end).count();
    }
    meter.charge("placement_probe", probes);
    meter.add_rounds(rounds as u64);

    let slot_of = blocks.into_iter().flat_map(|b| b.placed).collect();
    Ok(PlacementResult {
        slot_of,
        arena: arena.into_iter().map(AtomicU64::into_inner).collect(),
        rounds_used: rounds,
        probes,
    })
}

impl PlacementResult {
    /// Checks injectivity and that every record sits inside its target.
    pub fn audit(&self, inst: &PlacementInstance) -> Result<(), String> {
        let mut seen = vec![false; self.arena.len()];
        for (rec, &slot) in self.slot_of.iter().enumerate() {
            let t = inst.targets[inst.target_of[rec] as usize];
            if slot < t.offset || slot >= t.offset + t.capacity {
                return Err(format!("record {rec} in slot {slot} outside its target"));
            }
            if std::mem::replace(&mut seen[slot], true) {
                return Err(format!("slot {slot} assigned twice"));
            }
            if self.arena[slot] != rec as u64 {
                return Err(format!("arena slot {slot} does not hold record {rec}"));
            }
        }
        let occupied = self.arena.iter().filter(|&&s| s != EMPTY_SLOT).count();
        if occupied != self.slot_of.len() {
            return Err(format!("{occupied} occupied slots for {} records", self.slot_of.len()));
        }
        Ok(())
    }

    /// Occupied slots per target.
    pub fn occupancy(&self, inst: &PlacementInstance) -> Vec<usize> {
        inst.targets
            .iter()
            .map(|t| self.arena[t.offset..t.offset + t.capacity].iter().filter(|&&s| s != EMPTY_SLOT).count())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_record() {
        let inst = PlacementInstance::new(vec![0], &[2], 2.0, 1);
        let res = place(&inst, 10, 1, &WorkMeter::new()).unwrap();
        assert!(res.slot_of[0] < 2);
        res.audit(&inst).unwrap();
    }

    #[test]
    fn three_records_same_target() {
        let inst = PlacementInstance::new(vec![0, 0, 0], &[6], 2.0, 1);
        let res = place(&inst, 80, 42, &WorkMeter::new()).unwrap();
        res.audit(&inst).unwrap();
        assert!(res.rounds_used <= 80);
        let mut s = res.slot_of.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn capacity_violation_is_invalid() {
        let inst = PlacementInstance::new(vec![0], &[1], 2.0, 1);
        assert!(matches!(place(&inst, 10, 1, &WorkMeter::new()), Err(PlacementError::InvalidInstance(_))));
        let inst = PlacementInstance::new(vec![0], &[4], 1.5, 1);
        assert!(matches!(place(&inst, 10, 1, &WorkMeter::new()), Err(PlacementError::InvalidInstance(_))));
        let inst = PlacementInstance::new(vec![0], &[4], 2.0, 0);
        assert!(matches!(place(&inst, 10, 1, &WorkMeter::new()), Err(PlacementError::InvalidInstance(_))));
        let inst = PlacementInstance::new(vec![3], &[4], 2.0, 1);
        assert!(matches!(place(&inst, 10, 1, &WorkMeter::new()), Err(PlacementError::InvalidInstance(_))));
    }

    #[test]
    fn overfull_target_times_out() {
        let inst = PlacementInstance::new(vec![0, 0, 0], &[2], 2.0, 1);
        let err = place_unchecked(&inst, 50, 1, &WorkMeter::new()).unwrap_err();
        assert_eq!(err, PlacementError::TimedOut { rounds: 50, unplaced: 1 });
    }

    #[test]
    fn deterministic_and_bounded_probes() {
        let n = 5000;
        let target_of: Vec<u32> = (0..n).map(|i| (i % 37) as u32).collect();
        let caps: Vec<usize> = (0..37).map(|t| 2 * target_of.iter().filter(|&&x| x == t).count()).collect();
        let d = ceil_log2(n) as usize;
        let inst = PlacementInstance::new(target_of, &caps, 2.0, d);
        let a = place(&inst, default_round_cap(n), 9, &WorkMeter::new()).unwrap();
        let b = place(&inst, default_round_cap(n), 9, &WorkMeter::new()).unwrap();
        assert_eq!(a.slot_of, b.slot_of);
        a.audit(&inst).unwrap();
        assert!(a.probes <= (a.rounds_used * n.div_ceil(d)) as u64);
        for (occ, load) in a.occupancy(&inst).into_iter().zip(inst.loads()) {
            assert!(occ <= load);
        }
    }

    #[test]
    fn empty_instance() {
        let inst = PlacementInstance::new(vec![], &[3], 2.0, 4);
        let res = place(&inst, 1, 0, &WorkMeter::new()).unwrap();
        assert_eq!(res.rounds_used, 0);
        assert_eq!(res.arena, vec![EMPTY_SLOT; 3]);
    }
}
