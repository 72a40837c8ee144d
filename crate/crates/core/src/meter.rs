//! Abstract work and round accounting.
//!
//! One unit of work is charged per element touched per bulk phase, and one
//! round per bulk-parallel phase (tree-shaped primitives charge `⌈log2 s⌉`
//! rounds). The counters are independent of compiler and hardware, which is
//! what lets linear-work claims be checked as plain inequalities.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

/// Shared work/round counters. Safe to charge from many threads at once.
#[derive(Debug, Default)]
pub struct WorkMeter {
    total_ops: AtomicU64,
    rounds: AtomicU64,
    phases: Mutex<BTreeMap<String, u64>>,
}

/// A point-in-time copy of a [`WorkMeter`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MeterSnapshot {
    pub total_ops: u64,
    pub rounds: u64,
    pub phase_breakdown: BTreeMap<String, u64>,
}

impl WorkMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Charges `ops` units of work to `phase`.
    pub fn charge(&self, phase: &str, ops: u64) {
        if ops == 0 {
            return;
        }
        // total_ops is updated under the same lock so it always equals the
        // sum of the breakdown when observed through `snapshot`.
        let mut phases = self.phases.lock().expect("meter poisoned");
        *phases.entry(phase.to_owned()).or_insert(0) += ops;
        self.total_ops.fetch_add(ops, Ordering::Relaxed);
    }

    pub fn add_rounds(&self, rounds: u64) {
        self.rounds.fetch_add(rounds, Ordering::Relaxed);
    }

    pub fn total_ops(&self) -> u64 {
        self.total_ops.load(Ordering::Relaxed)
    }

    pub fn rounds(&self) -> u64 {
        self.rounds.load(Ordering::Relaxed)
    }

    pub fn phase(&self, phase: &str) -> u64 {
        let phases = self.phases.lock().expect("meter poisoned");
        phases.get(phase).copied().unwrap_or(0)
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        let phases = self.phases.lock().expect("meter poisoned");
        MeterSnapshot {
            total_ops: self.total_ops.load(Ordering::Relaxed),
            rounds: self.rounds.load(Ordering::Relaxed),
            phase_breakdown: phases.clone(),
        }
    }

    /// Adds every counter of `other` into `self`.
    pub fn absorb(&self, other: &WorkMeter) {
        let snap = other.snapshot();
        for (phase, ops) in &snap.phase_breakdown {
            self.charge(phase, *ops);
        }
        self.add_rounds(snap.rounds);
    }
}

impl MeterSnapshot {
    pub fn breakdown_sum(&self) -> u64 {
        self.phase_breakdown.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn total_matches_breakdown() {
        let meter = WorkMeter::new();
        meter.charge("a", 3);
        meter.charge("b", 4);
        meter.charge("a", 1);
        meter.charge("c", 0);
        let snap = meter.snapshot();
        assert_eq!(snap.total_ops, 8);
        assert_eq!(snap.breakdown_sum(), 8);
        assert_eq!(meter.phase("a"), 4);
        assert!(!snap.phase_breakdown.contains_key("c"));
    }

    #[test]
    fn concurrent_charges_are_not_lost() {
        let meter = WorkMeter::new();
        (0..10_000u64).into_par_iter().for_each(|i| {
            meter.charge(if i % 2 == 0 { "even" } else { "odd" }, 1);
            meter.add_rounds(1);
        });
        let snap = meter.snapshot();
        assert_eq!(snap.total_ops, 10_000);
        assert_eq!(snap.rounds, 10_000);
        assert_eq!(snap.phase_breakdown["even"], 5_000);
    }

    #[test]
    fn absorb_merges() {
        let a = WorkMeter::new();
        let b = WorkMeter::new();
        a.charge("x", 2);
        b.charge("x", 5);
        b.add_rounds(3);
        a.absorb(&b);
        assert_eq!(a.phase("x"), 7);
        assert_eq!(a.rounds(), 3);
    }
}
