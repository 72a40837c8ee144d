//! Work-instrumented parallel primitives with high-probability linear-work
//! guarantees.
//!
//! The crate is organised bottom-up:
//!
//! * [`meter`] and [`primitives`]: bulk array operations (scan, reduce,
//!   filter, partition, comparison sort) that charge abstract work and round
//!   counts to a [`WorkMeter`].
//! * [`hashing`]: simple tabulation hashing and a 2-universal family.
//! * [`placement`]: block-parallel random probing of records into
//!   slack-capacity target arrays.
//! * [`semisort`]: sampling-based semisort with rehash-driven local grouping,
//!   the unstable integer sort built on it, and the binary record file format.
//! * [`graph`]: CSR graphs, generators, the culled balanced partition and
//!   partition-aware reorganisation.
//! * [`graph_algos`]: Luby MIS, palette-sampling coloring, deterministic
//!   extenders and the boosted pipelines.
//! * [`bench`]: experiment configuration, seeded trials, tail-bound
//!   evaluators, reports and the `whp-bench` command line.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod bench;
pub mod graph;
pub mod graph_algos;
pub mod hashing;
pub mod meter;
pub mod placement;
pub mod primitives;
pub mod rng;
pub mod semisort;

pub use meter::{MeterSnapshot, WorkMeter};
pub use semisort::Record;

/// `⌈log2 n⌉`, with the convention that values below 2 map to 1.
///
/// Every "log n" in the library goes through this helper so that constants
/// derived from it are integers and reproducible.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
