//! Sampling-based semisort with high-probability linear work.
//!
//! Pipeline of one attempt:
//!
//! 1. sample every record independently with probability `p_s`;
//! 2. sort the sample and count `σ_x` per key;
//! 3. split records into heavy (`σ_x ≥ τ`) and light;
//! 4. heavy records: comparison sort when there are fewer than `n/log n`,
//!    otherwise place them into per-key arrays of `⌈α·f(σ_x)⌉` slots;
//! 5. light records: comparison sort when there are fewer than `n/log n`,
//!    otherwise tabulation-hash them into `B` buckets and place them into
//!    per-bucket arrays of `⌈α·f(σ_b)⌉` slots;
//! 6. pack every light bucket and group it with [`local_semisort`];
//! 7. pack all segments into the output with a prefix sum.
//!
//! A placement that exceeds its round cap discards the attempt and starts
//! over with a fresh derived seed.

mod intsort;
pub mod io;
mod local;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hashing::TabulationHash;
use crate::meter::MeterSnapshot;
use crate::placement::{place_unchecked, PlacementError, PlacementInstance, EMPTY_SLOT};
use crate::primitives::{comparison_sort, comparison_sort_by_key, filter, partition_by, scan};
use crate::rng::{bernoulli_threshold, derive_seed, mix64, random_words};
use crate::{ceil_log2, WorkMeter};

pub use intsort::{integer_sort, integer_sort_bounded, IntSortError};
pub use local::local_semisort;

/// A keyed record. Only the key takes part in comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Record {
    pub key: u64,
    pub payload: u64,
}

impl Record {
    pub fn new(key: u64, payload: u64) -> Self {
        Self { key, payload }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemisortError {
    #[error("placement timed out on {attempts} consecutive attempts")]
    RestartExceeded { attempts: u32 },
    #[error("invalid semisort parameters: {0}")]
    InvalidParams(String),
}

/// Names accepted by [`SemisortParams::set`].
pub const PARAM_KEYS: &[&str] = &[
    "log_n", "p_s", "sample_prob", "tau", "heavy_threshold", "alpha", "c_alloc", "K", "hash_exponent", "B",
    "buckets", "d", "block", "round_cap", "max_restarts", "small_n_cutoff",
];

/// Tunable constants. [`SemisortParams::for_n`] gives the defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemisortParams {
    /// `⌈log2 n⌉`; every "log n" in the allocation function uses it.
    pub log_n: u32,
    /// Sampling probability `p_s`.
    pub sample_prob: f64,
    /// Heavy threshold `τ` on sample counts.
    pub heavy_threshold: u64,
    /// Slack factor `α`.
    pub alpha: f64,
    /// Constant `c` of the allocation function.
    pub c_alloc: f64,
    /// Exponent `K` of the rehash range `m_b^K`.
    pub hash_exponent: u32,
    /// Number of light buckets `B`.
    pub buckets: usize,
    /// Placement block size `d`.
    pub block: usize,
    pub round_cap: usize,
    pub max_restarts: u32,
    /// Inputs shorter than this are comparison sorted directly.
    pub small_n_cutoff: usize,
}

impl SemisortParams {
    pub fn for_n(n: usize) -> Self {
        let log_n = ceil_log2(n);
        let l = log_n as usize;
        Self {
            log_n,
            sample_prob: 1.0 / log_n as f64,
            heavy_threshold: 2 * log_n as u64,
            alpha: 2.0,
            c_alloc: 3.0,
            hash_exponent: 3,
            buckets: n.div_ceil(l * l).max(1),
            block: l,
            round_cap: 8 * l,
            max_restarts: 3,
            small_n_cutoff: 1 << 10,
        }
    }

    pub fn validate(&self) -> Result<(), SemisortError> {
        let bad = |m: &str| Err(SemisortError::InvalidParams(m.to_owned()));
        if !(self.sample_prob > 0.0 && self.sample_prob <= 1.0) {
            return bad("sample_prob must lie in (0, 1]");
        }
        if self.heavy_threshold < 1 {
            return bad("heavy_threshold must be at least 1");
        }
        if !(self.alpha >= 2.0) {
            return bad("alpha must be at least 2");
        }
        if !(self.c_alloc > 0.0) {
            return bad("c_alloc must be positive");
        }
        if self.hash_exponent < 3 {
            return bad("hash_exponent must be at least 3");
        }
        if self.buckets < 1 || self.buckets > u32::MAX as usize {
            return bad("buckets must lie in 1..2^32");
        }
        if self.block < 1 || self.round_cap < 1 || self.max_restarts < 1 || self.log_n < 1 {
            return bad("block, round_cap, max_restarts and log_n must be at least 1");
        }
        Ok(())
    }

    /// Overrides one parameter by name, as used by `--param KEY=VALUE`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SemisortError> {
        fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, SemisortError> {
            v.parse()
                .map_err(|_| SemisortError::InvalidParams(format!("cannot parse {key}={v}")))
        }
        match key {
            "log_n" => self.log_n = parse(key, value)?,
            "p_s" | "sample_prob" => self.sample_prob = parse(key, value)?,
            "tau" | "heavy_threshold" => self.heavy_threshold = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "c_alloc" => self.c_alloc = parse(key, value)?,
            "K" | "hash_exponent" => self.hash_exponent = parse(key, value)?,
            "B" | "buckets" => self.buckets = parse(key, value)?,
            "d" | "block" => self.block = parse(key, value)?,
            "round_cap" => self.round_cap = parse(key, value)?,
            "max_restarts" => self.max_restarts = parse(key, value)?,
            "small_n_cutoff" => self.small_n_cutoff = parse(key, value)?,
            _ => return Err(SemisortError::InvalidParams(format!("unknown parameter {key}"))),
        }
        Ok(())
    }

    pub fn is_known(key: &str) -> bool {
        PARAM_KEYS.contains(&key)
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("log_n".into(), self.log_n.to_string()),
            ("p_s".into(), self.sample_prob.to_string()),
            ("tau".into(), self.heavy_threshold.to_string()),
            ("alpha".into(), self.alpha.to_string()),
            ("c_alloc".into(), self.c_alloc.to_string()),
            ("K".into(), self.hash_exponent.to_string()),
            ("B".into(), self.buckets.to_string()),
            ("d".into(), self.block.to_string()),
            ("round_cap".into(), self.round_cap.to_string()),
            ("max_restarts".into(), self.max_restarts.to_string()),
            ("small_n_cutoff".into(), self.small_n_cutoff.to_string()),
        ]
    }

    /// The allocation function with this parameter set.
    pub fn f_alloc(&self, s: u64) -> f64 {
        f_alloc(s, self.c_alloc, self.log_n as f64, self.sample_prob)
    }

    fn capacity(&self, s: u64) -> usize {
        (self.alpha * self.f_alloc(s)).ceil() as usize
    }
}

/// `f(s) = (s + c·log n + sqrt(c²·log²n + 2·s·c·log n)) / p_s`.
///
/// An upper estimate of a multiplicity from its binomial sample count;
/// non-decreasing in `s`.
pub fn f_alloc(s: u64, c_alloc: f64, log_n: f64, sample_prob: f64) -> f64 {
    let s = s as f64;
    let cl = c_alloc * log_n;
    (s + cl + (cl * cl + 2.0 * s * cl).sqrt()) / sample_prob
}

/// How a side (heavy or light) of an attempt was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SidePath {
    #[default]
    Empty,
    Sorted,
    Placed,
}

/// Statistics of a semisort call. Sizes describe the successful attempt;
/// `restarts` and `work` cover every attempt.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SemisortTrace {
    pub n: usize,
    pub restarts: u32,
    /// True when the input fell below `small_n_cutoff`.
    pub small_input: bool,
    pub sample_size: usize,
    pub heavy_keys: usize,
    pub heavy_records: usize,
    pub light_records: usize,
    pub heavy_path: SidePath,
    pub light_path: SidePath,
    /// Number of light buckets in use (zero unless the light side was placed).
    pub buckets: usize,
    pub max_bucket_size: usize,
    /// Packed size `m_b` of every non-empty light bucket.
    pub bucket_sizes: Vec<usize>,
    /// Rehash attempts of every non-empty light bucket, aligned with
    /// `bucket_sizes`.
    pub bucket_attempts: Vec<u32>,
    /// Slots allocated for destination arrays, `Σ ⌈α·f(σ)⌉`.
    pub allocated_slots: usize,
    /// `α·(Σ f(σ_x) + Σ f(σ_b))` before rounding.
    pub allocated_real: f64,
    pub heavy_rounds: usize,
    pub light_rounds: usize,
    /// Longest run of one key among light records.
    pub max_light_run: usize,
    pub work: MeterSnapshot,
}

impl SemisortTrace {
    pub fn max_attempts(&self) -> u32 {
        self.bucket_attempts.iter().copied().max().unwrap_or(0)
    }
}

const STREAM_SAMPLE: u64 = 1;
const TAG_HEAVY: u64 = 2;
const TAG_LIGHT: u64 = 3;
const TAG_TAB: u64 = 4;
const TAG_LOCAL: u64 = 5;
const TAG_RESTART: u64 = 1 << 32;

/// Semisorts `records`: the output is a permutation in which equal keys are
/// contiguous.
pub fn semisort(
    records: &[Record],
    params: &SemisortParams,
    seed: u64,
    meter: &WorkMeter,
) -> Result<(Vec<Record>, SemisortTrace), SemisortError> {
    params.validate()?;
    let local = WorkMeter::new();
    let n = records.len();

    if n < params.small_n_cutoff {
        let out = comparison_sort_by_key(records.to_vec(), |r| (mix64(r.key), r.key), &local);
        meter.absorb(&local);
        let trace = SemisortTrace {
            n,
            small_input: true,
            max_light_run: longest_run(&out),
            work: local.snapshot(),
            ..Default::default()
        };
        return Ok((out, trace));
    }

    for attempt in 0..=params.max_restarts {
        let attempt_seed = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, TAG_RESTART + attempt as u64)
        };
        match semisort_attempt(records, params, attempt_seed, &local) {
            Ok((out, mut trace)) => {
                trace.restarts = attempt;
                trace.work = local.snapshot();
                meter.absorb(&local);
                return Ok((out, trace));
            }
            Err(PlacementError::TimedOut { .. }) => continue,
            Err(PlacementError::InvalidInstance(m)) => {
                meter.absorb(&local);
                return Err(SemisortError::InvalidParams(m));
            }
        }
    }
    meter.absorb(&local);
    Err(SemisortError::RestartExceeded {
        attempts: params.max_restarts + 1,
    })
}

fn longest_run(records: &[Record]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, r) in records.iter().enumerate() {
        run = if i > 0 && records[i - 1].key == r.key { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}

/// Run-length counts of a sorted key array.
fn run_counts(sorted: &[u64]) -> Vec<(u64, u64)> {
    let mut runs: Vec<(u64, u64)> = Vec::new();
    for &k in sorted {
        match runs.last_mut() {
            Some((key, count)) if *key == k => *count += 1,
            _ => runs.push((k, 1)),
        }
    }
    runs
}

fn semisort_attempt(
    records: &[Record],
    params: &SemisortParams,
    seed: u64,
    meter: &WorkMeter,
) -> Result<(Vec<Record>, SemisortTrace), PlacementError> {
    let n = records.len();
    let mut trace = SemisortTrace {
        n,
        ..Default::default()
    };
    let side_cutoff = n / params.log_n as usize;

    // 1. Sampling.
    let coins = random_words(seed, STREAM_SAMPLE, n);
    let threshold = bernoulli_threshold(params.sample_prob);
    meter.charge("sample", n as u64);
    let sample: Vec<u64> = records
        .par_iter()
        .zip(coins.par_iter())
        .filter(|(_, &c)| c < threshold)
        .map(|(r, _)| r.key)
        .collect();
    trace.sample_size = sample.len();

    // 2. Sample counts.
    let sorted = comparison_sort(sample, |a, b| a < b, meter);
    meter.charge("sample_counts", sorted.len() as u64);
    let runs = run_counts(&sorted);

    // 3. Heavy/light split.
    let (heavy_runs, light_runs): (Vec<(u64, u64)>, Vec<(u64, u64)>) =
        runs.into_iter().partition(|&(_, s)| s >= params.heavy_threshold);
    let heavy_index: HashMap<u64, u32> = heavy_runs
        .iter()
        .enumerate()
        .map(|(i, &(k, _))| (k, i as u32))
        .collect();
    trace.heavy_keys = heavy_runs.len();
    meter.charge("classify", n as u64);
    let (mut split, heavy_len) = partition_by(records.to_vec(), |r| heavy_index.contains_key(&r.key), meter);
    let light = split.split_off(heavy_len);
    let heavy = split;
    trace.heavy_records = heavy.len();
    trace.light_records = light.len();

    let mut segments: Vec<Vec<Record>> = Vec::new();

    // 4. Heavy side.
    if !heavy.is_empty() {
        if heavy.len() < side_cutoff {
            trace.heavy_path = SidePath::Sorted;
            segments.push(comparison_sort_by_key(heavy, |r| r.key, meter));
        } else {
            trace.heavy_path = SidePath::Placed;
            let caps: Vec<usize> = heavy_runs.iter().map(|&(_, s)| params.capacity(s)).collect();
            trace.allocated_slots += caps.iter().sum::<usize>();
            trace.allocated_real += heavy_runs.iter().map(|&(_, s)| params.alpha * params.f_alloc(s)).sum::<f64>();
            meter.charge("heavy_targets", heavy.len() as u64 + caps.len() as u64);
            let target_of: Vec<u32> = heavy.par_iter().map(|r| heavy_index[&r.key]).collect();
            let inst = PlacementInstance::new(target_of, &caps, params.alpha, params.block);
            let placed = place_unchecked(&inst, params.round_cap, derive_seed(seed, TAG_HEAVY), meter)?;
            trace.heavy_rounds = placed.rounds_used;
            let packed = filter(&placed.arena, |&s| s != EMPTY_SLOT, meter);
            segments.push(packed.into_par_iter().map(|i| heavy[i as usize]).collect());
        }
    }

    // 5–6. Light side.
    if !light.is_empty() {
        if light.len() < side_cutoff {
            trace.light_path = SidePath::Sorted;
            let sorted = comparison_sort_by_key(light, |r| r.key, meter);
            trace.max_light_run = longest_run(&sorted);
            segments.push(sorted);
        } else {
            trace.light_path = SidePath::Placed;
            let b = params.buckets;
            let tab = TabulationHash::new(derive_seed(seed, TAG_TAB), ceil_log2(b))
                .expect("bucket count fits 64 bits");
            meter.charge("light_hash", light.len() as u64);
            let bucket_of: Vec<u32> = light.par_iter().map(|r| tab.bucket(r.key, b as u64) as u32).collect();
            meter.charge("bucket_counts", light_runs.len() as u64 + b as u64);
            let mut sigma = vec![0u64; b];
            for &(k, s) in &light_runs {
                sigma[tab.bucket(k, b as u64) as usize] += s;
            }
            let caps: Vec<usize> = sigma.iter().map(|&s| params.capacity(s)).collect();
            trace.allocated_slots += caps.iter().sum::<usize>();
            trace.allocated_real += sigma.iter().map(|&s| params.alpha * params.f_alloc(s)).sum::<f64>();
            let inst = PlacementInstance::new(bucket_of, &caps, params.alpha, params.block);
            let placed = place_unchecked(&inst, params.round_cap, derive_seed(seed, TAG_LIGHT), meter)?;
            trace.light_rounds = placed.rounds_used;
            trace.buckets = b;

            meter.charge("pack_buckets", placed.arena.len() as u64);
            let local_seed = derive_seed(seed, TAG_LOCAL);
            let grouped: Vec<(Vec<Record>, u32)> = inst
                .targets
                .par_iter()
                .enumerate()
                .map(|(bucket, t)| {
                    let c_b: Vec<Record> = placed.arena[t.offset..t.offset + t.capacity]
                        .iter()
                        .filter(|&&s| s != EMPTY_SLOT)
                        .map(|&s| light[s as usize])
                        .collect();
                    if c_b.is_empty() {
                        (c_b, 0)
                    } else {
                        local_semisort(c_b, params.hash_exponent, derive_seed(local_seed, bucket as u64), meter)
                    }
                })
                .collect();
            for (bucket, attempts) in grouped {
                if bucket.is_empty() {
                    continue;
                }
                trace.max_bucket_size = trace.max_bucket_size.max(bucket.len());
                trace.max_light_run = trace.max_light_run.max(longest_run(&bucket));
                trace.bucket_sizes.push(bucket.len());
                trace.bucket_attempts.push(attempts);
                segments.push(bucket);
            }
        }
    }

    // 7. Pack.
    let lens: Vec<usize> = segments.iter().map(Vec::len).collect();
    let (_offsets, total) = scan(&lens, |a, b| a + b, 0, meter);
    debug_assert_eq!(total, n);
    meter.charge("output_pack", n as u64);
    let mut out = vec![Record::default(); n];
    let mut pieces: Vec<&mut [Record]> = Vec::with_capacity(segments.len());
    let mut rest: &mut [Record] = &mut out;
    for &len in &lens {
        let (head, tail) = rest.split_at_mut(len);
        pieces.push(head);
        rest = tail;
    }
    pieces
        .into_par_iter()
        .zip(segments.par_iter())
        .for_each(|(dst, src)| dst.copy_from_slice(src));

    Ok((out, trace))
}

/// True iff every distinct key occupies one contiguous run.
pub fn is_semisorted(records: &[Record]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 && records[i - 1].key == r.key {
            continue;
        }
        if !seen.insert(r.key) {
            return false;
        }
    }
    true
}
