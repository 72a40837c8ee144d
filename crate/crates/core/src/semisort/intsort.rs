//! Unstable integer sort for keys in `[n]`, built on the semisort.

use rayon::prelude::*;
use thiserror::Error;

use crate::primitives::{filter, scan};
use crate::WorkMeter;

use super::{semisort, Record, SemisortError, SemisortParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntSortError {
    #[error("key {key} is outside [0, {bound})")]
    KeyOutOfRange { key: u64, bound: u64 },
    #[error(transparent)]
    Semisort(#[from] SemisortError),
}

/// Sorts records whose keys lie in `[0, records.len())`.
pub fn integer_sort(records: &[Record], seed: u64, meter: &WorkMeter) -> Result<Vec<Record>, IntSortError> {
    integer_sort_bounded(records, records.len(), seed, meter)
}

/// Sorts records whose keys lie in `[0, bound)`; the counts array has
/// `bound` entries.
///
/// Semisort, then scan for group boundaries, record each group's size in a
/// counts array, prefix-sum the counts into offsets and copy every group to
/// its interval.
pub fn integer_sort_bounded(
    records: &[Record],
    bound: usize,
    seed: u64,
    meter: &WorkMeter,
) -> Result<Vec<Record>, IntSortError> {
    if let Some(r) = records.par_iter().find_any(|r| r.key >= bound as u64) {
        return Err(IntSortError::KeyOutOfRange {
            key: r.key,
            bound: bound as u64,
        });
    }
    let n = records.len();
    let (grouped, _) = semisort(records, &SemisortParams::for_n(n), seed, meter)?;

    let idx: Vec<usize> = (0..n).collect();
    let starts = filter(&idx, |&i| i == 0 || grouped[i - 1].key != grouped[i].key, meter);

    meter.charge("intsort_counts", bound as u64 + starts.len() as u64);
    let mut counts = vec![0usize; bound];
    let mut source = vec![0usize; bound];
    for (g, &s) in starts.iter().enumerate() {
        let end = starts.get(g + 1).copied().unwrap_or(n);
        let key = grouped[s].key as usize;
        assert_eq!(counts[key], 0, "semisort left key {key} in two groups");
        counts[key] = end - s;
        source[key] = s;
    }
    let (offsets, total) = scan(&counts, |a, b| a + b, 0, meter);
    debug_assert_eq!(total, n);

    meter.charge("intsort_copy", n as u64);
    let mut out = vec![Record::default(); n];
    let mut jobs: Vec<(&mut [Record], usize)> = Vec::with_capacity(starts.len());
    let mut rest: &mut [Record] = &mut out;
    let mut cursor = 0;
    for key in 0..bound {
        if counts[key] == 0 {
            continue;
        }
        debug_assert_eq!(offsets[key], cursor);
        let (head, tail) = rest.split_at_mut(counts[key]);
        jobs.push((head, source[key]));
        rest = tail;
        cursor += counts[key];
    }
    jobs.into_par_iter()
        .for_each(|(dst, src)| dst.copy_from_slice(&grouped[src..src + dst.len()]));
    Ok(out)
}
