//! Bulk array primitives with work accounting.
//!
//! Charged work per call, for an input of size `s`:
//!
//! | primitive         | work            | rounds          |
//! |-------------------|-----------------|-----------------|
//! | `scan`            | `2s`            | `⌈log2 s⌉`      |
//! | `reduce`          | `s`             | `⌈log2 s⌉`      |
//! | `filter`          | `2s`            | `⌈log2 s⌉`      |
//! | `partition_by`    | `2s`            | `⌈log2 s⌉`      |
//! | `comparison_sort` | `s·⌈log2 s⌉`    | `⌈log2 s⌉`      |
//!
//! so the linear primitives stay inside `[s, LINEAR_WORK_CONSTANT·s]`.

use rayon::prelude::*;

use crate::{ceil_log2, WorkMeter};

/// Upper constant `C` of the linear primitives' charged work `≤ C·s`.
pub const LINEAR_WORK_CONSTANT: u64 = 2;

const GRAIN: usize = 2048;

fn charge(meter: &WorkMeter, phase: &str, work: u64, size: usize) {
    meter.charge(phase, work);
    meter.add_rounds(ceil_log2(size) as u64);
}

/// Exclusive prefix scan. Returns the prefix array and the total.
pub fn scan<T, F>(a: &[T], op: F, identity: T, meter: &WorkMeter) -> (Vec<T>, T)
where
    T: Copy + Send + Sync,
    F: Fn(T, T) -> T + Sync,
{
    charge(meter, "scan", 2 * a.len() as u64, a.len());
    if a.is_empty() {
        return (Vec::new(), identity);
    }
    let block_totals: Vec<T> = a
        .par_chunks(GRAIN)
        .map(|c| c.iter().fold(identity, |acc, &x| op(acc, x)))
        .collect();
    let mut offsets = Vec::with_capacity(block_totals.len());
    let mut running = identity;
    for &t in &block_totals {
        offsets.push(running);
        running = op(running, t);
    }
    let mut out = vec![identity; a.len()];
    out.par_chunks_mut(GRAIN)
        .zip(a.par_chunks(GRAIN))
        .zip(offsets.par_iter())
        .for_each(|((dst, src), &start)| {
            let mut acc = start;
            for (d, &x) in dst.iter_mut().zip(src) {
                *d = acc;
                acc = op(acc, x);
            }
        });
    (out, running)
}

pub fn reduce<T, F>(a: &[T], f: F, identity: T, meter: &WorkMeter) -> T
where
    T: Copy + Send + Sync,
    F: Fn(T, T) -> T + Sync,
{
    charge(meter, "reduce", a.len() as u64, a.len());
    let partial: Vec<T> = a
        .par_chunks(GRAIN)
        .map(|c| c.iter().fold(identity, |acc, &x| f(acc, x)))
        .collect();
    partial.into_iter().fold(identity, &f)
}

/// Elements satisfying `p`, in input order.
pub fn filter<T, P>(a: &[T], p: P, meter: &WorkMeter) -> Vec<T>
where
    T: Clone + Send + Sync,
    P: Fn(&T) -> bool + Sync,
{
    charge(meter, "filter", 2 * a.len() as u64, a.len());
    let parts: Vec<Vec<T>> = a
        .par_chunks(GRAIN)
        .map(|c| c.iter().filter(|x| p(x)).cloned().collect())
        .collect();
    parts.concat()
}

/// Reorders `a` so that every element satisfying `p` precedes the rest.
/// Returns the reordered array and the index of the first non-satisfying
/// element.
pub fn partition_by<T, P>(a: Vec<T>, p: P, meter: &WorkMeter) -> (Vec<T>, usize)
where
    T: Send + Sync,
    P: Fn(&T) -> bool + Sync,
{
    charge(meter, "partition", 2 * a.len() as u64, a.len());
    let (yes, no): (Vec<T>, Vec<T>) = a.into_par_iter().partition(|x| p(x));
    let split = yes.len();
    let mut out = yes;
    out.extend(no);
    (out, split)
}

/// Sorts by a total order with a parallel merge sort.
pub fn comparison_sort<T, F>(mut a: Vec<T>, less: F, meter: &WorkMeter) -> Vec<T>
where
    T: Send,
    F: Fn(&T, &T) -> bool + Sync,
{
    let s = a.len();
    charge(meter, "comparison_sort", s as u64 * ceil_log2(s) as u64, s);
    a.par_sort_by(|x, y| {
        if less(x, y) {
            std::cmp::Ordering::Less
        } else if less(y, x) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    a
}

pub fn comparison_sort_by_key<T, K, F>(mut a: Vec<T>, key: F, meter: &WorkMeter) -> Vec<T>
where
    T: Send,
    K: Ord,
    F: Fn(&T) -> K + Sync,
{
    let s = a.len();
    charge(meter, "comparison_sort", s as u64 * ceil_log2(s) as u64, s);
    a.par_sort_by_key(key);
    a
}
