//! Grouping of one packed light bucket by repeated universal rehashing.

use crate::hashing::{detect_collision, UniversalHash};
use crate::rng::stream_rng;
use crate::WorkMeter;

use super::Record;

/// Groups equal keys of `bucket` together.
///
/// Each attempt draws `g : U → [m^K]` from the universal family (`m` is the
/// bucket size), radix sorts by `g` with `K` stable counting passes at base
/// `m`, and accepts the order unless two distinct keys share a hash value.
/// Returns the grouped bucket and the number of attempts. An empty bucket
/// returns zero attempts.
pub fn local_semisort(bucket: Vec<Record>, hash_exponent: u32, seed: u64, meter: &WorkMeter) -> (Vec<Record>, u32) {
    let m = bucket.len();
    if m == 0 {
        return (bucket, 0);
    }
    let base = m as u128;
    let range = base.checked_pow(hash_exponent).unwrap_or(u128::MAX);
    let mut powers = Vec::with_capacity(hash_exponent as usize);
    let mut p = 1u128;
    for _ in 0..hash_exponent {
        powers.push(p);
        p = p.saturating_mul(base);
    }

    let mut rng = stream_rng(seed, 0);
    let mut hashed: Vec<(u128, u32)> = Vec::with_capacity(m);
    let mut scratch: Vec<(u128, u32)> = vec![(0, 0); m];
    let mut counts = vec![0usize; m];
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let g = UniversalHash::from_rng(&mut rng, range).expect("range is at least 1");
        hashed.clear();
        hashed.extend(bucket.iter().enumerate().map(|(i, r)| (g.hash(r.key), i as u32)));

        // Least-significant digit first.
        for &pow in &powers {
            counts.iter_mut().for_each(|c| *c = 0);
            for &(h, _) in &hashed {
                counts[((h / pow) % base) as usize] += 1;
            }
            let mut sum = 0;
            for c in counts.iter_mut() {
                let here = *c;
                *c = sum;
                sum += here;
            }
            for &(h, i) in &hashed {
                let digit = ((h / pow) % base) as usize;
                scratch[counts[digit]] = (h, i);
                counts[digit] += 1;
            }
            std::mem::swap(&mut hashed, &mut scratch);
        }

        let keyed: Vec<(u128, u64)> = hashed.iter().map(|&(h, i)| (h, bucket[i as usize].key)).collect();
        // hash + K counting passes (count, offsets, scatter) + collision scan
        meter.charge("local_semisort", (m * (2 + 3 * hash_exponent as usize)) as u64);
        if !detect_collision(&keyed) {
            let out = hashed.iter().map(|&(_, i)| bucket[i as usize]).collect();
            return (out, attempts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semisort::is_semisorted;

    #[test]
    fn single_record_unchanged() {
        let (out, attempts) = local_semisort(vec![Record::new(9, 1)], 3, 0, &WorkMeter::new());
        assert_eq!(out, vec![Record::new(9, 1)]);
        assert_eq!(attempts, 1);
    }

    #[test]
    fn equal_keys_never_collide() {
        let bucket: Vec<Record> = (0..50).map(|i| Record::new(4, i)).collect();
        let (out, attempts) = local_semisort(bucket.clone(), 3, 5, &WorkMeter::new());
        assert_eq!(attempts, 1);
        let mut a = out.clone();
        a.sort();
        assert_eq!(a, bucket);
    }

    #[test]
    fn groups_mixed_bucket_and_charges_per_attempt() {
        let bucket: Vec<Record> = (0..300).map(|i| Record::new(i % 17 * 1_000_003, i)).collect();
        let meter = WorkMeter::new();
        let (out, attempts) = local_semisort(bucket.clone(), 3, 7, &meter);
        assert!(is_semisorted(&out));
        let mut a = out;
        a.sort();
        let mut b = bucket;
        b.sort();
        assert_eq!(a, b);
        assert_eq!(meter.total_ops(), attempts as u64 * 300 * 11);
    }

    #[test]
    fn empty_bucket() {
        assert_eq!(local_semisort(vec![], 3, 0, &WorkMeter::new()), (vec![], 0));
    }
}
