//! Load balance of simple tabulation hashing into buckets.

use whp_parallel::hashing::TabulationHash;

pub fn main() {
    let n: u64 = 1 << 20;
    let buckets: u64 = 1 << 12;
    let h = TabulationHash::new(2024, 64).expect("hash");
    let mut load = vec![0u32; buckets as usize];
    // Consecutive keys are a worst case for weak hash functions.
    for key in 0..n {
        load[h.bucket(key, buckets) as usize] += 1;
    }
    let mean = n as f64 / buckets as f64;
    let max = *load.iter().max().unwrap() as f64;
    let min = *load.iter().min().unwrap() as f64;
    println!("{n} keys into {buckets} buckets: mean {mean}, min {min}, max {max}");
    println!("max/mean {:.3}", max / mean);
}
