//! Scatter records into per-target arrays with twice the needed capacity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whp_parallel::placement::{default_round_cap, place, PlacementInstance};
use whp_parallel::{ceil_log2, WorkMeter};

pub fn main() {
    let n = 1 << 16;
    let block = ceil_log2(n) as usize;
    let targets = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let target_of: Vec<u32> = (0..n).map(|_| rng.random_range(0..targets)).collect();
    let mut loads = vec![0usize; targets as usize];
    target_of.iter().for_each(|&t| loads[t as usize] += 1);
    let caps: Vec<usize> = loads.iter().map(|l| 2 * l).collect();

    let inst = PlacementInstance::new(target_of, &caps, 2.0, block);
    let meter = WorkMeter::new();
    let res = place(&inst, default_round_cap(n), 5, &meter).expect("placement");
    res.audit(&inst).expect("injective and in range");
    let occ = res.occupancy(&inst);
    println!("placed {n} records into {targets} targets in {} rounds", res.rounds_used);
    println!("probes {} ({:.2} per record), fullest target {}", res.probes, res.probes as f64 / n as f64, occ.iter().max().unwrap());
}
