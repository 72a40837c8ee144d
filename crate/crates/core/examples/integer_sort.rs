//! Sort records whose keys lie in [n].

use whp_parallel::bench::{gen_keys, KeyDist};
use whp_parallel::semisort::integer_sort;
use whp_parallel::WorkMeter;

pub fn main() {
    let n = 1 << 18;
    let records = gen_keys(KeyDist::Uniform, n, 3);
    let meter = WorkMeter::new();
    let sorted = integer_sort(&records, 11, &meter).expect("keys are below n");
    assert!(sorted.windows(2).all(|w| w[0].key <= w[1].key));
    println!("sorted {n} records: first key {}, last key {}", sorted[0].key, sorted[n - 1].key);
    println!("work/n {:.2}, rounds {}", meter.total_ops() as f64 / n as f64, meter.rounds());
}
