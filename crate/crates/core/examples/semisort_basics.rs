//! Group records by key with the randomized semisort and inspect its trace.

use whp_parallel::bench::{gen_keys, KeyDist};
use whp_parallel::semisort::{is_semisorted, semisort, SemisortParams};
use whp_parallel::WorkMeter;

pub fn main() {
    let n = 1 << 16;
    for dist in [KeyDist::Uniform, KeyDist::Zipf(1.2), KeyDist::AllEqual] {
        let records = gen_keys(dist, n, 42);
        let meter = WorkMeter::new();
        let (out, trace) = semisort(&records, &SemisortParams::for_n(n), 7, &meter).expect("semisort");
        assert!(is_semisorted(&out));
        let groups = out.chunk_by(|a, b| a.key == b.key).count();
        println!(
            "{dist:>10}: {groups} groups, work/n {:.2}, {} restarts, max bucket {}, max rehash attempts {}",
            meter.total_ops() as f64 / n as f64,
            trace.restarts,
            trace.max_bucket_size,
            trace.max_attempts()
        );
    }
}
