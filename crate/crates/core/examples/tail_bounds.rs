//! Closed-form tail bounds, in plain and logarithmic form.

use whp_parallel::bench::{bound_eval, Bound};

pub fn main() {
    let bounds = [
        Bound::ChernoffUpper { mu: 20.0, delta: 1.0 },
        Bound::ChernoffLower { mu: 200.0, delta: 0.5 },
        Bound::GeomSum { lambda: 2.0, r: 40.0 },
        Bound::WeightedGeom { weights: vec![1.0; 64], t: 100.0 },
        Bound::Mcdiarmid { diffs: vec![1.0; 100], t: 30.0 },
        Bound::ChernoffUpper { mu: 1e5, delta: 1.0 },
    ];
    for b in &bounds {
        let p = bound_eval(b).expect("valid parameters");
        println!("{:>15}: {p:.6e}  (ln {:.4})", b.name(), b.log_eval().unwrap());
    }
}
