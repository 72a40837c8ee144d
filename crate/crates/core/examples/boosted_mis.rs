//! Maximal independent set through the partition pipeline and with plain Luby.

use whp_parallel::graph::{generate, GraphKind};
use whp_parallel::graph_algos::{boosted_mis, luby_mis, verify_mis};
use whp_parallel::{ceil_log2, WorkMeter};

pub fn main() {
    for kind in [GraphKind::Gnm, GraphKind::Star, GraphKind::Path] {
        let g = generate(kind, 1 << 14, 1 << 17, 2).expect("graph");
        let meter = WorkMeter::new();
        let (s, rep) = boosted_mis(&g, ceil_log2(g.n()) as usize, 3, &meter).expect("boosted");
        assert!(verify_mis(&g, &s));
        let luby_meter = WorkMeter::new();
        let (l, rounds) = luby_mis(&g, 3, &luby_meter);
        assert!(verify_mis(&g, &l));
        println!(
            "{kind}: n={} m={}; boosted |S|={} rounds {} work {}; luby |S|={} rounds {rounds} work {}",
            g.n(),
            g.m(),
            s.len(),
            rep.total_rounds(),
            meter.total_ops(),
            l.len(),
            luby_meter.total_ops()
        );
    }
}
