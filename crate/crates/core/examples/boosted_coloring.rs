//! (Δ+1)-coloring through the partition pipeline, compared with a single
//! palette-sampling run on the whole graph.

use whp_parallel::graph::{generate, GraphKind};
use whp_parallel::graph_algos::{boosted_coloring, palette_color, verify_coloring, PaletteSet};
use whp_parallel::{ceil_log2, WorkMeter};

pub fn main() {
    for kind in [GraphKind::Gnm, GraphKind::PowerLaw] {
        let g = generate(kind, 1 << 13, 1 << 16, 4).expect("graph");
        let delta = g.max_degree();

        let meter = WorkMeter::new();
        let (c, rep) = boosted_coloring(&g, ceil_log2(g.n()) as usize, 8, &meter).expect("boosted");
        assert!(verify_coloring(&g, &c, delta));
        println!(
            "{kind}: Δ={delta}, boosted {} colors, work/m {:.1}, {} culled, {} cut edges",
            c.distinct(),
            meter.total_ops() as f64 / g.m() as f64,
            rep.culled,
            rep.total_cut()
        );

        let meter = WorkMeter::new();
        let (c, rounds) = palette_color(&g, &PaletteSet::full(g.n(), delta as u32 + 1), 8, &meter).expect("direct");
        assert!(verify_coloring(&g, &c, delta));
        println!("{kind}: direct {} colors in {rounds} rounds, work/m {:.1}", c.distinct(), meter.total_ops() as f64 / g.m() as f64);
    }
}
