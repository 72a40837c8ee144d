//! Split a random graph into k pieces with high-degree culling, then
//! lay it out piece by piece.

use whp_parallel::graph::{cull_partition, generate, piece_edges, reorganize, GraphKind};
use whp_parallel::WorkMeter;

pub fn main() {
    let (n, m) = (1 << 14, 1 << 18);
    let g = generate(GraphKind::Gnm, n, m, 1).expect("graph");
    for k in [4, 14] {
        let meter = WorkMeter::new();
        let p = cull_partition(&g, k, 9, &meter).expect("partition");
        let max_piece = piece_edges(&g, &p).into_iter().max().unwrap_or(0);
        println!(
            "k={k}: {} phases, {} culled (bound {}), largest piece {max_piece} edges, C_bal {:.3}",
            p.phases,
            p.culled.len(),
            p.culled_bound(),
            max_piece as f64 * (k * k) as f64 / m as f64
        );
        for rec in &p.phase_log {
            println!("    tau {:.2}: removed {}, max degree {} -> {}", rec.tau, rec.removed, rec.max_degree_before, rec.max_degree_after);
        }
        let r = reorganize(&g, &p, 10, &meter).expect("reorganize");
        let v = (0..=k).find_map(|i| r.piece(i).first().copied()).unwrap();
        println!("    vertex {v}: {} internal, {} cut neighbors; total work {}", r.internal(v).len(), r.cut(v).len(), meter.total_ops());
    }
}
