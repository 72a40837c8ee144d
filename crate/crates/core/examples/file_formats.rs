//! Round-trip records and graphs through their on-disk formats.

use whp_parallel::bench::{gen_keys, KeyDist};
use whp_parallel::graph::io::{load_graph, save_graph};
use whp_parallel::graph::{generate, GraphKind};
use whp_parallel::semisort::io::{load_records, save_records};

pub fn main() {
    let dir = std::env::temp_dir().join(format!("whp-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let recs = gen_keys(KeyDist::Zipf(1.0), 10_000, 1);
    let path = dir.join("keys.psrt");
    save_records(&path, &recs).unwrap();
    assert_eq!(load_records(&path).unwrap(), recs);
    println!("{}: {} bytes", path.display(), std::fs::metadata(&path).unwrap().len());

    let g = generate(GraphKind::PowerLaw, 2000, 10_000, 1).unwrap();
    for name in ["graph.txt", "graph.pcsr"] {
        let path = dir.join(name);
        save_graph(&path, &g).unwrap();
        assert_eq!(load_graph(&path).unwrap(), g);
        println!("{}: {} bytes", path.display(), std::fs::metadata(&path).unwrap().len());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
