use std::collections::HashMap;

use proptest::collection::vec;
use proptest::prelude::*;

use whp_parallel::graph::{cull_partition, reorganize, Graph, CULLED};
use whp_parallel::graph_algos::{boosted_coloring, boosted_mis, luby_mis, verify_coloring, verify_mis};
use whp_parallel::semisort::{integer_sort, is_semisorted, semisort, SemisortParams};
use whp_parallel::{Record, WorkMeter};

fn records(keys: &[u64]) -> Vec<Record> {
    keys.iter().enumerate().map(|(i, &k)| Record::new(k, i as u64)).collect()
}

fn sorted(mut r: Vec<Record>) -> Vec<Record> {
    r.sort_unstable();
    r
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..120).prop_flat_map(|n| {
        vec((0..n as u32, 0..n as u32), 0..6 * n).prop_map(move |pairs| {
            let edges: Vec<(u32, u32)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semisort_groups_and_permutes(keys in vec(0u64..64, 0..3000), seed: u64) {
        let input = records(&keys);
        let (out, _) = semisort(&input, &SemisortParams::for_n(input.len()), seed, &WorkMeter::new()).unwrap();
        prop_assert!(is_semisorted(&out));
        prop_assert_eq!(sorted(out), sorted(input));
    }

    #[test]
    fn semisort_is_deterministic(keys in vec(any::<u64>(), 0..2000), seed: u64) {
        let input = records(&keys);
        let p = SemisortParams::for_n(input.len());
        let a = semisort(&input, &p, seed, &WorkMeter::new()).unwrap().0;
        let b = semisort(&input, &p, seed, &WorkMeter::new()).unwrap().0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn group_sizes_survive(keys in vec(0u64..8, 1..2000), seed: u64) {
        let input = records(&keys);
        let (out, _) = semisort(&input, &SemisortParams::for_n(input.len()), seed, &WorkMeter::new()).unwrap();
        let mut want: HashMap<u64, usize> = HashMap::new();
        keys.iter().for_each(|&k| *want.entry(k).or_default() += 1);
        let runs = out.chunk_by(|a, b| a.key == b.key).map(|c| (c[0].key, c.len())).collect::<Vec<_>>();
        prop_assert_eq!(runs.len(), want.len());
        for (k, len) in runs {
            prop_assert_eq!(want[&k], len);
        }
    }

    #[test]
    fn integer_sort_orders(raw in vec(any::<u64>(), 1..3000), seed: u64) {
        let n = raw.len() as u64;
        let keys: Vec<u64> = raw.iter().map(|k| k % n).collect();
        let input = records(&keys);
        let out = integer_sort(&input, seed, &WorkMeter::new()).unwrap();
        prop_assert!(out.windows(2).all(|w| w[0].key <= w[1].key));
        prop_assert_eq!(sorted(out), sorted(input));
    }

    #[test]
    fn luby_is_maximal(g in graph_strategy(), seed: u64) {
        let (s, _) = luby_mis(&g, seed, &WorkMeter::new());
        prop_assert!(verify_mis(&g, &s));
    }

    #[test]
    fn boosted_outputs_verify(g in graph_strategy(), k in 1usize..8, seed: u64) {
        let (c, rep) = boosted_coloring(&g, k, seed, &WorkMeter::new()).unwrap();
        prop_assert!(verify_coloring(&g, &c, g.max_degree()));
        prop_assert!(rep.total_cut() <= g.m());
        let (s, _) = boosted_mis(&g, k, seed, &WorkMeter::new()).unwrap();
        prop_assert!(verify_mis(&g, &s));
    }

    #[test]
    fn reorganize_splits_adjacency(g in graph_strategy(), k in 1usize..6, seed: u64) {
        prop_assume!(g.m() > 0);
        let p = cull_partition(&g, k, seed, &WorkMeter::new()).unwrap();
        let r = reorganize(&g, &p, seed, &WorkMeter::new()).unwrap();
        let piece_of = |v: u32| if p.assignment[v as usize] == CULLED { k } else { p.assignment[v as usize] as usize };
        let mut seen = 0;
        for i in 0..=k {
            for &v in r.piece(i) {
                seen += 1;
                prop_assert_eq!(piece_of(v), i);
                let mut adj = r.adjacency(v).to_vec();
                adj.sort_unstable();
                prop_assert_eq!(adj, g.neighbors(v).to_vec());
                prop_assert!(r.internal(v).iter().all(|&u| piece_of(u) == i));
                prop_assert!(r.cut(v).iter().all(|&u| piece_of(u) != i));
            }
        }
        prop_assert_eq!(seen, g.n());
    }
}
