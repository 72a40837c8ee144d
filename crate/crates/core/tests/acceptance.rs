//! Acceptance suite. Each test prints one PASS/FAIL line to stderr
//! (bypassing output capture) and then asserts.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::OnceLock;

use astro_float::{BigFloat, Consts, RoundingMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use whp_parallel::bench::{bound_eval, gen_keys, Bound, KeyDist};
use whp_parallel::graph::{cull_partition, generate, piece_edges, Graph, GraphKind};
use whp_parallel::graph_algos::{
    boosted_coloring, boosted_mis, extend_palettes, palette_color, verify_coloring, verify_mis, Coloring, PaletteSet,
};
use whp_parallel::placement::{place, PlacementInstance};
use whp_parallel::semisort::{integer_sort, semisort, SemisortError, SemisortParams, SemisortTrace};
use whp_parallel::{ceil_log2, Record, WorkMeter};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let line = format!("[{}] criterion {id:>2} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn group_counts_ok(input: &[Record], output: &[Record]) -> bool {
    if input.len() != output.len() {
        return false;
    }
    let mut want: HashMap<u64, usize> = HashMap::new();
    for r in input {
        *want.entry(r.key).or_default() += 1;
    }
    let mut seen = HashMap::new();
    let mut i = 0;
    while i < output.len() {
        let mut j = i;
        while j < output.len() && output[j].key == output[i].key {
            j += 1;
        }
        if seen.insert(output[i].key, j - i).is_some() {
            return false;
        }
        i = j;
    }
    if seen != want {
        return false;
    }
    let mut a = input.to_vec();
    let mut b = output.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

#[test]
fn criterion_01_semisort_correctness() {
    let start = std::time::Instant::now();
    let dists = [
        KeyDist::Uniform,
        KeyDist::Zipf(0.8),
        KeyDist::Zipf(1.2),
        KeyDist::AllEqual,
        KeyDist::AllDistinct,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut total = 0;
    for dist in dists {
        for case in 0..500u64 {
            let n = 1usize << rng.random_range(10..=16);
            let seed = rng.random::<u64>();
            let input = gen_keys(dist, n, seed);
            let ok = match semisort(&input, &SemisortParams::for_n(n), seed ^ case, &WorkMeter::new()) {
                Ok((out, _)) => group_counts_ok(&input, &out),
                Err(_) => false,
            };
            total += 1;
            if !ok {
                failures.push(format!("{dist} n={n} seed={seed}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs <= 300.0;
    report(1, "semisort correctness", pass, &format!("{}/{total} cases pass in {secs:.1}s {failures:?}", total - failures.len()));
    assert!(pass);
}

#[test]
fn criterion_02_integer_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for case in 0..200u64 {
        let n = if case % 20 == 0 { 1 << 18 } else { 1usize << rng.random_range(1..=18) };
        let dist = match case % 4 {
            0 => KeyDist::Uniform,
            1 => KeyDist::Zipf(1.1),
            2 => KeyDist::AllDistinct,
            _ => KeyDist::AllEqual,
        };
        let input = gen_keys(dist, n, rng.random());
        let mut oracle = input.clone();
        oracle.sort_by_key(|r| r.key);
        let ok = match integer_sort(&input, case, &WorkMeter::new()) {
            Ok(out) => {
                let keys_match = out.iter().map(|r| r.key).eq(oracle.iter().map(|r| r.key));
                let mut a = out.clone();
                a.sort_unstable();
                let mut b = oracle;
                b.sort_unstable();
                keys_match && a == b
            }
            Err(_) => false,
        };
        failures += (!ok) as usize;
    }
    let pass = failures == 0;
    report(2, "integer sort", pass, &format!("{}/200 instances equal the comparison sort", 200 - failures));
    assert!(pass);
}

struct ScaleRun {
    n: usize,
    work_per_n: f64,
    trace: SemisortTrace,
}

/// 50 seeds at each size with uniform keys, shared by criteria 3 to 5.
fn scale_runs() -> &'static (Vec<ScaleRun>, usize, f64) {
    static RUNS: OnceLock<(Vec<ScaleRun>, usize, f64)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = std::time::Instant::now();
        let mut runs = Vec::new();
        let mut restart_exceeded = 0;
        for lg in [14u32, 16, 18, 20] {
            let n = 1usize << lg;
            for seed in 0..50u64 {
                let input = gen_keys(KeyDist::Uniform, n, 1000 + seed);
                let meter = WorkMeter::new();
                match semisort(&input, &SemisortParams::for_n(n), seed, &meter) {
                    Ok((_, trace)) => runs.push(ScaleRun {
                        n,
                        work_per_n: meter.total_ops() as f64 / n as f64,
                        trace,
                    }),
                    Err(SemisortError::RestartExceeded { .. }) => restart_exceeded += 1,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        (runs, restart_exceeded, start.elapsed().as_secs_f64())
    })
}

fn max_over(runs: &[ScaleRun], n: usize, f: impl Fn(&ScaleRun) -> f64) -> f64 {
    runs.iter().filter(|r| r.n == n).map(f).fold(f64::MIN, f64::max)
}

#[test]
fn criterion_03_work_linearity() {
    let (runs, exceeded, secs) = scale_runs();
    let stats: Vec<(usize, f64)> = [14, 16, 18, 20].iter().map(|&lg| (1usize << lg, max_over(runs, 1 << lg, |r| r.work_per_n))).collect();
    let ratio = stats[3].1 / stats[0].1;
    let pass = *exceeded == 0 && ratio <= 1.5 && *secs <= 600.0;
    report(
        3,
        "work linearity",
        pass,
        &format!("max work/n by size {stats:?}; ratio 2^20/2^14 = {ratio:.4}; RestartExceeded = {exceeded}; {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_bucket_bound() {
    let (runs, _, _) = scale_runs();
    let scaled = |r: &ScaleRun| r.trace.max_bucket_size as f64 / (ceil_log2(r.n) as f64).powi(4);
    let c_b = max_over(runs, 1 << 16, scaled);
    let worst_20 = runs.iter().filter(|r| r.n == 1 << 20).map(|r| r.trace.max_bucket_size).max().unwrap_or(0);
    let limit = c_b * 20f64.powi(4);
    let all_seeds = runs.iter().filter(|r| r.n == 1 << 20).count() == 50;
    let pass = all_seeds && worst_20 as f64 <= limit;
    report(
        4,
        "bucket bound",
        pass,
        &format!("C_B fit at 2^16 = {c_b:.6}; max m_b at 2^20 = {worst_20} <= {limit:.1}"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_rehash_dominance() {
    let (runs, _, _) = scale_runs();
    let attempts: Vec<u32> = runs.iter().flat_map(|r| r.trace.bucket_attempts.iter().copied()).collect();
    let mut detail = format!("{} bucket runs;", attempts.len());
    let mut pass = attempts.len() >= 10_000;
    for j in 1..=5u32 {
        let frac = attempts.iter().filter(|&&a| a > j).count() as f64 / attempts.len() as f64;
        let limit = 2f64.powi(1 - j as i32) + 0.01;
        pass &= frac <= limit;
        detail += &format!(" j={j}: {frac:.5} <= {limit:.4};");
    }
    report(5, "rehash dominance", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_06_placement() {
    let n = 1usize << 16;
    let d = ceil_log2(n) as usize;
    let cap = 8 * d;
    let mut max_rounds = 0;
    let mut max_probes = 0;
    let mut failures = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Even seeds: about d records per target; odd seeds: a random target per record.
        let targets = if seed % 2 == 0 { n / d } else { n };
        let target_of: Vec<u32> = (0..n).map(|_| rng.random_range(0..targets as u32)).collect();
        let mut loads = vec![0usize; targets];
        target_of.iter().for_each(|&t| loads[t as usize] += 1);
        let caps: Vec<usize> = loads.iter().map(|&l| 2 * l).collect();
        let inst = PlacementInstance::new(target_of, &caps, 2.0, d);
        match place(&inst, cap, seed, &WorkMeter::new()) {
            Ok(res) => {
                max_rounds = max_rounds.max(res.rounds_used);
                max_probes = max_probes.max(res.probes);
                if res.rounds_used > cap || res.probes > 4 * n as u64 || res.audit(&inst).is_err() {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let pass = failures == 0;
    report(
        6,
        "placement",
        pass,
        &format!("{}/200 injective within {cap} rounds; max rounds {max_rounds}; max probes {max_probes} <= {}", 200 - failures, 4 * n),
    );
    assert!(pass);
}

#[test]
fn criterion_07_culled_partition() {
    let (n, m) = (1usize << 14, 1usize << 18);
    let k = ceil_log2(n) as usize;
    let mut c_bal: f64 = 0.0;
    let mut failures = Vec::new();
    let mut max_phases = 0;
    let mut max_culled = 0;
    for seed in 0..50u64 {
        let g = generate(GraphKind::Gnm, n, m, seed).unwrap();
        match cull_partition(&g, k, seed, &WorkMeter::new()) {
            Ok(p) => {
                if p.culled.len() as u128 > p.culled_bound() {
                    failures.push(format!("seed {seed}: |C| = {} above bound", p.culled.len()));
                }
                let max_piece = piece_edges(&g, &p).into_iter().max().unwrap_or(0);
                c_bal = c_bal.max(max_piece as f64 * (k * k) as f64 / m as f64);
                max_phases = max_phases.max(p.phases);
                max_culled = max_culled.max(p.culled.len());
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    // Same graphs with k = 4, where the degree condition holds without culling.
    let mut c_bal_small_k: f64 = 0.0;
    for seed in 0..10u64 {
        let g = generate(GraphKind::Gnm, n, m, seed).unwrap();
        let p = cull_partition(&g, 4, seed, &WorkMeter::new()).unwrap();
        let max_piece = piece_edges(&g, &p).into_iter().max().unwrap_or(0);
        c_bal_small_k = c_bal_small_k.max(max_piece as f64 * 16.0 / m as f64);
    }
    let pass = failures.is_empty() && c_bal <= 4.0;
    report(
        7,
        "culled partition",
        pass,
        &format!(
            "k={k}: C_bal = {c_bal:.4}, max phases {max_phases}, max |C| {max_culled}; k=4 reference C_bal = {c_bal_small_k:.4}; {failures:?}"
        ),
    );
    assert!(pass);
}

fn boosted_graph(kind: GraphKind, m: usize, seed: u64) -> Graph {
    match kind {
        GraphKind::Star => generate(kind, m + 1, 0, seed).unwrap(),
        _ => generate(kind, m / 8, m, seed).unwrap(),
    }
}

#[test]
fn criterion_08_boosted() {
    let mut pass = true;
    let mut detail = String::new();
    for kind in [GraphKind::Gnm, GraphKind::PowerLaw, GraphKind::Star] {
        let mut stat = [[0f64; 2]; 2];
        for (si, &lg) in [14u32, 20].iter().enumerate() {
            let m = 1usize << lg;
            for seed in 0..20u64 {
                let g = boosted_graph(kind, m, seed);
                let k = ceil_log2(g.n()) as usize;
                let meter = WorkMeter::new();
                let (c, rep) = boosted_coloring(&g, k, seed, &meter).unwrap();
                pass &= verify_coloring(&g, &c, rep.delta);
                stat[0][si] = stat[0][si].max(meter.total_ops() as f64 / g.m() as f64);
                let meter = WorkMeter::new();
                let (s, _) = boosted_mis(&g, k, seed, &meter).unwrap();
                pass &= verify_mis(&g, &s);
                stat[1][si] = stat[1][si].max(meter.total_ops() as f64 / g.m() as f64);
            }
        }
        let rc = stat[0][1] / stat[0][0];
        let rm = stat[1][1] / stat[1][0];
        pass &= rc <= 1.5 && rm <= 1.5;
        detail += &format!(
            " {kind}: color work/m {:.2} -> {:.2} (x{rc:.3}), mis work/m {:.2} -> {:.2} (x{rm:.3});",
            stat[0][0], stat[0][1], stat[1][0], stat[1][1]
        );
    }
    report(8, "boosted coloring and MIS", pass, detail.trim());
    assert!(pass);
}

#[test]
fn criterion_09_extender_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    let mut cut_total = 0;
    for case in 0..10_000u64 {
        let n = rng.random_range(2..40usize);
        let max_m = n * (n - 1) / 2;
        let m = rng.random_range(0..=max_m.min(4 * n));
        let g = generate(GraphKind::Gnm, n, m, case).unwrap();
        let delta = g.max_degree();
        let in_h0: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let h0: Vec<u32> = (0..n as u32).filter(|&v| in_h0[v as usize]).collect();
        let h1: Vec<u32> = (0..n as u32).filter(|&v| !in_h0[v as usize]).collect();
        // Proper coloring of H_0 from [Δ+1].
        let sub = g.induced(&h0);
        let (local, _) = palette_color(&sub, &PaletteSet::full(h0.len(), delta as u32 + 1), case, &WorkMeter::new()).unwrap();
        let mut phi = Coloring::uncolored(n);
        for (i, &v) in h0.iter().enumerate() {
            phi.color[v as usize] = local.color[i];
        }
        let mut cut = Vec::new();
        for (t, &v) in h1.iter().enumerate() {
            for &u in g.neighbors(v) {
                if in_h0[u as usize] {
                    cut.push((t as u32, u));
                }
            }
        }
        cut_total += cut.len();
        let meter = WorkMeter::new();
        let palettes = extend_palettes(&phi, &cut, h1.len(), delta, &meter).unwrap();
        let mut ok = meter.phase("extend") == cut.len() as u64;
        for (t, &v) in h1.iter().enumerate() {
            let used: BTreeSet<u32> =
                g.neighbors(v).iter().filter(|&&u| in_h0[u as usize]).map(|&u| phi.color[u as usize]).collect();
            let oracle: Vec<u32> = (0..=delta as u32).filter(|c| !used.contains(c)).collect();
            let internal = g.neighbors(v).iter().filter(|&&u| !in_h0[u as usize]).count();
            ok &= palettes.allowed(t) == oracle && palettes.size(t) > internal;
        }
        failures += (!ok) as usize;
    }
    let pass = failures == 0;
    report(
        9,
        "extender exactness",
        pass,
        &format!("{}/10000 configurations match the set-difference oracle ({cut_total} cut edges)", 10_000 - failures),
    );
    assert!(pass);
}

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

/// The bound recomputed at 256-bit precision, clamped to [0, 1].
fn oracle(b: &Bound, cc: &mut Consts) -> BigFloat {
    let zero = big(0.0);
    let one = big(1.0);
    let two = big(2.0);
    let sq = |x: &BigFloat| x.mul(x, PREC, RM);
    let neg_exp = |x: BigFloat, cc: &mut Consts| x.neg().exp(PREC, RM, cc);
    let v = match b {
        Bound::ChernoffUpper { mu, delta } => {
            let d = big(*delta);
            neg_exp(sq(&d).mul(&big(*mu), PREC, RM).div(&two.add(&d, PREC, RM), PREC, RM), cc)
        }
        Bound::ChernoffLower { mu, delta } => neg_exp(sq(&big(*delta)).mul(&big(*mu), PREC, RM).div(&two, PREC, RM), cc),
        Bound::GeomSum { lambda, r } => {
            let l = big(*lambda);
            let num = sq(&l.sub(&one, PREC, RM)).mul(&big(*r), PREC, RM);
            neg_exp(num.div(&two.mul(&l, PREC, RM), PREC, RM), cc)
        }
        Bound::WeightedGeom { weights, t } => {
            let t = big(*t);
            let mut w2 = zero.clone();
            let mut winf = zero.clone();
            for &w in weights {
                w2 = w2.add(&sq(&big(w)), PREC, RM);
                winf = winf.max(&big(w));
            }
            let a = sq(&t).div(&big(16.0).mul(&w2, PREC, RM), PREC, RM);
            let c = t.div(&big(8.0).mul(&winf, PREC, RM), PREC, RM);
            neg_exp(a.min(&c), cc)
        }
        Bound::Mcdiarmid { diffs, t } => {
            let mut s = zero.clone();
            for &d in diffs {
                s = s.add(&sq(&big(d)), PREC, RM);
            }
            let e = neg_exp(two.mul(&sq(&big(*t)), PREC, RM).div(&s, PREC, RM), cc);
            two.mul(&e, PREC, RM)
        }
    };
    v.min(&one)
}

fn random_bound(rng: &mut ChaCha8Rng, i: usize) -> Bound {
    match i % 5 {
        0 => Bound::ChernoffUpper {
            mu: rng.random_range(0.0..100.0),
            delta: rng.random_range(0.0..5.0),
        },
        1 => Bound::ChernoffLower {
            mu: rng.random_range(0.0..1000.0),
            delta: rng.random_range(0.0..=1.0),
        },
        2 => Bound::GeomSum {
            lambda: rng.random_range(1.0..10.0),
            r: rng.random_range(1..=100) as f64,
        },
        3 => {
            let len = rng.random_range(1..50);
            Bound::WeightedGeom {
                weights: (0..len).map(|_| rng.random_range(0.5..10.0)).collect(),
                t: rng.random_range(0.0..500.0),
            }
        }
        _ => {
            let len = rng.random_range(1..50);
            let diffs: Vec<f64> = (0..len).map(|_| rng.random_range(0.5..5.0)).collect();
            let norm = diffs.iter().map(|d| d * d).sum::<f64>().sqrt();
            Bound::Mcdiarmid {
                diffs,
                t: rng.random_range(0.0..5.0) * norm,
            }
        }
    }
}

#[test]
fn criterion_10_bound_evaluators() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cc = Consts::new().unwrap();
    let tol = big(1e-12);
    let mut failures = Vec::new();
    let mut worst = big(0.0);
    for i in 0..100 {
        let b = random_bound(&mut rng, i);
        let got = big(bound_eval(&b).unwrap());
        let want = oracle(&b, &mut cc);
        let rel = got.sub(&want, PREC, RM).abs().div(&want, PREC, RM);
        worst = worst.max(&rel);
        if rel.cmp(&tol) != Some(-1) && rel.cmp(&tol) != Some(0) {
            failures.push(format!("{b:?}"));
        }
    }
    let worst = worst.format(astro_float::Radix::Dec, RM, &mut cc).unwrap_or_default();
    let pass = failures.is_empty();
    report(10, "bound evaluators", pass, &format!("{}/100 within 1e-12; worst relative error {worst}", 100 - failures.len()));
    assert!(pass, "{failures:?}");
}
