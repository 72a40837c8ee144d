use std::time::Instant;

use rand::seq::SliceRandom;
use rand::RngCore;
use rand_distr::{Distribution, Zipf};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Algorithm, ExperimentConfig, KeyDist};
use super::BenchError;
use crate::graph::{cull_partition, generate, io::load_graph, piece_edges, Graph};
use crate::graph_algos::{boosted_coloring, boosted_mis, verify_coloring, verify_mis};
use crate::placement::{place, PlacementInstance};
use crate::rng::{below, derive_seed, stream_rng};
use crate::semisort::io::load_records;
use crate::semisort::{integer_sort, is_semisorted, semisort};
use crate::{Record, WorkMeter};

/// `n` records drawn from `dist`; the payload is the record index.
pub fn gen_keys(dist: KeyDist, n: usize, seed: u64) -> Vec<Record> {
    let mut rng = stream_rng(seed, 0);
    let keys: Vec<u64> = match dist {
        KeyDist::Uniform => (0..n).map(|_| below(rng.next_u64(), n as u64)).collect(),
        KeyDist::Zipf(theta) => {
            let z = Zipf::new(n.max(1) as f64, theta).expect("zipf parameters are validated");
            (0..n).map(|_| z.sample(&mut rng) as u64 - 1).collect()
        }
        KeyDist::AllEqual => vec![0; n],
        KeyDist::AllDistinct => {
            let mut k: Vec<u64> = (0..n as u64).collect();
            k.shuffle(&mut rng);
            k
        }
    };
    keys.into_iter().enumerate().map(|(i, k)| Record::new(k, i as u64)).collect()
}

/// One row of experiment output. Columns that do not apply to the
/// algorithm are left empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub work: u64,
    pub work_per_elem: f64,
    pub rounds: u64,
    pub restarts: Option<u32>,
    pub max_bucket: Option<usize>,
    pub max_attempts: Option<u32>,
    pub allocated: Option<usize>,
    pub probes: Option<u64>,
    pub phases: Option<usize>,
    pub culled: Option<usize>,
    pub max_piece_edges: Option<usize>,
    pub c_bal: Option<f64>,
    pub colors: Option<usize>,
    pub verified: bool,
    pub error: String,
    pub wall_ms: Option<f64>,
    /// Rehash attempts of every light bucket (semisort only).
    #[serde(skip)]
    pub bucket_attempts: Vec<u32>,
}

enum Input {
    Generated,
    Records(Vec<Record>),
    Graph(Graph),
}

fn load_input(cfg: &ExperimentConfig) -> Result<Input, BenchError> {
    let Some(path) = &cfg.input else {
        return Ok(Input::Generated);
    };
    let io = |e: &dyn std::fmt::Display| BenchError::Io(format!("{}: {e}", path.display()));
    Ok(match cfg.algorithm {
        Algorithm::Semisort | Algorithm::Intsort | Algorithm::Placement => {
            Input::Records(load_records(path).map_err(|e| io(&e))?)
        }
        Algorithm::Partition | Algorithm::Mis | Algorithm::Color => Input::Graph(load_graph(path).map_err(|e| io(&e))?),
        Algorithm::Bounds => return Err(BenchError::Config("bounds takes no input file".into())),
    })
}

fn same_multiset(a: &[Record], b: &[Record]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.par_sort_unstable();
    b.par_sort_unstable();
    a == b
}

fn trial_graph(cfg: &ExperimentConfig, input: &Input, n: usize, seed: u64) -> Result<Graph, BenchError> {
    match input {
        Input::Graph(g) => Ok(g.clone()),
        _ => generate(cfg.graph, n, cfg.m_for(n), derive_seed(seed, 7)).map_err(|e| BenchError::Config(e.to_string())),
    }
}

fn run_trial(cfg: &ExperimentConfig, input: &Input, n: usize, trial: usize) -> Result<TrialRecord, BenchError> {
    let seed = derive_seed(cfg.seed, trial as u64);
    let meter = WorkMeter::new();
    let records = || match input {
        Input::Records(r) => r.clone(),
        _ => gen_keys(cfg.dist, n, seed),
    };
    let mut row = TrialRecord {
        trial,
        seed,
        n,
        ..Default::default()
    };
    let start = Instant::now();
    match cfg.algorithm {
        Algorithm::Semisort => {
            let input = records();
            row.n = input.len();
            match semisort(&input, &cfg.semisort_params(row.n)?, seed, &meter) {
                Ok((out, trace)) => {
                    row.restarts = Some(trace.restarts);
                    row.max_bucket = Some(trace.max_bucket_size);
                    row.max_attempts = Some(trace.max_attempts());
                    row.allocated = Some(trace.allocated_slots);
                    row.verified = is_semisorted(&out) && same_multiset(&input, &out);
                    row.bucket_attempts = trace.bucket_attempts;
                }
                Err(e) => row.error = e.to_string(),
            }
        }
        Algorithm::Intsort => {
            let input = records();
            row.n = input.len();
            match integer_sort(&input, seed, &meter) {
                Ok(out) => {
                    row.verified = out.windows(2).all(|w| w[0].key <= w[1].key) && same_multiset(&input, &out);
                }
                Err(e) => row.error = e.to_string(),
            }
        }
        Algorithm::Placement => {
            let input = records();
            row.n = input.len();
            let p = cfg.placement_params(row.n)?;
            let mut keys: Vec<u64> = input.iter().map(|r| r.key).collect();
            keys.par_sort_unstable();
            keys.dedup();
            let target_of: Vec<u32> = input.iter().map(|r| keys.binary_search(&r.key).unwrap() as u32).collect();
            let mut loads = vec![0usize; keys.len()];
            target_of.iter().for_each(|&t| loads[t as usize] += 1);
            let caps: Vec<usize> = loads.iter().map(|&l| (p.alpha * l as f64).ceil() as usize).collect();
            let inst = PlacementInstance::new(target_of, &caps, p.alpha, p.block);
            match place(&inst, p.round_cap, seed, &meter) {
                Ok(res) => {
                    row.probes = Some(res.probes);
                    row.verified = res.audit(&inst).is_ok();
                }
                Err(e) => row.error = e.to_string(),
            }
        }
        Algorithm::Partition | Algorithm::Mis | Algorithm::Color => {
            let g = trial_graph(cfg, input, n, seed)?;
            let k = cfg.k_for(g.n())?;
            row.n = g.n();
            row.m = Some(g.m());
            row.k = Some(k);
            match cfg.algorithm {
                Algorithm::Partition => match cull_partition(&g, k, seed, &meter) {
                    Ok(p) => {
                        let max_piece = piece_edges(&g, &p).into_iter().max().unwrap_or(0);
                        row.phases = Some(p.phases);
                        row.culled = Some(p.culled.len());
                        row.max_piece_edges = Some(max_piece);
                        row.c_bal = Some(if g.m() == 0 { 0.0 } else { max_piece as f64 * (k * k) as f64 / g.m() as f64 });
                        row.verified = p.culled.len() as u128 <= p.culled_bound();
                    }
                    Err(e) => row.error = e.to_string(),
                },
                Algorithm::Mis => match boosted_mis(&g, k, seed, &meter) {
                    Ok((s, rep)) => {
                        row.phases = Some(rep.phases);
                        row.culled = Some(rep.culled);
                        row.verified = verify_mis(&g, &s);
                    }
                    Err(e) => row.error = e.to_string(),
                },
                _ => match boosted_coloring(&g, k, seed, &meter) {
                    Ok((c, rep)) => {
                        row.phases = Some(rep.phases);
                        row.culled = Some(rep.culled);
                        row.colors = Some(c.distinct());
                        row.verified = verify_coloring(&g, &c, rep.delta);
                    }
                    Err(e) => row.error = e.to_string(),
                },
            }
        }
        Algorithm::Bounds => unreachable!("bounds runs no trials"),
    }
    if cfg.wall_time {
        row.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    row.work = meter.total_ops();
    row.rounds = meter.rounds();
    let denom = row.m.map_or(row.n, |m| m.max(1)).max(1);
    row.work_per_elem = row.work as f64 / denom as f64;
    Ok(row)
}

/// Runs every trial at every size. Rows come back ordered by size, then
/// trial, whatever order they finish in.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, BenchError> {
    cfg.validate()?;
    if cfg.algorithm == Algorithm::Bounds {
        return Ok(Vec::new());
    }
    let input = load_input(cfg)?;
    let sizes: Vec<usize> = match &input {
        Input::Generated => cfg.sizes.clone(),
        Input::Records(r) => vec![r.len()],
        Input::Graph(g) => vec![g.n()],
    };
    let jobs: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    jobs.into_par_iter().map(|(n, t)| run_trial(cfg, &input, n, t)).collect()
}
