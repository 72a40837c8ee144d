use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::experiment::TrialRecord;
use super::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub metric: String,
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

/// Max work per element at the smallest and largest size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slope {
    pub n_small: usize,
    pub n_large: usize,
    pub small: f64,
    pub large: f64,
    pub ratio: f64,
}

/// Fraction of light buckets needing more than `j` rehash attempts, next
/// to the `Ge(1/2)` tail `2^{-j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exceedance {
    pub j: u32,
    pub buckets: usize,
    pub empirical: f64,
    pub geometric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub failures: usize,
    pub metrics: Vec<MetricSummary>,
    pub slope: Slope,
    pub exceedance: Vec<Exceedance>,
}

/// Nearest-rank quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

fn summarize(metric: &str, mut values: Vec<f64>) -> Option<MetricSummary> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(MetricSummary {
        metric: metric.to_owned(),
        count: values.len(),
        max: *values.last().unwrap(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        p50: quantile(&values, 0.5),
        p90: quantile(&values, 0.9),
        p99: quantile(&values, 0.99),
    })
}

/// Statistics over trial rows. Panics on an empty slice.
pub fn tail_report(records: &[TrialRecord]) -> Summary {
    assert!(!records.is_empty(), "tail_report needs at least one record");
    let col = |f: &dyn Fn(&TrialRecord) -> Option<f64>| records.iter().filter_map(f).collect::<Vec<_>>();
    let metrics = [
        ("work_per_elem", col(&|r| Some(r.work_per_elem))),
        ("rounds", col(&|r| Some(r.rounds as f64))),
        ("restarts", col(&|r| r.restarts.map(f64::from))),
        ("max_bucket", col(&|r| r.max_bucket.map(|v| v as f64))),
        ("max_attempts", col(&|r| r.max_attempts.map(f64::from))),
        ("probes", col(&|r| r.probes.map(|v| v as f64))),
        ("culled", col(&|r| r.culled.map(|v| v as f64))),
        ("c_bal", col(&|r| r.c_bal)),
        ("colors", col(&|r| r.colors.map(|v| v as f64))),
        ("wall_ms", col(&|r| r.wall_ms)),
    ]
    .into_iter()
    .filter_map(|(name, v)| summarize(name, v))
    .collect();

    let mut by_size: BTreeMap<usize, f64> = BTreeMap::new();
    for r in records {
        let e = by_size.entry(r.n).or_insert(f64::MIN);
        *e = e.max(r.work_per_elem);
    }
    let (&n_small, &small) = by_size.first_key_value().unwrap();
    let (&n_large, &large) = by_size.last_key_value().unwrap();
    let slope = Slope {
        n_small,
        n_large,
        small,
        large,
        ratio: if small > 0.0 { large / small } else { 1.0 },
    };

    let attempts: Vec<u32> = records.iter().flat_map(|r| r.bucket_attempts.iter().copied()).collect();
    let exceedance = if attempts.is_empty() {
        Vec::new()
    } else {
        (1..=5)
            .map(|j| Exceedance {
                j,
                buckets: attempts.len(),
                empirical: attempts.iter().filter(|&&a| a > j).count() as f64 / attempts.len() as f64,
                geometric: 0.5f64.powi(j as i32),
            })
            .collect()
    };

    Summary {
        trials: records.len(),
        failures: records.iter().filter(|r| !r.verified).count(),
        metrics,
        slope,
        exceedance,
    }
}

fn header<W: Write>(w: &mut W, entries: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// `# key=value` lines for every setting, then one CSV row per trial.
pub fn write_csv<W: Write>(mut w: W, entries: &[(String, String)], records: &[TrialRecord]) -> Result<(), BenchError> {
    let io = |e: std::io::Error| BenchError::Io(e.to_string());
    header(&mut w, entries).map_err(io)?;
    let mut c = csv::Writer::from_writer(w);
    if records.is_empty() {
        c.write_record(COLUMNS).map_err(|e| BenchError::Io(e.to_string()))?;
    }
    for r in records {
        c.serialize(r).map_err(|e| BenchError::Io(e.to_string()))?;
    }
    c.flush().map_err(io)
}

/// CSV column order, matching the fields of [`TrialRecord`].
pub const COLUMNS: &[&str] = &[
    "trial",
    "seed",
    "n",
    "m",
    "k",
    "work",
    "work_per_elem",
    "rounds",
    "restarts",
    "max_bucket",
    "max_attempts",
    "allocated",
    "probes",
    "phases",
    "culled",
    "max_piece_edges",
    "c_bal",
    "colors",
    "verified",
    "error",
    "wall_ms",
];

#[derive(Serialize)]
struct JsonReport<'a> {
    config: BTreeMap<&'a str, &'a str>,
    trials: &'a [TrialRecord],
    summary: Option<Summary>,
}

pub fn write_json<W: Write>(w: W, entries: &[(String, String)], records: &[TrialRecord]) -> Result<(), BenchError> {
    let report = JsonReport {
        config: entries.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect(),
        trials: records,
        summary: (!records.is_empty()).then(|| tail_report(records)),
    };
    serde_json::to_writer_pretty(w, &report).map_err(|e| BenchError::Io(e.to_string()))
}
