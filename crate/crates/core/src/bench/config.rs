use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::bounds::{Bound, BOUND_NAMES};
use super::BenchError;
use crate::ceil_log2;
use crate::graph::GraphKind;
use crate::placement::DEFAULT_ROUND_CAP_FACTOR;
use crate::semisort::{SemisortParams, PARAM_KEYS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Semisort,
    Intsort,
    Placement,
    Partition,
    Mis,
    Color,
    Bounds,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Semisort => "semisort",
            Self::Intsort => "intsort",
            Self::Placement => "placement",
            Self::Partition => "partition",
            Self::Mis => "mis",
            Self::Color => "color",
            Self::Bounds => "bounds",
        }
    }

    pub fn is_graph(self) -> bool {
        matches!(self, Self::Partition | Self::Mis | Self::Color)
    }

    fn param_keys(self) -> &'static [&'static str] {
        match self {
            Self::Semisort | Self::Intsort => PARAM_KEYS,
            Self::Placement => &["alpha", "d", "block", "round_cap"],
            Self::Partition | Self::Mis | Self::Color => &["k"],
            Self::Bounds => &["bound", "mu", "delta", "lambda", "r", "weights", "t", "diffs"],
        }
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "semisort" => Self::Semisort,
            "intsort" => Self::Intsort,
            "placement" => Self::Placement,
            "partition" => Self::Partition,
            "mis" => Self::Mis,
            "color" => Self::Color,
            "bounds" => Self::Bounds,
            _ => return Err(BenchError::Config(format!("unknown algorithm {s}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KeyDist {
    /// Keys uniform in `[0, n)`.
    Uniform,
    /// Zipf over `n` ranks with exponent θ; key = rank − 1.
    Zipf(f64),
    AllEqual,
    /// A random permutation of `0..n`.
    AllDistinct,
}

impl FromStr for KeyDist {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::Config(format!("unknown distribution {s}"));
        Ok(match s {
            "uniform" => Self::Uniform,
            "all_equal" => Self::AllEqual,
            "all_distinct" => Self::AllDistinct,
            _ => {
                let theta = s
                    .strip_prefix("zipf:")
                    .or_else(|| s.strip_prefix("zipf(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(bad)?;
                let theta: f64 = theta.parse().map_err(|_| bad())?;
                if !(theta.is_finite() && theta > 0.0) {
                    return Err(BenchError::Config(format!("zipf exponent {theta} must be positive")));
                }
                Self::Zipf(theta)
            }
        })
    }
}

impl fmt::Display for KeyDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Zipf(t) => write!(f, "zipf:{t}"),
            Self::AllEqual => f.write_str("all_equal"),
            Self::AllDistinct => f.write_str("all_distinct"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(BenchError::Config(format!("unknown format {s}"))),
        }
    }
}

/// Everything needed to run an experiment. Build with
/// [`ExperimentConfig::new`], adjust with [`ExperimentConfig::set`], then
/// [`ExperimentConfig::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    /// One or more input sizes; trials run at each.
    pub sizes: Vec<usize>,
    /// Edge count for generated graphs; defaults to `8n`.
    pub m: Option<usize>,
    /// Piece count; defaults to `⌈log2 n⌉`.
    pub k: Option<usize>,
    pub dist: KeyDist,
    pub graph: GraphKind,
    pub trials: usize,
    pub seed: u64,
    /// `--param` overrides, in order.
    pub params: Vec<(String, String)>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub input: Option<PathBuf>,
    pub wall_time: bool,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value
        .trim()
        .parse()
        .map_err(|_| BenchError::Config(format!("cannot parse {key}={value}")))
}

/// Accepts plain integers and `2^e`.
fn parse_size(s: &str) -> Result<usize, BenchError> {
    let s = s.trim();
    if let Some(e) = s.strip_prefix("2^") {
        let e: u32 = parse("n", e)?;
        if e >= usize::BITS {
            return Err(BenchError::Config(format!("2^{e} is too large")));
        }
        return Ok(1 << e);
    }
    parse("n", s)
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            sizes: vec![1 << 16],
            m: None,
            k: None,
            dist: KeyDist::Uniform,
            graph: GraphKind::Gnm,
            trials: 1,
            seed: 0,
            params: Vec::new(),
            out: None,
            format: OutputFormat::Csv,
            input: None,
            wall_time: false,
        }
    }

    /// Applies one `key=value` setting; unrecognised keys become parameter
    /// overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let key = key.trim();
        match key {
            "algorithm" => self.algorithm = value.trim().parse()?,
            "n" => self.sizes = value.split(',').map(parse_size).collect::<Result<_, _>>()?,
            "m" => self.m = Some(parse_size(value)?),
            "k" => self.k = Some(parse(key, value)?),
            "dist" => self.dist = value.trim().parse()?,
            "graph" => self.graph = value.trim().parse().map_err(|e| BenchError::Config(format!("{e}")))?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.trim().parse()?,
            "input" => self.input = Some(PathBuf::from(value.trim())),
            "wall_time" => self.wall_time = parse(key, value)?,
            _ => self.params.push((key.to_owned(), value.trim().to_owned())),
        }
        Ok(())
    }

    /// Reads a flat `key=value` file; blank lines and `#` comments are
    /// skipped.
    pub fn load_file(path: &Path) -> Result<Vec<(String, String)>, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            out.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        Ok(out)
    }

    fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("every size must be at least 1".into());
        }
        if self.k == Some(0) {
            return bad("k must be at least 1".into());
        }
        let keys = self.algorithm.param_keys();
        if let Some((k, _)) = self.params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            return bad(format!("parameter {k} does not apply to {}", self.algorithm.name()));
        }
        match self.algorithm {
            Algorithm::Semisort | Algorithm::Intsort => {
                for &n in &self.sizes {
                    self.semisort_params(n)?;
                }
            }
            Algorithm::Placement => {
                for &n in &self.sizes {
                    let p = self.placement_params(n)?;
                    if !(p.alpha >= 2.0) || p.block < 1 || p.round_cap < 1 {
                        return bad("placement needs alpha >= 2, d >= 1 and round_cap >= 1".into());
                    }
                }
            }
            Algorithm::Partition | Algorithm::Mis | Algorithm::Color => {
                for &n in &self.sizes {
                    self.k_for(n)?;
                }
            }
            Algorithm::Bounds => {
                self.bound()?;
            }
        }
        Ok(())
    }

    pub fn semisort_params(&self, n: usize) -> Result<SemisortParams, BenchError> {
        let mut p = SemisortParams::for_n(n);
        for (k, v) in &self.params {
            p.set(k, v).map_err(|e| BenchError::Config(e.to_string()))?;
        }
        p.validate().map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn placement_params(&self, n: usize) -> Result<PlacementParams, BenchError> {
        let l = ceil_log2(n) as usize;
        let mut p = PlacementParams {
            alpha: 2.0,
            block: l,
            round_cap: DEFAULT_ROUND_CAP_FACTOR * l,
        };
        for (k, v) in &self.params {
            match k.as_str() {
                "alpha" => p.alpha = parse(k, v)?,
                "d" | "block" => p.block = parse(k, v)?,
                "round_cap" => p.round_cap = parse(k, v)?,
                _ => {}
            }
        }
        Ok(p)
    }

    pub fn k_for(&self, n: usize) -> Result<usize, BenchError> {
        let k = match self.param("k") {
            Some(v) => parse("k", v)?,
            None => self.k.unwrap_or(ceil_log2(n) as usize),
        };
        if k == 0 {
            return Err(BenchError::Config("k must be at least 1".into()));
        }
        Ok(k)
    }

    pub fn m_for(&self, n: usize) -> usize {
        self.m.unwrap_or(8 * n)
    }

    pub fn bound(&self) -> Result<Bound, BenchError> {
        let name = self
            .param("bound")
            .ok_or_else(|| BenchError::Config(format!("bounds needs --param bound=<{}>", BOUND_NAMES.join("|"))))?;
        Bound::from_params(name, |k| self.param(k).map(str::to_owned)).map_err(|e| BenchError::Config(e.to_string()))
    }

    /// The fully resolved settings, written into every output header.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e = vec![("algorithm".to_owned(), self.algorithm.name().to_owned())];
        let mut push = |k: &str, v: String| e.push((k.to_owned(), v));
        if self.algorithm != Algorithm::Bounds {
            push("n", self.sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
            push("trials", self.trials.to_string());
            push("seed", self.seed.to_string());
            if let Some(i) = &self.input {
                push("input", i.display().to_string());
            }
        }
        match self.algorithm {
            Algorithm::Semisort | Algorithm::Intsort => {
                push("dist", self.dist.to_string());
                for &n in &self.sizes {
                    if let Ok(p) = self.semisort_params(n) {
                        for (k, v) in p.entries() {
                            push(&format!("n{n}.{k}"), v);
                        }
                    }
                }
            }
            Algorithm::Placement => {
                push("dist", self.dist.to_string());
                for &n in &self.sizes {
                    if let Ok(p) = self.placement_params(n) {
                        push(&format!("n{n}.alpha"), p.alpha.to_string());
                        push(&format!("n{n}.d"), p.block.to_string());
                        push(&format!("n{n}.round_cap"), p.round_cap.to_string());
                    }
                }
            }
            Algorithm::Partition | Algorithm::Mis | Algorithm::Color => {
                push("graph", self.graph.to_string());
                for &n in &self.sizes {
                    push(&format!("n{n}.m"), self.m_for(n).to_string());
                    if let Ok(k) = self.k_for(n) {
                        push(&format!("n{n}.k"), k.to_string());
                    }
                }
            }
            Algorithm::Bounds => {
                for (k, v) in &self.params {
                    push(k, v.clone());
                }
            }
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementParams {
    pub alpha: f64,
    pub block: usize,
    pub round_cap: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributions_parse() {
        assert_eq!("uniform".parse::<KeyDist>().unwrap(), KeyDist::Uniform);
        assert_eq!("zipf:1.2".parse::<KeyDist>().unwrap(), KeyDist::Zipf(1.2));
        assert_eq!("zipf(0.8)".parse::<KeyDist>().unwrap(), KeyDist::Zipf(0.8));
        assert!("zipf:-1".parse::<KeyDist>().is_err());
        assert!("gauss".parse::<KeyDist>().is_err());
        assert_eq!(KeyDist::Zipf(1.0).to_string(), "zipf:1");
    }

    #[test]
    fn settings_and_overrides() {
        let mut c = ExperimentConfig::new(Algorithm::Semisort);
        c.set("n", "2^10,4096").unwrap();
        c.set("trials", "3").unwrap();
        c.set("tau", "5").unwrap();
        assert_eq!(c.sizes, vec![1024, 4096]);
        c.validate().unwrap();
        assert_eq!(c.semisort_params(1024).unwrap().heavy_threshold, 5);
        assert!(c.entries().contains(&("n4096.tau".to_owned(), "5".to_owned())));
        c.set("alpha", "1").unwrap();
        assert!(matches!(c.validate(), Err(BenchError::Config(_))));
        let mut p = ExperimentConfig::new(Algorithm::Placement);
        p.set("tau", "3").unwrap();
        assert!(p.validate().is_err());
        let mut t = ExperimentConfig::new(Algorithm::Semisort);
        t.set("trials", "0").unwrap();
        assert!(t.validate().is_err());
        assert!(t.set("trials", "x").is_err());
    }

    #[test]
    fn graph_defaults() {
        let mut c = ExperimentConfig::new(Algorithm::Color);
        c.set("n", "2^14").unwrap();
        assert_eq!(c.k_for(1 << 14).unwrap(), 14);
        assert_eq!(c.m_for(1 << 14), 1 << 17);
        c.set("k", "3").unwrap();
        assert_eq!(c.k_for(1 << 14).unwrap(), 3);
    }

    #[test]
    fn bound_from_params() {
        let mut c = ExperimentConfig::new(Algorithm::Bounds);
        assert!(c.validate().is_err());
        c.set("bound", "geom_sum").unwrap();
        c.set("lambda", "2").unwrap();
        c.set("r", "10").unwrap();
        c.validate().unwrap();
        assert!((c.bound().unwrap().eval().unwrap() - (-2.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.cfg");
        std::fs::write(&path, "# comment\nn = 2^12\n\ntrials=4\nK=4\n").unwrap();
        let kv = ExperimentConfig::load_file(&path).unwrap();
        assert_eq!(kv.len(), 3);
        std::fs::write(&path, "oops\n").unwrap();
        assert!(ExperimentConfig::load_file(&path).is_err());
    }
}
