//! Closed-form tail bounds, evaluated exactly in `f64`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("hypothesis violated: {0}")]
pub struct HypothesisViolated(pub String);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Bound {
    /// `Pr[X ≥ (1+δ)μ] ≤ exp(−δ²μ/(2+δ))` for `δ ≥ 0`.
    ChernoffUpper { mu: f64, delta: f64 },
    /// `Pr[X ≤ (1−δ)μ] ≤ exp(−δ²μ/2)` for `δ ∈ [0, 1]`.
    ChernoffLower { mu: f64, delta: f64 },
    /// Sum of `r` i.i.d. geometrics: `Pr[G ≥ λE[G]] ≤ exp(−(λ−1)²r/(2λ))`
    /// for `λ ≥ 1`.
    GeomSum { lambda: f64, r: f64 },
    /// Weighted sum of `Ge(1/2)` variables:
    /// `Pr[Σ wᵢGᵢ ≥ 2W₁ + t] ≤ exp(−min{t²/(16W₂), t/(8W∞)})`.
    WeightedGeom { weights: Vec<f64>, t: f64 },
    /// Bounded differences: `Pr[|f − Ef| > t] ≤ 2 exp(−2t²/Σdᵢ²)`.
    Mcdiarmid { diffs: Vec<f64>, t: f64 },
}

pub const BOUND_NAMES: &[&str] = &["chernoff_upper", "chernoff_lower", "geom_sum", "weighted_geom", "mcdiarmid"];

fn finite_nonneg(name: &str, x: f64) -> Result<(), HypothesisViolated> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(HypothesisViolated(format!("{name} = {x} must be finite and non-negative")))
    }
}

impl Bound {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ChernoffUpper { .. } => "chernoff_upper",
            Self::ChernoffLower { .. } => "chernoff_lower",
            Self::GeomSum { .. } => "geom_sum",
            Self::WeightedGeom { .. } => "weighted_geom",
            Self::Mcdiarmid { .. } => "mcdiarmid",
        }
    }

    /// Natural log of the bound before clamping (the prefactor 2 included
    /// for McDiarmid). `-inf` stands for probability zero.
    pub fn log_eval(&self) -> Result<f64, HypothesisViolated> {
        match self {
            Self::ChernoffUpper { mu, delta } => {
                finite_nonneg("mu", *mu)?;
                finite_nonneg("delta", *delta)?;
                Ok(-(delta * delta * mu) / (2.0 + delta))
            }
            Self::ChernoffLower { mu, delta } => {
                finite_nonneg("mu", *mu)?;
                finite_nonneg("delta", *delta)?;
                if *delta > 1.0 {
                    return Err(HypothesisViolated(format!("delta = {delta} exceeds 1")));
                }
                Ok(-(delta * delta * mu) / 2.0)
            }
            Self::GeomSum { lambda, r } => {
                if !(lambda.is_finite() && *lambda >= 1.0) {
                    return Err(HypothesisViolated(format!("lambda = {lambda} must be at least 1")));
                }
                finite_nonneg("r", *r)?;
                let g = lambda - 1.0;
                Ok(-(g * g) / (2.0 * lambda) * r)
            }
            Self::WeightedGeom { weights, t } => {
                finite_nonneg("t", *t)?;
                for &w in weights {
                    finite_nonneg("weight", w)?;
                }
                let w2: f64 = weights.iter().map(|w| w * w).sum();
                let winf = weights.iter().copied().fold(0.0, f64::max);
                if winf == 0.0 {
                    // The sum is identically zero.
                    return Ok(if *t > 0.0 { f64::NEG_INFINITY } else { 0.0 });
                }
                Ok(-f64::min(t * t / (16.0 * w2), t / (8.0 * winf)))
            }
            Self::Mcdiarmid { diffs, t } => {
                finite_nonneg("t", *t)?;
                for &d in diffs {
                    finite_nonneg("difference", d)?;
                }
                let s: f64 = diffs.iter().map(|d| d * d).sum();
                if s == 0.0 {
                    return Ok(if *t > 0.0 { f64::NEG_INFINITY } else { 0.0 });
                }
                Ok(std::f64::consts::LN_2 - 2.0 * t * t / s)
            }
        }
    }

    /// The bound as a probability in `[0, 1]`.
    pub fn eval(&self) -> Result<f64, HypothesisViolated> {
        let l = self.log_eval()?;
        let v = match self {
            Self::Mcdiarmid { .. } if l.is_finite() => 2.0 * (l - std::f64::consts::LN_2).exp(),
            _ => l.exp(),
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Builds a bound from `key=value` parameters. Weight and difference
    /// lists are comma-separated.
    pub fn from_params(name: &str, get: impl Fn(&str) -> Option<String>) -> Result<Self, HypothesisViolated> {
        let num = |k: &str| -> Result<f64, HypothesisViolated> {
            let s = get(k).ok_or_else(|| HypothesisViolated(format!("{name} needs parameter {k}")))?;
            s.trim().parse().map_err(|_| HypothesisViolated(format!("{k} = {s:?} is not a number")))
        };
        let list = |k: &str| -> Result<Vec<f64>, HypothesisViolated> {
            let s = get(k).ok_or_else(|| HypothesisViolated(format!("{name} needs parameter {k}")))?;
            s.split(',')
                .map(|x| x.trim().parse().map_err(|_| HypothesisViolated(format!("{k} entry {x:?} is not a number"))))
                .collect()
        };
        Ok(match name {
            "chernoff_upper" => Self::ChernoffUpper {
                mu: num("mu")?,
                delta: num("delta")?,
            },
            "chernoff_lower" => Self::ChernoffLower {
                mu: num("mu")?,
                delta: num("delta")?,
            },
            "geom_sum" => Self::GeomSum {
                lambda: num("lambda")?,
                r: num("r")?,
            },
            "weighted_geom" => Self::WeightedGeom {
                weights: list("weights")?,
                t: num("t")?,
            },
            "mcdiarmid" => Self::Mcdiarmid {
                diffs: list("diffs")?,
                t: num("t")?,
            },
            _ => return Err(HypothesisViolated(format!("unknown bound {name}"))),
        })
    }
}

/// Shorthand for [`Bound::eval`].
pub fn bound_eval(bound: &Bound) -> Result<f64, HypothesisViolated> {
    bound.eval()
}
