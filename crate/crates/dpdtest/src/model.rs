//! Log-normal model primitives: parameter types, density, mean, and
//! seeded sampling with optional contamination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;

const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// An ordered collection of strictly positive observations from one
/// population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    label: Option<String>,
}

impl Sample {
    /// Build a sample, enforcing positivity and a minimum of two
    /// observations (anything less supports no spread estimate).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sample needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!(
                "observations must be finite and positive, found {bad}"
            )));
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    pub fn with_label(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let mut s = Self::new(values)?;
        s.label = Some(label.into());
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction: at least two observations
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.ln()).collect()
    }

    /// A copy with one observation replaced (used by outlier sweeps).
    pub fn with_replaced(&self, index: usize, value: f64) -> Result<Sample> {
        if index >= self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for sample of size {}",
                self.values.len()
            )));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "replacement value must be positive, got {value}"
            )));
        }
        let mut values = self.values.clone();
        values[index] = value;
        Ok(Sample {
            values,
            label: self.label.clone(),
        })
    }
}

/// Location/spread pair of one log-normal population: `log X ~ N(mu, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    mu: f64,
    sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "log-normal parameters need finite mu and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Convenience constructor from the variance of the logs.
    pub fn from_variance(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(mu, sigma2.sqrt())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `log f(x)` at x > 0.
    pub(crate) fn log_pdf(&self, x: f64) -> f64 {
        let lx = x.ln();
        let z = (lx - self.mu) / self.sigma;
        -lx - self.sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
    }
}

/// The stacked parameter vector `(mu1, sigma1, mu2, sigma2)` of both
/// populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaVector {
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
}

impl EtaVector {
    pub fn new(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<Self> {
        LognormalParams::new(mu1, sigma1)?;
        LognormalParams::new(mu2, sigma2)?;
        Ok(Self {
            mu1,
            sigma1,
            mu2,
            sigma2,
        })
    }

    pub fn from_params(p1: &LognormalParams, p2: &LognormalParams) -> Self {
        Self {
            mu1: p1.mu(),
            sigma1: p1.sigma(),
            mu2: p2.mu(),
            sigma2: p2.sigma(),
        }
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }
    pub fn mu2(&self) -> f64 {
        self.mu2
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn population1(&self) -> LognormalParams {
        LognormalParams {
            mu: self.mu1,
            sigma: self.sigma1,
        }
    }

    pub fn population2(&self) -> LognormalParams {
        LognormalParams {
            mu: self.mu2,
            sigma: self.sigma2,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mu1, self.sigma1, self.mu2, self.sigma2]
    }
}

/// Which population a contamination spec targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPopulation {
    First,
    Second,
}

/// Replaces a fixed fraction of one population's observations with
/// draws from a contaminant log-normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub fraction: f64,
    pub contaminant: LognormalParams,
    pub target_population: TargetPopulation,
}

impl ContaminationSpec {
    pub fn new(
        fraction: f64,
        contaminant: LognormalParams,
        target_population: TargetPopulation,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::InvalidArgument(format!(
                "contamination fraction must lie in [0, 1), got {fraction}"
            )));
        }
        Ok(Self {
            fraction,
            contaminant,
            target_population,
        })
    }
}

/// Log-normal density at `x > 0`.
pub fn lognormal_pdf(x: f64, p: &LognormalParams) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!(
            "log-normal density requires x > 0, got {x}"
        )));
    }
    Ok(p.log_pdf(x).exp())
}

/// Population mean `exp(mu + sigma^2 / 2)`.
pub fn lognormal_mean(p: &LognormalParams) -> f64 {
    (p.mu() + 0.5 * p.sigma() * p.sigma()).exp()
}

/// Draw `n` independent observations. Deterministic given the seed:
/// one normal variate per observation, in order, exponentiated.
pub fn sample_lognormal(n: usize, p: &LognormalParams, seed: RngSeed) -> Result<Sample> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample size must be at least 2, got {n}"
        )));
    }
    let mut stream = seed.stream();
    let values = (0..n)
        .map(|_| stream.normal(p.mu(), p.sigma()).exp())
        .collect();
    Sample::new(values)
}

/// Draw `n` observations where exactly `round(fraction * n)` come from
/// the contaminant distribution and the rest from `base`.
///
/// The replaced positions are a uniformly chosen subset. Stream usage,
/// fixed: `n` base draws, then `k` contaminant draws, then the position
/// selection.
pub fn sample_contaminated(
    n: usize,
    base: &LognormalParams,
    spec: &ContaminationSpec,
    seed: RngSeed,
) -> Result<Sample> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample size must be at least 2, got {n}"
        )));
    }
    if !(0.0..1.0).contains(&spec.fraction) {
        return Err(Error::InvalidArgument(format!(
            "contamination fraction must lie in [0, 1), got {}",
            spec.fraction
        )));
    }
    let k = (spec.fraction * n as f64).round() as usize;
    let mut stream = seed.stream();
    let mut values: Vec<f64> = (0..n)
        .map(|_| stream.normal(base.mu(), base.sigma()).exp())
        .collect();
    let contaminants: Vec<f64> = (0..k)
        .map(|_| {
            stream
                .normal(spec.contaminant.mu(), spec.contaminant.sigma())
                .exp()
        })
        .collect();
    for (slot, value) in stream.choose_k(n, k).into_iter().zip(contaminants) {
        values[slot] = value;
    }
    Sample::new(values)
}
