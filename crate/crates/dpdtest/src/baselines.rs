//! Baseline tests the robust Wald-type test is compared against: the
//! classical Wald test (the `beta = 0` member of the family), the
//! large-sample Z test on the log scale, the likelihood ratio test, and
//! a nonparametric bootstrap of the studentized Z pivot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdpd::{fit_mle, Beta};
use crate::model::{EtaVector, Sample};
use crate::optim::{minimize, OptOptions};
use crate::rng::RngSeed;
use crate::special::normal_sf;
use crate::wald::{chi2_survival, wald_test, TestResult};

const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// Tags for the comparison methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    ClassicalWald,
    ZTest,
    Lrt,
    Bootstrap,
}

/// The classical Wald test: identical to the divergence test at
/// `beta = 0`, where the sandwich collapses to the inverse Fisher
/// information.
pub fn classical_wald(s1: &Sample, s2: &Sample) -> Result<TestResult> {
    let mut result = wald_test(s1, s2, Beta::zero())?;
    result.method = "classical-wald".into();
    Ok(result)
}

struct LogMoments {
    n: f64,
    mean: f64,
    /// Unbiased variance of the logs (divisor n-1), the convention of
    /// the large-sample Z statistic.
    var: f64,
}

fn log_moments(logs: &[f64]) -> LogMoments {
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n - 1.0);
    LogMoments { n, mean, var }
}

fn z_statistic(m1: &LogMoments, m2: &LogMoments) -> Result<f64> {
    let den2 = m1.var / m1.n + m1.var * m1.var / (2.0 * (m1.n - 1.0))
        + m2.var / m2.n
        + m2.var * m2.var / (2.0 * (m2.n - 1.0));
    if den2 <= 0.0 {
        return Err(Error::DegenerateSample(
            "both samples have zero spread on the log scale".into(),
        ));
    }
    let num = m1.mean + m1.var / 2.0 - m2.mean - m2.var / 2.0;
    Ok(num / den2.sqrt())
}

/// Large-sample Z test for equality of log-normal means. The statistic
/// compares `ybar + s^2/2` across samples (log-scale mean plus half the
/// unbiased log variance), studentized by
/// `sqrt(s1^2/n1 + s1^4/(2(n1-1)) + s2^2/n2 + s2^4/(2(n2-1)))`,
/// against a standard normal, two-sided.
pub fn z_test(s1: &Sample, s2: &Sample) -> Result<TestResult> {
    let (l1, l2) = (s1.log_values(), s2.log_values());
    let (m1, m2) = (log_moments(&l1), log_moments(&l2));
    let z = z_statistic(&m1, &m2)?;
    let p_value = 2.0 * normal_sf(z.abs());
    let eta = EtaVector::new(m1.mean, m1.var.sqrt().max(1e-300), m2.mean, m2.var.sqrt().max(1e-300));
    Ok(TestResult {
        method: "z".into(),
        statistic: z.abs(),
        p_value,
        beta: None,
        n1: s1.len(),
        n2: s2.len(),
        eta_hat: eta.ok(),
        m_hat: Some((m1.mean + m1.var / 2.0).exp() - (m2.mean + m2.var / 2.0).exp()),
        sigma2_m_hat: None,
    })
}

fn log_likelihood(logs: &[f64], mu: f64, sigma: f64) -> f64 {
    let mut acc = 0.0;
    for &lx in logs {
        let z = (lx - mu) / sigma;
        acc += -lx - sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z;
    }
    acc
}

/// Likelihood ratio test of equal means. The unconstrained maximum is
/// closed-form; the null maximum eliminates the constraint
/// `mu1 + sigma1^2/2 = mu2 + sigma2^2/2` by substituting
/// `mu2 = mu1 + (sigma1^2 - sigma2^2)/2` and optimizing the remaining
/// three parameters. The deviance is referred to chi-squared with one
/// degree of freedom.
pub fn lrt(s1: &Sample, s2: &Sample) -> Result<TestResult> {
    let fit1 = fit_mle(s1)?;
    let fit2 = fit_mle(s2)?;
    let (l1, l2) = (s1.log_values(), s2.log_values());
    let unconstrained = log_likelihood(&l1, fit1.params.mu(), fit1.params.sigma())
        + log_likelihood(&l2, fit2.params.mu(), fit2.params.sigma());

    let neg_null = |v: &[f64]| -> (f64, Vec<f64>) {
        let (mu1, sig1, sig2) = (v[0], v[1].exp(), v[2].exp());
        let mu2 = mu1 + 0.5 * (sig1 * sig1 - sig2 * sig2);
        let value = -(log_likelihood(&l1, mu1, sig1) + log_likelihood(&l2, mu2, sig2));
        // gradient assembled from the per-population score sums
        let n1 = l1.len() as f64;
        let n2 = l2.len() as f64;
        let (mut sz1, mut szz1) = (0.0, 0.0);
        for &lx in &l1 {
            let z = (lx - mu1) / sig1;
            sz1 += z;
            szz1 += z * z;
        }
        let (mut sz2, mut szz2) = (0.0, 0.0);
        for &lx in &l2 {
            let z = (lx - mu2) / sig2;
            sz2 += z;
            szz2 += z * z;
        }
        // d(-ll)/dmu1 includes mu2's dependence on mu1 (coefficient 1)
        let d_mu1 = -(sz1 / sig1) - (sz2 / sig2);
        // d(-ll)/d log sig1: direct term plus mu2 = mu1 + sig1^2/2 - ...
        let d_lsig1 = -(szz1 - n1) - (sz2 / sig2) * sig1 * sig1;
        let d_lsig2 = -(szz2 - n2) + (sz2 / sig2) * sig2 * sig2;
        (value, vec![d_mu1, d_lsig1, d_lsig2])
    };
    let start = [
        fit1.params.mu(),
        fit1.params.sigma().ln(),
        fit2.params.sigma().ln(),
    ];
    let out = minimize(
        neg_null,
        &start,
        &OptOptions {
            grad_tol: 1e-9,
            max_iterations: 300,
        },
    );
    if !out.converged {
        return Err(Error::Numerical(format!(
            "constrained likelihood maximization stalled (gradient {:.2e})",
            out.grad_norm
        )));
    }
    let statistic = (2.0 * (unconstrained + out.value)).max(0.0);
    Ok(TestResult {
        method: "lrt".into(),
        statistic,
        p_value: chi2_survival(statistic)?,
        beta: None,
        n1: s1.len(),
        n2: s2.len(),
        eta_hat: Some(EtaVector::from_params(&fit1.params, &fit2.params)),
        m_hat: Some(
            (fit1.params.mu() + 0.5 * fit1.params.sigma().powi(2)).exp()
                - (fit2.params.mu() + 0.5 * fit2.params.sigma().powi(2)).exp(),
        ),
        sigma2_m_hat: None,
    })
}

/// Nonparametric bootstrap of the Z pivot under null recentering.
///
/// Each population is resampled with replacement independently; every
/// resampled pivot subtracts the observed `ybar + s^2/2` of its own
/// population, so the null holds in the bootstrap world. The p-value is
/// the share of resampled `|Z*|` at or above the observed `|Z|`.
/// Resamples whose pivot is undefined (zero spread in both draws) count
/// as non-exceedances. Deterministic given the seed.
pub fn bootstrap_test(
    s1: &Sample,
    s2: &Sample,
    resamples: usize,
    seed: RngSeed,
) -> Result<TestResult> {
    if resamples < 100 {
        return Err(Error::InvalidArgument(format!(
            "at least 100 resamples are needed for a usable p-value, got {resamples}"
        )));
    }
    let (l1, l2) = (s1.log_values(), s2.log_values());
    let (m1, m2) = (log_moments(&l1), log_moments(&l2));
    let z_obs = z_statistic(&m1, &m2)?.abs();
    let center1 = m1.mean + m1.var / 2.0;
    let center2 = m2.mean + m2.var / 2.0;

    let mut stream = seed.stream();
    let mut draw = |logs: &[f64], buf: &mut Vec<f64>| {
        buf.clear();
        for _ in 0..logs.len() {
            buf.push(logs[stream.index(logs.len())]);
        }
    };
    let mut exceed = 0usize;
    let mut buf1 = Vec::with_capacity(l1.len());
    let mut buf2 = Vec::with_capacity(l2.len());
    for _ in 0..resamples {
        draw(&l1, &mut buf1);
        draw(&l2, &mut buf2);
        let r1 = log_moments(&buf1);
        let r2 = log_moments(&buf2);
        let den2 = r1.var / r1.n + r1.var * r1.var / (2.0 * (r1.n - 1.0))
            + r2.var / r2.n
            + r2.var * r2.var / (2.0 * (r2.n - 1.0));
        if den2 <= 0.0 {
            continue;
        }
        let num = (r1.mean + r1.var / 2.0 - center1) - (r2.mean + r2.var / 2.0 - center2);
        if (num / den2.sqrt()).abs() >= z_obs {
            exceed += 1;
        }
    }
    Ok(TestResult {
        method: "bootstrap".into(),
        statistic: z_obs,
        p_value: exceed as f64 / resamples as f64,
        beta: None,
        n1: s1.len(),
        n2: s2.len(),
        eta_hat: None,
        m_hat: Some(center1.exp() - center2.exp()),
        sigma2_m_hat: None,
    })
}
