//! Influence-function diagnostics for the divergence estimator and the
//! Wald-type test functional.
//!
//! For `beta > 0` the estimator's influence function is bounded in the
//! contamination location; at `beta = 0` (maximum likelihood) it grows
//! without bound, which is the formal expression of the robustness gap
//! the tuning parameter buys. This module evaluates the closed forms,
//! provides the population-level functional whose finite differences
//! validate them, and builds the second-order partial influence
//! functions and the two-sample bias approximation on top.

use crate::asymptotics::{j_matrix, Weight};
use crate::error::{Error, Result};
use crate::mdpd::Beta;
use crate::model::LognormalParams;
use crate::optim::{minimize_with_norm, OptOptions};
use crate::quadrature::integrate;
use crate::wald::{m_eta, m_gradient, sigma2_m};

/// Influence of a point mass at `x` on the two fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfPoint {
    pub x: f64,
    /// `(mu, sigma)` components.
    pub value: [f64; 2],
}

/// A contaminated model: `(1 - epsilon) F + epsilon * delta_atom`.
#[derive(Debug, Clone, Copy)]
pub struct MixtureSpec {
    pub base: LognormalParams,
    pub epsilon: f64,
    pub atom: f64,
}

impl MixtureSpec {
    pub fn new(base: LognormalParams, epsilon: f64, atom: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "contamination level must lie in [0, 0.5), got {epsilon}"
            )));
        }
        if !(atom.is_finite() && atom > 0.0) {
            return Err(Error::Domain(format!(
                "point-mass location must be positive, got {atom}"
            )));
        }
        Ok(Self {
            base,
            epsilon,
            atom,
        })
    }
}

/// Score pair in the standardized-residual form
/// `((log x - mu)/sigma, ((z^2 - 1)/sigma))` with `z = (log x - mu)/sigma`.
///
/// Note the first component is `sigma` times the location derivative of
/// the log-density (`d log f / d mu = (log x - mu)/sigma^2`); the second
/// equals `d log f / d sigma` exactly. The influence-function formulas
/// below use the log-density derivatives.
pub fn score_function(x: f64, p: &LognormalParams) -> Result<[f64; 2]> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("score requires x > 0, got {x}")));
    }
    let z = (x.ln() - p.mu()) / p.sigma();
    Ok([z, (z * z - 1.0) / p.sigma()])
}

/// Gradient of `log f` at `x`: the estimating score of the likelihood.
fn log_density_score(x: f64, p: &LognormalParams) -> [f64; 2] {
    let z = (x.ln() - p.mu()) / p.sigma();
    [z / p.sigma(), (z * z - 1.0) / p.sigma()]
}

/// The model-side centering vector `integral of u f^(1+beta) dx` (with
/// `u` the log-density gradient), in closed form:
///
/// ```text
/// xi = exp(-mu b + sigma^2 b^2 / (2(1+b))) / (sigma^(1+b) (2pi)^(b/2) (1+b)^(3/2))
///      * ( -sigma b, b (b sigma^2 - 1 - b) / (1 + b) )
/// ```
///
/// Both components vanish at `beta = 0`.
pub fn xi_vector(p: &LognormalParams, b: Beta) -> [f64; 2] {
    let beta = b.value();
    let (mu, sigma) = (p.mu(), p.sigma());
    let s2 = sigma * sigma;
    let pref = (-mu * beta + s2 * beta * beta / (2.0 * (1.0 + beta))).exp()
        / (sigma.powf(1.0 + beta)
            * (2.0 * std::f64::consts::PI).powf(beta / 2.0)
            * (1.0 + beta).powf(1.5));
    [
        pref * (-sigma * beta),
        pref * beta * (beta * s2 - 1.0 - beta) / (1.0 + beta),
    ]
}

/// Influence function of the one-population estimator at contamination
/// location `x`: `J^-1 (u(x) f^beta(x) - xi)` for `beta > 0`, and the
/// closed maximum-likelihood form at `beta = 0`.
pub fn estimator_if(x: f64, p: &LognormalParams, b: Beta) -> Result<IfPoint> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!(
            "influence location must be positive, got {x}"
        )));
    }
    if b.is_zero() {
        let (mu, sigma) = (p.mu(), p.sigma());
        let lx = x.ln();
        let first = lx - mu;
        let second = -(sigma * sigma - mu * mu + 2.0 * mu * lx - lx * lx) / (2.0 * sigma);
        return Ok(IfPoint {
            x,
            value: [first, second],
        });
    }
    let u = log_density_score(x, p);
    let fb = (b.value() * p.log_pdf(x)).exp();
    let xi = xi_vector(p, b);
    let j_inv = j_matrix(p, b).inverse()?;
    Ok(IfPoint {
        x,
        value: j_inv.matvec([u[0] * fb - xi[0], u[1] * fb - xi[1]]),
    })
}

/// The constant the influence function approaches as `x -> infinity`
/// for `beta > 0` (the density factor kills the score term, leaving
/// `-J^-1 xi`). Exposed so boundedness checks can compare against the
/// true limit instead of a large-x proxy.
pub fn if_tail_limit(p: &LognormalParams, b: Beta) -> Result<[f64; 2]> {
    let xi = xi_vector(p, b);
    let j_inv = j_matrix(p, b).inverse()?;
    Ok(j_inv.matvec([-xi[0], -xi[1]]))
}

/// Population-level divergence fit under a contaminated model: the
/// minimizer over `(mu, sigma)` of
///
/// ```text
/// integral f_theta^(1+b) - (1+b)/b * [ (1-eps) E_F f_theta^b + eps f_theta^b(atom) ]
/// ```
///
/// with `E_F` taken under the base distribution. Every integral is
/// evaluated by adaptive quadrature on the log scale, so this routine is
/// an independent check of the closed forms used elsewhere. At
/// `eps = 0` the minimizer is the base parameter pair (Fisher
/// consistency). `beta = 0` is unsupported: the point-mass term of the
/// log-likelihood diverges.
pub fn population_mdpd_functional(mix: &MixtureSpec, b: Beta) -> Result<LognormalParams> {
    if b.is_zero() {
        return Err(Error::Unsupported(
            "the population functional needs beta > 0 (a point mass has no finite \
             log-likelihood term)"
                .into(),
        ));
    }
    let beta = b.value();
    let base = mix.base;
    let atom_log = mix.atom.ln();
    let tol = 1e-12;

    let objective = |v: &[f64]| -> (f64, Vec<f64>) {
        let (mu, sigma) = (v[0], v[1].exp());
        let theta = LognormalParams::new(mu, sigma).expect("optimizer keeps sigma positive");

        // integral of f_theta^(1+b): Gaussian in t = log x centered at
        // mu - sigma^2 b/(1+b)
        let center1 = mu - sigma * sigma * beta / (1.0 + beta);
        let half1 = 30.0 * sigma;
        let fpow = |t: f64, k: f64| (k * theta.log_pdf(t.exp())).exp();
        let model_pdf = |t: f64| fpow(t, 1.0) * t.exp(); // f(e^t) e^t
        let i1 = integrate(
            |t| fpow(t, beta) * model_pdf(t),
            center1 - half1,
            center1 + half1,
            tol,
        );
        let i1_grad = {
            let g = |t: f64, comp: usize| {
                log_density_score(t.exp(), &theta)[comp] * fpow(t, beta) * model_pdf(t)
            };
            [
                (1.0 + beta)
                    * integrate(|t| g(t, 0), center1 - half1, center1 + half1, tol),
                (1.0 + beta)
                    * integrate(|t| g(t, 1), center1 - half1, center1 + half1, tol),
            ]
        };

        // E_F f_theta^b under the base Gaussian in t
        let center2 = base.mu() - beta * base.sigma() * base.sigma();
        let half2 = 30.0 * base.sigma() + sigma;
        let base_pdf = |t: f64| (base.log_pdf(t.exp())).exp() * t.exp();
        let q = integrate(
            |t| fpow(t, beta) * base_pdf(t),
            center2 - half2,
            center2 + half2,
            tol,
        );
        let q_grad = {
            let g = |t: f64, comp: usize| {
                log_density_score(t.exp(), &theta)[comp] * fpow(t, beta) * base_pdf(t)
            };
            [
                beta * integrate(|t| g(t, 0), center2 - half2, center2 + half2, tol),
                beta * integrate(|t| g(t, 1), center2 - half2, center2 + half2, tol),
            ]
        };

        let f_atom = (beta * theta.log_pdf(mix.atom)).exp();
        let atom_score = log_density_score(mix.atom, &theta);
        let atom_grad = [
            beta * f_atom * atom_score[0],
            beta * f_atom * atom_score[1],
        ];
        let _ = atom_log;

        let ratio = (1.0 + beta) / beta;
        let value = i1 - ratio * ((1.0 - mix.epsilon) * q + mix.epsilon * f_atom);
        let g_mu =
            i1_grad[0] - ratio * ((1.0 - mix.epsilon) * q_grad[0] + mix.epsilon * atom_grad[0]);
        let g_sigma =
            i1_grad[1] - ratio * ((1.0 - mix.epsilon) * q_grad[1] + mix.epsilon * atom_grad[1]);
        (value, vec![g_mu, g_sigma * sigma])
    };

    let report_norm = |v: &[f64], g: &[f64]| {
        let sigma = v[1].exp();
        let gs = g[1] / sigma;
        (g[0] * g[0] + gs * gs).sqrt()
    };
    let out = minimize_with_norm(
        objective,
        &[base.mu(), base.sigma().ln()],
        &OptOptions {
            grad_tol: 1e-10,
            max_iterations: 300,
        },
        report_norm,
    );
    if !out.converged {
        return Err(Error::Numerical(format!(
            "population functional did not converge (gradient {:.2e})",
            out.grad_norm
        )));
    }
    LognormalParams::new(out.x[0], out.x[1].exp())
}

/// Which second-order partial influence function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialTarget {
    /// Contamination in the first population only.
    Pop1,
    /// Contamination in the second population only.
    Pop2,
    /// The mixed derivative in both contamination levels.
    Cross,
}

fn null_check(eta0: &crate::model::EtaVector) -> Result<()> {
    let m = m_eta(eta0);
    if m.abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "eta0 must lie on the null surface m(eta) = 0, got m = {m:e}"
        )));
    }
    Ok(())
}

/// Second-order partial influence function of the test functional at a
/// null configuration. The first-order terms vanish on the null, so
/// these quadratic terms carry the leading contamination response:
///
/// ```text
/// pop1:  (2 / sigma2_m) * <grad m, embed1(IF1)>^2
/// pop2:  (2 / sigma2_m) * <grad m, embed2(IF2)>^2
/// cross: (2 / sigma2_m) * <grad m, embed1(IF1)> <grad m, embed2(IF2)>
/// ```
///
/// where `embed_i` places the 2-vector influence of population `i` into
/// the matching block of the 4-vector and zeros elsewhere.
pub fn second_order_partial_if(
    x: f64,
    eta0: &crate::model::EtaVector,
    w: Weight,
    b: Beta,
    which: PartialTarget,
) -> Result<f64> {
    null_check(eta0)?;
    let s2m = sigma2_m(eta0, w, b)?;
    let grad = m_gradient(eta0);
    let if1 = estimator_if(x, &eta0.population1(), b)?.value;
    let if2 = estimator_if(x, &eta0.population2(), b)?.value;
    let a1 = grad[0] * if1[0] + grad[1] * if1[1];
    let a2 = grad[2] * if2[0] + grad[3] * if2[1];
    Ok(match which {
        PartialTarget::Pop1 => 2.0 * a1 * a1 / s2m,
        PartialTarget::Pop2 => 2.0 * a2 * a2 / s2m,
        PartialTarget::Cross => 2.0 * a1 * a2 / s2m,
    })
}

/// Quadratic bias approximation of the test functional under
/// contamination levels `(eps1, eps2)` at the same location `x`:
/// `eps1^2/2 * pop1 + eps1 eps2 * cross + eps2^2/2 * pop2`.
pub fn bias_approximation(
    x: f64,
    eta0: &crate::model::EtaVector,
    w: Weight,
    b: Beta,
    eps1: f64,
    eps2: f64,
) -> Result<f64> {
    for eps in [eps1, eps2] {
        if !(0.0..0.5).contains(&eps) {
            return Err(Error::InvalidArgument(format!(
                "contamination levels must lie in [0, 0.5), got {eps}"
            )));
        }
    }
    let p1 = second_order_partial_if(x, eta0, w, b, PartialTarget::Pop1)?;
    let p2 = second_order_partial_if(x, eta0, w, b, PartialTarget::Pop2)?;
    let cr = second_order_partial_if(x, eta0, w, b, PartialTarget::Cross)?;
    Ok(0.5 * eps1 * eps1 * p1 + eps1 * eps2 * cr + 0.5 * eps2 * eps2 * p2)
}

/// Rows of `(x, IF_mu, IF_sigma)` per tuning value over an x-grid:
/// the plot data behind the influence-curve figures.
pub fn influence_curve(
    betas: &[Beta],
    p: &LognormalParams,
    xs: &[f64],
) -> Result<Vec<(f64, f64, [f64; 2])>> {
    let mut rows = Vec::with_capacity(betas.len() * xs.len());
    for &b in betas {
        for &x in xs {
            let point = estimator_if(x, p, b)?;
            rows.push((x, b.value(), point.value));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::model::EtaVector;

    fn params(mu: f64, sigma: f64) -> LognormalParams {
        LognormalParams::new(mu, sigma).unwrap()
    }

    #[test]
    fn score_at_reference_points() {
        let p = params(0.7, 1.3);
        // log x = mu
        let s = score_function((0.7f64).exp(), &p).unwrap();
        assert_relative_eq!(s[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(s[1], -1.0 / 1.3, max_relative = 1e-12);
        // one standardized unit above
        let s = score_function((0.7f64 + 1.3).exp(), &p).unwrap();
        assert_relative_eq!(s[0], 1.0, max_relative = 1e-12);
        assert!(s[1].abs() < 1e-12);
        assert!(score_function(0.0, &p).is_err());
    }

    #[test]
    fn score_vs_log_density_gradient() {
        // the standardized form differs from d log f/d mu by one sigma
        // factor in the first component and matches in the second
        let p = params(0.2, 0.8);
        let h = 1e-6;
        for &x in &[0.3, 1.0, 4.5] {
            let disp = score_function(x, &p).unwrap();
            let grad_mu = ((params(0.2 + h, 0.8).log_pdf(x)) - (params(0.2 - h, 0.8).log_pdf(x)))
                / (2.0 * h);
            let grad_sigma = ((params(0.2, 0.8 + h).log_pdf(x))
                - (params(0.2, 0.8 - h).log_pdf(x)))
                / (2.0 * h);
            assert_relative_eq!(disp[0], 0.8 * grad_mu, max_relative = 1e-6);
            assert_relative_eq!(disp[1], grad_sigma, epsilon = 1e-6);
            let ld = log_density_score(x, &p);
            assert_relative_eq!(ld[0], grad_mu, max_relative = 1e-6);
            assert_relative_eq!(ld[1], grad_sigma, epsilon = 1e-6);
        }
    }

    #[test]
    fn xi_vanishes_at_beta_zero() {
        let xi = xi_vector(&params(0.4, 1.7), Beta::zero());
        assert_eq!(xi, [0.0, 0.0]);
    }

    #[test]
    fn xi_matches_quadrature_of_the_score_integral() {
        // oracle: integrate u(x) f^(1+beta)(x) dx on the log scale
        for &(mu, sigma, beta) in &[(0.0, 1.0, 0.5), (2.0, 0.5, 1.0), (-1.0, 2.0, 0.3)] {
            let p = params(mu, sigma);
            let b = Beta::new(beta).unwrap();
            let xi = xi_vector(&p, b);
            let center = mu - sigma * sigma * beta / (1.0 + beta);
            let half = 30.0 * sigma;
            for comp in 0..2 {
                let oracle = integrate(
                    |t| {
                        let x = t.exp();
                        log_density_score(x, &p)[comp]
                            * ((1.0 + beta) * p.log_pdf(x)).exp()
                            * x
                    },
                    center - half,
                    center + half,
                    1e-13,
                );
                assert_relative_eq!(xi[comp], oracle, max_relative = 1e-8, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mle_influence_special_case() {
        let p = params(0.0, 1.0);
        let at_center = estimator_if(1.0, &p, Beta::zero()).unwrap();
        assert_relative_eq!(at_center.value[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(at_center.value[1], -0.5, max_relative = 1e-14);
        // unbounded growth: second component ~ (log^2 x - sigma^2)/(2 sigma)
        let far = estimator_if(1e6, &p, Beta::zero()).unwrap();
        let lx = (1e6f64).ln();
        assert_relative_eq!(
            far.value[1],
            -(1.0 - lx * lx) / 2.0,
            max_relative = 1e-12
        );
        assert!(far.value[1] > 90.0);
    }

    #[test]
    fn influence_approaches_tail_limit() {
        let p = params(0.0, 1.0);
        let b = Beta::new(0.5).unwrap();
        let limit = if_tail_limit(&p, b).unwrap();
        let at = estimator_if(1e10, &p, b).unwrap();
        for i in 0..2 {
            assert!(
                (at.value[i] - limit[i]).abs() < 1e-6,
                "component {i}: {} vs {}",
                at.value[i],
                limit[i]
            );
        }
    }

    #[test]
    fn boundedness_dichotomy_on_log_grid() {
        let p = params(0.0, 1.0);
        let grid: Vec<f64> = (-6..=12).map(|k| 10f64.powi(k)).collect();
        for &beta in &[0.1, 0.3, 0.5, 1.0] {
            let b = Beta::new(beta).unwrap();
            let norms: Vec<f64> = grid
                .iter()
                .map(|&x| {
                    let v = estimator_if(x, &p, b).unwrap().value;
                    (v[0] * v[0] + v[1] * v[1]).sqrt()
                })
                .collect();
            let max = norms.iter().cloned().fold(0.0, f64::max);
            assert!(max.is_finite());
            // the maximum sits strictly inside the grid
            let argmax = norms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert!(argmax > 0 && argmax < grid.len() - 1, "beta={beta}");
        }
        // likelihood case: the maximum sits on the boundary and keeps
        // growing when the grid is extended
        let norms: Vec<f64> = grid
            .iter()
            .map(|&x| {
                let v = estimator_if(x, &p, Beta::zero()).unwrap().value;
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            })
            .collect();
        let argmax = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, grid.len() - 1);
        let beyond = estimator_if(1e14, &p, Beta::zero()).unwrap().value;
        let beyond_norm = (beyond[0] * beyond[0] + beyond[1] * beyond[1]).sqrt();
        assert!(beyond_norm > norms[argmax]);
    }

    #[test]
    fn population_functional_is_fisher_consistent() {
        for &(mu, sigma, beta) in &[(0.0, 1.0, 0.3), (1.5, 0.6, 0.8)] {
            let mix = MixtureSpec::new(params(mu, sigma), 0.0, 3.0).unwrap();
            let t = population_mdpd_functional(&mix, Beta::new(beta).unwrap()).unwrap();
            assert!((t.mu() - mu).abs() < 1e-7, "mu: {} vs {mu}", t.mu());
            assert!(
                (t.sigma() - sigma).abs() < 1e-7,
                "sigma: {} vs {sigma}",
                t.sigma()
            );
        }
    }

    #[test]
    fn population_functional_rejects_beta_zero() {
        let mix = MixtureSpec::new(params(0.0, 1.0), 0.1, 2.0).unwrap();
        assert!(matches!(
            population_mdpd_functional(&mix, Beta::zero()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn finite_difference_matches_influence_formula() {
        // (T(eps) - T(0)) / eps against the closed form at eps = 1e-4
        let p = params(0.0, 1.0);
        let b = Beta::new(0.5).unwrap();
        let x = 3.0;
        let eps = 1e-4;
        let t1 = population_mdpd_functional(&MixtureSpec::new(p, eps, x).unwrap(), b).unwrap();
        let t0 = population_mdpd_functional(&MixtureSpec::new(p, 0.0, x).unwrap(), b).unwrap();
        let fd = [(t1.mu() - t0.mu()) / eps, (t1.sigma() - t0.sigma()) / eps];
        let formula = estimator_if(x, &p, b).unwrap().value;
        for i in 0..2 {
            assert_relative_eq!(fd[i], formula[i], max_relative = 1e-3);
        }
    }

    #[test]
    fn functional_resists_contamination_the_mle_absorbs() {
        // 5% point mass far above a base with variance 0.4: the
        // divergence functional's location barely moves, while the
        // likelihood fit on matched contaminated draws shifts by nearly
        // the full mixture amount (0.05 * 5 = 0.25 in the log location).
        let base = params(0.0, 0.4f64.sqrt());
        let atom = (5.0f64).exp();
        let mix = MixtureSpec::new(base, 0.05, atom).unwrap();
        let t = population_mdpd_functional(&mix, Beta::new(0.2).unwrap()).unwrap();

        let spec = crate::model::ContaminationSpec::new(
            0.05,
            params(5.0, 1e-6), // tight spike standing in for the atom
            crate::model::TargetPopulation::Second,
        )
        .unwrap();
        let mut mle_shift = 0.0;
        let reps = 20;
        for r in 0..reps {
            let s = crate::model::sample_contaminated(
                400,
                &base,
                &spec,
                crate::rng::RngSeed::new(1000, r),
            )
            .unwrap();
            mle_shift += crate::mdpd::fit_mle(&s).unwrap().params.mu();
        }
        mle_shift /= reps as f64;
        assert!(
            t.mu().abs() < 0.2 * mle_shift.abs(),
            "functional mu {} vs average MLE shift {mle_shift}",
            t.mu()
        );
    }

    #[test]
    fn second_order_identities() {
        let eta0 = EtaVector::new(0.0, 0.4f64.sqrt(), 0.0, 0.4f64.sqrt()).unwrap();
        let w = Weight::new(0.6).unwrap();
        for &beta in &[0.2, 0.5] {
            let b = Beta::new(beta).unwrap();
            for &x in &[0.5, 2.0, 50.0] {
                let p1 = second_order_partial_if(x, &eta0, w, b, PartialTarget::Pop1).unwrap();
                let p2 = second_order_partial_if(x, &eta0, w, b, PartialTarget::Pop2).unwrap();
                let cr = second_order_partial_if(x, &eta0, w, b, PartialTarget::Cross).unwrap();
                assert!(p1 >= 0.0 && p2 >= 0.0);
                assert_relative_eq!(cr * cr, p1 * p2, max_relative = 1e-10);
            }
        }
        // off-null configurations are refused
        let off = EtaVector::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            second_order_partial_if(2.0, &off, w, Beta::new(0.2).unwrap(), PartialTarget::Pop1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundedness_of_second_order_terms() {
        let eta0 = EtaVector::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let w = Weight::new(0.5).unwrap();
        let grid: Vec<f64> = (-4..=12).map(|k| 10f64.powi(k)).collect();
        let sup = |b: Beta| {
            grid.iter()
                .map(|&x| {
                    second_order_partial_if(x, &eta0, w, b, PartialTarget::Pop1).unwrap()
                })
                .fold(0.0, f64::max)
        };
        let bounded = sup(Beta::new(0.5).unwrap());
        assert!(bounded.is_finite());
        // at beta = 0 the same sweep keeps growing with x
        let b0 = Beta::zero();
        let at_boundary =
            second_order_partial_if(1e12, &eta0, w, b0, PartialTarget::Pop1).unwrap();
        let beyond = second_order_partial_if(1e14, &eta0, w, b0, PartialTarget::Pop1).unwrap();
        assert!(beyond > at_boundary);
        assert!(at_boundary > bounded);
    }

    #[test]
    fn bias_is_a_perfect_square_up_to_sign() {
        let eta0 = EtaVector::new(0.0, 0.4f64.sqrt(), 0.0, 0.4f64.sqrt()).unwrap();
        let w = Weight::new(0.6).unwrap();
        let b = Beta::new(0.2).unwrap();
        let x = (5.0f64).exp();
        let (e1, e2) = (0.02, 0.05);
        let bias = bias_approximation(x, &eta0, w, b, e1, e2).unwrap();
        let p1 = second_order_partial_if(x, &eta0, w, b, PartialTarget::Pop1).unwrap();
        let p2 = second_order_partial_if(x, &eta0, w, b, PartialTarget::Pop2).unwrap();
        let cr = second_order_partial_if(x, &eta0, w, b, PartialTarget::Cross).unwrap();
        let square = 0.5 * (e1 * p1.sqrt() + cr.signum() * e2 * p2.sqrt()).powi(2);
        assert_relative_eq!(bias, square, max_relative = 1e-10);
        assert!(bias >= 0.0);
        assert_eq!(
            bias_approximation(x, &eta0, w, b, 0.0, 0.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn larger_beta_shrinks_the_bias() {
        // contamination high above the null configuration
        let eta0 = EtaVector::new(0.0, 0.4f64.sqrt(), 0.0, 0.4f64.sqrt()).unwrap();
        let w = Weight::new(0.6).unwrap();
        let x = (5.0f64).exp();
        let robust = bias_approximation(x, &eta0, w, Beta::new(0.5).unwrap(), 0.0, 0.05).unwrap();
        let fragile =
            bias_approximation(x, &eta0, w, Beta::new(0.01).unwrap(), 0.0, 0.05).unwrap();
        assert!(
            robust < 0.01 * fragile,
            "robust {robust} should be far below near-likelihood {fragile}"
        );
    }
}
