//! Line-search quasi-Newton (BFGS) minimizer for the small smooth
//! problems in this crate (2 or 3 free parameters).
//!
//! The caller supplies a closure returning the objective value and its
//! analytic gradient. Convergence is declared on a caller-supplied
//! gradient norm, which lets fits optimize in transformed coordinates
//! while testing stationarity on the reporting scale.

#[derive(Debug, Clone)]
pub struct OptOptions {
    /// Stop once the (caller-defined) gradient norm drops below this.
    pub grad_tol: f64,
    /// Iteration budget; one line search per iteration.
    pub max_iterations: usize,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Caller-defined gradient norm at `x`.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `f` starting from `x0`.
///
/// `norm` maps (point, gradient) to the scalar tested against
/// `grad_tol`; pass the Euclidean norm of the gradient for plain BFGS.
pub fn minimize_with_norm<F, N>(f: F, x0: &[f64], opts: &OptOptions, norm: N) -> OptOutcome
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    N: Fn(&[f64], &[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    // inverse Hessian approximation, row-major
    let mut h = identity(n);
    let mut iterations = 0;
    let mut gnorm = norm(&x, &g);

    while gnorm > opts.grad_tol && iterations < opts.max_iterations {
        iterations += 1;
        let mut p = neg_matvec(&h, &g);
        let mut dphi0 = dot(&p, &g);
        if !dphi0.is_finite() || dphi0 >= 0.0 {
            // reset to steepest descent if the model lost positive
            // definiteness through round-off
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            dphi0 = dot(&p, &g);
            if dphi0 >= 0.0 {
                break; // gradient is exactly zero
            }
        }

        // Backtracking Armijo search with a round-off slack so that
        // steps are still accepted when objective differences fall
        // below representation noise near the minimum.
        let c1 = 1e-4;
        let mut alpha = 1.0f64;
        let mut accepted = None;
        for _ in 0..60 {
            let xt: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            let (ft, gt) = f(&xt);
            let slack = 4.0 * f64::EPSILON * (fx.abs() + ft.abs() + 1e-300);
            if ft.is_finite() && ft <= fx + c1 * alpha * dphi0 + slack {
                accepted = Some((xt, ft, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xt, ft, gt)) = accepted else { break };

        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let ss = dot(&s, &s).sqrt();
        let yy = dot(&y, &y).sqrt();
        if sy > 1e-12 * ss * yy && sy.is_finite() {
            bfgs_update(&mut h, &s, &y, sy);
        }
        x = xt;
        fx = ft;
        g = gt;
        gnorm = norm(&x, &g);
    }

    OptOutcome {
        converged: gnorm <= opts.grad_tol,
        x,
        value: fx,
        grad_norm: gnorm,
        iterations,
    }
}

/// Minimize with the Euclidean gradient norm as the stopping criterion.
pub fn minimize<F>(f: F, x0: &[f64], opts: &OptOptions) -> OptOutcome
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    minimize_with_norm(f, x0, opts, |_, g| dot(g, g).sqrt())
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn neg_matvec(h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n)
        .map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>())
        .collect()
}

fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
    let mut hy = vec![0.0; n];
    for i in 0..n {
        hy[i] = (0..n).map(|j| h[i * n + j] * y[j]).sum();
    }
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| {
            let g = vec![2.0 * (x[0] - 3.0), 8.0 * (x[1] + 1.0)];
            ((x[0] - 3.0).powi(2) + 4.0 * (x[1] + 1.0).powi(2), g)
        };
        let out = minimize(f, &[0.0, 0.0], &OptOptions::default());
        assert!(out.converged);
        assert!((out.x[0] - 3.0).abs() < 1e-8);
        assert!((out.x[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock_2d() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (v, g)
        };
        let out = minimize(
            f,
            &[-1.2, 1.0],
            &OptOptions {
                grad_tol: 1e-9,
                max_iterations: 500,
            },
        );
        assert!(out.converged, "grad_norm={}", out.grad_norm);
        assert!((out.x[0] - 1.0).abs() < 1e-6);
        assert!((out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn custom_norm_controls_stopping() {
        let f = |x: &[f64]| (x[0] * x[0], vec![2.0 * x[0]]);
        let out = minimize_with_norm(
            f,
            &[5.0],
            &OptOptions::default(),
            |_, g| 10.0 * g[0].abs(),
        );
        assert!(out.converged);
        assert!(out.grad_norm <= 1e-10);
    }
}
