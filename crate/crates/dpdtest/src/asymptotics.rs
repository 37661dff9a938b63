//! Closed-form asymptotic covariance machinery for the divergence fit.
//!
//! For one population the estimator satisfies
//! `sqrt(n) (theta_hat - theta) -> N(0, Sigma_beta)` with the sandwich
//! `Sigma_beta = J_beta^-1 K_beta J_beta^-1`, where `J_beta` is the
//! limiting Hessian of the objective and `K_beta` the covariance of its
//! per-observation gradient. Both have closed forms in `(beta, mu,
//! sigma)`; at `beta = 0` each reduces to the Fisher information
//! `diag(1/sigma^2, 2/sigma^2)`.
//!
//! The two-sample joint covariance stacks the per-population sandwiches
//! block-diagonally with weights `(1-w)` and `w`, `w` being the limiting
//! share of population-1 observations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdpd::Beta;
use crate::model::{EtaVector, LognormalParams};

/// Symmetric 2x2 matrix with closed-form inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    data: [[f64; 2]; 2],
}

impl Matrix2 {
    pub fn new(data: [[f64; 2]; 2]) -> Self {
        Self { data }
    }

    pub fn symmetric(a: f64, b: f64, d: f64) -> Self {
        Self {
            data: [[a, b], [b, d]],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i][j]
    }

    pub fn as_rows(&self) -> [[f64; 2]; 2] {
        self.data
    }

    pub fn det(&self) -> f64 {
        self.data[0][0] * self.data[1][1] - self.data[0][1] * self.data[1][0]
    }

    /// Closed-form adjugate inverse with an underflow floor on the
    /// determinant for extreme `(beta, sigma)` combinations.
    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        if !det.is_finite() || det.abs() < 1e-300 {
            return Err(Error::Numerical(format!(
                "matrix is numerically singular (det = {det:e})"
            )));
        }
        let [[a, b], [c, d]] = self.data;
        Ok(Matrix2::new([
            [d / det, -b / det],
            [-c / det, a / det],
        ]))
    }

    pub fn matmul(&self, other: &Matrix2) -> Matrix2 {
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).map(|k| self.data[i][k] * other.data[k][j]).sum();
            }
        }
        Matrix2::new(out)
    }

    pub fn scale(&self, c: f64) -> Matrix2 {
        Matrix2::new([
            [c * self.data[0][0], c * self.data[0][1]],
            [c * self.data[1][0], c * self.data[1][1]],
        ])
    }

    /// v' M v
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        v[0] * v[0] * self.data[0][0]
            + 2.0 * v[0] * v[1] * self.data[0][1]
            + v[1] * v[1] * self.data[1][1]
    }

    pub fn matvec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.data[0][0] * v[0] + self.data[0][1] * v[1],
            self.data[1][0] * v[0] + self.data[1][1] * v[1],
        ]
    }

    fn symmetrized(&self) -> Matrix2 {
        let off = 0.5 * (self.data[0][1] + self.data[1][0]);
        Matrix2::symmetric(self.data[0][0], off, self.data[1][1])
    }
}

/// Block-diagonal symmetric 4x4 matrix (two 2x2 blocks), the shape of
/// the joint two-population covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4 {
    block1: Matrix2,
    block2: Matrix2,
}

impl Matrix4 {
    pub fn from_blocks(block1: Matrix2, block2: Matrix2) -> Self {
        Self { block1, block2 }
    }

    pub fn block1(&self) -> &Matrix2 {
        &self.block1
    }

    pub fn block2(&self) -> &Matrix2 {
        &self.block2
    }

    pub fn as_rows(&self) -> [[f64; 4]; 4] {
        let a = self.block1.as_rows();
        let b = self.block2.as_rows();
        [
            [a[0][0], a[0][1], 0.0, 0.0],
            [a[1][0], a[1][1], 0.0, 0.0],
            [0.0, 0.0, b[0][0], b[0][1]],
            [0.0, 0.0, b[1][0], b[1][1]],
        ]
    }

    pub fn quadratic_form(&self, v: [f64; 4]) -> f64 {
        self.block1.quadratic_form([v[0], v[1]]) + self.block2.quadratic_form([v[2], v[3]])
    }
}

/// Limiting proportion of observations from the first population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(f64);

impl Weight {
    pub fn new(w: f64) -> Result<Self> {
        if !w.is_finite() || w <= 0.0 || w >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "weight must lie strictly inside (0, 1), got {w}"
            )));
        }
        Ok(Self(w))
    }

    /// The plug-in weight `n1 / (n1 + n2)`.
    pub fn from_sizes(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1 as f64 / (n1 + n2) as f64)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The three scalar prefactors of the closed-form matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LFactors {
    /// Prefactor of `J`: `exp(-b mu + b^2 s^2/(2(1+b))) / (s^(1+b) (2pi)^(b/2) (1+b)^(5/2))`.
    pub l: f64,
    /// Prefactor of the first term of `K`, the same expression with
    /// `beta` doubled: `exp(-2b mu + 2 b^2 s^2/(1+2b)) / (s^(2b+1) (2pi)^b (1+2b)^(5/2))`.
    pub l_star: f64,
    /// Prefactor of the rank-one correction of `K`:
    /// `exp(-2b mu + b^2 s^2/(1+b)) / (s^(2b+2) (2pi)^b (1+b)^3)`.
    pub l_double_star: f64,
}

/// Evaluate the three scalar prefactors at `(beta, mu, sigma)`.
pub fn l_factors(b: Beta, p: &LognormalParams) -> LFactors {
    let beta = b.value();
    let (mu, sigma) = (p.mu(), p.sigma());
    let two_pi = 2.0 * std::f64::consts::PI;
    let l = (-beta * mu + beta * beta * sigma * sigma / (2.0 * (1.0 + beta))).exp()
        / (sigma.powf(1.0 + beta) * two_pi.powf(beta / 2.0) * (1.0 + beta).powf(2.5));
    let l_star = (-2.0 * beta * mu + 2.0 * beta * beta * sigma * sigma / (1.0 + 2.0 * beta))
        .exp()
        / (sigma.powf(2.0 * beta + 1.0)
            * two_pi.powf(beta)
            * (1.0 + 2.0 * beta).powf(2.5));
    let l_double_star = (-2.0 * beta * mu + beta * beta * sigma * sigma / (1.0 + beta)).exp()
        / (sigma.powf(2.0 * beta + 2.0) * two_pi.powf(beta) * (1.0 + beta).powi(3));
    LFactors {
        l,
        l_star,
        l_double_star,
    }
}

/// Limiting Hessian `J_beta` of the fit objective at `(mu, sigma)`.
pub fn j_matrix(p: &LognormalParams, b: Beta) -> Matrix2 {
    let beta = b.value();
    let sigma = p.sigma();
    let s2 = sigma * sigma;
    let l = l_factors(b, p).l;
    let j11 = (1.0 + beta + beta * beta * s2) / sigma;
    let j12 = beta * (-beta * beta * s2 / (1.0 + beta) + beta - 2.0);
    let j22 = (beta.powi(4) * s2 * s2 / (1.0 + beta).powi(2)
        + 6.0 * beta * beta * s2 / (1.0 + beta)
        + beta * beta * (1.0 - 2.0 * s2)
        + 2.0)
        / sigma;
    Matrix2::symmetric(l * j11, l * j12, l * j22)
}

/// Limiting covariance `K_beta` of the per-observation gradient.
pub fn k_matrix(p: &LognormalParams, b: Beta) -> Matrix2 {
    let beta = b.value();
    let sigma = p.sigma();
    let s2 = sigma * sigma;
    let f = l_factors(b, p);
    let a11 = (1.0 + 2.0 * beta + 4.0 * beta * beta * s2) / sigma;
    let a12 = beta * (-8.0 * s2 * beta * beta / (1.0 + 2.0 * beta) + 4.0 * beta - 4.0);
    let a22 = (16.0 * beta.powi(4) * s2 * s2 / (1.0 + 2.0 * beta).powi(2)
        + 24.0 * s2 * beta * beta / (1.0 + 2.0 * beta)
        + 4.0 * beta * beta * (1.0 - 2.0 * s2)
        + 2.0)
        / sigma;
    // rank-one correction carrying the mean of the stochastic gradient term
    let q = -1.0 - beta + beta * s2;
    let b11 = s2 * beta * beta;
    let b12 = -sigma * beta * beta * q / (1.0 + beta);
    let b22 = beta * beta * q * q / (1.0 + beta).powi(2);
    Matrix2::symmetric(
        f.l_star * a11 - f.l_double_star * b11,
        f.l_star * a12 - f.l_double_star * b12,
        f.l_star * a22 - f.l_double_star * b22,
    )
}

/// Sandwich covariance `Sigma_beta = J^-1 K J^-1` of one population's
/// fit, on the `sqrt(n)` scale.
pub fn sigma_matrix(p: &LognormalParams, b: Beta) -> Result<Matrix2> {
    let j_inv = j_matrix(p, b).inverse()?;
    Ok(j_inv.matmul(&k_matrix(p, b)).matmul(&j_inv).symmetrized())
}

/// Joint covariance of both fits on the `sqrt(n1 n2 / (n1 + n2))` scale:
/// `diag((1-w) Sigma(mu1, sigma1), w Sigma(mu2, sigma2))`.
pub fn joint_covariance(eta: &EtaVector, w: Weight, b: Beta) -> Result<Matrix4> {
    let s1 = sigma_matrix(&eta.population1(), b)?;
    let s2 = sigma_matrix(&eta.population2(), b)?;
    Ok(Matrix4::from_blocks(
        s1.scale(1.0 - w.value()),
        s2.scale(w.value()),
    ))
}
