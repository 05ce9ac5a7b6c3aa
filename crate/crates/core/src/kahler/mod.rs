//! Weighted radius functions on `ℂ^m`, Levi forms of real potentials, and gluing of strictly
//! plurisubharmonic potentials to the weighted cone potential `ε r_λ²`.

mod cutoff;
mod glue;
mod levi;
mod potential;

pub use cutoff::QuinticBump;
pub use glue::{
    estimate_constants, glue_potential, sample_shells, Constants, GluedPotential, GluingOptions, GluingProblem,
    GluingReport, ItemVerdict, ReportItem,
};
pub use levi::{levi_fd, min_eigenvalue, Hermitian};
pub use potential::{Coefficient, Monomial, Polynomial, Potential, PotentialDocument};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the weights enter the defining equation `Σ_a |z_a|² t^{−2c_a} = 1` of the radius.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusConvention {
    /// `c_a = λ_a`: `r_λ` scales by `e^s` under the flow `z_a ↦ e^{λ_a s} z_a`.
    #[default]
    Flow,
    /// `c_a = 1/λ_a`: `r_λ(z₁, 0, …) = |z₁|^{λ₁}`, so `r^β ≤ r_λ ≤ r^α` for `r ≤ 1`.
    Reciprocal,
}

/// Weights `λ_a ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightData {
    lambda: Vec<f64>,
}

impl WeightData {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidArgument("at least one weight is required".into()));
        }
        if let Some(bad) = lambda.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::InvalidArgument(format!("weight {bad} is not in (0, 1)")));
        }
        Ok(Self { lambda })
    }

    /// Ambient complex dimension.
    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `min λ_a`.
    pub fn alpha(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max λ_a`.
    pub fn beta(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn exponents(&self, convention: RadiusConvention) -> Vec<f64> {
        match convention {
            RadiusConvention::Flow => self.lambda.clone(),
            RadiusConvention::Reciprocal => self.lambda.iter().map(|l| 1.0 / l).collect(),
        }
    }
}

/// `Σ_a |z_a|² t^{−2c_a} − 1`.
pub fn radius_residual(z: &[Complex64], w: &WeightData, convention: RadiusConvention, t: f64) -> f64 {
    z.iter()
        .zip(w.exponents(convention))
        .map(|(za, c)| za.norm_sqr() * t.powf(-2.0 * c))
        .sum::<f64>()
        - 1.0
}

/// The unique `t > 0` with `Σ_a |z_a|² t^{−2c_a} = 1`.
///
/// Works in `s = ln t`, where `G(s) = Σ |z_a|² e^{−2c_a s}` is strictly decreasing and convex:
/// a bracket is grown geometrically, then safeguarded Newton steps refine it.
pub fn weighted_radius_with(z: &[Complex64], w: &WeightData, convention: RadiusConvention, tol: f64) -> Result<f64> {
    if z.len() != w.m() {
        return Err(Error::InvalidArgument(format!("point has {} coordinates, weights {}", z.len(), w.m())));
    }
    let terms: Vec<(f64, f64)> = z
        .iter()
        .zip(w.exponents(convention))
        .filter(|(za, _)| za.norm_sqr() > 0.0)
        .map(|(za, c)| (za.norm_sqr(), c))
        .collect();
    if terms.is_empty() {
        return Err(Error::InvalidArgument("the weighted radius is undefined at the origin".into()));
    }
    let g = |s: f64| -> (f64, f64) {
        terms.iter().fold((-1.0, 0.0), |(v, dv), &(a, c)| {
            let e = a * (-2.0 * c * s).exp();
            (v + e, dv - 2.0 * c * e)
        })
    };
    // Single-term solutions bound the root: s_a = ln|z_a|/c_a.
    let singles = terms.iter().map(|&(a, c)| 0.5 * a.ln() / c);
    let mut lo = singles.clone().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = singles.fold(f64::NEG_INFINITY, f64::max) + 1.0 + (terms.len() as f64).ln();
    while g(lo).0 < 0.0 {
        lo -= 2.0 * (hi - lo);
    }
    while g(hi).0 > 0.0 {
        hi += 2.0 * (hi - lo);
    }
    let mut s = 0.5 * (lo + hi);
    // Newton steps are taken only while they at least halve the previous step; far from the
    // root on the steep side they crawl, and bisection takes over.
    let mut step_old = hi - lo;
    let mut step = step_old;
    for _ in 0..400 {
        let (v, dv) = g(s);
        if v > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        // An absolute error in s is a relative error in t.
        if (v.abs() <= 0.25 * tol && hi - lo <= 1e-15) || hi - lo <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
            break;
        }
        let newton = s - v / dv;
        let slow = !(2.0 * v.abs() <= (step_old * dv).abs());
        step_old = step;
        if newton > lo && newton < hi && !slow {
            if (newton - s).abs() <= f64::EPSILON * s.abs().max(1.0) {
                s = newton;
                break;
            }
            step = (newton - s).abs();
            s = newton;
        } else {
            step = 0.5 * (hi - lo);
            s = 0.5 * (lo + hi);
        }
    }
    Ok(s.exp())
}

/// [`weighted_radius_with`] under the flow convention.
pub fn weighted_radius(z: &[Complex64], w: &WeightData, tol: f64) -> Result<f64> {
    weighted_radius_with(z, w, RadiusConvention::Flow, tol)
}

/// `ρ = r_λ²` with its holomorphic gradient `∂ρ/∂z_a` and Levi form.
///
/// With `s = ln r_λ`, `E_k = e^{−2c_k s}`, `D = Σ 2c_k|z_k|²E_k`, `Q = Σ 4c_k²|z_k|²E_k`, implicit
/// differentiation of `Σ|z_k|²E_k = 1` gives `∂_a s = z̄_a E_a/D` and
/// `∂_a∂̄_b ρ = ρ [2δ_ab E_a/D + E_aE_b z̄_a z_b (4/D² − 4(c_a + c_b)/D² + 2Q/D³)]`.
pub fn weighted_potential_jet(
    z: &[Complex64],
    w: &WeightData,
    convention: RadiusConvention,
    tol: f64,
) -> Result<(f64, Vec<Complex64>, Hermitian)> {
    let t = weighted_radius_with(z, w, convention, tol)?;
    let c = w.exponents(convention);
    let e: Vec<f64> = c.iter().map(|ck| t.powf(-2.0 * ck)).collect();
    let a: Vec<f64> = z.iter().map(|x| x.norm_sqr()).collect();
    let d: f64 = (0..z.len()).map(|k| 2.0 * c[k] * a[k] * e[k]).sum();
    let q: f64 = (0..z.len()).map(|k| 4.0 * c[k] * c[k] * a[k] * e[k]).sum();
    let rho = t * t;
    let grad = (0..z.len()).map(|k| z[k].conj() * (2.0 * rho * e[k] / d)).collect();
    let mut l = Hermitian::zeros(z.len());
    for i in 0..z.len() {
        for j in 0..z.len() {
            let cross = z[i].conj() * z[j] * (e[i] * e[j]) * ((4.0 - 4.0 * (c[i] + c[j])) / (d * d) + 2.0 * q / (d * d * d));
            let diag = if i == j { 2.0 * e[i] / d } else { 0.0 };
            l.set(i, j, (cross + diag) * rho);
        }
    }
    Ok((rho, grad, l))
}

/// Euclidean norm `|z|`.
pub fn euclidean_radius(z: &[Complex64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
