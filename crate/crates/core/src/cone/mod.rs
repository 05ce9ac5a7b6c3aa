//! Homogeneous forms on a Riemannian cone `dr² + r²g` over a discrete link: the cone exterior
//! derivative, codifferential and Laplacian in link components, and the block operator `E` whose
//! spectrum governs the radial exponents of harmonic forms.
//!
//! A p-form of exponent `β` is `r^β (d log r ∧ φ′ + φ″)` with `φ′` a (p−1)-cochain and `φ″` a
//! p-cochain on the link; its homogeneity order is `β − p`.

mod algebra;
mod indicial;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dec::{Correction, DiscreteHodge, Pencil};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

pub use algebra::{check_diagonalization, Diagonalization};
pub use indicial::{
    classify_windows, fredholm_windows, indicial_analysis, indicial_csv, nolog_verdict, ConeReport,
    ExceptionalOrder, FredholmWindow, IndicialDatum, IndicialOptions, NoLogVerdict, Verdict, WindowCheck,
    WindowVerdict,
};

/// A cone of real dimension `l` over a discrete link of dimension `l − 1`.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    l: usize,
    link: Arc<DiscreteHodge>,
}

impl ConeGeometry {
    pub fn new(link: Arc<DiscreteHodge>) -> Self {
        Self {
            l: link.dim() + 1,
            link,
        }
    }

    /// Real dimension of the cone.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn link(&self) -> &DiscreteHodge {
        &self.link
    }

    /// `m = 1 + p − l/2`.
    pub fn m(&self, p: usize) -> f64 {
        1.0 + p as f64 - self.l as f64 / 2.0
    }

    /// Number of link k-cochains; zero for negative `k` or `k` above the link dimension.
    pub fn cochain_len(&self, k: isize) -> usize {
        if k < 0 {
            0
        } else {
            self.link.size(k as usize)
        }
    }

    fn d(&self, k: isize, x: &[f64]) -> Vec<f64> {
        let out = self.cochain_len(k + 1);
        if k < 0 || out == 0 {
            return vec![0.0; out];
        }
        self.link.d(k as usize, x)
    }

    fn delta(&self, k: isize, x: &[f64]) -> Result<Vec<f64>> {
        let out = self.cochain_len(k - 1);
        if k <= 0 || out == 0 || x.is_empty() {
            return Ok(vec![0.0; out]);
        }
        self.link.codifferential(k as usize, x)
    }

    fn laplace(&self, k: isize, x: &[f64]) -> Result<Vec<f64>> {
        if x.is_empty() {
            return Ok(Vec::new());
        }
        self.link.laplacian_apply(k as usize, x)
    }

    fn check(&self, f: &HomogeneousForm) -> Result<()> {
        let p = f.p as isize;
        if f.p > self.l + 1 {
            return Err(Error::DegreeOutOfRange { degree: f.p, max: self.l + 1 });
        }
        if f.phi_prime.len() != self.cochain_len(p - 1) || f.phi_double.len() != self.cochain_len(p) {
            return Err(Error::InvalidArgument(format!(
                "components of a degree-{} form must have lengths {} and {}, got {} and {}",
                f.p,
                self.cochain_len(p - 1),
                self.cochain_len(p),
                f.phi_prime.len(),
                f.phi_double.len()
            )));
        }
        Ok(())
    }

    /// A form with independent uniform(−1, 1) link components.
    pub fn random_form<R: Rng>(&self, p: usize, beta: f64, rng: &mut R) -> HomogeneousForm {
        let mut draw = |n: usize| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
        let phi_prime = draw(self.cochain_len(p as isize - 1));
        let phi_double = draw(self.cochain_len(p as isize));
        HomogeneousForm {
            p,
            beta,
            phi_prime,
            phi_double,
        }
    }
}

/// `r^β (d log r ∧ φ′ + φ″)` on the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousForm {
    pub p: usize,
    pub beta: f64,
    pub phi_prime: Vec<f64>,
    pub phi_double: Vec<f64>,
}

impl HomogeneousForm {
    /// Homogeneity order `β − p`.
    pub fn order(&self) -> f64 {
        self.beta - self.p as f64
    }

    pub fn zero(g: &ConeGeometry, p: usize, beta: f64) -> Self {
        Self {
            p,
            beta,
            phi_prime: vec![0.0; g.cochain_len(p as isize - 1)],
            phi_double: vec![0.0; g.cochain_len(p as isize)],
        }
    }

    /// Sum of two forms of equal degree and exponent.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.beta != other.beta {
            return Err(Error::InvalidArgument("adding forms of different degree or exponent".into()));
        }
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Self {
            p: self.p,
            beta: self.beta,
            phi_prime: sum(&self.phi_prime, &other.phi_prime),
            phi_double: sum(&self.phi_double, &other.phi_double),
        })
    }

    /// Link mass norm `(‖φ′‖² + ‖φ″‖²)^{1/2}`.
    pub fn norm(&self, g: &ConeGeometry) -> f64 {
        let p = self.p as isize;
        let a = if self.phi_prime.is_empty() { 0.0 } else { g.link.inner((p - 1) as usize, &self.phi_prime, &self.phi_prime) };
        let b = if self.phi_double.is_empty() { 0.0 } else { g.link.inner(p as usize, &self.phi_double, &self.phi_double) };
        (a + b).max(0.0).sqrt()
    }

    /// Largest absolute component, a norm free of mass solves.
    pub fn max_abs(&self) -> f64 {
        self.phi_prime.iter().chain(&self.phi_double).fold(0.0f64, |a, x| a.max(x.abs()))
    }
}

/// `d(r^β(d log r ∧ φ′ + φ″)) = r^β(d log r ∧ (βφ″ − dφ′) + dφ″)`.
pub fn cone_d(f: &HomogeneousForm, g: &ConeGeometry) -> Result<HomogeneousForm> {
    g.check(f)?;
    let p = f.p as isize;
    let mut first = g.d(p - 1, &f.phi_prime);
    first.iter_mut().zip(&f.phi_double).for_each(|(a, b)| *a = f.beta * b - *a);
    Ok(HomogeneousForm {
        p: f.p + 1,
        beta: f.beta,
        phi_prime: first,
        phi_double: g.d(p, &f.phi_double),
    })
}

/// `d*` of a degree-p form of exponent `β`: exponent `β − 2`, components
/// `(−δφ′, δφ″ − (β + l − 2p)φ′)`. For `p = 0` the result is the zero 0-form, so that
/// compositions with [`cone_d`] stay well typed.
pub fn cone_dstar(f: &HomogeneousForm, g: &ConeGeometry) -> Result<HomogeneousForm> {
    g.check(f)?;
    let beta = f.beta - 2.0;
    if f.p == 0 {
        return Ok(HomogeneousForm::zero(g, 0, beta));
    }
    let p = f.p as isize;
    let c = f.beta + g.l as f64 - 2.0 * f.p as f64;
    let first: Vec<f64> = g.delta(p - 1, &f.phi_prime)?.into_iter().map(|x| -x).collect();
    let mut second = g.delta(p, &f.phi_double)?;
    second.iter_mut().zip(&f.phi_prime).for_each(|(a, b)| *a -= c * b);
    Ok(HomogeneousForm {
        p: f.p - 1,
        beta,
        phi_prime: first,
        phi_double: second,
    })
}

/// Cone Laplacian of a degree-p form of exponent `β`: exponent `β − 2`, components
/// `(Δφ′ − (β−2)(β+l−2p)φ′ − 2δφ″, Δφ″ − β(β+l−2−2p)φ″ − 2dφ′)`.
pub fn cone_laplacian(f: &HomogeneousForm, g: &ConeGeometry) -> Result<HomogeneousForm> {
    g.check(f)?;
    let p = f.p as isize;
    let (b, l, pf) = (f.beta, g.l as f64, f.p as f64);
    let c1 = (b - 2.0) * (b + l - 2.0 * pf);
    let c2 = b * (b + l - 2.0 - 2.0 * pf);
    let mut first = g.laplace(p - 1, &f.phi_prime)?;
    let dd = g.delta(p, &f.phi_double)?;
    for ((a, x), y) in first.iter_mut().zip(&f.phi_prime).zip(&dd) {
        *a -= c1 * x + 2.0 * y;
    }
    let mut second = g.laplace(p, &f.phi_double)?;
    let dp = g.d(p - 1, &f.phi_prime);
    for ((a, x), y) in second.iter_mut().zip(&f.phi_double).zip(&dp) {
        *a -= c2 * x + 2.0 * y;
    }
    Ok(HomogeneousForm {
        p: f.p,
        beta: b - 2.0,
        phi_prime: first,
        phi_double: second,
    })
}

/// The pencil of `E = ((Δ + 2l − 4p, −2δ), (−2d, Δ))` on (p−1)- ⊕ p-cochains, multiplied by the
/// block mass `diag(M_{p−1}, M_p)` so that it is symmetric.
///
/// For `p = 0` only the `φ″` block exists and `E = Δ`; for `p = l` only the `φ′` block exists
/// and `E = Δ + 2l − 4p`.
pub fn assemble_e(g: &ConeGeometry, p: usize) -> Result<Pencil> {
    let l = g.l;
    if p > l {
        return Err(Error::DegreeOutOfRange { degree: p, max: l });
    }
    let h = &g.link;
    let shift = 2.0 * l as f64 - 4.0 * p as f64;
    if p == 0 {
        return h.laplacian(0);
    }
    if p == l {
        let base = h.laplacian(l - 1)?;
        let stiffness = base.stiffness.add(1.0, &base.mass, shift);
        return Ok(Pencil::new(p, stiffness, base.mass, base.corrections).with_lower_bound(shift));
    }
    let (n1, n2) = (h.size(p - 1), h.size(p));
    let m1 = h.mass(p - 1);
    let m2 = h.mass(p);
    let d1 = h.coboundary(p - 1);
    let m2d1 = m2.matmul(d1);
    let top_left = d1.transpose().matmul(&m2d1).add(1.0, m1, shift);
    let top_right = m2d1.transpose().scale(-2.0);
    let bottom_left = m2d1.scale(-2.0);
    let bottom_right = if p < h.dim() {
        let dp = h.coboundary(p);
        dp.transpose().matmul(h.mass(p + 1)).matmul(dp)
    } else {
        CsrMatrix::zeros(n2, n2)
    };
    let sizes = [n1, n2];
    let stiffness = CsrMatrix::block(
        &sizes,
        &sizes,
        &[vec![Some(&top_left), Some(&top_right)], vec![Some(&bottom_left), Some(&bottom_right)]],
    );
    let mass = CsrMatrix::block(&sizes, &sizes, &[vec![Some(m1), None], vec![None, Some(m2)]]);
    let mut corrections = Vec::new();
    if p >= 2 {
        let c = m1.matmul(h.coboundary(p - 2));
        let k = c.ncols();
        let coupling = CsrMatrix::block(&sizes, &[k], &[vec![Some(&c)], vec![None]]);
        corrections.push(Correction::new(coupling, h.mass(p - 2).clone()));
    }
    let coupling = CsrMatrix::block(&sizes, &[n1], &[vec![None], vec![Some(&m2d1)]]);
    corrections.push(Correction::new(coupling, m1.clone()));
    // ⟨Ex, x⟩ = ‖dφ′‖² + ‖δφ′‖² + s‖φ′‖² − 4⟨dφ′, φ″⟩ + ‖dφ″‖² + ‖δφ″‖² ≥ s‖φ′‖² − 4‖φ″‖².
    Ok(Pencil::new(p, stiffness, mass, corrections).with_lower_bound(shift.min(-4.0)))
}

/// Splits a stacked `E` eigenvector into `(φ′, φ″)`.
pub fn split_e_vector(g: &ConeGeometry, p: usize, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n1 = g.cochain_len(p as isize - 1);
    let n2 = g.cochain_len(p as isize);
    debug_assert_eq!(v.len(), n1 + n2);
    (v[..n1].to_vec(), v[n1..].to_vec())
}
