use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{CsrMatrix, SparseLdl};

/// One term `C · N⁻¹ · Cᵀ` of a pencil operator, with `N` symmetric positive definite.
#[derive(Debug)]
pub struct Correction {
    pub coupling: CsrMatrix,
    pub inner: CsrMatrix,
    factor: OnceLock<SparseLdl>,
}

impl Clone for Correction {
    fn clone(&self) -> Self {
        Self::new(self.coupling.clone(), self.inner.clone())
    }
}

impl Correction {
    pub fn new(coupling: CsrMatrix, inner: CsrMatrix) -> Self {
        assert_eq!(coupling.ncols(), inner.nrows(), "coupling/inner shape mismatch");
        Self {
            coupling,
            inner,
            factor: OnceLock::new(),
        }
    }

    fn inner_factor(&self) -> Result<&SparseLdl> {
        if let Some(f) = self.factor.get() {
            return Ok(f);
        }
        let f = SparseLdl::factor(&self.inner)?;
        Ok(self.factor.get_or_init(|| f))
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.coupling.tr_mul_vec(x);
        let z = self.inner_factor()?.solve(&y);
        Ok(self.coupling.mul_vec(&z))
    }
}

/// Symmetric generalized pencil `(A, M)` with `A = S + Σ C_i N_i⁻¹ C_iᵀ`.
///
/// Keeping the inverse-mass terms implicit preserves sparsity: for Whitney forms `A` itself is
/// dense whenever a codifferential enters, but `S`, `C_i`, `N_i` and `M` are sparse.
#[derive(Clone, Debug)]
pub struct Pencil {
    /// Label carried into spectrum reports (form degree).
    pub degree: usize,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub corrections: Vec<Correction>,
    /// A proven lower bound for the spectrum, used to place the shift of shift-invert solvers.
    pub lower_bound: Option<f64>,
}

impl Pencil {
    pub fn new(degree: usize, stiffness: CsrMatrix, mass: CsrMatrix, corrections: Vec<Correction>) -> Self {
        let n = mass.nrows();
        assert_eq!((stiffness.nrows(), stiffness.ncols()), (n, n), "stiffness shape");
        for c in &corrections {
            assert_eq!(c.coupling.nrows(), n, "correction coupling rows");
        }
        Self {
            degree,
            stiffness,
            mass,
            corrections,
            lower_bound: None,
        }
    }

    pub fn with_lower_bound(mut self, bound: f64) -> Self {
        self.lower_bound = Some(bound);
        self
    }

    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.stiffness.mul_vec(x);
        for c in &self.corrections {
            let z = c.apply(x)?;
            y.iter_mut().zip(&z).for_each(|(a, b)| *a += b);
        }
        Ok(y)
    }

    /// Dense `A` (symmetrized) and `M`.
    pub fn to_dense(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.dim();
        let mut a = self.stiffness.to_dense();
        for c in &self.corrections {
            let f = c.inner_factor()?;
            let ct = c.coupling.transpose();
            // Column j of N⁻¹Cᵀ, then C times it.
            let cols: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    c.coupling.mul_vec(&f.solve(&ct.mul_vec(&e)))
                })
                .collect();
            for (j, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    a[(i, j)] += v;
                }
            }
        }
        let a = (&a + a.transpose()) * 0.5;
        Ok((a, self.mass.to_dense()))
    }

    /// The saddle-point matrix `[[S + τM, C_1, …], [C_1ᵀ, −N_1, …], …]` whose Schur complement
    /// onto the first block is `A + τM`.
    pub fn augmented(&self, tau: f64) -> CsrMatrix {
        let n = self.dim();
        let top = self.stiffness.add(1.0, &self.mass, tau);
        let mut sizes = vec![n];
        sizes.extend(self.corrections.iter().map(|c| c.inner.nrows()));
        let neg: Vec<CsrMatrix> = self.corrections.iter().map(|c| c.inner.scale(-1.0)).collect();
        let ct: Vec<CsrMatrix> = self.corrections.iter().map(|c| c.coupling.transpose()).collect();
        let nb = sizes.len();
        let mut blocks: Vec<Vec<Option<&CsrMatrix>>> = vec![vec![None; nb]; nb];
        blocks[0][0] = Some(&top);
        for (i, c) in self.corrections.iter().enumerate() {
            blocks[0][i + 1] = Some(&c.coupling);
            blocks[i + 1][0] = Some(&ct[i]);
            blocks[i + 1][i + 1] = Some(&neg[i]);
        }
        CsrMatrix::block(&sizes, &sizes, &blocks)
    }

    /// Number of auxiliary unknowns in [`Pencil::augmented`].
    pub fn auxiliary_dim(&self) -> usize {
        self.corrections.iter().map(|c| c.inner.nrows()).sum()
    }

    /// Average diagonal ratio `tr S / tr M`, the natural eigenvalue scale.
    pub fn trace_scale(&self) -> f64 {
        let ts: f64 = self.stiffness.diagonal().iter().sum::<f64>()
            + self
                .corrections
                .iter()
                .map(|c| {
                    let d = c.inner.diagonal();
                    c.coupling.triplets().map(|(_, j, v)| v * v / d[j]).sum::<f64>()
                })
                .sum::<f64>();
        let tm: f64 = self.mass.diagonal().iter().sum();
        if tm > 0.0 {
            (ts / tm).abs()
        } else {
            1.0
        }
    }
}
