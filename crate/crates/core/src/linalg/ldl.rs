use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::sparse::linalg::cholesky::supernodal::SupernodalLdltRef;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, LdltRef, SymbolicCholesky, SymbolicCholeskyRaw,
    SymmetricOrdering,
};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, MatMut, Par, Side};

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Sparse `L D Lᵀ` factorization of a symmetric matrix with a fill-reducing (AMD)
/// ordering and no pivoting.
///
/// Suited to symmetric positive definite and quasi-definite systems, which admit such a
/// factorization under any symmetric permutation. The inertia is read off `D`.
#[derive(Debug)]
pub struct SparseLdl {
    n: usize,
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    d: Vec<f64>,
}

fn lower_triangle(a: &CsrMatrix) -> Result<SparseColMat<usize, f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("LDL factorization needs a square matrix".into()));
    }
    let mut t: Vec<Triplet<usize, usize, f64>> =
        a.triplets().filter(|&(i, j, _)| i >= j).map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    // Keep every diagonal slot so the symbolic pattern covers the full factor.
    t.extend((0..n).map(|i| Triplet::new(i, i, 0.0)));
    SparseColMat::try_new_from_triplets(n, n, &t)
        .map_err(|e| Error::InvalidArgument(format!("sparse matrix assembly failed: {e:?}")))
}

fn analyse(lower: &SparseColMat<usize, f64>) -> Result<SymbolicCholesky<usize>> {
    factorize_symbolic_cholesky(
        lower.symbolic(),
        Side::Lower,
        SymmetricOrdering::Amd,
        CholeskySymbolicParams::default(),
    )
    .map_err(|e| Error::InvalidArgument(format!("symbolic factorization failed: {e:?}")))
}

impl SparseLdl {
    /// Number of stored factor entries the factorization of `a` would need.
    pub fn predicted_entries(a: &CsrMatrix) -> Result<usize> {
        Ok(analyse(&lower_triangle(a)?)?.len_val())
    }

    /// Factors the symmetric matrix `a` (both triangles stored; the lower one is read).
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let lower = lower_triangle(a)?;
        let symbolic = analyse(&lower)?;
        let mut values = vec![0.0; symbolic.len_val()];
        let par = Par::Seq;
        let params = Default::default();
        let mut mem = MemBuffer::new(symbolic.factorize_numeric_ldlt_scratch::<f64>(par, params));
        symbolic
            .factorize_numeric_ldlt(
                &mut values,
                lower.as_ref(),
                Side::Lower,
                LdltRegularization::default(),
                par,
                MemStack::new(&mut mem),
                params,
            )
            .map_err(|_| Error::Singular)?;
        let d = factor_diagonal(&symbolic, &values, n);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        if let Some((pivot, &value)) = d.iter().enumerate().find(|(_, v)| !(v.abs() > 1e-14 * scale)) {
            return Err(Error::NotPositiveDefinite { pivot, value });
        }
        Ok(Self { n, symbolic, values, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(positive, negative)` pivot counts.
    pub fn inertia(&self) -> (usize, usize) {
        let pos = self.d.iter().filter(|&&v| v > 0.0).count();
        (pos, self.n - pos)
    }

    pub fn factor_entries(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        let par = Par::Seq;
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, par));
        LdltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(&mut x, self.n, 1),
            par,
            MemStack::new(&mut mem),
        );
        x
    }
}

/// Diagonal of `D` in factor order.
fn factor_diagonal(symbolic: &SymbolicCholesky<usize>, values: &[f64], n: usize) -> Vec<f64> {
    match symbolic.raw() {
        SymbolicCholeskyRaw::Simplicial(s) => {
            // Each column stores its diagonal entry first.
            s.col_ptr()[..n].iter().map(|&p| values[p]).collect()
        }
        SymbolicCholeskyRaw::Supernodal(s) => {
            let f = SupernodalLdltRef::new(s, values);
            let mut d = Vec::with_capacity(n);
            for k in 0..s.n_supernodes() {
                let m = f.supernode(k).val();
                d.extend((0..m.ncols()).map(|j| m[(j, j)]));
            }
            d
        }
    }
}
