//! Generalized symmetric eigensolvers for [`Pencil`]s: dense reference path, block shift-invert
//! Lanczos with thick restarts, and LOBPCG when a factorization would not fit in memory.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Scale, Side};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pencil::Pencil;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, CsrMatrix, SparseLdl};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Dense below `dense_limit`, shift-invert Lanczos when the factor fits `memory_cap`,
    /// LOBPCG otherwise.
    #[default]
    Auto,
    Dense,
    ShiftInvertLanczos,
    Lobpcg,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EigenOptions {
    /// Relative residual tolerance: `‖Aφ − λMφ‖_{M⁻¹} ≤ tol·(1+|λ|)`.
    pub tol: f64,
    pub method: SolverMethod,
    pub dense_limit: usize,
    pub block_size: usize,
    pub max_iterations: usize,
    /// Largest Krylov basis before a thick restart; 0 picks a size from the mode count.
    pub max_basis: usize,
    /// Largest admissible number of stored factor entries.
    pub memory_cap: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            method: SolverMethod::Auto,
            dense_limit: 1600,
            block_size: 4,
            max_iterations: 500,
            max_basis: 0,
            memory_cap: 80_000_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct SolverInfo {
    pub method: SolverMethod,
    pub tolerance: f64,
    pub iterations: usize,
    /// Spectral shift `σ` (the factorized matrix is `A − σM`).
    pub shift: Option<f64>,
    pub basis_size: usize,
    pub factor_entries: usize,
}

/// The lowest eigenpairs of a pencil, ascending, with `M`-orthonormal eigenvectors.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct SpectrumSlice {
    pub degree: usize,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub solver: SolverInfo,
}

impl SpectrumSlice {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// The `k` smallest eigenpairs of `A φ = λ M φ`.
pub fn eigensolve(pencil: &Pencil, k: usize, opts: &EigenOptions) -> Result<SpectrumSlice> {
    let n = pencil.dim();
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("{k} modes requested from a pencil of size {n}")));
    }
    if k == 0 {
        return Ok(SpectrumSlice {
            degree: pencil.degree,
            solver: SolverInfo {
                method: opts.method,
                tolerance: opts.tol,
                ..Default::default()
            },
            ..Default::default()
        });
    }
    let method = match opts.method {
        SolverMethod::Auto if n <= opts.dense_limit => SolverMethod::Dense,
        SolverMethod::Auto => {
            let predicted = SparseLdl::predicted_entries(&pencil.augmented(1.0))?;
            if predicted <= opts.memory_cap {
                SolverMethod::ShiftInvertLanczos
            } else {
                SolverMethod::Lobpcg
            }
        }
        m => m,
    };
    match method {
        SolverMethod::Dense => dense(pencil, k, opts),
        SolverMethod::ShiftInvertLanczos => lanczos(pencil, k, opts),
        SolverMethod::Lobpcg => lobpcg(pencil, k, opts),
        SolverMethod::Auto => unreachable!(),
    }
}

fn dense(pencil: &Pencil, k: usize, opts: &EigenOptions) -> Result<SpectrumSlice> {
    let n = pencil.dim();
    let (a, m) = pencil.to_dense()?;
    let a = Mat::from_fn(n, n, |i, j| a[(i, j)]);
    let m = Mat::from_fn(n, n, |i, j| m[(i, j)]);
    let llt = m.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite { pivot: 0, value: f64::NAN })?;
    let l = llt.L();
    // C = L⁻¹ A L⁻ᵀ.
    let mut c = a.clone();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let mut c = c.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = c.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence {
        iterations: 1,
        converged: 0,
        wanted: k,
        partial: Box::default(),
    })?;
    let (s, u) = (eig.S().column_vector(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let lambda = s[i];
        let mut phi = u.col(i).to_owned();
        solve_upper_triangular_in_place(l.transpose(), phi.as_mat_mut(), Par::Seq);
        let mut r = &a * &phi - (&m * &phi) * Scale(lambda);
        solve_lower_triangular_in_place(l, r.as_mat_mut(), Par::Seq);
        values.push(lambda);
        residuals.push(r.norm_l2());
        vectors.push((0..n).map(|j| phi[j]).collect());
    }
    Ok(SpectrumSlice {
        degree: pencil.degree,
        eigenvalues: values,
        eigenvectors: vectors,
        residuals,
        solver: SolverInfo {
            method: SolverMethod::Dense,
            tolerance: opts.tol,
            iterations: 1,
            shift: None,
            basis_size: pencil.dim(),
            factor_entries: pencil.dim() * (pencil.dim() + 1) / 2,
        },
    })
}

/// `M`-orthonormal basis with cached products.
struct Basis {
    v: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
}

impl Basis {
    fn new() -> Self {
        Self {
            v: Vec::new(),
            mv: Vec::new(),
            av: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.v.len()
    }

    /// Orthogonalizes `w` against the basis (two passes) and appends it; returns `false` when
    /// `w` is numerically dependent.
    fn push(&mut self, mut w: Vec<f64>, pencil: &Pencil) -> Result<bool> {
        let before = dot(&w, &pencil.mass.mul_vec(&w)).max(0.0).sqrt();
        if before == 0.0 {
            return Ok(false);
        }
        for _ in 0..2 {
            for (v, mv) in self.v.iter().zip(&self.mv) {
                let c = dot(mv, &w);
                axpy(-c, v, &mut w);
            }
        }
        let mw = pencil.mass.mul_vec(&w);
        let after = dot(&w, &mw).max(0.0).sqrt();
        if after <= 1e-10 * before {
            return Ok(false);
        }
        let inv = 1.0 / after;
        w.iter_mut().for_each(|x| *x *= inv);
        let mw: Vec<f64> = mw.into_iter().map(|x| x * inv).collect();
        let aw = pencil.apply(&w)?;
        self.v.push(w);
        self.mv.push(mw);
        self.av.push(aw);
        Ok(true)
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let x = 0.5 * (dot(&self.v[i], &self.av[j]) + dot(&self.v[j], &self.av[i]));
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
        h
    }

    fn combine(vectors: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; vectors[0].len()];
        for (v, &c) in vectors.iter().zip(coeffs) {
            if c != 0.0 {
                axpy(c, v, &mut out);
            }
        }
        out
    }
}

struct Ritz {
    values: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

fn rayleigh_ritz(basis: &Basis) -> Ritz {
    let eig = SymmetricEigen::new(basis.projected());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    Ritz {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        coeffs: order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect(),
    }
}

/// Residual norms `‖Aφ − θMφ‖_{M⁻¹}` of the first `count` Ritz pairs.
fn ritz_residuals(
    basis: &Basis,
    ritz: &Ritz,
    count: usize,
    mass_solve: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let ax = Basis::combine(&basis.av, &ritz.coeffs[i]);
            let mx = Basis::combine(&basis.mv, &ritz.coeffs[i]);
            let mut r = ax;
            axpy(-ritz.values[i], &mx, &mut r);
            let z = mass_solve(&r);
            dot(&r, &z).max(0.0).sqrt()
        })
        .collect()
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Factors `A + τM` through the augmented system. With a known lower bound `λ₀` the shift is
/// `τ = −λ₀ + 10⁻³·scale`. Otherwise `τ` grows geometrically from `10⁻³·scale` until the
/// Schur complement is positive definite, then a few bisection steps pull it back towards the
/// bottom of the spectrum.
fn shifted_factor(pencil: &Pencil) -> Result<(SparseLdl, f64)> {
    let n = pencil.dim();
    let scale = pencil.trace_scale().max(1e-300);
    let margin = 1e-3 * scale;
    let try_tau = |tau: f64| -> Option<SparseLdl> {
        SparseLdl::factor(&pencil.augmented(tau)).ok().filter(|f| f.inertia().0 == n)
    };
    let start = pencil.lower_bound.map_or(margin, |b| (margin - b).max(margin));
    if let Some(f) = try_tau(start) {
        return Ok((f, start));
    }
    let mut lo = start;
    let mut hi = None;
    let mut tau = start;
    for _ in 0..60 {
        tau = 2.0 * tau + margin;
        if let Some(f) = try_tau(tau) {
            hi = Some((tau, f));
            break;
        }
        lo = tau;
    }
    let (mut hi_tau, mut best) =
        hi.ok_or_else(|| Error::InvalidArgument("could not find a shift making A + τM positive definite".into()))?;
    for _ in 0..6 {
        if hi_tau - lo <= margin {
            break;
        }
        let mid = 0.5 * (lo + hi_tau);
        match try_tau(mid) {
            Some(f) => {
                hi_tau = mid;
                best = f;
            }
            None => lo = mid,
        }
    }
    Ok((best, hi_tau))
}

fn lanczos(pencil: &Pencil, k: usize, opts: &EigenOptions) -> Result<SpectrumSlice> {
    let n = pencil.dim();
    let (factor, tau) = shifted_factor(pencil)?;
    let mass = SparseLdl::factor(&pencil.mass)?;
    let mass_solve = |r: &[f64]| mass.solve(r);
    let total = factor.dim();
    let apply_t = |x: &[f64]| -> Vec<f64> {
        let mut rhs = vec![0.0; total];
        rhs[..n].copy_from_slice(&pencil.mass.mul_vec(x));
        let mut y = factor.solve(&rhs);
        y.truncate(n);
        y
    };
    let b = opts.block_size.clamp(1, n);
    let max_basis = if opts.max_basis > 0 {
        opts.max_basis
    } else {
        (3 * k + 12 * b).max(k + 4 * b).max(60)
    }
    .min(n);
    let keep = (k + b).min(max_basis.saturating_sub(b)).max(k.min(max_basis));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis::new();
    let mut last: Vec<Vec<f64>> = Vec::new();
    while last.len() < b && basis.len() < n {
        let w = random_vector(n, &mut rng);
        if basis.push(w, pencil)? {
            last.push(basis.v.last().unwrap().clone());
        }
    }
    let mut best: Option<(Ritz, Vec<f64>)> = None;
    for iter in 0..opts.max_iterations {
        if basis.len() >= k {
            let ritz = rayleigh_ritz(&basis);
            let res = ritz_residuals(&basis, &ritz, k, &mass_solve);
            let done = (0..k).all(|i| res[i] <= opts.tol * (1.0 + ritz.values[i].abs())) || basis.len() == n;
            if done {
                return Ok(finish(pencil, &basis, &ritz, res, k, opts, iter, Some(-tau), factor.factor_entries()));
            }
            if basis.len() + b > max_basis {
                // Thick restart on the lowest Ritz vectors; expand from the unconverged ones.
                let mut next = Basis::new();
                for c in ritz.coeffs.iter().take(keep) {
                    next.v.push(Basis::combine(&basis.v, c));
                    next.mv.push(Basis::combine(&basis.mv, c));
                    next.av.push(Basis::combine(&basis.av, c));
                }
                let unconverged: Vec<usize> = (0..k)
                    .filter(|&i| res[i] > opts.tol * (1.0 + ritz.values[i].abs()))
                    .collect();
                last = unconverged.iter().take(b).map(|&i| next.v[i].clone()).collect();
                basis = next;
            }
            best = Some((ritz, res));
        }
        let mut added = Vec::new();
        for x in &last {
            let w = apply_t(x);
            if basis.push(w, pencil)? {
                added.push(basis.v.last().unwrap().clone());
            }
        }
        while added.len() < b && basis.len() < n && basis.len() < max_basis {
            let w = random_vector(n, &mut rng);
            if basis.push(w, pencil)? {
                added.push(basis.v.last().unwrap().clone());
            }
        }
        last = added;
    }
    let converged = best
        .as_ref()
        .map(|(r, res)| (0..k).filter(|&i| res[i] <= opts.tol * (1.0 + r.values[i].abs())).count())
        .unwrap_or(0);
    let partial = match best {
        Some((ritz, res)) if basis.len() >= k => {
            let ritz_now = rayleigh_ritz(&basis);
            let res_now = ritz_residuals(&basis, &ritz_now, k, &mass_solve);
            let _ = (ritz, res);
            finish(pencil, &basis, &ritz_now, res_now, k, opts, opts.max_iterations, Some(-tau), factor.factor_entries())
        }
        _ => SpectrumSlice::default(),
    };
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        converged,
        wanted: k,
        partial: Box::new(partial),
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    pencil: &Pencil,
    basis: &Basis,
    ritz: &Ritz,
    residuals: Vec<f64>,
    k: usize,
    opts: &EigenOptions,
    iterations: usize,
    shift: Option<f64>,
    factor_entries: usize,
) -> SpectrumSlice {
    SpectrumSlice {
        degree: pencil.degree,
        eigenvalues: ritz.values[..k].to_vec(),
        eigenvectors: (0..k).map(|i| Basis::combine(&basis.v, &ritz.coeffs[i])).collect(),
        residuals,
        solver: SolverInfo {
            method: SolverMethod::ShiftInvertLanczos,
            tolerance: opts.tol,
            iterations,
            shift,
            basis_size: basis.len(),
            factor_entries,
        },
    }
}

/// Jacobi-preconditioned conjugate gradients for an SPD sparse matrix.
fn cg_solve(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let diag = a.diagonal();
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return x;
    }
    for _ in 0..max_iter {
        let ap = a.mul_vec(&p);
        let alpha = rz / dot(&p, &ap);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        if dot(&r, &r).sqrt() <= tol * bnorm {
            break;
        }
        z = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    x
}

/// `M`-orthonormal basis of the span of `s` by two-pass Gram-Schmidt, dropping dependent
/// directions.
fn m_orthonormalize(s: Vec<Vec<f64>>, pencil: &Pencil) -> Result<Basis> {
    let mut basis = Basis::new();
    for v in s {
        basis.push(v, pencil)?;
    }
    Ok(basis)
}

fn lobpcg(pencil: &Pencil, k: usize, opts: &EigenOptions) -> Result<SpectrumSlice> {
    let n = pencil.dim();
    let width = (k + opts.block_size.max(2)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let diag_a: Vec<f64> = {
        let mut d = pencil.stiffness.diagonal();
        for c in &pencil.corrections {
            let inner = c.inner.diagonal();
            for (i, j, v) in c.coupling.triplets() {
                d[i] += v * v / inner[j];
            }
        }
        d
    };
    let diag_m = pencil.mass.diagonal();
    let tau = 1e-3 * pencil.trace_scale().max(1e-300);
    let precond = |r: &[f64]| -> Vec<f64> {
        r.iter()
            .enumerate()
            .map(|(i, x)| x / (diag_a[i].abs() + tau * diag_m[i]))
            .collect()
    };
    let mass_solve = |r: &[f64]| cg_solve(&pencil.mass, r, 1e-12, 500);
    let mut x = m_orthonormalize((0..width).map(|_| random_vector(n, &mut rng)).collect(), pencil)?;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let mut last_res = vec![f64::INFINITY; k];
    for iter in 0..opts.max_iterations {
        let ritz = rayleigh_ritz(&x);
        let cols = ritz.values.len().min(width);
        let mut xs = Basis::new();
        for c in ritz.coeffs.iter().take(cols) {
            xs.v.push(Basis::combine(&x.v, c));
            xs.mv.push(Basis::combine(&x.mv, c));
            xs.av.push(Basis::combine(&x.av, c));
        }
        let values: Vec<f64> = ritz.values[..cols].to_vec();
        let residual_vecs: Vec<Vec<f64>> = (0..cols)
            .map(|i| {
                let mut r = xs.av[i].clone();
                axpy(-values[i], &xs.mv[i], &mut r);
                r
            })
            .collect();
        let res: Vec<f64> = residual_vecs
            .iter()
            .take(k)
            .map(|r| dot(r, &mass_solve(r)).max(0.0).sqrt())
            .collect();
        last_res = res.clone();
        if (0..k.min(cols)).all(|i| res[i] <= opts.tol * (1.0 + values[i].abs())) && cols >= k {
            return Ok(SpectrumSlice {
                degree: pencil.degree,
                eigenvalues: values[..k].to_vec(),
                eigenvectors: xs.v[..k].to_vec(),
                residuals: res,
                solver: SolverInfo {
                    method: SolverMethod::Lobpcg,
                    tolerance: opts.tol,
                    iterations: iter,
                    shift: None,
                    basis_size: width,
                    factor_entries: 0,
                },
            });
        }
        let w: Vec<Vec<f64>> = residual_vecs.iter().map(|r| precond(r)).collect();
        let mut s = xs.v.clone();
        s.extend(w);
        s.extend(dirs.iter().cloned());
        let big = m_orthonormalize(s, pencil)?;
        let rr = rayleigh_ritz(&big);
        let mut next = Basis::new();
        for c in rr.coeffs.iter().take(width) {
            next.v.push(Basis::combine(&big.v, c));
            next.mv.push(Basis::combine(&big.mv, c));
            next.av.push(Basis::combine(&big.av, c));
        }
        // Search directions: new iterates minus their component in the old block.
        dirs = next
            .v
            .iter()
            .map(|v| {
                let mut d = v.clone();
                for (xo, mxo) in xs.v.iter().zip(&xs.mv) {
                    let c = dot(mxo, v);
                    axpy(-c, xo, &mut d);
                }
                d
            })
            .collect();
        x = next;
    }
    let converged = last_res.iter().filter(|&&r| r <= opts.tol).count();
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        converged,
        wanted: k,
        partial: Box::new(SpectrumSlice::default()),
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct NearZeroOptions {
    /// Eigenvalues below `rel_threshold · λ_median` count as zero modes.
    pub rel_threshold: f64,
    /// Minimal ratio `λ_{c}/λ_{c−1}` across the cut for the gap to count as visible.
    pub gap_ratio: f64,
    /// Eigenvalue scale of the operator (for instance [`Pencil::trace_scale`]); guards against
    /// slices made up entirely of zero modes.
    pub reference_scale: Option<f64>,
}

impl Default for NearZeroOptions {
    fn default() -> Self {
        Self {
            rel_threshold: 1e-6,
            gap_ratio: 10.0,
            reference_scale: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NearZeroCount {
    pub count: usize,
    pub threshold: f64,
    /// `λ_count / max(|λ_{count−1}|, tiny)` when both sides of the cut are resolved.
    pub cut_ratio: Option<f64>,
    pub gap_visible: bool,
    pub warning: Option<String>,
}

/// Counts zero modes of a nonnegative spectrum slice.
///
/// The scale is the median of the slice; if the median itself is negligible next to the largest
/// eigenvalue (more than half the slice is zero modes), the largest eigenvalue is used instead,
/// and if even that is negligible next to `reference_scale`, the reference is used.
pub fn count_near_zero(slice: &SpectrumSlice, opts: &NearZeroOptions) -> NearZeroCount {
    let vals = &slice.eigenvalues;
    if vals.is_empty() {
        return NearZeroCount {
            count: 0,
            threshold: 0.0,
            cut_ratio: None,
            gap_visible: false,
            warning: Some("empty spectrum slice".into()),
        };
    }
    let mut sorted: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    let median = sorted[sorted.len() / 2];
    let slice_scale = if median > opts.rel_threshold * max { median } else { max };
    let scale = match opts.reference_scale {
        Some(r) if slice_scale <= opts.rel_threshold * r.abs() => r.abs(),
        _ => slice_scale,
    };
    let threshold = opts.rel_threshold * scale;
    let count = vals.iter().filter(|v| v.abs() < threshold).count();
    let (cut_ratio, gap_visible, warning) = if count == vals.len() {
        (None, false, Some("every resolved mode is below the threshold; request more modes".to_string()))
    } else if count == 0 {
        (None, true, None)
    } else {
        let below = vals[count - 1].abs().max(f64::MIN_POSITIVE);
        let ratio = vals[count] / below;
        let visible = ratio >= opts.gap_ratio;
        let w = (!visible).then(|| format!("no visible spectral gap at the cut (ratio {ratio:.3e})"));
        (Some(ratio), visible, w)
    };
    NearZeroCount {
        count,
        threshold,
        cut_ratio,
        gap_visible,
        warning,
    }
}
