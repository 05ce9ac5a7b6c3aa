//! Element-level geometry and Whitney-form mass matrices.

use nalgebra::DMatrix;

/// Sorted subsets of `{0, …, n−1}` with `size` elements, in lexicographic order.
pub(crate) fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Volume and barycentric-gradient Gram matrix of a simplex.
#[derive(Clone, Debug)]
pub(crate) struct ElementGeometry {
    pub volume: f64,
    /// `C[i][j] = ⟨dλ_i, dλ_j⟩` for the `n+1` barycentric coordinates.
    pub grad_gram: DMatrix<f64>,
}

/// Volume of the simplex spanned by `edges` (rows are `v_i − v_0`).
pub(crate) fn simplex_volume(edges: &[Vec<f64>]) -> f64 {
    let k = edges.len();
    if k == 0 {
        return 1.0;
    }
    let g = gram(edges);
    let det = g.determinant().max(0.0);
    det.sqrt() / factorial(k)
}

fn gram(edges: &[Vec<f64>]) -> DMatrix<f64> {
    let k = edges.len();
    DMatrix::from_fn(k, k, |i, j| edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum())
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Returns `None` when the Gram matrix is singular.
pub(crate) fn element_geometry(edges: &[Vec<f64>]) -> Option<ElementGeometry> {
    let n = edges.len();
    let g = gram(edges);
    let volume = g.determinant().max(0.0).sqrt() / factorial(n);
    let ginv = g.try_inverse()?;
    let mut c = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            c[(i + 1, j + 1)] = ginv[(i, j)];
        }
    }
    for j in 1..=n {
        let s: f64 = (1..=n).map(|i| c[(i, j)]).sum();
        c[(0, j)] = -s;
        c[(j, 0)] = -s;
    }
    c[(0, 0)] = (1..=n).map(|j| -c[(0, j)]).sum();
    Some(ElementGeometry { volume, grad_gram: c })
}

/// Mass matrix of the Whitney k-forms of one n-simplex, indexed by [`subsets`]`(n+1, k+1)`.
///
/// With `W_σ = k! Σ_i (−1)^i λ_{σ_i} dλ_{σ∖σ_i}`, the entries are
/// `(k!)² Σ_{i,j} (−1)^{i+j} ∫λ_{σ_i}λ_{τ_j} · det C[σ∖σ_i, τ∖τ_j]`
/// and `∫_T λ_a λ_b = |T|(1+δ_ab)/((n+1)(n+2))`.
pub(crate) fn whitney_local_mass(k: usize, geom: &ElementGeometry) -> DMatrix<f64> {
    let n = geom.grad_gram.nrows() - 1;
    let faces = subsets(n + 1, k + 1);
    let m = faces.len();
    let kf = factorial(k);
    let denom = ((n + 1) * (n + 2)) as f64;
    let lam = |a: usize, b: usize| geom.volume * if a == b { 2.0 } else { 1.0 } / denom;
    let mut out = DMatrix::zeros(m, m);
    for (s, sigma) in faces.iter().enumerate() {
        for (t, tau) in faces.iter().enumerate().skip(s) {
            let mut acc = 0.0;
            for (i, &si) in sigma.iter().enumerate() {
                let rest_s: Vec<usize> = sigma.iter().copied().filter(|&v| v != si).collect();
                for (j, &tj) in tau.iter().enumerate() {
                    let rest_t: Vec<usize> = tau.iter().copied().filter(|&v| v != tj).collect();
                    let det = if k == 0 {
                        1.0
                    } else {
                        DMatrix::from_fn(k, k, |a, b| geom.grad_gram[(rest_s[a], rest_t[b])]).determinant()
                    };
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * lam(si, tj) * det;
                }
            }
            out[(s, t)] = kf * kf * acc;
            out[(t, s)] = out[(s, t)];
        }
    }
    out
}
