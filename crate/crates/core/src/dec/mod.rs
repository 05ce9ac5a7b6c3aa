//! Discrete exterior calculus on a link: Whitney mass matrices, coboundaries, codifferentials,
//! Hodge Laplacian pencils and their spectra.

mod eigen;
mod pencil;
pub(crate) mod whitney;

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, CsrMatrix, SparseLdl};
use crate::mesh::SimplicialComplex;
use whitney::{element_geometry, simplex_volume, subsets, whitney_local_mass};

pub use eigen::{
    count_near_zero, eigensolve, EigenOptions, NearZeroCount, NearZeroOptions, SolverInfo, SolverMethod,
    SpectrumSlice,
};
pub use pencil::{Correction, Pencil};

/// Choice of discrete Hodge star.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HodgeStar {
    /// Galerkin inner product of lowest-order Whitney forms.
    #[default]
    Whitney,
    /// Diagonal star: each top simplex's volume is shared equally among its k-faces and
    /// divided by the squared k-volume of the face. Exact in top degree, first-order
    /// consistent only on near-uniform meshes.
    Lumped,
}

/// Mass matrices and coboundaries of a link.
#[derive(Debug)]
pub struct DiscreteHodge {
    complex: Arc<SimplicialComplex>,
    star: HodgeStar,
    mass: Vec<CsrMatrix>,
    d: Vec<CsrMatrix>,
    mass_factor: Vec<OnceLock<SparseLdl>>,
}

/// Relative volume below which a simplex counts as degenerate.
const DEGENERACY: f64 = 1e-14;

impl DiscreteHodge {
    /// Assembles all mass matrices and coboundaries. Every element mass matrix is checked to
    /// be positive definite, which makes each global mass matrix positive definite.
    pub fn build(complex: Arc<SimplicialComplex>, star: HodgeStar) -> Result<Self> {
        let n = complex.dim();
        complex.coordinates().ok_or(Error::MissingCoordinates)?;
        let tops = complex.simplices(n);
        let locals: Vec<Vec<(usize, usize, f64)>> = {
            let faces: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n + 1, k + 1)).collect();
            let per_element: Vec<Result<Vec<Vec<(usize, usize, f64)>>>> = tops
                .par_iter()
                .enumerate()
                .map(|(index, t)| {
                    let edges = complex.edge_vectors(t)?;
                    let scale = edges
                        .iter()
                        .map(|e| e.iter().map(|x| x * x).sum::<f64>().sqrt())
                        .fold(0.0, f64::max);
                    let vol = simplex_volume(&edges);
                    let degenerate = Error::DegenerateSimplex {
                        index,
                        simplex: t.clone(),
                        volume: vol,
                    };
                    if !(vol > DEGENERACY * scale.powi(n as i32)) {
                        return Err(degenerate);
                    }
                    let geom = element_geometry(&edges).ok_or(degenerate)?;
                    let mut out = Vec::with_capacity(n + 1);
                    for (k, fk) in faces.iter().enumerate() {
                        let ids: Vec<usize> = fk
                            .iter()
                            .map(|f| {
                                let g: Vec<usize> = f.iter().map(|&i| t[i]).collect();
                                complex.simplex_index(k, &g).expect("face of a top simplex")
                            })
                            .collect();
                        let mut trip = Vec::new();
                        match star {
                            HodgeStar::Whitney => {
                                let m = whitney_local_mass(k, &geom);
                                if m.clone().cholesky().is_none() {
                                    return Err(Error::DegenerateSimplex {
                                        index,
                                        simplex: t.clone(),
                                        volume: vol,
                                    });
                                }
                                for (a, &ia) in ids.iter().enumerate() {
                                    for (b, &ib) in ids.iter().enumerate() {
                                        trip.push((ia, ib, m[(a, b)]));
                                    }
                                }
                            }
                            HodgeStar::Lumped => {
                                let share = vol / fk.len() as f64;
                                for (f, &id) in fk.iter().zip(&ids) {
                                    let fe: Vec<Vec<f64>> = edges_of_face(&edges, f);
                                    let fv = simplex_volume(&fe);
                                    trip.push((id, id, share / (fv * fv)));
                                }
                            }
                        }
                        out.push(trip);
                    }
                    Ok(out)
                })
                .collect();
            let mut by_degree: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n + 1];
            for r in per_element {
                for (k, t) in r?.into_iter().enumerate() {
                    by_degree[k].extend(t);
                }
            }
            by_degree
        };
        let mass: Vec<CsrMatrix> = locals
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let m = complex.count(k);
                let raw = CsrMatrix::from_triplets(m, m, t);
                // Exact symmetrization removes assembly round-off asymmetry.
                raw.add(0.5, &raw.transpose(), 0.5)
            })
            .collect();
        let d: Vec<CsrMatrix> = (0..n).map(|k| complex.coboundary(k)).collect::<Result<_>>()?;
        Ok(Self {
            complex,
            star,
            mass,
            d,
            mass_factor: (0..=n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> Arc<SimplicialComplex> {
        Arc::clone(&self.complex)
    }

    pub fn star(&self) -> HodgeStar {
        self.star
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// Number of k-cochain unknowns (zero outside `0..=dim`).
    pub fn size(&self, k: usize) -> usize {
        self.complex.count(k)
    }

    pub fn mass(&self, k: usize) -> &CsrMatrix {
        &self.mass[k]
    }

    /// Coboundary `d_k` from k- to (k+1)-cochains.
    pub fn coboundary(&self, k: usize) -> &CsrMatrix {
        &self.d[k]
    }

    fn mass_solver(&self, k: usize) -> Result<&SparseLdl> {
        if let Some(f) = self.mass_factor[k].get() {
            return Ok(f);
        }
        let f = SparseLdl::factor(&self.mass[k])?;
        Ok(self.mass_factor[k].get_or_init(|| f))
    }

    /// Solves `M_k x = b`.
    pub fn solve_mass(&self, k: usize, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.mass_solver(k)?.solve(b))
    }

    /// `d x` for a k-cochain; the zero (k+1)-cochain when `k = dim`.
    pub fn d(&self, k: usize, x: &[f64]) -> Vec<f64> {
        if k >= self.dim() {
            return Vec::new();
        }
        self.d[k].mul_vec(x)
    }

    /// Codifferential `δ x = M_{k−1}⁻¹ d_{k−1}ᵀ M_k x`; empty for `k = 0`.
    pub fn codifferential(&self, k: usize, x: &[f64]) -> Result<Vec<f64>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let y = self.d[k - 1].tr_mul_vec(&self.mass[k].mul_vec(x));
        self.solve_mass(k - 1, &y)
    }

    /// `Δ x = dδx + δdx` on k-cochains.
    pub fn laplacian_apply(&self, k: usize, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        if k < self.dim() {
            let up = self.codifferential(k + 1, &self.d(k, x))?;
            out.iter_mut().zip(&up).for_each(|(a, b)| *a += b);
        }
        if k > 0 {
            let down = self.d(k - 1, &self.codifferential(k, x)?);
            out.iter_mut().zip(&down).for_each(|(a, b)| *a += b);
        }
        Ok(out)
    }

    /// Mass inner product on k-cochains.
    pub fn inner(&self, k: usize, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mass[k].mul_vec(y))
    }

    pub fn norm(&self, k: usize, x: &[f64]) -> f64 {
        self.inner(k, x, x).max(0.0).sqrt()
    }

    /// The Hodge Laplacian pencil on p-cochains:
    /// `A_p = d_pᵀ M_{p+1} d_p + M_p d_{p−1} M_{p−1}⁻¹ d_{p−1}ᵀ M_p`, mass `M_p`.
    pub fn laplacian(&self, p: usize) -> Result<Pencil> {
        let n = self.dim();
        if p > n {
            return Err(Error::DegreeOutOfRange { degree: p, max: n });
        }
        let size = self.size(p);
        let stiffness = if p < n {
            let dp = &self.d[p];
            dp.transpose().matmul(&self.mass[p + 1]).matmul(dp)
        } else {
            CsrMatrix::zeros(size, size)
        };
        let mut corrections = Vec::new();
        if p > 0 {
            let coupling = self.mass[p].matmul(&self.d[p - 1]);
            corrections.push(Correction::new(coupling, self.mass[p - 1].clone()));
        }
        Ok(Pencil::new(p, stiffness, self.mass[p].clone(), corrections).with_lower_bound(0.0))
    }
}

fn edges_of_face(edges: &[Vec<f64>], face: &[usize]) -> Vec<Vec<f64>> {
    // `edges[i]` is v_{i+1} − v_0; a face's edge vectors are differences against its first vertex.
    let pos = |i: usize| -> Vec<f64> {
        if i == 0 {
            vec![0.0; edges[0].len()]
        } else {
            edges[i - 1].clone()
        }
    };
    let base = pos(face[0]);
    face[1..]
        .iter()
        .map(|&i| pos(i).iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators::{flat_torus, sphere_boundary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn equilateral_tetrahedron_boundary_mass_is_spd() {
        let s = sphere_boundary(2).unwrap();
        // Rescale to unit edge length.
        let c = s.coordinates().unwrap();
        let e: f64 = c[0].iter().zip(&c[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let h = DiscreteHodge::build(Arc::new(s.scaled(1.0 / e)), HodgeStar::Whitney).unwrap();
        let m0 = h.mass(0).to_dense();
        assert_eq!(m0.nrows(), 4);
        assert!(m0.clone().cholesky().is_some());
        assert!(h.mass(0).symmetry_defect() == 0.0);
    }

    #[test]
    fn coboundaries_compose_to_zero_on_torus() {
        let t = Arc::new(flat_torus(3, 4, 1.0).unwrap());
        let h = DiscreteHodge::build(t, HodgeStar::Whitney).unwrap();
        for k in 0..2 {
            let dd = h.coboundary(k + 1).matmul(h.coboundary(k));
            assert_eq!(dd.nnz(), 0);
        }
    }

    #[test]
    fn codifferential_is_mass_adjoint() {
        let t = Arc::new(flat_torus(3, 3, 2.0).unwrap());
        let h = DiscreteHodge::build(t, HodgeStar::Whitney).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..3 {
            let phi = random(h.size(k), &mut rng);
            let psi = random(h.size(k + 1), &mut rng);
            let lhs = h.inner(k + 1, &h.d(k, &phi), &psi);
            let rhs = h.inner(k, &phi, &h.codifferential(k + 1, &psi).unwrap());
            assert!((lhs - rhs).abs() <= 1e-10 * h.norm(k, &phi) * h.norm(k + 1, &psi), "k = {k}");
        }
    }

    #[test]
    fn total_volume_from_top_mass() {
        // Σ over tops of |T| recovers the torus volume.
        let t = Arc::new(flat_torus(2, 5, 3.0).unwrap());
        let h = DiscreteHodge::build(t, HodgeStar::Whitney).unwrap();
        let ones = vec![1.0; h.size(0)];
        let vol = h.inner(0, &ones, &ones);
        assert!((vol - 9.0).abs() < 1e-12);
    }

    #[test]
    fn lumped_star_is_diagonal_and_exact_on_top_forms() {
        let t = Arc::new(flat_torus(2, 4, 1.0).unwrap());
        let w = DiscreteHodge::build(Arc::clone(&t), HodgeStar::Whitney).unwrap();
        let l = DiscreteHodge::build(t, HodgeStar::Lumped).unwrap();
        assert_eq!(l.mass(1).nnz(), l.size(1));
        let top_w = w.mass(2).diagonal();
        let top_l = l.mass(2).diagonal();
        for (a, b) in top_w.iter().zip(&top_l) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_coordinates_rejected() {
        let tops = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        let s = SimplicialComplex::from_top_simplices(2, 4, &tops, None, None).unwrap();
        assert!(matches!(DiscreteHodge::build(Arc::new(s), HodgeStar::Whitney), Err(Error::MissingCoordinates)));
    }

    #[test]
    fn collapsed_simplex_rejected() {
        let mut coords = sphere_boundary(2).unwrap().coordinates().unwrap().to_vec();
        coords[3] = coords[2].clone();
        let tops = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        let s = SimplicialComplex::from_top_simplices(2, 4, &tops, Some(coords), None).unwrap();
        assert!(matches!(
            DiscreteHodge::build(Arc::new(s), HodgeStar::Whitney),
            Err(Error::DegenerateSimplex { .. })
        ));
    }
}
