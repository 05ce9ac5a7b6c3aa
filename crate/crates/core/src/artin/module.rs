use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::algebra::{ArtinAlgebra, BaseField};
use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Finite-dimensional module: `action[g]` is the matrix of basis element `e_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModule {
    pub algebra: ArtinAlgebra,
    pub rank: usize,
    pub action: Vec<Matrix>,
}

impl FiniteModule {
    /// Checks that the action is a unital representation: `ρ(e₀) = I` and
    /// `ρ(e_i)ρ(e_j) = Σ_k c_{ij}^k ρ(e_k)`.
    pub fn new(algebra: ArtinAlgebra, action: Vec<Matrix>) -> Result<Self> {
        let d = algebra.dim();
        if action.len() != d {
            return Err(Error::Algebra(format!("need {d} action matrices, got {}", action.len())));
        }
        let rank = action[0].rows;
        if action.iter().any(|m| m.rows != rank || m.cols != rank) {
            return Err(Error::Algebra("action matrices must all be square of the module rank".into()));
        }
        if algebra.base() == BaseField::Real && action.iter().any(|m| m.data.iter().any(|v| !v.is_real())) {
            return Err(Error::Algebra("a module over a real algebra has real action matrices".into()));
        }
        if action[0] != Matrix::identity(rank) {
            return Err(Error::Algebra("e0 must act as the identity".into()));
        }
        for i in 1..d {
            for j in i..d {
                let lhs = action[i].mul(&action[j]);
                let rhs = (0..d)
                    .filter(|&k| !algebra.c(i, j, k).is_zero())
                    .fold(Matrix::zeros(rank, rank), |acc, k| acc.add(&action[k].scale(algebra.c(i, j, k))));
                if lhs != rhs {
                    return Err(Error::Algebra(format!("action does not respect e{i}·e{j}")));
                }
            }
        }
        Ok(Self { algebra, rank, action })
    }

    /// Module over `A_k = k[t]/(t^{k+1})` from the action of `t`, which must satisfy `T^{k+1} = 0`.
    pub fn from_t_action(k: usize, base: BaseField, t: Matrix) -> Result<Self> {
        if t.rows != t.cols {
            return Err(Error::Algebra("the t-action must be square".into()));
        }
        if !t.pow(k + 1).is_zero() {
            return Err(Error::Algebra(format!("t^{} must act as zero", k + 1)));
        }
        let action = (0..=k).map(|j| t.pow(j)).collect();
        Self::new(ArtinAlgebra::truncated_poly(k, base), action)
    }

    /// `A` as a module over itself.
    pub fn regular(algebra: &ArtinAlgebra) -> Self {
        let action = (0..algebra.dim()).map(|g| algebra.left_mult(&algebra.basis(g))).collect();
        Self::new(algebra.clone(), action).expect("the regular representation is a module")
    }
}

fn vectorize(m: &Matrix) -> Vec<Scalar> {
    m.data.clone()
}

fn unvectorize(rows: usize, cols: usize, v: &[Scalar]) -> Matrix {
    Matrix {
        rows,
        cols,
        data: v.to_vec(),
    }
}

/// Basis of `Hom_A(M, N)`: matrices `Φ` (`rank N × rank M`) with `Φρ_M(g) = ρ_N(g)Φ` for all
/// `g`, found as the null space of the stacked linear constraints.
pub fn hom_space(m: &FiniteModule, n: &FiniteModule) -> Result<Vec<Matrix>> {
    if m.algebra != n.algebra {
        return Err(Error::Algebra("modules over different algebras".into()));
    }
    let (rm, rn) = (m.rank, n.rank);
    let unknowns = rn * rm;
    let gens = m.algebra.dim() - 1;
    let mut sys = Matrix::zeros(gens * rn * rm, unknowns);
    for g in 1..=gens {
        let (am, an) = (&m.action[g], &n.action[g]);
        for i in 0..rn {
            for j in 0..rm {
                let row = ((g - 1) * rn + i) * rm + j;
                for c in 0..rm {
                    let v = am.get(c, j);
                    if !v.is_zero() {
                        let cur = sys.get(row, i * rm + c) + v;
                        sys.set(row, i * rm + c, cur);
                    }
                }
                for r in 0..rn {
                    let v = an.get(i, r);
                    if !v.is_zero() {
                        let cur = sys.get(row, r * rm + j) - v;
                        sys.set(row, r * rm + j, cur);
                    }
                }
            }
        }
    }
    Ok(sys.nullspace().iter().map(|v| unvectorize(rn, rm, v)).collect())
}

/// `A`-linear map given by its matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    pub matrix: Matrix,
}

impl ModuleHom {
    pub fn new(m: &FiniteModule, n: &FiniteModule, matrix: Matrix) -> Result<Self> {
        if matrix.rows != n.rank || matrix.cols != m.rank {
            return Err(Error::Algebra("module map has the wrong shape".into()));
        }
        for g in 1..m.algebra.dim() {
            if matrix.mul(&m.action[g]) != n.action[g].mul(&matrix) {
                return Err(Error::Algebra(format!("map does not commute with e{g}")));
            }
        }
        Ok(Self { matrix })
    }
}

/// `M* = Hom_A(M, A)` with the basis of maps it was computed in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    pub module: FiniteModule,
    /// Maps `M → A` (`dim A × rank M`), a basis of `M*`.
    pub basis: Vec<Matrix>,
}

impl Dual {
    /// Coordinates of a map `M → A` in the dual basis.
    pub fn coordinates(&self, phi: &Matrix) -> Option<Vec<Scalar>> {
        let cols: Vec<Vec<Scalar>> = self.basis.iter().map(vectorize).collect();
        let target = vectorize(phi);
        let m = Matrix::from_columns(target.len(), &cols);
        m.solve(&target).filter(|x| m.apply(x) == target)
    }
}

/// `Hom_A(M, A)` with `(a·φ)(m) = a·φ(m)`.
pub fn module_dual(m: &FiniteModule) -> Result<Dual> {
    let a = &m.algebra;
    let basis = hom_space(m, &FiniteModule::regular(a))?;
    let s = basis.len();
    let mut action = Vec::with_capacity(a.dim());
    let probe = Dual {
        module: FiniteModule {
            algebra: a.clone(),
            rank: s,
            action: Vec::new(),
        },
        basis: basis.clone(),
    };
    for g in 0..a.dim() {
        let lg = a.left_mult(&a.basis(g));
        let cols = basis
            .iter()
            .map(|phi| {
                probe
                    .coordinates(&lg.mul(phi))
                    .ok_or_else(|| Error::Algebra("Hom_A(M, A) is not closed under the action".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        action.push(Matrix::from_columns(s, &cols));
    }
    Ok(Dual {
        module: FiniteModule::new(a.clone(), action)?,
        basis,
    })
}

/// `f*: N* → M*`, `φ ↦ φ ∘ f`, in the given dual bases.
pub fn dual_map(f: &ModuleHom, dual_m: &Dual, dual_n: &Dual) -> Result<Matrix> {
    let cols = dual_n
        .basis
        .iter()
        .map(|phi| {
            dual_m
                .coordinates(&phi.mul(&f.matrix))
                .ok_or_else(|| Error::Algebra("pulled-back map is not in M*".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(dual_m.basis.len(), &cols))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexivityReport {
    pub rank: usize,
    pub dual_rank: usize,
    pub double_dual_rank: usize,
    pub evaluation_rank: usize,
    /// The evaluation map commutes with the action.
    pub a_linear: bool,
    pub reflexive: bool,
}

/// Builds `ev: M → M**`, `m ↦ (φ ↦ φ(m))`, and checks that it is an `A`-linear bijection.
pub fn reflexivity_check(m: &FiniteModule) -> Result<ReflexivityReport> {
    let a = &m.algebra;
    let d1 = module_dual(m)?;
    let d2 = module_dual(&d1.module)?;
    let s = d1.basis.len();
    let mut cols = Vec::with_capacity(m.rank);
    for j in 0..m.rank {
        // ev(e_j) sends the dual basis vector φ_u to φ_u(e_j) ∈ A.
        let ev = Matrix::from_fn(a.dim(), s, |i, u| d1.basis[u].get(i, j).clone());
        cols.push(
            d2.coordinates(&ev)
                .ok_or_else(|| Error::Algebra("evaluation is not an element of M**".into()))?,
        );
    }
    let evm = Matrix::from_columns(d2.basis.len(), &cols);
    let a_linear = (1..a.dim()).all(|g| evm.mul(&m.action[g]) == d2.module.action[g].mul(&evm));
    let evaluation_rank = evm.rank();
    Ok(ReflexivityReport {
        rank: m.rank,
        dual_rank: s,
        double_dual_rank: d2.basis.len(),
        evaluation_rank,
        a_linear,
        reflexive: a_linear && d2.basis.len() == m.rank && evaluation_rank == m.rank,
    })
}

/// Random module over `A_k` of the given rank: a nilpotent Jordan matrix with blocks of size at
/// most `k + 1`, conjugated by a random unipotent integer matrix.
pub fn random_module(k: usize, rank: usize, base: BaseField, rng: &mut impl Rng) -> Result<FiniteModule> {
    if rank == 0 {
        return Err(Error::Algebra("rank must be positive".into()));
    }
    let mut j = Matrix::zeros(rank, rank);
    let mut start = 0;
    while start < rank {
        let size = rng.gen_range(1..=(k + 1).min(rank - start));
        for i in start..start + size - 1 {
            j.set(i, i + 1, Scalar::one());
        }
        start += size;
    }
    let mut u = Matrix::identity(rank);
    for r in 0..rank {
        for c in r + 1..rank {
            u.set(r, c, Scalar::int(rng.gen_range(-2..=2)));
        }
    }
    let u_inv = u.inverse().expect("unipotent matrices are invertible");
    FiniteModule::from_t_action(k, base, u.mul(&j).mul(&u_inv))
}

/// A random element of `Hom_A(M, N)` with small integer coordinates.
pub fn random_hom(m: &FiniteModule, n: &FiniteModule, rng: &mut impl Rng) -> Result<ModuleHom> {
    let basis = hom_space(m, n)?;
    let matrix = basis
        .iter()
        .fold(Matrix::zeros(n.rank, m.rank), |acc, b| acc.add(&b.scale(&Scalar::int(rng.gen_range(-3..=3)))));
    ModuleHom::new(m, n, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const C: BaseField = BaseField::Complex;

    #[test]
    fn free_module_is_self_dual_and_reflexive() {
        for k in 0..=3 {
            let a = ArtinAlgebra::truncated_poly(k, C);
            let m = FiniteModule::regular(&a);
            let d = module_dual(&m).unwrap();
            assert_eq!(d.basis.len(), k + 1);
            let r = reflexivity_check(&m).unwrap();
            assert!(r.reflexive, "{r:?}");
        }
    }

    #[test]
    fn residue_field_module() {
        let m = FiniteModule::from_t_action(1, C, Matrix::zeros(1, 1)).unwrap();
        let d = module_dual(&m).unwrap();
        assert_eq!(d.basis.len(), 1);
        // The single map lands in the socle span(t).
        assert!(d.basis[0].get(0, 0).is_zero() && !d.basis[0].get(1, 0).is_zero());
        assert!(d.module.action[1].is_zero());
        assert!(reflexivity_check(&m).unwrap().reflexive);
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let t = Matrix::from_fn(2, 2, |i, j| if j == i + 1 { Scalar::one() } else { Scalar::zero() });
        assert!(FiniteModule::from_t_action(0, C, t.clone()).is_err());
        assert!(FiniteModule::from_t_action(1, C, t).is_ok());
        let a = ArtinAlgebra::truncated_poly(1, C);
        assert!(FiniteModule::new(a, vec![Matrix::identity(2), Matrix::identity(2)]).is_err());
    }

    #[test]
    fn random_modules_are_reflexive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let k = rng.gen_range(1..=4);
            let rank = rng.gen_range(1..=8);
            let m = random_module(k, rank, C, &mut rng).unwrap();
            assert!(reflexivity_check(&m).unwrap().reflexive);
        }
    }

    #[test]
    fn duality_is_contravariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let k = rng.gen_range(1..=3);
            let mods: Vec<FiniteModule> = (0..3).map(|_| random_module(k, rng.gen_range(1..=5), C, &mut rng).unwrap()).collect();
            let f = random_hom(&mods[0], &mods[1], &mut rng).unwrap();
            let g = random_hom(&mods[1], &mods[2], &mut rng).unwrap();
            let gf = ModuleHom::new(&mods[0], &mods[2], g.matrix.mul(&f.matrix)).unwrap();
            let duals: Vec<Dual> = mods.iter().map(|m| module_dual(m).unwrap()).collect();
            let lhs = dual_map(&gf, &duals[0], &duals[2]).unwrap();
            let rhs = dual_map(&f, &duals[0], &duals[1]).unwrap().mul(&dual_map(&g, &duals[1], &duals[2]).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}
