use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Coefficient vector in the basis `e₀ = 1, e₁, …`.
pub type Element = Vec<Scalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseField {
    Real,
    Complex,
}

/// Commutative local algebra of finite dimension with `e₀ = 1` and maximal ideal
/// `𝔪 = span(e₁, …)`, given by structure constants `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraDoc", into = "AlgebraDoc")]
pub struct ArtinAlgebra {
    base: BaseField,
    dim: usize,
    mult: Vec<Scalar>,
    nilpotency: usize,
}

#[derive(Serialize, Deserialize)]
struct AlgebraDoc {
    base: BaseField,
    dim: usize,
    /// `mult[i][j][k] = c_{ij}^k`.
    mult: Vec<Vec<Vec<Scalar>>>,
    #[serde(default)]
    nilpotency_index: Option<usize>,
}

impl TryFrom<AlgebraDoc> for ArtinAlgebra {
    type Error = Error;

    fn try_from(doc: AlgebraDoc) -> Result<Self> {
        let d = doc.dim;
        let shape_ok = doc.mult.len() == d && doc.mult.iter().all(|r| r.len() == d && r.iter().all(|c| c.len() == d));
        if !shape_ok {
            return Err(Error::Algebra(format!("structure constants must be a {d}×{d}×{d} array")));
        }
        let a = ArtinAlgebra::new(doc.base, d, doc.mult.into_iter().flatten().flatten().collect())?;
        if let Some(n) = doc.nilpotency_index {
            if n != a.nilpotency {
                return Err(Error::Algebra(format!("stated nilpotency index {n} differs from the computed {}", a.nilpotency)));
            }
        }
        Ok(a)
    }
}

impl From<ArtinAlgebra> for AlgebraDoc {
    fn from(a: ArtinAlgebra) -> Self {
        let d = a.dim;
        let mult = (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a.c(i, j, k).clone()).collect()).collect()).collect();
        AlgebraDoc {
            base: a.base,
            dim: d,
            mult,
            nilpotency_index: Some(a.nilpotency),
        }
    }
}

fn unit_vector(dim: usize, i: usize) -> Element {
    let mut v = vec![Scalar::zero(); dim];
    v[i] = Scalar::one();
    v
}

/// Basis of the span of `vectors` (rows of the reduced echelon form).
fn span_basis(dim: usize, vectors: &[Element]) -> Vec<Element> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_fn(vectors.len(), dim, |i, j| vectors[i][j].clone());
    let r = m.rref().len();
    (0..r).map(|i| (0..dim).map(|j| m.get(i, j).clone()).collect()).collect()
}

impl ArtinAlgebra {
    /// Validates commutativity, associativity, the unit, that `𝔪` is a nilpotent ideal, and
    /// that all constants are real over `ℝ`.
    pub fn new(base: BaseField, dim: usize, mult: Vec<Scalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Algebra("dimension must be at least 1".into()));
        }
        if mult.len() != dim * dim * dim {
            return Err(Error::Algebra(format!("expected {} structure constants, got {}", dim * dim * dim, mult.len())));
        }
        if base == BaseField::Real && mult.iter().any(|c| !c.is_real()) {
            return Err(Error::Algebra("a real algebra has real structure constants".into()));
        }
        let mut a = Self {
            base,
            dim,
            mult,
            nilpotency: 0,
        };
        for j in 0..dim {
            if a.mul(&unit_vector(dim, 0), &unit_vector(dim, j)) != unit_vector(dim, j) {
                return Err(Error::Algebra(format!("e0 is not a unit: e0·e{j} ≠ e{j}")));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if a.c(i, j, k) != a.c(j, i, k) {
                        return Err(Error::Algebra(format!("not commutative: c[{i}][{j}][{k}] ≠ c[{j}][{i}][{k}]")));
                    }
                }
                if i > 0 && j > 0 && !a.c(i, j, 0).is_zero() {
                    return Err(Error::Algebra(format!("span(e1, …) is not an ideal: e{i}·e{j} has an e0 component")));
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = a.mul(&unit_vector(dim, i), &unit_vector(dim, j));
                for l in 0..dim {
                    let left = a.mul(&ij, &unit_vector(dim, l));
                    let right = a.mul(&unit_vector(dim, i), &a.mul(&unit_vector(dim, j), &unit_vector(dim, l)));
                    if left != right {
                        return Err(Error::Algebra(format!("not associative on (e{i}, e{j}, e{l})")));
                    }
                }
            }
        }
        a.nilpotency = a.compute_nilpotency()?;
        Ok(a)
    }

    /// Smallest `N` with `𝔪^N = 0`.
    fn compute_nilpotency(&self) -> Result<usize> {
        let gens: Vec<Element> = (1..self.dim).map(|i| unit_vector(self.dim, i)).collect();
        let mut power = span_basis(self.dim, &gens);
        let mut n = 1;
        while !power.is_empty() {
            let next: Vec<Element> = gens.iter().flat_map(|g| power.iter().map(move |v| (g, v))).map(|(g, v)| self.mul(g, v)).collect();
            let next = span_basis(self.dim, &next);
            if next.len() == power.len() {
                return Err(Error::Algebra("the maximal ideal is not nilpotent".into()));
            }
            power = next;
            n += 1;
        }
        Ok(n)
    }

    pub fn base(&self) -> BaseField {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nilpotency_index(&self) -> usize {
        self.nilpotency
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.mult[(i * self.dim + j) * self.dim + k]
    }

    pub fn one(&self) -> Element {
        unit_vector(self.dim, 0)
    }

    pub fn basis(&self, i: usize) -> Element {
        unit_vector(self.dim, i)
    }

    pub fn zero(&self) -> Element {
        vec![Scalar::zero(); self.dim]
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Element {
        let d = self.dim;
        let mut out = vec![Scalar::zero(); d];
        for i in (0..d).filter(|&i| !a[i].is_zero()) {
            for j in (0..d).filter(|&j| !b[j].is_zero()) {
                let ab = &a[i] * &b[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o = &*o + &(&ab * c);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, a: &[Scalar], b: &[Scalar]) -> Element {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn scale(&self, s: &Scalar, a: &[Scalar]) -> Element {
        a.iter().map(|x| s * x).collect()
    }

    /// Matrix of `x ↦ a·x`.
    pub fn left_mult(&self, a: &[Scalar]) -> Matrix {
        let cols: Vec<Element> = (0..self.dim).map(|j| self.mul(a, &self.basis(j))).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    pub fn in_maximal_ideal(&self, x: &[Scalar]) -> bool {
        x[0].is_zero()
    }

    /// Inverse of `x = a(1 + n)` with `n ∈ 𝔪` as `a⁻¹ Σ_j (−n)^j`, or `None` for `x ∈ 𝔪`.
    pub fn inverse(&self, x: &[Scalar]) -> Option<Element> {
        let a_inv = x[0].inv()?;
        let mut n = self.scale(&a_inv, x);
        n[0] = Scalar::zero();
        let minus_n: Element = n.iter().map(|v| -v).collect();
        let mut term = self.one();
        let mut sum = self.one();
        for _ in 1..self.nilpotency {
            term = self.mul(&term, &minus_n);
            sum = self.add(&sum, &term);
        }
        Some(self.scale(&a_inv, &sum))
    }

    pub fn is_unit(&self, x: &[Scalar]) -> bool {
        !x[0].is_zero()
    }

    /// `ℂ[t]/(t^{k+1})` with basis `1, t, …, t^k`.
    pub fn truncated_poly(k: usize, base: BaseField) -> Self {
        let d = k + 1;
        let mut mult = vec![Scalar::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d - i {
                mult[(i * d + j) * d + i + j] = Scalar::one();
            }
        }
        Self::new(base, d, mult).expect("truncated polynomial rings are Artin local")
    }

    /// `A ⊗_ℝ ℂ`: the same structure constants over `ℂ`.
    pub fn complexify(&self) -> Result<Self> {
        if self.base != BaseField::Real {
            return Err(Error::Algebra("only real algebras can be complexified".into()));
        }
        Self::new(BaseField::Complex, self.dim, self.mult.clone())
    }

    /// `A ⊗ B` with basis `e_i ⊗ f_j` at index `i·dim B + j`.
    pub fn tensor(&self, other: &ArtinAlgebra) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::Algebra("tensor factors must share a base field".into()));
        }
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut mult = vec![Scalar::zero(); d * d * d];
        for (i, k, m) in (0..da).flat_map(|i| (0..da).flat_map(move |k| (0..da).map(move |m| (i, k, m)))) {
            let ca = self.c(i, k, m);
            if ca.is_zero() {
                continue;
            }
            for (j, l, n) in (0..db).flat_map(|j| (0..db).flat_map(move |l| (0..db).map(move |n| (j, l, n)))) {
                let cb = other.c(j, l, n);
                if !cb.is_zero() {
                    mult[((i * db + j) * d + (k * db + l)) * d + (m * db + n)] = ca * cb;
                }
            }
        }
        Self::new(self.base, d, mult)
    }

    /// `A[ε] = A ⊗ k[ε]/(ε²)`; `a + bε` sits at indices `2i` and `2i + 1`.
    pub fn with_dual_numbers(&self) -> Result<Self> {
        self.tensor(&Self::truncated_poly(1, self.base))
    }

    /// The residue map `A → A/𝔪`.
    pub fn residue_map(&self) -> AlgebraHom {
        let field = Self::truncated_poly(0, self.base);
        let matrix = Matrix::from_fn(1, self.dim, |_, j| if j == 0 { Scalar::one() } else { Scalar::zero() });
        AlgebraHom::new(self.clone(), field, matrix).expect("the residue map is a homomorphism")
    }

    pub fn identity_map(&self) -> AlgebraHom {
        AlgebraHom::new(self.clone(), self.clone(), Matrix::identity(self.dim)).expect("identity")
    }

    /// Quotient by `(ε)` for `ε` in the socle: `A → A/(ε)` is then a small extension.
    pub fn small_extension(&self, epsilon: &[Scalar]) -> Result<SmallExtension> {
        let d = self.dim;
        if epsilon.len() != d {
            return Err(Error::Algebra("ε has the wrong length".into()));
        }
        if epsilon.iter().all(Zero::is_zero) || !self.in_maximal_ideal(epsilon) {
            return Err(Error::Algebra("ε must be a nonzero element of the maximal ideal".into()));
        }
        for i in 1..d {
            if self.mul(epsilon, &self.basis(i)).iter().any(|v| !v.is_zero()) {
                return Err(Error::Algebra(format!("ε is not in the socle: ε·e{i} ≠ 0, so (ε)·𝔪 ≠ 0")));
            }
        }
        // Eliminate the last basis vector that ε involves.
        let p = (1..d).rev().find(|&i| !epsilon[i].is_zero()).expect("ε ∈ 𝔪 is nonzero");
        let keep: Vec<usize> = (0..d).filter(|&i| i != p).collect();
        let inv = epsilon[p].inv().expect("nonzero");
        let proj_vec = |x: &[Scalar]| -> Element {
            let f = &x[p] * &inv;
            keep.iter().map(|&i| &x[i] - &(&f * &epsilon[i])).collect()
        };
        let cols: Vec<Element> = (0..d).map(|j| proj_vec(&self.basis(j))).collect();
        let projection = Matrix::from_columns(d - 1, &cols);
        let dq = d - 1;
        let mut mult = vec![Scalar::zero(); dq * dq * dq];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                for (c, v) in proj_vec(&self.mul(&self.basis(i), &self.basis(j))).into_iter().enumerate() {
                    mult[(a * dq + b) * dq + c] = v;
                }
            }
        }
        let quotient = Self::new(self.base, dq, mult)?;
        Ok(SmallExtension {
            epsilon: epsilon.to_vec(),
            projection: AlgebraHom::new(self.clone(), quotient, projection)?,
        })
    }
}

/// Algebra homomorphism given by its matrix (`target.dim × source.dim`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraHom {
    pub source: ArtinAlgebra,
    pub target: ArtinAlgebra,
    pub matrix: Matrix,
}

impl AlgebraHom {
    /// Checks `f(1) = 1`, `f(e_i e_j) = f(e_i) f(e_j)` on all basis pairs, and `f(𝔪) ⊂ 𝔪`.
    pub fn new(source: ArtinAlgebra, target: ArtinAlgebra, matrix: Matrix) -> Result<Self> {
        if matrix.rows != target.dim || matrix.cols != source.dim {
            return Err(Error::Algebra("homomorphism matrix has the wrong shape".into()));
        }
        if source.base != target.base {
            return Err(Error::Algebra("homomorphism between algebras over different fields".into()));
        }
        let f = Self { source, target, matrix };
        if f.apply(&f.source.one()) != f.target.one() {
            return Err(Error::Algebra("the map does not send 1 to 1".into()));
        }
        for i in 0..f.source.dim {
            let fi = f.apply(&f.source.basis(i));
            if i > 0 && !f.target.in_maximal_ideal(&fi) {
                return Err(Error::Algebra(format!("the map is not local: e{i} leaves the maximal ideal")));
            }
            for j in i..f.source.dim {
                let lhs = f.apply(&f.source.mul(&f.source.basis(i), &f.source.basis(j)));
                let rhs = f.target.mul(&fi, &f.apply(&f.source.basis(j)));
                if lhs != rhs {
                    return Err(Error::Algebra(format!("not multiplicative on (e{i}, e{j})")));
                }
            }
        }
        Ok(f)
    }

    pub fn apply(&self, x: &[Scalar]) -> Element {
        self.matrix.apply(x)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AlgebraHom) -> Result<AlgebraHom> {
        if self.target != next.source {
            return Err(Error::Algebra("maps do not compose".into()));
        }
        AlgebraHom::new(self.source.clone(), next.target.clone(), next.matrix.mul(&self.matrix))
    }

    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.target.dim
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.dim == self.target.dim && self.is_surjective()
    }
}

/// `A → B = A/(ε)` with `(ε)·𝔪_A = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallExtension {
    pub epsilon: Element,
    pub projection: AlgebraHom,
}

impl SmallExtension {
    pub fn source(&self) -> &ArtinAlgebra {
        &self.projection.source
    }

    pub fn quotient(&self) -> &ArtinAlgebra {
        &self.projection.target
    }
}

/// `A ×_C B ⊂ A ⊕ B` with its projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProduct {
    pub algebra: ArtinAlgebra,
    /// Basis vectors in `A ⊕ B` coordinates; the first is `(1, 1)`.
    pub basis: Vec<Element>,
    pub proj_a: AlgebraHom,
    pub proj_b: AlgebraHom,
}

impl FiberProduct {
    /// Coordinates of a pair `(a, b)` in the fiber-product basis.
    pub fn coordinates(&self, pair: &[Scalar]) -> Option<Element> {
        let m = Matrix::from_columns(pair.len(), &self.basis);
        m.solve(pair).filter(|x| m.apply(x) == pair)
    }
}

/// `A ×_C B` for homomorphisms `f: A → C`, `g: B → C`, with basis `(1, 1)` followed by a basis
/// of `{(a, b) ∈ 𝔪_A ⊕ 𝔪_B : f(a) = g(b)}`.
pub fn fiber_product(f: &AlgebraHom, g: &AlgebraHom) -> Result<FiberProduct> {
    if f.target != g.target {
        return Err(Error::Algebra("fiber product needs maps into the same algebra".into()));
    }
    let (a, b, c) = (&f.source, &g.source, &f.target);
    let (da, db) = (a.dim, b.dim);
    let constraint = Matrix::from_fn(c.dim, (da - 1) + (db - 1), |i, j| {
        if j < da - 1 {
            f.matrix.get(i, j + 1).clone()
        } else {
            -g.matrix.get(i, j - (da - 1) + 1)
        }
    });
    let mut basis = vec![{
        let mut v = vec![Scalar::zero(); da + db];
        v[0] = Scalar::one();
        v[da] = Scalar::one();
        v
    }];
    for x in constraint.nullspace() {
        let mut v = vec![Scalar::zero(); da + db];
        v[1..da].clone_from_slice(&x[..da - 1]);
        v[da + 1..].clone_from_slice(&x[da - 1..]);
        basis.push(v);
    }
    let d = basis.len();
    let embed = Matrix::from_columns(da + db, &basis);
    let mut mult = vec![Scalar::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let mut prod = a.mul(&basis[i][..da], &basis[j][..da]);
            prod.extend(b.mul(&basis[i][da..], &basis[j][da..]));
            let coords = embed
                .solve(&prod)
                .ok_or_else(|| Error::Algebra("fiber product is not closed under multiplication".into()))?;
            for (k, v) in coords.into_iter().enumerate() {
                mult[(i * d + j) * d + k] = v;
            }
        }
    }
    let algebra = ArtinAlgebra::new(a.base, d, mult)?;
    let pa = Matrix::from_fn(da, d, |i, j| basis[j][i].clone());
    let pb = Matrix::from_fn(db, d, |i, j| basis[j][da + i].clone());
    Ok(FiberProduct {
        proj_a: AlgebraHom::new(algebra.clone(), a.clone(), pa)?,
        proj_b: AlgebraHom::new(algebra.clone(), b.clone(), pb)?,
        algebra,
        basis,
    })
}

/// The map `A ×_k k[t]/(t²) → A ×_B A`, `(a, ā + λt) ↦ (a, a + λε)` for a small extension
/// `A → B` with kernel `(ε)`; returned only if it is a verified algebra isomorphism.
pub fn tangent_fiber_isomorphism(ext: &SmallExtension) -> Result<AlgebraHom> {
    let a = ext.source();
    let da = a.dim;
    let dual = ArtinAlgebra::truncated_poly(1, a.base);
    let left = fiber_product(&a.residue_map(), &dual.residue_map())?;
    let right = fiber_product(&ext.projection, &ext.projection)?;
    let mut cols = Vec::with_capacity(left.basis.len());
    for u in &left.basis {
        let x = &u[..da];
        let lambda = &u[da + 1];
        let mut image = x.to_vec();
        image.extend(a.add(x, &a.scale(lambda, &ext.epsilon)));
        cols.push(
            right
                .coordinates(&image)
                .ok_or_else(|| Error::Algebra("image pair does not lie in A ×_B A".into()))?,
        );
    }
    let phi = AlgebraHom::new(left.algebra, right.algebra.clone(), Matrix::from_columns(right.basis.len(), &cols))?;
    if !phi.is_isomorphism() {
        return Err(Error::Algebra("the map is not bijective".into()));
    }
    Ok(phi)
}

/// The maps `π_k: A_k → A_{k−1}`, `θ_k: A_k → A_{k−1}[ε]` (`t ↦ t + ε`) and
/// `ϖ_k = π_k ⊗ id: A_k[ε] → A_{k−1}[ε]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftMaps {
    pub k: usize,
    pub pi: AlgebraHom,
    pub theta: AlgebraHom,
    pub varpi: AlgebraHom,
}

pub fn t1_lift_maps(k: usize, base: BaseField) -> Result<LiftMaps> {
    if k == 0 {
        return Err(Error::Algebra("lift maps need k ≥ 1".into()));
    }
    let ak = ArtinAlgebra::truncated_poly(k, base);
    let ak1 = ArtinAlgebra::truncated_poly(k - 1, base);
    let ak_eps = ak.with_dual_numbers()?;
    let ak1_eps = ak1.with_dual_numbers()?;
    let pi = Matrix::from_fn(k, k + 1, |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
    // θ(t^j) = t^j + j t^{j−1} ε, with t^i ε at index 2i + 1 and t^i at 2i.
    let mut theta = Matrix::zeros(2 * k, k + 1);
    for j in 0..=k {
        if j < k {
            theta.set(2 * j, j, Scalar::one());
        }
        if j >= 1 && j - 1 < k {
            theta.set(2 * (j - 1) + 1, j, Scalar::int(j as i64));
        }
    }
    let varpi = Matrix::from_fn(2 * k, 2 * (k + 1), |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
    Ok(LiftMaps {
        k,
        pi: AlgebraHom::new(ak.clone(), ak1.clone(), pi)?,
        theta: AlgebraHom::new(ak, ak1_eps.clone(), theta)?,
        varpi: AlgebraHom::new(ak_eps, ak1_eps, varpi)?,
    })
}

/// Whether `ϖ_k ∘ θ_{k+1} = θ_k ∘ π_{k+1}` as maps `A_{k+1} → A_{k−1}[ε]`.
pub fn lift_square_commutes(k: usize, base: BaseField) -> Result<bool> {
    let lower = t1_lift_maps(k, base)?;
    let upper = t1_lift_maps(k + 1, base)?;
    let via_theta = upper.theta.then(&lower.varpi)?;
    let via_pi = upper.pi.then(&lower.theta)?;
    Ok(via_theta.matrix == via_pi.matrix)
}
