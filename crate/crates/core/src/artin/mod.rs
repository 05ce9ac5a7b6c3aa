//! Exact Artin local algebras over ℝ and ℂ, small extensions, fiber products, the lift maps
//! `π_k, θ_k, ϖ_k`, and duality of finite modules over truncated polynomial rings.

mod algebra;
mod matrix;
mod module;
mod scalar;

pub use algebra::{
    fiber_product, lift_square_commutes, t1_lift_maps, tangent_fiber_isomorphism, AlgebraHom, ArtinAlgebra, BaseField,
    Element, FiberProduct, LiftMaps, SmallExtension,
};
pub use matrix::Matrix;
pub use module::{
    dual_map, hom_space, module_dual, random_hom, random_module, reflexivity_check, Dual, FiniteModule, ModuleHom,
    ReflexivityReport,
};
pub use scalar::Scalar;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinCheck {
    pub name: String,
    pub claim: String,
    pub passed: bool,
    pub cases: usize,
    /// First failing case, if any.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinReport {
    pub k_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<ArtinCheck>,
}

impl ArtinReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, claim: &str, cases: impl IntoIterator<Item = (String, Result<bool>)>) -> ArtinCheck {
    let mut n = 0;
    let mut failure = None;
    for (label, outcome) in cases {
        n += 1;
        let bad = match outcome {
            Ok(true) => None,
            Ok(false) => Some(label),
            Err(e) => Some(format!("{label}: {e}")),
        };
        if failure.is_none() {
            failure = bad;
        }
    }
    ArtinCheck {
        name: name.into(),
        claim: claim.into(),
        passed: failure.is_none(),
        cases: n,
        failure,
    }
}

/// Exact checks over `A_k = ℂ[t]/(t^{k+1})`, `k ≤ k_max`: the tangent fiber-product
/// isomorphism, commutativity of the lift square, reflexivity of `trials` random modules of rank
/// at most 8, and contravariance of duality on sampled module maps.
pub fn run_suite(k_max: usize, trials: usize, seed: u64) -> ArtinReport {
    let base = BaseField::Complex;
    let ks = 1..=k_max.max(1);
    let iso = check(
        "fiber_product_isomorphism",
        "A ×_C C[t]/t^2 ≅ A ×_B A via (a, ā + λt) ↦ (a, a + λε) for A = A_k → B = A_{k-1}",
        ks.clone().map(|k| {
            let a = ArtinAlgebra::truncated_poly(k, base);
            let outcome = a.small_extension(&a.basis(k)).and_then(|e| tangent_fiber_isomorphism(&e)).map(|_| true);
            (format!("k = {k}"), outcome)
        }),
    );
    let square = check(
        "lift_square",
        "π_k, θ_k, ϖ_k are algebra homomorphisms and ϖ_k ∘ θ_{k+1} = θ_k ∘ π_{k+1}",
        ks.clone().map(|k| (format!("k = {k}"), lift_square_commutes(k, base))),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modules: Vec<(usize, usize, u64)> = (0..trials).map(|_| (rng.gen_range(ks.clone()), rng.gen_range(1..=8), rng.gen())).collect();
    let reflexive = check(
        "reflexivity",
        "M → M** is an A_k-module isomorphism for finitely generated M",
        modules.iter().map(|&(k, rank, s)| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let outcome = random_module(k, rank, base, &mut r).and_then(|m| reflexivity_check(&m)).map(|rep| rep.reflexive);
            (format!("k = {k}, rank = {rank}, seed = {s}"), outcome)
        }),
    );
    let functorial = check(
        "duality_contravariant",
        "(g ∘ f)* = f* ∘ g* for A-linear maps f: M → N, g: N → P",
        (0..trials.clamp(1, 20)).map(|i| {
            let s: u64 = rng.gen();
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let k = r.gen_range(ks.clone());
            let outcome = (|| -> Result<bool> {
                let mods = (0..3)
                    .map(|_| {
                        let rank = r.gen_range(1..=5);
                        random_module(k, rank, base, &mut r)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let f = random_hom(&mods[0], &mods[1], &mut r)?;
                let g = random_hom(&mods[1], &mods[2], &mut r)?;
                let gf = ModuleHom::new(&mods[0], &mods[2], g.matrix.mul(&f.matrix))?;
                let d = mods.iter().map(module_dual).collect::<Result<Vec<_>>>()?;
                let lhs = dual_map(&gf, &d[0], &d[2])?;
                let rhs = dual_map(&f, &d[0], &d[1])?.mul(&dual_map(&g, &d[1], &d[2])?);
                Ok(lhs == rhs)
            })();
            (format!("pair {i}, seed = {s}"), outcome)
        }),
    );
    ArtinReport {
        k_max,
        trials,
        seed,
        checks: vec![iso, square, reflexive, functorial],
    }
}
