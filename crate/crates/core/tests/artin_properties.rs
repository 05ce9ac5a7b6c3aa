use conelab::artin::{
    fiber_product, hom_space, lift_square_commutes, module_dual, random_module, reflexivity_check, tangent_fiber_isomorphism, ArtinAlgebra,
    BaseField, FiniteModule, Scalar,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Local algebras of dimension at most 4.
fn small_algebras() -> Vec<ArtinAlgebra> {
    let mut v: Vec<ArtinAlgebra> = (0..=3).map(|k| ArtinAlgebra::truncated_poly(k, BaseField::Complex)).collect();
    let dual = ArtinAlgebra::truncated_poly(1, BaseField::Complex);
    v.push(dual.tensor(&dual).unwrap());
    v.push(ArtinAlgebra::truncated_poly(2, BaseField::Real));
    v
}

fn grid_elements(dim: usize) -> Vec<Vec<Scalar>> {
    let values = [Scalar::zero(), Scalar::one(), Scalar::int(-1), Scalar::ratio(1, 2)];
    (0..values.len().pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let v = values[code % values.len()].clone();
                    code /= values.len();
                    v
                })
                .collect()
        })
        .collect()
}

#[test]
fn units_are_exactly_the_elements_outside_the_maximal_ideal() {
    for a in small_algebras() {
        for x in grid_elements(a.dim()) {
            assert_eq!(a.is_unit(&x), !a.in_maximal_ideal(&x), "{x:?}");
            if let Some(inv) = a.inverse(&x) {
                assert_eq!(a.mul(&x, &inv), a.one());
            }
        }
    }
}

#[test]
fn fiber_products_over_the_residue_field_have_expected_dimension() {
    let algebras = small_algebras();
    for a in &algebras {
        for b in &algebras {
            if a.base() != b.base() {
                continue;
            }
            let fp = fiber_product(&a.residue_map(), &b.residue_map()).unwrap();
            assert_eq!(fp.algebra.dim(), a.dim() + b.dim() - 1);
            assert!(fp.proj_a.is_surjective() && fp.proj_b.is_surjective());
        }
    }
}

#[test]
fn tangent_isomorphism_and_lift_squares_up_to_order_five() {
    for base in [BaseField::Real, BaseField::Complex] {
        for k in 1..=5 {
            let a = ArtinAlgebra::truncated_poly(k, base);
            let ext = a.small_extension(&a.basis(k)).unwrap();
            assert_eq!(ext.quotient().dim(), k);
            let phi = tangent_fiber_isomorphism(&ext).unwrap();
            assert_eq!(phi.source.dim(), k + 2);
            assert!(lift_square_commutes(k, base).unwrap());
        }
    }
}

#[test]
fn hom_from_the_regular_module_recovers_the_module() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=3 {
        for rank in 1..=4 {
            let m = random_module(k, rank, BaseField::Complex, &mut rng).unwrap();
            let reg = FiniteModule::regular(&m.algebra);
            assert_eq!(hom_space(&reg, &m).unwrap().len(), m.rank);
        }
    }
}

#[test]
fn algebra_json_is_exact() {
    for a in small_algebras() {
        let text = serde_json::to_string(&a).unwrap();
        let back: ArtinAlgebra = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_modules_are_reflexive(seed in any::<u64>(), k in 1usize..=4, rank in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(k, rank, BaseField::Complex, &mut rng).unwrap();
        let rep = reflexivity_check(&m).unwrap();
        prop_assert!(rep.reflexive, "{rep:?}");
        prop_assert_eq!(rep.dual_rank, m.rank);
    }

    #[test]
    fn duals_have_the_same_dimension(seed in any::<u64>(), k in 1usize..=3, rank in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(k, rank, BaseField::Real, &mut rng).unwrap();
        let d = module_dual(&m).unwrap();
        prop_assert_eq!(d.module.rank, m.rank);
        prop_assert_eq!(d.basis.len(), m.rank);
    }

    #[test]
    fn multiplication_is_associative_and_commutative(i in 0usize..4, j in 0usize..4, l in 0usize..4, which in 0usize..6) {
        let a = &small_algebras()[which];
        let d = a.dim();
        let (x, y, z) = (a.basis(i % d), a.basis(j % d), a.basis(l % d));
        prop_assert_eq!(a.mul(&x, &y), a.mul(&y, &x));
        prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
    }
}
