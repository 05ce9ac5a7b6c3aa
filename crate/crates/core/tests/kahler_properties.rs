use std::collections::BTreeMap;
use std::sync::Arc;

use conelab::kahler::{
    estimate_constants, euclidean_radius, Coefficient, levi_fd, min_eigenvalue, radius_residual, sample_shells, weighted_potential_jet, weighted_radius_with,
    GluingOptions, GluingProblem, Polynomial, Potential, RadiusConvention, WeightData,
};
use num_complex::Complex64;
use proptest::prelude::*;

const CONVENTIONS: [RadiusConvention; 2] = [RadiusConvention::Flow, RadiusConvention::Reciprocal];

fn point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-6.0f64..0.5, 0.0f64..std::f64::consts::TAU), 2..=3)
        .prop_map(|v| v.into_iter().map(|(e, th)| Complex64::from_polar(10f64.powf(e), th)).collect())
}

/// Points whose coordinates are within a factor 10^1.5 of each other.
fn balanced_point() -> impl Strategy<Value = Vec<Complex64>> {
    (-3.0f64..0.0, prop::collection::vec((-1.5f64..0.0, 0.0f64..std::f64::consts::TAU), 2..=3))
        .prop_map(|(s, v)| v.into_iter().map(|(e, th)| Complex64::from_polar(10f64.powf(s + e), th)).collect())
}

fn weights_in(m: usize, lo: f64) -> impl Strategy<Value = WeightData> {
    prop::collection::vec(lo..0.95, m).prop_map(|l| WeightData::new(l).unwrap())
}

fn weights(m: usize) -> impl Strategy<Value = WeightData> {
    weights_in(m, 0.05)
}

fn quadratic(m: usize) -> Polynomial {
    let mut d = BTreeMap::new();
    for a in 1..=m {
        d.insert(format!("z{a} zbar{a}"), Coefficient::Real(1.0));
    }
    d.insert("z1^2".into(), Coefficient::Real(0.15));
    d.insert("zbar1^2".into(), Coefficient::Real(0.15));
    Polynomial::from_dictionary(m, &d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn radius_solves_its_defining_equation((z, w) in point().prop_flat_map(|z| { let m = z.len(); (Just(z), weights(m)) })) {
        for c in CONVENTIONS {
            let t = weighted_radius_with(&z, &w, c, 1e-15).unwrap();
            prop_assert!(radius_residual(&z, &w, c, t).abs() < 1e-12, "{c:?}: {}", radius_residual(&z, &w, c, t));
        }
    }

    #[test]
    fn flow_radius_is_homogeneous((z, w) in point().prop_flat_map(|z| { let m = z.len(); (Just(z), weights(m)) }), s in -3.0f64..3.0) {
        let moved: Vec<Complex64> = z.iter().zip(w.lambda()).map(|(x, l)| x * (l * s).exp()).collect();
        let a = weighted_radius_with(&z, &w, RadiusConvention::Flow, 1e-15).unwrap();
        let b = weighted_radius_with(&moved, &w, RadiusConvention::Flow, 1e-15).unwrap();
        prop_assert!((b / (a * s.exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_radius_is_sandwiched((z, w) in point().prop_flat_map(|z| { let m = z.len(); (Just(z), weights(m)) })) {
        let r = euclidean_radius(&z);
        prop_assume!(r <= 1.0);
        let t = weighted_radius_with(&z, &w, RadiusConvention::Reciprocal, 1e-15).unwrap();
        let slack = 1e-12;
        prop_assert!(r.powf(w.beta()) <= t * (1.0 + slack));
        prop_assert!(t <= r.powf(w.alpha()) * (1.0 + slack));
    }

    #[test]
    fn flow_radius_obeys_reciprocal_exponent_bounds((z, w) in point().prop_flat_map(|z| { let m = z.len(); (Just(z), weights(m)) })) {
        let r = euclidean_radius(&z);
        prop_assume!(r <= 1.0);
        let t = weighted_radius_with(&z, &w, RadiusConvention::Flow, 1e-15).unwrap();
        let slack = 1e-12;
        prop_assert!(r.powf(1.0 / w.alpha()) <= t * (1.0 + slack));
        prop_assert!(t <= r.powf(1.0 / w.beta()) * (1.0 + slack));
    }

    #[test]
    // Exponents up to 1/0.05 make the stencil's own truncation error dominate, so the
    // difference oracle is restricted to moderate weights.
    fn weighted_levi_form_is_positive_and_matches_differences((z, w) in balanced_point().prop_flat_map(|z| { let m = z.len(); (Just(z), weights_in(m, 0.2)) })) {
        // The difference stencil must stay well inside the scale of every coordinate.
        let small = z.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
        for c in CONVENTIONS {
            let (_, _, levi) = weighted_potential_jet(&z, &w, c, 1e-15).unwrap();
            prop_assert!(min_eigenvalue(&levi) > 0.0);
            let f = |x: &[f64]| {
                let p: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
                weighted_radius_with(&p, &w, c, 1e-15).unwrap().powi(2)
            };
            let x: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
            let fd = levi_fd(&f, &x, 1e-2 * small);
            let err = levi.entries.iter().zip(&fd.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-5 * (1.0 + levi.norm()), "{c:?}: {err}");
        }
    }

    #[test]
    fn polynomial_levi_form_matches_differences(z in point()) {
        let p = quadratic(z.len());
        let f = |x: &[f64]| {
            let q: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            p.value(&q)
        };
        let x: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
        let fd = levi_fd(&f, &x, 1e-3);
        let exact = p.levi(&z);
        let err = exact.entries.iter().zip(&fd.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "{err}");
    }
}

/// The key estimate `λ_min(ddᶜr_λ²) ≥ min{β², ν}·r^{−2(1−β)}`, with `ν` estimated on one sample
/// set and verified on an independent one, to within a 20% margin.
#[test]
fn key_estimate_holds_on_fresh_samples() {
    let margin = 0.2;
    let w = WeightData::new(vec![0.7, 0.9]).unwrap();
    let prob = GluingProblem::new(w.clone(), Arc::new(quadratic(2))).unwrap();
    let opts = GluingOptions::default();
    let fit = sample_shells(2, prob.phi_radius, opts.shells, opts.per_shell, 1);
    let c = estimate_constants(&prob, &fit, &opts).unwrap();
    assert!(c.nu > 0.0);
    let k = c.nu.min(w.beta() * w.beta());
    let fresh = sample_shells(2, prob.phi_radius, opts.shells, opts.per_shell, 2);
    let mut worst = f64::INFINITY;
    for z in &fresh {
        let r = euclidean_radius(z);
        let (_, _, levi) = weighted_potential_jet(z, &w, prob.convention, 1e-15).unwrap();
        worst = worst.min(min_eigenvalue(&levi) / (k * r.powf(-2.0 * (1.0 - w.beta()))));
    }
    assert!(worst >= 1.0 - margin, "worst ratio {worst}, ν = {}", c.nu);
}
