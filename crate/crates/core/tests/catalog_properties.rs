use conelab::catalog::{
    bott_vanishes, check_record, du_bois_level, minimal_exponent, odp_link_betti, BottQuery, Registry, SingularityKind, SingularityRecord,
    Theorem13Flag,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn binom(n: i64, k: i64) -> u128 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Dimension of `H^q(ℙ^n, Ω^p(k))` from the Bott formula.
fn bott_dimension(n: i64, p: i64, q: i64, k: i64) -> u128 {
    let h0 = |p: i64, k: i64| if k > p { binom(k + n - p, k) * binom(k - 1, p) } else { u128::from(k == 0 && p == 0) };
    if q == 0 {
        h0(p, k)
    } else if q == n {
        h0(n - p, -k)
    } else {
        u128::from(k == 0 && p == q)
    }
}

#[test]
fn bott_rule_matches_the_dimension_formula() {
    for n in 1..=6u32 {
        for p in 0..=n {
            for q in 0..=n {
                for k in -12..=12i64 {
                    let b = BottQuery::new(n, p, q, k).unwrap();
                    let dim = bott_dimension(n as i64, p as i64, q as i64, k);
                    assert_eq!(bott_vanishes(&b), dim == 0, "{b}: dimension {dim}");
                }
            }
        }
    }
}

#[test]
fn odp_instances_vanish() {
    for n in 4..=12u32 {
        let a = BottQuery::new(n, n - 1, 1, n as i64 - 3).unwrap();
        let b = BottQuery::new(n, n - 1, 0, n as i64 - 1).unwrap();
        assert!(bott_vanishes(&a), "{a}");
        assert!(bott_vanishes(&b), "{b}");
    }
}

#[test]
fn odp_exponents_and_levels() {
    for n in 2..=8u64 {
        let alpha = minimal_exponent(&vec![1; n as usize + 1], 2).unwrap();
        assert_eq!(alpha, Ratio::new(n + 1, 2));
        assert_eq!(du_bois_level(alpha), Some((n + 1) / 2 - 1));
    }
}

#[test]
fn odp_link_betti_numbers_satisfy_duality() {
    for n in 2..=8u32 {
        let b = odp_link_betti(n);
        assert_eq!(b.len(), 2 * n as usize);
        assert!(b.iter().zip(b.iter().rev()).all(|(x, y)| x == y));
        let chi: i64 = b.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        assert_eq!(chi, 0, "odd-dimensional link");
    }
}

#[test]
fn builtin_records_check_cleanly() {
    let reg = Registry::builtin();
    for rec in &reg.records {
        let c = check_record(rec, None).unwrap();
        if rec.kind == SingularityKind::Odp && rec.n >= 3 {
            assert_eq!(c.theorem13.flag, Theorem13Flag::Violated);
            assert!(c.theorem12.as_ref().unwrap().holds);
        }
    }
}

fn query() -> impl Strategy<Value = BottQuery> {
    (1u32..=6).prop_flat_map(|n| (Just(n), 0..=n, 0..=n, -12i64..=12)).prop_map(|(n, p, q, k)| BottQuery::new(n, p, q, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn bott_vanishing_is_serre_symmetric(b in query()) {
        prop_assert_eq!(bott_vanishes(&b), bott_vanishes(&b.serre_dual()));
        prop_assert_eq!(b.serre_dual().serre_dual(), b);
    }

    #[test]
    fn du_bois_level_is_monotone(a in 1u64..200, b in 1u64..200, d in 1u64..60) {
        let (x, y) = (Ratio::new(a.min(b), d), Ratio::new(a.max(b), d));
        prop_assert!(du_bois_level(x) <= du_bois_level(y));
    }

    #[test]
    fn du_bois_level_is_the_largest_admissible_k(a in 1u64..500, d in 1u64..60) {
        let alpha = Ratio::new(a, d);
        match du_bois_level(alpha) {
            Some(k) => {
                prop_assert!(alpha >= Ratio::from_integer(k + 1));
                prop_assert!(alpha < Ratio::from_integer(k + 2));
            }
            None => prop_assert!(alpha < Ratio::from_integer(1)),
        }
    }

    #[test]
    fn raising_a_weight_raises_the_exponent(w in prop::collection::vec(1u64..20, 2..6), i in 0usize..6, d in 1u64..40) {
        let i = i % w.len();
        let mut bigger = w.clone();
        bigger[i] += 1;
        if let (Ok(a), Ok(b)) = (minimal_exponent(&w, d), minimal_exponent(&bigger, d)) {
            prop_assert!(a < b);
            prop_assert!(du_bois_level(a) <= du_bois_level(b));
        }
    }

    #[test]
    fn registry_round_trips_inserted_records(n in 2u32..8, w in prop::collection::vec(1u64..6, 3..6), d in 2u64..12) {
        let mut w = w;
        w[0] = 1;
        let rec = SingularityRecord {
            name: format!("test-{n}-{d}"),
            kind: SingularityKind::WeightedHomogeneousHypersurface,
            n: w.len() as u32 - 1,
            weights: Some(w),
            degree: Some(d),
            link_mesh: None,
            betti: None,
            local_h1_nonzero: None,
            description: String::new(),
        };
        let mut reg = Registry::builtin();
        reg.insert(rec.clone()).unwrap();
        let back = Registry::from_json(&serde_json::to_string(&reg).unwrap()).unwrap();
        prop_assert_eq!(back.get(&rec.name).unwrap(), &rec);
        prop_assert_eq!(back.records.len(), reg.records.len());
    }
}
