//! Acceptance criteria 1–12. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 6 and 8 are known to fail as stated (see the decisions ledger and README); the
//! process exits nonzero only when some other criterion fails, or when a known failure stops
//! failing, so regressions still break `cargo test`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use conelab::artin::{lift_square_commutes, run_suite, tangent_fiber_isomorphism, ArtinAlgebra, BaseField};
use conelab::catalog::{bott_vanishes, du_bois_level, minimal_exponent, BottQuery, Registry};
use conelab::cone::{
    check_diagonalization, cone_d, cone_dstar, cone_laplacian, indicial_analysis, split_e_vector, ConeGeometry, HomogeneousForm,
    IndicialOptions, Verdict,
};
use conelab::dec::{count_near_zero, eigensolve, DiscreteHodge, EigenOptions, HodgeStar, NearZeroOptions};
use conelab::kahler::{
    euclidean_radius, glue_potential, radius_residual, weighted_radius, weighted_radius_with, Coefficient, GluingOptions, GluingProblem,
    ItemVerdict, Polynomial, RadiusConvention, WeightData,
};
use conelab::mesh::generators::{circle, flat_torus, icosphere, product, sphere_boundary};
use conelab::mesh::SimplicialComplex;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose statement does not hold; their FAIL is expected.
const KNOWN_FAILURES: [u32; 2] = [6, 8];

struct Outcome {
    pass: bool,
    detail: String,
    limit: Option<Duration>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, limit: None }
    }

    fn within(mut self, limit: Duration) -> Self {
        self.limit = Some(limit);
        self
    }
}

fn hodge(c: SimplicialComplex) -> Arc<DiscreteHodge> {
    Arc::new(DiscreteHodge::build(Arc::new(c), HodgeStar::Whitney).expect("hodge star"))
}

fn s2_mesh() -> SimplicialComplex {
    icosphere(1).unwrap()
}

fn s2xs1_mesh() -> SimplicialComplex {
    product(&icosphere(1).unwrap(), &circle(5, TAU).unwrap()).unwrap()
}

fn t3_mesh(n: usize) -> SimplicialComplex {
    flat_torus(3, n, TAU).unwrap()
}

/// Link meshes of the catalog: ∂Δ⁴, T³, icosphere-S²×S¹ and the S²×S³ record's mesh.
fn catalog_links() -> Vec<(String, ConeGeometry)> {
    let mut v = vec![
        ("∂Δ⁴".to_string(), ConeGeometry::new(hodge(sphere_boundary(4).unwrap()))),
        ("T³".to_string(), ConeGeometry::new(hodge(t3_mesh(4)))),
        ("S²×S¹".to_string(), ConeGeometry::new(hodge(s2xs1_mesh()))),
    ];
    let reg = Registry::builtin();
    for rec in &reg.records {
        if let Ok(Some(mesh)) = rec.load_link_mesh(None::<&Path>) {
            v.push((rec.name.clone(), ConeGeometry::new(hodge(mesh))));
        }
    }
    v
}

fn c1_diagonalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut tested, mut rejected, mut worst) = (0, 0, 0.0f64);
    while tested < 1000 {
        let beta = rng.gen_range(-10.0..10.0);
        let l = rng.gen_range(2..=12) as f64;
        let p = rng.gen_range(0..=l as usize) as f64;
        // det P = −(2β + l − 2 − 2p).
        if (2.0 * beta + l - 2.0 - 2.0 * p).abs() < 1e-6 {
            rejected += 1;
            continue;
        }
        worst = worst.max(check_diagonalization(beta, l, p).unwrap().residual);
        tested += 1;
    }
    Outcome::new(worst < 1e-10, format!("{tested} samples ({rejected} rejected), max ‖P⁻¹MP − D‖∞ = {worst:.2e} (< 1e-10)"))
        .within(Duration::from_secs(1))
}

fn form_diff(a: &HomogeneousForm, b: &HomogeneousForm) -> f64 {
    a.phi_prime
        .iter()
        .zip(&b.phi_prime)
        .chain(a.phi_double.iter().zip(&b.phi_double))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn c2_cone_identity() -> Outcome {
    let links = [
        ("∂Δ⁴", ConeGeometry::new(hodge(sphere_boundary(4).unwrap()))),
        ("T³", ConeGeometry::new(hodge(t3_mesh(4)))),
        ("S²×S¹", ConeGeometry::new(hodge(s2xs1_mesh()))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut parts = Vec::new();
    let mut worst_all = 0.0f64;
    for (name, g) in &links {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let p = i % g.l();
            let beta = rng.gen_range(-4.0..4.0);
            let f = g.random_form(p, beta, &mut rng);
            let lap = cone_laplacian(&f, g).unwrap();
            let mut sum = cone_dstar(&cone_d(&f, g).unwrap(), g).unwrap();
            if p > 0 {
                sum = sum.add(&cone_d(&cone_dstar(&f, g).unwrap(), g).unwrap()).unwrap();
            }
            worst = worst.max(form_diff(&sum, &lap) / (1.0 + lap.max_abs()));
        }
        worst_all = worst_all.max(worst);
        parts.push(format!("{name} {worst:.1e}"));
    }
    Outcome::new(worst_all < 1e-10, format!("100 forms per link, relative residual {} (< 1e-10)", parts.join(", "))).within(Duration::from_secs(10))
}

fn torus_spectrum(n: usize) -> Vec<f64> {
    let h = hodge(t3_mesh(n));
    eigensolve(&h.laplacian(0).unwrap(), 8, &EigenOptions::default()).unwrap().eigenvalues
}

fn c3_torus_oracle() -> Outcome {
    let s8 = torus_spectrum(8);
    let s16 = torus_spectrum(16);
    let err = |s: &[f64]| s[1..7].iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max);
    let (e8, e16) = (err(&s8), err(&s16));
    let pass = s8[0].abs() < 1e-8 && e8 <= 0.1 && e16 <= 0.5 * e8;
    Outcome::new(pass, format!("N=8: λ₀ = {:.1e}, max|λ₁..₆ − 1| = {e8:.4}; N=16: {e16:.4} (ratio {:.2} ≥ 2)", s8[0], e8 / e16))
        .within(Duration::from_secs(120))
}

fn c4_hodge_counts() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, mesh, top) in [("T³", t3_mesh(4), 3), ("S²", s2_mesh(), 2), ("S²×S¹", s2xs1_mesh(), 2)] {
        let betti = mesh.betti().values;
        let h = hodge(mesh);
        let mut counts = Vec::new();
        for (p, &b) in betti.iter().enumerate().take(top + 1) {
            let pencil = h.laplacian(p).unwrap();
            let slice = eigensolve(&pencil, (b + 6).min(pencil.dim()), &EigenOptions::default()).unwrap();
            let opts = NearZeroOptions {
                reference_scale: Some(pencil.trace_scale()),
                ..NearZeroOptions::default()
            };
            let c = count_near_zero(&slice, &opts).count;
            pass &= c == b;
            counts.push(format!("{c}/{b}"));
        }
        parts.push(format!("{name} [{}]", counts.join(" ")));
    }
    Outcome::new(pass, format!("zero modes/Betti: {}", parts.join(", "))).within(Duration::from_secs(120))
}

fn c5_c6_indicial(links: &[(String, ConeGeometry)]) -> (Outcome, Outcome) {
    let opts = IndicialOptions::default();
    let (mut lower_ok, mut nolog_ok) = (true, true);
    let mut worst_margin = f64::INFINITY;
    let (mut fails, mut flagged, mut passed) = (Vec::new(), Vec::new(), 0);
    for (name, g) in links {
        for p in 1..g.l() {
            let r = indicial_analysis(g, p, &opts).unwrap();
            let bound = -r.m * r.m - 0.05 * (1.0 + r.m * r.m);
            let lmin = r.spectrum.eigenvalues[0];
            worst_margin = worst_margin.min(lmin - bound);
            lower_ok &= lmin >= bound;
            let gap = r.spectrum.eigenvalues.iter().map(|x| (x + r.m * r.m).abs()).fold(f64::INFINITY, f64::min);
            if r.m == 0.0 {
                flagged.push(format!("{name} p={p}"));
                assert_eq!(r.nolog.verdict, Verdict::Flagged);
            } else if gap > 0.1 {
                passed += 1;
            } else {
                nolog_ok = false;
                fails.push(format!("{name} p={p} m={} gap {gap:.1e}", r.m));
            }
        }
    }
    let c5 = Outcome::new(lower_ok, format!("min over links and degrees of λ_min(E) − bound = {worst_margin:.3e} (≥ 0)"));
    let c6 = Outcome::new(
        nolog_ok,
        format!("{passed} pairs gap > 0.1; flagged (m = 0): {}; violations: {}", flagged.join(", "), if fails.is_empty() { "none".into() } else { fails.join("; ") }),
    );
    (c5, c6)
}

fn c7_zero_mode_structure() -> Outcome {
    let g = ConeGeometry::new(hodge(t3_mesh(4)));
    let p = 1;
    assert_eq!(g.l(), 4);
    let r = indicial_analysis(&g, p, &IndicialOptions { modes: 12, ..Default::default() }).unwrap();
    let scale = r.spectrum.eigenvalues.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let link = g.link();
    let (mut prime, mut closed, mut zeros) = (0.0f64, 0.0f64, 0);
    for (lam, v) in r.spectrum.eigenvalues.iter().zip(&r.spectrum.eigenvectors) {
        if lam.abs() > 1e-6 * scale {
            continue;
        }
        zeros += 1;
        let (fp, fpp) = split_e_vector(&g, p, v);
        let (n1, n2) = (link.norm(p - 1, &fp), link.norm(p, &fpp));
        prime = prime.max(n1 / (n1 * n1 + n2 * n2).sqrt());
        let d = link.d(p, &fpp);
        let delta = link.codifferential(p, &fpp).unwrap();
        closed = closed.max(link.norm(p + 1, &d) / n2).max(link.norm(p - 1, &delta) / n2);
    }
    let b1 = g.link().complex().betti().values[1];
    Outcome::new(
        zeros == b1 && prime < 1e-4 && closed < 1e-4,
        format!("{zeros} zero modes (b₁ = {b1}); max ‖φ′‖/‖φ‖ = {prime:.1e}, max ‖dφ″‖,‖δφ″‖ / ‖φ″‖ = {closed:.1e} (< 1e-4)"),
    )
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    // Log-uniform coordinates in the unit polydisc, rescaled into the unit ball.
    let z: Vec<Complex64> = (0..m).map(|_| Complex64::from_polar(10f64.powf(rng.gen_range(-6.0..0.0)), rng.gen_range(0.0..TAU))).collect();
    let r = euclidean_radius(&z);
    let s = if r > 1.0 { rng.gen_range(0.1..1.0) / r } else { 1.0 };
    z.into_iter().map(|c| c * s).collect()
}

fn c8_weighted_radius() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let slack = 1e-12;
    let (mut worst, mut stated, mut corrected, mut reciprocal) = (0.0f64, 0, 0, 0);
    let n = 10_000;
    for _ in 0..n {
        let m = rng.gen_range(2..=4);
        let w = WeightData::new((0..m).map(|_| rng.gen_range(0.05..0.95)).collect()).unwrap();
        let z = random_point(&mut rng, m);
        let r = euclidean_radius(&z);
        let t = weighted_radius(&z, &w, 1e-15).unwrap();
        worst = worst.max(radius_residual(&z, &w, RadiusConvention::Flow, t).abs());
        // Stated bounds r^β ≤ r_λ ≤ r^α, nonempty for r ≤ 1 only with β the larger weight.
        let (small, large) = (w.alpha(), w.beta());
        let within = |t: f64, lo: f64, hi: f64| lo <= t * (1.0 + slack) && t <= hi * (1.0 + slack);
        if !within(t, r.powf(large), r.powf(small)) {
            stated += 1;
        }
        if !within(t, r.powf(1.0 / small), r.powf(1.0 / large)) {
            corrected += 1;
        }
        let tr = weighted_radius_with(&z, &w, RadiusConvention::Reciprocal, 1e-15).unwrap();
        if !within(tr, r.powf(large), r.powf(small)) {
            reciprocal += 1;
        }
    }
    Outcome::new(
        worst < 1e-12 && stated == 0,
        format!(
            "{n} points, max residual {worst:.1e} (< 1e-12); stated sandwich violations {stated}; \
             r^(1/min λ) ≤ r_λ ≤ r^(1/max λ) violations {corrected}; reciprocal-convention sandwich violations {reciprocal}"
        ),
    )
    .within(Duration::from_secs(5))
}

fn c9_gluing() -> Outcome {
    let mut d = BTreeMap::new();
    d.insert("z1 zbar1".to_string(), Coefficient::Real(1.0));
    d.insert("z2 zbar2".to_string(), Coefficient::Real(1.0));
    d.insert("z1^2".to_string(), Coefficient::Real(0.15));
    d.insert("zbar1^2".to_string(), Coefficient::Real(0.15));
    let poly = Polynomial::from_dictionary(2, &d).unwrap();
    let prob = GluingProblem::new(WeightData::new(vec![0.7, 0.9]).unwrap(), Arc::new(poly)).unwrap();
    match glue_potential(&prob, &GluingOptions::default()) {
        Ok(g) => {
            let rep = &g.report;
            let items: Vec<String> = rep.items.iter().map(|i| format!("{} {:?}", i.name, i.verdict)).collect();
            let required = ["locality", "inner_equality", "strict_psh"];
            let present = required.iter().all(|n| rep.items.iter().any(|i| i.name == *n));
            let pass = present && rep.items.iter().all(|i| i.verdict == ItemVerdict::Pass) && rep.verification_samples >= 10_000;
            Outcome::new(pass, format!("ε = {:.3e}, δ = {:.3e}, {} samples; {}", g.epsilon, g.delta, rep.verification_samples, items.join(", ")))
        }
        Err(e) => Outcome::new(false, format!("gluing failed: {e}")),
    }
    .within(Duration::from_secs(30))
}

/// H^q(ℙⁿ, Ωᵖ(k)) ≠ 0 exactly when (q = 0, k > p), (k = 0, p = q) or (q = n, k < p − n).
fn bott_rule(n: i64, p: i64, q: i64, k: i64) -> bool {
    let nonzero = (q == 0 && k > p) || (k == 0 && p == q) || (q == n && k < p - n);
    !nonzero
}

fn c10_bott() -> Outcome {
    let mut mismatches = 0;
    let mut cases = 0;
    for n in 1..=6u32 {
        for p in 0..=n {
            for q in 0..=n {
                for k in -12..=12i64 {
                    cases += 1;
                    if bott_vanishes(&BottQuery::new(n, p, q, k).unwrap()) != bott_rule(n as i64, p as i64, q as i64, k) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let instances = (4..=12u32).all(|n| {
        bott_vanishes(&BottQuery::new(n, n - 1, 1, n as i64 - 3).unwrap()) && bott_vanishes(&BottQuery::new(n, n - 1, 0, n as i64 - 1).unwrap())
    });
    Outcome::new(mismatches == 0 && instances, format!("{cases} cases, {mismatches} mismatches; both instances vanish for n = 4..12: {instances}"))
        .within(Duration::from_secs(1))
}

fn c11_du_bois() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=8u64 {
        let alpha = minimal_exponent(&vec![1; n as usize + 1], 2).unwrap();
        let mut k = (n + 1).div_ceil(2) as i64 - 1;
        while k >= 0 && Ratio::new((n + 1) as i64, 2) < Ratio::from_integer(k + 1) {
            k -= 1;
        }
        let expected = (k >= 0).then_some(k as u64);
        let level = du_bois_level(alpha);
        pass &= alpha == Ratio::new(n + 1, 2) && level == expected;
        parts.push(format!("n={n}: α={alpha} k={}", level.map_or("none".into(), |k| k.to_string())));
    }
    Outcome::new(pass, parts.join(", "))
}

fn c12_artin() -> Outcome {
    let rep = run_suite(4, 500, 12);
    let mut pass = rep.passed();
    let mut parts: Vec<String> = rep.checks.iter().map(|c| format!("{} {}/{}", c.name, if c.passed { c.cases } else { 0 }, c.cases)).collect();
    let a5 = ArtinAlgebra::truncated_poly(5, BaseField::Complex);
    let iso5 = a5.small_extension(&a5.basis(5)).and_then(|e| tangent_fiber_isomorphism(&e)).map(|phi| phi.is_isomorphism()).unwrap_or(false);
    let square5 = lift_square_commutes(5, BaseField::Complex).unwrap_or(false);
    pass &= iso5 && square5;
    parts.push(format!("k=5 isomorphism {iso5}, k=5 square {square5}"));
    Outcome::new(pass, parts.join(", ")).within(Duration::from_secs(30))
}

fn main() -> ExitCode {
    let timed = |id: u32, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (id, o, t.elapsed())
    };
    let mut results: Vec<(u32, Outcome, Duration)> = vec![
        timed(1, &c1_diagonalization),
        timed(2, &c2_cone_identity),
        timed(3, &c3_torus_oracle),
        timed(4, &c4_hodge_counts),
    ];
    let t = Instant::now();
    let links = catalog_links();
    let (c5, c6) = c5_c6_indicial(&links);
    let shared = t.elapsed();
    results.push((5, c5, shared));
    results.push((6, c6, shared));
    for (id, f) in [
        (7, c7_zero_mode_structure as fn() -> Outcome),
        (8, c8_weighted_radius),
        (9, c9_gluing),
        (10, c10_bott),
        (11, c11_du_bois),
        (12, c12_artin),
    ] {
        results.push(timed(id, &f));
    }
    results.sort_by_key(|r| r.0);

    let mut unexpected = Vec::new();
    for (id, o, elapsed) in &results {
        let in_time = o.limit.is_none_or(|lim| *elapsed <= lim);
        let pass = o.pass && in_time;
        let timing = match o.limit {
            Some(lim) => format!("{:.2}s (limit {}s)", elapsed.as_secs_f64(), lim.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!("criterion {id:>2}: {}  {}  [{timing}]", if pass { "PASS" } else { "FAIL" }, o.detail);
        if pass == KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    let fails = results.iter().filter(|(_, o, e)| !(o.pass && o.limit.is_none_or(|l| *e <= l))).count();
    println!("{} of {} criteria pass; known failures: {KNOWN_FAILURES:?}", results.len() - fails, results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
