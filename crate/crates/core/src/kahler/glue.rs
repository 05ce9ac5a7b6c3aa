use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cutoff::QuinticBump;
use super::levi::{min_eigenvalue, Hermitian};
use super::potential::Potential;
use super::{euclidean_radius, weighted_potential_jet, weighted_radius_with, RadiusConvention, WeightData};
use crate::error::{Error, Result};

/// Data of the gluing construction `q = p + ε φ r_λ² − ψ(r²/δ²) p`.
#[derive(Clone)]
pub struct GluingProblem {
    pub weights: WeightData,
    pub potential: Arc<dyn Potential>,
    pub convention: RadiusConvention,
    /// Outer cutoff, applied as `φ(r²/R²)`.
    pub phi: QuinticBump,
    pub phi_radius: f64,
    /// Inner cutoff, applied as `ψ(r²/δ²)`.
    pub psi: QuinticBump,
}

impl GluingProblem {
    /// Reciprocal radius convention, `φ` supported in the unit ball, both plateaus at `1/2`.
    pub fn new(weights: WeightData, potential: Arc<dyn Potential>) -> Result<Self> {
        if potential.m() != weights.m() {
            return Err(Error::InvalidArgument(format!(
                "potential lives on C^{} but {} weights were given",
                potential.m(),
                weights.m()
            )));
        }
        Ok(Self {
            weights,
            potential,
            convention: RadiusConvention::Reciprocal,
            phi: QuinticBump::new(0.5)?,
            phi_radius: 1.0,
            psi: QuinticBump::new(0.5)?,
        })
    }

    fn r_lambda(&self, z: &[Complex64], tol: f64) -> f64 {
        weighted_radius_with(z, &self.weights, self.convention, tol).unwrap_or(0.0)
    }

    fn rho_jet(&self, z: &[Complex64], tol: f64) -> Jet {
        let (value, dz, levi) = weighted_potential_jet(z, &self.weights, self.convention, tol)
            .expect("samples avoid the origin and match the weight count");
        Jet { value, dz, levi }
    }

    /// Jet of `φ(r²/R²) r_λ²`.
    fn outer_jet(&self, z: &[Complex64], tol: f64) -> Jet {
        let phi = Jet::radial(&self.phi, self.phi_radius, z);
        if phi.value == 0.0 && phi.dz.iter().all(|v| v.norm() == 0.0) {
            return phi;
        }
        phi.times(&self.rho_jet(z, tol))
    }

    /// Jet of `q = p + ε φ r_λ² − ψ(r²/δ²) p`.
    fn glued_jet(&self, eps: f64, delta: f64, z: &[Complex64], tol: f64) -> Jet {
        let p = Jet::of(self.potential.as_ref(), z);
        let cut = Jet::radial(&self.psi, delta, z).times(&p).scaled(-1.0);
        p.plus(&self.outer_jet(z, tol).scaled(eps)).plus(&cut)
    }

    /// `φ(r²/R²) r_λ²`.
    fn outer_term(&self, z: &[Complex64], tol: f64) -> f64 {
        let r2 = euclidean_radius(z).powi(2);
        let phi = self.phi.value(r2 / (self.phi_radius * self.phi_radius));
        if phi == 0.0 {
            return 0.0;
        }
        phi * self.r_lambda(z, tol).powi(2)
    }
}

/// Value, holomorphic gradient `∂f/∂z_a` and Levi form of a real function at a point.
#[derive(Clone, Debug)]
struct Jet {
    value: f64,
    dz: Vec<Complex64>,
    levi: Hermitian,
}

impl Jet {
    fn of(p: &dyn Potential, z: &[Complex64]) -> Self {
        Self {
            value: p.value(z),
            dz: p.dz(z),
            levi: p.levi(z),
        }
    }

    /// `χ(|z|²/s²)`.
    fn radial(chi: &QuinticBump, scale: f64, z: &[Complex64]) -> Self {
        let s2 = scale * scale;
        let x = euclidean_radius(z).powi(2) / s2;
        let (d1, d2) = (chi.d1(x) / s2, chi.d2(x) / (s2 * s2));
        let m = z.len();
        let mut levi = Hermitian::zeros(m);
        for a in 0..m {
            for b in 0..m {
                let diag = if a == b { d1 } else { 0.0 };
                levi.set(a, b, z[a].conj() * z[b] * d2 + diag);
            }
        }
        Self {
            value: chi.value(x),
            dz: z.iter().map(|v| v.conj() * d1).collect(),
            levi,
        }
    }

    fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.dz.iter_mut().for_each(|v| *v *= c);
        self.levi.entries.iter_mut().for_each(|v| *v *= c);
        self
    }

    fn plus(mut self, o: &Jet) -> Self {
        self.value += o.value;
        self.dz.iter_mut().zip(&o.dz).for_each(|(a, b)| *a += b);
        self.levi.entries.iter_mut().zip(&o.levi.entries).for_each(|(a, b)| *a += b);
        self
    }

    /// Leibniz rule: `∂∂̄(fg) = f∂∂̄g + g∂∂̄f + ∂f⊗∂̄g + ∂g⊗∂̄f`.
    fn times(&self, o: &Jet) -> Self {
        let m = self.dz.len();
        let mut levi = Hermitian::zeros(m);
        for a in 0..m {
            for b in 0..m {
                let v = self.levi.get(a, b) * o.value
                    + o.levi.get(a, b) * self.value
                    + self.dz[a] * o.dz[b].conj()
                    + o.dz[a] * self.dz[b].conj();
                levi.set(a, b, v);
            }
        }
        Self {
            value: self.value * o.value,
            dz: self.dz.iter().zip(&o.dz).map(|(a, b)| a * o.value + b * self.value).collect(),
            levi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingOptions {
    /// Dyadic radial shells (at least 64).
    pub shells: usize,
    pub per_shell: usize,
    pub seed: u64,
    /// Multiplicative safety margin on the estimated suprema (and its inverse on `ν`).
    pub safety: f64,
    /// Smallest `ε` tried by the halving search.
    pub eps_min: f64,
    /// Tolerance for `p(0) = 0` and `∇p(0) = 0`.
    pub hypothesis_tol: f64,
    pub radius_tol: f64,
}

impl Default for GluingOptions {
    fn default() -> Self {
        Self {
            shells: 64,
            per_shell: 160,
            seed: 0x91e,
            safety: 1.1,
            eps_min: 2f64.powi(-40),
            hypothesis_tol: 1e-10,
            radius_tol: 1e-15,
        }
    }
}

/// Constants of the gluing estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `|p| ≤ M₀r²`, `|dp| ≤ M₀r`, `ddᶜp ≤ M₀ ddᶜr²`.
    pub m0: f64,
    /// `dr² ∧ dᶜr² ≤ M₁ ddᶜr²`.
    pub m1: f64,
    /// `M = M₀M₁ sup|ψ″| + 2M₀ sup|ψ′| + M₀`.
    pub m: f64,
    /// `ddᶜr_λ² ≥ ν r^{−2(1−β)} ddᶜr²` on the samples.
    pub nu: f64,
    pub sup_psi1: f64,
    pub sup_psi2: f64,
    pub samples: usize,
}

/// Stratified samples: shell `j` holds points with `|z| ∈ [2^{−j−1}R, 2^{−j}R]`, log-uniform in
/// the radius and uniform in direction.
pub fn sample_shells(m: usize, outer: f64, shells: usize, per_shell: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(shells * per_shell);
    for j in 0..shells {
        for _ in 0..per_shell {
            let r = outer * 2f64.powf(-(j as f64) - rng.gen::<f64>());
            let g: Vec<f64> = (0..2 * m).map(|_| rng.sample(StandardNormal)).collect();
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(g.chunks(2).map(|c| Complex64::new(r * c[0] / n, r * c[1] / n)).collect());
        }
    }
    out
}

fn par_max(samples: &[Vec<Complex64>], f: impl Fn(&[Complex64]) -> f64 + Sync) -> f64 {
    samples.par_iter().map(|z| f(z)).reduce(|| f64::NEG_INFINITY, f64::max)
}

fn par_min(samples: &[Vec<Complex64>], f: impl Fn(&[Complex64]) -> f64 + Sync) -> f64 {
    samples.par_iter().map(|z| f(z)).reduce(|| f64::INFINITY, f64::min)
}

/// Empirical `M₀, M₁, ν` over the samples inside `supp φ`, and `M`.
pub fn estimate_constants(prob: &GluingProblem, samples: &[Vec<Complex64>], opts: &GluingOptions) -> Result<Constants> {
    let p = &prob.potential;
    let origin = vec![Complex64::new(0.0, 0.0); prob.weights.m()];
    let (p0, g0) = (p.value(&origin), p.gradient_norm(&origin));
    if p0.abs() > opts.hypothesis_tol || g0 > opts.hypothesis_tol {
        return Err(Error::Hypothesis(format!("the potential must satisfy p(0) = 0 and dp(0) = 0; got p(0) = {p0:e}, |dp(0)| = {g0:e}")));
    }
    let inside: Vec<Vec<Complex64>> = samples
        .iter()
        .filter(|z| {
            let r = euclidean_radius(z);
            r > 0.0 && r <= prob.phi_radius
        })
        .cloned()
        .collect();
    if inside.is_empty() {
        return Err(Error::InvalidArgument("no samples inside the support of the outer cutoff".into()));
    }
    let m0 = opts.safety
        * par_max(&inside, |z| {
            let r = euclidean_radius(z);
            (p.value(z).abs() / (r * r)).max(p.gradient_norm(z) / r).max(p.levi(z).norm())
        });
    // dr² ∧ dᶜr² has Levi matrix z̄_a z_b with top eigenvalue r²; ddᶜr² has the identity.
    let m1 = opts.safety * par_max(&inside, |z| euclidean_radius(z).powi(2));
    let beta = prob.weights.beta();
    let tol = opts.radius_tol;
    let nu = par_min(&inside, |z| {
        let r = euclidean_radius(z);
        min_eigenvalue(&prob.rho_jet(z, tol).levi) * r.powf(2.0 * (1.0 - beta))
    }) / opts.safety;
    let (s1, s2) = (prob.psi.sup_d1(), prob.psi.sup_d2());
    Ok(Constants {
        m0,
        m1,
        m: m0 * m1 * s2 + 2.0 * m0 * s1 + m0,
        nu,
        sup_psi1: s1,
        sup_psi2: s2,
        samples: inside.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportItem {
    pub name: String,
    /// The statement being verified.
    pub claim: String,
    pub verdict: ItemVerdict,
    pub samples: usize,
    /// Largest defect (or, for positivity, the smallest Levi eigenvalue) seen.
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingReport {
    pub weights: Vec<f64>,
    pub convention: RadiusConvention,
    pub constants: Constants,
    pub epsilon: f64,
    pub epsilon_halvings: u32,
    pub delta: f64,
    /// `min{β², ν} δ^{−2(1−β)}` against `M/ε`.
    pub delta_rule: [f64; 2],
    /// `q = p` for `|z|` at least this radius.
    pub outer_radius: f64,
    /// `q = ε r_λ²` for `|z|` at most this radius.
    pub inner_radius: f64,
    pub verification_samples: usize,
    pub items: Vec<ReportItem>,
}

impl GluingReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.verdict == ItemVerdict::Pass)
    }
}

/// The glued potential with its parameters and verification report.
#[derive(Clone)]
pub struct GluedPotential {
    pub problem: GluingProblem,
    pub epsilon: f64,
    pub delta: f64,
    pub report: GluingReport,
    radius_tol: f64,
}

impl GluedPotential {
    /// `q(z) = p + ε φ r_λ² − ψ(r²/δ²) p`.
    pub fn value(&self, z: &[Complex64]) -> f64 {
        glued_value(&self.problem, self.epsilon, self.delta, z, self.radius_tol)
    }
}

fn glued_value(prob: &GluingProblem, eps: f64, delta: f64, z: &[Complex64], tol: f64) -> f64 {
    let r2 = euclidean_radius(z).powi(2);
    if r2 == 0.0 {
        return 0.0;
    }
    let p = prob.potential.value(z);
    p + eps * prob.outer_term(z, tol) - prob.psi.value(r2 / (delta * delta)) * p
}

/// Runs the construction: constants, `ε` by halving from 1 until `p + εφr_λ²` is strictly
/// plurisubharmonic on the samples, then `δ` from `min{β², ν} δ^{−2(1−β)} = M/ε`, halved once,
/// and finally verification on a fresh stratified sample set reaching below `δ`.
pub fn glue_potential(prob: &GluingProblem, opts: &GluingOptions) -> Result<GluedPotential> {
    if opts.shells < 64 || opts.per_shell == 0 {
        return Err(Error::InvalidArgument("at least 64 shells with one sample each are required".into()));
    }
    let m = prob.weights.m();
    let tol = opts.radius_tol;
    let samples = sample_shells(m, 2.0 * prob.phi_radius, opts.shells, opts.per_shell, opts.seed);
    let c = estimate_constants(prob, &samples, opts)?;
    if !(c.nu > 0.0) {
        return Err(Error::NoAdmissibleParameters(format!(
            "the weighted potential r_λ² is not uniformly strictly plurisubharmonic near 0 (ν = {:e})",
            c.nu
        )));
    }

    let p = &prob.potential;
    let mut eps = 1.0;
    let mut halvings = 0;
    loop {
        let worst = par_min(&samples, |z| {
            let l = p.levi(z);
            let o = prob.outer_jet(z, tol).levi;
            let sum = Hermitian {
                m,
                entries: l.entries.iter().zip(&o.entries).map(|(a, b)| a + b * eps).collect(),
            };
            min_eigenvalue(&sum)
        });
        if worst > 0.0 {
            break;
        }
        eps *= 0.5;
        halvings += 1;
        if eps < opts.eps_min {
            return Err(Error::NoAdmissibleParameters(format!(
                "p + εφr_λ² is not strictly plurisubharmonic on the samples for any ε ≥ {:e} (worst λ_min {worst:e})",
                opts.eps_min
            )));
        }
    }

    let beta = prob.weights.beta();
    let k = c.nu.min(beta * beta);
    let star = (k * eps / c.m).powf(1.0 / (2.0 * (1.0 - beta)));
    let delta = (0.5 * star).min(prob.phi_radius * prob.phi.plateau().sqrt());
    if !(delta > 1e-100) {
        return Err(Error::NoAdmissibleParameters(format!(
            "the δ rule gives δ = {delta:e} (min{{β², ν}} = {k:e}, ε = {eps:e}, M = {:e}); the inner region cannot be resolved",
            c.m
        )));
    }
    let delta_rule = [k * delta.powf(-2.0 * (1.0 - beta)), c.m / eps];

    // Verification shells reach from 2R down past δ/8.
    let span = (2.0 * prob.phi_radius / (delta / 8.0)).log2().ceil() as usize;
    let vshells = opts.shells.max(span);
    let mut check = sample_shells(m, 2.0 * prob.phi_radius, vshells, opts.per_shell, opts.seed ^ 0x5a5a);
    let mut rim = sample_shells(m, delta, 1, opts.per_shell, opts.seed ^ 0xa5a5);
    for z in &mut rim {
        let s = delta / euclidean_radius(z);
        z.iter_mut().for_each(|c| *c *= s);
    }
    let q = |z: &[Complex64]| glued_value(prob, eps, delta, z, tol);
    let outer_radius = prob.phi_radius.max(delta);
    let inner_radius = delta * prob.psi.plateau().sqrt();
    let mut items = Vec::new();

    let far: Vec<&Vec<Complex64>> = check.iter().filter(|z| euclidean_radius(z) >= outer_radius).collect();
    let worst = far.par_iter().map(|z| (q(z) - p.value(z)).abs()).reduce(|| 0.0, f64::max);
    items.push(ReportItem {
        name: "locality".into(),
        claim: format!("q = p for |z| ≥ {outer_radius:e}"),
        verdict: if worst == 0.0 { ItemVerdict::Pass } else { ItemVerdict::Fail },
        samples: far.len(),
        worst,
    });

    let near: Vec<&Vec<Complex64>> = check.iter().filter(|z| euclidean_radius(z) <= inner_radius).collect();
    let worst = near
        .par_iter()
        .map(|z| {
            let target = eps * prob.r_lambda(z, tol).powi(2);
            (q(z) - target).abs() / target.max(p.value(z).abs())
        })
        .reduce(|| 0.0, f64::max);
    items.push(ReportItem {
        name: "inner_equality".into(),
        claim: format!("q = ε r_λ² for |z| ≤ {inner_radius:e} (relative defect below 1e-12)"),
        verdict: if !near.is_empty() && worst < 1e-12 { ItemVerdict::Pass } else { ItemVerdict::Fail },
        samples: near.len(),
        worst,
    });

    let worst = rim
        .par_iter()
        .map(|z| {
            let p = p.value(z);
            let direct = p + eps * prob.outer_term(z, tol) - prob.psi.value(1.0) * p;
            (q(z) - direct).abs()
        })
        .reduce(|| 0.0, f64::max);
    items.push(ReportItem {
        name: "continuity_at_delta".into(),
        claim: "q agrees with p + εφr_λ² − ψ(1)p on |z| = δ to 1e-12".into(),
        verdict: if worst < 1e-12 { ItemVerdict::Pass } else { ItemVerdict::Fail },
        samples: rim.len(),
        worst,
    });

    check.append(&mut rim);
    let worst = par_min(&check, |z| min_eigenvalue(&prob.glued_jet(eps, delta, z, tol).levi));
    items.push(ReportItem {
        name: "strict_psh".into(),
        claim: "λ_min(Levi q) > 0 at every sample".into(),
        verdict: if worst > 0.0 { ItemVerdict::Pass } else { ItemVerdict::Fail },
        samples: check.len(),
        worst,
    });

    let report = GluingReport {
        weights: prob.weights.lambda().to_vec(),
        convention: prob.convention,
        constants: c,
        epsilon: eps,
        epsilon_halvings: halvings,
        delta,
        delta_rule,
        outer_radius,
        inner_radius,
        verification_samples: check.len(),
        items,
    };
    Ok(GluedPotential {
        problem: prob.clone(),
        epsilon: eps,
        delta,
        report,
        radius_tol: tol,
    })
}
