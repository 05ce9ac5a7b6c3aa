//! Indicial roots, exceptional orders, the no-log gap, vanishing windows and Fredholm windows.

use serde::{Deserialize, Serialize};

use super::{assemble_e, split_e_vector, ConeGeometry};
use crate::dec::{eigensolve, EigenOptions, SpectrumSlice};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Hypothesis of the check does not hold; nothing asserted.
    Skipped,
    /// Boundary case reported for inspection rather than passed.
    Flagged,
}

/// One resolved eigenvalue of `E` and its indicial roots `m ± √(m²+λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialDatum {
    pub j: usize,
    pub lambda: f64,
    pub alpha_root: f64,
    pub beta_root: f64,
    /// `(alpha_root − p, beta_root − p)`.
    pub orders: [f64; 2],
    /// `λ = −m²` within tolerance: a double root with a logarithmic partner.
    pub double_root: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalOrder {
    pub order: f64,
    pub multiplicity: usize,
    /// Mean eigenvalue of the cluster producing this order.
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoLogVerdict {
    pub gap: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowCheck {
    /// `p > l/2`: a harmonic form of order in `(−p, p−l)` satisfies `dφ′ = (2+p−l−α)φ″`.
    DerivativeRelation,
    /// `p > l/2 + 1`: no exceptional order in `(2−p, p−l)`.
    HighDegreeVanishing,
    /// `p < l/2 − 1`: no exceptional order in `(2+p−l, −p)`.
    LowDegreeVanishing,
    /// `p ≤ l/2 − 1`: order `−p` harmonic forms have `φ′ = 0` and closed, coclosed `φ″`.
    OrderMinusPClosed,
    /// `p ≤ l/2 − 1` and `b_p = 0`: no harmonic form of order `2+p−l`.
    OrderTwoPlusPMinusLVanishing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowVerdict {
    pub check: WindowCheck,
    pub claim: String,
    pub window: Option<(f64, f64)>,
    pub verdict: Verdict,
    /// Largest measured defect, relative where applicable.
    pub defect: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmWindow {
    pub lo: f64,
    pub hi: f64,
    /// Kernels of the weighted Laplacian agree for all weights in the open window.
    pub kernel_stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialOptions {
    pub modes: usize,
    pub eigen: EigenOptions,
    /// Relative cluster tolerance for eigenvalue multiplicities.
    pub cluster_tol: f64,
    /// `|λ + m²| ≤ root_tol·(1+m²)` counts as a double root; below that, quarantine.
    pub root_tol: f64,
    /// Eigenvalues with `|λ| ≤ zero_tol·max(1, |λ|_max)` are zero modes.
    pub zero_tol: f64,
    /// Tolerance on eigenvector relations in window checks.
    pub relation_tol: f64,
    pub nolog_gap_tol: f64,
}

impl Default for IndicialOptions {
    fn default() -> Self {
        Self {
            modes: 40,
            eigen: EigenOptions::default(),
            cluster_tol: 1e-6,
            root_tol: 1e-8,
            zero_tol: 1e-6,
            relation_tol: 1e-4,
            nolog_gap_tol: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub l: usize,
    pub p: usize,
    pub m: f64,
    pub spectrum: SpectrumSlice,
    pub indicial: Vec<IndicialDatum>,
    pub exceptional_orders: Vec<ExceptionalOrder>,
    pub no_log_gap: f64,
    pub nolog: NoLogVerdict,
    /// Orders in this closed interval are complete: every exceptional order inside it comes
    /// from a resolved eigenvalue.
    pub complete_order_interval: Option<(f64, f64)>,
    /// Indices of modes with `λ < −m²` beyond tolerance (discretization artifacts).
    pub quarantined: Vec<usize>,
    pub warnings: Vec<String>,
    pub window_verdicts: Vec<WindowVerdict>,
    pub fredholm_windows: Vec<FredholmWindow>,
}

/// Spectrum of `E` in degree `p`, indicial roots, exceptional orders and all verdicts.
pub fn indicial_analysis(g: &ConeGeometry, p: usize, opts: &IndicialOptions) -> Result<ConeReport> {
    if opts.modes == 0 {
        return Err(Error::InvalidArgument("at least one mode is required".into()));
    }
    let pencil = assemble_e(g, p)?;
    let k = opts.modes.min(pencil.dim());
    let spectrum = eigensolve(&pencil, k, &opts.eigen)?;
    let mut report = report_from_spectrum(g.l(), p, spectrum, opts);
    report.window_verdicts = classify_windows(g, &report, opts)?;
    Ok(report)
}

fn report_from_spectrum(l: usize, p: usize, spectrum: SpectrumSlice, opts: &IndicialOptions) -> ConeReport {
    let m = 1.0 + p as f64 - l as f64 / 2.0;
    let m2 = m * m;
    let root_tol = opts.root_tol * (1.0 + m2);
    let mut indicial = Vec::new();
    let mut quarantined = Vec::new();
    let mut warnings = Vec::new();
    for (j, &lambda) in spectrum.eigenvalues.iter().enumerate() {
        let disc = lambda + m2;
        if disc < -root_tol {
            quarantined.push(j);
            warnings.push(format!(
                "mode {j}: λ = {lambda:.6e} lies below −m² = {:.6e}; complex roots withheld",
                -m2
            ));
            continue;
        }
        let double_root = disc.abs() <= root_tol;
        let s = if double_root { 0.0 } else { disc.sqrt() };
        let (a, b) = (m + s, m - s);
        indicial.push(IndicialDatum {
            j,
            lambda,
            alpha_root: a,
            beta_root: b,
            orders: [a - p as f64, b - p as f64],
            double_root,
        });
    }
    let exceptional_orders = cluster_orders(&indicial, m, p, opts.cluster_tol);
    let no_log_gap = spectrum
        .eigenvalues
        .iter()
        .map(|l| (l + m2).abs())
        .fold(f64::INFINITY, f64::min);
    let complete_order_interval = spectrum.eigenvalues.last().and_then(|&top| {
        let disc = top + m2;
        (disc >= 0.0).then(|| (m - disc.sqrt() - p as f64, m + disc.sqrt() - p as f64))
    });
    let mut report = ConeReport {
        l,
        p,
        m,
        spectrum,
        indicial,
        exceptional_orders,
        no_log_gap,
        nolog: NoLogVerdict {
            gap: no_log_gap,
            tolerance: opts.nolog_gap_tol,
            verdict: Verdict::Pass,
            note: None,
        },
        complete_order_interval,
        quarantined,
        warnings,
        window_verdicts: Vec::new(),
        fredholm_windows: Vec::new(),
    };
    report.nolog = nolog_verdict(&report, opts.nolog_gap_tol);
    report
}

/// Groups eigenvalues into clusters (relative tolerance against the spectral scale) and emits
/// both orders of each cluster with the cluster size as multiplicity.
fn cluster_orders(indicial: &[IndicialDatum], m: f64, p: usize, tol: f64) -> Vec<ExceptionalOrder> {
    let scale = indicial.iter().fold(1.0f64, |a, d| a.max(d.lambda.abs()));
    let mut clusters: Vec<Vec<&IndicialDatum>> = Vec::new();
    for d in indicial {
        match clusters.last_mut() {
            Some(c) if (d.lambda - c.last().unwrap().lambda).abs() <= tol * scale => c.push(d),
            _ => clusters.push(vec![d]),
        }
    }
    let mut out = Vec::new();
    for c in clusters {
        let lambda = c.iter().map(|d| d.lambda).sum::<f64>() / c.len() as f64;
        let n = c.len();
        if c.iter().any(|d| d.double_root) {
            out.push(ExceptionalOrder {
                order: m - p as f64,
                multiplicity: 2 * n,
                lambda,
            });
            continue;
        }
        let s = (lambda + m * m).max(0.0).sqrt();
        for root in [m - s, m + s] {
            out.push(ExceptionalOrder {
                order: root - p as f64,
                multiplicity: n,
                lambda,
            });
        }
    }
    out.sort_by(|a, b| a.order.total_cmp(&b.order));
    out
}

/// The no-log criterion `min_j |λ_j + m²| > gap_tol`.
///
/// When `m = 0` a zero eigenvalue of `E` (a harmonic link form) sits exactly at `−m²`; such
/// degrees are reported as a flagged boundary case instead of a pass or fail.
pub fn nolog_verdict(report: &ConeReport, gap_tol: f64) -> NoLogVerdict {
    let gap = report.no_log_gap;
    let (verdict, note) = if gap > gap_tol {
        (Verdict::Pass, None)
    } else if report.m == 0.0 {
        (
            Verdict::Flagged,
            Some(format!(
                "m = 0 boundary: eigenvalue {gap:.3e} from −m² = 0 comes from harmonic link forms; \
                 the double root 0 is excluded by the degree argument p = l/2 + 1, not by a spectral gap"
            )),
        )
    } else {
        (
            Verdict::Fail,
            Some(format!(
                "no-log gap violated: min |λ_j + m²| = {gap:.3e} ≤ {gap_tol:.3e} with m = {}",
                report.m
            )),
        )
    };
    NoLogVerdict {
        gap,
        tolerance: gap_tol,
        verdict,
        note,
    }
}

fn orders_in(report: &ConeReport, lo: f64, hi: f64, tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut inside = Vec::new();
    let mut endpoints = Vec::new();
    for e in &report.exceptional_orders {
        if (e.order - lo).abs() <= tol || (e.order - hi).abs() <= tol {
            endpoints.push(e.order);
        } else if e.order > lo && e.order < hi {
            inside.push(e.order);
        }
    }
    (inside, endpoints)
}

fn coverage_note(report: &ConeReport, lo: f64, hi: f64) -> Option<String> {
    match report.complete_order_interval {
        Some((a, b)) if a <= lo && hi <= b => None,
        Some((a, b)) => Some(format!(
            "window ({lo}, {hi}) extends beyond the resolved order interval [{a:.4}, {b:.4}]; \
             only its resolved part is certified"
        )),
        None => Some("no resolved order interval".into()),
    }
}

/// Evaluates every window statement whose hypothesis holds for `(l, p)`.
pub fn classify_windows(g: &ConeGeometry, report: &ConeReport, opts: &IndicialOptions) -> Result<Vec<WindowVerdict>> {
    let (l, p) = (report.l as f64, report.p as f64);
    let two_p = 2 * report.p;
    let lint = report.l;
    let order_tol = 1e-8;
    let mut out = Vec::new();

    // Vanishing windows: no exceptional orders strictly inside.
    let vanishing = [
        (
            WindowCheck::HighDegreeVanishing,
            two_p > lint + 2,
            (2.0 - p, p - l),
            "p > l/2 + 1: no homogeneous harmonic p-form has order in (2−p, p−l)",
        ),
        (
            WindowCheck::LowDegreeVanishing,
            two_p + 2 < lint,
            (2.0 + p - l, -p),
            "p < l/2 − 1: no homogeneous harmonic p-form has order in (2+p−l, −p)",
        ),
    ];
    for (check, hyp, (lo, hi), claim) in vanishing {
        if !hyp {
            out.push(skipped(check, claim, "degree hypothesis fails"));
            continue;
        }
        let (inside, endpoints) = orders_in(report, lo, hi, order_tol);
        let mut notes: Vec<String> = endpoints.iter().map(|o| format!("order {o} at a window endpoint")).collect();
        notes.extend(coverage_note(report, lo, hi));
        notes.extend(inside.iter().map(|o| format!("exceptional order {o} inside the window")));
        out.push(WindowVerdict {
            check,
            claim: claim.into(),
            window: Some((lo, hi)),
            verdict: if inside.is_empty() { Verdict::Pass } else { Verdict::Fail },
            defect: None,
            notes,
        });
    }

    // Derivative relation on eigenvectors whose order falls in (−p, p−l).
    {
        let check = WindowCheck::DerivativeRelation;
        let claim = "p > l/2: harmonic p-forms of order α in (−p, p−l) satisfy dφ′ = (2+p−l−α)φ″";
        if two_p > lint {
            let (lo, hi) = (-p, p - l);
            let mut worst: f64 = 0.0;
            let mut tested = 0;
            for d in &report.indicial {
                let v = &report.spectrum.eigenvectors[d.j];
                let (fp, fpp) = split_e_vector(g, report.p, v);
                for order in d.orders {
                    if !(order > lo + order_tol && order < hi - order_tol) {
                        continue;
                    }
                    tested += 1;
                    let c = 2.0 + p - l - order;
                    let mut r = g.d(report.p as isize - 1, &fp);
                    r.iter_mut().zip(&fpp).for_each(|(a, b)| *a -= c * b);
                    let norm = cochain_norm(g, report.p as isize, &r);
                    let scale = (cochain_norm(g, report.p as isize - 1, &fp).powi(2)
                        + cochain_norm(g, report.p as isize, &fpp).powi(2))
                    .sqrt();
                    worst = worst.max(norm / scale.max(f64::MIN_POSITIVE));
                }
            }
            let mut notes = vec![format!("{tested} (eigenvector, order) pairs in the window")];
            notes.extend(coverage_note(report, lo, hi));
            out.push(WindowVerdict {
                check,
                claim: claim.into(),
                window: Some((lo, hi)),
                verdict: if worst <= opts.relation_tol { Verdict::Pass } else { Verdict::Fail },
                defect: Some(worst),
                notes,
            });
        } else {
            out.push(skipped(check, claim, "degree hypothesis fails"));
        }
    }

    // Zero modes of E carry the orders −p and 2+p−l.
    let lambda_scale = report.spectrum.eigenvalues.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let zeros: Vec<usize> = report
        .spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() <= opts.zero_tol * lambda_scale)
        .map(|(j, _)| j)
        .collect();
    let low = two_p + 2 <= lint;
    {
        let check = WindowCheck::OrderMinusPClosed;
        let claim = "p ≤ l/2 − 1: an order −p harmonic p-form has φ′ = 0 and dφ″ = δφ″ = 0";
        if low {
            let mut worst: f64 = 0.0;
            for &j in &zeros {
                let (fp, fpp) = split_e_vector(g, report.p, &report.spectrum.eigenvectors[j]);
                let n1 = cochain_norm(g, report.p as isize - 1, &fp);
                let n2 = cochain_norm(g, report.p as isize, &fpp);
                let total = (n1 * n1 + n2 * n2).sqrt().max(f64::MIN_POSITIVE);
                worst = worst.max(n1 / total);
                let dphi = g.d(report.p as isize, &fpp);
                let cod = g.delta(report.p as isize, &fpp)?;
                let n2 = n2.max(f64::MIN_POSITIVE);
                worst = worst.max(cochain_norm(g, report.p as isize + 1, &dphi) / n2);
                worst = worst.max(cochain_norm(g, report.p as isize - 1, &cod) / n2);
            }
            out.push(WindowVerdict {
                check,
                claim: claim.into(),
                window: None,
                verdict: if worst <= opts.relation_tol { Verdict::Pass } else { Verdict::Fail },
                defect: Some(worst),
                notes: vec![format!("{} zero modes of E examined", zeros.len())],
            });
        } else {
            out.push(skipped(check, claim, "degree hypothesis fails"));
        }
    }
    {
        let check = WindowCheck::OrderTwoPlusPMinusLVanishing;
        let claim = "p ≤ l/2 − 1 and b_p = 0: no nonzero harmonic p-form of order 2+p−l";
        let bp = if low {
            g.link().complex().betti().values.get(report.p).copied().unwrap_or(0)
        } else {
            0
        };
        if !low {
            out.push(skipped(check, claim, "degree hypothesis fails"));
        } else if bp != 0 {
            out.push(skipped(check, claim, &format!("b_p = {bp} ≠ 0")));
        } else {
            out.push(WindowVerdict {
                check,
                claim: claim.into(),
                window: None,
                verdict: if zeros.is_empty() { Verdict::Pass } else { Verdict::Fail },
                defect: None,
                notes: vec![format!("{} zero modes of E", zeros.len())],
            });
        }
    }
    Ok(out)
}

/// Mass norm of a link k-cochain; zero for the empty cochain of an absent degree.
fn cochain_norm(g: &ConeGeometry, k: isize, x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        g.link().norm(k as usize, x)
    }
}

fn skipped(check: WindowCheck, claim: &str, why: &str) -> WindowVerdict {
    WindowVerdict {
        check,
        claim: claim.into(),
        window: None,
        verdict: Verdict::Skipped,
        defect: None,
        notes: vec![why.into()],
    }
}

/// Maximal open subintervals of `(a, b)` free of exceptional orders.
pub fn fredholm_windows(report: &ConeReport, a: f64, b: f64) -> Result<Vec<FredholmWindow>> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty weight interval [{a}, {b}]")));
    }
    match report.complete_order_interval {
        Some((lo, hi)) if lo <= a && b <= hi => {}
        Some((lo, hi)) => return Err(Error::InsufficientCoverage { lo, hi, a, b }),
        None => {
            return Err(Error::InsufficientCoverage {
                lo: f64::NAN,
                hi: f64::NAN,
                a,
                b,
            })
        }
    }
    let mut cuts: Vec<f64> = report
        .exceptional_orders
        .iter()
        .map(|e| e.order)
        .filter(|&o| o > a && o < b)
        .collect();
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    let mut bounds = vec![a];
    bounds.extend(cuts);
    bounds.push(b);
    Ok(bounds
        .windows(2)
        .map(|w| FredholmWindow {
            lo: w[0],
            hi: w[1],
            kernel_stable: true,
        })
        .collect())
}

/// CSV projection: one row per resolved mode.
pub fn indicial_csv(report: &ConeReport) -> String {
    let mut s = String::from("j,lambda,alpha_root,beta_root,order_alpha,order_beta\n");
    for d in &report.indicial {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e}\n",
            d.j, d.lambda, d.alpha_root, d.beta_root, d.orders[0], d.orders[1]
        ));
    }
    s
}
