use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use conelab::artin::run_suite;
use conelab::catalog::{check_record, Registry, SingularityRecord};
use conelab::cone::{indicial_analysis, indicial_csv, ConeGeometry, ConeReport, IndicialOptions, Verdict};
use conelab::dec::{count_near_zero, eigensolve, DiscreteHodge, EigenOptions, HodgeStar, NearZeroCount, NearZeroOptions, SolverInfo};
use conelab::kahler::{glue_potential, GluingOptions, GluingProblem, GluingReport, Polynomial, PotentialDocument, RadiusConvention, WeightData};
use conelab::mesh::{MeshDocument, MeshSpec, SimplicialComplex};
use conelab::Error;

use crate::report::{emit, in_file, read_json, CliError, CliResult, Failure, Outcome, Report};
use crate::{ArtinArgs, CatalogAction, CatalogArgs, CheckConeArgs, Convention, Format, GlueArgs, IndicialArgs, MeshGenArgs, SpectrumArgs, Star};

const LOWER_BOUND_CLAIM: &str = "every eigenvalue of E satisfies λ ≥ -m^2 (up to discretization slack)";
const NOLOG_CLAIM: &str = "no eigenvalue of E equals -m^2, so harmonic forms carry no log r terms";
const NONNEGATIVE_CLAIM: &str = "the Hodge Laplacian is nonnegative";

impl From<Star> for HodgeStar {
    fn from(s: Star) -> Self {
        match s {
            Star::Whitney => HodgeStar::Whitney,
            Star::Lumped => HodgeStar::Lumped,
        }
    }
}

impl From<Convention> for RadiusConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Reciprocal => RadiusConvention::Reciprocal,
            Convention::Flow => RadiusConvention::Flow,
        }
    }
}

fn load_mesh(path: &Path) -> CliResult<SimplicialComplex> {
    let doc: MeshDocument = read_json(path)?;
    in_file(path, SimplicialComplex::from_document(&doc))
}

fn eigen_options(tol: f64, seed: u64) -> CliResult<EigenOptions> {
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(EigenOptions {
        tol,
        seed,
        ..EigenOptions::default()
    })
}

fn require_modes(k: usize) -> CliResult<()> {
    if k == 0 {
        return Err(CliError::Usage("--modes must be at least 1".into()));
    }
    Ok(())
}

fn csv_text<T: Serialize>(rows: impl IntoIterator<Item = T>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv export failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct SpectrumResult {
    degree: usize,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    near_zero_count: usize,
    near_zero: NearZeroCount,
    solver: SolverInfo,
}

#[derive(Serialize)]
struct SpectrumRow {
    j: usize,
    lambda: f64,
    residual: f64,
}

pub fn spectrum(a: &SpectrumArgs) -> CliResult<Outcome> {
    require_modes(a.modes)?;
    let mesh = load_mesh(&a.mesh)?;
    let hodge = DiscreteHodge::build(Arc::new(mesh), a.star.into())?;
    let pencil = hodge.laplacian(a.degree)?;
    let slice = eigensolve(&pencil, a.modes, &eigen_options(a.tol, a.seed)?)?;
    let nz = count_near_zero(
        &slice,
        &NearZeroOptions {
            rel_threshold: a.zero_threshold,
            reference_scale: Some(pencil.trace_scale()),
            ..NearZeroOptions::default()
        },
    );
    let mut failures = Vec::new();
    if let Some((j, &l)) = slice.eigenvalues.iter().enumerate().find(|(_, &l)| l < -1e-8) {
        failures.push(Failure::new("nonnegativity", NONNEGATIVE_CLAIM, format!("mode {j}: λ = {l:e} < -1e-8")));
    }
    let outcome = if failures.is_empty() { Outcome::Pass } else { Outcome::Fail };
    let text = match a.format {
        Format::Csv => csv_text(slice.eigenvalues.iter().zip(&slice.residuals).enumerate().map(|(j, (&lambda, &residual))| SpectrumRow {
            j,
            lambda,
            residual,
        }))?,
        Format::Json => {
            let result = SpectrumResult {
                degree: slice.degree,
                near_zero_count: nz.count,
                near_zero: nz,
                eigenvalues: slice.eigenvalues,
                residuals: slice.residuals,
                solver: slice.solver,
            };
            Report::new("spectrum", a, failures, result).to_json()?
        }
    };
    emit(a.out.as_ref(), &text)?;
    Ok(outcome)
}

/// Failed cone verdicts: the lower bound on `E`, the no-log gap and the window checks.
fn cone_failures(r: &ConeReport, bound_slack: f64) -> Vec<Failure> {
    let mut out = Vec::new();
    let m2 = r.m * r.m;
    let bound = -m2 - bound_slack * (1.0 + m2);
    if let Some(&lmin) = r.spectrum.eigenvalues.first() {
        if lmin < bound {
            out.push(Failure::new(
                "lower_bound",
                LOWER_BOUND_CLAIM,
                format!("p = {}: λ_min = {lmin:e} < {bound:e}", r.p),
            ));
        }
    }
    if r.nolog.verdict == Verdict::Fail {
        out.push(Failure::new(
            "no_log_gap",
            NOLOG_CLAIM,
            r.nolog.note.clone().unwrap_or_else(|| format!("gap {:e}", r.nolog.gap)),
        ));
    }
    for w in r.window_verdicts.iter().filter(|w| w.verdict == Verdict::Fail) {
        let detail = match w.defect {
            Some(d) => format!("p = {}: defect {d:e}; {}", r.p, w.notes.join("; ")),
            None => format!("p = {}: {}", r.p, w.notes.join("; ")),
        };
        out.push(Failure::new(
            serde_json::to_value(w.check).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            w.claim.clone(),
            detail,
        ));
    }
    out
}

fn cone_options(modes: usize, tol: f64, seed: u64, nolog_gap: f64) -> CliResult<IndicialOptions> {
    if !(nolog_gap > 0.0) {
        return Err(CliError::Usage(format!("--nolog-gap must be positive, got {nolog_gap}")));
    }
    Ok(IndicialOptions {
        modes,
        eigen: eigen_options(tol, seed)?,
        nolog_gap_tol: nolog_gap,
        ..IndicialOptions::default()
    })
}

#[derive(Serialize)]
struct IndicialResult<'a> {
    options: &'a IndicialOptions,
    report: &'a ConeReport,
}

pub fn indicial(a: &IndicialArgs) -> CliResult<Outcome> {
    require_modes(a.modes)?;
    let mesh = load_mesh(&a.mesh)?;
    if a.cone_dim != mesh.dim() + 1 {
        return Err(CliError::Usage(format!(
            "--cone-dim {} does not match a link mesh of dimension {} (expected {})",
            a.cone_dim,
            mesh.dim(),
            mesh.dim() + 1
        )));
    }
    let opts = cone_options(a.modes, a.tol, a.seed, a.nolog_gap)?;
    let g = ConeGeometry::new(Arc::new(DiscreteHodge::build(Arc::new(mesh), a.star.into())?));
    let report = indicial_analysis(&g, a.degree, &opts)?;
    let failures = cone_failures(&report, a.bound_slack);
    let outcome = if failures.is_empty() { Outcome::Pass } else { Outcome::Fail };
    let text = match a.format {
        Format::Csv => indicial_csv(&report),
        Format::Json => Report::new(
            "indicial",
            a,
            failures,
            IndicialResult {
                options: &opts,
                report: &report,
            },
        )
        .to_json()?,
    };
    emit(a.out.as_ref(), &text)?;
    Ok(outcome)
}

fn registry_base(path: &Path) -> Option<&Path> {
    path.exists().then(|| path.parent()).flatten()
}

#[derive(Serialize)]
struct DegreeSummary {
    p: usize,
    m: f64,
    lambda_min: Option<f64>,
    no_log_gap: f64,
    nolog: Verdict,
    note: Option<String>,
    windows: Vec<(String, Verdict)>,
}

#[derive(Serialize)]
struct CheckConeResult {
    check: conelab::catalog::RecordCheck,
    link_dimension: Option<usize>,
    options: Option<IndicialOptions>,
    degrees: Vec<DegreeSummary>,
}

pub fn check_cone(a: &CheckConeArgs) -> CliResult<Outcome> {
    let registry = in_file(&a.catalog, Registry::load_or_builtin(&a.catalog))?;
    let base = registry_base(&a.catalog);
    let rec = registry.get(&a.record)?;
    let check = check_record(rec, base)?;
    let mut failures = Vec::new();
    match (&check.theorem12, &check.theorem12_error) {
        (Some(v), _) if !v.holds => failures.push(Failure::new(
            "betti_hypothesis",
            v.claim.clone(),
            format!("Betti numbers {:?} give {:?}", v.betti.values, v.hypothesis),
        )),
        (None, Some(e)) => failures.push(Failure::new("betti_hypothesis", "b_{n-2}(C_reg) = 0 or b_{n-1}(C_reg) = 0", e.clone())),
        _ => {}
    }

    let mut degrees = Vec::new();
    let mut options = None;
    let mut link_dimension = None;
    if a.modes > 0 {
        if let Some(mesh) = rec.load_link_mesh(base)? {
            link_dimension = Some(mesh.dim());
            let opts = cone_options(a.modes, 1e-8, EigenOptions::default().seed, a.nolog_gap)?;
            let g = ConeGeometry::new(Arc::new(DiscreteHodge::build(Arc::new(mesh), a.star.into())?));
            let reports: Vec<ConeReport> = (1..g.l()).collect::<Vec<_>>().into_par_iter().map(|p| indicial_analysis(&g, p, &opts)).collect::<Result<_, Error>>()?;
            for r in &reports {
                failures.extend(cone_failures(r, a.bound_slack));
                degrees.push(DegreeSummary {
                    p: r.p,
                    m: r.m,
                    lambda_min: r.spectrum.eigenvalues.first().copied(),
                    no_log_gap: r.no_log_gap,
                    nolog: r.nolog.verdict,
                    note: r.nolog.note.clone(),
                    windows: r
                        .window_verdicts
                        .iter()
                        .map(|w| (serde_json::to_value(w.check).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(), w.verdict))
                        .collect(),
                });
            }
            options = Some(opts);
        }
    }
    let report = Report::new(
        "check-cone",
        a,
        failures,
        CheckConeResult {
            check,
            link_dimension,
            options,
            degrees,
        },
    );
    let outcome = report.verdict;
    emit(a.out.as_ref(), &report.to_json()?)?;
    Ok(outcome)
}

#[derive(Serialize)]
struct GlueResult {
    options: GluingOptions,
    report: Option<GluingReport>,
    error: Option<String>,
}

pub fn glue(a: &GlueArgs) -> CliResult<Outcome> {
    let weights = WeightData::new(a.weights.clone()).map_err(|e| CliError::Usage(format!("--weights: {e}")))?;
    let doc: PotentialDocument = read_json(&a.potential)?;
    let poly = in_file(&a.potential, Polynomial::from_document(weights.m(), &doc))?;
    let mut prob = GluingProblem::new(weights, Arc::new(poly))?;
    prob.convention = a.convention.into();
    let options = GluingOptions {
        shells: a.shells,
        per_shell: a.per_shell,
        seed: a.seed,
        ..GluingOptions::default()
    };
    let (failures, report, error) = match glue_potential(&prob, &options) {
        Ok(g) => {
            let f = g
                .report
                .items
                .iter()
                .filter(|i| i.verdict != conelab::kahler::ItemVerdict::Pass)
                .map(|i| Failure::new(i.name.clone(), i.claim.clone(), format!("worst {:e} over {} samples", i.worst, i.samples)))
                .collect();
            (f, Some(g.report), None)
        }
        Err(e @ Error::NoAdmissibleParameters(_)) => (
            vec![Failure::new(
                "admissible_parameters",
                "some ε, δ > 0 make the glued potential strictly plurisubharmonic",
                e.to_string(),
            )],
            None,
            Some(e.to_string()),
        ),
        Err(e) => return Err(e.into()),
    };
    let report = Report::new("glue", a, failures, GlueResult { options, report, error });
    let outcome = report.verdict;
    emit(a.out.as_ref(), &report.to_json()?)?;
    Ok(outcome)
}

#[derive(Serialize)]
struct ListEntry<'a> {
    name: &'a str,
    kind: conelab::catalog::SingularityKind,
    n: u32,
    description: &'a str,
}

pub fn catalog(a: &CatalogArgs) -> CliResult<Outcome> {
    let registry = in_file(&a.catalog, Registry::load_or_builtin(&a.catalog))?;
    let base = registry_base(&a.catalog);
    let text = match &a.action {
        CatalogAction::List => {
            let list: Vec<ListEntry> = registry
                .records
                .iter()
                .map(|r| ListEntry {
                    name: &r.name,
                    kind: r.kind,
                    n: r.n,
                    description: &r.description,
                })
                .collect();
            Report::new("catalog list", a, Vec::new(), list).to_json()?
        }
        CatalogAction::Show { name } => {
            let rec: &SingularityRecord = registry.get(name)?;
            Report::new("catalog show", a, Vec::new(), rec).to_json()?
        }
        CatalogAction::Check { name } => {
            let recs: Vec<&SingularityRecord> = match name {
                Some(n) => vec![registry.get(n)?],
                None => registry.records.iter().collect(),
            };
            let checks = recs.into_iter().map(|r| check_record(r, base)).collect::<Result<Vec<_>, Error>>()?;
            Report::new("catalog check", a, Vec::new(), checks).to_json()?
        }
        CatalogAction::Export { to } => {
            registry.save(to)?;
            Report::new("catalog export", a, Vec::new(), registry.names()).to_json()?
        }
    };
    emit(a.out.as_ref(), &text)?;
    Ok(Outcome::Pass)
}

pub fn artin(a: &ArtinArgs) -> CliResult<Outcome> {
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let suite = run_suite(a.k, a.trials, a.seed);
    let failures = suite
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| Failure::new(c.name.clone(), c.claim.clone(), c.failure.clone().unwrap_or_default()))
        .collect();
    let report = Report::new("artin-check", a, failures, &suite);
    let outcome = report.verdict;
    emit(a.out.as_ref(), &report.to_json()?)?;
    Ok(outcome)
}

pub fn mesh_gen(a: &MeshGenArgs) -> CliResult<Outcome> {
    let spec: MeshSpec = a.spec.parse().map_err(|e| CliError::Usage(format!("--spec: {e}")))?;
    let mesh = spec.build()?;
    let text = serde_json::to_string(&mesh.to_document())? + "\n";
    emit(a.out.as_ref(), &text)?;
    Ok(Outcome::Pass)
}
