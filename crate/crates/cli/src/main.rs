mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{CliError, CliResult, Outcome};

#[derive(Parser, Debug)]
#[command(name = "conelab", version, about = "Spectral, Kähler and algebraic checks for cones over simplicial links")]
#[command(after_help = "Exit status: 0 when every verdict passes, 2 on any failed verdict, 1 on errors.\n\
CONELAB_THREADS caps the worker pool.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest eigenvalues of the Hodge Laplacian on p-forms of a mesh.
    Spectrum(SpectrumArgs),
    /// Indicial roots, exceptional orders and window verdicts for the cone over a mesh.
    Indicial(IndicialArgs),
    /// Betti hypothesis, local-cohomology flag and link spectra for a catalog record.
    CheckCone(CheckConeArgs),
    /// Glue a weighted cone potential into a plurisubharmonic potential near the origin.
    Glue(GlueArgs),
    /// Inspect the singularity registry.
    Catalog(CatalogArgs),
    /// Exact checks over truncated polynomial algebras and their finite modules.
    ArtinCheck(ArtinArgs),
    /// Write a built-in mesh as mesh JSON.
    MeshGen(MeshGenArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Star {
    #[default]
    Whitney,
    Lumped,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Convention {
    #[default]
    Reciprocal,
    Flow,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    /// Mesh JSON file.
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    degree: usize,
    /// Number of eigenpairs.
    #[arg(long, default_value_t = 20)]
    modes: usize,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Zero-mode threshold relative to the spectral scale.
    #[arg(long, default_value_t = 1e-6)]
    zero_threshold: f64,
    #[arg(long, value_enum, default_value_t)]
    star: Star,
    /// Seed of the eigensolver's starting block.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct IndicialArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Real dimension of the cone (mesh dimension plus one).
    #[arg(long)]
    cone_dim: usize,
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value_t = 40)]
    modes: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Required separation of every eigenvalue from -m^2.
    #[arg(long, default_value_t = 0.1)]
    nolog_gap: f64,
    /// Slack of the lower bound on E, relative to 1 + m^2.
    #[arg(long, default_value_t = 0.05)]
    bound_slack: f64,
    #[arg(long, value_enum, default_value_t)]
    star: Star,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct CheckConeArgs {
    /// Record name in the registry.
    #[arg(long)]
    record: String,
    /// Registry file; the built-in records are used when it does not exist.
    #[arg(long, default_value = "catalog.json")]
    catalog: PathBuf,
    /// Eigenpairs per degree for the link spectra; 0 skips them.
    #[arg(long, default_value_t = 16)]
    modes: usize,
    #[arg(long, default_value_t = 0.1)]
    nolog_gap: f64,
    #[arg(long, default_value_t = 0.05)]
    bound_slack: f64,
    #[arg(long, value_enum, default_value_t)]
    star: Star,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GlueArgs {
    /// Comma-separated weights in (0, 1).
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Potential file: a monomial dictionary such as {"z1 zbar1": 1.0}.
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    convention: Convention,
    #[arg(long, default_value_t = 64)]
    shells: usize,
    #[arg(long, default_value_t = 160)]
    per_shell: usize,
    #[arg(long, default_value_t = 0x91e)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CatalogArgs {
    #[command(subcommand)]
    action: CatalogAction,
    /// Registry file; the built-in records are used when it does not exist.
    #[arg(long, global = true, default_value = "catalog.json")]
    catalog: PathBuf,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum CatalogAction {
    /// Names and kinds of all records.
    List,
    /// One record in full.
    Show {
        #[arg(long)]
        name: String,
    },
    /// Minimal exponent, Du Bois level and hypothesis checks for one record or all of them.
    Check {
        #[arg(long)]
        name: Option<String>,
    },
    /// Write the registry (built-ins when the file is absent) to a file.
    Export {
        #[arg(long)]
        to: PathBuf,
    },
}

#[derive(Args, Debug, Serialize)]
struct ArtinArgs {
    /// Largest truncation order k of A_k = C[t]/(t^{k+1}).
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Number of random modules.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MeshGenArgs {
    /// Generator, e.g. "torus(3,8,tau)" or "product(icosphere(1),circle(5,tau))".
    #[arg(long)]
    spec: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CONELAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("CONELAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> CliResult<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Indicial(a) => commands::indicial(&a),
        Command::CheckCone(a) => commands::check_cone(&a),
        Command::Glue(a) => commands::glue(&a),
        Command::Catalog(a) => commands::catalog(&a),
        Command::ArtinCheck(a) => commands::artin(&a),
        Command::MeshGen(a) => commands::mesh_gen(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
