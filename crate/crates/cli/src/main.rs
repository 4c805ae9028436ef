//! `gaussbalance`: runs the verification suites and writes their tables.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gaussbalance::suites::{self, Severity, SuiteReport, Tolerances, CONE_PS};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Cone family sweep, endpoint limits and derivative check.
    VerifyCone,
    /// Critical-point uniqueness and the scalar inequalities.
    VerifyClaims,
    /// Planar slice property, Steiner and Ehrhard symmetrization.
    VerifyPlanar,
    /// Covering radii, successive minima, lattice vs balancing.
    VerifyLattice,
    /// Sign balancing identities and dyadic decompositions.
    VerifyBalancing,
    /// The shifted-cone family with growing balancing constant.
    Counterexample,
    /// Bound functions f, f_alpha, f_beta, q and asymptotics.
    BoundsTable,
    /// Every suite with default sizes.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyCone => "verify-cone",
            Command::VerifyClaims => "verify-claims",
            Command::VerifyPlanar => "verify-planar",
            Command::VerifyLattice => "verify-lattice",
            Command::VerifyBalancing => "verify-balancing",
            Command::Counterexample => "counterexample",
            Command::BoundsTable => "bounds-table",
            Command::All => "all",
        }
    }

    /// Grid key that a bare `--grid N` refers to.
    fn grid_key(self) -> Option<&'static str> {
        match self {
            Command::VerifyCone => Some("cone"),
            Command::VerifyClaims => Some("claims"),
            Command::VerifyPlanar => Some("ehrhard"),
            Command::VerifyLattice => Some("lattice"),
            Command::VerifyBalancing => Some("dyadic"),
            Command::Counterexample | Command::BoundsTable | Command::All => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "gaussbalance",
    version,
    about = "Verification suites for Gaussian measure, balancing and covering computations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Probabilities, comma separated or repeated.
    #[arg(long = "p", value_delimiter = ',', global = true)]
    p: Vec<f64>,
    /// Grid size for the command's main grid, or KEY=N with KEY in
    /// cone, claims, ehrhard, lattice, dyadic.
    #[arg(long, global = true)]
    grid: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override KEY=VALUE, repeatable.
    #[arg(long, global = true)]
    tol: Vec<String>,
    /// Directory for report files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// JSON file with any of: p, grid, seed, tolerances, out, format.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    p: Option<Vec<f64>>,
    #[serde(default)]
    grid: Grids,
    seed: Option<u64>,
    #[serde(default)]
    tolerances: Tolerances,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct Grids {
    cone: Option<usize>,
    claims: Option<usize>,
    ehrhard: Option<usize>,
    lattice: Option<usize>,
    dyadic: Option<u32>,
}

impl Grids {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let n: usize = value
            .parse()
            .with_context(|| format!("grid value `{value}`"))?;
        match key {
            "cone" => self.cone = Some(n),
            "claims" => self.claims = Some(n),
            "ehrhard" => self.ehrhard = Some(n),
            "lattice" => self.lattice = Some(n),
            "dyadic" => self.dyadic = Some(u32::try_from(n)?),
            _ => bail!("unknown grid key `{key}` (cone, claims, ehrhard, lattice, dyadic)"),
        }
        Ok(())
    }
}

/// Flags merged over the optional config file.
#[derive(Debug)]
struct RunConfig {
    command: Command,
    p: Option<Vec<f64>>,
    grid: Grids,
    seed: u64,
    tol: Tolerances,
    out: Option<PathBuf>,
    format: Format,
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<FileConfig>(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let mut grid = file.grid;
        for g in &cli.grid {
            match g.split_once('=') {
                Some((k, v)) => grid.set(k.trim(), v.trim())?,
                None => match cli.command.grid_key() {
                    Some(k) => grid.set(k, g)?,
                    None => bail!(
                        "`{}` has several grids; use --grid KEY=N",
                        cli.command.name()
                    ),
                },
            }
        }
        let mut tol = file.tolerances;
        for t in &cli.tol {
            let (k, v) = t.split_once('=').context("--tol expects KEY=VALUE")?;
            let v: f64 = v
                .trim()
                .parse()
                .with_context(|| format!("tolerance value `{v}`"))?;
            tol.set(k.trim(), v).map_err(anyhow::Error::msg)?;
        }
        let p = if cli.p.is_empty() {
            file.p
        } else {
            Some(cli.p)
        };
        if let Some(ps) = &p {
            if let Some(bad) = ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                bail!("probability {bad} is outside (0, 1)");
            }
        }
        Ok(Self {
            command: cli.command,
            p,
            grid,
            seed: cli.seed.or(file.seed).unwrap_or(42),
            tol,
            out: cli.out.or(file.out),
            format: cli.format.or(file.format).unwrap_or_default(),
        })
    }

    fn ps(&self, default: &[f64]) -> Vec<f64> {
        self.p.clone().unwrap_or_else(|| default.to_vec())
    }
}

fn cone(cfg: &RunConfig) -> SuiteReport {
    let mut ps = CONE_PS.to_vec();
    ps.extend(suites::CONJECTURE_PS);
    let mut r = suites::cone_sweeps(&cfg.ps(&ps), cfg.grid.cone.unwrap_or(200), &cfg.tol);
    r.merge(suites::cone_derivative(
        &[0.25, 0.5, 0.75],
        50,
        cfg.seed,
        &cfg.tol,
    ));
    r
}

fn claims(cfg: &RunConfig) -> SuiteReport {
    let n = cfg.grid.claims.unwrap_or(1000);
    let mut r = suites::critical_points(&cfg.ps(&CONE_PS));
    r.merge(suites::inequality_sweeps(n, n));
    r
}

fn planar(cfg: &RunConfig) -> SuiteReport {
    let mut r = suites::planar_property(1000, 100, cfg.seed, &cfg.tol);
    r.merge(suites::ehrhard_consistency(
        &suites::ehrhard_specs(),
        cfg.grid.ehrhard.unwrap_or(200),
        &cfg.tol,
    ));
    r
}

fn lattice(cfg: &RunConfig) -> SuiteReport {
    let grid = cfg.grid.lattice.unwrap_or(48);
    let mut r = suites::lattice_values(grid, &cfg.tol);
    r.merge(suites::alpha_beta(100, cfg.seed, grid, &cfg.tol));
    r.merge(suites::tensorization(20, cfg.seed, grid));
    r
}

fn balancing(cfg: &RunConfig) -> SuiteReport {
    let mut r = suites::balancing_examples();
    r.merge(suites::decomposition(
        cfg.grid.dyadic.unwrap_or(6),
        cfg.seed,
    ));
    r
}

fn counterexample(cfg: &RunConfig) -> SuiteReport {
    let mut r = SuiteReport::default();
    for p in cfg.ps(&[0.25]) {
        r.merge(suites::counterexample(p, &[1e-1, 1e-2, 1e-3], &cfg.tol));
    }
    r
}

fn bounds(cfg: &RunConfig) -> SuiteReport {
    suites::bounds_suite(&cfg.ps(&suites::default_bound_ps()), &cfg.tol)
}

fn run_suites(cfg: &RunConfig) -> SuiteReport {
    match cfg.command {
        Command::VerifyCone => cone(cfg),
        Command::VerifyClaims => claims(cfg),
        Command::VerifyPlanar => planar(cfg),
        Command::VerifyLattice => lattice(cfg),
        Command::VerifyBalancing => balancing(cfg),
        Command::Counterexample => counterexample(cfg),
        Command::BoundsTable => bounds(cfg),
        Command::All => {
            let mut r = SuiteReport::default();
            for suite in [
                cone,
                claims,
                planar,
                lattice,
                balancing,
                counterexample,
                bounds,
            ] {
                r.merge(suite(cfg));
            }
            r
        }
    }
}

fn write_report(cfg: &RunConfig, report: &SuiteReport) -> Result<()> {
    let name = cfg.command.name();
    let files: Vec<(String, String)> = match cfg.format {
        Format::Json => vec![("report.json".into(), output::report_json(name, report))],
        Format::Csv => std::iter::once((
            "summary.csv".into(),
            output::summary_csv(name, &report.checks),
        ))
        .chain(
            report
                .tables
                .iter()
                .map(|t| (format!("{}.csv", t.name), output::table_csv(name, t))),
        )
        .collect(),
    };
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (file, text) in &files {
                let path: &Path = &dir.join(file);
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => {
            let joined: Vec<&str> = files.iter().map(|(_, t)| t.as_str()).collect();
            print!("{}", joined.join("\n"));
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GAUSSBALANCE_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("GAUSSBALANCE_THREADS=`{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match configure_threads().and_then(|_| RunConfig::from_cli(cli)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = run_suites(&cfg);
    for c in &report.checks {
        let verdict = match (c.passed, c.severity) {
            (true, _) => "PASS",
            (false, Severity::Hard) => "FAIL",
            (false, Severity::Soft) => "WARN",
        };
        eprintln!("{verdict} {} {}", c.id, c.detail);
    }
    if let Err(e) = write_report(&cfg, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.hard_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
