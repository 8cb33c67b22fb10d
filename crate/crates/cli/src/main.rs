use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use qbiv::bivariate::{BivQNormalParams, DensityGrid};
use qbiv::egoe::{binomial_exact, q_finite_n, rho_finite_n, SystemSpec};
use qbiv::ensemble::{
    run_ensemble, EnsembleKind, EnsembleReport, EnsembleRun, DEFAULT_DIMENSION_CAP,
};
use qbiv::npc::{npc_curve, NpcCurve, NpcParams};
use qbiv::qcore::QParams;
use qbiv::tables::{
    compare_with_fixture, make_table, PrintedTable, Table, TableMode, TableRequest, FIXTURE_TOL,
};

/// Validation runs fail when a gating |z| exceeds this. mu22 and mu60 test the
/// bivariate form itself and are only reported.
const Z_LIMIT: f64 = 4.0;
const GATING: [&str; 2] = ["mu11", "mu40-2"];

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Mismatch(_) => 1,
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl From<qbiv::Error> for CliError {
    fn from(e: qbiv::Error) -> Self {
        match e {
            qbiv::Error::Domain(_)
            | qbiv::Error::UnsupportedMoment { .. }
            | qbiv::Error::DimensionCap { .. } => Self::Usage(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "qbiv",
    version,
    about = "Bivariate q-normal transition strength densities from embedded ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment tables (dilute limit or finite N), optionally checked against the published values.
    Tables(TablesArgs),
    /// Bivariate density on a square grid, with a gnuplot sidecar.
    DensityGrid(DensityArgs),
    /// NPC curves in transition strengths.
    Npc(NpcArgs),
    /// Monte Carlo ensemble run compared against the finite-N formulas.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Table1,
    Table2,
    Table3,
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Orthogonal,
    Unitary,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Compare with the printed values (|diff| <= 5e-4); exit 1 on mismatch.
    #[arg(long)]
    check: bool,
    /// Orbitals; a custom table with N uses the finite-N formulas.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Body ranks, comma separated (default 1..=m).
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Transition ranks, comma separated (default 1,2).
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long = "N", default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long)]
    t: Option<usize>,
    /// Correlation coefficient; overrides the finite-N value.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Overrides the finite-N value.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct NpcArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Body ranks; default 2..=m, one curve each.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// q of the final-state density (default q).
    #[arg(long)]
    qprime: Option<f64>,
    #[arg(long = "sigma-hat", default_value_t = 1.0)]
    sigma_hat: f64,
    #[arg(
        long = "delta-hat",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    delta_hat: f64,
    /// Energy grid points per curve.
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 200)]
    members: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value = "unitary")]
    kind: Kind,
    /// Largest many-particle dimension accepted.
    #[arg(long, default_value_t = DEFAULT_DIMENSION_CAP)]
    cap: usize,
    /// Also write per-member moments as CSV here.
    #[arg(long)]
    per_member: Option<PathBuf>,
    /// Report file (JSON); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, body: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Numeric(e.to_string()))
        }
    }
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    fs::write(path, body)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Numeric(e.to_string()))
}

fn csv_string<F>(header: &[&str], fill: F) -> CliResult<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)
        .and_then(|_| fill(&mut w))
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numeric(e.to_string()))
}

fn cmd_tables(args: TablesArgs) -> CliResult<()> {
    let printed = match args.mode {
        Mode::Table1 => Some(PrintedTable::Table1),
        Mode::Table2 => Some(PrintedTable::Table2),
        Mode::Table3 => Some(PrintedTable::Table3),
        Mode::Custom => None,
    };
    let table: Table = match printed {
        Some(which) => which.generate()?,
        None => {
            if args.check {
                return Err(CliError::Usage(
                    "no published values exist for a custom table".into(),
                ));
            }
            let m = args
                .m
                .ok_or_else(|| CliError::Usage("custom tables need --m".into()))?;
            let request = TableRequest {
                mode: if args.n.is_some() {
                    TableMode::FiniteN
                } else {
                    TableMode::Dilute
                },
                orbitals: args.n.unwrap_or(2 * m),
                particles: m,
                body_ranks: if args.k.is_empty() {
                    (1..=m).collect()
                } else {
                    args.k
                },
                transition_ranks: if args.t.is_empty() {
                    vec![1, 2]
                } else {
                    args.t
                },
            };
            make_table(&request)?
        }
    };
    let body = match args.output.format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table)?,
    };
    emit(&args.output.out, &body)?;
    if let (true, Some(which)) = (args.check, printed) {
        let bad = compare_with_fixture(&table, which, FIXTURE_TOL);
        if !bad.is_empty() {
            let lines: Vec<String> = bad
                .iter()
                .map(|c| {
                    format!(
                        "  k={} t={} {}: printed {} computed {:.6} (|diff| {:.2e})",
                        c.k,
                        c.t,
                        c.column,
                        c.printed,
                        c.computed,
                        c.deviation()
                    )
                })
                .collect();
            return Err(CliError::Mismatch(format!(
                "{} cell(s) differ from the printed table by more than {FIXTURE_TOL}:\n{}",
                bad.len(),
                lines.join("\n")
            )));
        }
    }
    Ok(())
}

/// `(rho, q)` from explicit flags or the finite-N formulas for `(N, m, k, t)`.
fn resolve(system: &SystemArgs, k: usize) -> CliResult<(f64, f64, Option<SystemSpec>)> {
    match (system.rho, system.q) {
        (Some(rho), Some(q)) => Ok((rho, q, None)),
        (rho, q) => {
            let spec = SystemSpec::new(system.n, system.m, k, system.t.unwrap_or(1))?;
            Ok((
                rho.unwrap_or_else(|| rho_finite_n(&spec)),
                q.unwrap_or_else(|| q_finite_n(&spec)),
                Some(spec),
            ))
        }
    }
}

fn gnuplot_script(data: &str, rho: f64, q: f64) -> String {
    format!(
        "# Bivariate density surface; run with: gnuplot -p <this file>
set datafile separator ','
set xlabel 'x'
set ylabel 'y'
set pm3d map
set title 'rho = {rho:.4}, q = {q:.4}'
splot '{data}' every ::1 using 1:2:3 with pm3d notitle
"
    )
}

fn cmd_density(args: DensityArgs) -> CliResult<()> {
    let (rho, q, _) = resolve(&args.system, args.k)?;
    let grid = DensityGrid::new(BivQNormalParams::new(rho, q)?, args.resolution)?;
    let body = match args.output.format {
        Format::Json => to_json(&grid)?,
        Format::Csv => csv_string(&["x", "y", "f"], |w| {
            for (x, y, f) in grid.triples() {
                w.write_record([x.to_string(), y.to_string(), f.to_string()])?;
            }
            Ok(())
        })?,
    };
    emit(&args.output.out, &body)?;
    if let (Some(out), Format::Csv) = (&args.output.out, args.output.format) {
        let data = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        write_file(&out.with_extension("gp"), &gnuplot_script(&data, rho, q))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct NpcFamilyCurve {
    k: Option<usize>,
    t: Option<usize>,
    curve: NpcCurve,
}

fn cmd_npc(args: NpcArgs) -> CliResult<()> {
    if args.resolution == 0 {
        return Err(CliError::Usage(
            "the energy grid is empty (--resolution 0)".into(),
        ));
    }
    let sys = &args.system;
    let explicit = sys.rho.is_some() && sys.q.is_some();
    let ks: Vec<usize> = match (&args.k[..], explicit) {
        ([], true) => vec![2.min(sys.m).max(1)],
        ([], false) => (2..=sys.m).collect(),
        (ks, _) => ks.to_vec(),
    };
    if ks.is_empty() {
        return Err(CliError::Usage("no body ranks to evaluate".into()));
    }
    let d = binomial_exact(sys.n as i64, sys.m as i64).ok_or_else(|| {
        CliError::Usage(format!("binomial({}, {}) is not a dimension", sys.n, sys.m))
    })? as f64;
    let mut setups = Vec::new();
    for &k in &ks {
        let (rho, q, spec) = resolve(sys, k)?;
        let params = NpcParams {
            dimension: d,
            rho,
            q,
            q_prime: args.qprime.unwrap_or(q),
            sigma_hat: args.sigma_hat,
            delta_hat: args.delta_hat,
        };
        params.validate()?;
        setups.push((spec, params));
    }
    let halfwidth = setups
        .iter()
        .map(|(_, p)| QParams::new(p.q).map(|qp| qp.integration_halfwidth()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let n = args.resolution;
    let w = 0.95 * halfwidth;
    let grid: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..n)
            .map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64)
            .collect()
    };
    let curves = setups
        .into_iter()
        .map(|(spec, p)| {
            Ok(NpcFamilyCurve {
                k: spec.map(|s| s.body_rank),
                t: spec.map(|s| s.transition_rank),
                curve: npc_curve(&grid, &p)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let body = match args.output.format {
        Format::Json => to_json(&curves)?,
        Format::Csv if curves.len() == 1 && curves[0].k.is_none() => curves[0].curve.to_csv(),
        Format::Csv => csv_string(
            &["k", "t", "rho", "q", "E_hat", "npc", "npc_over_d3"],
            |w| {
                for c in &curves {
                    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
                    for p in &c.curve.points {
                        w.write_record([
                            opt(c.k),
                            opt(c.t),
                            c.curve.params.rho.to_string(),
                            c.curve.params.q.to_string(),
                            p.e_hat.to_string(),
                            p.npc.to_string(),
                            p.npc_over_d3.to_string(),
                        ])?;
                    }
                }
                Ok(())
            },
        )?,
    };
    emit(&args.output.out, &body)
}

fn headline_failures(report: &EnsembleReport) -> Vec<String> {
    report
        .comparisons
        .iter()
        .filter(|c| GATING.contains(&c.name.as_str()) && !c.within(Z_LIMIT))
        .map(|c| {
            format!(
                "{}: {:.5} vs predicted {:.5} (z = {:+.2})",
                c.name, c.estimate.mean, c.predicted, c.z
            )
        })
        .collect()
}

fn cmd_validate(args: ValidateArgs) -> CliResult<()> {
    if args.members == 0 {
        return Err(CliError::Usage("--members must be at least 1".into()));
    }
    let spec = SystemSpec::new(args.n, args.m, args.k, args.t)?;
    let kind = match args.kind {
        Kind::Orthogonal => EnsembleKind::Orthogonal,
        Kind::Unitary => EnsembleKind::Unitary,
    };
    let run = EnsembleRun {
        dimension_cap: args.cap,
        ..EnsembleRun::new(spec, args.members, args.seed, kind)
    };
    let report = run_ensemble(&run)?;
    emit(&args.out, &to_json(&report)?)?;
    if let Some(path) = &args.per_member {
        write_file(path, &report.per_member_csv())?;
    }
    let failures = headline_failures(&report);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "ensemble disagrees with the finite-N formulas:\n  {}",
            failures.join("\n  ")
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tables(a) => cmd_tables(a),
        Command::DensityGrid(a) => cmd_density(a),
        Command::Npc(a) => cmd_npc(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbiv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
