//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no feasible solution,
//! 3 exact solver limit exceeded, 4 verification found violations.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mdmsop_core::{
    build_model, solve_exact, BudgetMode, Clock, ExactLimits, ExactResult, LimitExceeded,
    MdmsopInstance, ProfitRule, SecVariant, VnsConfig,
};
use thiserror::Error;

use crate::bench::{self, BenchRow, ReferenceTable, SolverKind, SuiteSpec};
use crate::clock::WallClock;
use crate::config::ConfigFile;
use crate::gtsp::parse_gtsp;
use crate::instance_file::{parse_instance, write_instance};
use crate::lp::{write_lp, write_mps};
use crate::optima::OptimaTable;
use crate::solution_file::SolutionFile;
use crate::verify::verify;

#[derive(Debug, Parser)]
#[command(
    name = "mdmsop",
    version,
    about = "Multi-depot multiple set orienteering solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Add depots, profits and a budget to a GTSP file.
    Adapt {
        gtsp: PathBuf,
        #[command(flatten)]
        adapt: AdaptArgs,
        /// Output instance file [default: <name>-m<M>-<rule>-<mode>.mdmsop].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the VNS and write the best solution.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        adapt: AdaptArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Solution file [default: <instance stem>.sol].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a tiny instance to optimality by enumeration.
    Exact {
        instance: PathBuf,
        #[command(flatten)]
        adapt: AdaptArgs,
        #[command(flatten)]
        limits: LimitArgs,
        /// Solution file [default: <instance stem>.exact.sol].
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Timing::On)]
        timing: Timing,
    },
    /// Write the ILP model as an LP (or MPS) file.
    ExportLp {
        instance: PathBuf,
        #[command(flatten)]
        adapt: AdaptArgs,
        /// Subtour elimination variant: mtz or gavish.
        #[arg(long, default_value = "mtz")]
        sec: SecVariant,
        /// Write fixed-column MPS instead of LP.
        #[arg(long)]
        mps: bool,
        /// Output file [default: <instance stem>-<sec>.lp or .mps].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance and the ILP model.
    Verify {
        solution: PathBuf,
        instance: PathBuf,
        #[command(flatten)]
        adapt: AdaptArgs,
        /// Check one model only [default: both].
        #[arg(long)]
        sec: Option<SecVariant>,
    },
    /// Run a benchmark suite and write CSV and markdown reports.
    Bench {
        /// Suite file (TOML). Omit when using --preset.
        suite: Option<PathBuf>,
        /// Built-in suite: table1, table4 or set1.
        #[arg(long, conflicts_with = "suite", requires = "dir")]
        preset: Option<String>,
        /// Directory holding `<name>.gtsp` files for --preset.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Reference values for the gap column.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Solvers to run, comma separated.
        #[arg(long, value_enum, value_delimiter = ',')]
        solver: Vec<SolverArg>,
        /// Report prefix; `.csv` and `.md` are appended [default: print CSV].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Adaptation settings, used when the input is a GTSP file.
#[derive(Debug, Args, Default)]
struct AdaptArgs {
    /// Number of travelers [default: 2].
    #[arg(long)]
    m: Option<usize>,
    /// Profit rule, g1 or g2 [default: g1].
    #[arg(long)]
    rule: Option<ProfitRule>,
    /// Budget mode, cumulative or individual [default: cumulative].
    #[arg(long)]
    mode: Option<BudgetMode>,
    /// Budget multiplier [default: 0.25].
    #[arg(long)]
    w: Option<f64>,
    /// Reference tour length; overrides the optima table.
    #[arg(long)]
    tmax: Option<i64>,
}

impl AdaptArgs {
    fn any(&self) -> bool {
        self.m.is_some()
            || self.rule.is_some()
            || self.mode.is_some()
            || self.w.is_some()
            || self.tmax.is_some()
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Solver settings (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `off` prints `-` instead of elapsed times, for reproducible output.
    #[arg(long, value_enum, default_value_t = Timing::On)]
    timing: Timing,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long, default_value_t = ExactLimits::default().max_sets)]
    max_sets: usize,
    #[arg(long, default_value_t = ExactLimits::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = ExactLimits::default().max_states)]
    max_states: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Timing {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Vns,
    Exact,
}

/// Failures with their exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("no feasible solution")]
    Infeasible,
    #[error(transparent)]
    Limit(#[from] LimitExceeded),
    #[error("verification failed with {0} violation(s)")]
    Violations(usize),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Infeasible => 2,
            CliError::Limit(_) => 3,
            CliError::Violations(_) => 4,
        }
    }
}

/// Parses arguments and runs the command. Help and version requests print
/// and return success; usage errors map to exit code 1.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Other(inner) => eprintln!("error: {inner:#}"),
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Adapt { gtsp, adapt, out } => cmd_adapt(&gtsp, &adapt, out),
        Command::Solve {
            instance,
            adapt,
            run,
            out,
        } => cmd_solve(&instance, &adapt, &run, out),
        Command::Exact {
            instance,
            adapt,
            limits,
            out,
            timing,
        } => cmd_exact(&instance, &adapt, &limits, out, timing),
        Command::ExportLp {
            instance,
            adapt,
            sec,
            mps,
            out,
        } => cmd_export_lp(&instance, &adapt, sec, mps, out),
        Command::Verify {
            solution,
            instance,
            adapt,
            sec,
        } => cmd_verify(&solution, &instance, &adapt, sec),
        Command::Bench {
            suite,
            preset,
            dir,
            reference,
            run,
            solver,
            out,
        } => cmd_bench(suite, preset, dir, reference, &run, &solver, out),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned())
}

fn is_mdmsop_file(text: &str) -> bool {
    text.lines().any(|l| {
        l.split_once(':')
            .is_some_and(|(k, v)| k.trim() == "TYPE" && v.trim().eq_ignore_ascii_case("MDMSOP"))
    })
}

fn adapt_gtsp(text: &str, adapt: &AdaptArgs) -> anyhow::Result<MdmsopInstance> {
    let base = parse_gtsp(text)?;
    let tmax = match adapt.tmax {
        Some(t) => t,
        None => OptimaTable::load()?.get(base.name()).with_context(|| {
            format!(
                "no T_Max known for {}; pass --tmax or extend the optima table",
                base.name()
            )
        })?,
    };
    Ok(MdmsopInstance::adapt(
        base,
        adapt.m.unwrap_or(2),
        adapt.rule.unwrap_or(ProfitRule::G1),
        adapt.mode.unwrap_or(BudgetMode::Cumulative),
        adapt.w.unwrap_or(0.25),
        tmax,
    )?)
}

/// Reads an adapted instance file, or adapts a GTSP file on the fly.
fn load_instance(path: &Path, adapt: &AdaptArgs) -> anyhow::Result<MdmsopInstance> {
    let text = read(path)?;
    if is_mdmsop_file(&text) {
        if adapt.any() {
            bail!(
                "{} is already adapted; adaptation flags apply to GTSP input only",
                path.display()
            );
        }
        return parse_instance(&text).with_context(|| format!("in {}", path.display()));
    }
    adapt_gtsp(&text, adapt).with_context(|| format!("in {}", path.display()))
}

fn load_config(run: &RunArgs) -> anyhow::Result<VnsConfig> {
    let file = match &run.config {
        Some(path) => ConfigFile::from_file(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = file.resolve()?;
    if let Some(seed) = run.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn cmd_adapt(gtsp: &Path, adapt: &AdaptArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let inst = adapt_gtsp(&read(gtsp)?, adapt).with_context(|| format!("in {}", gtsp.display()))?;
    let out = out.unwrap_or_else(|| {
        PathBuf::from(format!(
            "{}-m{}-{}-{}.mdmsop",
            inst.name(),
            inst.travelers(),
            inst.profit_rule(),
            inst.budget_mode()
        ))
    });
    write(&out, &write_instance(&inst))?;
    println!(
        "{}: n={} r={} m={} B={} ({}, {}, w={}, T_Max={})",
        inst.name(),
        inst.n(),
        inst.r(),
        inst.travelers(),
        inst.budget(),
        inst.profit_rule(),
        inst.budget_mode(),
        inst.w(),
        inst.t_max()
    );
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn cmd_solve(
    path: &Path,
    adapt: &AdaptArgs,
    run: &RunArgs,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let inst = load_instance(path, adapt)?;
    let cfg = load_config(run)?;
    let (row, found) = bench::run_row(&inst, SolverKind::Vns, &cfg, &ExactLimits::default());
    let Some((arr, ev)) = found else {
        return Err(CliError::Infeasible);
    };
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}.sol", stem(path))));
    write(&out, &SolutionFile::new(&inst, &arr, &ev).write())?;
    print!("{}", bench::to_csv(&[row], run.timing == Timing::On));
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn cmd_exact(
    path: &Path,
    adapt: &AdaptArgs,
    limits: &LimitArgs,
    out: Option<PathBuf>,
    timing: Timing,
) -> Result<(), CliError> {
    let inst = load_instance(path, adapt)?;
    let limits = ExactLimits {
        max_sets: limits.max_sets,
        max_nodes: limits.max_nodes,
        max_states: limits.max_states,
    };
    let clock = WallClock::start();
    let sol = match solve_exact(&inst, &limits)? {
        ExactResult::Optimal(sol) => sol,
        ExactResult::Infeasible => return Err(CliError::Infeasible),
    };
    let mut row = BenchRow::new(&inst, SolverKind::Exact, 0);
    row.time_secs = clock.elapsed_secs();
    row.profit = Some(sol.evaluation.profit);
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}.exact.sol", stem(path))));
    write(
        &out,
        &SolutionFile::new(&inst, &sol.arrangement, &sol.evaluation).write(),
    )?;
    print!("{}", bench::to_csv(&[row], timing == Timing::On));
    eprintln!(
        "wrote {} ({} assignments enumerated)",
        out.display(),
        sol.assignments
    );
    Ok(())
}

fn cmd_export_lp(
    path: &Path,
    adapt: &AdaptArgs,
    sec: SecVariant,
    mps: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let inst = load_instance(path, adapt)?;
    let model = build_model(&inst, sec);
    let (text, ext) = if mps {
        (write_mps(&model), "mps")
    } else {
        (write_lp(&model), "lp")
    };
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}-{sec}.{ext}", stem(path))));
    write(&out, &text)?;
    let sec_rows = model.constraints.iter().filter(|c| c.is_sec()).count();
    println!(
        "{}: {} variables, {} constraints ({} subtour elimination, {sec})",
        out.display(),
        model.variables.len(),
        model.constraints.len(),
        sec_rows
    );
    Ok(())
}

fn cmd_verify(
    solution: &Path,
    path: &Path,
    adapt: &AdaptArgs,
    sec: Option<SecVariant>,
) -> Result<(), CliError> {
    let inst = load_instance(path, adapt)?;
    let sol = SolutionFile::parse(&read(solution)?)
        .with_context(|| format!("in {}", solution.display()))?;
    let secs = match sec {
        Some(s) => vec![s],
        None => vec![SecVariant::Mtz, SecVariant::Gavish],
    };
    let report = verify(&inst, &sol, &secs);
    print!("{}", report.render());
    match report.violation_count() {
        0 => Ok(()),
        n => Err(CliError::Violations(n)),
    }
}

fn cmd_bench(
    suite: Option<PathBuf>,
    preset: Option<String>,
    dir: Option<PathBuf>,
    reference: Option<PathBuf>,
    run: &RunArgs,
    solvers: &[SolverArg],
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut spec = match (suite, preset) {
        (Some(path), None) => SuiteSpec::from_file(&path).map_err(anyhow::Error::from)?,
        (None, Some(name)) => SuiteSpec::preset(&name, dir.as_deref().unwrap_or(Path::new(".")))
            .map_err(anyhow::Error::from)?,
        _ => return Err(anyhow::anyhow!("give a suite file or --preset").into()),
    };
    if !solvers.is_empty() {
        spec.solvers = solvers
            .iter()
            .map(|s| match s {
                SolverArg::Vns => SolverKind::Vns,
                SolverArg::Exact => SolverKind::Exact,
            })
            .collect();
    }
    // Flags beat the suite file.
    let config = run.config.clone().or(spec.config.clone());
    let cfg = load_config(&RunArgs {
        config,
        seed: run.seed,
        timing: run.timing,
    })?;
    let reference = match reference.or(spec.reference.clone()) {
        Some(path) => Some(ReferenceTable::from_file(&path).map_err(anyhow::Error::from)?),
        None => None,
    };
    let optima = OptimaTable::load().map_err(anyhow::Error::from)?;
    let timing = run.timing == Timing::On;
    let rows = bench::run_suite(
        &spec,
        &cfg,
        &ExactLimits::default(),
        &optima,
        reference.as_ref(),
        |row| {
            eprintln!(
                "{} m={} {} {} {}: {}",
                row.instance,
                row.travelers,
                row.rule,
                row.mode,
                row.solver.as_str(),
                row.profit
                    .map_or_else(|| "-".to_string(), |p| p.to_string())
            );
        },
    )
    .map_err(anyhow::Error::from)?;
    let csv = bench::to_csv(&rows, timing);
    match out.or(spec.output.clone()) {
        Some(prefix) => {
            let csv_path = prefix.with_extension("csv");
            let md_path = prefix.with_extension("md");
            if let Some(parent) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("cannot create {}", parent.display()))?;
            }
            write(&csv_path, &csv)?;
            write(&md_path, &bench::to_markdown(&rows, timing))?;
            eprintln!("wrote {} and {}", csv_path.display(), md_path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
