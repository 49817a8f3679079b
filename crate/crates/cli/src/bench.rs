//! Benchmark suites and their reports.
//!
//! A suite expands to one row per (instance, travelers, rule, mode, solver).
//! Rows run in order; a row that fails is recorded with its error and the
//! suite moves on. Reports are CSV and a markdown table shaped like the
//! published comparison tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mdmsop_core::{
    run_vns, solve_exact, BudgetMode, ExactLimits, ExactResult, GtspInstance, MdmsopInstance,
    Profit, ProfitRule, VnsConfig,
};
use serde::Deserialize;
use thiserror::Error;

use crate::clock::WallClock;
use crate::gtsp::parse_gtsp;
use crate::optima::OptimaTable;

/// Leading CSV columns, in the published table order.
pub const CSV_HEADER: [&str; 12] = [
    "Instance",
    "n",
    "Travelers",
    "Pg",
    "Solution",
    "Time",
    "Gap",
    "Mode",
    "W",
    "Solver",
    "Seed",
    "Status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Vns,
    Exact,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Vns => "vns",
            SolverKind::Exact => "exact",
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite has no rows")]
    EmptySuite,
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad suite file: {0}")]
    Suite(#[from] toml::de::Error),
    #[error("bad suite file: {0}")]
    Token(String),
    #[error("reference file line {line}: expected `instance travelers rule mode value`")]
    Reference { line: usize },
    #[error("reference file line {line}: duplicate entry")]
    DuplicateReference { line: usize },
    #[error("unknown preset {0:?}; known presets: table1, table4, set1")]
    Preset(String),
}

pub(crate) fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One instance file and the settings to run it under.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub file: PathBuf,
    pub travelers: Vec<usize>,
    pub rules: Vec<ProfitRule>,
    pub modes: Vec<BudgetMode>,
    pub w: f64,
    /// Overrides the optima table.
    pub tmax: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub entries: Vec<SuiteEntry>,
    pub solvers: Vec<SolverKind>,
    pub config: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    /// Report path prefix; `.csv` and `.md` are appended.
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuite {
    config: Option<PathBuf>,
    reference: Option<PathBuf>,
    output: Option<PathBuf>,
    solvers: Option<Vec<SolverKind>>,
    #[serde(default)]
    instances: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    file: PathBuf,
    travelers: Vec<usize>,
    rules: Vec<String>,
    modes: Vec<String>,
    w: f64,
    tmax: Option<i64>,
}

fn tokens<T: std::str::FromStr>(raw: &[String]) -> Result<Vec<T>, BenchError> {
    raw.iter()
        .map(|s| {
            s.parse()
                .map_err(|_| BenchError::Token(format!("unknown value {s:?}")))
        })
        .collect()
}

impl SuiteSpec {
    /// Parses a suite; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, BenchError> {
        let raw: RawSuite = toml::from_str(text)?;
        let entries = raw
            .instances
            .into_iter()
            .map(|e| {
                Ok(SuiteEntry {
                    file: base.join(e.file),
                    travelers: e.travelers,
                    rules: tokens(&e.rules)?,
                    modes: tokens(&e.modes)?,
                    w: e.w,
                    tmax: e.tmax,
                })
            })
            .collect::<Result<_, BenchError>>()?;
        Ok(Self {
            entries,
            solvers: raw.solvers.unwrap_or_else(|| vec![SolverKind::Vns]),
            config: raw.config.map(|p| base.join(p)),
            reference: raw.reference.map(|p| base.join(p)),
            output: raw.output.map(|p| base.join(p)),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&read(path)?, base)
    }

    /// Built-in suites over GTSP files named `<name>.gtsp` in `dir`.
    ///
    /// `table1` and `table4` are the small instances compared against the
    /// ILP under cumulative and individual budgets; `set1` is every tabulated
    /// instance below 200 nodes. All use `w = 0.25` and 2 or 3 travelers.
    pub fn preset(name: &str, dir: &Path) -> Result<Self, BenchError> {
        const SMALL: [&str; 5] = ["11berlin52", "11eil51", "14st70", "16eil76", "20rat99"];
        let (names, modes): (Vec<String>, _) = match name {
            "table1" => (
                SMALL.map(String::from).to_vec(),
                vec![BudgetMode::Cumulative],
            ),
            "table4" => (
                SMALL.map(String::from).to_vec(),
                vec![BudgetMode::Individual],
            ),
            "set1" => {
                let names = OptimaTable::builtin()
                    .names()
                    .filter(|n| nodes_in_name(n).is_some_and(|k| k < 200))
                    .map(String::from)
                    .collect();
                (names, vec![BudgetMode::Cumulative])
            }
            other => return Err(BenchError::Preset(other.to_string())),
        };
        let entries = names
            .into_iter()
            .map(|n| SuiteEntry {
                file: dir.join(format!("{n}.gtsp")),
                travelers: vec![2, 3],
                rules: vec![ProfitRule::G1, ProfitRule::G2],
                modes: modes.clone(),
                w: 0.25,
                tmax: None,
            })
            .collect();
        Ok(Self {
            entries,
            solvers: vec![SolverKind::Vns],
            config: None,
            reference: None,
            output: None,
        })
    }

    pub fn row_count(&self) -> usize {
        self.solvers.len()
            * self
                .entries
                .iter()
                .map(|e| e.travelers.len() * e.rules.len() * e.modes.len())
                .sum::<usize>()
    }
}

/// Node count encoded at the end of a GTSP-lib name, e.g. 52 in `11berlin52`.
fn nodes_in_name(name: &str) -> Option<usize> {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    name[name.len() - digits..].parse().ok()
}

/// Published reference profits keyed by setting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceTable {
    values: BTreeMap<(String, usize, ProfitRule, BudgetMode), Profit>,
}

impl ReferenceTable {
    /// Rows of `instance travelers rule mode value`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = || BenchError::Reference { line };
            let [name, m, rule, mode, value] = content.split_whitespace().collect::<Vec<_>>()[..]
            else {
                return Err(bad());
            };
            let key = (
                name.to_string(),
                m.parse().map_err(|_| bad())?,
                rule.parse().map_err(|_| bad())?,
                mode.parse().map_err(|_| bad())?,
            );
            let value: Profit = value.parse().map_err(|_| bad())?;
            if value <= 0 {
                return Err(bad());
            }
            if values.insert(key, value).is_some() {
                return Err(BenchError::DuplicateReference { line });
            }
        }
        Ok(Self { values })
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        Self::parse(&read(path)?)
    }

    pub fn get(
        &self,
        instance: &str,
        m: usize,
        rule: ProfitRule,
        mode: BudgetMode,
    ) -> Option<Profit> {
        self.values
            .get(&(instance.to_string(), m, rule, mode))
            .copied()
    }
}

/// `100 (reference - found) / reference`: positive when `found` falls short.
pub fn gap_percent(reference: Profit, found: Profit) -> f64 {
    100.0 * (reference - found) as f64 / reference as f64
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Infeasible,
    LimitExceeded(String),
    Error(String),
}

impl RowStatus {
    fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Infeasible => "infeasible".into(),
            RowStatus::LimitExceeded(msg) => format!("limit: {msg}"),
            RowStatus::Error(msg) => format!("error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    /// Original node count; `None` when the file could not be read.
    pub n: Option<usize>,
    pub travelers: usize,
    pub rule: ProfitRule,
    pub mode: BudgetMode,
    pub w: f64,
    pub solver: SolverKind,
    pub profit: Option<Profit>,
    pub time_secs: f64,
    pub seed: u64,
    pub gap: Option<f64>,
    pub status: RowStatus,
}

impl BenchRow {
    /// A row with no result yet.
    pub fn new(inst: &MdmsopInstance, solver: SolverKind, seed: u64) -> Self {
        Self {
            instance: inst.name().to_string(),
            n: Some(inst.n()),
            travelers: inst.travelers(),
            rule: inst.profit_rule(),
            mode: inst.budget_mode(),
            w: inst.w(),
            solver,
            profit: None,
            time_secs: 0.0,
            seed,
            gap: None,
            status: RowStatus::Ok,
        }
    }
}

/// Runs one solver on an adapted instance and fills a row. Returns the
/// solution arrangement alongside for callers that write it out.
pub fn run_row(
    inst: &MdmsopInstance,
    solver: SolverKind,
    cfg: &VnsConfig,
    limits: &ExactLimits,
) -> (
    BenchRow,
    Option<(mdmsop_core::Arrangement, mdmsop_core::Evaluation)>,
) {
    let clock = WallClock::start();
    let mut row = BenchRow::new(inst, solver, cfg.seed);
    let found = match solver {
        SolverKind::Vns => match run_vns(inst, cfg, &clock) {
            Ok(report) => Some((report.best_arrangement, report.best)),
            Err(_) => {
                row.status = RowStatus::Infeasible;
                None
            }
        },
        SolverKind::Exact => match solve_exact(inst, limits) {
            Ok(ExactResult::Optimal(s)) => Some((s.arrangement, s.evaluation)),
            Ok(ExactResult::Infeasible) => {
                row.status = RowStatus::Infeasible;
                None
            }
            Err(e) => {
                row.status = RowStatus::LimitExceeded(e.to_string());
                None
            }
        },
    };
    row.time_secs = mdmsop_core::Clock::elapsed_secs(&clock);
    row.profit = found.as_ref().map(|(_, ev)| ev.profit);
    (row, found)
}

fn load_gtsp(path: &Path) -> Result<GtspInstance, String> {
    let text = read(path).map_err(|e| e.to_string())?;
    parse_gtsp(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs every row of a suite in order.
pub fn run_suite(
    spec: &SuiteSpec,
    cfg: &VnsConfig,
    limits: &ExactLimits,
    optima: &OptimaTable,
    reference: Option<&ReferenceTable>,
    mut progress: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>, BenchError> {
    if spec.row_count() == 0 {
        return Err(BenchError::EmptySuite);
    }
    let mut rows = Vec::with_capacity(spec.row_count());
    for entry in &spec.entries {
        let stem = entry
            .file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let base = load_gtsp(&entry.file);
        let name = base.as_ref().map(|g| g.name().to_string()).unwrap_or(stem);
        let n = base.as_ref().ok().map(|g| g.n_nodes());
        let tmax = entry.tmax.or_else(|| optima.get(&name));
        for &m in &entry.travelers {
            for &rule in &entry.rules {
                for &mode in &entry.modes {
                    let inst = match (&base, tmax) {
                        (Err(msg), _) => Err(msg.clone()),
                        (Ok(_), None) => Err(format!("no T_Max known for {name}")),
                        (Ok(g), Some(t)) => {
                            MdmsopInstance::adapt(g.clone(), m, rule, mode, entry.w, t)
                                .map_err(|e| e.to_string())
                        }
                    };
                    for &solver in &spec.solvers {
                        let mut row = match &inst {
                            Ok(inst) => run_row(inst, solver, cfg, limits).0,
                            Err(msg) => BenchRow {
                                instance: name.clone(),
                                n,
                                travelers: m,
                                rule,
                                mode,
                                w: entry.w,
                                solver,
                                profit: None,
                                time_secs: 0.0,
                                seed: cfg.seed,
                                gap: None,
                                status: RowStatus::Error(msg.clone()),
                            },
                        };
                        if let (Some(found), Some(table)) = (row.profit, reference) {
                            row.gap = table
                                .get(&name, m, rule, mode)
                                .map(|r| gap_percent(r, found));
                        }
                        progress(&row);
                        rows.push(row);
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn dash<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn fields(row: &BenchRow, timing: bool) -> [String; 12] {
    [
        row.instance.clone(),
        dash(row.n),
        row.travelers.to_string(),
        row.rule.to_string(),
        dash(row.profit),
        if timing {
            format!("{:.3}", row.time_secs)
        } else {
            "-".into()
        },
        dash(row.gap.map(|g| format!("{g:.2}"))),
        row.mode.to_string(),
        row.w.to_string(),
        row.solver.as_str().to_string(),
        row.seed.to_string(),
        row.status.label(),
    ]
}

/// CSV with [`CSV_HEADER`]. `timing = false` prints `-` for every time so
/// that reruns compare equal.
pub fn to_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for row in rows {
        w.write_record(fields(row, timing))
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}

/// Markdown table in the column order of the published tables.
pub fn to_markdown(rows: &[BenchRow], timing: bool) -> String {
    let mut out = String::new();
    out.push_str(
        "| Instance | n | Travelers | Pg | Mode | Solver | Solution | Time (sec.) | Gap (%) |\n",
    );
    out.push_str("|---|---:|---:|---|---|---|---:|---:|---:|\n");
    let mut notes = Vec::new();
    for row in rows {
        let f = fields(row, timing);
        let solution = match &row.status {
            RowStatus::Ok => f[4].clone(),
            RowStatus::Infeasible => "infeasible".into(),
            RowStatus::LimitExceeded(_) => "limit".into(),
            RowStatus::Error(_) => "error".into(),
        };
        if matches!(
            row.status,
            RowStatus::Error(_) | RowStatus::LimitExceeded(_)
        ) {
            notes.push(format!(
                "{} m={} {} {} {}: {}",
                f[0], f[2], f[3], f[7], f[9], f[11]
            ));
        }
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            f[0], f[1], f[2], f[3], f[7], f[9], solution, f[5], f[6]
        );
    }
    if !notes.is_empty() {
        out.push_str("\nFailed rows:\n\n");
        for note in notes {
            let _ = writeln!(out, "- {note}");
        }
    }
    out
}
