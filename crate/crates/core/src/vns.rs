//! Variable neighborhood search.
//!
//! One outer iteration runs the neighborhood loop: with `l = 1`, shake the
//! incumbent with operator `l`, run local search with operator `l`, and
//! accept the result only if it is valid and strictly more profitable, in
//! which case `l` goes back to 1; otherwise `l` advances. The loop ends once
//! both neighborhoods fail in a row. A restart stops after
//! `max_bad_iterations` consecutive outer iterations without an acceptance,
//! when the time cap is reached, or when every set is already visited.
//!
//! Shake operators work on contiguous segments of rows (the bucket row
//! included) and ignore the budget. Local search samples single-set moves
//! and keeps only valid, strictly improving ones.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::choice::{restart_rng, Choices};
use crate::clock::Clock;
use crate::construct::{initial_solution, Infeasible};
use crate::instance::{BudgetMode, MdmsopInstance};
use crate::solution::{
    evaluate, is_valid, profit, within_budget, Arrangement, Evaluation, TourCoster,
};
use crate::{Cost, Profit};

/// Number of neighborhoods.
pub const L_MAX: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct VnsConfig {
    pub seed: u64,
    /// Independent restarts; the best one is reported.
    pub iteration_count: usize,
    /// Consecutive outer iterations without acceptance that end a restart.
    pub max_bad_iterations: u64,
    /// Wall-clock cap for the whole run, in seconds.
    pub max_time_secs: f64,
    /// Sampled moves per local-search call; `None` means `50 * (r + m)`.
    pub ls_attempts: Option<usize>,
}

impl VnsConfig {
    /// 20 restarts, 100000 bad iterations, 30 minutes.
    pub fn full() -> Self {
        Self {
            seed: 0,
            iteration_count: 20,
            max_bad_iterations: 100_000,
            max_time_secs: 1800.0,
            ls_attempts: None,
        }
    }

    /// 5 restarts, 10000 bad iterations, 60 seconds.
    pub fn desk() -> Self {
        Self {
            iteration_count: 5,
            max_bad_iterations: 10_000,
            max_time_secs: 60.0,
            ..Self::full()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn ls_attempts_for(&self, inst: &MdmsopInstance) -> usize {
        self.ls_attempts.unwrap_or(50 * inst.n_sets_total())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.iteration_count == 0 {
            return Err(ConfigError("iteration_count must be positive"));
        }
        if self.max_bad_iterations == 0 {
            return Err(ConfigError("max_bad_iterations must be positive"));
        }
        if self.max_time_secs.is_nan() || self.max_time_secs <= 0.0 {
            return Err(ConfigError("max_time_seconds must be positive"));
        }
        if self.ls_attempts == Some(0) {
            return Err(ConfigError("ls_attempts must be positive"));
        }
        Ok(())
    }
}

impl Default for VnsConfig {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigError(pub &'static str);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl core::error::Error for ConfigError {}

fn segment<C: Choices + ?Sized>(choices: &mut C, len: usize) -> (usize, usize) {
    let a = choices.index(len);
    let b = choices.index(len);
    (a.min(b), a.max(b))
}

/// Shake operator 1: move a contiguous segment to another place.
///
/// Draws, in order: source row `l1` and target row `l2` (both over all
/// `m + 1` rows); two indices in `l1` whose min/max bound the segment; then,
/// once the segment is cut out and only if row `l2` is non-empty, an anchor
/// index in `l2` and a coin (true places the segment after the anchor).
/// An empty source row leaves the arrangement unchanged.
pub fn shake_path_move<C: Choices + ?Sized>(arr: &mut Arrangement, choices: &mut C) {
    let rows = arr.travelers() + 1;
    let l1 = choices.index(rows);
    let l2 = choices.index(rows);
    let len1 = arr.row(l1).len();
    if len1 == 0 {
        return;
    }
    let (i1, j1) = segment(choices, len1);
    let seg: Vec<usize> = arr.row_mut(l1).drain(i1..=j1).collect();
    let target = arr.row_mut(l2);
    let at = if target.is_empty() {
        0
    } else {
        let i2 = choices.index(target.len());
        if choices.coin() {
            i2 + 1
        } else {
            i2
        }
    };
    target.splice(at..at, seg);
}

/// Shake operator 2: swap two non-overlapping segments.
///
/// Draws, in order: rows `l1`, `l2`; two indices bounding the segment in
/// `l1`; two indices bounding the segment in `l2`. Empty rows, or
/// overlapping segments within one row, leave the arrangement unchanged.
pub fn shake_path_exchange<C: Choices + ?Sized>(arr: &mut Arrangement, choices: &mut C) {
    let rows = arr.travelers() + 1;
    let l1 = choices.index(rows);
    let l2 = choices.index(rows);
    let (len1, len2) = (arr.row(l1).len(), arr.row(l2).len());
    if len1 == 0 || len2 == 0 {
        return;
    }
    let (i1, j1) = segment(choices, len1);
    let (i2, j2) = segment(choices, len2);
    if l1 == l2 {
        if i1 <= j2 && i2 <= j1 {
            return;
        }
        let ((a0, a1), (b0, b1)) = if i1 < i2 {
            ((i1, j1), (i2, j2))
        } else {
            ((i2, j2), (i1, j1))
        };
        let row = arr.row_mut(l1);
        let mut out = Vec::with_capacity(row.len());
        out.extend_from_slice(&row[..a0]);
        out.extend_from_slice(&row[b0..=b1]);
        out.extend_from_slice(&row[a1 + 1..b0]);
        out.extend_from_slice(&row[a0..=a1]);
        out.extend_from_slice(&row[b1 + 1..]);
        *row = out;
    } else {
        let s1: Vec<usize> = arr.row(l1)[i1..=j1].to_vec();
        let s2: Vec<usize> = arr.row(l2)[i2..=j2].to_vec();
        arr.row_mut(l1).splice(i1..=j1, s2);
        arr.row_mut(l2).splice(i2..=j2, s1);
    }
}

/// Shake with neighborhood `l` (1 or 2).
pub fn shake<C: Choices + ?Sized>(arr: &mut Arrangement, l: usize, choices: &mut C) {
    match l {
        1 => shake_path_move(arr, choices),
        2 => shake_path_exchange(arr, choices),
        _ => panic!("neighborhood index {l} out of range 1..={L_MAX}"),
    }
}

/// What a local-search call did, plus the state needed for acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchOutcome {
    pub kept: usize,
    pub costs: Vec<Cost>,
    pub profit: Profit,
    pub valid: bool,
}

/// Incremental bookkeeping for sampled single-set moves.
struct LocalSearch<'a> {
    inst: &'a MdmsopInstance,
    m: usize,
    row_of: Vec<usize>,
    costs: Vec<Cost>,
    empty_rows: usize,
    profit: Profit,
    coster: TourCoster,
    row_buf: Vec<usize>,
    // moves known to be rejected against the current arrangement
    rejected: Vec<u64>,
}

impl<'a> LocalSearch<'a> {
    fn new(inst: &'a MdmsopInstance, arr: &Arrangement) -> Self {
        let m = arr.travelers();
        let r = inst.r();
        let mut row_of = vec![0; r];
        for (i, row) in arr.rows().iter().enumerate() {
            for &q in row {
                row_of[q - 1] = i;
            }
        }
        let mut coster = TourCoster::new();
        let costs = (1..=m)
            .map(|t| coster.cost(inst, t, arr.route_sets(t)))
            .collect();
        Self {
            inst,
            m,
            row_of,
            costs,
            empty_rows: arr.rows()[..m].iter().filter(|row| row.is_empty()).count(),
            profit: profit(arr, inst),
            coster,
            row_buf: Vec::new(),
            rejected: vec![0; (2 * r * r).div_ceil(64)],
        }
    }

    fn valid(&self) -> bool {
        self.empty_rows == 0 && within_budget(self.inst, &self.costs)
    }

    #[inline]
    fn visited(&self, row: usize) -> Profit {
        Profit::from(row < self.m)
    }

    fn memo_index(&self, i1: usize, i2: usize, variant: usize) -> usize {
        ((i1 - 1) * self.inst.r() + (i2 - 1)) * 2 + variant
    }

    fn is_rejected(&self, idx: usize) -> bool {
        self.rejected[idx / 64] >> (idx % 64) & 1 == 1
    }

    fn mark_rejected(&mut self, idx: usize) {
        self.rejected[idx / 64] |= 1 << (idx % 64);
    }

    fn clear_rejected(&mut self) {
        self.rejected.iter_mut().for_each(|w| *w = 0);
    }

    /// Cost of traveler row `row` after the edit, or `None` for the bucket.
    fn row_cost(&mut self, row: usize) -> Option<Cost> {
        (row < self.m).then(|| self.coster.cost(self.inst, row + 1, &self.row_buf))
    }

    /// Validity after traveler row `row` takes cost `cost`. Single-set moves
    /// that pass the profit check never empty or fill a traveler row.
    fn valid_with(&self, row: usize, cost: Cost) -> bool {
        if self.empty_rows != 0 {
            return false;
        }
        match self.inst.budget_mode() {
            BudgetMode::Cumulative => {
                let total: Cost = self.costs.iter().sum::<Cost>() - self.costs[row] + cost;
                total <= self.inst.budget()
            }
            BudgetMode::Individual => {
                cost <= self.inst.budget()
                    && self
                        .costs
                        .iter()
                        .enumerate()
                        .all(|(t, &c)| t == row || c <= self.inst.budget())
            }
        }
    }

    /// True when no cost for traveler row `row` can make the arrangement
    /// valid, so the DP can be skipped.
    fn hopeless(&self, row: usize) -> bool {
        if self.empty_rows != 0 {
            return true;
        }
        let budget = self.inst.budget();
        match self.inst.budget_mode() {
            BudgetMode::Cumulative => self.costs.iter().sum::<Cost>() - self.costs[row] > budget,
            BudgetMode::Individual => self
                .costs
                .iter()
                .enumerate()
                .any(|(t, &c)| t != row && c > budget),
        }
    }

    /// Relocates `i1` next to `i2`; kept when valid and strictly improving.
    fn try_relocate(&mut self, arr: &mut Arrangement, i1: usize, i2: usize, after: bool) -> bool {
        let (r1, r2) = (self.row_of[i1 - 1], self.row_of[i2 - 1]);
        let gain = (self.visited(r2) - self.visited(r1)) * self.inst.profit(i1);
        if gain <= 0 {
            return false;
        }
        let idx = self.memo_index(i1, i2, usize::from(after));
        if self.is_rejected(idx) {
            return false;
        }
        // gain > 0 means i1 leaves the bucket for a traveler row, so only
        // row r2 changes cost and it cannot become empty
        debug_assert!(r1 == self.m && r2 < self.m);
        if self.hopeless(r2) {
            return false;
        }
        let anchor = arr
            .row(r2)
            .iter()
            .position(|&q| q == i2)
            .expect("row_of is in sync");
        let at = anchor + usize::from(after);
        self.row_buf.clear();
        self.row_buf.extend_from_slice(&arr.row(r2)[..at]);
        self.row_buf.push(i1);
        self.row_buf.extend_from_slice(&arr.row(r2)[at..]);
        let new_cost = self.row_cost(r2).expect("r2 is a traveler row");
        if !self.valid_with(r2, new_cost) {
            self.mark_rejected(idx);
            return false;
        }
        let from = arr
            .row(r1)
            .iter()
            .position(|&q| q == i1)
            .expect("row_of is in sync");
        arr.row_mut(r1).remove(from);
        core::mem::swap(arr.row_mut(r2), &mut self.row_buf);
        self.costs[r2] = new_cost;
        self.row_of[i1 - 1] = r2;
        self.profit += gain;
        self.clear_rejected();
        true
    }

    /// Swaps the positions of `i1` and `i2`; kept when valid and strictly
    /// improving.
    fn try_exchange(&mut self, arr: &mut Arrangement, i1: usize, i2: usize) -> bool {
        let (r1, r2) = (self.row_of[i1 - 1], self.row_of[i2 - 1]);
        let gain =
            (self.visited(r2) - self.visited(r1)) * (self.inst.profit(i1) - self.inst.profit(i2));
        if gain <= 0 {
            return false;
        }
        let idx = self.memo_index(i1, i2, 0);
        if self.is_rejected(idx) {
            return false;
        }
        // exactly one of the rows is a traveler row; the bucket has no cost
        let (row, out, into) = if r1 < self.m {
            (r1, i1, i2)
        } else {
            (r2, i2, i1)
        };
        if self.hopeless(row) {
            return false;
        }
        let pos = arr
            .row(row)
            .iter()
            .position(|&q| q == out)
            .expect("row_of is in sync");
        self.row_buf.clear();
        self.row_buf.extend_from_slice(arr.row(row));
        self.row_buf[pos] = into;
        let new_cost = self.row_cost(row).expect("traveler row");
        if !self.valid_with(row, new_cost) {
            self.mark_rejected(idx);
            return false;
        }
        let p1 = arr
            .row(r1)
            .iter()
            .position(|&q| q == i1)
            .expect("row_of is in sync");
        let p2 = arr
            .row(r2)
            .iter()
            .position(|&q| q == i2)
            .expect("row_of is in sync");
        arr.row_mut(r1)[p1] = i2;
        arr.row_mut(r2)[p2] = i1;
        self.costs[row] = new_cost;
        self.row_of.swap(i1 - 1, i2 - 1);
        self.profit += gain;
        self.clear_rejected();
        true
    }

    fn run<C: Choices + ?Sized>(
        &mut self,
        arr: &mut Arrangement,
        l: usize,
        attempts: usize,
        choices: &mut C,
    ) -> usize {
        let r = self.inst.r();
        let mut kept = 0;
        for _ in 0..attempts {
            let i1 = 1 + choices.index(r);
            let i2 = 1 + choices.index(r);
            let ok = match l {
                1 => {
                    let after = choices.coin();
                    i1 != i2 && self.try_relocate(arr, i1, i2, after)
                }
                2 => i1 != i2 && self.try_exchange(arr, i1, i2),
                _ => panic!("neighborhood index {l} out of range 1..={L_MAX}"),
            };
            if ok {
                kept += 1;
                #[cfg(debug_assertions)]
                {
                    let ev = evaluate(arr, self.inst);
                    debug_assert_eq!(
                        ev.per_traveler_cost, self.costs,
                        "incremental costs drifted"
                    );
                    debug_assert_eq!(ev.profit, self.profit);
                }
            }
        }
        kept
    }
}

/// Local search with neighborhood `l` over `attempts` sampled moves.
///
/// Each attempt draws two set ids uniformly from `1..=r` (any rows) and, for
/// `l = 1`, a coin (true places `i1` after `i2`). `l = 1` relocates `i1`
/// next to `i2`; `l = 2` swaps their positions. A move is kept only if the
/// resulting arrangement is valid and its profit strictly higher.
pub fn local_search_step<C: Choices + ?Sized>(
    arr: &mut Arrangement,
    inst: &MdmsopInstance,
    l: usize,
    attempts: usize,
    choices: &mut C,
) -> LocalSearchOutcome {
    let mut ls = LocalSearch::new(inst, arr);
    let kept = ls.run(arr, l, attempts, choices);
    LocalSearchOutcome {
        kept,
        valid: ls.valid(),
        profit: ls.profit,
        costs: ls.costs,
    }
}

/// The state of one restart.
#[derive(Debug, Clone)]
pub struct Search<'a, R> {
    inst: &'a MdmsopInstance,
    rng: R,
    attempts: usize,
    incumbent: Arrangement,
    incumbent_profit: Profit,
    history: Vec<Profit>,
    shakes: u64,
    accepts: u64,
    outer_iterations: u64,
}

impl<'a, R: Choices> Search<'a, R> {
    /// Starts from a valid arrangement.
    pub fn new(inst: &'a MdmsopInstance, initial: Arrangement, rng: R, attempts: usize) -> Self {
        debug_assert!(is_valid(&initial, inst).is_valid());
        let p = profit(&initial, inst);
        Self {
            inst,
            rng,
            attempts,
            incumbent: initial,
            incumbent_profit: p,
            history: vec![p],
            shakes: 0,
            accepts: 0,
            outer_iterations: 0,
        }
    }

    pub fn incumbent(&self) -> &Arrangement {
        &self.incumbent
    }

    pub fn incumbent_profit(&self) -> Profit {
        self.incumbent_profit
    }

    /// Incumbent profits, starting with the initial solution's.
    pub fn history(&self) -> &[Profit] {
        &self.history
    }

    /// One pass of the neighborhood loop; true if anything was accepted.
    pub fn outer_iteration(&mut self) -> bool {
        self.outer_iterations += 1;
        let mut accepted = false;
        let mut l = 1;
        while l <= L_MAX {
            let mut candidate = self.incumbent.clone();
            shake(&mut candidate, l, &mut self.rng);
            self.shakes += 1;
            let ls = local_search_step(&mut candidate, self.inst, l, self.attempts, &mut self.rng);
            if ls.valid && ls.profit > self.incumbent_profit {
                debug_assert!(is_valid(&candidate, self.inst).is_valid());
                self.incumbent = candidate;
                self.incumbent_profit = ls.profit;
                self.history.push(ls.profit);
                self.accepts += 1;
                accepted = true;
                l = 1;
            } else {
                l += 1;
            }
        }
        accepted
    }

    pub fn all_sets_visited(&self) -> bool {
        self.incumbent.bucket().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    BadIterations,
    Time,
    /// Every set is visited; profit cannot grow.
    AllSetsVisited,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub restart: usize,
    pub seed: u64,
    pub arrangement: Arrangement,
    pub evaluation: Evaluation,
    pub best_profit: Profit,
    /// Incumbent profit after construction and after every acceptance.
    pub history: Vec<Profit>,
    pub shakes: u64,
    pub accepts: u64,
    pub outer_iterations: u64,
    pub stop: StopReason,
}

/// Runs restart number `restart` from a prepared initial solution.
pub fn run_restart_from<C: Clock + ?Sized>(
    inst: &MdmsopInstance,
    cfg: &VnsConfig,
    restart: usize,
    initial: Arrangement,
    clock: &C,
) -> RestartOutcome {
    let rng = restart_rng(cfg.seed, restart as u64);
    let mut search = Search::new(inst, initial, rng, cfg.ls_attempts_for(inst));
    let mut bad = 0u64;
    let stop = loop {
        if search.all_sets_visited() {
            break StopReason::AllSetsVisited;
        }
        if bad >= cfg.max_bad_iterations {
            break StopReason::BadIterations;
        }
        if clock.elapsed_secs() >= cfg.max_time_secs {
            break StopReason::Time;
        }
        if search.outer_iteration() {
            bad = 0;
        } else {
            bad += 1;
        }
    };
    let evaluation = evaluate(&search.incumbent, inst);
    RestartOutcome {
        restart,
        seed: cfg.seed.wrapping_add(restart as u64),
        best_profit: search.incumbent_profit,
        evaluation,
        arrangement: search.incumbent,
        history: search.history,
        shakes: search.shakes,
        accepts: search.accepts,
        outer_iterations: search.outer_iterations,
        stop,
    }
}

/// Runs one restart, building the initial solution first.
pub fn run_restart<C: Clock + ?Sized>(
    inst: &MdmsopInstance,
    cfg: &VnsConfig,
    restart: usize,
    clock: &C,
) -> Result<RestartOutcome, Infeasible> {
    let initial = initial_solution(inst)?;
    Ok(run_restart_from(inst, cfg, restart, initial, clock))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub seed: u64,
    pub best_profit: Profit,
    pub best_restart: usize,
    pub best: Evaluation,
    pub best_arrangement: Arrangement,
    pub restarts: Vec<RestartOutcome>,
    pub elapsed_secs: f64,
}

impl RunReport {
    /// Merges restart outcomes: highest profit wins, ties go to the lowest
    /// restart index. Input order does not matter.
    pub fn merge(seed: u64, mut restarts: Vec<RestartOutcome>, elapsed_secs: f64) -> Option<Self> {
        restarts.sort_by_key(|o| o.restart);
        let best = restarts
            .iter()
            .fold(None::<&RestartOutcome>, |acc, o| match acc {
                Some(b) if b.best_profit >= o.best_profit => Some(b),
                _ => Some(o),
            })?
            .clone();
        Some(Self {
            seed,
            best_profit: best.best_profit,
            best_restart: best.restart,
            best: best.evaluation,
            best_arrangement: best.arrangement,
            restarts,
            elapsed_secs,
        })
    }

    pub fn restart_profits(&self) -> Vec<Profit> {
        self.restarts.iter().map(|o| o.best_profit).collect()
    }
}

/// Full search: `iteration_count` restarts, run one after the other.
pub fn run_vns<C: Clock + ?Sized>(
    inst: &MdmsopInstance,
    cfg: &VnsConfig,
    clock: &C,
) -> Result<RunReport, Infeasible> {
    let initial = initial_solution(inst)?;
    let restarts = (0..cfg.iteration_count)
        .map(|k| run_restart_from(inst, cfg, k, initial.clone(), clock))
        .collect();
    Ok(RunReport::merge(cfg.seed, restarts, clock.elapsed_secs()).expect("at least one restart"))
}
