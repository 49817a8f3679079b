//! Initial solution construction.
//!
//! Greedy insertion from the empty arrangement is tried first. When it
//! leaves a traveler unused, every traveler is seeded with one set by solving an assignment problem on
//! depot round-trip costs, and greedy insertion then grows that seed. If even
//! the minimum-cost assignment exceeds the budget, no feasible solution
//! exists.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{BudgetMode, MdmsopInstance};
use crate::solution::{is_valid, Arrangement, TourCoster};
use crate::Cost;

/// The instance admits no solution that uses every traveler within budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infeasible;

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no feasible solution")
    }
}

impl core::error::Error for Infeasible {}

/// Greedy insertion of unvisited sets.
///
/// Sets are scanned in ascending id order. Each is inserted at the traveler
/// and position minimizing `(cost increase) / profit` among positions that
/// keep the arrangement within budget; ties keep the earliest traveler and
/// position. Passes repeat until one inserts nothing. Zero-profit sets are
/// never inserted.
pub fn greedy_insert(mut arr: Arrangement, inst: &MdmsopInstance) -> Arrangement {
    let m = arr.travelers();
    let mut coster = TourCoster::new();
    let mut costs: Vec<Cost> = (1..=m)
        .map(|t| coster.cost(inst, t, arr.route_sets(t)))
        .collect();
    let mut candidate = Vec::new();
    loop {
        let mut inserted_any = false;
        let mut q = 1;
        while q <= inst.r() {
            let Some(bucket_pos) = arr.bucket().iter().position(|&b| b == q) else {
                q += 1;
                continue;
            };
            let p = inst.profit(q);
            if p <= 0 {
                q += 1;
                continue;
            }
            let total: Cost = costs.iter().sum();
            // (delta, traveler, position, new cost); ratios share the
            // denominator p, so comparing deltas is comparing ratios
            let mut best: Option<(Cost, usize, usize, Cost)> = None;
            for t in 1..=m {
                let row = arr.route_sets(t);
                for pos in 0..=row.len() {
                    candidate.clear();
                    candidate.extend_from_slice(&row[..pos]);
                    candidate.push(q);
                    candidate.extend_from_slice(&row[pos..]);
                    let new_cost = coster.cost(inst, t, &candidate);
                    let fits = match inst.budget_mode() {
                        BudgetMode::Cumulative => total - costs[t - 1] + new_cost <= inst.budget(),
                        BudgetMode::Individual => new_cost <= inst.budget(),
                    };
                    if !fits {
                        continue;
                    }
                    let delta = new_cost - costs[t - 1];
                    if best.is_none_or(|(d, ..)| delta < d) {
                        best = Some((delta, t, pos, new_cost));
                    }
                }
            }
            if let Some((_, t, pos, new_cost)) = best {
                arr.bucket_mut().remove(bucket_pos);
                arr.row_mut(t - 1).insert(pos, q);
                costs[t - 1] = new_cost;
                inserted_any = true;
            }
            q += 1;
        }
        if !inserted_any {
            return arr;
        }
    }
}

/// Optimal assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `row_to_col[i]` is the column assigned to row `i`.
    pub row_to_col: Vec<usize>,
    pub total: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
}

impl fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentError::NotSquare { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
        }
    }
}

impl core::error::Error for AssignmentError {}

/// Minimum-cost perfect matching on a square matrix (Hungarian method with
/// potentials, O(n^3)).
///
/// Deterministic: columns are scanned in ascending order and ties keep the
/// lowest column index.
pub fn hungarian(costs: &[Vec<Cost>]) -> Result<Assignment, AssignmentError> {
    let n = costs.len();
    for (row, r) in costs.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    if n == 0 {
        return Ok(Assignment {
            row_to_col: Vec::new(),
            total: 0,
        });
    }
    // 1-based arrays; column 0 is the virtual root of each augmenting search
    let mut u = vec![0 as Cost; n + 1];
    let mut v = vec![0 as Cost; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![Cost::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = Cost::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[matched_row[j] - 1] = j - 1;
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i][j])
        .sum();
    Ok(Assignment { row_to_col, total })
}

/// Travelers against profit sets, padded with all-zero dummy rows.
///
/// Cell `(t, q)` is the cheapest depot round trip of traveler `t + 1`
/// through a node of set `q + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentProblem {
    pub costs: Vec<Vec<Cost>>,
    pub real_rows: usize,
}

impl AssignmentProblem {
    pub fn for_instance(inst: &MdmsopInstance) -> Self {
        let m = inst.travelers();
        let r = inst.r();
        let dim = m.max(r);
        let mut costs = vec![vec![0; dim]; dim];
        for t in 1..=m {
            let depot = inst.depot(t);
            for q in 1..=r {
                costs[t - 1][q - 1] = inst
                    .set_nodes(q)
                    .iter()
                    .map(|&v| inst.c(depot, v) + inst.c(v, depot))
                    .min()
                    .expect("sets are non-empty");
            }
        }
        Self {
            costs,
            real_rows: m,
        }
    }
}

/// One set per traveler from the minimum-cost assignment, or [`Infeasible`]
/// when that assignment already breaks the budget.
pub fn hungarian_seed(inst: &MdmsopInstance) -> Result<Arrangement, Infeasible> {
    let problem = AssignmentProblem::for_instance(inst);
    let assignment = hungarian(&problem.costs).expect("assignment matrix is square");
    let m = problem.real_rows;
    let real: Vec<Cost> = (0..m)
        .map(|t| problem.costs[t][assignment.row_to_col[t]])
        .collect();
    let over = match inst.budget_mode() {
        BudgetMode::Cumulative => real.iter().sum::<Cost>() > inst.budget(),
        BudgetMode::Individual => real.iter().any(|&c| c > inst.budget()),
    };
    if over {
        return Err(Infeasible);
    }
    let mut rows = vec![Vec::new(); m + 1];
    for (t, row) in rows.iter_mut().take(m).enumerate() {
        row.push(assignment.row_to_col[t] + 1);
    }
    rows[m] = (1..=inst.r())
        .filter(|q| !assignment.row_to_col[..m].contains(&(q - 1)))
        .collect();
    Ok(Arrangement::from_rows(rows))
}

/// Greedy first, Hungarian-seeded greedy as fallback.
pub fn initial_solution(inst: &MdmsopInstance) -> Result<Arrangement, Infeasible> {
    let greedy = greedy_insert(Arrangement::unvisited(inst.travelers(), inst.r()), inst);
    if is_valid(&greedy, inst).is_valid() {
        return Ok(greedy);
    }
    let seed = hungarian_seed(inst)?;
    let grown = greedy_insert(seed, inst);
    debug_assert!(
        is_valid(&grown, inst).is_valid(),
        "seeded greedy must stay valid"
    );
    Ok(grown)
}
