//! Exhaustive solver for tiny instances.
//!
//! Every set goes to one traveler or stays unvisited, giving `(m + 1)^r`
//! assignments. For each traveler and subset of sets, the cheapest closed
//! tour over every ordering and node choice is tabulated once by a backward
//! recursion over (remaining sets, current node). An assignment is feasible
//! when every traveler has a set and the costs fit the budget.
//!
//! Among optimal assignments the lowest total cost wins, then the
//! lexicographically smallest traveler rows, where each row is the
//! lexicographically first ordering attaining that traveler's minimum cost.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::instance::MdmsopInstance;
use crate::solution::{evaluate, within_budget, Arrangement, Evaluation};
use crate::{Cost, Profit};

const INF: Cost = Cost::MAX / 4;

/// Profit, cost, set mask and ordered set row per traveler.
type Best = (Profit, Cost, Vec<usize>, Vec<Vec<usize>>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_sets: usize,
    pub max_nodes: usize,
    /// Cap on the number of enumerated assignments.
    pub max_states: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_sets: 8,
            max_nodes: 16,
            max_states: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitExceeded {
    Sets { sets: usize, limit: usize },
    Nodes { nodes: usize, limit: usize },
    States { limit: u64 },
}

impl fmt::Display for LimitExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Sets { sets, limit } => {
                write!(
                    f,
                    "exact solver limit exceeded: {sets} sets, at most {limit} allowed"
                )
            }
            Self::Nodes { nodes, limit } => {
                write!(
                    f,
                    "exact solver limit exceeded: {nodes} nodes, at most {limit} allowed"
                )
            }
            Self::States { limit } => {
                write!(
                    f,
                    "exact solver limit exceeded: more than {limit} assignments"
                )
            }
        }
    }
}

impl core::error::Error for LimitExceeded {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub arrangement: Arrangement,
    pub evaluation: Evaluation,
    /// Assignments enumerated, feasible or not.
    pub assignments: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactResult {
    Optimal(ExactSolution),
    Infeasible,
}

impl ExactResult {
    pub fn profit(&self) -> Option<Profit> {
        match self {
            Self::Optimal(s) => Some(s.evaluation.profit),
            Self::Infeasible => None,
        }
    }

    pub fn solution(&self) -> Option<&ExactSolution> {
        match self {
            Self::Optimal(s) => Some(s),
            Self::Infeasible => None,
        }
    }
}

/// Cheapest tours of one traveler over every subset of sets.
struct SubsetTours {
    depot: usize,
    n: usize,
    /// `to_go[mask * n + (v - 1)]`: cheapest path from node `v` through one
    /// node of every set in `mask`, back to the depot.
    to_go: Vec<Cost>,
    /// `best[mask]`: cheapest closed tour from the depot over `mask`.
    best: Vec<Cost>,
}

impl SubsetTours {
    fn build(inst: &MdmsopInstance, t: usize) -> Self {
        let (n, r) = (inst.n(), inst.r());
        let depot = inst.depot(t);
        let full = 1usize << r;
        let mut to_go = vec![INF; full * n];
        for v in 1..=n {
            to_go[v - 1] = inst.c(v, depot);
        }
        for mask in 1..full {
            for v in 1..=n {
                let mut best = INF;
                for q in bits(mask) {
                    let rest = mask & !(1 << (q - 1));
                    for &u in inst.set_nodes(q) {
                        best = best.min(inst.c(v, u) + to_go[rest * n + u - 1]);
                    }
                }
                to_go[mask * n + v - 1] = best;
            }
        }
        let mut best = vec![0; full];
        for (mask, slot) in best.iter_mut().enumerate().skip(1) {
            *slot = bits(mask)
                .flat_map(|q| {
                    let rest = mask & !(1 << (q - 1));
                    inst.set_nodes(q).iter().map(move |&u| (u, rest))
                })
                .map(|(u, rest)| inst.c(depot, u) + to_go[rest * n + u - 1])
                .min()
                .expect("mask is non-empty");
        }
        Self {
            depot,
            n,
            to_go,
            best,
        }
    }

    /// Lexicographically first set order whose tour costs `best[mask]`.
    fn first_order(&self, inst: &MdmsopInstance, mask: usize) -> Vec<usize> {
        let target = self.best[mask];
        let mut order = Vec::new();
        // cheapest cost to stand on each node after the chosen prefix
        let mut frontier: Vec<(usize, Cost)> = vec![(self.depot, 0)];
        let mut rest = mask;
        while rest != 0 {
            let mut chosen = None;
            for q in bits(rest) {
                let after = rest & !(1 << (q - 1));
                let next: Vec<(usize, Cost)> = inst
                    .set_nodes(q)
                    .iter()
                    .map(|&u| {
                        let reach = frontier
                            .iter()
                            .map(|&(v, c)| c + inst.c(v, u))
                            .min()
                            .expect("non-empty frontier");
                        (u, reach)
                    })
                    .collect();
                let completes = next
                    .iter()
                    .any(|&(u, c)| c + self.to_go[after * self.n + u - 1] == target);
                if completes {
                    chosen = Some((q, after, next));
                    break;
                }
            }
            let (q, after, next) = chosen.expect("an optimal completion exists");
            order.push(q);
            rest = after;
            frontier = next;
        }
        order
    }
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize)
        .filter(move |&b| mask >> b & 1 == 1)
        .map(|b| b + 1)
}

fn check_limits(inst: &MdmsopInstance, lim: &ExactLimits) -> Result<(), LimitExceeded> {
    if inst.r() > lim.max_sets {
        return Err(LimitExceeded::Sets {
            sets: inst.r(),
            limit: lim.max_sets,
        });
    }
    if inst.n() > lim.max_nodes {
        return Err(LimitExceeded::Nodes {
            nodes: inst.n(),
            limit: lim.max_nodes,
        });
    }
    let states = (inst.travelers() as u64 + 1).checked_pow(inst.r() as u32);
    if states.is_none_or(|s| s > lim.max_states) {
        return Err(LimitExceeded::States {
            limit: lim.max_states,
        });
    }
    Ok(())
}

/// Optimal arrangement by exhaustive enumeration, or `Infeasible`.
pub fn solve_exact(inst: &MdmsopInstance, lim: &ExactLimits) -> Result<ExactResult, LimitExceeded> {
    check_limits(inst, lim)?;
    let (m, r) = (inst.travelers(), inst.r());
    let tours: Vec<SubsetTours> = (1..=m).map(|t| SubsetTours::build(inst, t)).collect();
    let mut orders: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; 1 << r]; m];
    let rows_of = |masks: &[usize], orders: &mut Vec<Vec<Option<Vec<usize>>>>| -> Vec<Vec<usize>> {
        masks
            .iter()
            .enumerate()
            .map(|(t, &mask)| {
                orders[t][mask]
                    .get_or_insert_with(|| tours[t].first_order(inst, mask))
                    .clone()
            })
            .collect()
    };

    // digit k of the counter is the owner of set k+1; m means unvisited
    let mut owner = vec![0usize; r];
    let mut masks = vec![0usize; m];
    let mut costs = vec![0 as Cost; m];
    let mut best: Option<Best> = None;
    let mut assignments = 0u64;
    loop {
        assignments += 1;
        masks.iter_mut().for_each(|x| *x = 0);
        let mut gained: Profit = 0;
        for (k, &o) in owner.iter().enumerate() {
            if o < m {
                masks[o] |= 1 << k;
                gained += inst.profit(k + 1);
            }
        }
        if masks.iter().all(|&x| x != 0) {
            for t in 0..m {
                costs[t] = tours[t].best[masks[t]];
            }
            if within_budget(inst, &costs) {
                let total: Cost = costs.iter().sum();
                let better = match &best {
                    None => true,
                    Some((p, c, bm, brows)) => match gained.cmp(p).then(c.cmp(&total)) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => bm != &masks && rows_of(&masks, &mut orders) < *brows,
                    },
                };
                if better {
                    let rows = rows_of(&masks, &mut orders);
                    best = Some((gained, total, masks.clone(), rows));
                }
            }
        }
        // advance the base-(m+1) counter
        let mut k = 0;
        loop {
            if k == r {
                return Ok(finish(inst, best, assignments));
            }
            owner[k] += 1;
            if owner[k] <= m {
                break;
            }
            owner[k] = 0;
            k += 1;
        }
    }
}

fn finish(inst: &MdmsopInstance, best: Option<Best>, assignments: u64) -> ExactResult {
    let Some((p, c, _, mut rows)) = best else {
        return ExactResult::Infeasible;
    };
    let visited: Vec<bool> = {
        let mut v = vec![false; inst.r()];
        rows.iter().flatten().for_each(|&q| v[q - 1] = true);
        v
    };
    rows.push((1..=inst.r()).filter(|&q| !visited[q - 1]).collect());
    let arrangement = Arrangement::from_rows(rows);
    let evaluation = evaluate(&arrangement, inst);
    debug_assert_eq!(evaluation.profit, p);
    debug_assert_eq!(evaluation.total_cost, c);
    ExactResult::Optimal(ExactSolution {
        arrangement,
        evaluation,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{BudgetMode, GtspInstance, Point, ProfitRule};

    fn inst(
        coords: &[(f64, f64)],
        sets: Vec<Vec<usize>>,
        m: usize,
        mode: BudgetMode,
        t_max: Cost,
    ) -> MdmsopInstance {
        let pts = coords.iter().map(|&(x, y)| Point { x, y }).collect();
        let base = GtspInstance::from_sets("t", pts, sets).unwrap();
        MdmsopInstance::adapt(base, m, ProfitRule::G1, mode, 1.0, t_max).unwrap()
    }

    #[test]
    fn single_affordable_set_is_visited() {
        let i = inst(
            &[(0.0, 0.0), (3.0, 4.0)],
            vec![vec![1, 2]],
            1,
            BudgetMode::Cumulative,
            100,
        );
        let sol = solve_exact(&i, &ExactLimits::default()).unwrap();
        let s = sol.solution().unwrap();
        assert_eq!(s.arrangement.rows(), &[vec![1], vec![]]);
        assert_eq!(s.evaluation.profit, 2);
    }

    #[test]
    fn zero_budget_is_infeasible() {
        // both depots sit on nodes of set 2; whoever does not take it must
        // travel to set 1
        let i = inst(
            &[(0.0, 0.0), (30.0, 0.0), (30.0, 40.0)],
            vec![vec![1], vec![2, 3]],
            2,
            BudgetMode::Cumulative,
            1,
        );
        let i = MdmsopInstance::adapt(
            i.base().clone(),
            2,
            ProfitRule::G1,
            BudgetMode::Cumulative,
            1e-12,
            1,
        )
        .unwrap();
        assert_eq!(i.budget(), 0);
        assert_eq!(
            solve_exact(&i, &ExactLimits::default()).unwrap(),
            ExactResult::Infeasible
        );
    }

    #[test]
    fn limits_are_enforced() {
        let coords: Vec<(f64, f64)> = (0..9).map(|k| (k as f64, 0.0)).collect();
        let sets = (1..=9).map(|k| vec![k]).collect();
        let i = inst(&coords, sets, 1, BudgetMode::Cumulative, 10);
        assert_eq!(
            solve_exact(&i, &ExactLimits::default()),
            Err(LimitExceeded::Sets { sets: 9, limit: 8 })
        );
        let tight = ExactLimits {
            max_sets: 9,
            max_nodes: 16,
            max_states: 100,
        };
        assert_eq!(
            solve_exact(&i, &tight),
            Err(LimitExceeded::States { limit: 100 })
        );
    }

    #[test]
    fn first_order_prefers_lowest_set_among_equal_costs() {
        // points on a line: 0 --- 10 --- 20, depot duplicates node 3 at 20
        let i = inst(
            &[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)],
            vec![vec![1], vec![2], vec![3]],
            1,
            BudgetMode::Cumulative,
            1000,
        );
        let tours = SubsetTours::build(&i, 1);
        assert_eq!(tours.best[0b011], 40);
        // both [1 2] and [2 1] cost 40; the first one wins
        assert_eq!(tours.first_order(&i, 0b011), vec![1, 2]);
    }

    #[test]
    fn prefers_cheaper_solution_at_equal_profit() {
        // two singleton sets of equal profit; only one fits; the closer wins
        let i = inst(
            &[(0.0, 0.0), (4.0, 0.0), (10.0, 0.0)],
            vec![vec![1], vec![2], vec![3]],
            1,
            BudgetMode::Cumulative,
            13,
        );
        let s = solve_exact(&i, &ExactLimits::default()).unwrap();
        let s = s.solution().unwrap();
        // depot at (10,0) owns set 3 at zero cost; set 2 round trip 12, set 1 20
        assert_eq!(s.arrangement.route_sets(1), &[2, 3]);
        assert_eq!(s.evaluation.total_cost, 12);
    }
}
