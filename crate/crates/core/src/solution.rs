//! Arrangements, tour-cost evaluation and feasibility.
//!
//! An [`Arrangement`] fixes which sets each traveler visits and in what
//! order. The concrete node picked inside each set is not stored: for a
//! fixed set order the cheapest closed tour is found by a layered shortest
//! path (one layer per set), see [`DpTable`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{BudgetMode, MdmsopInstance};
use crate::{Cost, Profit};

/// Visit orders of the `m` travelers plus a trailing bucket of unvisited sets.
///
/// Row `i < m` belongs to traveler `i + 1`; row `m` is the bucket. Rows hold
/// profit-set ids `1..=r`; depot sets never appear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    rows: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    RowCount { expected: usize, found: usize },
    OutOfRange { set: usize, row: usize },
    Duplicate { set: usize },
    Missing { set: usize },
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::RowCount { expected, found } => {
                write!(f, "expected {expected} rows, found {found}")
            }
            PartitionError::OutOfRange { set, row } => {
                write!(f, "row {row} holds invalid set id {set}")
            }
            PartitionError::Duplicate { set } => write!(f, "set {set} appears more than once"),
            PartitionError::Missing { set } => write!(f, "set {set} appears in no row"),
        }
    }
}

impl Arrangement {
    /// Every set in the bucket, ascending.
    pub fn unvisited(travelers: usize, r: usize) -> Self {
        let mut rows = vec![Vec::new(); travelers + 1];
        rows[travelers] = (1..=r).collect();
        Self { rows }
    }

    /// Wraps raw rows (`travelers + 1` of them, bucket last). No validation.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        assert!(
            !rows.is_empty(),
            "an arrangement needs at least the bucket row"
        );
        Self { rows }
    }

    pub fn travelers(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<usize>> {
        self.rows
    }

    pub fn row(&self, index: usize) -> &[usize] {
        &self.rows[index]
    }

    pub fn row_mut(&mut self, index: usize) -> &mut Vec<usize> {
        &mut self.rows[index]
    }

    /// Visit order of traveler `t` (1-based).
    pub fn route_sets(&self, t: usize) -> &[usize] {
        &self.rows[t - 1]
    }

    pub fn bucket(&self) -> &[usize] {
        &self.rows[self.rows.len() - 1]
    }

    pub fn bucket_mut(&mut self) -> &mut Vec<usize> {
        let last = self.rows.len() - 1;
        &mut self.rows[last]
    }

    /// Sets in traveler rows, row by row.
    pub fn visited(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows[..self.travelers()].iter().flatten().copied()
    }

    /// Checks that the rows partition `1..=r` exactly.
    pub fn check_partition(&self, travelers: usize, r: usize) -> Result<(), PartitionError> {
        if self.rows.len() != travelers + 1 {
            return Err(PartitionError::RowCount {
                expected: travelers + 1,
                found: self.rows.len(),
            });
        }
        let mut seen = vec![false; r];
        for (row, sets) in self.rows.iter().enumerate() {
            for &q in sets {
                if q == 0 || q > r {
                    return Err(PartitionError::OutOfRange { set: q, row });
                }
                if core::mem::replace(&mut seen[q - 1], true) {
                    return Err(PartitionError::Duplicate { set: q });
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(k) => Err(PartitionError::Missing { set: k + 1 }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            f.write_str("[")?;
            for (k, q) in row.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{q}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Costs, profit and concrete node routes of an arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub per_traveler_cost: Vec<Cost>,
    pub total_cost: Cost,
    pub profit: Profit,
    /// One route per traveler, starting and ending at its depot.
    pub routes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpEntry {
    pub node: usize,
    pub cost: Cost,
    /// Index of the predecessor entry in the previous layer.
    pub pred: usize,
}

/// Layered shortest-path table for one traveler and one set order.
///
/// Layer 0 holds the depot at cost 0; layer `i` holds, for every node of the
/// `i`-th set, the cheapest cost of reaching it from the depot through one
/// node of each earlier set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    pub layers: Vec<Vec<DpEntry>>,
}

impl DpTable {
    pub fn build(inst: &MdmsopInstance, traveler: usize, row: &[usize]) -> Self {
        let depot = inst.depot(traveler);
        let mut layers = Vec::with_capacity(row.len() + 1);
        layers.push(vec![DpEntry {
            node: depot,
            cost: 0,
            pred: 0,
        }]);
        for &q in row {
            let prev: &Vec<DpEntry> = layers.last().expect("layer 0 exists");
            let layer = inst
                .set_nodes(q)
                .iter()
                .map(|&v| {
                    let dist = inst.cost().row(v);
                    let mut best = DpEntry {
                        node: v,
                        cost: Cost::MAX,
                        pred: 0,
                    };
                    for (k, e) in prev.iter().enumerate() {
                        let c = e.cost + dist[e.node - 1];
                        if c < best.cost {
                            best.cost = c;
                            best.pred = k;
                        }
                    }
                    best
                })
                .collect();
            layers.push(layer);
        }
        Self { layers }
    }

    /// Closes the tour back to the depot: minimum cost and node route.
    pub fn close(&self, inst: &MdmsopInstance, traveler: usize) -> (Cost, Vec<usize>) {
        let depot = inst.depot(traveler);
        let last = self.layers.last().expect("layer 0 exists");
        let mut best = (Cost::MAX, 0);
        for (k, e) in last.iter().enumerate() {
            let c = e.cost + inst.c(e.node, depot);
            if c < best.0 {
                best = (c, k);
            }
        }
        let mut route = vec![depot; self.layers.len() + 1];
        let mut k = best.1;
        for i in (1..self.layers.len()).rev() {
            let e = self.layers[i][k];
            route[i] = e.node;
            k = e.pred;
        }
        (best.0, route)
    }
}

/// Cost-only variant of the layered shortest path with reusable buffers.
#[derive(Debug, Default, Clone)]
pub(crate) struct TourCoster {
    prev: Vec<Cost>,
    next: Vec<Cost>,
}

impl TourCoster {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn cost(&mut self, inst: &MdmsopInstance, traveler: usize, row: &[usize]) -> Cost {
        let Some((&first, rest)) = row.split_first() else {
            return 0;
        };
        let depot = inst.depot(traveler);
        let depot_dist = inst.cost().row(depot);
        let mut prev_nodes = inst.set_nodes(first);
        self.prev.clear();
        self.prev
            .extend(prev_nodes.iter().map(|&v| depot_dist[v - 1]));
        for &q in rest {
            let nodes = inst.set_nodes(q);
            self.next.clear();
            for &v in nodes {
                let dist = inst.cost().row(v);
                let best = prev_nodes
                    .iter()
                    .zip(&self.prev)
                    .map(|(&u, &c)| c + dist[u - 1])
                    .min()
                    .expect("sets are non-empty");
                self.next.push(best);
            }
            core::mem::swap(&mut self.prev, &mut self.next);
            prev_nodes = nodes;
        }
        prev_nodes
            .iter()
            .zip(&self.prev)
            .map(|(&u, &c)| c + depot_dist[u - 1])
            .min()
            .expect("sets are non-empty")
    }
}

/// Minimum closed-tour cost of traveler `t` visiting `row` in order.
pub fn tour_cost(inst: &MdmsopInstance, traveler: usize, row: &[usize]) -> Cost {
    TourCoster::new().cost(inst, traveler, row)
}

/// Evaluates every traveler row; over-budget arrangements still evaluate.
pub fn evaluate(arr: &Arrangement, inst: &MdmsopInstance) -> Evaluation {
    let m = arr.travelers();
    let mut per_traveler_cost = Vec::with_capacity(m);
    let mut routes = Vec::with_capacity(m);
    for t in 1..=m {
        let (cost, route) = DpTable::build(inst, t, arr.route_sets(t)).close(inst, t);
        per_traveler_cost.push(cost);
        routes.push(route);
    }
    Evaluation {
        total_cost: per_traveler_cost.iter().sum(),
        per_traveler_cost,
        profit: profit(arr, inst),
        routes,
    }
}

/// Sum of the profits of all sets in traveler rows.
pub fn profit(arr: &Arrangement, inst: &MdmsopInstance) -> Profit {
    arr.visited().map(|q| inst.profit(q)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Partition(PartitionError),
    UnusedTraveler {
        traveler: usize,
    },
    /// Cumulative mode: the summed tour length exceeds the budget.
    BudgetExceeded {
        total: Cost,
        budget: Cost,
    },
    /// Individual mode: one traveler's tour exceeds the budget.
    TravelerOverBudget {
        traveler: usize,
        cost: Cost,
        budget: Cost,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Partition(e) => write!(f, "partition: {e}"),
            Violation::UnusedTraveler { traveler } => {
                write!(f, "traveler {traveler} visits no set")
            }
            Violation::BudgetExceeded { total, budget } => {
                write!(f, "total cost {total} exceeds budget {budget}")
            }
            Violation::TravelerOverBudget {
                traveler,
                cost,
                budget,
            } => {
                write!(f, "traveler {traveler} cost {cost} exceeds budget {budget}")
            }
        }
    }
}

/// Outcome of [`is_valid`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Validity {
    pub violations: Vec<Violation>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// True when `costs` (one per traveler) respect the instance budget.
#[inline]
pub(crate) fn within_budget(inst: &MdmsopInstance, costs: &[Cost]) -> bool {
    match inst.budget_mode() {
        BudgetMode::Cumulative => costs.iter().sum::<Cost>() <= inst.budget(),
        BudgetMode::Individual => costs.iter().all(|&c| c <= inst.budget()),
    }
}

fn budget_violations(inst: &MdmsopInstance, costs: &[Cost], out: &mut Vec<Violation>) {
    let budget = inst.budget();
    match inst.budget_mode() {
        BudgetMode::Cumulative => {
            let total = costs.iter().sum();
            if total > budget {
                out.push(Violation::BudgetExceeded { total, budget });
            }
        }
        BudgetMode::Individual => {
            for (k, &cost) in costs.iter().enumerate() {
                if cost > budget {
                    out.push(Violation::TravelerOverBudget {
                        traveler: k + 1,
                        cost,
                        budget,
                    });
                }
            }
        }
    }
}

/// Full feasibility check: partition, every traveler used, budget.
pub fn is_valid(arr: &Arrangement, inst: &MdmsopInstance) -> Validity {
    let mut violations = Vec::new();
    let partition = arr.check_partition(inst.travelers(), inst.r());
    let structurally_sound = !matches!(
        partition,
        Err(PartitionError::RowCount { .. } | PartitionError::OutOfRange { .. })
    );
    if let Err(e) = partition {
        violations.push(Violation::Partition(e));
    }
    if !structurally_sound {
        return Validity { violations };
    }
    for t in 1..=arr.travelers() {
        if arr.route_sets(t).is_empty() {
            violations.push(Violation::UnusedTraveler { traveler: t });
        }
    }
    let mut coster = TourCoster::new();
    let costs: Vec<Cost> = (1..=arr.travelers())
        .map(|t| coster.cost(inst, t, arr.route_sets(t)))
        .collect();
    budget_violations(inst, &costs, &mut violations);
    Validity { violations }
}
