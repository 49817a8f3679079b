#![allow(dead_code)]

use mdmsop_core::generate::TinySpec;
use mdmsop_core::{BudgetMode, Cost, MdmsopInstance, Profit, ProfitRule};

/// Cheapest closed tour over `row` by trying every node combination.
pub fn cartesian_tour_cost(inst: &MdmsopInstance, t: usize, row: &[usize]) -> Cost {
    let depot = inst.depot(t);
    let mut best = Cost::MAX;
    let mut pick = vec![0usize; row.len()];
    loop {
        let mut cost = 0;
        let mut at = depot;
        for (k, &q) in row.iter().enumerate() {
            let v = inst.set_nodes(q)[pick[k]];
            cost += inst.c(at, v);
            at = v;
        }
        cost += inst.c(at, depot);
        best = best.min(cost);
        let mut k = 0;
        loop {
            if k == row.len() {
                return best;
            }
            pick[k] += 1;
            if pick[k] < inst.set_nodes(row[k]).len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Best (profit, total cost) over every arrangement, found by inserting
/// sets one at a time into every traveler position or leaving them out.
pub fn brute_force(inst: &MdmsopInstance) -> Option<(Profit, Cost)> {
    fn go(
        inst: &MdmsopInstance,
        q: usize,
        rows: &mut Vec<Vec<usize>>,
        best: &mut Option<(Profit, Cost)>,
    ) {
        if q > inst.r() {
            if rows.iter().any(|r| r.is_empty()) {
                return;
            }
            let costs: Vec<Cost> = rows
                .iter()
                .enumerate()
                .map(|(k, r)| cartesian_tour_cost(inst, k + 1, r))
                .collect();
            let fits = match inst.budget_mode() {
                BudgetMode::Cumulative => costs.iter().sum::<Cost>() <= inst.budget(),
                BudgetMode::Individual => costs.iter().all(|&c| c <= inst.budget()),
            };
            if !fits {
                return;
            }
            let p: Profit = rows.iter().flatten().map(|&s| inst.profit(s)).sum();
            let c: Cost = costs.iter().sum();
            let better = match *best {
                None => true,
                Some((bp, bc)) => p > bp || (p == bp && c < bc),
            };
            if better {
                *best = Some((p, c));
            }
            return;
        }
        go(inst, q + 1, rows, best);
        for t in 0..rows.len() {
            for pos in 0..=rows[t].len() {
                rows[t].insert(pos, q);
                go(inst, q + 1, rows, best);
                rows[t].remove(pos);
            }
        }
    }
    let mut best = None;
    go(inst, 1, &mut vec![Vec::new(); inst.travelers()], &mut best);
    best
}

pub fn spec(
    travelers: usize,
    max_sets: usize,
    max_nodes: usize,
    mode: BudgetMode,
    rule: ProfitRule,
) -> TinySpec {
    TinySpec {
        travelers,
        sets: (travelers, max_sets),
        nodes: (travelers, max_nodes),
        mode,
        rule,
        ..TinySpec::default()
    }
}
