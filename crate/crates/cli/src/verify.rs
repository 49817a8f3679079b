//! Independent check of a solution file against an instance.
//!
//! The file's routes are checked for shape first, then rebuilt into an
//! arrangement for the feasibility validator, then encoded into both ILP
//! models. Every claimed number is recomputed from the routes.

use std::collections::HashSet;
use std::fmt::Write;

use mdmsop_core::{is_valid, Arrangement, Cost, MdmsopInstance, ModelChecker, Profit, SecVariant};

use crate::solution_file::SolutionFile;

/// Per-family outcome of one model check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub family: &'static str,
    pub checked: usize,
    pub violated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelReport {
    pub sec: SecVariant,
    pub families: Vec<FamilyVerdict>,
    pub out_of_bounds: Vec<String>,
    pub objective: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    /// Problems found before the models could be consulted, plus mismatches
    /// between claimed and recomputed numbers.
    pub problems: Vec<String>,
    pub validator: Vec<String>,
    pub models: Vec<ModelReport>,
}

impl VerifyReport {
    pub fn violation_count(&self) -> usize {
        self.problems.len()
            + self.validator.len()
            + self
                .models
                .iter()
                .map(|m| {
                    m.out_of_bounds.len() + m.families.iter().map(|f| f.violated).sum::<usize>()
                })
                .sum::<usize>()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.problems {
            let _ = writeln!(out, "problem: {p}");
        }
        if self.problems.is_empty() || !self.models.is_empty() {
            if self.validator.is_empty() {
                out.push_str("validator: ok\n");
            }
            for v in &self.validator {
                let _ = writeln!(out, "validator: {v}");
            }
        }
        for m in &self.models {
            let _ = writeln!(out, "model {} (objective {}):", m.sec, m.objective);
            for f in &m.families {
                let verdict = if f.violated == 0 {
                    "ok".to_string()
                } else {
                    format!("{} violated", f.violated)
                };
                let _ = writeln!(
                    out,
                    "  {:<12} {:>7} checked  {verdict}",
                    f.family, f.checked
                );
            }
            if !m.out_of_bounds.is_empty() {
                let _ = writeln!(
                    out,
                    "  bounds: {} variables out of range",
                    m.out_of_bounds.len()
                );
            }
        }
        let n = self.violation_count();
        if n == 0 {
            out.push_str("verdict: all constraints satisfied\n");
        } else {
            let _ = writeln!(out, "verdict: {n} violation(s)");
        }
        out
    }
}

fn route_cost(inst: &MdmsopInstance, route: &[usize]) -> Cost {
    route.windows(2).map(|w| inst.c(w[0], w[1])).sum()
}

/// Route shape problems: count, depot ends, node range, depots inside.
fn shape_problems(inst: &MdmsopInstance, sol: &SolutionFile) -> Vec<String> {
    let mut out = Vec::new();
    let m = inst.travelers();
    if sol.routes.len() != m {
        out.push(format!("{} routes for {m} travelers", sol.routes.len()));
        return out;
    }
    for (k, r) in sol.routes.iter().enumerate() {
        let t = k + 1;
        let depot = inst.depot(t);
        if r.nodes.len() < 2 || r.nodes[0] != depot || r.nodes[r.nodes.len() - 1] != depot {
            out.push(format!("route {t} must start and end at depot {depot}"));
            continue;
        }
        for &v in &r.nodes[1..r.nodes.len() - 1] {
            if v == 0 || v > inst.n() {
                out.push(format!(
                    "route {t} visits {v}, which is not a customer node"
                ));
            }
        }
    }
    out
}

/// Checks `sol` against `inst` under the given SEC variants.
pub fn verify(inst: &MdmsopInstance, sol: &SolutionFile, secs: &[SecVariant]) -> VerifyReport {
    let mut report = VerifyReport::default();
    if sol.instance != inst.name() {
        report.problems.push(format!(
            "solution is for {}, instance is {}",
            sol.instance,
            inst.name()
        ));
    }
    if sol.mode != inst.budget_mode() || sol.budget != inst.budget() {
        report.problems.push(format!(
            "solution claims a {} budget of {}, instance has {} {}",
            sol.mode,
            sol.budget,
            inst.budget_mode(),
            inst.budget()
        ));
    }
    let shape = shape_problems(inst, sol);
    if !shape.is_empty() {
        report.problems.extend(shape);
        return report;
    }

    let set_of = |v: usize| inst.base().set_of(v);
    let mut rows: Vec<Vec<usize>> = sol
        .routes
        .iter()
        .map(|r| {
            r.nodes[1..r.nodes.len() - 1]
                .iter()
                .map(|&v| set_of(v))
                .collect()
        })
        .collect();
    let seen: HashSet<usize> = rows.iter().flatten().copied().collect();
    rows.push((1..=inst.r()).filter(|q| !seen.contains(q)).collect());
    let arr = Arrangement::from_rows(rows);

    let mut unvisited = arr.bucket().to_vec();
    unvisited.sort_unstable();
    if unvisited != sol.unvisited {
        report
            .problems
            .push(format!("unvisited list should be {unvisited:?}"));
    }
    let mut total: Cost = 0;
    for (k, r) in sol.routes.iter().enumerate() {
        let cost = route_cost(inst, &r.nodes);
        total += cost;
        if cost != r.cost {
            report.problems.push(format!(
                "route {} costs {cost}, file claims {}",
                k + 1,
                r.cost
            ));
        }
        let profit: Profit = arr.route_sets(k + 1).iter().map(|&q| inst.profit(q)).sum();
        if profit != r.profit {
            report.problems.push(format!(
                "route {} collects {profit}, file claims {}",
                k + 1,
                r.profit
            ));
        }
    }
    if total != sol.total_cost {
        report.problems.push(format!(
            "total cost is {total}, file claims {}",
            sol.total_cost
        ));
    }
    let profit: Profit = arr.visited().map(|q| inst.profit(q)).sum();
    if profit != sol.profit {
        report
            .problems
            .push(format!("profit is {profit}, file claims {}", sol.profit));
    }

    // The validator sees optimal node choices; the file's own tour lengths
    // are covered by the model budget rows below.
    report.validator = is_valid(&arr, inst)
        .violations
        .iter()
        .map(ToString::to_string)
        .collect();

    let routes = sol.node_routes();
    for &sec in secs {
        let mut checker = ModelChecker::new(inst, sec);
        let verdict = checker.check_routes(&routes);
        let violated: HashSet<&str> = verdict.violated.iter().map(String::as_str).collect();
        let mut families: Vec<FamilyVerdict> = Vec::new();
        for c in &checker.model().constraints {
            let hit = usize::from(violated.contains(c.name.as_str()));
            match families.iter_mut().find(|f| f.family == c.family) {
                Some(f) => {
                    f.checked += 1;
                    f.violated += hit;
                }
                None => families.push(FamilyVerdict {
                    family: c.family,
                    checked: 1,
                    violated: hit,
                }),
            }
        }
        report.models.push(ModelReport {
            sec,
            families,
            out_of_bounds: verdict.out_of_bounds,
            objective: verdict.objective,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdmsop_core::{evaluate, BudgetMode, GtspInstance, Point, ProfitRule};

    fn instance(mode: BudgetMode, budget_scale: f64) -> MdmsopInstance {
        let coords = (0..6)
            .map(|k| Point::new(k as f64 * 3.0, (k % 2) as f64 * 4.0))
            .collect();
        let base = GtspInstance::from_sets(
            "six",
            coords,
            vec![vec![1, 2], vec![3], vec![4, 5], vec![6]],
        )
        .unwrap();
        MdmsopInstance::adapt(base, 2, ProfitRule::G2, mode, budget_scale, 40).unwrap()
    }

    fn solved(inst: &MdmsopInstance) -> SolutionFile {
        let arr = Arrangement::from_rows(vec![vec![4, 1], vec![3], vec![2]]);
        SolutionFile::new(inst, &arr, &evaluate(&arr, inst))
    }

    const BOTH: [SecVariant; 2] = [SecVariant::Mtz, SecVariant::Gavish];

    #[test]
    fn feasible_solution_passes_everything() {
        let inst = instance(BudgetMode::Cumulative, 2.0);
        let report = verify(&inst, &solved(&inst), &BOTH);
        assert_eq!(report.violation_count(), 0, "{}", report.render());
        assert_eq!(report.models.len(), 2);
        assert!(report
            .render()
            .ends_with("verdict: all constraints satisfied\n"));
    }

    #[test]
    fn over_budget_is_named() {
        let tight = instance(BudgetMode::Individual, 0.2);
        let sol = solved(&instance(BudgetMode::Individual, 2.0));
        let report = verify(&tight, &sol, &[SecVariant::Mtz]);
        assert!(report.problems.iter().any(|p| p.contains("budget")));
        assert!(!report.validator.is_empty());
        let fam = &report.models[0].families;
        assert!(
            fam.iter()
                .any(|f| f.family == "tour_budget" && f.violated > 0),
            "{fam:?}"
        );
    }

    #[test]
    fn tampered_numbers_and_shapes() {
        let inst = instance(BudgetMode::Cumulative, 2.0);
        let mut sol = solved(&inst);
        sol.profit += 1;
        sol.routes[0].cost -= 1;
        let report = verify(&inst, &sol, &[]);
        assert_eq!(report.problems.len(), 2, "{:?}", report.problems);

        let mut sol = solved(&inst);
        sol.routes[1].nodes.insert(1, 99);
        sol.routes[0].nodes[0] = 1;
        let report = verify(&inst, &sol, &BOTH);
        assert_eq!(report.problems.len(), 2, "{:?}", report.problems);
        assert!(report.models.is_empty());

        let mut sol = solved(&inst);
        sol.routes.pop();
        assert_eq!(verify(&inst, &sol, &BOTH).problems.len(), 1);
    }

    #[test]
    fn duplicated_set_reaches_validator_and_models() {
        let inst = instance(BudgetMode::Cumulative, 4.0);
        let mut sol = solved(&inst);
        // nodes 1 and 2 share set 1
        sol.routes[1].nodes.insert(1, 2);
        let report = verify(&inst, &sol, &[SecVariant::Gavish]);
        assert!(
            report
                .validator
                .iter()
                .any(|v| v.contains("more than once")),
            "{:?}",
            report.validator
        );
        assert!(report.models[0].families.iter().any(|f| f.violated > 0));
    }
}
