//! Integer linear programming model of the problem.
//!
//! Variables:
//! - `x_t_i_j`: traveler `t` uses arc `(i, j)`, self arcs excluded;
//! - `y_t_i`: traveler `t` visits node `i`;
//! - `z_t_q`: traveler `t` visits set `q`;
//! - MTZ: `u_t_i`, general integer potential in `[1, n]`;
//! - Gavish: `u_i_j`, continuous flow on arc `(i, j)` for `i` a non-depot node.
//!
//! Constraint names carry the family they belong to:
//! `budget` (cumulative) or `tour_budget_t` (individual), `depot_t`,
//! `inflow_t_j`, `outflow_t_j`, `visit_t_q`, `excl_q`, and the subtour
//! elimination families `mtz_t_i_j` or `flow_cap_i_j` and `flow_bal_i`.
//!
//! Potentials and flows are only tied to arcs between non-depot nodes
//! (MTZ) or leaving non-depot nodes (Gavish). Ordering constraints on arcs
//! through the depot would forbid every closed tour.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{BudgetMode, MdmsopInstance};
use crate::solution::{evaluate, Arrangement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SecVariant {
    Mtz,
    Gavish,
}

impl SecVariant {
    pub const fn as_str(self) -> &'static str {
        match self {
            Self::Mtz => "mtz",
            Self::Gavish => "gavish",
        }
    }
}

impl fmt::Display for SecVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for SecVariant {
    type Err = UnknownSec;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mtz") {
            Ok(Self::Mtz)
        } else if s.eq_ignore_ascii_case("gavish") {
            Ok(Self::Gavish)
        } else {
            Err(UnknownSec(String::from(s)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSec(pub String);

impl fmt::Display for UnknownSec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown subtour elimination variant {:?} (expected mtz or gavish)",
            self.0
        )
    }
}

impl core::error::Error for UnknownSec {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    /// `None` means unbounded above.
    pub upper: Option<i64>,
    /// Belongs to the subtour elimination block.
    pub sec: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub const fn as_str(self) -> &'static str {
        match self {
            Self::Le => "<=",
            Self::Eq => "=",
            Self::Ge => ">=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Self::Le => lhs <= rhs,
            Self::Eq => lhs == rhs,
            Self::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// Name prefix shared by the family, e.g. `mtz`.
    pub family: &'static str,
    /// `(variable index, coefficient)`
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Constraint {
    pub fn is_sec(&self) -> bool {
        matches!(self.family, "mtz" | "flow_cap" | "flow_bal")
    }
}

/// Index layout of the variable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    m: usize,
    n: usize,
    /// n + m
    v: usize,
    /// r + m
    q: usize,
    y0: usize,
    z0: usize,
    u0: usize,
}

impl Layout {
    fn x(&self, t: usize, i: usize, j: usize) -> Option<usize> {
        if i == j {
            return None;
        }
        let jj = if j > i { j - 2 } else { j - 1 };
        Some(((t - 1) * self.v + (i - 1)) * (self.v - 1) + jj)
    }

    fn y(&self, t: usize, i: usize) -> usize {
        self.y0 + (t - 1) * self.v + (i - 1)
    }

    fn z(&self, t: usize, q: usize) -> usize {
        self.z0 + (t - 1) * self.q + (q - 1)
    }

    fn u_mtz(&self, t: usize, i: usize) -> usize {
        self.u0 + (t - 1) * self.v + (i - 1)
    }

    /// Flow from non-depot `i` to any other node `j`.
    fn u_flow(&self, i: usize, j: usize) -> usize {
        let jj = if j > i { j - 2 } else { j - 1 };
        self.u0 + (i - 1) * (self.v - 1) + jj
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub name: String,
    pub sec: SecVariant,
    pub mode: BudgetMode,
    pub variables: Vec<Variable>,
    /// Maximized; one term per `z` variable, zero coefficients included.
    pub objective: Vec<(usize, i64)>,
    pub constraints: Vec<Constraint>,
    layout: Layout,
}

impl IlpModel {
    pub fn travelers(&self) -> usize {
        self.layout.m
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn count_family(&self, family: &str) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.family == family)
            .count()
    }

    /// Number of variables whose name starts with `prefix` followed by `_`.
    pub fn count_vars(&self, prefix: char) -> usize {
        self.variables
            .iter()
            .filter(|v| v.name.starts_with(prefix) && v.name.as_bytes().get(1) == Some(&b'_'))
            .count()
    }

    pub fn x_index(&self, t: usize, i: usize, j: usize) -> Option<usize> {
        self.layout.x(t, i, j)
    }

    pub fn y_index(&self, t: usize, i: usize) -> usize {
        self.layout.y(t, i)
    }

    pub fn z_index(&self, t: usize, q: usize) -> usize {
        self.layout.z(t, q)
    }
}

fn var(name: String, kind: VarKind, lower: i64, upper: Option<i64>, sec: bool) -> Variable {
    Variable {
        name,
        kind,
        lower,
        upper,
        sec,
    }
}

/// Builds the model for the instance's budget mode and the chosen SECs.
pub fn build_model(inst: &MdmsopInstance, sec: SecVariant) -> IlpModel {
    let (m, n, r) = (inst.travelers(), inst.n(), inst.r());
    let v = n + m;
    let q_total = r + m;
    let x_count = m * v * (v - 1);
    let layout = Layout {
        m,
        n,
        v,
        q: q_total,
        y0: x_count,
        z0: x_count + m * v,
        u0: x_count + m * v + m * q_total,
    };

    let mut variables = Vec::new();
    for t in 1..=m {
        for i in 1..=v {
            for j in (1..=v).filter(|&j| j != i) {
                variables.push(var(
                    format!("x_{t}_{i}_{j}"),
                    VarKind::Binary,
                    0,
                    Some(1),
                    false,
                ));
            }
        }
    }
    for t in 1..=m {
        for i in 1..=v {
            variables.push(var(
                format!("y_{t}_{i}"),
                VarKind::Binary,
                0,
                Some(1),
                false,
            ));
        }
    }
    for t in 1..=m {
        for q in 1..=q_total {
            variables.push(var(
                format!("z_{t}_{q}"),
                VarKind::Binary,
                0,
                Some(1),
                false,
            ));
        }
    }
    match sec {
        SecVariant::Mtz => {
            for t in 1..=m {
                for i in 1..=v {
                    variables.push(var(
                        format!("u_{t}_{i}"),
                        VarKind::Integer,
                        1,
                        Some(n as i64),
                        true,
                    ));
                }
            }
        }
        SecVariant::Gavish => {
            for i in 1..=n {
                for j in (1..=v).filter(|&j| j != i) {
                    variables.push(var(
                        format!("u_{i}_{j}"),
                        VarKind::Continuous,
                        0,
                        None,
                        true,
                    ));
                }
            }
        }
    }

    let objective = (1..=m)
        .flat_map(|t| (1..=q_total).map(move |q| (t, q)))
        .map(|(t, q)| (layout.z(t, q), inst.profit(q)))
        .collect();

    let mut constraints = Vec::new();
    let mut push = |name: String, family: &'static str, terms: Vec<(usize, i64)>, sense, rhs| {
        constraints.push(Constraint {
            name,
            family,
            terms,
            sense,
            rhs,
        });
    };
    let arc_cost_terms = |t: usize| {
        let mut terms = Vec::with_capacity(v * (v - 1));
        for i in 1..=v {
            for j in (1..=v).filter(|&j| j != i) {
                terms.push((layout.x(t, i, j).expect("i != j"), inst.c(i, j)));
            }
        }
        terms
    };

    match inst.budget_mode() {
        BudgetMode::Cumulative => {
            let terms = (1..=m).flat_map(arc_cost_terms).collect();
            push("budget".into(), "budget", terms, Sense::Le, inst.budget());
        }
        BudgetMode::Individual => {
            for t in 1..=m {
                push(
                    format!("tour_budget_{t}"),
                    "tour_budget",
                    arc_cost_terms(t),
                    Sense::Le,
                    inst.budget(),
                );
            }
        }
    }
    for t in 1..=m {
        push(
            format!("depot_{t}"),
            "depot",
            vec![(layout.y(t, inst.depot(t)), 1)],
            Sense::Eq,
            1,
        );
    }
    for t in 1..=m {
        for j in 1..=v {
            let mut terms: Vec<(usize, i64)> = (1..=v)
                .filter(|&i| i != j)
                .map(|i| (layout.x(t, i, j).expect("i != j"), 1))
                .collect();
            terms.push((layout.y(t, j), -1));
            push(format!("inflow_{t}_{j}"), "inflow", terms, Sense::Eq, 0);
        }
    }
    for t in 1..=m {
        for j in 1..=v {
            let mut terms: Vec<(usize, i64)> = (1..=v)
                .filter(|&i| i != j)
                .map(|i| (layout.x(t, j, i).expect("i != j"), 1))
                .collect();
            terms.push((layout.y(t, j), -1));
            push(format!("outflow_{t}_{j}"), "outflow", terms, Sense::Eq, 0);
        }
    }
    for t in 1..=m {
        for q in 1..=q_total {
            let mut terms: Vec<(usize, i64)> = inst
                .set_nodes(q)
                .iter()
                .map(|&i| (layout.y(t, i), 1))
                .collect();
            terms.push((layout.z(t, q), -1));
            push(format!("visit_{t}_{q}"), "visit", terms, Sense::Eq, 0);
        }
    }
    for q in 1..=q_total {
        let terms = (1..=m).map(|t| (layout.z(t, q), 1)).collect();
        push(format!("excl_{q}"), "excl", terms, Sense::Le, 1);
    }
    let n_i = n as i64;
    match sec {
        SecVariant::Mtz => {
            // u_ti - u_tj + n x_tij <= n - 1
            for t in 1..=m {
                for i in 1..=n {
                    for j in (1..=n).filter(|&j| j != i) {
                        let terms = vec![
                            (layout.u_mtz(t, i), 1),
                            (layout.u_mtz(t, j), -1),
                            (layout.x(t, i, j).expect("i != j"), n_i),
                        ];
                        push(format!("mtz_{t}_{i}_{j}"), "mtz", terms, Sense::Le, n_i - 1);
                    }
                }
            }
        }
        SecVariant::Gavish => {
            let cap = (n - m + 1) as i64;
            for i in 1..=n {
                for j in (1..=v).filter(|&j| j != i) {
                    let mut terms = vec![(layout.u_flow(i, j), 1)];
                    terms.extend((1..=m).map(|t| (layout.x(t, i, j).expect("i != j"), -cap)));
                    push(format!("flow_cap_{i}_{j}"), "flow_cap", terms, Sense::Le, 0);
                }
            }
            for i in 1..=n {
                let mut terms: Vec<(usize, i64)> = (1..=v)
                    .filter(|&j| j != i)
                    .map(|j| (layout.u_flow(i, j), 1))
                    .collect();
                terms.extend(
                    (1..=n)
                        .filter(|&j| j != i)
                        .map(|j| (layout.u_flow(j, i), -1)),
                );
                terms.extend((1..=m).map(|t| (layout.y(t, i), -1)));
                push(format!("flow_bal_{i}"), "flow_bal", terms, Sense::Eq, 0);
            }
        }
    }

    IlpModel {
        name: String::from(inst.name()),
        sec,
        mode: inst.budget_mode(),
        variables,
        objective,
        constraints,
        layout,
    }
}

/// Outcome of evaluating every constraint and bound at a point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelVerdict {
    /// Names of violated constraints, in model order.
    pub violated: Vec<String>,
    /// Names of variables outside their bounds or domain.
    pub out_of_bounds: Vec<String>,
    pub checked: usize,
    pub objective: i64,
}

impl ModelVerdict {
    pub fn is_satisfied(&self) -> bool {
        self.violated.is_empty() && self.out_of_bounds.is_empty()
    }

    /// True when some violated constraint belongs to `family`.
    pub fn violates(&self, family: &str) -> bool {
        self.violated.iter().any(|name| {
            name.strip_prefix(family)
                .is_some_and(|rest| rest.is_empty() || rest.starts_with('_'))
        })
    }
}

/// A model plus a scratch point, reused across checks.
#[derive(Debug, Clone)]
pub struct ModelChecker {
    model: IlpModel,
    set_of: Vec<usize>,
    values: Vec<i64>,
}

impl ModelChecker {
    pub fn new(inst: &MdmsopInstance, sec: SecVariant) -> Self {
        let model = build_model(inst, sec);
        let mut set_of = vec![0; inst.n_nodes_total()];
        for q in 1..=inst.n_sets_total() {
            for &i in inst.set_nodes(q) {
                set_of[i - 1] = q;
            }
        }
        Self {
            values: vec![0; model.variables.len()],
            set_of,
            model,
        }
    }

    pub fn model(&self) -> &IlpModel {
        &self.model
    }

    /// Encodes closed node routes (one per traveler, depot first and last)
    /// into x/y/z/u and evaluates the model.
    pub fn check_routes(&mut self, routes: &[Vec<usize>]) -> ModelVerdict {
        self.encode(routes);
        self.evaluate_point()
    }

    /// The point the last call encoded, indexed like `model().variables`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    fn encode(&mut self, routes: &[Vec<usize>]) {
        let l = self.model.layout;
        self.values.iter_mut().for_each(|x| *x = 0);
        if self.model.sec == SecVariant::Mtz {
            for t in 1..=l.m {
                for i in 1..=l.v {
                    self.values[l.u_mtz(t, i)] = 1;
                }
            }
        }
        for (k, route) in routes.iter().enumerate().take(l.m) {
            let t = k + 1;
            for &i in route {
                self.values[l.y(t, i)] = 1;
                self.values[l.z(t, self.set_of[i - 1])] = 1;
            }
            for w in route.windows(2) {
                if let Some(idx) = l.x(t, w[0], w[1]) {
                    self.values[idx] += 1;
                }
            }
            let inner = route.get(1..route.len().saturating_sub(1)).unwrap_or(&[]);
            match self.model.sec {
                SecVariant::Mtz => {
                    for (pos, &i) in inner.iter().enumerate().rev() {
                        if i <= l.n {
                            self.values[l.u_mtz(t, i)] = pos as i64 + 1;
                        }
                    }
                }
                SecVariant::Gavish => {
                    // flow leaving the p-th visited node is p
                    for (pos, w) in route.windows(2).enumerate().skip(1) {
                        if w[0] <= l.n && w[0] != w[1] {
                            self.values[l.u_flow(w[0], w[1])] += pos as i64;
                        }
                    }
                }
            }
        }
    }

    fn evaluate_point(&self) -> ModelVerdict {
        let x = &self.values;
        let mut verdict = ModelVerdict {
            checked: self.model.constraints.len(),
            ..ModelVerdict::default()
        };
        for c in &self.model.constraints {
            let lhs: i64 = c.terms.iter().map(|&(i, a)| a * x[i]).sum();
            if !c.sense.holds(lhs, c.rhs) {
                verdict.violated.push(c.name.clone());
            }
        }
        for (v, &val) in self.model.variables.iter().zip(x) {
            if val < v.lower || v.upper.is_some_and(|u| val > u) {
                verdict.out_of_bounds.push(v.name.clone());
            }
        }
        verdict.objective = self.model.objective.iter().map(|&(i, a)| a * x[i]).sum();
        verdict
    }
}

/// Checks closed routes against a freshly built model.
pub fn check_routes(inst: &MdmsopInstance, sec: SecVariant, routes: &[Vec<usize>]) -> ModelVerdict {
    ModelChecker::new(inst, sec).check_routes(routes)
}

/// Checks the routes an arrangement evaluates to.
pub fn check_against_model(
    arr: &Arrangement,
    inst: &MdmsopInstance,
    sec: SecVariant,
) -> ModelVerdict {
    check_routes(inst, sec, &evaluate(arr, inst).routes)
}

/// Closed-form counts used by tests and documentation.
pub mod counts {
    /// Arc variables, self arcs excluded.
    pub fn x(n: usize, m: usize) -> usize {
        m * (n + m) * (n + m - 1)
    }

    pub fn y(n: usize, m: usize) -> usize {
        m * (n + m)
    }

    pub fn z(r: usize, m: usize) -> usize {
        m * (r + m)
    }

    pub fn u_mtz(n: usize, m: usize) -> usize {
        m * (n + m)
    }

    pub fn u_gavish(n: usize, m: usize) -> usize {
        n * (n + m - 1)
    }

    pub fn mtz(n: usize, m: usize) -> usize {
        m * n * (n - 1)
    }

    pub fn gavish_capacity(n: usize, m: usize) -> usize {
        n * (n + m - 1)
    }

    pub fn gavish_balance(n: usize) -> usize {
        n
    }

    /// All constraints outside the SEC block.
    pub fn common(n: usize, m: usize, r: usize, individual: bool) -> usize {
        let budget = if individual { m } else { 1 };
        budget + m + 2 * m * (n + m) + m * (r + m) + (r + m)
    }
}
