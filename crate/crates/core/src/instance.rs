//! GTSP base instances and their adaptation into mDmSOP instances.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Cost, Profit};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// How the profit of a set is derived from its nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfitRule {
    /// Profit is the number of nodes in the set.
    G1,
    /// Profit is the sum of `(1 + 7141 j) mod 100` over the set's node ids `j`.
    G2,
}

/// Whether the budget bounds the sum of all tours or every tour separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BudgetMode {
    Cumulative,
    Individual,
}

impl ProfitRule {
    pub const fn as_str(self) -> &'static str {
        match self {
            ProfitRule::G1 => "g1",
            ProfitRule::G2 => "g2",
        }
    }
}

impl BudgetMode {
    pub const fn as_str(self) -> &'static str {
        match self {
            BudgetMode::Cumulative => "cumulative",
            BudgetMode::Individual => "individual",
        }
    }
}

impl fmt::Display for ProfitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for BudgetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unrecognized enum token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownToken(pub String);

impl fmt::Display for UnknownToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown token `{}`", self.0)
    }
}

impl core::error::Error for UnknownToken {}

impl FromStr for ProfitRule {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("g1") {
            Ok(ProfitRule::G1)
        } else if s.eq_ignore_ascii_case("g2") {
            Ok(ProfitRule::G2)
        } else {
            Err(UnknownToken(s.into()))
        }
    }
}

impl FromStr for BudgetMode {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("cumulative") {
            Ok(BudgetMode::Cumulative)
        } else if s.eq_ignore_ascii_case("individual") {
            Ok(BudgetMode::Individual)
        } else {
            Err(UnknownToken(s.into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    NoNodes,
    /// Set id outside `1..=n_sets`.
    SetOutOfRange {
        node: usize,
        set: usize,
    },
    EmptySet {
        set: usize,
    },
    NodeOutOfRange {
        node: usize,
    },
    NodeUnassigned {
        node: usize,
    },
    NodeInSeveralSets {
        node: usize,
    },
    NoTravelers,
    TooManyTravelers {
        travelers: usize,
        sets: usize,
    },
    NonPositiveTMax(Cost),
    InvalidMultiplier(f64),
    EmptyNodeList,
    CoordinateCount {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoNodes => write!(f, "instance has no nodes"),
            InstanceError::SetOutOfRange { node, set } => {
                write!(
                    f,
                    "node {node} assigned to set {set}, which is out of range"
                )
            }
            InstanceError::EmptySet { set } => write!(f, "set {set} is empty"),
            InstanceError::NodeOutOfRange { node } => write!(f, "node id {node} is out of range"),
            InstanceError::NodeUnassigned { node } => write!(f, "node {node} belongs to no set"),
            InstanceError::NodeInSeveralSets { node } => {
                write!(f, "node {node} belongs to more than one set")
            }
            InstanceError::NoTravelers => write!(f, "at least one traveler is required"),
            InstanceError::TooManyTravelers { travelers, sets } => write!(
                f,
                "{travelers} travelers requested but the instance only has {sets} profit sets"
            ),
            InstanceError::NonPositiveTMax(t) => {
                write!(f, "reference tour length {t} must be positive")
            }
            InstanceError::InvalidMultiplier(w) => {
                write!(f, "budget multiplier {w} must be finite and positive")
            }
            InstanceError::EmptyNodeList => write!(f, "a set needs at least one node"),
            InstanceError::CoordinateCount { expected, found } => {
                write!(f, "expected {expected} coordinates, found {found}")
            }
        }
    }
}

impl core::error::Error for InstanceError {}

/// A parsed generalized-TSP instance: coordinates plus a partition of the
/// nodes into sets.
#[derive(Debug, Clone, PartialEq)]
pub struct GtspInstance {
    name: String,
    coords: Vec<Point>,
    set_of: Vec<usize>,
    sets: Vec<Vec<usize>>,
}

impl GtspInstance {
    /// Builds an instance from per-node set ids (`set_of[k]` is the set of
    /// node `k + 1`). Set ids must cover `1..=n_sets` densely.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<Point>,
        set_of: Vec<usize>,
        n_sets: usize,
    ) -> Result<Self, InstanceError> {
        if coords.is_empty() {
            return Err(InstanceError::NoNodes);
        }
        if set_of.len() != coords.len() {
            return Err(InstanceError::CoordinateCount {
                expected: set_of.len(),
                found: coords.len(),
            });
        }
        let mut sets = vec![Vec::new(); n_sets];
        for (k, &s) in set_of.iter().enumerate() {
            if s == 0 || s > n_sets {
                return Err(InstanceError::SetOutOfRange {
                    node: k + 1,
                    set: s,
                });
            }
            sets[s - 1].push(k + 1);
        }
        if let Some(q) = sets.iter().position(Vec::is_empty) {
            return Err(InstanceError::EmptySet { set: q + 1 });
        }
        Ok(Self {
            name: name.into(),
            coords,
            set_of,
            sets,
        })
    }

    /// Builds an instance from explicit set member lists (`sets[q]` lists the
    /// node ids of set `q + 1`). The lists must partition `1..=coords.len()`.
    pub fn from_sets(
        name: impl Into<String>,
        coords: Vec<Point>,
        sets: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        let n = coords.len();
        if n == 0 {
            return Err(InstanceError::NoNodes);
        }
        let mut set_of = vec![0usize; n];
        for (q, members) in sets.iter().enumerate() {
            if members.is_empty() {
                return Err(InstanceError::EmptySet { set: q + 1 });
            }
            for &v in members {
                if v == 0 || v > n {
                    return Err(InstanceError::NodeOutOfRange { node: v });
                }
                if set_of[v - 1] != 0 {
                    return Err(InstanceError::NodeInSeveralSets { node: v });
                }
                set_of[v - 1] = q + 1;
            }
        }
        if let Some(k) = set_of.iter().position(|&s| s == 0) {
            return Err(InstanceError::NodeUnassigned { node: k + 1 });
        }
        let n_sets = sets.len();
        Self::new(name, coords, set_of, n_sets)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    /// Set id of a 1-based node id.
    pub fn set_of(&self, node: usize) -> usize {
        self.set_of[node - 1]
    }

    /// Member lists, ascending node ids; `sets()[q - 1]` is set `q`.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

/// Dense symmetric integer cost matrix indexed by 1-based node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    dim: usize,
    data: Vec<Cost>,
}

impl CostMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> Cost {
        self.data[(from - 1) * self.dim + (to - 1)]
    }

    pub fn row(&self, from: usize) -> &[Cost] {
        &self.data[(from - 1) * self.dim..from * self.dim]
    }
}

/// TSPLIB `EUC_2D` distances: Euclidean length rounded to the nearest integer.
pub fn euclidean_cost(coords: &[Point]) -> CostMatrix {
    let dim = coords.len();
    let mut data = vec![0; dim * dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let dx = coords[i].x - coords[j].x;
            let dy = coords[i].y - coords[j].y;
            let d = libm::floor(libm::sqrt(dx * dx + dy * dy) + 0.5) as Cost;
            data[i * dim + j] = d;
            data[j * dim + i] = d;
        }
    }
    CostMatrix { dim, data }
}

/// Profit of a set under `rule`, given the original 1-based node ids.
pub fn profit_of_set(nodes: &[usize], rule: ProfitRule) -> Result<Profit, InstanceError> {
    if nodes.is_empty() {
        return Err(InstanceError::EmptyNodeList);
    }
    Ok(match rule {
        ProfitRule::G1 => nodes.len() as Profit,
        ProfitRule::G2 => nodes
            .iter()
            .map(|&j| ((1 + 7141 * j as u64) % 100) as Profit)
            .sum(),
    })
}

/// Budget derived from the reference tour length: `ceil(w * m * t_max)` in
/// cumulative mode, `ceil(w * t_max)` in individual mode.
pub fn budget_for(mode: BudgetMode, travelers: usize, w: f64, t_max: Cost) -> Cost {
    let scale = match mode {
        BudgetMode::Cumulative => travelers as f64,
        BudgetMode::Individual => 1.0,
    };
    let raw = w * scale * t_max as f64;
    // snap products such as 0.1 * 30 that land a hair above an integer
    let nearest = libm::round(raw);
    if libm::fabs(raw - nearest) <= 1e-9 * libm::fmax(1.0, libm::fabs(raw)) {
        nearest as Cost
    } else {
        libm::ceil(raw) as Cost
    }
}

/// An adapted instance: the GTSP base plus `m` depots, profits and a budget.
#[derive(Debug, Clone, PartialEq)]
pub struct MdmsopInstance {
    base: GtspInstance,
    travelers: usize,
    cost: CostMatrix,
    sets: Vec<Vec<usize>>,
    profits: Vec<Profit>,
    profit_rule: ProfitRule,
    budget_mode: BudgetMode,
    w: f64,
    t_max: Cost,
    budget: Cost,
}

impl MdmsopInstance {
    /// Appends `travelers` depots to `base` and derives profits and budget.
    ///
    /// Depot `t` gets node id `n + t` and duplicates the coordinates of the
    /// original node `n - t + 1`; it forms the singleton set `r + t` with
    /// zero profit. Original nodes and sets are left untouched.
    pub fn adapt(
        base: GtspInstance,
        travelers: usize,
        rule: ProfitRule,
        mode: BudgetMode,
        w: f64,
        t_max: Cost,
    ) -> Result<Self, InstanceError> {
        if travelers == 0 {
            return Err(InstanceError::NoTravelers);
        }
        if travelers > base.n_sets() || travelers > base.n_nodes() {
            return Err(InstanceError::TooManyTravelers {
                travelers,
                sets: base.n_sets(),
            });
        }
        if t_max <= 0 {
            return Err(InstanceError::NonPositiveTMax(t_max));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(InstanceError::InvalidMultiplier(w));
        }
        let n = base.n_nodes();
        let mut coords = base.coords().to_vec();
        for t in 1..=travelers {
            coords.push(base.coords()[n - t]);
        }
        let cost = euclidean_cost(&coords);
        let mut sets = base.sets().to_vec();
        let mut profits = Vec::with_capacity(sets.len() + travelers);
        for members in &sets {
            profits.push(profit_of_set(members, rule)?);
        }
        for t in 1..=travelers {
            sets.push(vec![n + t]);
            profits.push(0);
        }
        let budget = budget_for(mode, travelers, w, t_max);
        Ok(Self {
            base,
            travelers,
            cost,
            sets,
            profits,
            profit_rule: rule,
            budget_mode: mode,
            w,
            t_max,
            budget,
        })
    }

    pub fn base(&self) -> &GtspInstance {
        &self.base
    }

    pub fn name(&self) -> &str {
        self.base.name()
    }

    /// Number of travelers `m`.
    pub fn travelers(&self) -> usize {
        self.travelers
    }

    /// Number of non-depot nodes `n`.
    pub fn n(&self) -> usize {
        self.base.n_nodes()
    }

    /// Number of profit sets `r`.
    pub fn r(&self) -> usize {
        self.base.n_sets()
    }

    pub fn n_nodes_total(&self) -> usize {
        self.n() + self.travelers
    }

    pub fn n_sets_total(&self) -> usize {
        self.r() + self.travelers
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    #[inline]
    pub fn c(&self, from: usize, to: usize) -> Cost {
        self.cost.get(from, to)
    }

    /// Node ids of set `q` (1-based, depot sets included).
    #[inline]
    pub fn set_nodes(&self, q: usize) -> &[usize] {
        &self.sets[q - 1]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Profit of set `q` (1-based, zero for depot sets).
    #[inline]
    pub fn profit(&self, q: usize) -> Profit {
        self.profits[q - 1]
    }

    pub fn profits(&self) -> &[Profit] {
        &self.profits
    }

    /// Depot node id of traveler `t` (1-based).
    #[inline]
    pub fn depot(&self, t: usize) -> usize {
        self.n() + t
    }

    /// Coordinates of all `n + m` nodes, depots last.
    pub fn coords(&self) -> impl Iterator<Item = Point> + '_ {
        let n = self.n();
        self.base
            .coords()
            .iter()
            .copied()
            .chain((1..=self.travelers).map(move |t| self.base.coords()[n - t]))
    }

    pub fn profit_rule(&self) -> ProfitRule {
        self.profit_rule
    }

    pub fn budget_mode(&self) -> BudgetMode {
        self.budget_mode
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn t_max(&self) -> Cost {
        self.t_max
    }

    pub fn budget(&self) -> Cost {
        self.budget
    }

    pub fn total_profit(&self) -> Profit {
        self.profits.iter().sum()
    }

    /// Same instance under the other budget mode (budget recomputed).
    pub fn with_budget_mode(&self, mode: BudgetMode) -> Self {
        let mut out = self.clone();
        out.budget_mode = mode;
        out.budget = budget_for(mode, self.travelers, self.w, self.t_max);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_instance(n: usize, sets: Vec<Vec<usize>>) -> GtspInstance {
        let coords = (0..n).map(|i| Point::new(i as f64 * 10.0, 0.0)).collect();
        GtspInstance::from_sets("line", coords, sets).unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let m = euclidean_cost(&[Point::new(0.0, 0.0), Point::new(3.0, 4.0)]);
        assert_eq!(m.get(1, 2), 5);
        assert_eq!(m.get(2, 1), 5);
        assert_eq!(m.get(1, 1), 0);
        let m = euclidean_cost(&[Point::new(0.0, 0.0), Point::new(0.0, 0.0)]);
        assert_eq!(m.get(1, 2), 0);
        let m = euclidean_cost(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]);
        assert_eq!(m.get(1, 2), 1);
        // nint rounds half up
        let m = euclidean_cost(&[Point::new(0.0, 0.0), Point::new(2.5, 0.0)]);
        assert_eq!(m.get(1, 2), 3);
    }

    #[test]
    fn profit_rules() {
        assert_eq!(profit_of_set(&[1, 2, 3, 4, 5], ProfitRule::G1), Ok(5));
        assert_eq!(profit_of_set(&[1], ProfitRule::G2), Ok(42));
        assert_eq!(profit_of_set(&[1, 2], ProfitRule::G2), Ok(125));
        assert_eq!(
            profit_of_set(&[], ProfitRule::G1),
            Err(InstanceError::EmptyNodeList)
        );
    }

    #[test]
    fn budget_formula() {
        assert_eq!(budget_for(BudgetMode::Cumulative, 2, 0.25, 100), 50);
        assert_eq!(budget_for(BudgetMode::Individual, 3, 0.25, 101), 26);
        assert_eq!(budget_for(BudgetMode::Cumulative, 3, 0.1, 10), 3);
        assert_eq!(budget_for(BudgetMode::Cumulative, 2, 0.25, 4041), 2021);
    }

    #[test]
    fn partition_is_enforced() {
        let coords = vec![Point::new(0.0, 0.0); 8];
        let err =
            GtspInstance::from_sets("x", coords.clone(), vec![vec![1, 2, 3], vec![4, 5, 6, 8]]);
        assert_eq!(err, Err(InstanceError::NodeUnassigned { node: 7 }));
        let err = GtspInstance::from_sets(
            "x",
            coords.clone(),
            vec![vec![1, 2, 3, 7], vec![4, 5, 6, 7, 8]],
        );
        assert_eq!(err, Err(InstanceError::NodeInSeveralSets { node: 7 }));
        let err = GtspInstance::from_sets("x", coords, vec![vec![1, 2, 3, 4, 5, 6, 7, 8], vec![]]);
        assert_eq!(err, Err(InstanceError::EmptySet { set: 2 }));
    }

    #[test]
    fn adapt_appends_depots() {
        let base = line_instance(5, vec![vec![1, 2], vec![3], vec![4, 5]]);
        let inst =
            MdmsopInstance::adapt(base, 2, ProfitRule::G1, BudgetMode::Cumulative, 0.25, 100)
                .unwrap();
        assert_eq!(inst.n_nodes_total(), 7);
        assert_eq!(inst.n_sets_total(), 5);
        assert_eq!(inst.set_nodes(4), &[6]);
        assert_eq!(inst.set_nodes(5), &[7]);
        assert_eq!(inst.profit(4), 0);
        assert_eq!(inst.profit(5), 0);
        assert_eq!(inst.budget(), 50);
        // depot 1 sits on node 5, depot 2 on node 4
        assert_eq!(inst.c(6, 5), 0);
        assert_eq!(inst.c(7, 4), 0);
        assert_eq!(inst.c(6, 7), 10);
        assert_eq!(inst.profits(), &[2, 1, 2, 0, 0]);
    }

    #[test]
    fn adapt_rejects_bad_arguments() {
        let base = line_instance(3, vec![vec![1], vec![2, 3]]);
        let too_many = MdmsopInstance::adapt(
            base.clone(),
            3,
            ProfitRule::G1,
            BudgetMode::Cumulative,
            0.25,
            10,
        );
        assert_eq!(
            too_many,
            Err(InstanceError::TooManyTravelers {
                travelers: 3,
                sets: 2
            })
        );
        let zero = MdmsopInstance::adapt(
            base.clone(),
            0,
            ProfitRule::G1,
            BudgetMode::Cumulative,
            0.25,
            10,
        );
        assert_eq!(zero, Err(InstanceError::NoTravelers));
        let t = MdmsopInstance::adapt(
            base.clone(),
            1,
            ProfitRule::G1,
            BudgetMode::Cumulative,
            0.25,
            0,
        );
        assert_eq!(t, Err(InstanceError::NonPositiveTMax(0)));
        let w = MdmsopInstance::adapt(
            base,
            1,
            ProfitRule::G1,
            BudgetMode::Cumulative,
            f64::NAN,
            10,
        );
        assert!(matches!(w, Err(InstanceError::InvalidMultiplier(_))));
    }

    #[test]
    fn individual_mode_ignores_traveler_count() {
        let base = line_instance(4, vec![vec![1], vec![2], vec![3], vec![4]]);
        let inst =
            MdmsopInstance::adapt(base, 3, ProfitRule::G2, BudgetMode::Individual, 0.25, 101)
                .unwrap();
        assert_eq!(inst.budget(), 26);
        let cum = inst.with_budget_mode(BudgetMode::Cumulative);
        assert_eq!(cum.budget(), 76);
    }

    #[test]
    fn enum_tokens() {
        assert_eq!("G2".parse::<ProfitRule>(), Ok(ProfitRule::G2));
        assert_eq!(
            "individual".parse::<BudgetMode>(),
            Ok(BudgetMode::Individual)
        );
        assert!("shared".parse::<BudgetMode>().is_err());
    }
}
