//! Solution files.
//!
//! ```text
//! instance: 11berlin52
//! mode: cumulative
//! budget: 2020
//! profit: 38
//! total_cost: 1994
//! 1: 53 ... 53 cost=C profit=P
//! 2: 54 ... 54 cost=C profit=P
//! unvisited: 7 9
//! ```
//!
//! Route lines list node ids, depot first and last. `unvisited` lists set
//! ids. Writing is deterministic so files can be compared byte for byte.

use std::fmt::Write;

use mdmsop_core::{Arrangement, BudgetMode, Cost, Evaluation, MdmsopInstance, Profit};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionFileError {
    #[error("line {line}: expected `{expected}`")]
    Expected { line: usize, expected: &'static str },
    #[error("line {line}: bad number {text:?}")]
    Number { line: usize, text: String },
    #[error("line {line}: unknown budget mode {text:?}")]
    Mode { line: usize, text: String },
    #[error("line {line}: traveler lines must be numbered 1, 2, ... in order")]
    TravelerOrder { line: usize },
    #[error("file ends before the `unvisited:` line")]
    Truncated,
    #[error("line {line}: unexpected content after `unvisited:`")]
    Trailing { line: usize },
}

/// One traveler line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteLine {
    pub nodes: Vec<usize>,
    pub cost: Cost,
    pub profit: Profit,
}

/// The parsed content of a solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub instance: String,
    pub mode: BudgetMode,
    pub budget: Cost,
    pub profit: Profit,
    pub total_cost: Cost,
    pub routes: Vec<RouteLine>,
    pub unvisited: Vec<usize>,
}

impl SolutionFile {
    /// Describes an evaluated arrangement.
    pub fn new(inst: &MdmsopInstance, arr: &Arrangement, ev: &Evaluation) -> Self {
        let routes = ev
            .routes
            .iter()
            .zip(&ev.per_traveler_cost)
            .enumerate()
            .map(|(k, (nodes, &cost))| RouteLine {
                nodes: nodes.clone(),
                cost,
                profit: arr.route_sets(k + 1).iter().map(|&q| inst.profit(q)).sum(),
            })
            .collect();
        let mut unvisited = arr.bucket().to_vec();
        unvisited.sort_unstable();
        Self {
            instance: inst.name().to_string(),
            mode: inst.budget_mode(),
            budget: inst.budget(),
            profit: ev.profit,
            total_cost: ev.total_cost,
            routes,
            unvisited,
        }
    }

    /// Node routes, one per traveler.
    pub fn node_routes(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(|r| r.nodes.clone()).collect()
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "instance: {}", self.instance);
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "budget: {}", self.budget);
        let _ = writeln!(out, "profit: {}", self.profit);
        let _ = writeln!(out, "total_cost: {}", self.total_cost);
        for (k, r) in self.routes.iter().enumerate() {
            let _ = write!(out, "{}:", k + 1);
            for v in &r.nodes {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, " cost={} profit={}", r.cost, r.profit);
        }
        out.push_str("unvisited:");
        for q in &self.unvisited {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, SolutionFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |key| header(&mut lines, key);
        let instance = next("instance")?.1.to_string();
        let (line, mode) = next("mode")?;
        let mode = mode.parse().map_err(|_| SolutionFileError::Mode {
            line,
            text: mode.into(),
        })?;
        let (line, v) = next("budget")?;
        let budget = number(v, line)?;
        let (line, v) = next("profit")?;
        let profit = number(v, line)?;
        let (line, v) = next("total_cost")?;
        let total_cost = number(v, line)?;

        let mut routes = Vec::new();
        let unvisited = loop {
            let (line, text) = lines.next().ok_or(SolutionFileError::Truncated)?;
            if let Some(list) = text.strip_prefix("unvisited:") {
                break list
                    .split_whitespace()
                    .map(|t| number(t, line))
                    .collect::<Result<Vec<usize>, _>>()?;
            }
            routes.push(route_line(text, line, routes.len() + 1)?);
        };
        if let Some((line, _)) = lines.next() {
            return Err(SolutionFileError::Trailing { line });
        }
        Ok(Self {
            instance,
            mode,
            budget,
            profit,
            total_cost,
            routes,
            unvisited,
        })
    }
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &'static str,
) -> Result<(usize, &'a str), SolutionFileError> {
    let (line, text) = lines.next().ok_or(SolutionFileError::Truncated)?;
    let value = text
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(':'))
        .ok_or(SolutionFileError::Expected {
            line,
            expected: key,
        })?;
    Ok((line, value.trim()))
}

fn number<T: std::str::FromStr>(text: &str, line: usize) -> Result<T, SolutionFileError> {
    text.parse().map_err(|_| SolutionFileError::Number {
        line,
        text: text.into(),
    })
}

fn route_line(text: &str, line: usize, traveler: usize) -> Result<RouteLine, SolutionFileError> {
    let expected = "t: depot v_1 ... v_k depot cost=C profit=P";
    let (head, body) = text
        .split_once(':')
        .ok_or(SolutionFileError::Expected { line, expected })?;
    if number::<usize>(head.trim(), line)? != traveler {
        return Err(SolutionFileError::TravelerOrder { line });
    }
    let mut nodes = Vec::new();
    let (mut cost, mut profit) = (None, None);
    for tok in body.split_whitespace() {
        if let Some(v) = tok.strip_prefix("cost=") {
            cost = Some(number(v, line)?);
        } else if let Some(v) = tok.strip_prefix("profit=") {
            profit = Some(number(v, line)?);
        } else if cost.is_none() && profit.is_none() {
            nodes.push(number(tok, line)?);
        } else {
            return Err(SolutionFileError::Expected { line, expected });
        }
    }
    match (cost, profit) {
        (Some(cost), Some(profit)) => Ok(RouteLine {
            nodes,
            cost,
            profit,
        }),
        _ => Err(SolutionFileError::Expected { line, expected }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
instance: five
mode: individual
budget: 13
profit: 125
total_cost: 22
1: 6 2 6 cost=10 profit=42
2: 7 3 7 cost=12 profit=83
unvisited: 3
";

    #[test]
    fn parse_then_write_is_identity() {
        let sol = SolutionFile::parse(SAMPLE).unwrap();
        assert_eq!(sol.routes.len(), 2);
        assert_eq!(sol.routes[1].nodes, vec![7, 3, 7]);
        assert_eq!(sol.unvisited, vec![3]);
        assert_eq!(sol.write(), SAMPLE);
    }

    #[test]
    fn empty_unvisited_list() {
        let text = SAMPLE.replace("unvisited: 3\n", "unvisited:\n");
        let sol = SolutionFile::parse(&text).unwrap();
        assert!(sol.unvisited.is_empty());
        assert_eq!(sol.write(), text);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = SAMPLE.replace("mode: individual", "mode: shared");
        assert_eq!(
            SolutionFile::parse(&bad),
            Err(SolutionFileError::Mode {
                line: 2,
                text: "shared".into()
            })
        );
        let bad = SAMPLE.replace("2: 7", "3: 7");
        assert_eq!(
            SolutionFile::parse(&bad),
            Err(SolutionFileError::TravelerOrder { line: 7 })
        );
        let bad = SAMPLE.replace("cost=12 profit=83", "cost=12");
        assert!(matches!(
            SolutionFile::parse(&bad),
            Err(SolutionFileError::Expected { line: 7, .. })
        ));
        let bad = SAMPLE.replace("unvisited: 3\n", "");
        assert_eq!(SolutionFile::parse(&bad), Err(SolutionFileError::Truncated));
        let bad = format!("{SAMPLE}extra\n");
        assert_eq!(
            SolutionFile::parse(&bad),
            Err(SolutionFileError::Trailing { line: 9 })
        );
    }
}
