//! The adapted-instance file format.
//!
//! A GTSP-lib superset: the coordinate and set sections list all `n + m`
//! nodes and `r + m` sets (depots last), and the header carries the
//! adaptation parameters. `PROFIT_SECTION` has `set_id profit` rows and
//! `DEPOT_SECTION` has `traveler_id node_id` rows.
//!
//! Parsing strips the depots, re-adapts the base instance from the header
//! parameters and checks that every stored number agrees with the result,
//! so a file can never describe an instance the library would not build.

use std::fmt::Write;

use mdmsop_core::{BudgetMode, GtspInstance, InstanceError, MdmsopInstance, ProfitRule};
use thiserror::Error;

use crate::gtsp::{base_from_raw, parse_num, split_file, write_base_sections, GtspError, Header};

pub const FORMAT_VERSION: u32 = 1;
const KIND: &str = "MDMSOP";
const SECTIONS: &[&str] = &[
    "NODE_COORD_SECTION",
    "GTSP_SET_SECTION",
    "PROFIT_SECTION",
    "DEPOT_SECTION",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceFileError {
    #[error(transparent)]
    Syntax(#[from] GtspError),
    #[error("line {line}: TYPE must be {KIND}, found {found:?}")]
    Type { line: usize, found: String },
    #[error("line {line}: format version {found} is not supported (expected {FORMAT_VERSION})")]
    Version { line: usize, found: String },
    #[error("line {line}: unknown {what} {found:?}")]
    Token {
        line: usize,
        what: &'static str,
        found: String,
    },
    #[error("line {line}: profit of set {set} is negative ({profit})")]
    NegativeProfit {
        line: usize,
        set: usize,
        profit: i64,
    },
    #[error("line {line}: {msg}")]
    Mismatch { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
}

fn field<'h>(header: &'h Header, key: &'static str) -> Result<(usize, &'h str), InstanceFileError> {
    let (line, value) = header.require(key)?;
    Ok((*line, value.as_str()))
}

fn token<T: std::str::FromStr>(
    header: &Header,
    key: &'static str,
    what: &'static str,
) -> Result<T, InstanceFileError> {
    let (line, value) = field(header, key)?;
    value.parse().map_err(|_| InstanceFileError::Token {
        line,
        what,
        found: value.to_string(),
    })
}

fn mismatch(line: usize, msg: String) -> InstanceFileError {
    InstanceFileError::Mismatch { line, msg }
}

/// Serializes an adapted instance.
pub fn write_instance(inst: &MdmsopInstance) -> String {
    let adapted =
        GtspInstance::from_sets(inst.name(), inst.coords().collect(), inst.sets().to_vec())
            .expect("adapted sets partition the nodes");
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {}", inst.name());
    let _ = writeln!(out, "TYPE : {KIND}");
    let _ = writeln!(out, "VERSION : {FORMAT_VERSION}");
    let _ = writeln!(
        out,
        "COMMENT : depot t is node n+t at the coordinates of node n-t+1, alone in set r+t"
    );
    crate::gtsp::write_base_header(&mut out, &adapted);
    let _ = writeln!(out, "TRAVELERS : {}", inst.travelers());
    let _ = writeln!(
        out,
        "PROFIT_RULE : {}",
        inst.profit_rule().as_str().to_uppercase()
    );
    let _ = writeln!(
        out,
        "BUDGET_MODE : {}",
        inst.budget_mode().as_str().to_uppercase()
    );
    let _ = writeln!(out, "W : {:?}", inst.w());
    let _ = writeln!(out, "TMAX : {}", inst.t_max());
    let _ = writeln!(out, "BUDGET : {}", inst.budget());
    write_base_sections(&mut out, &adapted);
    out.push_str("PROFIT_SECTION\n");
    for (q, p) in inst.profits().iter().enumerate() {
        let _ = writeln!(out, "{} {p}", q + 1);
    }
    out.push_str("DEPOT_SECTION\n");
    for t in 1..=inst.travelers() {
        let _ = writeln!(out, "{t} {}", inst.depot(t));
    }
    out.push_str("EOF\n");
    out
}

/// Parses and verifies an adapted instance.
pub fn parse_instance(text: &str) -> Result<MdmsopInstance, InstanceFileError> {
    let raw = split_file(text, SECTIONS)?;
    let h = &raw.header;
    let (line, kind) = field(h, "TYPE")?;
    if !kind.eq_ignore_ascii_case(KIND) {
        return Err(InstanceFileError::Type {
            line,
            found: kind.into(),
        });
    }
    let (line, version) = field(h, "VERSION")?;
    if version.parse::<u32>() != Ok(FORMAT_VERSION) {
        return Err(InstanceFileError::Version {
            line,
            found: version.into(),
        });
    }
    let m: usize = token(h, "TRAVELERS", "traveler count")?;
    let rule: ProfitRule = token(h, "PROFIT_RULE", "profit rule")?;
    let mode: BudgetMode = token(h, "BUDGET_MODE", "budget mode")?;
    let w: f64 = token(h, "W", "budget multiplier")?;
    let t_max: i64 = token(h, "TMAX", "reference tour length")?;
    let budget: i64 = token(h, "BUDGET", "budget")?;

    let adapted = base_from_raw(&raw)?;
    let (n_all, r_all) = (adapted.n_nodes(), adapted.n_sets());
    let set_line = raw.sections["GTSP_SET_SECTION"].0;
    if m == 0 || m >= n_all || m >= r_all {
        return Err(mismatch(
            field(h, "TRAVELERS")?.0,
            format!("{m} travelers do not fit {n_all} nodes in {r_all} sets"),
        ));
    }
    let (n, r) = (n_all - m, r_all - m);
    let coords = adapted.coords()[..n].to_vec();
    let mut sets = adapted.sets()[..r].to_vec();
    for (q, members) in sets.iter_mut().enumerate() {
        if members.iter().any(|&v| v > n) {
            return Err(mismatch(
                set_line,
                format!("set {} contains a depot node", q + 1),
            ));
        }
        members.sort_unstable();
    }
    let base = GtspInstance::from_sets(adapted.name(), coords, sets).map_err(|source| {
        GtspError::Partition {
            line: set_line,
            source,
        }
    })?;
    let inst = MdmsopInstance::adapt(base, m, rule, mode, w, t_max)?;

    // everything stored must agree with the rebuilt instance
    for (k, (stored, rebuilt)) in adapted.coords().iter().zip(inst.coords()).enumerate() {
        if *stored != rebuilt {
            let line = raw.sections["NODE_COORD_SECTION"].0;
            return Err(mismatch(
                line,
                format!("node {} should sit at {rebuilt:?}", k + 1),
            ));
        }
    }
    if adapted.sets() != inst.sets() {
        return Err(mismatch(
            set_line,
            "depot sets must be singletons r+t = {n+t}".into(),
        ));
    }
    if inst.budget() != budget {
        let line = field(h, "BUDGET")?.0;
        return Err(mismatch(
            line,
            format!("BUDGET {budget} but the parameters give {}", inst.budget()),
        ));
    }
    check_profits(&raw.sections, &inst)?;
    check_depots(&raw.sections, &inst)?;
    Ok(inst)
}

type Sections<'a> = std::collections::BTreeMap<&'static str, (usize, crate::gtsp::Tokens<'a>)>;

fn rows<'a>(
    sections: &'a Sections<'_>,
    name: &'static str,
) -> Result<Vec<(usize, &'a str, &'a str)>, InstanceFileError> {
    let (start, tokens) = sections.get(name).ok_or(GtspError::Missing(name))?;
    if tokens.len() % 2 != 0 {
        let line = tokens.last().map_or(*start, |t| t.0);
        return Err(GtspError::Syntax {
            line,
            msg: format!("{name} rows must have two fields"),
        }
        .into());
    }
    Ok(tokens.chunks(2).map(|c| (c[0].0, c[0].1, c[1].1)).collect())
}

fn check_profits(sections: &Sections<'_>, inst: &MdmsopInstance) -> Result<(), InstanceFileError> {
    let rows = rows(sections, "PROFIT_SECTION")?;
    let start = sections["PROFIT_SECTION"].0;
    if rows.len() != inst.n_sets_total() {
        return Err(mismatch(
            start,
            format!(
                "expected {} profit rows, found {}",
                inst.n_sets_total(),
                rows.len()
            ),
        ));
    }
    for (k, &(line, id, value)) in rows.iter().enumerate() {
        let set: usize = parse_num(id, line, "set id")?;
        let profit: i64 = parse_num(value, line, "profit")?;
        if profit < 0 {
            return Err(InstanceFileError::NegativeProfit { line, set, profit });
        }
        if set != k + 1 {
            return Err(mismatch(
                line,
                format!("profit rows must be in set order; expected set {}", k + 1),
            ));
        }
        if profit != inst.profit(set) {
            return Err(mismatch(
                line,
                format!(
                    "set {set} has profit {profit} but {} gives {}",
                    inst.profit_rule(),
                    inst.profit(set)
                ),
            ));
        }
    }
    Ok(())
}

fn check_depots(sections: &Sections<'_>, inst: &MdmsopInstance) -> Result<(), InstanceFileError> {
    let rows = rows(sections, "DEPOT_SECTION")?;
    let start = sections["DEPOT_SECTION"].0;
    if rows.len() != inst.travelers() {
        return Err(mismatch(
            start,
            format!(
                "expected {} depot rows, found {}",
                inst.travelers(),
                rows.len()
            ),
        ));
    }
    for (k, &(line, id, value)) in rows.iter().enumerate() {
        let t: usize = parse_num(id, line, "traveler id")?;
        let node: usize = parse_num(value, line, "node id")?;
        if t != k + 1 || node != inst.depot(k + 1) {
            return Err(mismatch(
                line,
                format!(
                    "traveler {} must start at node {}",
                    k + 1,
                    inst.depot(k + 1)
                ),
            ));
        }
    }
    Ok(())
}
