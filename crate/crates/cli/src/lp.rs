//! LP and MPS text for an [`IlpModel`].
//!
//! The LP dialect is the common CPLEX-style one: `Maximize`, `Subject To`,
//! `Bounds`, `Binaries`, `Generals`, `End`. Long rows wrap onto indented
//! continuation lines. Everything that depends on the subtour elimination
//! variant sits between `\ sec begin` and `\ sec end` comment lines, so two
//! exports of one instance differ only inside those blocks.
//!
//! [`LpFile`] is the parsed form; writing a parsed file reproduces it byte
//! for byte.

use std::fmt::Write;

use mdmsop_core::{IlpModel, SecVariant, Sense, VarKind};
use thiserror::Error;

const SEC_BEGIN: &str = "\\ sec begin";
const SEC_END: &str = "\\ sec end";
const WRAP: usize = 78;

/// An item plus whether it lies inside a SEC block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marked<T> {
    pub item: T,
    pub sec: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpBound {
    pub var: String,
    pub lower: i64,
    pub upper: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpFile {
    /// Header comment lines without the leading `\ `.
    pub comments: Vec<Marked<String>>,
    pub objective: Vec<(i64, String)>,
    pub constraints: Vec<Marked<LpRow>>,
    pub bounds: Vec<Marked<LpBound>>,
    pub binaries: Vec<Marked<String>>,
    pub generals: Vec<Marked<String>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing End")]
    Unterminated,
}

fn syntax(line: usize, msg: impl Into<String>) -> LpError {
    LpError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn marked<T>(item: T, sec: bool) -> Marked<T> {
    Marked { item, sec }
}

impl LpFile {
    pub fn from_model(model: &IlpModel) -> Self {
        let name = |i: usize| model.variables[i].name.clone();
        let mut comments = vec![
            marked(format!("Problem: {}", model.name), false),
            marked(format!("Budget mode: {}", model.mode), false),
        ];
        comments.push(marked(
            match model.sec {
                SecVariant::Mtz => {
                    "Subtour elimination: mtz; u_t_i are integer visit positions in [1, n]"
                        .to_string()
                }
                SecVariant::Gavish => {
                    "Subtour elimination: gavish; u_i_j are continuous flows, >= 0".to_string()
                }
            },
            true,
        ));
        let constraints = model
            .constraints
            .iter()
            .map(|c| {
                let row = LpRow {
                    name: c.name.clone(),
                    terms: c.terms.iter().map(|&(i, a)| (a, name(i))).collect(),
                    sense: c.sense,
                    rhs: c.rhs,
                };
                marked(row, c.is_sec())
            })
            .collect();
        let mut bounds = Vec::new();
        let (mut binaries, mut generals) = (Vec::new(), Vec::new());
        for v in &model.variables {
            match v.kind {
                VarKind::Binary => binaries.push(marked(v.name.clone(), v.sec)),
                VarKind::Integer => generals.push(marked(v.name.clone(), v.sec)),
                VarKind::Continuous => {}
            }
            if v.kind != VarKind::Binary && (v.lower != 0 || v.upper.is_some()) {
                let b = LpBound {
                    var: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                };
                bounds.push(marked(b, v.sec));
            }
        }
        Self {
            comments,
            objective: model.objective.iter().map(|&(i, a)| (a, name(i))).collect(),
            constraints,
            bounds,
            binaries,
            generals,
        }
    }

    pub fn write(&self) -> String {
        let mut out = Writer::default();
        out.block(&self.comments, |w, c| w.line(&format!("\\ {c}")));
        out.raw("Maximize");
        out.statement(" obj:", &self.objective, None);
        out.raw("Subject To");
        out.block(&self.constraints, |w, c| {
            w.statement(&format!(" {}:", c.name), &c.terms, Some((c.sense, c.rhs)))
        });
        out.raw("Bounds");
        out.block(&self.bounds, |w, b| {
            let line = match b.upper {
                Some(u) => format!(" {} <= {} <= {u}", b.lower, b.var),
                None => format!(" {} >= {}", b.var, b.lower),
            };
            w.line(&line);
        });
        for (title, names) in [("Binaries", &self.binaries), ("Generals", &self.generals)] {
            out.raw(title);
            out.names(names);
        }
        out.raw("End");
        out.text
    }

    pub fn parse(text: &str) -> Result<Self, LpError> {
        let mut file = LpFile::default();
        let mut section = Section::Header;
        let mut sec = false;
        // pending statement tokens with the line and SEC flag of its start
        let mut pending: Vec<&str> = Vec::new();
        let mut pending_at = (0, false);
        let mut ended = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if ended {
                return Err(syntax(line, "content after End"));
            }
            if trimmed == SEC_BEGIN || trimmed == SEC_END {
                let begin = trimmed == SEC_BEGIN;
                if begin == sec {
                    return Err(syntax(line, "unbalanced sec markers"));
                }
                sec = begin;
                continue;
            }
            if let Some(c) = trimmed.strip_prefix('\\') {
                if section != Section::Header {
                    return Err(syntax(line, "comments are only expected in the header"));
                }
                file.comments.push(marked(c.trim_start().to_string(), sec));
                continue;
            }
            if let Some(next) = Section::from_title(trimmed) {
                if section == Section::Objective {
                    match pending.split_first() {
                        Some((&"obj:", rest)) => file.objective = parse_terms(rest, pending_at.0)?,
                        _ => {
                            return Err(syntax(
                                pending_at.0.max(line),
                                "objective must be `obj: ...`",
                            ))
                        }
                    }
                    pending.clear();
                }
                if !pending.is_empty() {
                    return Err(syntax(pending_at.0, "incomplete statement"));
                }
                if next <= section {
                    return Err(syntax(line, format!("section {trimmed} out of order")));
                }
                section = next;
                if next == Section::End {
                    if sec {
                        return Err(syntax(line, "unbalanced sec markers"));
                    }
                    ended = true;
                }
                continue;
            }
            match section {
                Section::Header | Section::End => {
                    return Err(syntax(line, "content outside a section"))
                }
                Section::Binaries | Section::Generals => {
                    let list = if section == Section::Binaries {
                        &mut file.binaries
                    } else {
                        &mut file.generals
                    };
                    list.extend(
                        trimmed
                            .split_whitespace()
                            .map(|n| marked(n.to_string(), sec)),
                    );
                }
                Section::Bounds => file.bounds.push(marked(parse_bound(trimmed, line)?, sec)),
                Section::Objective | Section::Constraints => {
                    if pending.is_empty() {
                        pending_at = (line, sec);
                    }
                    pending.extend(trimmed.split_whitespace());
                    if section == Section::Constraints && statement_complete(&pending) {
                        let row = parse_row(&pending, pending_at.0)?;
                        file.constraints.push(marked(row, pending_at.1));
                        pending.clear();
                    }
                }
            }
        }
        if !ended {
            return Err(LpError::Unterminated);
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Header,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

impl Section {
    fn from_title(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "maximize" => Self::Objective,
            "subject to" => Self::Constraints,
            "bounds" => Self::Bounds,
            "binaries" => Self::Binaries,
            "generals" => Self::Generals,
            "end" => Self::End,
            _ => return None,
        })
    }
}

fn sense_of(tok: &str) -> Option<Sense> {
    match tok {
        "<=" => Some(Sense::Le),
        "=" => Some(Sense::Eq),
        ">=" => Some(Sense::Ge),
        _ => None,
    }
}

fn statement_complete(tokens: &[&str]) -> bool {
    tokens.len() >= 2 && sense_of(tokens[tokens.len() - 2]).is_some()
}

fn number(tok: &str, line: usize) -> Result<i64, LpError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected an integer, found {tok:?}")))
}

/// Parses `[-] [c] v (+|-) [c] v ...`, or a lone `0`.
fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(i64, String)>, LpError> {
    if tokens == ["0"] {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut it = tokens.iter().peekable();
    let mut first = true;
    while let Some(&tok) = it.next() {
        let mut sign = 1;
        let mut tok = tok;
        if tok == "+" || tok == "-" {
            if tok == "-" {
                sign = -1;
            }
            tok = it.next().ok_or_else(|| syntax(line, "dangling sign"))?;
        } else if !first {
            return Err(syntax(line, format!("expected + or -, found {tok:?}")));
        }
        let coef = if tok.starts_with(|c: char| c.is_ascii_digit()) {
            let c = number(tok, line)?;
            tok = it
                .next()
                .ok_or_else(|| syntax(line, "coefficient without variable"))?;
            c
        } else {
            1
        };
        terms.push((sign * coef, tok.to_string()));
        first = false;
    }
    Ok(terms)
}

fn parse_row(tokens: &[&str], line: usize) -> Result<LpRow, LpError> {
    let name = tokens[0]
        .strip_suffix(':')
        .ok_or_else(|| syntax(line, "constraint must start with `name:`"))?;
    let n = tokens.len();
    let sense = sense_of(tokens[n - 2]).expect("statement_complete");
    Ok(LpRow {
        name: name.to_string(),
        terms: parse_terms(&tokens[1..n - 2], line)?,
        sense,
        rhs: number(tokens[n - 1], line)?,
    })
}

fn parse_bound(s: &str, line: usize) -> Result<LpBound, LpError> {
    let t: Vec<&str> = s.split_whitespace().collect();
    match t.as_slice() {
        [lo, "<=", var, "<=", up] => Ok(LpBound {
            var: var.to_string(),
            lower: number(lo, line)?,
            upper: Some(number(up, line)?),
        }),
        [var, ">=", lo] => Ok(LpBound {
            var: var.to_string(),
            lower: number(lo, line)?,
            upper: None,
        }),
        _ => Err(syntax(line, format!("unsupported bound {s:?}"))),
    }
}

#[derive(Default)]
struct Writer {
    text: String,
}

impl Writer {
    fn raw(&mut self, s: &str) {
        self.text.push_str(s);
        self.text.push('\n');
    }

    fn line(&mut self, s: &str) {
        self.raw(s);
    }

    /// Writes `items`, wrapping the SEC-flagged run in markers. SEC items
    /// are expected to form one contiguous run per section.
    fn block<T>(&mut self, items: &[Marked<T>], mut each: impl FnMut(&mut Self, &T)) {
        let mut open = false;
        for m in items {
            if m.sec != open {
                self.raw(if m.sec { SEC_BEGIN } else { SEC_END });
                open = m.sec;
            }
            each(self, &m.item);
        }
        if open {
            self.raw(SEC_END);
        }
    }

    fn statement(&mut self, head: &str, terms: &[(i64, String)], tail: Option<(Sense, i64)>) {
        let mut parts: Vec<String> = Vec::with_capacity(terms.len() + 1);
        for (k, (coef, var)) in terms.iter().enumerate() {
            let sign = match (k, *coef < 0) {
                (0, false) => "",
                (0, true) => "- ",
                (_, false) => "+ ",
                (_, true) => "- ",
            };
            let mag = coef.unsigned_abs();
            parts.push(if mag == 1 {
                format!("{sign}{var}")
            } else {
                format!("{sign}{mag} {var}")
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some((sense, rhs)) = tail {
            parts.push(format!("{} {rhs}", sense.as_str()));
        }
        let mut current = head.to_string();
        for p in parts {
            if current.len() + 1 + p.len() > WRAP && current.len() > head.len() {
                self.raw(&current);
                current = String::from("  ");
            }
            current.push(' ');
            current.push_str(&p);
        }
        self.raw(&current);
    }

    fn names(&mut self, names: &[Marked<String>]) {
        let mut chunk: Vec<&Marked<String>> = Vec::new();
        let flush = |w: &mut Self, chunk: &mut Vec<&Marked<String>>| {
            let mut current = String::new();
            for m in chunk.drain(..) {
                if !current.is_empty() && current.len() + 1 + m.item.len() > WRAP {
                    w.raw(&current);
                    current.clear();
                }
                current.push(' ');
                current.push_str(&m.item);
            }
            if !current.is_empty() {
                w.raw(&current);
            }
        };
        let mut open = false;
        for m in names {
            if m.sec != open {
                flush(self, &mut chunk);
                self.raw(if m.sec { SEC_BEGIN } else { SEC_END });
                open = m.sec;
            }
            chunk.push(m);
        }
        flush(self, &mut chunk);
        if open {
            self.raw(SEC_END);
        }
    }
}

/// Serializes a model in LP format.
pub fn write_lp(model: &IlpModel) -> String {
    LpFile::from_model(model).write()
}

/// Drops every line inside (and including) SEC markers. Two exports of the
/// same instance must agree after this.
pub fn strip_sec_blocks(text: &str) -> String {
    let mut out = String::new();
    let mut inside = false;
    for line in text.lines() {
        match line.trim() {
            SEC_BEGIN => inside = true,
            SEC_END => inside = false,
            _ if !inside => {
                out.push_str(line);
                out.push('\n');
            }
            _ => {}
        }
    }
    out
}

/// Serializes a model in fixed-field MPS.
///
/// Fixed MPS allows 8-character names, so rows are renamed `R0000001`...
/// and columns `C0000001`...; `*` comment lines map each back to its
/// model name. Integer and binary columns sit between `INTORG`/`INTEND`
/// markers; binaries get `BV` bounds.
pub fn write_mps(model: &IlpModel) -> String {
    let mut out = String::new();
    let row_name = |k: usize| format!("R{:07}", k + 1);
    let col_name = |k: usize| format!("C{:07}", k + 1);
    let _ = writeln!(
        out,
        "* {} ({} subtour elimination, {} budget)",
        model.name, model.sec, model.mode
    );
    for (k, c) in model.constraints.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", row_name(k), c.name);
    }
    for (k, v) in model.variables.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", col_name(k), v.name);
    }
    let short: String = model
        .name
        .chars()
        .filter(|c| !c.is_whitespace())
        .take(8)
        .collect();
    let _ = writeln!(out, "NAME          {short}");
    out.push_str("OBJSENSE\n    MAX\nROWS\n N  OBJ\n");
    for (k, c) in model.constraints.iter().enumerate() {
        let kind = match c.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        let _ = writeln!(out, " {kind}  {}", row_name(k));
    }

    let mut entries: Vec<Vec<(String, i64)>> = vec![Vec::new(); model.variables.len()];
    for &(i, a) in &model.objective {
        if a != 0 {
            entries[i].push(("OBJ".into(), a));
        }
    }
    for (k, c) in model.constraints.iter().enumerate() {
        for &(i, a) in &c.terms {
            entries[i].push((row_name(k), a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (k, v) in model.variables.iter().enumerate() {
        let integral = v.kind != VarKind::Continuous;
        if integral != in_int {
            marker += 1;
            let tag = if integral { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(
                out,
                "    {:<8}  {:<8}  {:>12}",
                format!("M{marker:07}"),
                "'MARKER'",
                tag
            );
            in_int = integral;
        }
        if entries[k].is_empty() {
            entries[k].push(("OBJ".into(), 0));
        }
        for (row, a) in &entries[k] {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", col_name(k), row, a);
        }
    }
    if in_int {
        marker += 1;
        let _ = writeln!(
            out,
            "    {:<8}  {:<8}  {:>12}",
            format!("M{marker:07}"),
            "'MARKER'",
            "'INTEND'"
        );
    }
    out.push_str("RHS\n");
    for (k, c) in model.constraints.iter().enumerate() {
        if c.rhs != 0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", row_name(k), c.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for (k, v) in model.variables.iter().enumerate() {
        if v.kind == VarKind::Binary {
            let _ = writeln!(out, " BV {:<8}  {:<8}", "BND", col_name(k));
            continue;
        }
        if v.lower != 0 {
            let _ = writeln!(out, " LO {:<8}  {:<8}  {:>12}", "BND", col_name(k), v.lower);
        }
        match v.upper {
            Some(u) => {
                let _ = writeln!(out, " UP {:<8}  {:<8}  {:>12}", "BND", col_name(k), u);
            }
            // integer columns inside markers may default to an upper bound of 1
            None if v.kind == VarKind::Integer => {
                let _ = writeln!(out, " PL {:<8}  {:<8}", "BND", col_name(k));
            }
            None => {}
        }
    }
    out.push_str("ENDATA\n");
    out
}
