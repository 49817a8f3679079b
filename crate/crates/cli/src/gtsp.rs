//! GTSP-lib reader.
//!
//! Accepts the usual layout: `KEY : value` header lines, a
//! `NODE_COORD_SECTION` with `id x y` rows and a `GTSP_SET_SECTION` whose
//! entries are `set_id node node ... -1` (an entry may wrap across lines).
//! Node and set ids may be any distinct integers; they are renumbered
//! densely from 1 in ascending order.

use std::collections::BTreeMap;

use mdmsop_core::{GtspInstance, InstanceError, Point};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GtspError {
    #[error("line {line}: malformed header line {text:?}")]
    Header { line: usize, text: String },
    #[error("line {line}: unsupported EDGE_WEIGHT_TYPE {kind:?} (only EUC_2D)")]
    EdgeWeight { line: usize, kind: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: i64 },
    #[error("line {line}: duplicate set id {id}")]
    DuplicateSet { line: usize, id: i64 },
    #[error("line {line}: set section is not a partition of the nodes: {source}")]
    Partition {
        line: usize,
        #[source]
        source: InstanceError,
    },
    #[error("line {line}: {what} declares {declared} but {found} were given")]
    CountMismatch {
        line: usize,
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("missing {0}")]
    Missing(&'static str),
}

/// Header fields seen so far, with the line each came from.
#[derive(Debug, Default)]
pub(crate) struct Header {
    pub(crate) fields: BTreeMap<String, (usize, String)>,
}

impl Header {
    pub(crate) fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.fields.get(key)
    }

    pub(crate) fn require(&self, key: &'static str) -> Result<&(usize, String), GtspError> {
        self.get(key).ok_or(GtspError::Missing(key))
    }

    pub(crate) fn count(&self, key: &'static str) -> Result<(usize, usize), GtspError> {
        let (line, value) = self.require(key)?;
        let n = value.parse().map_err(|_| GtspError::Syntax {
            line: *line,
            msg: format!("{key} must be a non-negative integer, got {value:?}"),
        })?;
        Ok((*line, n))
    }
}

/// Splits a header line `KEY : value` (the colon may touch either side).
pub(crate) fn split_header(line: &str) -> Option<(String, String)> {
    let (k, v) = line.split_once(':')?;
    let k = k.trim();
    if k.is_empty() || k.contains(char::is_whitespace) {
        return None;
    }
    Some((k.to_ascii_uppercase(), v.trim().to_string()))
}

pub(crate) fn parse_num<T: std::str::FromStr>(
    tok: &str,
    line: usize,
    what: &str,
) -> Result<T, GtspError> {
    tok.parse().map_err(|_| GtspError::Syntax {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

/// Tokens of a section, each tagged with its line number.
pub(crate) type Tokens<'a> = Vec<(usize, &'a str)>;

/// Raw pieces of a GTSP-style file. Sections not in `known` are an error.
#[derive(Debug, Default)]
pub(crate) struct Raw<'a> {
    pub(crate) header: Header,
    pub(crate) sections: BTreeMap<&'static str, (usize, Tokens<'a>)>,
}

pub(crate) fn split_file<'a>(text: &'a str, known: &[&'static str]) -> Result<Raw<'a>, GtspError> {
    let mut raw = Raw::default();
    let mut current: Option<&'static str> = None;
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "EOF" {
            break;
        }
        let upper = trimmed.trim_end_matches(':').trim().to_ascii_uppercase();
        if let Some(&name) = known.iter().find(|&&s| s == upper) {
            if raw.sections.contains_key(name) {
                return Err(GtspError::Syntax {
                    line: lineno,
                    msg: format!("{name} appears twice"),
                });
            }
            raw.sections.insert(name, (lineno, Vec::new()));
            current = Some(name);
            continue;
        }
        if upper.ends_with("_SECTION") {
            return Err(GtspError::Syntax {
                line: lineno,
                msg: format!("unsupported section {upper}"),
            });
        }
        if let Some(name) = current {
            if trimmed.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
            {
                let tokens = &mut raw.sections.get_mut(name).expect("inserted above").1;
                tokens.extend(trimmed.split_whitespace().map(|t| (lineno, t)));
                continue;
            }
        }
        // a header line ends any open section
        current = None;
        let (key, value) = split_header(trimmed).ok_or_else(|| GtspError::Header {
            line: lineno,
            text: trimmed.to_string(),
        })?;
        raw.header.fields.insert(key, (lineno, value));
    }
    Ok(raw)
}

/// Parses `id x y` rows; returns coordinates in ascending id order.
pub(crate) fn parse_coords(
    section: &(usize, Tokens<'_>),
) -> Result<(Vec<Point>, BTreeMap<i64, usize>), GtspError> {
    let (start, tokens) = section;
    if tokens.len() % 3 != 0 {
        let line = tokens.last().map_or(*start, |t| t.0);
        return Err(GtspError::Syntax {
            line,
            msg: "coordinate rows must be `id x y`".into(),
        });
    }
    let mut by_id: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for chunk in tokens.chunks(3) {
        let line = chunk[0].0;
        if chunk[2].0 != line {
            return Err(GtspError::Syntax {
                line,
                msg: "coordinate rows must be `id x y`".into(),
            });
        }
        let id: i64 = parse_num(chunk[0].1, line, "node id")?;
        let x: f64 = parse_num(chunk[1].1, line, "coordinate")?;
        let y: f64 = parse_num(chunk[2].1, line, "coordinate")?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(GtspError::Syntax {
                line,
                msg: "coordinates must be finite".into(),
            });
        }
        if by_id.insert(id, (x, y)).is_some() {
            return Err(GtspError::DuplicateNode { line, id });
        }
    }
    let index = by_id
        .keys()
        .enumerate()
        .map(|(k, &id)| (id, k + 1))
        .collect();
    let coords = by_id.values().map(|&(x, y)| Point::new(x, y)).collect();
    Ok((coords, index))
}

/// Parses `set_id node ... -1` entries into dense 1-based node lists,
/// ordered by set id.
pub(crate) fn parse_sets(
    section: &(usize, Tokens<'_>),
    node_index: &BTreeMap<i64, usize>,
) -> Result<Vec<Vec<usize>>, GtspError> {
    let (start, tokens) = section;
    let mut sets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut it = tokens.iter();
    while let Some(&(line, tok)) = it.next() {
        let id: i64 = parse_num(tok, line, "set id")?;
        let mut members = Vec::new();
        loop {
            let Some(&(l, t)) = it.next() else {
                return Err(GtspError::Syntax {
                    line,
                    msg: format!("set {id} is not terminated by -1"),
                });
            };
            let node: i64 = parse_num(t, l, "node id")?;
            if node == -1 {
                break;
            }
            let dense = *node_index.get(&node).ok_or_else(|| GtspError::Syntax {
                line: l,
                msg: format!("set {id} lists unknown node {node}"),
            })?;
            members.push(dense);
        }
        if sets.insert(id, members).is_some() {
            return Err(GtspError::DuplicateSet { line, id });
        }
    }
    if sets.is_empty() {
        return Err(GtspError::Syntax {
            line: *start,
            msg: "set section is empty".into(),
        });
    }
    Ok(sets.into_values().collect())
}

pub(crate) fn check_edge_weight(header: &Header) -> Result<(), GtspError> {
    let (line, kind) = header.require("EDGE_WEIGHT_TYPE")?;
    if !kind.eq_ignore_ascii_case("EUC_2D") {
        return Err(GtspError::EdgeWeight {
            line: *line,
            kind: kind.clone(),
        });
    }
    Ok(())
}

const SECTIONS: &[&str] = &["NODE_COORD_SECTION", "GTSP_SET_SECTION"];

/// Parses GTSP-lib text.
pub fn parse_gtsp(text: &str) -> Result<GtspInstance, GtspError> {
    base_from_raw(&split_file(text, SECTIONS)?)
}

pub(crate) fn base_from_raw(raw: &Raw<'_>) -> Result<GtspInstance, GtspError> {
    let name = raw.header.require("NAME")?.1.clone();
    check_edge_weight(&raw.header)?;
    let (dim_line, dim) = raw.header.count("DIMENSION")?;
    let (sets_line, n_sets) = raw.header.count("GTSP_SETS")?;
    let coord_section = raw
        .sections
        .get("NODE_COORD_SECTION")
        .ok_or(GtspError::Missing("NODE_COORD_SECTION"))?;
    let set_section = raw
        .sections
        .get("GTSP_SET_SECTION")
        .ok_or(GtspError::Missing("GTSP_SET_SECTION"))?;
    let (coords, index) = parse_coords(coord_section)?;
    if coords.len() != dim {
        return Err(GtspError::CountMismatch {
            line: dim_line,
            what: "DIMENSION",
            declared: dim,
            found: coords.len(),
        });
    }
    let sets = parse_sets(set_section, &index)?;
    if sets.len() != n_sets {
        return Err(GtspError::CountMismatch {
            line: sets_line,
            what: "GTSP_SETS",
            declared: n_sets,
            found: sets.len(),
        });
    }
    GtspInstance::from_sets(name, coords, sets).map_err(|source| GtspError::Partition {
        line: set_section.0,
        source,
    })
}

/// Writes GTSP-lib text; `parse_gtsp` reads it back unchanged.
pub fn write_gtsp(g: &GtspInstance, comment: Option<&str>) -> String {
    let mut out = String::new();
    write_gtsp_into(&mut out, g, "GTSP", comment);
    out.push_str("EOF\n");
    out
}

pub(crate) fn write_gtsp_into(
    out: &mut String,
    g: &GtspInstance,
    kind: &str,
    comment: Option<&str>,
) {
    use std::fmt::Write;
    let _ = writeln!(out, "NAME : {}", g.name());
    let _ = writeln!(out, "TYPE : {kind}");
    if let Some(c) = comment {
        let _ = writeln!(out, "COMMENT : {c}");
    }
    write_base_header(out, g);
    write_base_sections(out, g);
}

pub(crate) fn write_base_header(out: &mut String, g: &GtspInstance) {
    use std::fmt::Write;
    let _ = writeln!(out, "DIMENSION : {}", g.n_nodes());
    let _ = writeln!(out, "GTSP_SETS : {}", g.n_sets());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
}

pub(crate) fn write_base_sections(out: &mut String, g: &GtspInstance) {
    use std::fmt::Write;
    out.push_str("NODE_COORD_SECTION\n");
    for (k, p) in g.coords().iter().enumerate() {
        let _ = writeln!(out, "{} {:?} {:?}", k + 1, p.x, p.y);
    }
    out.push_str("GTSP_SET_SECTION\n");
    for (q, members) in g.sets().iter().enumerate() {
        let _ = write!(out, "{}", q + 1);
        for v in members {
            let _ = write!(out, " {v}");
        }
        out.push_str(" -1\n");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "NAME : small
TYPE : GTSP
COMMENT : three nodes
DIMENSION : 3
GTSP_SETS : 2
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 4
3 6.5 0
GTSP_SET_SECTION
1 1 3 -1
2 2 -1
EOF
";

    #[test]
    fn parses_a_small_file() {
        let g = parse_gtsp(SMALL).unwrap();
        assert_eq!(g.name(), "small");
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.sets(), &[vec![1, 3], vec![2]]);
        assert_eq!(g.coords()[2], Point::new(6.5, 0.0));
    }

    #[test]
    fn renumbers_sparse_ids() {
        let text = SMALL
            .replace("1 0 0", "10 0 0")
            .replace("2 3 4", "20 3 4")
            .replace("3 6.5 0", "30 6.5 0")
            .replace("1 1 3 -1", "5 10 30 -1")
            .replace("2 2 -1", "7 20 -1");
        assert_eq!(parse_gtsp(&text).unwrap(), parse_gtsp(SMALL).unwrap());
    }

    #[test]
    fn set_entries_may_wrap() {
        let text = SMALL.replace("1 1 3 -1", "1 1\n3 -1");
        assert_eq!(parse_gtsp(&text).unwrap().sets(), &[vec![1, 3], vec![2]]);
    }

    #[test]
    fn errors_name_their_line() {
        let e = parse_gtsp(&SMALL.replace("EUC_2D", "GEO")).unwrap_err();
        assert!(matches!(e, GtspError::EdgeWeight { line: 6, .. }), "{e}");
        let e = parse_gtsp(&SMALL.replace("2 3 4", "1 3 4")).unwrap_err();
        assert_eq!(e, GtspError::DuplicateNode { line: 9, id: 1 });
        let e = parse_gtsp(&SMALL.replace("1 1 3 -1", "1 1 -1")).unwrap_err();
        assert!(matches!(e, GtspError::Partition { line: 11, .. }), "{e}");
        let e = parse_gtsp(&SMALL.replace("DIMENSION : 3", "DIMENSION three")).unwrap_err();
        assert!(matches!(e, GtspError::Header { line: 4, .. }), "{e}");
        let e = parse_gtsp(&SMALL.replace("GTSP_SETS : 2", "GTSP_SETS : 3")).unwrap_err();
        assert!(matches!(e, GtspError::CountMismatch { line: 5, .. }), "{e}");
    }

    #[test]
    fn write_then_parse_is_identity() {
        let g = parse_gtsp(SMALL).unwrap();
        assert_eq!(parse_gtsp(&write_gtsp(&g, Some("again"))).unwrap(), g);
    }
}
