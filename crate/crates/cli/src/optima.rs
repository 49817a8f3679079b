//! Table of known GTSP optima (`T_Max`) keyed by instance name.
//!
//! Plain text, one `name value` pair per line, `#` starts a comment. The
//! table shipped in `data/optima.txt` is compiled in; `MDMSOP_OPTIMA` names
//! a file to use instead.

use std::collections::BTreeMap;
use std::path::Path;

use mdmsop_core::Cost;
use thiserror::Error;

/// Environment variable naming an optima file that replaces the built-in one.
pub const OPTIMA_ENV: &str = "MDMSOP_OPTIMA";

const BUILTIN: &str = include_str!("../../../data/optima.txt");

#[derive(Debug, Error)]
pub enum OptimaError {
    #[error("line {line}: expected `name value` with a positive integer value")]
    Syntax { line: usize },
    #[error("line {line}: {name} is listed twice")]
    Duplicate { line: usize, name: String },
    #[error("cannot read optima file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OptimaTable {
    values: BTreeMap<String, Cost>,
}

impl OptimaTable {
    pub fn parse(text: &str) -> Result<Self, OptimaError> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [name, value] = fields.as_slice() else {
                return Err(OptimaError::Syntax { line });
            };
            let value: Cost = value.parse().map_err(|_| OptimaError::Syntax { line })?;
            if value <= 0 {
                return Err(OptimaError::Syntax { line });
            }
            if values.insert(name.to_string(), value).is_some() {
                return Err(OptimaError::Duplicate {
                    line,
                    name: name.to_string(),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("the shipped optima table parses")
    }

    pub fn from_file(path: &Path) -> Result<Self, OptimaError> {
        let text = std::fs::read_to_string(path).map_err(|source| OptimaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The table named by [`OPTIMA_ENV`], or the built-in one.
    pub fn load() -> Result<Self, OptimaError> {
        match std::env::var_os(OPTIMA_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn get(&self, name: &str) -> Option<Cost> {
        self.values.get(name).copied()
    }

    /// Instance names in lexical order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
