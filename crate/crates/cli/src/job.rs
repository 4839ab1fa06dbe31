//! Job files: parsing and validation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;
use transversal_core::bincode::{BinaryCode, BitVector, NestedCodePair};
use transversal_core::monomial::{Monomial, MonomialCodeSpec, MonomialSet, MAX_VARIABLES};
use transversal_core::zmod::{check_level, ZVector};
use transversal_core::{CssCode, Error};

pub const SCHEMA_VERSION: u32 = 1;

/// Errors surfaced by the front end, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// The job is malformed; `path` names the offending field.
    Input {
        path: String,
        message: String,
    },
    /// A computation could not be carried out on a valid job.
    Compute(Error),
    /// Two independent routes disagreed.
    Internal(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn input(path: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Input {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 2,
            CliError::Compute(Error::Inconsistent(_)) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { path, message } => write!(f, "invalid job at {path}: {message}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Internal(msg) => write!(f, "internal consistency failure: {msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Groups,
    Action,
    Verify,
    ClosedForm,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    version: u32,
    ell: u32,
    code: RawCode,
    #[serde(default)]
    y_x: Option<String>,
    #[serde(default)]
    y_z: Option<String>,
    #[serde(default)]
    tasks: Vec<Task>,
    #[serde(default)]
    gate: Option<Vec<u64>>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawCode {
    Matrix {
        n: usize,
        #[serde(rename = "C1")]
        c1: Vec<String>,
        #[serde(rename = "C2", default)]
        c2: Vec<String>,
    },
    Monomial {
        m: u32,
        #[serde(rename = "M1")]
        m1: Vec<String>,
        #[serde(rename = "M2", default)]
        m2: Vec<String>,
    },
}

/// How the code was specified.
#[derive(Clone, Debug)]
pub enum CodeSource {
    Matrix,
    Monomial(MonomialCodeSpec),
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct Job {
    pub ell: u32,
    pub source: CodeSource,
    pub css: CssCode,
    /// Requested tasks, sorted and deduplicated.
    pub tasks: Vec<Task>,
    pub gate: Option<ZVector>,
    pub seed: u64,
}

impl Job {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawJob = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::input(path, e.into_inner())
        })?;
        raw.validate()
    }

    pub fn monomial(&self) -> Option<&MonomialCodeSpec> {
        match &self.source {
            CodeSource::Monomial(spec) => Some(spec),
            CodeSource::Matrix => None,
        }
    }

    pub fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }
}

fn parse_bits(s: &str, n: usize, path: &str) -> Result<BitVector, CliError> {
    let v: BitVector = s.parse().map_err(|e| CliError::input(path, e))?;
    if v.len() != n {
        return Err(CliError::input(
            path,
            format_args!("bitstring has length {}, expected {n}", v.len()),
        ));
    }
    Ok(v)
}

fn parse_rows(rows: &[String], n: usize, field: &str) -> Result<BinaryCode, CliError> {
    let vs = rows
        .iter()
        .enumerate()
        .map(|(i, s)| parse_bits(s, n, &format!("code.{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    BinaryCode::from_rows(n, vs).map_err(|e| CliError::input(format!("code.{field}"), e))
}

fn parse_tokens(tokens: &[String], m: u32, field: &str) -> Result<MonomialSet, CliError> {
    let members = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Monomial::parse(t, m).map_err(|e| CliError::input(format!("code.{field}[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MonomialSet::new(m, members).map_err(|e| CliError::input(format!("code.{field}"), e))
}

impl RawJob {
    fn validate(self) -> Result<Job, CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::input(
                "version",
                format_args!(
                    "unsupported schema version {}, expected {SCHEMA_VERSION}",
                    self.version
                ),
            ));
        }
        check_level(self.ell).map_err(|e| CliError::input("ell", e))?;

        let (source, pair) = match self.code {
            RawCode::Matrix { n, c1, c2 } => {
                if n == 0 {
                    return Err(CliError::input("code.n", "code length must be positive"));
                }
                let c1 = parse_rows(&c1, n, "C1")?;
                let c2 = parse_rows(&c2, n, "C2")?;
                let pair =
                    NestedCodePair::aligned(&c1, &c2).map_err(|e| CliError::input("code.C2", e))?;
                (CodeSource::Matrix, pair)
            }
            RawCode::Monomial { m, m1, m2 } => {
                if m == 0 || m > MAX_VARIABLES {
                    return Err(CliError::input(
                        "code.m",
                        format_args!("number of variables must lie in 1..={MAX_VARIABLES}"),
                    ));
                }
                let m1 = parse_tokens(&m1, m, "M1")?;
                let m2 = parse_tokens(&m2, m, "M2")?;
                let spec = MonomialCodeSpec::new(m1, m2)
                    .map_err(|_| CliError::input("code.M2", "M2 is not a subset of M1"))?;
                let pair = spec.pair();
                (CodeSource::Monomial(spec), pair)
            }
        };

        let n = pair.len();
        let y_x = match &self.y_x {
            Some(s) => parse_bits(s, n, "y_x")?,
            None => BitVector::zeros(n),
        };
        let y_z = match &self.y_z {
            Some(s) => parse_bits(s, n, "y_z")?,
            None => BitVector::zeros(n),
        };
        let css = CssCode::new(pair, y_x, y_z)?;

        let gate = match &self.gate {
            None => None,
            Some(entries) => {
                if entries.len() != n {
                    return Err(CliError::input(
                        "gate",
                        format_args!("gate has {} entries, expected {n}", entries.len()),
                    ));
                }
                let modulus = 1u64 << self.ell;
                if let Some(i) = entries.iter().position(|&e| e >= modulus) {
                    return Err(CliError::input(
                        format!("gate[{i}]"),
                        format_args!("{} is not a residue mod {modulus}", entries[i]),
                    ));
                }
                Some(ZVector::new(entries.clone(), self.ell)?)
            }
        };

        let tasks: BTreeSet<Task> = self.tasks.into_iter().collect();
        Ok(Job {
            ell: self.ell,
            source,
            css,
            tasks: tasks.into_iter().collect(),
            gate,
            seed: self.seed.unwrap_or(0),
        })
    }
}
