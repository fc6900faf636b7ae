//! JSON market files.
//!
//! ```json
//! {
//!   "mode": "job-market",
//!   "capacities": [2, 1],
//!   "firms": ["f1", "f2"],
//!   "workers": ["w1", "w2", "w3"],
//!   "matrix": [["8", "6", "3"], ["7", "6", "4"]]
//! }
//! ```
//!
//! Entries are strings (`"8"`, `"2.25"`, `"143/28"`) or plain JSON numbers,
//! read exactly. A job market may give `hire` and `reservation` instead of
//! `matrix`. In `buyer-seller` mode the capacities belong to the sellers and
//! `matrix` has one row per buyer.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use jobmarket_core::kaneko::BuyerMarket;
use jobmarket_core::market::DUMMY_PREFIX;
use jobmarket_core::rational::parse_rational;
use jobmarket_core::{surplus_matrix, Firm, Market, Rational, RawMarket};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    JobMarket,
    BuyerSeller,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMarket {
    Job(Market),
    Buyers(BuyerMarket),
}

/// A non-negative exact rational.
#[derive(Debug, Clone, PartialEq)]
struct Entry(Rational);

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = Entry;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative rational such as \"8\", \"2.25\" or \"143/28\"")
            }

            fn visit_str<E: de::Error>(self, text: &str) -> Result<Entry, E> {
                let value = parse_rational(text).map_err(E::custom)?;
                if value < Rational::from_integer(0.into()) {
                    return Err(E::custom(format!("negative entry {text}")));
                }
                Ok(Entry(value))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Entry, E> {
                Ok(Entry(Rational::from_integer(v.into())))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Entry, E> {
                self.visit_str(&v.to_string())
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Entry, E> {
                // Shortest round-trip text of the literal, read as a decimal.
                self.visit_str(&v.to_string())
            }
        }

        deserializer.deserialize_any(EntryVisitor)
    }
}

/// Rows of equal length.
#[derive(Debug, Clone, PartialEq)]
struct Matrix(Vec<Vec<Rational>>);

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MatrixVisitor;

        impl<'de> Visitor<'de> for MatrixVisitor {
            type Value = Matrix;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of rows")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Matrix, A::Error> {
                let mut rows: Vec<Vec<Rational>> = Vec::new();
                while let Some(row) = seq.next_element::<Vec<Entry>>()? {
                    if let Some(first) = rows.first() {
                        if row.len() != first.len() {
                            return Err(de::Error::custom(format!(
                                "non-rectangular matrix: row {} has {} entries, row 1 has {}",
                                rows.len() + 1,
                                row.len(),
                                first.len()
                            )));
                        }
                    }
                    rows.push(row.into_iter().map(|e| e.0).collect());
                }
                Ok(Matrix(rows))
            }
        }

        deserializer.deserialize_seq(MatrixVisitor)
    }
}

/// Distinct agent ids.
#[derive(Debug, Clone, PartialEq)]
struct Names(Vec<String>);

impl<'de> Deserialize<'de> for Names {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        let mut seen = HashSet::new();
        for name in &names {
            if name.starts_with(DUMMY_PREFIX) {
                return Err(de::Error::custom(format!("reserved id {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(de::Error::custom(format!("duplicate id {name:?}")));
            }
        }
        Ok(Names(names))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Capacity(usize);

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match u64::deserialize(deserializer)? {
            0 => Err(de::Error::custom("capacities must be positive integers")),
            c => usize::try_from(c)
                .map(Capacity)
                .map_err(|_| de::Error::custom("capacity too large")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    mode: Mode,
    capacities: Vec<Capacity>,
    firms: Option<Names>,
    workers: Option<Names>,
    sellers: Option<Names>,
    buyers: Option<Names>,
    matrix: Option<Matrix>,
    hire: Option<Matrix>,
    reservation: Option<Vec<Entry>>,
}

pub fn parse_market(path: &Path) -> Result<LoadedMarket, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_market_str(&text, &path.display().to_string())
}

/// Parses market JSON; `origin` names the source in diagnostics.
pub fn parse_market_str(text: &str, origin: &str) -> Result<LoadedMarket, FileError> {
    let file: MarketFile = serde_json::from_str(text).map_err(|e| FileError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let invalid = |message: String| FileError::Invalid {
        path: origin.to_string(),
        message,
    };
    let capacities: Vec<usize> = file.capacities.iter().map(|c| c.0).collect();
    match file.mode {
        Mode::JobMarket => {
            if file.sellers.is_some() || file.buyers.is_some() {
                return Err(invalid(
                    "sellers/buyers belong to buyer-seller files".into(),
                ));
            }
            let firms = names(file.firms, "f", capacities.len(), "firms", &invalid)?;
            let firms: Vec<Firm> = firms
                .into_iter()
                .zip(&capacities)
                .map(|(id, &c)| Firm::new(id, c))
                .collect();
            match (file.matrix, file.hire, file.reservation) {
                (Some(matrix), None, None) => {
                    let cols = matrix.0.first().map_or(0, Vec::len);
                    check_rows(&matrix, firms.len(), "matrix", "firms", &invalid)?;
                    let workers = names(file.workers, "w", cols, "workers", &invalid)?;
                    Market::new(firms, workers, matrix.0)
                        .map(LoadedMarket::Job)
                        .map_err(|e| invalid(e.to_string()))
                }
                (None, Some(hire), Some(reservation)) => {
                    check_rows(&hire, firms.len(), "hire", "firms", &invalid)?;
                    let workers = names(file.workers, "w", reservation.len(), "workers", &invalid)?;
                    let raw = RawMarket::new(
                        firms,
                        workers,
                        hire.0,
                        reservation.into_iter().map(|e| e.0).collect(),
                    )
                    .map_err(|e| invalid(e.to_string()))?;
                    Ok(LoadedMarket::Job(surplus_matrix(&raw)))
                }
                _ => Err(invalid(
                    "give either \"matrix\" or both \"hire\" and \"reservation\"".into(),
                )),
            }
        }
        Mode::BuyerSeller => {
            if file.firms.is_some() || file.workers.is_some() {
                return Err(invalid("firms/workers belong to job-market files".into()));
            }
            if file.hire.is_some() || file.reservation.is_some() {
                return Err(invalid(
                    "hire/reservation apply to job-market files only".into(),
                ));
            }
            let matrix = file
                .matrix
                .ok_or_else(|| invalid("missing \"matrix\"".into()))?;
            let sellers = names(file.sellers, "s", capacities.len(), "sellers", &invalid)?;
            let sellers = sellers
                .into_iter()
                .zip(&capacities)
                .map(|(id, &c)| Firm::new(id, c))
                .collect();
            let buyers = names(file.buyers, "b", matrix.0.len(), "buyers", &invalid)?;
            if let Some(row) = matrix.0.first() {
                if row.len() != capacities.len() {
                    return Err(invalid(format!(
                        "matrix rows have {} entries but there are {} sellers",
                        row.len(),
                        capacities.len()
                    )));
                }
            }
            BuyerMarket::new(buyers, sellers, matrix.0)
                .map(LoadedMarket::Buyers)
                .map_err(|e| invalid(e.to_string()))
        }
    }
}

fn names(
    given: Option<Names>,
    prefix: &str,
    count: usize,
    what: &str,
    invalid: &impl Fn(String) -> FileError,
) -> Result<Vec<String>, FileError> {
    match given {
        Some(Names(names)) if names.len() == count => Ok(names),
        Some(Names(names)) => Err(invalid(format!(
            "{} {what} named but the market has {count}",
            names.len()
        ))),
        None => Ok((1..=count).map(|k| format!("{prefix}{k}")).collect()),
    }
}

fn check_rows(
    matrix: &Matrix,
    expected: usize,
    field: &str,
    what: &str,
    invalid: &impl Fn(String) -> FileError,
) -> Result<(), FileError> {
    if matrix.0.len() == expected {
        Ok(())
    } else {
        Err(invalid(format!(
            "{field} has {} rows but there are {expected} {what}",
            matrix.0.len()
        )))
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(at) => message[..at].to_string(),
        None => message.to_string(),
    }
}
