//! The clause table: one row per extracted clause.

mod io;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{deserialize, serialize, Format, ReadError, CSV_HEADER};

/// Deontic modality of a clause. Ordered by precedence: `D < P < O < F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum Modality {
    /// Declaration: states a fact.
    #[default]
    D,
    /// Permission.
    P,
    /// Obligation.
    O,
    /// Prohibition.
    F,
}

impl Modality {
    pub fn code(self) -> &'static str {
        match self {
            Modality::D => "D",
            Modality::P => "P",
            Modality::O => "O",
            Modality::F => "F",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D" => Ok(Modality::D),
            "P" => Ok(Modality::P),
            "O" => Ok(Modality::O),
            "F" => Ok(Modality::F),
            other => Err(other.to_string()),
        }
    }
}

/// How a clause attaches to the preceding clause of the same sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Refinement {
    #[default]
    #[serde(rename = "")]
    None,
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
    #[serde(rename = "SEQ")]
    Seq,
}

impl Refinement {
    /// Empty for `None`, matching the blank refinement column of the table.
    pub fn code(self) -> &'static str {
        match self {
            Refinement::None => "",
            Refinement::And => "AND",
            Refinement::Or => "OR",
            Refinement::Seq => "SEQ",
        }
    }
}

impl fmt::Display for Refinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Refinement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "" | "NONE" => Ok(Refinement::None),
            "AND" => Ok(Refinement::And),
            "OR" => Ok(Refinement::Or),
            "SEQ" => Ok(Refinement::Seq),
            other => Err(other.to_string()),
        }
    }
}

/// Which core field a modifier phrase hangs off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Anchor {
    S,
    V,
    O,
}

impl Anchor {
    pub fn code(self) -> &'static str {
        match self {
            Anchor::S => "S",
            Anchor::V => "V",
            Anchor::O => "O",
        }
    }
}

impl FromStr for Anchor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "S" => Ok(Anchor::S),
            "V" => Ok(Anchor::V),
            "O" => Ok(Anchor::O),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnotatedPhrase {
    pub anchor: Anchor,
    pub text: String,
}

impl AnnotatedPhrase {
    pub fn new(anchor: Anchor, text: impl Into<String>) -> Self {
        AnnotatedPhrase { anchor, text: text.into() }
    }
}

impl fmt::Display for AnnotatedPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.anchor.code(), self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ClauseRow {
    pub sent_id: String,
    pub refinement: Refinement,
    pub modality: Modality,
    pub subject: String,
    pub verb: String,
    pub object: String,
    pub time: Vec<AnnotatedPhrase>,
    pub adverbials: Vec<AnnotatedPhrase>,
    pub conditions: Vec<AnnotatedPhrase>,
    pub notes: Vec<AnnotatedPhrase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ClauseTable {
    pub doc_id: String,
    pub rows: Vec<ClauseRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("row {row}: refinement {code} has no preceding row of sentence `{sent_id}`")]
    DanglingRefinement { row: usize, sent_id: String, code: String },
    #[error("row {row}: sentence `{sent_id}` already has a first row; only the first may have no refinement")]
    SecondUnrefinedRow { row: usize, sent_id: String },
    #[error("row {row}: rows of sentence `{sent_id}` are not contiguous")]
    NonContiguous { row: usize, sent_id: String },
    #[error("row {row}: {field} `{value}` has surrounding whitespace")]
    Whitespace { row: usize, field: &'static str, value: String },
    #[error("row {row}: {field} `{value}` contains an article")]
    Article { row: usize, field: &'static str, value: String },
    #[error("row {row}: empty {field} phrase")]
    EmptyPhrase { row: usize, field: &'static str },
}

const ARTICLES: [&str; 3] = ["a", "an", "the"];

pub(crate) fn is_article(word: &str) -> bool {
    ARTICLES.iter().any(|a| a.eq_ignore_ascii_case(word))
}

impl ClauseTable {
    pub fn new(doc_id: impl Into<String>, rows: Vec<ClauseRow>) -> Self {
        ClauseTable { doc_id: doc_id.into(), rows }
    }

    /// Checks row-level and contiguity invariants. Row numbers are 1-based.
    pub fn validate(&self) -> Result<(), TableError> {
        let mut seen: Vec<&str> = Vec::new();
        let mut current: Option<&str> = None;
        for (i, r) in self.rows.iter().enumerate() {
            let row = i + 1;
            for (field, value) in [("subject", &r.subject), ("verb", &r.verb), ("object", &r.object)] {
                if value.trim() != value {
                    return Err(TableError::Whitespace { row, field, value: value.clone() });
                }
                if value.split_whitespace().any(is_article) {
                    return Err(TableError::Article { row, field, value: value.clone() });
                }
            }
            for (field, list) in [("time", &r.time), ("adverbials", &r.adverbials), ("conditions", &r.conditions), ("notes", &r.notes)] {
                if list.iter().any(|p| p.text.trim().is_empty()) {
                    return Err(TableError::EmptyPhrase { row, field });
                }
            }
            let continues = current == Some(r.sent_id.as_str());
            match (continues, r.refinement) {
                (false, Refinement::None) => {
                    if seen.contains(&r.sent_id.as_str()) {
                        return Err(TableError::NonContiguous { row, sent_id: r.sent_id.clone() });
                    }
                    seen.push(&r.sent_id);
                    current = Some(&r.sent_id);
                }
                (false, code) => {
                    return Err(TableError::DanglingRefinement {
                        row,
                        sent_id: r.sent_id.clone(),
                        code: code.code().to_string(),
                    })
                }
                (true, Refinement::None) => {
                    return Err(TableError::SecondUnrefinedRow { row, sent_id: r.sent_id.clone() })
                }
                (true, _) => {}
            }
        }
        Ok(())
    }

    /// Rows grouped by sentence, in table order.
    pub fn sentence_groups(&self) -> Vec<&[ClauseRow]> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.rows.len() {
            if i == self.rows.len() || self.rows[i].sent_id != self.rows[start].sent_id {
                if i > start {
                    groups.push(&self.rows[start..i]);
                }
                start = i;
            }
        }
        groups
    }
}
