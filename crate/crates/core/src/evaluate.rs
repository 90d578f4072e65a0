//! Field-level precision and recall of predicted tables against gold tables.
//!
//! Four fields are scored: Subject, Verb, Object and Modality. Rows of a
//! sentence are aligned greedily by the number of agreeing fields; unmatched
//! rows still count towards the denominators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::clause_table::{ClauseRow, ClauseTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Field {
    Subject,
    Verb,
    Object,
    Modality,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Subject, Field::Verb, Field::Object, Field::Modality];

    fn value(self, row: &ClauseRow) -> &str {
        match self {
            Field::Subject => &row.subject,
            Field::Verb => &row.verb,
            Field::Object => &row.object,
            Field::Modality => row.modality.code(),
        }
    }
}

fn normalized(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn filled(row: &ClauseRow, f: Field) -> bool {
    !f.value(row).trim().is_empty()
}

fn agrees(pred: &ClauseRow, gold: &ClauseRow, f: Field) -> bool {
    filled(pred, f) && filled(gold, f) && normalized(f.value(pred)) == normalized(f.value(gold))
}

/// Harmonic mean; 0 when both inputs are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_pred: Vec<usize>,
    pub unmatched_gold: Vec<usize>,
}

/// Greedy matching on agreeing-field count, highest first, ties to the lowest
/// `(pred, gold)` index pair. Zero-score pairs are still matched.
pub fn align_rows(pred: &[ClauseRow], gold: &[ClauseRow]) -> Alignment {
    let mut candidates: Vec<(usize, usize, usize)> = Vec::with_capacity(pred.len() * gold.len());
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gold.iter().enumerate() {
            let score = Field::ALL.iter().filter(|&&f| agrees(p, g, f)).count();
            candidates.push((score, i, j));
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut used_p = vec![false; pred.len()];
    let mut used_g = vec![false; gold.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_p[i] && !used_g[j] {
            used_p[i] = true;
            used_g[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    Alignment {
        pairs,
        unmatched_pred: (0..pred.len()).filter(|&i| !used_p[i]).collect(),
        unmatched_gold: (0..gold.len()).filter(|&j| !used_g[j]).collect(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub matched_fields: usize,
    pub predicted_fields: usize,
    pub gold_fields: usize,
}

impl Counts {
    fn add(&mut self, other: Counts) {
        self.matched_fields += other.matched_fields;
        self.predicted_fields += other.predicted_fields;
        self.gold_fields += other.gold_fields;
    }

    pub fn scores(&self) -> Scores {
        let precision = ratio(self.matched_fields, self.predicted_fields);
        let recall = ratio(self.matched_fields, self.gold_fields);
        Scores { precision, recall, f1: f1(precision, recall) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub per_document: BTreeMap<String, Scores>,
    pub per_field: BTreeMap<Field, Scores>,
    pub aggregate: Scores,
    pub counts: Counts,
    #[serde(skip)]
    field_counts: BTreeMap<Field, Counts>,
    #[serde(skip)]
    document_counts: BTreeMap<String, Counts>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{side} table `{doc_id}`: sentence `{sent_id}` appears in two separate places")]
    DuplicateSentence { side: &'static str, doc_id: String, sent_id: String },
}

fn groups<'a>(side: &'static str, t: &'a ClauseTable) -> Result<Vec<(&'a str, &'a [ClauseRow])>, EvalError> {
    let mut out: Vec<(&str, &[ClauseRow])> = Vec::new();
    let mut start = 0;
    for i in 1..=t.rows.len() {
        if i == t.rows.len() || t.rows[i].sent_id != t.rows[start].sent_id {
            let id = t.rows[start].sent_id.as_str();
            if out.iter().any(|(s, _)| *s == id) {
                return Err(EvalError::DuplicateSentence {
                    side,
                    doc_id: t.doc_id.clone(),
                    sent_id: id.to_string(),
                });
            }
            out.push((id, &t.rows[start..i]));
            start = i;
        }
    }
    Ok(out)
}

fn tally(pred: &[ClauseRow], gold: &[ClauseRow], per_field: &mut BTreeMap<Field, Counts>) {
    let a = align_rows(pred, gold);
    for f in Field::ALL {
        let c = per_field.entry(f).or_default();
        c.predicted_fields += pred.iter().filter(|r| filled(r, f)).count();
        c.gold_fields += gold.iter().filter(|r| filled(r, f)).count();
        c.matched_fields += a.pairs.iter().filter(|&&(i, j)| agrees(&pred[i], &gold[j], f)).count();
    }
}

fn document_fields(pred: &ClauseTable, gold: &ClauseTable) -> Result<BTreeMap<Field, Counts>, EvalError> {
    let p = groups("predicted", pred)?;
    let g = groups("gold", gold)?;
    let mut per_field = BTreeMap::new();
    for f in Field::ALL {
        per_field.insert(f, Counts::default());
    }
    for (sent, gold_rows) in &g {
        let pred_rows = p.iter().find(|(s, _)| s == sent).map(|(_, r)| *r).unwrap_or(&[]);
        tally(pred_rows, gold_rows, &mut per_field);
    }
    for (sent, pred_rows) in &p {
        if !g.iter().any(|(s, _)| s == sent) {
            tally(pred_rows, &[], &mut per_field);
        }
    }
    Ok(per_field)
}

impl EvalReport {
    fn from_documents(docs: BTreeMap<String, BTreeMap<Field, Counts>>) -> Self {
        let mut field_counts: BTreeMap<Field, Counts> = Field::ALL.iter().map(|&f| (f, Counts::default())).collect();
        let mut document_counts = BTreeMap::new();
        let mut counts = Counts::default();
        for (doc, fields) in docs {
            let mut doc_total = Counts::default();
            for (f, c) in fields {
                doc_total.add(c);
                field_counts.get_mut(&f).expect("all fields present").add(c);
            }
            counts.add(doc_total);
            document_counts.insert(doc, doc_total);
        }
        EvalReport {
            per_document: document_counts.iter().map(|(d, c)| (d.clone(), c.scores())).collect(),
            per_field: field_counts.iter().map(|(f, c)| (*f, c.scores())).collect(),
            aggregate: counts.scores(),
            counts,
            field_counts,
            document_counts,
        }
    }

    /// Field counts behind [`EvalReport::per_field`].
    pub fn field_counts(&self, f: Field) -> Counts {
        self.field_counts.get(&f).copied().unwrap_or_default()
    }

    pub fn document_counts(&self, doc_id: &str) -> Option<Counts> {
        self.document_counts.get(doc_id).copied()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports always serialize");
        out.push(b'\n');
        out
    }

    /// Plain-text table: one line per document, per field and the aggregate.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, name: &str, s: &Scores| {
            let _ = writeln!(out, "{name:<24} {:>9.4} {:>9.4} {:>9.4}", s.precision, s.recall, s.f1);
        };
        let _ = writeln!(out, "{:<24} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1");
        for (d, s) in &self.per_document {
            line(&mut out, &format!("doc {}", if d.is_empty() { "-" } else { d }), s);
        }
        for (f, s) in &self.per_field {
            line(&mut out, &format!("field {f:?}"), s);
        }
        line(&mut out, "aggregate", &self.aggregate);
        let c = &self.counts;
        let _ = writeln!(
            out,
            "matched {} / predicted {} / gold {}",
            c.matched_fields, c.predicted_fields, c.gold_fields
        );
        out
    }
}

/// Scores one predicted document against its gold table.
pub fn score(pred: &ClauseTable, gold: &ClauseTable) -> Result<EvalReport, EvalError> {
    score_documents(&[(pred, gold)])
}

/// Scores several document pairs; aggregates are micro-averaged over fields.
pub fn score_documents(pairs: &[(&ClauseTable, &ClauseTable)]) -> Result<EvalReport, EvalError> {
    let mut docs = BTreeMap::new();
    for (pred, gold) in pairs {
        let fields = document_fields(pred, gold)?;
        let entry: &mut BTreeMap<Field, Counts> = docs.entry(gold.doc_id.clone()).or_default();
        for (f, c) in fields {
            entry.entry(f).or_default().add(c);
        }
    }
    Ok(EvalReport::from_documents(docs))
}
