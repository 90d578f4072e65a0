//! Contract model: clause tables folded into boxes and refinement nodes.

use serde::Serialize;

use crate::clause_table::{AnnotatedPhrase, ClauseRow, ClauseTable, Modality, Refinement, TableError};

/// One clause as a leaf box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoBox {
    pub id: String,
    pub modality: Modality,
    pub agent: String,
    pub action_verb: String,
    pub action_object: String,
    pub time_guards: Vec<String>,
    pub conditions: Vec<String>,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operator {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
    #[serde(rename = "SEQ")]
    Seq,
}

impl Operator {
    fn of(r: Refinement) -> Option<Operator> {
        match r {
            Refinement::None => None,
            Refinement::And => Some(Operator::And),
            Refinement::Or => Some(Operator::Or),
            Refinement::Seq => Some(Operator::Seq),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoRefinement {
    pub operator: Operator,
    pub children: Vec<CoNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoNode {
    Box(CoBox),
    Refinement(CoRefinement),
}

impl CoNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            CoNode::Box(_) => 1,
            CoNode::Refinement(r) => r.children.iter().map(CoNode::leaf_count).sum(),
        }
    }

    /// Refinement nodes in this subtree, pre-order.
    pub fn refinements(&self) -> Vec<&CoRefinement> {
        match self {
            CoNode::Box(_) => Vec::new(),
            CoNode::Refinement(r) => {
                let mut out = vec![r];
                for c in &r.children {
                    out.extend(c.refinements());
                }
                out
            }
        }
    }

    /// Leaf boxes in this subtree, left to right.
    pub fn boxes(&self) -> Vec<&CoBox> {
        match self {
            CoNode::Box(b) => vec![b],
            CoNode::Refinement(r) => r.children.iter().flat_map(CoNode::boxes).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoModel {
    pub doc_id: String,
    pub roots: Vec<CoNode>,
}

impl CoModel {
    pub fn leaf_count(&self) -> usize {
        self.roots.iter().map(CoNode::leaf_count).sum()
    }

    pub fn refinements(&self) -> Vec<&CoRefinement> {
        self.roots.iter().flat_map(CoNode::refinements).collect()
    }
}

fn phrases(list: &[AnnotatedPhrase]) -> impl Iterator<Item = String> + '_ {
    list.iter().map(ToString::to_string)
}

fn leaf(doc_id: &str, sentence: usize, index: usize, row: &ClauseRow) -> CoNode {
    CoNode::Box(CoBox {
        id: format!("{doc_id}:{sentence}:{index}"),
        modality: row.modality,
        agent: row.subject.clone(),
        action_verb: row.verb.clone(),
        action_object: row.object.clone(),
        time_guards: phrases(&row.time).collect(),
        conditions: phrases(&row.conditions).collect(),
        annotations: phrases(&row.notes).chain(phrases(&row.adverbials)).collect(),
    })
}

/// Folds each sentence's rows left to right. A run of the same operator
/// shares one node; a change of operator wraps everything so far.
pub fn build_model(table: &ClauseTable) -> Result<CoModel, TableError> {
    table.validate()?;
    let mut roots = Vec::new();
    for (s, group) in table.sentence_groups().into_iter().enumerate() {
        let mut acc = leaf(&table.doc_id, s + 1, 1, &group[0]);
        for (i, row) in group.iter().enumerate().skip(1) {
            let op = Operator::of(row.refinement).expect("validated: only the first row is unrefined");
            let next = leaf(&table.doc_id, s + 1, i + 1, row);
            acc = match acc {
                CoNode::Refinement(mut r) if r.operator == op => {
                    r.children.push(next);
                    CoNode::Refinement(r)
                }
                other => CoNode::Refinement(CoRefinement { operator: op, children: vec![other, next] }),
            };
        }
        roots.push(acc);
    }
    Ok(CoModel { doc_id: table.doc_id.clone(), roots })
}

/// Pretty JSON with a trailing newline. Field order is fixed by the types.
pub fn export_model(model: &CoModel) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(model).expect("models always serialize");
    out.push(b'\n');
    out
}
