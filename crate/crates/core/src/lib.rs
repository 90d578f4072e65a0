//! Extraction of normative clauses from dependency-parsed contract text.
//!
//! Sentences come in as CoNLL-U ([`depgraph`]), pass through structural
//! [`rules`] and lexicon-driven [`heuristics`], and come out as a
//! [`clause_table::ClauseTable`]. Tables can be scored against a gold
//! standard ([`evaluate`]) or folded into a contract model ([`codiagram`]).

pub mod clause_table;
pub mod codiagram;
pub mod depgraph;
pub mod evaluate;
pub mod heuristics;
pub mod normalize;
pub mod rules;
