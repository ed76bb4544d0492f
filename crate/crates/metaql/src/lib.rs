//! Answers conjunctive SPARQL queries over OWL 2 QL ontologies where classes
//! and roles may themselves occur as individuals (metamodeling).
//!
//! The pipeline: parse an ontology and a query, split the ontology into an
//! ontology side and a rule side according to a [`partition::Variant`],
//! translate the rule side plus the query into Datalog, bridge the two sides
//! by importing facts entailed by the ontology side, and evaluate the
//! resulting program with a semi-naive Datalog engine (optionally restricted
//! by a magic-sets transformation).

pub mod bench;
pub mod datalog;
pub mod encode;
pub mod generate;
pub mod hybrid;
pub mod locality;
pub mod model;
pub mod parse;
pub mod partition;

pub use model::{AnswerTable, Axiom, BasicConcept, Iri, Ontology, Query, RhsConcept, RoleExpr};
pub use parse::{qlf::parse_ontology, qlf::print_ontology, sparql::parse_query, ParseError};

/// Top-level failure of a pipeline run.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("ontology is inconsistent: every tuple is an answer")]
    Inconsistent,
}
