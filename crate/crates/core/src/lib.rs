//! Constructive ALBA for lattice expansions: syntax, signed generation trees,
//! inductive-inequality classification, the rewrite engine, and finite models
//! used as executable semantics.

pub mod classify;
pub mod corpus;
pub mod engine;
pub mod gentree;
pub mod models;
pub mod syntax;

pub use classify::{find_inductive_certificate, is_definite, is_inductive, is_sahlqvist, Certificate, Verdict};
pub use gentree::{analyze_branch, build_signed_tree, critical_occurrences, uniform_sign, NodeClass, SignedTree};
pub use syntax::{parse_inequality, parse_term, Inequality, Polarity, Sign, Signature, Term};
