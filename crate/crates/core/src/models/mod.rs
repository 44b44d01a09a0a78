//! Finite lattice expansions as executable semantics.
//!
//! A finite lattice is its own canonical extension, so nominals and
//! conominals range over the whole carrier in every check below.

pub mod enumerate;
pub mod eval;
pub mod lattice;
pub mod laws;
pub mod lemmas;
pub mod model;

use thiserror::Error;

pub use enumerate::{enumerate_lattices, unary_maps, ModelPool};
pub use eval::{check_validity, equivalence_oracle, eval, Assignment, OracleVerdict, Validity};
pub use lattice::{Elem, Lattice};
pub use lemmas::{ackermann_sides, distribution_holds, sac_instances, AckermannSide};
pub use laws::{adjunction_biconditionals, normalization_identities, quasi_perfect_laws, sigma_pi_degeneracy};
pub use model::{interpret_expanded, parse_model, validate_model, FiniteLE, OpTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("law violated by `{connective}` in coordinate {coordinate}: {witness}")]
    LawViolation { connective: String, coordinate: usize, witness: String },
    #[error("no extremal adjoint for `{connective}`: {witness}")]
    AdjointMissing { connective: String, witness: String },
    #[error("missing or malformed table for `{0}`")]
    BadTable(String),
    #[error("unbound atom `{0}`")]
    UnboundAtom(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}
