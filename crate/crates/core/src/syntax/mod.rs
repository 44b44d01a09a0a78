//! Signatures, terms, parsing and printing.

pub mod parser;
pub mod signature;
pub mod term;

pub use parser::{parse_inequality, parse_term, ParseError};
pub use signature::{
    residual_shape, ConnectiveDecl, Connective, Family, OrderType, Origin, Polarity, Signature,
    SignatureError,
};
pub use term::{syntactic_closed, syntactic_open, Inequality, Occurrence, Path, QuasiInequality, Side, Sign, Term};
