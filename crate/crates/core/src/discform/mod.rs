//! Discriminant forms, genus symbols and the Milgram signature.

mod form;
mod gauss;
mod jordan;
pub mod primes;
mod realize;
mod symbol;

use thiserror::Error;

pub use form::{
    discriminant_form, discriminant_form_with_generators, fqf_isomorphic, fqf_isomorphic_bounded, Elements,
    FiniteQuadraticForm,
};
pub use gauss::signature_mod8;
pub use jordan::{genus_symbol, symbol_of_form};
pub use realize::{symbol_signature_mod8, symbol_to_form};
pub use symbol::{canonicalize, format_symbol, parse_symbol, validate, GenusSymbol, Oddity, Sign, SymbolComponent};

use crate::intlinalg::LinalgError;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DiscError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("lattice is not even")]
    NotEven,
    #[error("form or lattice is degenerate")]
    Degenerate,
    #[error("invalid finite quadratic form: {0}")]
    InvalidForm(String),
    #[error("symbol syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("malformed symbol: {0}")]
    Malformed(String),
    #[error("unrealizable symbol: {0}")]
    Unrealizable(String),
    #[error("group order {order} exceeds the search bound {bound}")]
    OrderBound { order: u128, bound: u128 },
    #[error("numbers too large for the fixed-width evaluation")]
    TooLarge,
}

/// `-q` on the level of symbols: the symbol of the negated realizing form.
pub fn negate_symbol(sym: &GenusSymbol) -> Result<GenusSymbol, DiscError> {
    let neg = symbol::negate_raw(sym);
    canonicalize(&neg)
}
