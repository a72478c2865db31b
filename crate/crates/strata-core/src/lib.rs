//! Exact tame local-field calculus over `F_q((t))`.
//!
//! The layers build on each other: [`residue`] (finite fields), [`tower`]
//! (tame towers and their embeddings), [`minimal`] (minimality, genericity,
//! Howe factorization), [`stratum`] (orders, strata, filtration indices,
//! group presentations), [`translate`] (stratum and datum skeletons) and
//! [`oracle`] (explicit matrices and lattices used to cross-check the rest).

pub mod error;
pub mod fuzz;
pub mod json;
pub mod minimal;
pub mod oracle;
pub mod residue;
pub mod stratum;
pub mod tower;
pub mod translate;

pub use error::{Error, Result};

/// Exact depths and normalized valuations.
pub type Rational = num_rational::Ratio<i64>;


pub use residue::{make_field, FqElem, FqField};

pub use tower::{base_field, extend, Embedding, Subfield, TameElement, TameField};

