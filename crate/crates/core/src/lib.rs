//! Intervention-intensity indices built from newspaper article counts, and
//! recursive structural VARs augmented with that index and with exogenous
//! global controls: estimation, impulse responses, variance
//! decompositions, residual-bootstrap bands and reduced-form long-run
//! effects.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bootstrap;
pub mod dynamics;
pub mod error;
pub mod factor;
pub mod index;
pub mod linalg;
pub mod regression;
pub mod svar;
pub mod timeseries;

pub use error::{Error, Result};
