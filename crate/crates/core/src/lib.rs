//! Exact truncated calculus for (a,b)-modules.
//!
//! The algebra generated by `a` and `b` with `ab − ba = b²`, modules over
//! power series in `b` truncated at a fixed order, their saturations,
//! Bernstein polynomials, monodromy filtrations and frescos.

pub mod abalg;
pub mod abmod;
pub mod error;
pub mod fresco;
pub mod linalg;
pub mod monodromy;
pub mod series;

pub use error::{Error, Result};
pub use series::{Rational, TruncSeries};
