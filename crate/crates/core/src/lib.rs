//! Exact differential algebra for scalar evolution equations `u_t = K`.
//!
//! Expressions are canonical rational functions over ℚ in the jet
//! coordinates, so every identity check is an exact zero test.

pub mod error;
pub mod expr;
pub mod jet;
pub mod kawahara;
pub mod psd;
pub mod symmetry;

pub use error::{Error, Result};
pub use expr::{FunctionSpec, Generator, JetExpr};
pub use jet::{EvolutionEquation, Order};
pub use psd::{Degree, PsdSeries};
