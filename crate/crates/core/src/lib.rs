//! Exactly solvable radial Dirac problems obtained by a rotation of the
//! spinor basis together with a gauge-fixing condition on the even
//! potential, plus the numerical tools used to check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod error;
pub mod numerics;
pub mod scalar;
pub mod so21;
pub mod solutions;
pub mod specialfn;
pub mod superalgebra;
pub mod xpct;

pub use error::{Error, Result};
pub use scalar::{Jet, Real, Scalar};

/// Double-precision radial grid.
pub type Grid = numerics::RadialGrid<f64>;
/// Double-precision tridiagonal operator.
pub type Tridiagonal = numerics::TridiagonalOperator<f64>;
