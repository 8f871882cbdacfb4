//! Recovery of curves and cyclic covers of the projective line from
//! information about their L-functions.

pub mod acceptance;
pub mod arith;
pub mod artin_schreier;
pub mod cli;
pub mod conditions;
pub mod cover;
pub mod curve_recovery;
pub mod error;
pub mod field;
pub mod oracle;
pub mod place_sums;
pub mod poly;
pub mod power_sums;

pub use error::{Error, Result};
pub use field::{build_field, Elem, FieldTower, Gf, Level, MuElement};
pub use poly::{BivariatePoly, Poly};
