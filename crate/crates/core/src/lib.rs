//! Exact 2-class numbers and unit indices of real quadratic and
//! multiquadratic fields, and the 2-class field tower bookkeeping that
//! decides the unramified pro-2 Galois group along the cyclotomic
//! Z_2-extension of `Q(sqrt pq, sqrt ps)`.

pub mod arithmetic;
pub mod budget;
pub mod classfield;
pub mod error;
pub mod multiquad;
pub mod quadratic;
pub mod store;
pub mod tower;
pub mod units;

pub use budget::StepBudget;
pub use error::{Error, Result};
