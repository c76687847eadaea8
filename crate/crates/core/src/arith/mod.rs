//! Exact scalars, dense matrices and echelon forms.

pub mod echelon;
pub mod matrix;
pub mod prime;
pub mod rational;

pub use echelon::{dvr_echelon, saturate, solve_mixed, DvrEchelon};
pub use matrix::{Matrix, Vector};
pub use prime::Prime;
pub use rational::{Rational, Valuation};
