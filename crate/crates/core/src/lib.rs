//! Exact p-adic submodule calculus, linear relations, double-coset products
//! and characteristic functions, with a finite-level Weil representation.

pub mod arith;
pub mod building;
pub mod charfn;
pub mod coset;
pub mod error;
pub mod module;
pub mod relation;
pub mod sample;
pub mod verify;
pub mod weil;

pub use arith::{Matrix, Prime, Rational, Valuation, Vector};
pub use coset::{coset_mul, BlockElement, SpBlockElement};
pub use error::{Error, Result};
pub use module::{Module, ModuleJson, SymplecticForm};
pub use relation::{Relation, RelationJson};
