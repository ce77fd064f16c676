//! Exact arithmetic over local fields, Cartan classification in Sp4, the
//! explicit coset families and finite-group norm bounds used to certify
//! decay of radial multipliers, and the resulting zig-zag decay profiles.

pub mod error;
pub mod localfield;
pub mod symplectic;
pub mod constructions;
pub mod finitegroups;

pub use error::{Error, Result};
pub mod decay;
