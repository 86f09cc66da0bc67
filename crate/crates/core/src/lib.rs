//! Term calculus for an E-infinity prop on three generators.
//!
//! Elements are linear combinations of graphs built from a counit, a
//! coproduct and a degree one product. The crate rewrites them modulo the
//! defining relations, compares the rewritten forms with the surjection
//! operad, lets them act on normalized chains of simplicial sets and uses
//! the resulting cup-i products to compute Steenrod squares.

pub mod coeff;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod normalize;
pub mod simplicial;
pub mod steenrod;
pub mod surjection;
pub mod verify;
pub mod cli;

pub use coeff::{Coefficient, LinCombo, Ring};
pub use error::{Error, Result};
pub use graph::{GraphTerm, Generator, PropElement};
