//! Combinatorial core of tropical moduli and Teichmüller spaces of curves.
//!
//! The crate covers stable weighted graphs and their edge contractions,
//! exact free-group arithmetic (Nielsen reduction, simultaneous conjugacy),
//! markings of graphs of groups by free groups, diagrams of orthant cones
//! with their coarse spaces, and dual tropical curves of stable models.

pub mod canon;
pub mod cone_complex;
pub mod contraction;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod free_group;
pub mod graph;
pub mod marking;
pub mod moduli;
pub mod tropicalize;

pub use error::{Error, Result};
pub use exec::Exec;
