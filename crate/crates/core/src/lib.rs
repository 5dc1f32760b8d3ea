//! Numerical local model for sectorial decompositions of symmetric squares of
//! surfaces, plus the combinatorics of the global decomposition.

pub mod error;
pub mod flow;
pub mod geometry;
pub mod ode;
pub mod sector;
pub mod surface;
