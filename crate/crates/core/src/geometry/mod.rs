//! Coordinates, potentials and Kahler data of the local model.

pub mod metric;
pub mod params;
pub mod potential;
pub mod stein;
pub mod sympoint;

pub use metric::{kahler_factor, liouville_vector_field, symplectic_form, w_metric_factor, TangentVector};
pub use params::{SmoothingMode, SteinParams, CUTOFF_INNER_RATIO};
pub use potential::{phi_1d, phi_sym_smoothed, phi_sym_unsmoothed, smoothed_norm, RadialProfile};
pub use stein::{check_psh, glue_d1, glue_dn, phi_d1, phi_dn, D1Profile, DnPotential, Rect};
pub use sympoint::{complex, ComplexValue, SymPoint};
