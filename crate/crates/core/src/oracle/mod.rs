//! Independent numerical oracles: quadrature, oscillatory transforms, zero counting.
//!
//! Nothing here calls the Cauchy-transform or residue-summing paths used by
//! the analysis modules.

mod argument;
mod expint;
mod oscillatory;
mod quad;

pub use argument::{argument_principle_count, Contour};
pub use expint::scaled_e1;
pub use oscillatory::{quad_oscillatory, quad_oscillatory_half};
pub use quad::{quad_half_line, quad_interval, quad_real_line, DecayHint, QuadResult, QuadTol};
