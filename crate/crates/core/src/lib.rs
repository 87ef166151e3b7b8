//! Numerical laboratory for resonances of finite-rank Friedrichs models.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod error;
pub mod hardy;
pub mod json;
pub mod linalg;
pub mod livsic;
pub mod model;
pub mod oracle;
pub mod ratfun;
pub mod resonances;
pub mod scattering;
pub mod scalar;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerances::{with_tolerances, Tolerances};

pub type Poly64 = ratfun::Poly<f64>;
pub type RatFun64 = ratfun::RatFun<f64>;
pub type RatMat64 = ratfun::RatMat<f64>;
pub type PoleRecord64 = ratfun::PoleRecord<f64>;
