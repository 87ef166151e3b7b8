//! Rational functions and rational matrix functions of one complex variable.

mod cauchy;
mod function;
mod matrix;
mod poly;
mod roots;

pub use cauchy::{cauchy_transform, laurent_leading, line_integral, Branch, PoleRecord};
pub use function::{PartialFractions, Pole, PrincipalPart, RatFun};
pub use matrix::RatMat;
pub use poly::Poly;
pub use roots::poly_roots;
