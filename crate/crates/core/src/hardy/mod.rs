//! Discretized Hardy space, the characteristic semigroup and the spectral
//! constructions for its restriction to `T₊ = H²₊ ⊖ S N₊`.

mod basis;
mod grid;
mod theorem2;

pub use basis::{cayley_basis, h2_residual, BasisLabel, rational_inner_product, subspace_bases, Half, SubspaceBases};
pub use grid::{
    characteristic_semigroup, hardy_project, hardy_project_minus, Grid, GridFunction, DEFAULT_HALF_WIDTH,
    DEFAULT_POINTS, TAU_GRID,
};
pub use theorem2::{
    eigenvector_check, eigenvectors, resolvent_construct, CaseTag, Certificate, EigenReport, Eigenvector, ResolventReport,
    CERT_TOL,
};
