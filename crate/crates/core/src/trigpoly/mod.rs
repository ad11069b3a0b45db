//! Periodic function toolkit: smooth bumps, Jackson approximation with
//! certified error bounds, Bernstein checks and Hölder norms.

mod format;
mod jackson;
mod norm;
mod periodic;
mod poly;
pub(crate) mod spectrum;

pub use format::{fmt_real, read_trigpoly, write_trigpoly, TrigPolyFile};
pub use jackson::{
    boolean_order, certified_constant, jackson, kernel_coefficients, kernel_power, multipliers, sup_error,
    JacksonApprox, JacksonInfo,
};
pub use norm::{
    bernstein_verify, eval_on_grid, holder_norm, multi_indices, refinement_check, BernsteinReport, NormMethod,
    NormReport, Normed, DEFAULT_GRID,
};
pub use periodic::{bump, wrap, DerivativeFn, PeriodicFn, Smoothness};
pub use poly::{Term, TrigPoly};
