//! Explicit perturbations P(x) = c·(1 − cos⟨k,x⟩) + |k|^(−2)·v(⟨k,x⟩, ⟨k',x⟩)
//! built around a near-resonance k, their parameter laws, norms and degree
//! budgets.

mod coupling;
mod params;
mod scaling;
mod spec;

pub use coupling::{
    build_coupling, build_v, jackson_degree_for, BuildOptions, Coupling, EscalationStep, ThresholdReport,
};
pub use params::{plan_parameters, PerturbationParams, PlanOptions, KAPPA_CAP};
pub use scaling::{build_for, norm_scaling_report, ScalingFit, ScalingOptions, ScalingReport, ScalingRow};
pub use spec::{assemble, assemble_p, DominanceReport, LocalizationReport, PerturbationSpec, SpecHeader};
