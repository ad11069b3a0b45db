use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Upper limit on the Jackson order; beyond it double precision is exhausted.
pub const KAPPA_CAP: u32 = 40;

/// Knobs for [`plan_parameters`]; every implied constant defaults to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanOptions {
    /// Smoothness exponent α (κ = α/ε_exp).
    pub alpha: f64,
    /// Norm order r used for the predicted |k| and degree budget.
    pub r: f64,
    pub kappa_cap: u32,
    /// Multiplier on R_n = |ω₁|/|k|^(1+ε).
    pub radius_multiplier: f64,
    /// Multiplier on M = |k|^(1+ε)/|ω₁|^(1−ε).
    pub degree_multiplier: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            r: 0.0,
            kappa_cap: KAPPA_CAP,
            radius_multiplier: 1.0,
            degree_multiplier: 1.0,
        }
    }
}

/// All construction parameters of one perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub d: usize,
    pub tau: f64,
    pub eps_exp: f64,
    pub eps_size: f64,
    pub alpha: f64,
    /// Pendulum exponent a = 2d + 2τ − 2 − ε_exp.
    pub a: f64,
    /// Normalization exponent s0 = 2d + 2τ.
    pub s0: f64,
    pub kappa: u32,
    /// round(α/ε_exp) before capping.
    pub kappa_requested: u32,
    pub k_norm: f64,
    /// |k|² as an exact integer.
    pub k_norm_sq: i64,
    pub omega1: f64,
    /// Bump radius R_n.
    pub radius: f64,
    /// Degree parameter M from the formula (times the configured multiplier).
    pub m_planned: usize,
    /// Degree parameter M actually used (after any escalation).
    pub m: usize,
    /// Degree of the Jackson factor g.
    pub jackson_degree: usize,
    /// Measured μ_n = max|T| off the support of the bump product.
    pub mu: Option<f64>,
    /// M^(−κ)·‖φ‖_{C^κ}.
    pub mu_from_norm: Option<f64>,
    /// |ω₁|^α.
    pub mu_from_alpha: f64,
    /// Assembled Euclidean degree N.
    pub n_degree: Option<f64>,
    /// Norm order used for the predictions below.
    pub r: f64,
    /// ε_size^(−1/(2d+2τ−ε_exp−r)).
    pub predicted_k_norm: f64,
    /// ε_size^(−(d+τ+1)/(2d+2τ−r)).
    pub predicted_n_budget: f64,
    pub warnings: Vec<String>,
}

impl PerturbationParams {
    /// ⌊(2M+1)·|k|⌋, the largest admissible integer degree.
    pub fn degree_budget(&self) -> f64 {
        (2 * self.m + 1) as f64 * self.k_norm
    }

    /// Exact check N² ≤ (2M+1)²|k|² for a degree given by its square.
    pub fn within_budget(&self, n_sq: i128) -> bool {
        let lhs = (2 * self.m as i128 + 1).pow(2) * self.k_norm_sq as i128;
        n_sq <= lhs
    }

    /// Pendulum coefficient |k|^(−(a+2)).
    pub fn pendulum_coefficient(&self) -> f64 {
        self.k_norm.powf(-(self.a + 2.0))
    }

    /// Pendulum strength g = |k|^(−a) of the rescaled Lagrangian.
    pub fn pendulum_strength(&self) -> f64 {
        self.k_norm.powf(-self.a)
    }
}

/// Fills every derived parameter with the implied constants set to 1
/// (or to the multipliers in `opts`).
pub fn plan_parameters(
    d: usize,
    tau: f64,
    eps_exp: f64,
    eps_size: f64,
    omega1: f64,
    k_norm_sq: i64,
    opts: &PlanOptions,
) -> Result<PerturbationParams> {
    if d < 2 {
        return domain("perturbations need d >= 2");
    }
    if !(eps_exp > 0.0 && eps_exp < 0.5) {
        return domain(format!("eps_exp must lie in (0, 1/2), got {eps_exp}"));
    }
    if !(tau >= 0.0) {
        return domain("tau must be nonnegative");
    }
    if !(eps_size > 0.0) {
        return domain("eps_size must be positive");
    }
    if !(opts.alpha >= 2.0) {
        return domain("alpha must be at least 2");
    }
    if omega1 == 0.0 {
        return domain("exact resonance; change k");
    }
    if k_norm_sq < 1 {
        return domain("resonance vector must be nonzero");
    }
    let df = d as f64;
    let k_norm = (k_norm_sq as f64).sqrt();
    let w1 = omega1.abs();
    let a = 2.0 * df + 2.0 * tau - 2.0 - eps_exp;
    let s0 = 2.0 * df + 2.0 * tau;
    let kappa_requested = (opts.alpha / eps_exp).round().max(2.0) as u32;
    let mut warnings = Vec::new();
    let kappa = if kappa_requested > opts.kappa_cap {
        warnings.push(format!(
            "kappa = {kappa_requested} capped at {}; the asymptotic regime is out of reach",
            opts.kappa_cap
        ));
        opts.kappa_cap
    } else {
        kappa_requested
    };
    let scale = k_norm.powf(1.0 + eps_exp);
    let radius = opts.radius_multiplier * w1 / scale;
    if !(radius > 0.0 && radius < std::f64::consts::PI) {
        return domain(format!("bump radius {radius} outside (0, pi)"));
    }
    let m = ((opts.degree_multiplier * scale / w1.powf(1.0 - eps_exp)).round() as usize).max(1);
    let r = opts.r;
    let predicted_k_norm = eps_size.powf(-1.0 / (2.0 * df + 2.0 * tau - eps_exp - r));
    let predicted_n_budget = eps_size.powf(-(df + tau + 1.0) / (2.0 * df + 2.0 * tau - r));
    Ok(PerturbationParams {
        d,
        tau,
        eps_exp,
        eps_size,
        alpha: opts.alpha,
        a,
        s0,
        kappa,
        kappa_requested,
        k_norm,
        k_norm_sq,
        omega1,
        radius,
        m_planned: m,
        m,
        jackson_degree: m,
        mu: None,
        mu_from_norm: None,
        mu_from_alpha: w1.powf(opts.alpha),
        n_degree: None,
        r,
        predicted_k_norm,
        predicted_n_budget,
        warnings,
    })
}
