use serde::{Deserialize, Serialize};

use super::coupling::BuildOptions;
use super::params::{plan_parameters, PlanOptions};
use super::spec::{assemble, PerturbationSpec};
use crate::diophantine::FrequencyVector;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::frame::{complete_frame, lattice, orthogonal_partner};
use crate::numeric::linear_fit;

/// Settings shared by every build of a scaling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingOptions {
    pub eps_size: f64,
    pub plan: PlanOptions,
    pub build: BuildOptions,
    /// Search radius (in units of |k|) for the orthogonal partner when d ≥ 3.
    pub partner_radius: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            eps_size: 1e-3,
            plan: PlanOptions::default(),
            build: BuildOptions::escalating(),
            partner_radius: 2.0,
        }
    }
}

/// Plans and assembles the perturbation for one resonance vector.
pub fn build_for(
    omega: &FrequencyVector,
    k: &[i64],
    tau: f64,
    eps_exp: f64,
    eps_size: f64,
    plan: &PlanOptions,
    build: &BuildOptions,
    partner_radius: f64,
) -> Result<PerturbationSpec> {
    let omega1 = omega.dot(k)?;
    let kp = orthogonal_partner(k, omega, partner_radius)?;
    let frame = complete_frame(k, &kp)?;
    let k_sq = lattice::norm_sq(k) as i64;
    let params = plan_parameters(omega.dim(), tau, eps_exp, eps_size, omega1, k_sq, plan)?;
    assemble(&params, &frame, build)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub k: Vec<i64>,
    pub k_norm: f64,
    pub omega1: f64,
    pub m_planned: usize,
    pub m: usize,
    pub jackson_degree: usize,
    /// Measured degree N of the assembled perturbation.
    pub degree: f64,
    /// (2M+1)|k| with the planned M.
    pub planned_budget: f64,
    pub within_budget: bool,
    /// One norm per requested order.
    pub norms: Vec<f64>,
    pub mu: f64,
    pub mu_from_norm: f64,
    pub mu_from_alpha: f64,
    /// The two μ definitions differ by more than a factor 10.
    pub mu_disagree: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub r: f64,
    /// Fitted slope of ln‖P‖_{C^r} against ln|k|.
    pub slope: f64,
    /// −(2d + 2τ − ε_exp − r).
    pub predicted: f64,
    pub relative_deviation: f64,
    /// Fitted slope of ln N against ln ε_size, with ε_size the measured norm.
    pub degree_slope: f64,
    /// Same fit using the planned budget (2M+1)|k|.
    pub budget_slope: f64,
    /// −(d + τ + 1)/(2d + 2τ − r).
    pub degree_predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub d: usize,
    pub tau: f64,
    pub eps_exp: f64,
    pub r_list: Vec<f64>,
    pub rows: Vec<ScalingRow>,
    pub fits: Vec<ScalingFit>,
}

fn failed_row(k: &[i64], err: &Error) -> ScalingRow {
    ScalingRow {
        k: k.to_vec(),
        k_norm: (lattice::norm_sq(k) as f64).sqrt(),
        omega1: f64::NAN,
        m_planned: 0,
        m: 0,
        jackson_degree: 0,
        degree: f64::NAN,
        planned_budget: f64::NAN,
        within_budget: false,
        norms: Vec::new(),
        mu: f64::NAN,
        mu_from_norm: f64::NAN,
        mu_from_alpha: f64::NAN,
        mu_disagree: false,
        error: Some(err.to_string()),
    }
}

/// Builds P for each resonance vector, records its norms and fits the
/// power laws in |k|. Builds run in parallel.
pub fn norm_scaling_report(
    omega: &FrequencyVector,
    tau: f64,
    eps_exp: f64,
    r_list: &[f64],
    k_sequence: &[Vec<i64>],
    opts: &ScalingOptions,
) -> Result<ScalingReport> {
    let d = omega.dim();
    if k_sequence.len() < 3 {
        return Err(Error::InsufficientSequence {
            usable: k_sequence.len(),
        });
    }
    let rows: Vec<ScalingRow> = exec::map_slice(ExecMode::best(), k_sequence, |k| {
        let built = build_for(omega, k, tau, eps_exp, opts.eps_size, &opts.plan, &opts.build, opts.partner_radius)
            .and_then(|spec| {
                let norms = r_list.iter().map(|&r| spec.holder_norm(r).map(|n| n.value)).collect::<Result<Vec<_>>>()?;
                Ok((spec, norms))
            });
        match built {
            Err(e) => failed_row(k, &e),
            Ok((spec, norms)) => {
                let p = &spec.params;
                let planned_budget = (2 * p.m_planned + 1) as f64 * p.k_norm;
                let mu_from_norm = p.mu_from_norm.unwrap_or(f64::NAN);
                let ratio = mu_from_norm / p.mu_from_alpha;
                ScalingRow {
                    k: k.clone(),
                    k_norm: p.k_norm,
                    omega1: p.omega1,
                    m_planned: p.m_planned,
                    m: p.m,
                    jackson_degree: p.jackson_degree,
                    degree: spec.degree(),
                    planned_budget,
                    within_budget: spec.within_budget(),
                    norms,
                    mu: p.mu.unwrap_or(f64::NAN),
                    mu_from_norm,
                    mu_from_alpha: p.mu_from_alpha,
                    mu_disagree: !(0.1..=10.0).contains(&ratio),
                    error: None,
                }
            }
        }
    });

    let mut fits = Vec::with_capacity(r_list.len());
    for (i, &r) in r_list.iter().enumerate() {
        let usable: Vec<&ScalingRow> = rows
            .iter()
            .filter(|row| row.error.is_none() && row.norms[i].is_finite() && row.norms[i] > 0.0)
            .collect();
        if usable.len() < 3 {
            return Err(Error::InsufficientSequence { usable: usable.len() });
        }
        let ln_k: Vec<f64> = usable.iter().map(|row| row.k_norm.ln()).collect();
        let ln_norm: Vec<f64> = usable.iter().map(|row| row.norms[i].ln()).collect();
        let ln_n: Vec<f64> = usable.iter().map(|row| row.degree.ln()).collect();
        let ln_budget: Vec<f64> = usable.iter().map(|row| row.planned_budget.ln()).collect();
        let (slope, _) = linear_fit(&ln_k, &ln_norm);
        let (degree_slope, _) = linear_fit(&ln_norm, &ln_n);
        let (budget_slope, _) = linear_fit(&ln_norm, &ln_budget);
        let df = d as f64;
        let predicted = -(2.0 * df + 2.0 * tau - eps_exp - r);
        fits.push(ScalingFit {
            r,
            slope,
            predicted,
            relative_deviation: ((slope - predicted) / predicted).abs(),
            degree_slope,
            budget_slope,
            degree_predicted: -(df + tau + 1.0) / (2.0 * df + 2.0 * tau - r),
        });
    }
    Ok(ScalingReport {
        d,
        tau,
        eps_exp,
        r_list: r_list.to_vec(),
        rows,
        fits,
    })
}
