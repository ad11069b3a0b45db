//! Numerical evidence that action minimizers avoid the box around (π, 0).
//!
//! Each trial is a boundary value problem whose straight-line interpolant
//! passes exactly through the box centre. We minimize it, measure how close
//! the minimizer gets to the box, and compare two constrained problems: paths
//! forced through the centre against paths forced through (π, c ± π). The
//! verdict is evidence at fixed parameters and nothing more.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{lagrangian_from, LagrangianModel};
use super::path::{minimize_from, DiscretePath, MinimizeOptions};
use super::pendulum::pendulum_bvp;
use crate::error::{domain, Error, Result};
use crate::exec::{map_range, ExecMode};
use crate::numeric::brent_minimize;
use crate::perturbation::PerturbationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Avoids,
    Enters,
    Inconclusive,
}

/// The rectangle [π − R/2, π + R/2] × [−R/2, R/2] in (q₁, q₂), taken mod 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenBox {
    pub q1: [f64; 2],
    pub q2: [f64; 2],
}

impl ForbiddenBox {
    pub fn around_center(radius: f64) -> Self {
        Self {
            q1: [PI - 0.5 * radius, PI + 0.5 * radius],
            q2: [-0.5 * radius, 0.5 * radius],
        }
    }

    /// Euclidean distance from a lifted point to the nearest copy of the box;
    /// zero inside.
    pub fn distance(&self, q1: f64, q2: f64) -> f64 {
        let half1 = 0.5 * (self.q1[1] - self.q1[0]);
        let half2 = 0.5 * (self.q2[1] - self.q2[0]);
        let c1 = 0.5 * (self.q1[0] + self.q1[1]);
        let c2 = 0.5 * (self.q2[0] + self.q2[1]);
        let e1 = (centered(q1 - c1).abs() - half1).max(0.0);
        let e2 = (centered(q2 - c2).abs() - half2).max(0.0);
        e1.hypot(e2)
    }
}

/// Representative of x mod 2π in [−π, π).
fn centered(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DestructionOptions {
    pub trials: usize,
    /// Grid intervals per trial; chosen from the box size when absent.
    pub intervals: Option<usize>,
    pub seed: u64,
    pub horizon_jitter: f64,
    /// Passage-time search: tolerance relative to the horizon, and the
    /// evaluation budget.
    pub passage_tolerance: f64,
    pub passage_evaluations: usize,
    /// Multiplies the coupling. Values other than 1 are a demonstration only
    /// and force an inconclusive verdict.
    pub coupling_factor: f64,
    pub minimize: MinimizeOptions,
}

impl Default for DestructionOptions {
    fn default() -> Self {
        Self {
            trials: 32,
            intervals: None,
            seed: 0x5eed,
            horizon_jitter: 0.2,
            passage_tolerance: 1e-8,
            passage_evaluations: 40,
            coupling_factor: 1.0,
            minimize: MinimizeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub q2_start: f64,
    pub q2_end: f64,
    pub horizon: f64,
    pub intervals: usize,
    pub distance_to_box: f64,
    pub enters: bool,
    pub action: f64,
    pub grad_norm: f64,
    pub through_action: f64,
    pub through_passage: f64,
    pub detour_action: f64,
    pub detour_passage: f64,
    /// Detour action minus through-centre action.
    pub gap: f64,
    pub speed_deviation: f64,
}

/// Flags describing whether the build is inside the regime where a verdict
/// other than "inconclusive" is meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub thresholds_passed: bool,
    pub within_budget: bool,
    pub coupling_unmodified: bool,
}

impl RegimeFlags {
    pub fn ok(&self) -> bool {
        self.thresholds_passed && self.within_budget && self.coupling_unmodified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DestructionReport {
    pub forbidden_box: ForbiddenBox,
    pub trials: usize,
    pub min_distance_to_box: f64,
    /// Largest detour-minus-through gap over all trials.
    pub action_gap: f64,
    /// Smallest gap magnitude a verdict may rely on.
    pub action_resolution: f64,
    /// Rough size of the action change the coupling can cause in one crossing.
    pub coupling_signal: f64,
    pub speed_deviation: f64,
    pub speed_bound: f64,
    pub speed_ok: bool,
    pub regime: RegimeFlags,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub trial_reports: Vec<TrialReport>,
}

/// Runs the destruction test on the Lagrangian of an assembled perturbation.
/// `omega` is the frequency vector in resonant coordinates.
pub fn destruction_test(spec: &PerturbationSpec, omega: &[f64], opts: &DestructionOptions) -> Result<DestructionReport> {
    let model = lagrangian_from(spec).with_coupling_factor(opts.coupling_factor);
    let regime = RegimeFlags {
        thresholds_passed: spec.coupling.thresholds.passed,
        within_budget: spec.within_budget(),
        coupling_unmodified: opts.coupling_factor == 1.0,
    };
    let k_norm = spec.params.k_norm;
    run(&model, spec.params.radius, k_norm, omega, regime, opts)
}

/// The same test on the integrable model with the kinetic weights of `spec`:
/// straight lines are minimizers, so the verdict must be "enters".
pub fn destruction_test_integrable(
    spec: &PerturbationSpec,
    omega: &[f64],
    opts: &DestructionOptions,
) -> Result<DestructionReport> {
    let model = lagrangian_from(spec).integrable();
    let regime = RegimeFlags {
        thresholds_passed: true,
        within_budget: true,
        coupling_unmodified: true,
    };
    run(&model, spec.params.radius, spec.params.k_norm, omega, regime, opts)
}

/// The test on an arbitrary model, box radius and frequency.
pub fn destruction_test_model(
    model: &LagrangianModel,
    radius: f64,
    k_norm: f64,
    omega: &[f64],
    opts: &DestructionOptions,
) -> Result<DestructionReport> {
    let regime = RegimeFlags {
        thresholds_passed: true,
        within_budget: true,
        coupling_unmodified: true,
    };
    run(model, radius, k_norm, omega, regime, opts)
}

struct Trial {
    start: Vec<f64>,
    end: Vec<f64>,
    horizon: f64,
    intervals: usize,
}

fn run(
    model: &LagrangianModel,
    radius: f64,
    k_norm: f64,
    omega: &[f64],
    regime: RegimeFlags,
    opts: &DestructionOptions,
) -> Result<DestructionReport> {
    let d = model.d;
    if d < 2 || omega.len() != d {
        return Err(Error::Dimension {
            expected: d.max(2),
            got: omega.len(),
        });
    }
    if opts.trials == 0 {
        return domain("need at least one trial");
    }
    if !(omega[0] != 0.0 && omega[1] != 0.0) {
        return domain("the first two frequencies must be nonzero");
    }
    if !(radius > 0.0 && radius < PI) {
        return domain("box radius must lie in (0, pi)");
    }
    let forbidden_box = ForbiddenBox::around_center(radius);
    let base_horizon = TAU / omega[0].abs();
    let trials = sample_trials(omega, base_horizon, radius, opts);

    let results = map_range(ExecMode::best(), trials.len(), |j| run_trial(model, &forbidden_box, &trials[j], opts));
    let trial_reports: Vec<TrialReport> = results.into_iter().collect::<Result<_>>()?;

    let min_distance_to_box = trial_reports.iter().map(|t| t.distance_to_box).fold(f64::INFINITY, f64::min);
    let action_gap = trial_reports.iter().map(|t| t.gap).fold(f64::NEG_INFINITY, f64::max);
    let speed_deviation = trial_reports.iter().map(|t| t.speed_deviation).fold(0.0, f64::max);
    let speed_bound = 10.0 * k_norm.powf(-1.0 / 3.0);
    let max_action = trial_reports.iter().map(|t| t.action.abs()).fold(0.0, f64::max);
    let max_k = trial_reports.iter().map(|t| t.intervals).max().unwrap_or(1);
    let action_resolution = 4.0 * f64::EPSILON * max_action * (max_k as f64).sqrt();

    let coupling_peak = model
        .coupling
        .as_ref()
        .map_or(0.0, |c| c.scale * c.u.max_abs() * c.w.max_abs());
    let dwell = radius / omega[1].abs();
    let coupling_signal = model.overall_scale * coupling_peak * dwell;

    let all_clear = trial_reports.iter().all(|t| !t.enters);
    let any_enters = trial_reports.iter().any(|t| t.enters);
    let gaps_resolved = trial_reports.iter().all(|t| t.gap < -10.0 * action_resolution);
    let signal_resolvable = coupling_signal > 10.0 * action_resolution;
    let mut notes = Vec::new();
    let verdict = if !regime.ok() {
        notes.push("build is outside the regime where a verdict is meaningful".into());
        Verdict::Inconclusive
    } else if all_clear && gaps_resolved {
        Verdict::Avoids
    } else if any_enters && (coupling_peak == 0.0 || signal_resolvable) {
        Verdict::Enters
    } else {
        if !signal_resolvable && coupling_peak > 0.0 {
            notes.push(format!(
                "coupling signal {coupling_signal:.3e} is below the action resolution {action_resolution:.3e}"
            ));
        }
        if !gaps_resolved {
            notes.push(format!("largest detour-minus-through gap is {action_gap:.3e}, not negative"));
        }
        Verdict::Inconclusive
    };
    Ok(DestructionReport {
        forbidden_box,
        trials: trial_reports.len(),
        min_distance_to_box,
        action_gap,
        action_resolution,
        coupling_signal,
        speed_deviation,
        speed_bound,
        speed_ok: speed_deviation <= speed_bound,
        regime,
        verdict,
        notes,
        trial_reports,
    })
}

/// Stratified q₂ starts, jittered horizons, and end points chosen so that the
/// straight line hits (π, 2πn) at mid-horizon.
fn sample_trials(omega: &[f64], base_horizon: f64, radius: f64, opts: &DestructionOptions) -> Vec<Trial> {
    let d = omega.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dir = omega[0].signum();
    (0..opts.trials)
        .map(|j| {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            let horizon = base_horizon * (1.0 + opts.horizon_jitter * (2.0 * v - 1.0));
            let mut start = vec![0.0; d];
            start[1] = -PI + TAU * (j as f64 + u) / opts.trials as f64;
            let mut end: Vec<f64> = start.iter().zip(omega).map(|(s, w)| s + w * horizon).collect();
            end[0] = dir * TAU;
            let mid = 0.5 * (start[1] + end[1]);
            let target = TAU * (mid / TAU).round();
            end[1] += 2.0 * (target - mid);
            let intervals = opts.intervals.unwrap_or_else(|| {
                let dt = radius / (2.0 * omega[1].abs());
                let k = (horizon / dt).ceil() as usize;
                k.max(64)
            });
            Trial {
                start,
                end,
                horizon,
                intervals: intervals + intervals % 2,
            }
        })
        .collect()
}

/// Initial path: the pendulum solution in q₁ and linear motion elsewhere.
fn initial_path(model: &LagrangianModel, start: &[f64], end: &[f64], t_a: f64, t_b: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    let bvp = pendulum_bvp(model.pendulum_strength, start[0], end[0], t_a, t_b)?;
    let dt = bvp.times[1] - bvp.times[0];
    let n = bvp.q.len() - 1;
    Ok((0..=k)
        .map(|j| {
            let s = j as f64 / k as f64;
            let t = s * (t_b - t_a);
            let i = ((t / dt).floor() as usize).min(n - 1);
            let x = t / dt - i as f64;
            // Cubic Hermite interpolation of the RK4 samples.
            let (h00, h10, h01, h11) = (
                (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x),
                x * (1.0 - x) * (1.0 - x),
                x * x * (3.0 - 2.0 * x),
                x * x * (x - 1.0),
            );
            let mut p: Vec<f64> = start.iter().zip(end).map(|(a, b)| a + s * (b - a)).collect();
            p[0] = if j == 0 {
                start[0]
            } else if j == k {
                end[0]
            } else {
                h00 * bvp.q[i] + h10 * dt * bvp.qdot[i] + h01 * bvp.q[i + 1] + h11 * dt * bvp.qdot[i + 1]
            };
            p
        })
        .collect())
}

/// Minimal action over paths through `waypoint` at some time in the middle
/// of the horizon, searched with Brent's method. Both legs keep k/2 intervals
/// so the objective is smooth in the passage time and each solve can start
/// from the previous one.
fn forced_action(
    model: &LagrangianModel,
    trial: &Trial,
    waypoint: &[f64],
    opts: &DestructionOptions,
) -> Result<(f64, f64)> {
    let half = trial.intervals / 2;
    let t = trial.horizon;
    let mut warm: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = None;
    let mut objective = |tau: f64| -> Result<f64> {
        let (first, second) = match warm.take() {
            Some(paths) => paths,
            None => (
                initial_path(model, &trial.start, waypoint, 0.0, tau, half)?,
                initial_path(model, waypoint, &trial.end, tau, t, half)?,
            ),
        };
        let a = minimize_from(model, first, 0.0, tau, &opts.minimize)?;
        let b = minimize_from(model, second, tau, t, &opts.minimize)?;
        let value = a.action + b.action;
        warm = Some((a.points, b.points));
        Ok(value)
    };
    brent_minimize(&mut objective, 0.1 * t, 0.9 * t, opts.passage_tolerance * t, opts.passage_evaluations)
}

fn run_trial(model: &LagrangianModel, forbidden_box: &ForbiddenBox, trial: &Trial, opts: &DestructionOptions) -> Result<TrialReport> {
    let init = initial_path(model, &trial.start, &trial.end, 0.0, trial.horizon, trial.intervals)?;
    let path = minimize_from(model, init, 0.0, trial.horizon, &opts.minimize)?;
    let distance_to_box = path_distance(&path, forbidden_box);

    let center = waypoint(trial, 0.0);
    let (through_passage, through_action) = forced_action(model, trial, &center, opts)?;
    let mut detour = (f64::NAN, f64::INFINITY);
    for shift in [-PI, PI] {
        let candidate = forced_action(model, trial, &waypoint(trial, shift), opts)?;
        if candidate.1 < detour.1 {
            detour = candidate;
        }
    }
    Ok(TrialReport {
        q2_start: trial.start[1],
        q2_end: trial.end[1],
        horizon: trial.horizon,
        intervals: trial.intervals,
        distance_to_box,
        enters: distance_to_box == 0.0,
        action: path.action,
        grad_norm: path.grad_norm,
        through_action,
        through_passage,
        detour_action: detour.1,
        detour_passage: detour.0,
        gap: detour.1 - through_action,
        speed_deviation: speed_deviation(&path),
    })
}

/// (±π, c + shift, linear elsewhere) where c is the q₂ value at which the
/// straight line crosses the box centre.
fn waypoint(trial: &Trial, shift: f64) -> Vec<f64> {
    let mut p: Vec<f64> = trial.start.iter().zip(&trial.end).map(|(a, b)| 0.5 * (a + b)).collect();
    p[0] = 0.5 * trial.end[0];
    p[1] += shift;
    p
}

fn path_distance(path: &DiscretePath, forbidden_box: &ForbiddenBox) -> f64 {
    let mut best = f64::INFINITY;
    for w in path.points.windows(2) {
        best = best.min(forbidden_box.distance(w[0][0], w[0][1]));
        best = best.min(forbidden_box.distance(0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1])));
    }
    let last = path.points.last().expect("paths are nonempty");
    best.min(forbidden_box.distance(last[0], last[1]))
}

/// max over the non-resonant coordinates of |q̇ᵢ − mean q̇ᵢ|.
fn speed_deviation(path: &DiscretePath) -> f64 {
    let h = path.step();
    let d = path.points[0].len();
    (1..d)
        .map(|i| {
            let mean = path.rotation_estimate[i];
            path.points
                .windows(2)
                .map(|w| ((w[1][i] - w[0][i]) / h - mean).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
