use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::coupling::{build_coupling, BuildOptions, Coupling, EscalationStep, ThresholdReport};
use super::params::PerturbationParams;
use crate::error::{domain, Error, Result};
use crate::exec::{self, ExecMode};
use crate::frame::{lattice, ResonanceFrame};
use crate::trigpoly::spectrum::Spectrum;
use crate::trigpoly::{
    multi_indices, read_trigpoly, write_trigpoly, BernsteinReport, JacksonInfo, NormMethod, NormReport, Term,
    TrigPoly, DEFAULT_GRID,
};

/// The assembled perturbation together with everything needed to evaluate it.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub params: PerturbationParams,
    pub frame: ResonanceFrame,
    pub coupling: Coupling,
    /// Expanded v(q₁, q₂), present when small enough to materialize.
    pub v_poly: Option<TrigPoly>,
    /// Expanded P(x), present when small enough to materialize.
    pub p_poly: Option<TrigPoly>,
    /// Exact squared degree of P.
    pub degree_sq: i128,
    pub norm_table: Vec<NormReport>,
}

/// Grid-measured localization of v away from the bump box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub max_off_box: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Deviation of P from the pure pendulum term on {q₁ = π} away from the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub max_deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Builds P with default options (thresholds enforced, no escalation).
pub fn assemble_p(params: &PerturbationParams, frame: &ResonanceFrame) -> Result<PerturbationSpec> {
    assemble(params, frame, &BuildOptions::default())
}

pub fn assemble(params: &PerturbationParams, frame: &ResonanceFrame, opts: &BuildOptions) -> Result<PerturbationSpec> {
    if frame.dim() != params.d {
        return Err(Error::Dimension {
            expected: params.d,
            got: frame.dim(),
        });
    }
    if lattice::norm_sq(frame.k()) as i64 != params.k_norm_sq {
        return domain("frame resonance vector does not match the parameters");
    }
    let kp_sq = lattice::norm_sq(frame.k_prime()) as i64;
    let coupling = build_coupling(params, kp_sq, opts)?;
    from_coupling(params.clone(), frame.clone(), coupling, opts.term_cap)
}

fn from_coupling(
    mut params: PerturbationParams,
    frame: ResonanceFrame,
    coupling: Coupling,
    term_cap: usize,
) -> Result<PerturbationSpec> {
    let k_sq = params.k_norm_sq as i128;
    let kp_sq = lattice::norm_sq(frame.k_prime());
    let (u_deg, w_deg) = coupling.max_freqs();
    let degree_sq = k_sq.max(u_deg as i128 * u_deg as i128 * k_sq + w_deg as i128 * w_deg as i128 * kp_sq);

    params.m = coupling.m;
    params.jackson_degree = coupling.jackson_degree;
    params.mu = Some(coupling.thresholds.mu);
    params.n_degree = Some((degree_sq as f64).sqrt());
    let mu_norm = (coupling.m as f64).powi(-(params.kappa as i32)) * coupling.jackson.norm_ck;
    params.mu_from_norm = Some(mu_norm);
    let ratio = mu_norm / params.mu_from_alpha;
    if !(0.1..=10.0).contains(&ratio) {
        let note = format!(
            "mu definitions disagree: M^-kappa*|phi|_C^kappa = {mu_norm:.3e}, |w1|^alpha = {:.3e}",
            params.mu_from_alpha
        );
        if !params.warnings.contains(&note) {
            params.warnings.push(note);
        }
    }
    if !params.within_budget(degree_sq) {
        return domain(format!(
            "assembled degree {} exceeds the budget (2M+1)|k| = {}",
            (degree_sq as f64).sqrt(),
            params.degree_budget()
        ));
    }

    let v_poly = coupling.to_trigpoly(term_cap)?;
    let p_poly = match &v_poly {
        Some(v) => {
            let rows = vec![frame.k().to_vec(), frame.k_prime().to_vec()];
            let c = params.pendulum_coefficient();
            let pend = TrigPoly::new(
                params.d,
                vec![
                    Term { freq: vec![0; params.d], cos: c, sin: 0.0 },
                    Term { freq: frame.k().to_vec(), cos: -c, sin: 0.0 },
                ],
            )?;
            let coupled = v.compose_linear(&rows)?.scale(1.0 / params.k_norm_sq as f64);
            let p = pend.add(&coupled)?;
            debug_assert!(p.degree_sq() <= degree_sq);
            Some(p)
        }
        None => None,
    };
    Ok(PerturbationSpec {
        params,
        frame,
        coupling,
        v_poly,
        p_poly,
        degree_sq,
        norm_table: Vec::new(),
    })
}

/// Coefficients of Π_i (k_i·X + k'_i·Y)^(α_i), indexed by the power of Y.
fn direction_coefficients(k: &[i64], kp: &[i64], alpha: &[u32]) -> Vec<f64> {
    let mut c: Vec<i128> = vec![1];
    for ((&a, &ki), &kpi) in alpha.iter().zip(k).zip(kp) {
        for _ in 0..a {
            let mut next = vec![0i128; c.len() + 1];
            for (b, &v) in c.iter().enumerate() {
                next[b] += v * ki as i128;
                next[b + 1] += v * kpi as i128;
            }
            c = next;
        }
    }
    c.into_iter().map(|v| v as f64).collect()
}

/// s-th derivative of 1 − cos q.
fn pendulum_derivative(q: f64, s: usize) -> f64 {
    match s {
        0 => 1.0 - q.cos(),
        _ => match s % 4 {
            1 => q.sin(),
            2 => q.cos(),
            3 => -q.sin(),
            _ => -q.cos(),
        },
    }
}

fn sample_grid_size(deg: i64) -> usize {
    (8 * deg.max(1) as usize).max(DEFAULT_GRID).next_power_of_two()
}

impl PerturbationSpec {
    pub fn dim(&self) -> usize {
        self.params.d
    }

    /// (⟨k,x⟩, ⟨k',x⟩).
    pub fn q_coords(&self, x: &[f64]) -> (f64, f64) {
        let dot = |r: &[i64]| r.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
        (dot(self.frame.k()), dot(self.frame.k_prime()))
    }

    /// P expressed in the resonant coordinates.
    pub fn eval_q(&self, q1: f64, q2: f64) -> f64 {
        self.params.pendulum_coefficient() * (1.0 - q1.cos())
            + self.coupling.eval(q1, q2) / self.params.k_norm_sq as f64
    }

    /// P(x) by composition: first q, then the pendulum and coupling factors.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let (q1, q2) = self.q_coords(x);
        self.eval_q(q1, q2)
    }

    pub fn degree(&self) -> f64 {
        (self.degree_sq as f64).sqrt()
    }

    pub fn within_budget(&self) -> bool {
        self.params.within_budget(self.degree_sq)
    }

    /// sup over the q-torus of |D^α_x P|, with D^α_x = Π (k_i∂₁ + k'_i∂₂)^(α_i).
    ///
    /// Rows in q₁ are visited in order of decreasing upper bound and the scan
    /// stops once no remaining row can beat the best value found. The bound
    /// for a row is |pendulum part| + Σ|coupling coefficient|·max|w^(b)|.
    pub fn derivative_sup(&self, alpha: &[u32]) -> f64 {
        let s: usize = alpha.iter().map(|&a| a as usize).sum();
        let coef = direction_coefficients(self.frame.k(), self.frame.k_prime(), alpha);
        let c_p = self.params.pendulum_coefficient() * coef[0];
        let c_v = self.coupling.scale / self.params.k_norm_sq as f64;
        let (ud, wd) = self.coupling.max_freqs();
        let (g1, g2) = (sample_grid_size(ud), sample_grid_size(wd));
        let us = Spectrum::from_poly(&self.coupling.u);
        let ws = Spectrum::from_poly(&self.coupling.w);
        let u_ders: Vec<Vec<f64>> = (0..=s).map(|b| us.sample(g1, (s - b) as u32)).collect();
        let w_ders: Vec<Vec<f64>> = (0..=s).map(|b| ws.sample(g2, b as u32)).collect();
        let w_max: Vec<f64> = w_ders.iter().map(|w| w.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();

        let h1 = 2.0 * PI / g1 as f64;
        let mut rows: Vec<(f64, f64, usize)> = (0..g1)
            .map(|i| {
                let pend = c_p * pendulum_derivative(h1 * i as f64, s);
                let bound: f64 = (0..=s).map(|b| (c_v * coef[b] * u_ders[b][i]).abs() * w_max[b]).sum();
                (pend.abs() + bound, pend, i)
            })
            .collect();
        rows.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = 0.0f64;
        for &(upper, pend, i) in &rows {
            if upper <= best {
                break;
            }
            let weights: Vec<f64> = (0..=s).map(|b| c_v * coef[b] * u_ders[b][i]).collect();
            if weights.iter().all(|&w| w == 0.0) {
                best = best.max(pend.abs());
                continue;
            }
            let row_max = exec::max_range(ExecMode::best(), g2, |j| {
                let v: f64 = weights.iter().zip(&w_ders).map(|(w, col)| w * col[j]).sum();
                (pend + v).abs()
            });
            best = best.max(row_max);
        }
        best
    }

    /// Values of D^α_x P on a `grid`×`grid` q-grid.
    fn derivative_grid(&self, alpha: &[u32], grid: usize) -> Vec<f64> {
        let s: usize = alpha.iter().map(|&a| a as usize).sum();
        let coef = direction_coefficients(self.frame.k(), self.frame.k_prime(), alpha);
        let c_p = self.params.pendulum_coefficient() * coef[0];
        let c_v = self.coupling.scale / self.params.k_norm_sq as f64;
        let us = Spectrum::from_poly(&self.coupling.u);
        let ws = Spectrum::from_poly(&self.coupling.w);
        let u_ders: Vec<Vec<f64>> = (0..=s).map(|b| us.sample(grid, (s - b) as u32)).collect();
        let w_ders: Vec<Vec<f64>> = (0..=s).map(|b| ws.sample(grid, b as u32)).collect();
        let h = 2.0 * PI / grid as f64;
        exec::map_range(ExecMode::best(), grid * grid, |idx| {
            let (i, j) = (idx / grid, idx % grid);
            let mut v = c_p * pendulum_derivative(h * i as f64, s);
            for b in 0..=s {
                v += c_v * coef[b] * u_ders[b][i] * w_ders[b][j];
            }
            v
        })
    }

    /// Hölder norm Σ_{|α|≤[r]} sup|D^α P| (+ seminorm of the top order),
    /// computed in the resonant coordinates.
    ///
    /// The seminorm uses displacements h·e_i in x with h a dyadic multiple of
    /// the q-grid spacing, which land on grid points in q. Its grid is
    /// `seminorm_grid` per axis.
    pub fn holder_norm(&self, r: f64) -> Result<NormReport> {
        self.holder_norm_with(r, 1024)
    }

    pub fn holder_norm_with(&self, r: f64, seminorm_grid: usize) -> Result<NormReport> {
        if !(r >= 0.0) || !r.is_finite() {
            return domain(format!("norm order must be a finite nonnegative number, got {r}"));
        }
        let order = r.floor() as usize;
        let theta = r - order as f64;
        let d = self.dim();
        let order_sups: Vec<f64> = (0..=order)
            .map(|s| multi_indices(d, s).iter().map(|a| self.derivative_sup(a)).sum())
            .collect();
        let seminorm = (theta > 0.0).then(|| {
            let g = seminorm_grid;
            let h = 2.0 * PI / g as f64;
            let mut best = 0.0f64;
            for alpha in multi_indices(d, order) {
                let vals = self.derivative_grid(&alpha, g);
                for i in 0..d {
                    let (a, b) = (self.frame.k()[i], self.frame.k_prime()[i]);
                    let mut step = 1usize;
                    while step as f64 * h <= PI * (1.0 + 1e-12) {
                        let dist = step as f64 * h;
                        let di = (a * step as i64).rem_euclid(g as i64) as usize;
                        let dj = (b * step as i64).rem_euclid(g as i64) as usize;
                        let m = exec::max_range(ExecMode::best(), g * g, |idx| {
                            let (p, q) = (idx / g, idx % g);
                            let other = ((p + di) % g) * g + (q + dj) % g;
                            (vals[idx] - vals[other]).abs()
                        });
                        best = best.max(m / dist.powf(theta));
                        step *= 2;
                    }
                }
            }
            best
        });
        let (ud, wd) = self.coupling.max_freqs();
        Ok(NormReport {
            r,
            value: order_sups.iter().sum::<f64>() + seminorm.unwrap_or(0.0),
            grid_size: sample_grid_size(ud.max(wd)),
            method: NormMethod::Grid,
            sup_norm: order_sups[0],
            order_sups,
            seminorm,
        })
    }

    /// Computes and stores the norms for each order in `r_list`.
    pub fn compute_norms(&mut self, r_list: &[f64]) -> Result<&[NormReport]> {
        self.norm_table = r_list.iter().map(|&r| self.holder_norm(r)).collect::<Result<_>>()?;
        Ok(&self.norm_table)
    }

    /// Bernstein check sup|∂_i^s P| ≤ N^s·sup|P| over the coordinate axes.
    pub fn bernstein_verify(&self, s: u32) -> BernsteinReport {
        let d = self.dim();
        let sup = self.derivative_sup(&vec![0; d]);
        let lhs = (0..d)
            .map(|i| {
                let mut a = vec![0u32; d];
                a[i] = s;
                self.derivative_sup(&a)
            })
            .fold(0.0, f64::max);
        let rhs = self.degree().powi(s as i32) * sup;
        let (ud, wd) = self.coupling.max_freqs();
        BernsteinReport {
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + 1e-9),
            grid: sample_grid_size(ud.max(wd)),
        }
    }

    /// Minimum of v over a `grid`×`grid` q-grid.
    pub fn coupling_min(&self, grid: usize) -> f64 {
        self.coupling.sample_grid(grid, grid).into_iter().fold(f64::INFINITY, f64::min)
    }

    fn fine_grid(&self, deg: i64) -> usize {
        sample_grid_size(deg).max((16.0 * PI / self.params.radius) as usize).next_power_of_two()
    }

    /// Largest |u| and |w| inside / outside the dilated box |q₁−π| ≤ 1.5R, |q₂| ≤ 1.5R.
    fn factor_extremes(&self) -> ((f64, f64), (f64, f64)) {
        let box_half = 1.5 * self.params.radius;
        let extremes = |p: &TrigPoly, center: f64| {
            let n = self.fine_grid(p.max_abs_freq());
            let vals = Spectrum::from_poly(p).sample(n, 0);
            let h = 2.0 * PI / n as f64;
            let (mut all, mut off) = (0.0f64, 0.0f64);
            for (j, v) in vals.iter().enumerate() {
                let dist = (j as f64 * h - center).abs();
                let dist = dist.min(2.0 * PI - dist);
                all = all.max(v.abs());
                if dist > box_half {
                    off = off.max(v.abs());
                }
            }
            (all, off)
        };
        (extremes(&self.coupling.u, PI), extremes(&self.coupling.w, 0.0))
    }

    fn localization_scale(&self) -> f64 {
        let mu = self.coupling.thresholds.mu;
        4.0 * mu * mu * (self.params.m as f64).powf(-2.0 * self.params.s0) * self.params.pendulum_strength()
    }

    /// max of |v| off the dilated box against μ²·M^(−2s0)·|k|^(−a)·4.
    pub fn localization(&self) -> LocalizationReport {
        let ((u_all, u_off), (w_all, w_off)) = self.factor_extremes();
        let max_off_box = self.coupling.scale * (u_off * w_all).max(u_all * w_off);
        let bound = self.localization_scale();
        LocalizationReport {
            max_off_box,
            bound,
            pass: max_off_box <= bound,
        }
    }

    /// On q₁ = π with |q₂| > 1.5R, P differs from 2|k|^(−(a+2)) only by the
    /// coupling, which is bounded by the localization scale times |k|^(−2).
    pub fn pendulum_dominance(&self) -> DominanceReport {
        let (_, (_, w_off)) = self.factor_extremes();
        let u_pi = self.coupling.u.eval(&[PI]).abs();
        let max_deviation = self.coupling.scale * u_pi * w_off / self.params.k_norm_sq as f64;
        let bound = self.localization_scale() / self.params.k_norm_sq as f64;
        DominanceReport {
            max_deviation,
            bound,
            pass: max_deviation <= bound,
        }
    }

    /// Serializes to the polynomial file layout with a header carrying the
    /// parameters, the frame and the coupling factors. When the expanded
    /// polynomial was not materialized only the pendulum part is listed in
    /// `terms` and `"expanded": false` is recorded.
    pub fn to_text(&self) -> Result<String> {
        let coupling = CouplingRecord {
            m: self.coupling.m,
            jackson_degree: self.coupling.jackson_degree,
            radius: self.coupling.radius,
            scale: self.coupling.scale,
            jackson: self.coupling.jackson.clone(),
            jackson_error_bound: self.coupling.jackson_error_bound,
            thresholds: self.coupling.thresholds.clone(),
            history: self.coupling.history.clone(),
            g: self.coupling.g.terms().to_vec(),
            u: self.coupling.u.terms().to_vec(),
            w: self.coupling.w.terms().to_vec(),
        };
        let header = vec![
            ("params".to_string(), to_json(&self.params)?),
            ("frame".to_string(), to_json(&self.frame.rows().to_vec())?),
            ("coupling".to_string(), to_json(&coupling)?),
            ("norms".to_string(), to_json(&self.norm_table)?),
            ("expanded".to_string(), self.p_poly.is_some().to_string()),
        ];
        let p = match &self.p_poly {
            Some(p) => p.clone(),
            None => self.pendulum_poly()?,
        };
        Ok(write_trigpoly(&p, &header))
    }

    fn pendulum_poly(&self) -> Result<TrigPoly> {
        let c = self.params.pendulum_coefficient();
        TrigPoly::new(
            self.dim(),
            vec![
                Term { freq: vec![0; self.dim()], cos: c, sin: 0.0 },
                Term { freq: self.frame.k().to_vec(), cos: -c, sin: 0.0 },
            ],
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let listed = read_trigpoly(text)?;
        let frame = ResonanceFrame::from_rows(file.frame)?;
        let c = file.coupling;
        let coupling = Coupling {
            m: c.m,
            jackson_degree: c.jackson_degree,
            radius: c.radius,
            g: TrigPoly::new(1, c.g)?,
            u: TrigPoly::new(1, c.u)?,
            w: TrigPoly::new(1, c.w)?,
            scale: c.scale,
            jackson: c.jackson,
            jackson_error_bound: c.jackson_error_bound,
            thresholds: c.thresholds,
            history: c.history,
        };
        let cap = if file.expanded { usize::MAX } else { 0 };
        let mut spec = from_coupling(file.params, frame, coupling, cap)?;
        spec.norm_table = file.norms;
        match &spec.p_poly {
            Some(p) if p != &listed => Err(Error::Format("listed terms disagree with the coupling factors".into())),
            None if listed != spec.pendulum_poly()? => Err(Error::Format("listed pendulum term is inconsistent".into())),
            _ => Ok(spec),
        }
    }

    /// Short key/value summary of the build.
    pub fn header(&self) -> SpecHeader {
        SpecHeader {
            k: self.frame.k().to_vec(),
            k_prime: self.frame.k_prime().to_vec(),
            m_planned: self.params.m_planned,
            m: self.params.m,
            jackson_degree: self.params.jackson_degree,
            degree: self.degree(),
            degree_budget: self.params.degree_budget(),
            within_budget: self.within_budget(),
            peak: self.coupling.thresholds.peak,
            mu: self.coupling.thresholds.mu,
            escalation: self.coupling.history.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecHeader {
    pub k: Vec<i64>,
    pub k_prime: Vec<i64>,
    pub m_planned: usize,
    pub m: usize,
    pub jackson_degree: usize,
    pub degree: f64,
    pub degree_budget: f64,
    pub within_budget: bool,
    pub peak: f64,
    pub mu: f64,
    pub escalation: Vec<EscalationStep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CouplingRecord {
    m: usize,
    jackson_degree: usize,
    radius: f64,
    scale: f64,
    jackson: JacksonInfo,
    jackson_error_bound: f64,
    thresholds: ThresholdReport,
    history: Vec<EscalationStep>,
    g: Vec<Term>,
    u: Vec<Term>,
    w: Vec<Term>,
}

#[derive(Debug, Deserialize)]
struct SpecFile {
    params: PerturbationParams,
    frame: Vec<Vec<i64>>,
    coupling: CouplingRecord,
    #[serde(default)]
    norms: Vec<NormReport>,
    expanded: bool,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::perturbation::params::{plan_parameters, PlanOptions};

    fn desk_spec() -> PerturbationSpec {
        let params = plan_parameters(2, 0.0, 0.1, 1e-3, 0.0901699437494742, 34, &PlanOptions::default()).unwrap();
        let frame = ResonanceFrame::from_rows(vec![vec![-3, 5], vec![5, 3]]).unwrap();
        assemble(&params, &frame, &BuildOptions::diagnostic()).unwrap()
    }

    #[test]
    fn degree_stays_within_budget() {
        let s = desk_spec();
        assert!(s.within_budget());
        assert!(s.degree() <= 717.0);
        let p = s.p_poly.as_ref().unwrap();
        assert_eq!(p.degree_sq(), s.degree_sq);
    }

    #[test]
    fn expanded_and_composed_evaluations_agree() {
        let s = desk_spec();
        let p = s.p_poly.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
            assert!((p.eval(&x) - s.eval(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn vanishes_on_the_resonant_hyperplane() {
        let s = desk_spec();
        for t in [0.0, 0.4, 1.7] {
            // ⟨k, x⟩ = −3x₁ + 5x₂ = 0 along x = t·(5, 3)
            let x = [5.0 * t, 3.0 * t];
            assert!(s.eval(&x).abs() < 1e-15);
        }
    }

    #[test]
    fn structured_sup_matches_pendulum_peak() {
        let s = desk_spec();
        let sup = s.derivative_sup(&[0, 0]);
        let expected = s.eval_q(PI, 0.0);
        assert!((sup - expected).abs() <= 1e-12 * expected, "{sup} vs {expected}");
    }

    #[test]
    fn norms_are_monotone_in_order() {
        let s = desk_spec();
        let vals: Vec<f64> = (0..4).map(|r| s.holder_norm(r as f64).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{vals:?}");
        let half = s.holder_norm(1.5).unwrap().value;
        assert!(half >= vals[1] && half.is_finite());
    }

    #[test]
    fn bernstein_holds_for_p() {
        let s = desk_spec();
        for order in 1..=2 {
            assert!(s.bernstein_verify(order).pass);
        }
    }

    #[test]
    fn text_roundtrip() {
        let s = desk_spec();
        let text = s.to_text().unwrap();
        let back = PerturbationSpec::from_text(&text).unwrap();
        assert_eq!(back.p_poly, s.p_poly);
        assert_eq!(back.params, s.params);
        assert_eq!(back.to_text().unwrap(), text);
    }
}
