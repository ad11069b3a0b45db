use std::f64::consts::PI;
use std::fs;

use serde::Serialize;
use torus_breakup::diophantine::{find_resonances, FrequencyVector, TauEff};
use torus_breakup::frame::{complete_frame, orthogonal_partner, pushforward, symplectic_lift};
use torus_breakup::perturbation::{
    build_for, norm_scaling_report, BuildOptions, PerturbationSpec, PlanOptions, ScalingOptions, SpecHeader,
};
use torus_breakup::variational::{
    action_profile, destruction_test, destruction_test_integrable, pendulum_bvp, DestructionOptions, Verdict,
};

use crate::config::{
    BuildArgs, Command, DestroyArgs, FrameArgs, NormsArgs, PendulumArgs, ResonancesArgs, RunConfig, ScalingArgs,
};
use crate::error::CliError;
use crate::output::{real, Artifacts, Table};

/// What a successful command reports back to `main`.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inconclusive: bool,
    pub summary: Vec<String>,
}

pub fn execute(config: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Resonances(a) => resonances(a, out),
        Command::Frame(a) => frame(a, out),
        Command::Build(a) => build(a, out),
        Command::Norms(a) => norms(a, out),
        Command::PendulumBench(a) => pendulum_bench(a, out),
        Command::DestroyCheck(a) => destroy_check(a, config.seed, out),
        Command::ReproduceScaling(a) => reproduce_scaling(a, out),
    }
}

fn parse_ints(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad integer vector {text:?}: {e}")))
}

fn parse_reals(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad list of reals {text:?}: {e}")))
}

fn resonances(a: &ResonancesArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let omega = FrequencyVector::parse(&a.omega)?;
    let hits = find_resonances(&omega, a.kmax, a.c);
    let d = omega.dim();
    let mut columns: Vec<String> = (1..=d).map(|i| format!("k{i}")).collect();
    columns.extend(["value", "norm", "tau_eff"].map(String::from));
    let mut table = Table::new(columns);
    for h in &hits {
        let mut row: Vec<String> = h.k.iter().map(|x| x.to_string()).collect();
        row.push(real(h.value));
        row.push(real(h.norm));
        row.push(match h.tau_eff {
            TauEff::Finite(t) => real(t),
            TauEff::Infinite => "inf".into(),
            TauEff::NonHit => "none".into(),
        });
        table.push(row);
    }
    out.table("resonances", &table)?;
    Ok(Outcome {
        inconclusive: false,
        summary: vec![format!("{} resonances with |k|_inf <= {}", hits.len(), a.kmax)],
    })
}

#[derive(Serialize)]
struct FrameReport {
    k: Vec<i64>,
    k_prime: Vec<i64>,
    rows: Vec<Vec<i64>>,
    determinant: String,
    orthogonal: bool,
    symplectic: bool,
    omega_pushed: Vec<f64>,
    pushed_first_scaled: f64,
    pushed_second_ratio: f64,
    in_regime: bool,
}

fn frame(a: &FrameArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let omega = FrequencyVector::parse(&a.omega)?;
    let k = parse_ints(&a.k)?;
    let kp = orthogonal_partner(&k, &omega, a.partner_radius)?;
    let frame = complete_frame(&k, &kp)?;
    let lift = symplectic_lift(&frame)?;
    let push = pushforward(&frame, &omega, a.tau)?;
    let report = FrameReport {
        k,
        k_prime: kp,
        rows: frame.rows().to_vec(),
        determinant: frame.det().to_string(),
        orthogonal: frame.is_orthogonal(),
        symplectic: lift.is_symplectic(),
        omega_pushed: push.omega_new.approx().to_vec(),
        pushed_first_scaled: push.bound1,
        pushed_second_ratio: push.ratio2,
        in_regime: push.in_regime,
    };
    out.json("frame.json", &report)?;
    Ok(Outcome {
        inconclusive: false,
        summary: vec![
            format!("rows {:?}", report.rows),
            format!("symplectic {} in_regime {}", report.symplectic, report.in_regime),
        ],
    })
}

fn build_spec(a: &BuildArgs) -> Result<(FrequencyVector, PerturbationSpec), CliError> {
    let omega = FrequencyVector::parse(&a.omega)?;
    let k = parse_ints(&a.k)?;
    let plan = PlanOptions {
        alpha: a.alpha,
        r: a.r,
        kappa_cap: a.kappa_cap,
        ..PlanOptions::default()
    };
    let opts = if a.diagnostic {
        BuildOptions::diagnostic()
    } else {
        BuildOptions::escalating()
    };
    let spec = build_for(&omega, &k, a.tau, a.eps_exp, a.eps_size, &plan, &opts, a.partner_radius)?;
    Ok((omega, spec))
}

fn header_lines(h: &SpecHeader) -> Vec<String> {
    vec![
        format!("k {:?} k' {:?}", h.k, h.k_prime),
        format!("M planned {} used {} (Jackson degree {})", h.m_planned, h.m, h.jackson_degree),
        format!("degree {} budget {} within {}", real(h.degree), real(h.degree_budget), h.within_budget),
        format!("peak {} mu {}", real(h.peak), real(h.mu)),
    ]
}

fn build(a: &BuildArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let (_, spec) = build_spec(a)?;
    out.stamped("spec.json", &spec.to_text()?)?;
    let header = spec.header();
    out.json("build.json", &header)?;
    Ok(Outcome {
        inconclusive: false,
        summary: header_lines(&header),
    })
}

fn norms(a: &NormsArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&a.spec).map_err(|e| CliError::io(&a.spec, e))?;
    let spec = PerturbationSpec::from_text(&text)?;
    let mut table = Table::new(["r", "norm", "sup", "seminorm", "grid"]);
    let mut summary = Vec::new();
    for r in parse_reals(&a.r)? {
        let rep = spec.holder_norm(r)?;
        table.push(vec![
            real(r),
            real(rep.value),
            real(rep.sup_norm),
            rep.seminorm.map_or_else(|| "none".into(), real),
            rep.grid_size.to_string(),
        ]);
        summary.push(format!("C^{r} norm {}", real(rep.value)));
    }
    out.table("norms", &table)?;
    Ok(Outcome {
        inconclusive: false,
        summary,
    })
}

#[derive(Serialize)]
struct PendulumReport {
    g: f64,
    horizon: f64,
    separatrix_action: f64,
    separatrix_oracle: f64,
    relative_error: f64,
    energy_spread: f64,
    unimodal: bool,
    argmin: usize,
    midpoint_index: usize,
    symmetry_residual: f64,
}

fn pendulum_bench(a: &PendulumArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    if a.points < 3 {
        return Err(CliError::Usage("need at least 3 profile points".into()));
    }
    let sep = pendulum_bvp(a.g, 0.0, 2.0 * PI, 0.0, a.horizon)?;
    let oracle = 8.0 * a.g.sqrt();
    let grid: Vec<f64> = (1..=a.points)
        .map(|i| a.horizon * i as f64 / (a.points + 1) as f64)
        .collect();
    let profile = action_profile(a.g, 0.0, a.horizon, &grid)?;
    let mut table = Table::new(["s", "action"]);
    for (s, v) in &profile.points {
        table.push(vec![real(*s), real(*v)]);
    }
    out.table("action_profile", &table)?;
    let report = PendulumReport {
        g: a.g,
        horizon: a.horizon,
        separatrix_action: sep.action,
        separatrix_oracle: oracle,
        relative_error: (sep.action - oracle).abs() / oracle,
        energy_spread: sep.energy_spread,
        unimodal: profile.unimodal,
        argmin: profile.argmin,
        midpoint_index: a.points / 2,
        symmetry_residual: profile.symmetry_residual,
    };
    out.json("pendulum.json", &report)?;
    Ok(Outcome {
        inconclusive: false,
        summary: vec![
            format!("separatrix action {} (oracle {})", real(sep.action), real(oracle)),
            format!(
                "profile unimodal {} argmin {} symmetry residual {:.3e}",
                profile.unimodal, profile.argmin, profile.symmetry_residual
            ),
        ],
    })
}

fn destroy_check(a: &DestroyArgs, seed: u64, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let (omega, spec) = build_spec(&a.build)?;
    let pushed = pushforward(&spec.frame, &omega, a.build.tau)?;
    let om = pushed.omega_new.approx().to_vec();
    let opts = DestructionOptions {
        trials: a.trials,
        intervals: a.intervals,
        seed,
        passage_evaluations: a.passage_evaluations,
        coupling_factor: a.coupling_factor,
        ..DestructionOptions::default()
    };
    let mut report = if a.integrable {
        destruction_test_integrable(&spec, &om, &opts)?
    } else {
        destruction_test(&spec, &om, &opts)?
    };
    if !pushed.in_regime {
        report.regime.thresholds_passed = false;
        report.notes.push("pushed-forward frequency is outside the regime".into());
        report.verdict = Verdict::Inconclusive;
    }
    let mut table = Table::new([
        "q2_start",
        "q2_end",
        "horizon",
        "intervals",
        "distance_to_box",
        "action",
        "grad_norm",
        "through_action",
        "detour_action",
        "gap",
        "speed_deviation",
    ]);
    for t in &report.trial_reports {
        table.push(vec![
            real(t.q2_start),
            real(t.q2_end),
            real(t.horizon),
            t.intervals.to_string(),
            real(t.distance_to_box),
            real(t.action),
            real(t.grad_norm),
            real(t.through_action),
            real(t.detour_action),
            real(t.gap),
            real(t.speed_deviation),
        ]);
    }
    out.table("trials", &table)?;
    out.json("destruction.json", &report)?;
    let verdict = serde_json::to_string(&report.verdict).unwrap_or_default();
    let mut summary = vec![
        format!("verdict {verdict} over {} trials", report.trials),
        format!(
            "min distance to box {} largest gap {} (resolution {})",
            real(report.min_distance_to_box),
            real(report.action_gap),
            real(report.action_resolution)
        ),
    ];
    summary.extend(report.notes.iter().cloned());
    Ok(Outcome {
        inconclusive: report.verdict == Verdict::Inconclusive,
        summary,
    })
}

fn reproduce_scaling(a: &ScalingArgs, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let omega = FrequencyVector::parse(&a.omega)?;
    let ks = a.ks.split(';').map(parse_ints).collect::<Result<Vec<_>, _>>()?;
    let r_list = parse_reals(&a.r)?;
    let report = norm_scaling_report(&omega, a.tau, a.eps_exp, &r_list, &ks, &ScalingOptions::default())?;
    let d = omega.dim();
    let mut columns: Vec<String> = (1..=d).map(|i| format!("k{i}")).collect();
    columns.extend(
        ["k_norm", "m_planned", "m", "degree", "planned_budget", "within_budget", "mu"].map(String::from),
    );
    columns.extend(r_list.iter().map(|r| format!("norm_r{r}")));
    let mut table = Table::new(columns);
    for row in &report.rows {
        let mut cells: Vec<String> = row.k.iter().map(|x| x.to_string()).collect();
        cells.extend([
            real(row.k_norm),
            row.m_planned.to_string(),
            row.m.to_string(),
            real(row.degree),
            real(row.planned_budget),
            u8::from(row.within_budget).to_string(),
            real(row.mu),
        ]);
        cells.extend(row.norms.iter().map(|x| real(*x)));
        cells.resize(table.columns.len(), "nan".into());
        table.push(cells);
    }
    out.table("scaling", &table)?;
    out.json("scaling_fits.json", &report.fits)?;
    let summary = report
        .fits
        .iter()
        .map(|f| {
            format!(
                "r={} slope {:.4} predicted {:.4} (deviation {:.1}%)",
                f.r,
                f.slope,
                f.predicted,
                100.0 * f.relative_deviation
            )
        })
        .collect();
    Ok(Outcome {
        inconclusive: false,
        summary,
    })
}
