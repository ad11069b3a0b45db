use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "torb", version, about = "Build torus-breaking perturbations and check them numerically")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Directory for artifacts and the manifest.
    #[arg(long, global = true, env = "TORUS_OUTPUT_DIR", default_value = "torb-out")]
    pub output_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for data-parallel loops.
    #[arg(long, global = true, env = "TORUS_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Near-resonances of a frequency vector.
    Resonances(ResonancesArgs),
    /// Resonance frame, symplectic lift and pushed-forward frequency.
    Frame(FrameArgs),
    /// Assemble a perturbation and write it as a spec file.
    Build(BuildArgs),
    /// Hölder norms of a spec file.
    Norms(NormsArgs),
    /// Pendulum separatrix action and two-leg action profile.
    PendulumBench(PendulumArgs),
    /// Run the destruction test on a build.
    DestroyCheck(DestroyArgs),
    /// Norm and degree scaling along a resonance sequence.
    ReproduceScaling(ScalingArgs),
    /// Execute a TOML run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    StructuredText,
}

/// A complete, serializable description of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: Format,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Resonances(ResonancesArgs),
    Frame(FrameArgs),
    Build(BuildArgs),
    Norms(NormsArgs),
    PendulumBench(PendulumArgs),
    DestroyCheck(DestroyArgs),
    ReproduceScaling(ScalingArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Resonances(_) => "resonances",
            Command::Frame(_) => "frame",
            Command::Build(_) => "build",
            Command::Norms(_) => "norms",
            Command::PendulumBench(_) => "pendulum-bench",
            Command::DestroyCheck(_) => "destroy-check",
            Command::ReproduceScaling(_) => "reproduce-scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ResonancesArgs {
    /// Preset name (golden, spread-<d>, liouville-demo) or comma-separated decimals.
    #[arg(long, default_value = "golden")]
    pub omega: String,
    #[arg(long, default_value_t = 100)]
    pub kmax: u32,
    #[arg(long = "C", alias = "c", default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FrameArgs {
    #[arg(long, default_value = "golden")]
    pub omega: String,
    /// Comma-separated integer resonance vector.
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 2.0)]
    pub partner_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BuildArgs {
    #[arg(long, default_value = "golden")]
    pub omega: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-3,5")]
    pub k: String,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps_exp: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_size: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Smoothness order the plan targets.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 40)]
    pub kappa_cap: u32,
    /// Skip threshold enforcement and escalation.
    #[arg(long)]
    pub diagnostic: bool,
    #[arg(long, default_value_t = 2.0)]
    pub partner_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct NormsArgs {
    /// Spec file written by `build`.
    #[arg(long)]
    pub spec: PathBuf,
    /// Comma-separated norm orders.
    #[arg(long, default_value = "0,1,2")]
    pub r: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PendulumArgs {
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Horizon of the separatrix run and of the action profile.
    #[arg(long, default_value_t = 40.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DestroyArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    /// Use the integrable model (no perturbation) with the same kinetic weights.
    #[arg(long)]
    pub integrable: bool,
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
    /// Grid intervals per trial; chosen from the box size when omitted.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    /// Evaluation budget of the passage-time search.
    #[arg(long, default_value_t = 40)]
    pub passage_evaluations: usize,
    /// Demonstration only: multiply the coupling (forces an inconclusive verdict).
    #[arg(long, default_value_t = 1.0)]
    pub coupling_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ScalingArgs {
    #[arg(long, default_value = "golden")]
    pub omega: String,
    /// Semicolon-separated resonance vectors.
    #[arg(long, allow_hyphen_values = true, default_value = "-3,5;5,-8;-8,13;13,-21")]
    pub ks: String,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps_exp: f64,
    #[arg(long, default_value = "0,2")]
    pub r: String,
}

impl RunConfig {
    pub fn from_cli(global: &GlobalArgs, command: Command) -> Self {
        Self {
            seed: global.seed,
            output_dir: global.output_dir.clone(),
            format: global.format,
            command,
        }
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
