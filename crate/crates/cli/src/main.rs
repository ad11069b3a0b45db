use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use torus_breakup::exec;

mod commands;
mod config;
mod error;
mod output;

use config::{Cli, CliCommand, Command, RunConfig};
use error::CliError;
use output::{sha256_hex, Artifacts};

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config_sha256: &'a str,
    config: &'a RunConfig,
    threads: Option<usize>,
    wall_time_seconds: f64,
    exit_code: i32,
    artifacts: &'a [output::ArtifactRecord],
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("torb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.global.threads {
        exec::set_threads(n);
    }
    let config = match cli.command {
        CliCommand::Run { config } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            let mut parsed = RunConfig::from_toml(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            // The environment still overrides the output directory.
            if let Ok(dir) = std::env::var("TORUS_OUTPUT_DIR") {
                parsed.output_dir = dir.into();
            }
            parsed
        }
        CliCommand::Resonances(a) => RunConfig::from_cli(&cli.global, Command::Resonances(a)),
        CliCommand::Frame(a) => RunConfig::from_cli(&cli.global, Command::Frame(a)),
        CliCommand::Build(a) => RunConfig::from_cli(&cli.global, Command::Build(a)),
        CliCommand::Norms(a) => RunConfig::from_cli(&cli.global, Command::Norms(a)),
        CliCommand::PendulumBench(a) => RunConfig::from_cli(&cli.global, Command::PendulumBench(a)),
        CliCommand::DestroyCheck(a) => RunConfig::from_cli(&cli.global, Command::DestroyCheck(a)),
        CliCommand::ReproduceScaling(a) => RunConfig::from_cli(&cli.global, Command::ReproduceScaling(a)),
    };

    let started = Instant::now();
    let config_text = config.to_toml().map_err(|e| CliError::Format(e.to_string()))?;
    let hash = sha256_hex(config_text.as_bytes());
    let mut out = Artifacts::new(&config.output_dir, &hash, config.format)?;
    out.write_raw("config.toml", &config_text)?;
    let outcome = commands::execute(&config, &mut out)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    let exit_code = if outcome.inconclusive { 3 } else { 0 };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        seed: config.seed,
        config_sha256: out.config_hash(),
        config: &config,
        threads: cli.global.threads,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        exit_code,
        artifacts: &out.written,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Format(e.to_string()))?;
    let path = config.output_dir.join("manifest.json");
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    println!("artifacts in {}", config.output_dir.display());
    Ok(exit_code)
}
