//! Command-line front end: run built-in or file-defined scenarios to CSV,
//! metrics, and SVG artifacts, or validate parameter files without running.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bcmpc::sim::{builtin_scenario, builtin_scenarios, metrics, run_closed_loop, Scenario};
use bcmpc::Params;
use bcmpc::SimError;

mod plot;

#[derive(Parser)]
#[command(
    name = "bcmpc",
    version,
    about = "Branching-course MPC scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write run.csv, metrics.json, and optionally
    /// scenario.svg into the output directory.
    Run {
        /// Built-in scenario name (scenario-1 through scenario-4) or path
        /// to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        /// Parameter JSON file; built-in defaults when omitted.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Replaces the scenario's measurement-noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also render scenario.svg.
        #[arg(long)]
        plot: bool,
    },
    /// Check a parameter file against every configuration constraint and
    /// report violations without running anything.
    Validate {
        /// Parameter JSON file.
        #[arg(long)]
        params: PathBuf,
    },
}

/// Failures mapped onto the documented exit codes: 2 for configuration
/// problems, 3 for a planner abort mid-run.
enum CliError {
    Config(String),
    Planner(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        let (kind, message, code) = match self {
            CliError::Config(m) => ("config", m, 2),
            CliError::Planner(m) => ("planner", m, 3),
        };
        eprintln!(
            "{}",
            serde_json::json!({ "error": kind, "message": message })
        );
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            params,
            out,
            seed,
            plot,
        } => run(&scenario, params.as_deref(), &out, seed, plot),
        Command::Validate { params } => validate(&params),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => error.report(),
    }
}

fn run(
    source: &str,
    params_path: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    plot: bool,
) -> Result<(), CliError> {
    let mut scenario = resolve_scenario(source)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let params = load_params(params_path)?;

    std::fs::create_dir_all(out).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory {}: {e}",
            out.display()
        ))
    })?;

    let log = run_closed_loop(&scenario, &params).map_err(|e| match e {
        SimError::Planner(inner) => CliError::Planner(inner.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let summary = metrics(&log, &scenario, &params);

    write_file(&out.join("run.csv"), &log.to_csv())?;
    write_file(&out.join("metrics.json"), &summary.to_json_pretty())?;
    if plot {
        write_file(&out.join("scenario.svg"), &plot::render(&scenario, &log))?;
    }
    println!(
        "{}: {} plant steps, {} planner iterations -> {}",
        scenario.name,
        log.rows.len(),
        log.planner_records.len(),
        out.display()
    );
    Ok(())
}

fn validate(path: &Path) -> Result<(), CliError> {
    let params = Params::load(path).map_err(CliError::Config)?;
    let violations = params.validate();
    println!("{}", serde_json::json!({ "violations": violations }));
    Ok(())
}

fn resolve_scenario(source: &str) -> Result<Scenario, CliError> {
    if let Some(scenario) = builtin_scenario(source) {
        return Ok(scenario);
    }
    let path = Path::new(source);
    if !path.exists() {
        let names: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
        return Err(CliError::Config(format!(
            "scenario {source} is neither a built-in name ({}) nor an existing file",
            names.join(", ")
        )));
    }
    Scenario::load(path).map_err(CliError::Config)
}

fn load_params(path: Option<&Path>) -> Result<Params, CliError> {
    let params = match path {
        Some(path) => Params::load(path).map_err(CliError::Config)?,
        None => Params::default(),
    };
    let violations = params.validate();
    if !violations.is_empty() {
        return Err(CliError::Config(format!(
            "invalid parameters: {}",
            violations.join("; ")
        )));
    }
    Ok(params)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
