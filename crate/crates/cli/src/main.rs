//! Command-line front end of the rigid-body integrator bench.
//!
//! Three subcommands: `simulate` streams one trajectory to CSV,
//! `stress-test` runs the long-horizon drift matrix and writes a JSON
//! verdict report plus per-run CSVs, and `order-study` produces
//! time-precision data with fitted convergence orders.

mod config;
mod output;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use spindrift::experiments::{
    analyze_stress_run, evaluate_acceptance, order_study, simulate, ExperimentSpec, OrderFit,
    RunFailure, Scenario, StressReport, DRIFT_HORIZON, DRIFT_STEP_SIZES, ORDER_STUDY_HORIZON,
    ORDER_STUDY_STEP_SIZES,
};
use spindrift::integrators::{IntegratorKind, SolverConfig};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "spindrift",
    version,
    about = "Rigid-body integrator bench on SO(3): trajectories, energy-drift verdicts, convergence orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Run the long-horizon drift matrix and report verdicts.
    StressTest(StressTestArgs),
    /// Measure observed convergence order against the RK4 reference.
    OrderStudy(OrderStudyArgs),
}

fn parse_integrator(s: &str) -> Result<IntegratorKind, String> {
    s.parse()
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file; defaults are the shipped bench configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrator: nmb, vlv, liemid-ea or rk4.
    #[arg(long, value_parser = parse_integrator)]
    integrator: Option<IntegratorKind>,
    /// Time step.
    #[arg(long)]
    h: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    t_final: Option<f64>,
    /// Emit every n-th step to the CSV (extrema are tracked every step).
    #[arg(long)]
    stride: Option<usize>,
    /// Fixed-point solver tolerance on the increment sup-norm.
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Fixed-point solver iteration cap.
    #[arg(long)]
    max_iters: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the effective config as JSON and exit without running.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args)]
struct StressTestArgs {
    /// JSON config file supplying the scenario (inertia, potential,
    /// initial state) and solver; the run matrix comes from the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict the matrix to these integrators (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_integrator)]
    only: Option<Vec<IntegratorKind>>,
    /// Restrict the matrix to these step sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    /// Horizon of each run.
    #[arg(long, default_value_t = DRIFT_HORIZON)]
    t_final: f64,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// JSON report path; per-run CSVs are written beside it.
    #[arg(long, default_value = "stress_report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct OrderStudyArgs {
    /// JSON config file supplying the scenario and solver.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrators to study (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_integrator)]
    integrator: Option<Vec<IntegratorKind>>,
    /// Step sizes of the study (comma separated, at least three).
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    /// Physical time at which the global error is evaluated.
    #[arg(long, default_value_t = ORDER_STUDY_HORIZON)]
    t_final: f64,
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// CSV path for the per-h error table; the JSON summary goes to
    /// stdout.
    #[arg(long, default_value = "order_study.csv")]
    out: PathBuf,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::StressTest(args) => cmd_stress_test(args),
        Command::OrderStudy(args) => cmd_order_study(args),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn scenario_and_solver(
    config_path: &Option<PathBuf>,
    solver_tol: Option<f64>,
    max_iters: Option<usize>,
) -> Result<(Scenario, SolverConfig)> {
    let config = load_config(config_path)?;
    let scenario = config.scenario()?;
    let mut solver = config.solver();
    if let Some(tol) = solver_tol {
        solver.tolerance = tol;
    }
    if let Some(iters) = max_iters {
        solver.max_iterations = iters;
    }
    Ok((scenario, solver))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(integrator) = args.integrator {
        config.integrator = integrator;
    }
    if let Some(h) = args.h {
        config.h = h;
    }
    if let Some(t_final) = args.t_final {
        config.t_final = t_final;
    }
    if let Some(stride) = args.stride {
        config.sample_stride = stride;
    }
    if let Some(tol) = args.solver_tol {
        config.solver_tolerance = tol;
    }
    if let Some(iters) = args.max_iters {
        config.solver_max_iterations = iters;
    }
    if let Some(out) = args.out {
        config.output = out;
    }

    if args.dump_config {
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(());
    }

    let spec: ExperimentSpec = config.to_spec()?;
    let run = simulate(&spec)?;
    output::write_trajectory_csv(&config.output, &run.samples)?;
    println!(
        "{} h={} steps={} rows={} E0={:.16e} max|dE|={:.3e} max_orth_defect={:.3e} -> {}",
        config.integrator,
        config.h,
        run.stats.steps,
        run.samples.len(),
        run.stats.initial_energy,
        run.stats.max_abs_energy_error,
        run.stats.max_orth_defect,
        config.output.display()
    );
    Ok(())
}

fn csv_sibling(report_path: &Path, integrator: IntegratorKind, h: f64) -> PathBuf {
    let name = format!("stress_{}_h{}.csv", integrator.id(), h);
    match report_path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(name),
        _ => PathBuf::from(name),
    }
}

fn cmd_stress_test(args: StressTestArgs) -> Result<()> {
    let (scenario, solver) =
        scenario_and_solver(&args.config, args.solver_tol, args.max_iters)?;
    let integrators = args.only.unwrap_or_else(|| {
        vec![
            IntegratorKind::LieNewmark,
            IntegratorKind::LieVerlet,
            IntegratorKind::LiemidEa,
        ]
    });
    let step_sizes = args.h.unwrap_or_else(|| DRIFT_STEP_SIZES.to_vec());
    let stride = args.stride.unwrap_or(spindrift::experiments::DEFAULT_SAMPLE_STRIDE);

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for &integrator in &integrators {
        for &h in &step_sizes {
            let mut spec = ExperimentSpec::from_scenario(&scenario, integrator, h, args.t_final);
            spec.sample_stride = stride;
            spec.solver = solver;
            let outcome: Result<_> = (|| {
                let run = simulate(&spec)?;
                let report = analyze_stress_run(integrator, h, args.t_final, &run)?;
                output::write_trajectory_csv(&csv_sibling(&args.out, integrator, h), &run.samples)?;
                Ok(report)
            })();
            match outcome {
                Ok(report) => runs.push(report),
                Err(error) => failures.push(RunFailure {
                    integrator,
                    h,
                    error: error.to_string(),
                }),
            }
        }
    }

    let acceptance = evaluate_acceptance(&runs, args.t_final);
    let report = StressReport {
        t_final: args.t_final,
        runs,
        failures,
        acceptance,
    };
    output::write_json(&args.out, &report)?;

    println!(
        "{:<10} {:>7} {:>13} {:>8} {:>10} {:>10}  verdict",
        "integrator", "h", "slope", "r^2", "rms_resid", "max|dE|"
    );
    for r in &report.runs {
        println!(
            "{:<10} {:>7} {:>13.4e} {:>8.4} {:>10.3e} {:>10.3e}  {}",
            r.integrator.to_string(),
            r.h,
            r.slope,
            r.r_squared,
            r.rms_residual,
            r.max_abs_energy_error,
            r.verdict
        );
    }
    for f in &report.failures {
        println!("{:<10} {:>7}  FAILED: {}", f.integrator.to_string(), f.h, f.error);
    }
    let checks = [
        ("nmb_drift_existence", report.acceptance.nmb_drift_existence),
        ("nmb_quadratic_scaling", report.acceptance.nmb_quadratic_scaling),
        ("vlv_boundedness", report.acceptance.vlv_boundedness),
        ("liemid_drift_ordering", report.acceptance.liemid_drift_ordering),
    ];
    for (name, value) in checks {
        let shown = match value {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "not evaluated",
        };
        println!("check {name}: {shown}");
    }
    println!("report -> {}", args.out.display());

    if !report.failures.is_empty() {
        bail!("{} run(s) failed", report.failures.len());
    }
    if !report.acceptance.all_evaluated_pass() {
        bail!("acceptance checks failed");
    }
    Ok(())
}

fn cmd_order_study(args: OrderStudyArgs) -> Result<()> {
    let (scenario, solver) =
        scenario_and_solver(&args.config, args.solver_tol, args.max_iters)?;
    let integrators = args.integrator.unwrap_or_else(|| {
        vec![
            IntegratorKind::LieNewmark,
            IntegratorKind::LieVerlet,
            IntegratorKind::LiemidEa,
        ]
    });
    let step_sizes = args.h.unwrap_or_else(|| ORDER_STUDY_STEP_SIZES.to_vec());

    let mut fits: Vec<OrderFit> = Vec::new();
    for &integrator in &integrators {
        let fit = order_study(integrator, &step_sizes, args.t_final, &scenario, &solver)
            .with_context(|| format!("order study for {integrator}"))?;
        fits.push(fit);
    }

    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("cannot create output file {}", args.out.display()))?;
    let mut out = std::io::BufWriter::new(file);
    use std::io::Write;
    writeln!(out, "integrator,h,config_error,velocity_error")?;
    for fit in &fits {
        for p in &fit.points {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e}",
                fit.integrator, p.h, p.config_error, p.velocity_error
            )?;
        }
    }
    out.flush()?;

    println!("{}", serde_json::to_string_pretty(&fits)?);
    Ok(())
}
