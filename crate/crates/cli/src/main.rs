//! `macjam`: scenario-driven front end to the jamming-game library.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a library result breaks
//! one of its own postconditions.

mod reports;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use macjam::dynamics::{run_dynamics_with_rule, JammerRule, PlayOrder};
use macjam::equilibrium::{
    best_response_value, equilibrium_family, feasibility_window, is_in_family, verify_saddle,
};
use macjam::mixed::{compare_mixed_vs_pure, gamma_functional, utility_maximizing_covariance};
use macjam::report::{to_csv, to_json, CsvTable};
use macjam::sweep::{run_sweep, SweepOutput, SweepParameter, SweepSpec};
use macjam::{
    error_probability, simulate_error, simulate_mixed_error, EquilibriumParameter,
    GaussianJammerCovariance, McConfig, PureStrategyProfile, SaddleAudit, Scenario, ScenarioFile,
};

use reports::{AggregateReport, EquilibriumReport, McReport, SaddleSummary};

#[derive(Debug, Parser)]
#[command(
    name = "macjam",
    version,
    about = "Audit the jamming game between a MAC detection network and a multi-antenna jammer"
)]
struct Cli {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Destination file; "stdout" or omitted writes to standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print (a, b, sigma2, c) and the feasibility window.
    Aggregate,
    /// Evaluate a member of the pure-strategy equilibrium family.
    Equilibrium(EpsilonArg),
    /// Run alternating best-response dynamics.
    Dynamics(DynamicsArgs),
    /// Audit both saddle-point inequalities for a family member.
    Saddle(SaddleArgs),
    /// Compare a Gaussian jammer against the pure equilibrium.
    Mixed(MixedArgs),
    /// Monte Carlo estimate of the error probability with a closed-form check.
    Mc(McArgs),
    /// Sweep a scalar scenario field.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct EpsilonArg {
    /// Family parameter, comma separated; defaults to the zero vector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    epsilon: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    NetworkFirst,
    JammerFirst,
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda0: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w0: Vec<f64>,
    #[arg(long, value_enum)]
    order: OrderArg,
    #[arg(long, default_value_t = 16)]
    max_half_steps: usize,
    /// Replace the stationary jammer by a grid maximizer with this many points.
    #[arg(long)]
    empirical_jammer: Option<usize>,
}

#[derive(Debug, Args)]
struct SaddleArgs {
    #[command(flatten)]
    epsilon: EpsilonArg,
    /// Uniform samples from the power ball (defaults to the scenario setting).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threshold_points: Option<usize>,
    /// Extra jammer vector to report, comma separated; may be repeated.
    #[arg(long, allow_hyphen_values = true)]
    probe: Vec<String>,
}

#[derive(Debug, Args)]
struct MixedArgs {
    /// Covariance JSON file: {"dimension": n, "values": [row-major entries]}.
    #[arg(
        long,
        conflicts_with = "max_utility",
        required_unless_present = "max_utility"
    )]
    covariance: Option<PathBuf>,
    /// Use the covariance that puts all power along b.
    #[arg(long)]
    max_utility: bool,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "covariance"
    )]
    w: Option<Vec<f64>>,
    #[arg(long)]
    covariance: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep specification JSON: {"parameter", "values", "outputs"}.
    #[arg(long, conflicts_with_all = ["param", "values", "outputs"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl From<macjam::Error> for CliError {
    fn from(e: macjam::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

trait Report: CsvTable {
    fn json(&self) -> serde_json::Result<String>;
}

impl<T: Serialize + CsvTable> Report for T {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
}

fn has_non_finite(text: &str) -> bool {
    text.split(|c: char| c == ',' || c == ':' || c == '[' || c == ']' || c.is_whitespace())
        .any(|t| matches!(t, "NaN" | "inf" | "-inf"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal invariant breach: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Input("--scenario <path> is required".into()))?;
    let file = ScenarioFile::load(path)?;
    let report: Box<dyn Report> = match &cli.command {
        Command::Aggregate => Box::new(cmd_aggregate(&file.resolve()?)?),
        Command::Equilibrium(args) => Box::new(cmd_equilibrium(&file.resolve()?, args)?),
        Command::Dynamics(args) => Box::new(cmd_dynamics(&file.resolve()?, args)?),
        Command::Saddle(args) => Box::new(cmd_saddle(&file.resolve()?, args)?),
        Command::Mixed(args) => Box::new(cmd_mixed(&file.resolve()?, args)?),
        Command::Mc(args) => Box::new(cmd_mc(&file.resolve()?, args)?),
        Command::Sweep(args) => Box::new(cmd_sweep(&file, args)?),
    };
    let text = match cli.output {
        Format::Json => report
            .json()
            .map_err(|e| CliError::Internal(e.to_string()))?,
        Format::Csv => to_csv(report.as_ref()),
    };
    if has_non_finite(&text) {
        return Err(CliError::Internal(
            "report contains a non-finite value".into(),
        ));
    }
    match cli.out.as_deref() {
        None | Some("stdout") | Some("-") => print!("{text}"),
        Some(dest) => fs::write(dest, text)
            .map_err(|e| CliError::Input(format!("cannot write {dest}: {e}")))?,
    }
    Ok(())
}

fn cmd_aggregate(s: &Scenario) -> CliResult<AggregateReport> {
    let window = feasibility_window(&s.agg, &s.budget).ok();
    Ok(AggregateReport {
        a: s.agg.a,
        b: s.agg.b.clone(),
        sigma2: s.agg.sigma2,
        c: s.agg.c,
        window: window.map(|(lo, hi)| [lo, hi]),
        threshold_bound: s.game.threshold_bound,
    })
}

fn family_profile(
    s: &Scenario,
    epsilon: &Option<Vec<f64>>,
) -> CliResult<(Vec<f64>, PureStrategyProfile)> {
    let param = match epsilon {
        Some(eps) => EquilibriumParameter::new(eps.clone(), &s.agg)?,
        None => EquilibriumParameter::center(&s.agg),
    };
    let profile = equilibrium_family(&param, &s.agg, &s.budget)?;
    Ok((param.epsilon().to_vec(), profile))
}

fn cmd_equilibrium(s: &Scenario, args: &EpsilonArg) -> CliResult<EquilibriumReport> {
    let (epsilon, profile) = family_profile(s, &args.epsilon)?;
    let in_family = is_in_family(&profile, &s.agg, &s.budget, s.game.tolerances.identity)?;
    let pe = error_probability(&profile, &s.agg, &s.priors)?;
    let equilibrium_error = best_response_value(&s.agg, &s.priors);
    if !in_family || (pe - equilibrium_error).abs() > 1e-12 {
        return Err(CliError::Internal(format!(
            "family profile {profile:?} fails membership or value check"
        )));
    }
    Ok(EquilibriumReport {
        epsilon,
        profile,
        error_probability: pe,
        equilibrium_error,
        in_family,
    })
}

fn cmd_dynamics(s: &Scenario, args: &DynamicsArgs) -> CliResult<macjam::DynamicsTrace> {
    let order = match args.order {
        OrderArg::NetworkFirst => PlayOrder::NetworkFirst,
        OrderArg::JammerFirst => PlayOrder::JammerFirst,
    };
    let rule = match args.empirical_jammer {
        Some(grid_points) => JammerRule::Empirical { grid_points },
        None => JammerRule::Stationary,
    };
    let initial = PureStrategyProfile::new(args.lambda0, args.w0.clone());
    let trace = run_dynamics_with_rule(
        &initial,
        order,
        rule,
        &s.agg,
        &s.priors,
        &s.budget,
        args.max_half_steps,
    )?;
    if trace.converged
        && rule == JammerRule::Stationary
        && !is_in_family(
            trace.final_profile(),
            &s.agg,
            &s.budget,
            s.game.tolerances.identity,
        )?
    {
        return Err(CliError::Internal(
            "converged profile is not in the equilibrium family".into(),
        ));
    }
    Ok(trace)
}

fn parse_vector(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("bad number {t:?} in {text:?}: {e}")))
        })
        .collect()
}

fn cmd_saddle(s: &Scenario, args: &SaddleArgs) -> CliResult<SaddleSummary> {
    let (_, profile) = family_profile(s, &args.epsilon.epsilon)?;
    let samples = args.samples.unwrap_or(s.game.jammer_samples);
    let points = args.threshold_points.unwrap_or(s.game.threshold_points);
    let mut audit = SaddleAudit::new(s.game.threshold_bound, points, samples, args.seed)?
        .with_tolerance(s.game.tolerances.saddle);
    for probe in &args.probe {
        audit = audit.with_probe(parse_vector(probe)?);
    }
    let report = verify_saddle(&profile, &s.agg, &s.priors, &s.budget, &audit)?;
    if !report.holds_fc_side {
        return Err(CliError::Internal(format!(
            "fusion-center side of the saddle fails by {}",
            report.fc_side_max_violation
        )));
    }
    Ok(SaddleSummary(report))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovarianceFile {
    dimension: usize,
    values: Vec<f64>,
}

fn load_covariance(s: &Scenario, path: &PathBuf) -> CliResult<GaussianJammerCovariance> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: CovarianceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid covariance file: {e}")))?;
    Ok(GaussianJammerCovariance::from_row_major(
        file.dimension,
        &file.values,
        &s.budget,
    )?)
}

fn cmd_mixed(s: &Scenario, args: &MixedArgs) -> CliResult<macjam::MixedComparison> {
    let cov = match &args.covariance {
        Some(path) => load_covariance(s, path)?,
        None => utility_maximizing_covariance(&s.agg, &s.budget)?,
    };
    let cmp = compare_mixed_vs_pure(&cov, &s.agg, &s.priors)?;
    if cmp.advantage < -1e-12 {
        return Err(CliError::Internal(format!(
            "negative mixed advantage {}",
            cmp.advantage
        )));
    }
    Ok(cmp)
}

fn cmd_mc(s: &Scenario, args: &McArgs) -> CliResult<McReport> {
    let cfg = McConfig::new(args.trials, args.seed).with_workers(args.workers);
    let (mode, check) = match &args.covariance {
        Some(path) => {
            let cov = load_covariance(s, path)?;
            let est = simulate_mixed_error(args.lambda, &cov, &s.network, &s.priors, &cfg)?;
            (
                "mixed",
                est.check(gamma_functional(args.lambda, &cov, &s.agg, &s.priors)?, 4.0),
            )
        }
        None => {
            let w = args.w.clone().unwrap_or_else(|| vec![0.0; s.agg.dim()]);
            let profile = PureStrategyProfile::new(args.lambda, w);
            let est = simulate_error(&profile, &s.network, &s.priors, &cfg)?;
            (
                "pure",
                est.check(error_probability(&profile, &s.agg, &s.priors)?, 4.0),
            )
        }
    };
    Ok(McReport {
        mode: mode.into(),
        threshold: args.lambda,
        check,
    })
}

fn cmd_sweep(file: &ScenarioFile, args: &SweepArgs) -> CliResult<macjam::sweep::SweepTable> {
    let spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<SweepSpec>(&text)
                .map_err(|e| CliError::Input(format!("invalid sweep spec: {e}")))?
        }
        None => {
            let param = args
                .param
                .as_deref()
                .ok_or_else(|| CliError::Input("--param or --spec is required".into()))?;
            let outputs = match &args.outputs {
                Some(names) => names
                    .iter()
                    .map(|n| SweepOutput::parse(n))
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![SweepOutput::EquilibriumError],
            };
            SweepSpec {
                parameter: SweepParameter::parse(param)?,
                values: args.values.clone().unwrap_or_default(),
                outputs,
            }
        }
    };
    Ok(run_sweep(file, &spec)?)
}
