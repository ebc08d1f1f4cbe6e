//! `slicegap`: slice-sampler chains, couplings, concavity classification,
//! discretized level-kernel spectral gaps, and distance-bound calculators
//! for a catalog of rotationally structured targets.
//!
//! All randomness comes from explicit `--seed` values; reruns with the same
//! flags produce byte-identical files. Exit codes: 0 success (all suite
//! checks passed), 1 runtime failure or failed suite checks, 2 usage error.

mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slicegap::analysis::{classify_lambda, min_lambda_k, mixing_iterations, tv_bound, DEFAULT_GRID_SIZE};
use slicegap::geometry::norm;
use slicegap::sampler::{run_chain, run_coupled, run_level_chain, DEFAULT_BURN_IN};
use slicegap::targets::TargetDensity;

use report::{
    chain_csv, chain_json, couple_csv, level_csv, level_json, to_json, write_atomic,
    ClassifyReport, WassersteinReport,
};

#[derive(Parser)]
#[command(name = "slicegap", version, about, propagate_version = true)]
struct Cli {
    /// RNG seed; all randomness is explicit and reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Output serialization (default: csv for traces, json for reports).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the slice sampler and write the chain trace.
    Sample(SampleArgs),
    /// Run the auxiliary level chain and write its trace.
    Levelchain(LevelArgs),
    /// Run the coupled chain pair; write a distance trace and bound report.
    Couple(CoupleArgs),
    /// Classify the target's level-set function into its concavity class.
    Classify(ClassifyArgs),
    /// Estimate the level-kernel spectral gap on a discretization grid.
    Gap(GapArgs),
    /// Closed-form mixing and total-variation bound calculators.
    Bounds(BoundsArgs),
    /// Run a named experiment suite or a JSON manifest file.
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct TargetArgs {
    /// Target family: gaussian | exponential | genexp | volcano | bimodal.
    #[arg(long)]
    target: String,
    /// Dimension (>= 1).
    #[arg(long)]
    dim: usize,
    /// Rate parameter for exponential / genexp.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Norm exponent for genexp.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Number of recorded steps.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Discarded warm-up steps.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burnin: usize,
    /// Initial state, comma-separated (default: first basis vector).
    #[arg(long)]
    x0: Option<String>,
}

#[derive(Args)]
struct LevelArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Number of recorded steps.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Discarded warm-up steps.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burnin: usize,
    /// Initial level in (0, t_max) (default: t_max / 2).
    #[arg(long)]
    t0: Option<f64>,
}

#[derive(Args)]
struct CoupleArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// First endpoint, comma-separated (default: first basis vector).
    #[arg(long)]
    x0: Option<String>,
    /// Second endpoint, comma-separated (default: origin).
    #[arg(long)]
    y0: Option<String>,
    /// One-step replicates for the upper/lower bound estimates.
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    /// Coupled-path length for the decay trace.
    #[arg(long, default_value_t = 12)]
    steps: usize,
    /// Replicates averaged per path step.
    #[arg(long, default_value_t = 4000)]
    path_reps: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Single class index to test (default: the minimal member class).
    #[arg(long)]
    k: Option<usize>,
    /// Largest class index searched for the minimum.
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Classifier grid size.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Discretization grid size, within [16, 2048].
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Largest class index consulted for the lower bound.
    #[arg(long, default_value_t = 12)]
    kmax: usize,
    /// Lowest discretized level (default: t_max * 1e-8).
    #[arg(long = "t-lo")]
    t_lo: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(subcommand)]
    which: BoundsCmd,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Iterations until the Wasserstein bound w0 (1 - 1/(d+1))^n drops below eps.
    Mixing {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        w0: f64,
    },
    /// Total-variation bound (1 - gap)^n * chi.
    Tv {
        #[arg(long)]
        gap: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        chi: f64,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// Built-in suite name or path to a JSON manifest.
    name: String,
}

enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<slicegap::Error> for CliError {
    fn from(e: slicegap::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Sample(args) => cmd_sample(&cli, args).map(|()| true),
        Command::Levelchain(args) => cmd_levelchain(&cli, args).map(|()| true),
        Command::Couple(args) => cmd_couple(&cli, args).map(|()| true),
        Command::Classify(args) => cmd_classify(&cli, args).map(|()| true),
        Command::Gap(args) => cmd_gap(&cli, args).map(|()| true),
        Command::Bounds(args) => cmd_bounds(args).map(|()| true),
        Command::Suite(args) => cmd_suite(&cli, args),
    }
}

/// Shared by the CLI flags and manifest target specs.
pub(crate) fn build_target(
    name: &str,
    dim: usize,
    alpha: f64,
    gamma: f64,
) -> Result<TargetDensity, String> {
    if dim < 1 {
        return Err("--dim must be at least 1".into());
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err("--alpha must be positive and finite".into());
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err("--gamma must be positive and finite".into());
    }
    match name {
        "gaussian" => Ok(TargetDensity::gaussian(dim)),
        "exponential" => Ok(TargetDensity::exponential(dim, alpha)),
        "genexp" => Ok(TargetDensity::gen_exponential(dim, alpha, gamma)),
        "volcano" => Ok(TargetDensity::volcano(dim)),
        "bimodal" => Ok(TargetDensity::bimodal(dim)),
        other => Err(format!(
            "unknown target `{other}` (expected gaussian, exponential, genexp, volcano, bimodal)"
        )),
    }
}

impl TargetArgs {
    fn build(&self) -> Result<TargetDensity, CliError> {
        build_target(&self.target, self.dim, self.alpha, self.gamma).map_err(usage)
    }
}

fn target_label(target: &TargetDensity) -> String {
    format!("{}-{}d", target.name, target.d)
}

fn parse_vec(s: &str, d: usize, flag: &str) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| usage(format!("--{flag}: {e}")))?;
    if v.len() != d {
        return Err(usage(format!(
            "--{flag} has {} components, expected {d}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(usage(format!("--{flag} must be finite")));
    }
    Ok(v)
}

fn basis(d: usize, v: f64) -> Vec<f64> {
    let mut x = vec![0.0; d];
    x[0] = v;
    x
}

fn write_and_announce(path: &Path, contents: &str, rows: usize) -> Result<(), CliError> {
    write_atomic(path, contents)?;
    println!("wrote {} ({rows} rows)", path.display());
    Ok(())
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> Result<(), CliError> {
    let target = args.target.build()?;
    let x0 = match &args.x0 {
        Some(s) => parse_vec(s, target.d, "x0")?,
        None => basis(target.d, 1.0),
    };
    if target.rho(&x0) <= 0.0 {
        return Err(usage("--x0 lies outside the target's support"));
    }
    let trace = run_chain(&target, &x0, args.n, args.burnin, cli.seed)?;
    let label = target_label(&target);
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => write_and_announce(
            &cli.out.join(format!("{label}-chain.csv")),
            &chain_csv(&trace),
            trace.states.len(),
        ),
        Format::Json => write_and_announce(
            &cli.out.join(format!("{label}-chain.json")),
            &chain_json(&trace)?,
            trace.states.len(),
        ),
    }
}

fn cmd_levelchain(cli: &Cli, args: &LevelArgs) -> Result<(), CliError> {
    let target = args.target.build()?;
    let t_max = target.ell.t_max;
    let t0 = args.t0.unwrap_or(0.5 * t_max);
    if !(t0 > 0.0 && t0 < t_max) {
        return Err(usage(format!("--t0 must lie in (0, {t_max})")));
    }
    let trace = run_level_chain(&target.ell, t0, args.n, args.burnin, cli.seed)?;
    let label = target_label(&target);
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => write_and_announce(
            &cli.out.join(format!("{label}-levels.csv")),
            &level_csv(&trace),
            trace.levels.len(),
        ),
        Format::Json => write_and_announce(
            &cli.out.join(format!("{label}-levels.json")),
            &level_json(&trace)?,
            trace.levels.len(),
        ),
    }
}

fn cmd_couple(cli: &Cli, args: &CoupleArgs) -> Result<(), CliError> {
    let target = args.target.build()?;
    let profile = target.profile.clone().ok_or_else(|| {
        usage(format!(
            "target `{}` is not rotationally invariant with decreasing radial \
             profile; couple supports gaussian, exponential, genexp",
            target.name
        ))
    })?;
    let x0 = match &args.x0 {
        Some(s) => parse_vec(s, target.d, "x0")?,
        None => basis(target.d, 1.0),
    };
    let y0 = match &args.y0 {
        Some(s) => parse_vec(s, target.d, "y0")?,
        None => vec![0.0; target.d],
    };

    let ub = slicegap::analysis::wasserstein_coupling_ub(&profile, &x0, &y0, args.reps, cli.seed)?;
    let lb = slicegap::analysis::wasserstein_dual_lb(
        &profile,
        &x0,
        &y0,
        args.reps,
        cli.seed.wrapping_add(1),
    )?;
    let stats = run_coupled(
        &profile,
        &x0,
        &y0,
        args.steps,
        args.path_reps,
        cli.seed.wrapping_add(2),
    )?;

    let label = target_label(&target);
    let report = WassersteinReport {
        target: label.clone(),
        x_norm: norm(&x0),
        y_norm: norm(&y0),
        ub: ub.value,
        ub_se: ub.std_error,
        lb: lb.value,
        lb_se: lb.std_error,
    };
    let rendered = match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let s = to_json(&report)?;
            write_atomic(&cli.out.join(format!("{label}-wasserstein.json")), &s)?;
            s
        }
        Format::Csv => {
            let s = report.to_csv();
            write_atomic(&cli.out.join(format!("{label}-wasserstein.csv")), &s)?;
            s
        }
    };
    write_atomic(
        &cli.out.join(format!("{label}-couple.csv")),
        &couple_csv(&stats),
    )?;
    print!("{rendered}");
    Ok(())
}

fn cmd_classify(cli: &Cli, args: &ClassifyArgs) -> Result<(), CliError> {
    let target = args.target.build()?;
    if args.grid < 8 {
        return Err(usage("--grid must be at least 8"));
    }
    if let Some(k) = args.k {
        if k < 1 {
            return Err(usage("--k must be at least 1"));
        }
    }
    if args.kmax < 1 {
        return Err(usage("--kmax must be at least 1"));
    }
    let ell = &target.ell;
    let k_min = min_lambda_k(ell, args.kmax)?;
    let k = args.k.unwrap_or_else(|| k_min.unwrap_or(args.kmax));
    let member = classify_lambda(ell, k, args.grid)?.member;
    let report = ClassifyReport {
        target: target_label(&target),
        k,
        member,
        k_min,
    };
    emit_report(cli, &report.target, "classify", &to_json(&report)?, &report.to_csv())
}

fn cmd_gap(cli: &Cli, args: &GapArgs) -> Result<(), CliError> {
    if !(16..=2048).contains(&args.grid) {
        return Err(usage("--grid must lie within [16, 2048]"));
    }
    if args.kmax < 1 {
        return Err(usage("--kmax must be at least 1"));
    }
    let target = args.target.build()?;
    if let Some(t_lo) = args.t_lo {
        if !(t_lo > 0.0 && t_lo < target.ell.t_max) {
            return Err(usage(format!(
                "--t-lo must lie in (0, {})",
                target.ell.t_max
            )));
        }
    }
    let label = target_label(&target);
    let (report, _) = suites::gap_report(&target.ell, &label, args.grid, args.kmax, args.t_lo)?;
    emit_report(cli, &label, "gap", &to_json(&report)?, &report.to_csv())
}

fn emit_report(
    cli: &Cli,
    label: &str,
    kind: &str,
    json: &str,
    csv: &str,
) -> Result<(), CliError> {
    let (contents, ext) = match cli.format.unwrap_or(Format::Json) {
        Format::Json => (json, "json"),
        Format::Csv => (csv, "csv"),
    };
    write_atomic(&cli.out.join(format!("{label}-{kind}.{ext}")), contents)?;
    print!("{contents}");
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let value = match args.which {
        BoundsCmd::Mixing { dim, eps, w0 } => {
            let iterations =
                mixing_iterations(dim, eps, w0).map_err(|e| usage(e.to_string()))?;
            serde_json::json!({
                "kind": "mixing",
                "dim": dim,
                "eps": eps,
                "w0": w0,
                "iterations": iterations,
            })
        }
        BoundsCmd::Tv { gap, n, chi } => {
            let bound = tv_bound(gap, n, chi).map_err(|e| usage(e.to_string()))?;
            serde_json::json!({
                "kind": "tv",
                "gap": gap,
                "n": n,
                "chi": chi,
                "bound": bound,
            })
        }
    };
    print!("{}", to_json(&value)?);
    Ok(())
}

fn cmd_suite(cli: &Cli, args: &SuiteArgs) -> Result<bool, CliError> {
    let manifest = if suites::is_builtin(&args.name) {
        suites::builtin_manifest(&args.name).expect("builtin exists")
    } else if Path::new(&args.name).is_file() {
        let raw = std::fs::read_to_string(&args.name)?;
        let man: suites::ExperimentManifest = serde_json::from_str(&raw)
            .map_err(|e| usage(format!("invalid manifest {}: {e}", args.name)))?;
        if !suites::is_builtin(&man.suite) {
            return Err(usage(format!(
                "unknown suite `{}` (expected one of: {})",
                man.suite,
                suites::SUITE_NAMES.join(", ")
            )));
        }
        man
    } else {
        return Err(usage(format!(
            "unknown suite `{}` (expected one of: {}; or a manifest file path)",
            args.name,
            suites::SUITE_NAMES.join(", ")
        )));
    };

    let out_root = manifest.out.clone().unwrap_or_else(|| cli.out.clone());
    let checks = suites::run_suite(&manifest, &out_root).map_err(CliError::Runtime)?;
    let mut passed = 0usize;
    for c in &checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", c.name, c.detail);
        if c.pass {
            passed += 1;
        }
    }
    println!(
        "suite {}: {passed}/{} checks passed; wrote {}",
        manifest.suite,
        checks.len(),
        out_root.join(&manifest.suite).join("summary.csv").display()
    );
    Ok(passed == checks.len())
}
