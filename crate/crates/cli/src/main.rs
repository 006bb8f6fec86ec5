use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logsl::error::Error;
use logsl::experiments::{preset, run_experiment, write_outputs, ExperimentConfig, InitialKind, Report};
use logsl::integrator::SchemeKind;
use logsl::linear::{diagonalize, block_matrix, global_rate, mode_rate, RegimeKind};
use logsl::resonance::{scan_with_budget, DEFAULT_BUDGET};
use logsl::verify::{run_suite, Suite};

const OUTPUT_ENV: &str = "LOGSL_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "output";

#[derive(Parser)]
#[command(name = "logsl", version, about = "Plane-wave stability toolkit for the logarithmic Schrödinger–Langevin equation")]
struct Cli {
    /// More detail on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only errors on standard error.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a split-step simulation and write CSV and TOML outputs.
    Simulate(SimulateArgs),
    /// Print the regime, eigenvalues and damping rates of the linearized shells.
    Analyze(AnalyzeArgs),
    /// Scan small divisors of the linearized frequencies.
    Scan(ScanArgs),
    /// Run a self-check suite: conservation, invariance, order, blocks or all.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Named configuration to start from.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Grid points per axis.
    #[arg(short = 'K', long = "points")]
    points: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Initial condition: paper-psi0, perturbed-plane-wave or coefficients.
    #[arg(long)]
    initial: Option<InitialKind>,
    /// lie-trotter or strang.
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Run name used as the output file prefix.
    #[arg(long)]
    name: Option<String>,
    /// Allow lambda <= -1/2.
    #[arg(long)]
    exploratory: bool,
    /// Output directory; defaults to $LOGSL_OUTPUT_DIR, then the config value, then ./output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long)]
    mu: f64,
    /// Shells to list, as `a..b` (inclusive) or a single `n`.
    #[arg(long, default_value = "1..10")]
    n_range: String,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Largest total number of indices `p + q`.
    #[arg(short, long)]
    r: usize,
    #[arg(long)]
    n_max: u64,
    /// Largest number of combinations to enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Directory for the CSV; without it the CSV goes to standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(default_value = "all")]
    suite: Suite,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }

    fn runtime(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn verification(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }
}

/// Classifies a library error raised while running.
fn classify(err: Error) -> Failure {
    match err.root() {
        Error::InvalidParam(_) | Error::Config(_) | Error::BudgetExceeded { .. } => Failure::validation(err),
        _ => Failure::runtime(err),
    }
}

struct Ui {
    verbose: u8,
    quiet: bool,
}

impl Ui {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn detail(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let ui = Ui { verbose: cli.verbose, quiet: cli.quiet };
    let result = match cli.command {
        Command::Simulate(args) => simulate(args, &ui),
        Command::Analyze(args) => analyze(args),
        Command::Scan(args) => scan(args, &ui),
        Command::Verify(args) => verify(args, &ui),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn resolve_config(args: &SimulateArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name).map_err(Failure::validation)?,
        (None, Some(path)) => ExperimentConfig::load(path).map_err(Failure::validation)?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.mu {
        cfg.mu = v;
    }
    if let Some(v) = args.points {
        cfg.points = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = args.initial {
        cfg.initial = v;
    }
    if let Some(v) = args.scheme {
        cfg.scheme = v;
    }
    if let Some(v) = &args.name {
        cfg.name = v.clone();
    }
    cfg.exploratory |= args.exploratory;
    cfg.validate().map_err(|e| match e {
        Error::InvalidParam(msg) => {
            Failure::validation(format!("invalid parameter: {}", msg.replace("the exploratory flag", "--exploratory")))
        }
        e => Failure::validation(e),
    })?;
    Ok(cfg)
}

fn output_dir(flag: Option<&Path>, cfg: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn simulate(args: SimulateArgs, ui: &Ui) -> Result<(), Failure> {
    let cfg = resolve_config(&args)?;
    let dir = output_dir(args.output.as_deref(), cfg.output_dir.as_deref());
    ui.info(format!("# effective configuration\n{}", cfg.to_toml()));
    ui.detail(format!("{} steps, writing to {}", cfg.steps(), dir.display()));
    let report = run_experiment(&cfg).map_err(classify)?;
    let files = write_outputs(&report, &dir).map_err(Failure::runtime)?;
    print_report(&report);
    for p in [&files.actions, &files.diagnostics, &files.summary, &files.config] {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn print_report(report: &Report) {
    let d = &report.diagnostics;
    println!("l2 drift          {:.3e}", d.l2_drift);
    if let Some(e) = d.energy_drift {
        println!("energy drift      {e:.3e}");
    }
    println!("branch warnings   {}", d.branch_warnings);
    let rates = &report.rates;
    if rates.applicable {
        if let (Some(a), Some(b)) = (rates.global_alpha, rates.global_beta) {
            println!("global rate       alpha = {a:.6}, beta = {b}");
        }
        println!("{:>5} {:>12} {:>12} {:>12} {:>10}", "mode", "measured", "predicted", "cascade", "r2");
        for row in &rates.rows {
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
            println!(
                "{:>5} {:>12} {:>12} {:>12} {:>10}",
                row.mode,
                fmt(row.fit.map(|f| f.alpha_hat)),
                fmt(row.alpha_theory),
                fmt(row.alpha_cascade),
                fmt(row.fit.map(|f| f.r_squared)),
            );
        }
    } else {
        println!("rates: {}", rates.note);
    }
    for c in &report.checks {
        println!("{} {}: {:.3e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value);
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::validation(format!("n range {s:?} must look like 1..10 or 3"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(Failure::validation(format!("n range {s:?} must satisfy 1 <= a <= b")));
    }
    Ok((lo, hi))
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let (lo, hi) = parse_range(&args.n_range)?;
    let (lambda, mu) = (args.lambda, args.mu);
    println!(
        "{:>6} {:>12} {:>26} {:>26} {:>12} {:>5}",
        "n", "regime", "eigenvalue_1", "eigenvalue_2", "alpha_n", "beta"
    );
    for n in lo..=hi {
        let block = block_matrix(n, lambda, mu).map_err(Failure::validation)?;
        let d = diagonalize(&block);
        let regime = match d.regime.kind {
            RegimeKind::Oscillatory => "oscillatory",
            RegimeKind::Jordan => "jordan",
            RegimeKind::Overdamped => "overdamped",
        };
        let [e1, e2] = block.eigenvalues();
        let (alpha, beta) = if mu > 0.0 {
            let r = mode_rate(n, lambda, mu).map_err(Failure::validation)?;
            (format!("{:.9}", r.alpha_j), r.beta_j.to_string())
        } else {
            ("-".into(), "-".into())
        };
        println!(
            "{n:>6} {regime:>12} {:>26} {:>26} {alpha:>12} {beta:>5}",
            format!("{:.6}{:+.6}i", e1.re, e1.im),
            format!("{:.6}{:+.6}i", e2.re, e2.im),
        );
    }
    if mu > 0.0 {
        let (alpha, beta) = global_rate(lambda, mu).map_err(Failure::validation)?;
        println!("global alpha = {alpha:.9}, beta = {beta}");
    } else {
        println!("global: no damping (mu = 0)");
    }
    Ok(())
}

fn scan(args: ScanArgs, ui: &Ui) -> Result<(), Failure> {
    let result = scan_with_budget(args.lambda, args.r, args.n_max, args.budget).map_err(|e| match e {
        Error::BudgetExceeded { .. } => {
            Failure::validation(format!("{e}; lower --n-max or --r, or raise --budget"))
        }
        e => classify(e),
    })?;
    let output = args.output.or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    match &output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("scan_r{}_n{}.csv", args.r, args.n_max));
            result.write_csv_file(&path).map_err(Failure::runtime)?;
            println!("wrote {}", path.display());
        }
        None => result.write_csv(std::io::stdout().lock()).map_err(Failure::runtime)?,
    }
    let summary = [
        format!("# lambda = {}, r = {}, n_max = {}", result.lambda, result.r, result.n_max),
        format!("# combinations = {}, cancelling = {}", result.combinations, result.cancelling),
        format!("# min divisor = {:e}", result.min_divisor().unwrap_or(f64::NAN)),
        match (result.gamma_fit, result.alpha_fit) {
            (Some(g), Some(a)) => format!("# fit: gamma = {g:.6e}, alpha = {a:.6}"),
            _ => "# fit: fewer than two buckets with mu3 >= 2".into(),
        },
    ];
    // keep stdout pure CSV when the table goes there
    for line in &summary {
        if output.is_some() {
            println!("{line}");
        } else {
            ui.info(line);
        }
    }
    if !result.anomalies.is_empty() {
        ui.info(format!("# {} non-cancelling divisors at or below the anomaly threshold", result.anomalies.len()));
    }
    Ok(())
}

fn verify(args: VerifyArgs, ui: &Ui) -> Result<(), Failure> {
    ui.detail(format!("running suite {}", args.suite));
    let checks = run_suite(args.suite).map_err(Failure::runtime)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::verification(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
