//! Command-line front end: `verify`, `eval`, `probe` and `sweep`.
//!
//! Exit codes: 0 when no check failed, 1 when a check failed or a
//! computation could not be completed, 2 on usage and configuration errors.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ltlab_core::verifier::{run_suite_with, sharpness_probe, CheckContext, Status};
use ltlab_core::{
    change_gauge, evaluate, make_family, moser_functional, FamilyKind, FamilyParams, Functional, Gauge, QuadConfig,
    TestFunction,
};

use config::{apply_config_file, Command, Format, FunctionalChoice, RunConfig, SweepParam};
use output::EvalRecord;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}:{line}: {message}", path.display())]
    Config { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Core(#[from] ltlab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ltlab_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(E::Domain { .. } | E::UnsupportedDimension { .. } | E::InvalidFamily(_) | E::Parse(_)) => 2,
            CliError::Core(E::GaugePath { .. } | E::SingularGauge { .. } | E::Admissibility(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ltlab", version, about = "Numerical checks of the optimal Leray-Trudinger inequality")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run a check suite and write one report per check.
    Verify {
        #[command(flatten)]
        shared: Shared,
        /// core, radial, nonradial, scalars, growth or all.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Evaluate a functional on a family member.
    Eval {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        target: Target,
    },
    /// Follow the Moser functional along a degenerating family.
    Probe {
        #[command(flatten)]
        shared: Shared,
        /// Dimension (alias of --dims with one entry).
        #[arg(long)]
        dim: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        /// Strictly decreasing list in (0, 1).
        #[arg(long)]
        eps: Option<String>,
        /// hardy_eps, moser or loglog.
        #[arg(long)]
        family: Option<String>,
    },
    /// Evaluate a functional over a parameter range.
    Sweep {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        target: Target,
        /// eps, amplitude, q, alpha or beta.
        #[arg(long)]
        param: Option<String>,
        /// lo:hi:steps.
        #[arg(long)]
        range: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Shared {
    /// Comma-separated dimensions.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Overrides every check tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (default: from the --out extension, else csv).
    #[arg(long)]
    format: Option<String>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Target {
    /// leray, hardy, energy:grad_n_x1|mixed_link2|ft_weight, lq, moser or ft.
    #[arg(long)]
    functional: Option<String>,
    /// Family descriptor, e.g. `kind=bump;eps=0.5;amplitude=1`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let (command, shared, mut flags): (Command, Shared, Vec<(&str, Option<String>)>) = match cli.command {
        Cmd::Verify { shared, suite } => (Command::Verify, shared, vec![("suite", suite)]),
        Cmd::Eval { shared, target } => (Command::Eval, shared, target_flags(target)),
        Cmd::Probe {
            shared,
            dim,
            beta,
            alpha,
            eps,
            family,
        } => (
            Command::Probe,
            shared,
            vec![("dim", dim), ("beta", beta), ("alpha", alpha), ("eps", eps), ("probe_family", family)],
        ),
        Cmd::Sweep {
            shared,
            target,
            param,
            range,
        } => {
            let mut f = target_flags(target);
            f.push(("param", param));
            f.push(("range", range));
            (Command::Sweep, shared, f)
        }
    };
    let mut cfg = RunConfig::new(command);
    if let Some(path) = &shared.config {
        apply_config_file(&mut cfg, path)?;
        cfg.command = command;
    }
    flags.extend([
        ("dims", shared.dims),
        ("seed", shared.seed),
        ("tol", shared.tol),
        ("format", shared.format),
        ("out", shared.out.map(|p| p.to_string_lossy().into_owned())),
    ]);
    let mut probe_family = None;
    for (key, value) in flags {
        let Some(value) = value else { continue };
        if key == "probe_family" {
            probe_family = Some(value);
            continue;
        }
        cfg.set(key, &value).map_err(|m| CliError::Usage(format!("--{key}: {m}")))?;
    }
    if let Some(kind) = probe_family {
        let kind: FamilyKind = kind.parse()?;
        cfg.family = Some(FamilyParams::new(kind, 0.5, 1.0));
    }
    Ok(cfg)
}

fn target_flags(t: Target) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("functional", t.functional),
        ("family", t.family),
        ("q", t.q),
        ("alpha", t.alpha),
        ("beta", t.beta),
    ]
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match build_config(cli).and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ltlab: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("LTLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs a fully resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command {
        Command::Verify => verify(cfg),
        Command::Eval => eval(cfg),
        Command::Probe => probe(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn emit(cfg: &RunConfig, bytes: Vec<u8>) -> Result<(), CliError> {
    if let Some(path) = &cfg.out_path {
        output::write_file(path, &bytes)?;
    }
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let dims = cfg.dimensions()?;
    let ctx = CheckContext {
        tol: cfg.tol,
        seed: cfg.seed,
        ..CheckContext::default()
    };
    let reports = run_suite_with(cfg.suite, &dims, &ctx);
    let mut counts = [0usize; 3];
    for r in &reports {
        counts[match r.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }] += 1;
        println!(
            "{:<12} {:<18} n={} margin={:+.3e} tol={:.1e} {}",
            r.status.to_string(),
            r.check_id,
            r.dim,
            r.margin,
            r.tolerance,
            r.family
        );
    }
    println!(
        "suite {}: {} checks, {} pass, {} fail, {} inconclusive",
        cfg.suite,
        reports.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    let bytes = match cfg.output_format() {
        Format::Csv => output::reports_csv(&reports)?,
        Format::Json => output::reports_json(&reports)?,
    };
    emit(cfg, bytes)?;
    Ok(if counts[1] > 0 { 1 } else { 0 })
}

/// Evaluates the configured functional on `u` (a family member in the `u`
/// gauge). Energies read `u` in their own gauge after the standard
/// transforms; `ft` and `ft_weight` read the member as the function `g` of
/// the identity they belong to.
fn evaluate_choice(cfg: &RunConfig, u: &TestFunction, q: Option<f64>, alpha: Option<f64>, beta: Option<f64>) -> Result<(String, f64, f64, bool), CliError> {
    let n = u.dim().as_f64();
    let qc = QuadConfig::default();
    let plain = |f: &TestFunction, func: Functional| -> Result<(String, f64, f64, bool), CliError> {
        let v = evaluate(f, func, &qc)?;
        Ok((cfg.functional.to_string(), v.value, v.quad_error, false))
    };
    match cfg.functional {
        FunctionalChoice::Leray => plain(u, Functional::Leray),
        FunctionalChoice::Hardy => plain(u, Functional::Hardy),
        FunctionalChoice::Energy(k) => {
            let f = match k.gauge() {
                Gauge::W if k == ltlab_core::EnergyKind::FtWeight => u.relabel(Gauge::W),
                g => change_gauge(&change_gauge(u, Gauge::V)?, g)?,
            };
            plain(&f, Functional::Energy(k))
        }
        FunctionalChoice::Ft => {
            let zeta = change_gauge(&u.relabel(Gauge::W), Gauge::Zeta)?;
            plain(&zeta, Functional::Ft)
        }
        FunctionalChoice::Lq => {
            let q = q.ok_or_else(|| CliError::Usage("lq needs --q".into()))?;
            let beta = beta.unwrap_or(0.0);
            let v = evaluate(u, Functional::LqPower { q, beta }, &qc)?;
            let vol = u.dim().unit_ball_volume();
            let p = (v.value / vol).max(0.0);
            let norm = p.powf(1.0 / q);
            let err = if p > 0.0 { norm * (v.quad_error / vol) / (q * p) } else { 0.0 };
            Ok((format!("lq:q={q}:beta={beta}"), norm, err, false))
        }
        FunctionalChoice::Moser => {
            let alpha = alpha.ok_or_else(|| CliError::Usage("moser needs --alpha".into()))?;
            let beta = beta.unwrap_or(1.0 / n);
            let m = moser_functional(u, alpha, beta, &qc)?;
            Ok((format!("moser:alpha={alpha}:beta={beta}"), m.value, m.quad_error, m.overflow))
        }
    }
}

fn eval(cfg: &RunConfig) -> Result<i32, CliError> {
    let family = cfg.family_or_default();
    let mut records = Vec::new();
    for dim in cfg.dimensions()? {
        let u = make_family(&family, dim)?;
        let (functional, value, quad_error, overflow) = evaluate_choice(cfg, &u, cfg.q, cfg.alpha, cfg.beta)?;
        println!("{functional} n={} {}: {value:.16e} +/- {quad_error:.1e}{}", dim, u.descriptor(), if overflow { " (overflow)" } else { "" });
        records.push(EvalRecord {
            param: None,
            param_value: None,
            functional,
            dim: dim.get(),
            family: u.descriptor().to_string(),
            value,
            quad_error,
            overflow,
        });
    }
    let bytes = match cfg.output_format() {
        Format::Csv => output::eval_csv(&records, false)?,
        Format::Json => output::json(&records)?,
    };
    emit(cfg, bytes)?;
    Ok(0)
}

fn probe(cfg: &RunConfig) -> Result<i32, CliError> {
    let dims = cfg.dimensions()?;
    let [dim] = dims[..] else {
        return Err(CliError::Usage("probe takes exactly one dimension".into()));
    };
    let n = dim.as_f64();
    let beta = cfg.beta.unwrap_or(1.0 / n);
    let threshold = ltlab_core::structural_constants(dim).moser_threshold;
    let alpha = cfg.alpha.unwrap_or(0.5 * threshold);
    let kind = cfg.family.as_ref().map_or(FamilyKind::Loglog, |f| f.kind);
    let report = sharpness_probe(dim, beta, alpha, &cfg.eps_grid, kind, &QuadConfig::default())?;
    for k in 0..report.values.len() {
        println!(
            "eps={:<8} value={:.6e} energy={:.6e}{}",
            report.eps_grid[k],
            report.values[k],
            report.energies[k],
            if report.overflow[k] { " overflow" } else { "" }
        );
    }
    println!("verdict: {} (n={}, beta={beta}, alpha={alpha}, family={kind})", report.verdict, dim);
    println!("note: {}", report.note);
    let bytes = match cfg.output_format() {
        Format::Csv => output::probe_csv(&report)?,
        Format::Json => output::json(&report)?,
    };
    emit(cfg, bytes)?;
    Ok(0)
}

fn sweep(cfg: &RunConfig) -> Result<i32, CliError> {
    let param = cfg.param.ok_or_else(|| CliError::Usage("sweep needs --param".into()))?;
    let range = cfg.range.ok_or_else(|| CliError::Usage("sweep needs --range lo:hi:steps".into()))?;
    let base = cfg.family_or_default();
    let mut records = Vec::new();
    for dim in cfg.dimensions()? {
        for x in range.points() {
            let mut family = base.clone();
            let (mut q, mut alpha, mut beta) = (cfg.q, cfg.alpha, cfg.beta);
            match param {
                SweepParam::Eps => family.eps = x,
                SweepParam::Amplitude => family.amplitude = x,
                SweepParam::Q => q = Some(x),
                SweepParam::Alpha => alpha = Some(x),
                SweepParam::Beta => beta = Some(x),
            }
            let u = make_family(&family, dim)?;
            let (functional, value, quad_error, overflow) = evaluate_choice(cfg, &u, q, alpha, beta)?;
            println!("{}={x:.6e} {functional} n={}: {value:.16e}", param.name(), dim);
            records.push(EvalRecord {
                param: Some(param.name().to_string()),
                param_value: Some(x),
                functional,
                dim: dim.get(),
                family: u.descriptor().to_string(),
                value,
                quad_error,
                overflow,
            });
        }
    }
    let bytes = match cfg.output_format() {
        Format::Csv => output::eval_csv(&records, true)?,
        Format::Json => output::json(&records)?,
    };
    emit(cfg, bytes)?;
    Ok(0)
}
