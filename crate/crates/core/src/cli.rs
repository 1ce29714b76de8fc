//! `evanescent` command line: `cutoff`, `scan`, `fit`, `verify`.
//!
//! Exit codes: 0 success, 1 check or evaluation failure, 2 usage or
//! configuration error. Errors print one line, `error[<kind>]: <message>`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{fit_spacelike_decay, fit_timelike_oscillation};
use crate::config::{ConfigError, GridSpec, OutputFormat, RunConfig, DEFAULTS_HELP};
use crate::evaluate::{Evaluator, Quantity};
use crate::format::{format_sig, json_number};
use crate::geometry::ModeIndex;
use crate::scan::{render_csv, render_json, scan_with_workers, units_metadata, workers_from_env};
use crate::special::KernelBasis;
use crate::verify::{run_verify, SPACELIKE_WINDOW, TIMELIKE_WINDOW};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "evanescent", version, about = "Evanescent-photon two-point functions in an undersized waveguide", after_help = DEFAULTS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Config file (flat key = value, # comments)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Guide width [default: 1]
    #[arg(long)]
    pub b1: Option<f64>,
    /// Guide height, omega_c = pi / b2 [default: 2]
    #[arg(long)]
    pub b2: Option<f64>,
    /// Grid as t0:t1:n,r0:r1:m [default: 0:40:81,0:20:41]
    #[arg(long, value_name = "SPEC")]
    pub grid: Option<String>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Significant digits, 6 to 17 [default: 17]
    #[arg(long)]
    pub precision: Option<usize>,
    /// Quadrature absolute tolerance [default: 1e-12]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Quadrature relative tolerance [default: 1e-10]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Light-cone tolerance on |t^2 - r^2| [default: 0]
    #[arg(long)]
    pub eps_light: Option<f64>,
    /// Write output here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    Spacelike,
    Timelike,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cutoff frequencies for r = 0..R, s = 1..S, ascending
    Cutoff {
        #[command(flatten)]
        common: Common,
        /// Largest r index [default: 1]
        #[arg(long = "modes-r")]
        modes_r: Option<u32>,
        /// Largest s index [default: 2]
        #[arg(long = "modes-s")]
        modes_s: Option<u32>,
    },
    /// Evaluate D or S11 over the grid
    Scan {
        #[command(flatten)]
        common: Common,
        /// D or S11
        #[arg(long, default_value = "D")]
        quantity: Quantity,
        /// quadrature, closed; for S11 also finite_difference, rederived, printed
        #[arg(long, default_value = "quadrature")]
        method: String,
        /// standard_hankel or paper_kernel (closed forms only) [default: standard_hankel]
        #[arg(long)]
        basis: Option<KernelBasis>,
    },
    /// Fit the large-interval law of S11 on the grid points inside the window
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// quadrature, finite_difference, rederived, printed [default: rederived]
        #[arg(long, default_value = "rederived")]
        method: String,
        /// standard_hankel or paper_kernel (closed forms only) [default: standard_hankel]
        #[arg(long)]
        basis: Option<KernelBasis>,
        /// Window a:b in units of 1/omega_c [default: 5:30 spacelike, 10:60 timelike]
        #[arg(long, value_name = "A:B")]
        window: Option<String>,
    },
    /// Run the verification battery and emit a JSON report
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

/// A failure that ends the run, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub code: i32,
}

impl Failure {
    fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
            code: EXIT_USAGE,
        }
    }

    fn check(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
            code: EXIT_FAILURE,
        }
    }

    pub fn line(&self) -> String {
        format!("error[{}]: {}", self.kind, self.message.replace('\n', " "))
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::usage("config", e.to_string())
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage("config", format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(|e| Failure::usage("config", format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = common.b1 {
        cfg.b1 = v;
    }
    if let Some(v) = common.b2 {
        cfg.b2 = v;
    }
    if let Some(g) = &common.grid {
        cfg.grid = GridSpec::parse(g).map_err(|m| ConfigError {
            line: None,
            field: "grid".into(),
            message: m,
        })?;
    }
    if let Some(f) = common.format {
        cfg.output_format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(p) = common.precision {
        cfg.precision = p;
    }
    if let Some(v) = common.abs_tol {
        cfg.quadrature.abs_tol = v;
    }
    if let Some(v) = common.rel_tol {
        cfg.quadrature.rel_tol = v;
    }
    if let Some(v) = common.eps_light {
        cfg.eps_light = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::check("io", e.to_string());
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::check("io", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
    }
}

fn resolve_evaluator(quantity: Quantity, method: &str, basis: Option<KernelBasis>) -> Result<Evaluator, Failure> {
    let closed = matches!(method, "closed" | "rederived" | "printed" | "closed_rederived" | "closed_paper_printed");
    let basis = if closed { basis.or(Some(KernelBasis::StandardHankel)) } else { basis };
    Evaluator::from_parts(quantity, method, basis).map_err(|e| Failure::usage("usage", e.to_string()))
}

fn cmd_cutoff(common: &Common, modes_r: Option<u32>, modes_s: Option<u32>) -> Result<i32, Failure> {
    let mut cfg = load_config(common)?;
    cfg.modes_r = modes_r.unwrap_or(cfg.modes_r);
    cfg.modes_s = modes_s.unwrap_or(cfg.modes_s);
    cfg.validate()?;
    let wg = cfg.waveguide();
    let mut rows = Vec::new();
    for r in 0..=cfg.modes_r {
        for s in 1..=cfg.modes_s {
            let mode = ModeIndex::new(r, s).map_err(|e| Failure::usage("config", e.to_string()))?;
            rows.push((r, s, wg.cutoff_frequency(mode)));
        }
    }
    rows.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let p = cfg.precision;
    let text = match cfg.output_format {
        OutputFormat::Csv => {
            let mut s = format!("omega_c,{}\nr,s,omega\n", format_sig(wg.lowest_cutoff(), p));
            for (r, sx, w) in &rows {
                s.push_str(&format!("{r},{sx},{}\n", format_sig(*w, p)));
            }
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "omega_c": json_number(wg.lowest_cutoff(), p),
                "units": units_metadata(&cfg.context(), p),
                "modes": rows.iter().map(|(r, s, w)| json!({"r": r, "s": s, "omega": json_number(*w, p)})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    emit(common, &text)?;
    Ok(EXIT_OK)
}

fn cmd_scan(common: &Common, quantity: Quantity, method: &str, basis: Option<KernelBasis>) -> Result<i32, Failure> {
    let cfg = load_config(common)?;
    let ev = resolve_evaluator(quantity, method, basis)?;
    let workers = workers_from_env().map_err(|m| Failure::usage("env", m))?;
    let ctx = cfg.context();
    let rows = scan_with_workers(&ctx, &cfg.grid.points(), &ev, workers).map_err(|m| Failure::check("workers", m))?;
    let text = match cfg.output_format {
        OutputFormat::Csv => render_csv(&rows, &ev, cfg.precision),
        OutputFormat::Json => render_json(&rows, &ev, &ctx, cfg.precision),
    };
    emit(common, &text)?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        eprintln!("error[evaluation]: {failed} of {} rows failed; see the per-row error codes", rows.len());
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn parse_window(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::usage("usage", format!("--window expects A:B with 0 < A < B, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(a > 0.0 && a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_fit(
    common: &Common,
    regime: RegimeArg,
    method: &str,
    basis: Option<KernelBasis>,
    window: Option<&str>,
) -> Result<i32, Failure> {
    let cfg = load_config(common)?;
    let ev = resolve_evaluator(Quantity::S11, method, basis)?;
    let window = match window {
        Some(w) => parse_window(w)?,
        None => cfg.fit_window.unwrap_or(match regime {
            RegimeArg::Spacelike => SPACELIKE_WINDOW,
            RegimeArg::Timelike => TIMELIKE_WINDOW,
        }),
    };
    let ctx = cfg.context();
    let wc = ctx.waveguide.lowest_cutoff();
    let inside = |x: f64| (window.0..=window.1).contains(&(wc * x));
    let pts: Vec<(f64, f64)> = match regime {
        RegimeArg::Spacelike => cfg.grid.r.points().into_iter().filter(|&r| inside(r)).map(|r| (0.0, r)).collect(),
        RegimeArg::Timelike => cfg.grid.t.points().into_iter().filter(|&t| inside(t)).map(|t| (t, 0.0)).collect(),
    };
    let fail = |e: crate::Error| {
        let hint = match e.root() {
            crate::Error::InsufficientData(_) => " (widen the window or refine the grid axis)",
            crate::Error::NoOscillationDetected { .. } => " (the window needs several oscillation periods)",
            _ => "",
        };
        Failure::check("fit", format!("{e}{hint}"))
    };
    let values: Vec<(f64, f64, crate::ComplexValue)> = pts
        .iter()
        .map(|&(t, r)| ev.evaluate(&ctx, t, r).map(|v| (t, r, v)).map_err(|e| e.at(t, r)))
        .collect::<crate::Result<_>>()
        .map_err(fail)?;
    let p = cfg.precision;
    let n = |x: f64| json_number(x, p);
    let (regime_label, fit) = match regime {
        RegimeArg::Spacelike => {
            let samples: Vec<(f64, f64)> = values.iter().map(|&(_, r, v)| (r, v.norm())).collect();
            let f = fit_spacelike_decay(&samples).map_err(fail)?;
            (
                "spacelike",
                json!({
                    "amplitude": n(f.amplitude), "rate": n(f.rate), "exponent": n(f.exponent),
                    "r_squared": n(f.r_squared), "window": [n(f.window.0), n(f.window.1)],
                    "n_points": f.n_points, "rate_over_omega_c": n(f.rate / wc),
                }),
            )
        }
        RegimeArg::Timelike => {
            let samples: Vec<(f64, crate::ComplexValue)> = values.iter().map(|&(t, _, v)| (t, v)).collect();
            let f = fit_timelike_oscillation(&samples).map_err(fail)?;
            (
                "timelike",
                json!({
                    "frequency": n(f.frequency), "envelope_exponent": n(f.envelope_exponent),
                    "n_zero_crossings": f.n_zero_crossings, "window": [n(f.window.0), n(f.window.1)],
                    "n_points": samples.len(), "frequency_over_omega_c": n(f.frequency / wc),
                }),
            )
        }
    };
    let doc = json!({
        "regime": regime_label,
        "evaluator": ev.to_string(),
        "method": ev.method_label(),
        "basis": ev.basis().map(|b| b.as_str()),
        "window_dimensionless": [n(window.0), n(window.1)],
        "units": units_metadata(&ctx, p),
        "fit": fit,
    });
    emit(common, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    Ok(EXIT_OK)
}

fn cmd_verify(common: &Common) -> Result<i32, Failure> {
    let cfg = load_config(common)?;
    let report = run_verify(&cfg);
    for c in &report.checks {
        eprintln!("{}", c.summary_line());
    }
    emit(common, &(serde_json::to_string_pretty(&report.json).expect("json") + "\n"))?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK };
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return EXIT_USAGE;
        }
    };
    let outcome = match &cli.command {
        Command::Cutoff { common, modes_r, modes_s } => cmd_cutoff(common, *modes_r, *modes_s),
        Command::Scan { common, quantity, method, basis } => cmd_scan(common, *quantity, method, *basis),
        Command::Fit { common, regime, method, basis, window } => cmd_fit(common, *regime, method, *basis, window.as_deref()),
        Command::Verify { common } => cmd_verify(common),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.line());
            f.code
        }
    }
}
