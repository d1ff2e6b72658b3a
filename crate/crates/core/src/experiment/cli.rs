//! Command-line front end.
//!
//! Exit status: 0 success, 1 validation failure, 2 numerical (convergence)
//! error, 3 configuration error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ftr_channel::SeriesControl;
use crate::monte_carlo::{simulate, McConfig, McReport};
use crate::secrecy_engine::{
    non_crn_sop, power_control_sop, sop_asymptotic, sop_exact, sop_regime_approx, AsymptoticResult, Scenario,
    SopBreakdown, DEFAULT_REGIME_THRESHOLD,
};

use super::config::{DistSpec, LinkName, RunConfig};
use super::output::{write_dist_csv, write_sweep};
use super::sweep::run_sweep;
use super::validate::{validate, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ftr-secrecy", version, about = "Secrecy outage of underlay links over fluctuating two-ray fading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep one parameter and write a CSV table with a JSON sidecar.
    Sweep(Common),
    /// Evaluate a single operating point.
    Sop(Common),
    /// Monte Carlo estimate at a single operating point.
    Mc(Common),
    /// pdf/cdf table of one link.
    Dist(Common),
    /// Run the self-check suite.
    Validate(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file. Defaults to stdout, except for `sweep` which needs a path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Number of series terms.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Common {
    fn series(&self, base: SeriesControl) -> Result<SeriesControl> {
        match self.terms {
            Some(n) => SeriesControl::new(n, base.rel_stop_tol),
            None => Ok(base),
        }
    }

    fn mc(&self, base: Option<McConfig>) -> Result<Option<McConfig>> {
        if base.is_none() && self.trials.is_none() && self.seed.is_none() {
            return Ok(None);
        }
        let b = base.unwrap_or_default();
        McConfig::new(self.trials.unwrap_or(b.trials), self.seed.unwrap_or(b.seed), b.chunks).map(Some)
    }

    fn load(&self) -> Result<RunConfig> {
        let path = self.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
        let mut cfg = RunConfig::from_path(path)?;
        cfg.series = self.series(cfg.series)?;
        cfg.mc = self.mc(cfg.mc)?;
        if let Some(sw) = cfg.sweep.as_mut() {
            sw.series = cfg.series;
            sw.mc = cfg.mc;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_CONVERGENCE
    } else {
        EXIT_CONFIG
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct PointReport {
    scenario: Scenario,
    rho: f64,
    lambda: f64,
    series: SeriesControl,
    sop: SopBreakdown,
    asymptotic: AsymptoticResult,
    regime_approx: f64,
    non_cognitive: f64,
    power_control: f64,
    mc: Option<McReport>,
}

fn sweep(args: &Common) -> Result<i32> {
    let cfg = args.load()?;
    let spec = cfg.sweep.ok_or_else(|| Error::Config("config has no [sweep] section".into()))?;
    let out = args.out.clone().ok_or_else(|| Error::Config("sweep needs --out <file.csv>".into()))?;
    let table = run_sweep(&spec);
    let side = write_sweep(&table, &out)?;
    let mut code = EXIT_OK;
    for (i, r) in table.invalid_rows() {
        eprintln!("row {i} (x = {}) invalid: {}", r.x, r.error.as_deref().unwrap_or_default());
        code = code.max(if r.numerical { EXIT_CONVERGENCE } else { EXIT_CONFIG });
    }
    eprintln!("wrote {} rows to {} and {}", table.rows.len(), out.display(), side.display());
    Ok(code)
}

fn sop(args: &Common) -> Result<i32> {
    let cfg = args.load()?;
    let (sc, s) = (cfg.scenario, cfg.series);
    let report = PointReport {
        scenario: sc,
        rho: sc.rho(),
        lambda: sc.lam(),
        series: s,
        sop: sop_exact(&sc, &s)?,
        asymptotic: sop_asymptotic(&sc, &s)?,
        regime_approx: sop_regime_approx(&sc, &s, DEFAULT_REGIME_THRESHOLD)?,
        non_cognitive: non_crn_sop(&sc, &s)?,
        power_control: power_control_sop(&sc, &s)?,
        mc: cfg.mc.map(|m| simulate(&sc, &m)).transpose()?,
    };
    emit(&args.out, &json(&report)?)?;
    Ok(EXIT_OK)
}

fn mc(args: &Common) -> Result<i32> {
    let cfg = args.load()?;
    let m = cfg.mc.unwrap_or_default();
    emit(&args.out, &json(&simulate(&cfg.scenario, &m)?)?)?;
    Ok(EXIT_OK)
}

fn dist(args: &Common) -> Result<i32> {
    let cfg = args.load()?;
    let spec = cfg.dist.unwrap_or_else(|| DistSpec {
        link: LinkName::D,
        start: 0.0,
        stop: 4.0 * cfg.scenario.d.mean(),
        points: 101,
    });
    let mut buf = Vec::new();
    write_dist_csv(&spec.link.pick(&cfg.scenario), &spec, &cfg.series, &mut buf)?;
    emit(&args.out, &String::from_utf8_lossy(&buf))?;
    Ok(EXIT_OK)
}

fn run_validate(args: &Common) -> Result<i32> {
    let mut opts = ValidateOptions::default();
    if args.config.is_some() {
        let cfg = args.load()?;
        opts.scenario = cfg.scenario;
        opts.series = cfg.series;
        if let Some(m) = cfg.mc {
            opts.mc = m;
        }
    } else {
        opts.series = args.series(opts.series)?;
        opts.mc = McConfig::new(args.trials.unwrap_or(opts.mc.trials), args.seed.unwrap_or(opts.mc.seed), opts.mc.chunks)?;
    }
    let report = validate(&opts);
    println!("{report}");
    if let Some(p) = &args.out {
        std::fs::write(p, json(&report)?)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION })
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let (Command::Sweep(common) | Command::Sop(common) | Command::Mc(common) | Command::Dist(common) | Command::Validate(common)) =
        &cli.command;
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Sop(a) => sop(a),
        Command::Mc(a) => mc(a),
        Command::Dist(a) => dist(a),
        Command::Validate(a) => run_validate(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

/// Parses `args` (including the program name) and runs.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
