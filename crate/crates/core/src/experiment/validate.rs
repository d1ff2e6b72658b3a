//! Desk-scale self check of every module around one scenario.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::ftr_channel::{self, FtrParams, SeriesControl};
use crate::monte_carlo::{simulate, McConfig};
use crate::secrecy_engine::{non_crn_sop, power_control_sop, sop_exact, sop_exact_direct, Scenario};
use crate::specfun::ln_gamma;

use super::config::db_to_linear;

/// The analytic SOP under test. Swappable so that the suite itself can be checked.
pub type Analytic<'a> = &'a (dyn Fn(&Scenario, &SeriesControl) -> Result<f64> + Sync);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Observed discrepancy, NaN if the check could not be evaluated.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} measured {:<11.3e} tol {:<9.1e} {:>8.3} s  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.seconds,
                c.detail
            )?;
        }
        let n = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{n}/{} checks passed", self.checks.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub scenario: Scenario,
    pub series: SeriesControl,
    pub mc: McConfig,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            scenario: super::presets::fig1_scenario(0.0, 0.0),
            series: SeriesControl::default(),
            mc: McConfig { trials: 200_000, seed: 1, chunks: 16 },
        }
    }
}

/// Runs a check; an error counts as a failure with the message as detail.
fn run(
    name: &'static str,
    tolerance: f64,
    f: impl FnOnce() -> Result<(f64, String)>,
) -> Check {
    let t0 = Instant::now();
    let (measured, detail) = f().unwrap_or_else(|e| (f64::NAN, e.to_string()));
    Check {
        name,
        measured,
        tolerance,
        passed: measured <= tolerance,
        seconds: t0.elapsed().as_secs_f64(),
        detail,
    }
}

fn max_abs(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0f64, |m, v| Ok(m.max(v?.abs())))
}

fn gauss_legendre(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, panels: usize) -> Result<f64> {
    const X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            sum += w * f(mid + 0.5 * h * x)? * 0.5 * h;
        }
    }
    Ok(sum)
}

pub fn validate(opts: &ValidateOptions) -> ValidationReport {
    validate_with(opts, &|sc: &Scenario, s: &SeriesControl| Ok(sop_exact(sc, s)?.total))
}

pub fn validate_with(opts: &ValidateOptions, analytic: Analytic) -> ValidationReport {
    let sc = opts.scenario;
    let s = opts.series;
    let d = sc.d;
    let mut checks = Vec::new();

    checks.push(run("exponential closure K=0", 1e-12, || {
        let p = FtrParams::new(d.m, 0.0, d.delta, d.sigma2)?;
        let w = p.scale();
        let xs = (0..=200).map(|i| i as f64 * 0.05 * w);
        let err = max_abs(xs.flat_map(|x| {
            let c = ftr_channel::cdf(&p, x, &s).map(|v| v - (-(-x / w).exp_m1()));
            let f = ftr_channel::pdf(&p, x, &s).map(|v| (v - (-x / w).exp() / w) * w);
            [c, f]
        }))?;
        Ok((err, format!("m = {}, 201 points on [0, 20σ²]", d.m)))
    }));

    checks.push(run("d_j closed form at Delta=0", 1e-12, || {
        let p = FtrParams::new(d.m, d.k, 0.0, d.sigma2)?;
        let err = max_abs((0..s.max_terms).map(|j| {
            let nu = j as f64 + d.m;
            let want = (ln_gamma(nu)? - nu * (d.m + d.k).ln()).exp();
            Ok(ftr_channel::d_coeff(&p, j)? / want - 1.0)
        }))?;
        Ok((err, format!("relative, j < {}", s.max_terms)))
    }));

    checks.push(run("cdf against pdf quadrature", 1e-8, || {
        let wide = SeriesControl::with_terms(s.max_terms.max(250));
        let hi = 3.0 * d.mean();
        let q = gauss_legendre(|x| ftr_channel::pdf(&d, x, &wide), 0.0, hi, 300)?;
        Ok((
            (q - ftr_channel::cdf(&d, hi, &wide)?).abs(),
            format!("legitimate link on [0, {hi}], {} terms", wide.max_terms),
        ))
    }));

    checks.push(run("split identity", 1e-10, || {
        let mut worst = 0f64;
        for rs in [0.0, sc.rs, 1.0] {
            let v = Scenario { rs, ..sc };
            let r = sop_exact(&v, &s)?;
            worst = worst.max((r.sop1 + r.sop2 - sop_exact_direct(&v, &s)?).abs());
        }
        Ok((worst, "sop1 + sop2 against the nested sum, three rates".into()))
    }));

    checks.push(run("symmetry at zero rate", 1e-6, || {
        let wide = SeriesControl::with_terms(s.max_terms.max(250));
        let v = Scenario { e: d, rs: 0.0, ..sc };
        let got = analytic(&v, &wide)?;
        Ok(((got - 0.5).abs(), format!("sop = {got:.9}, {} terms", wide.max_terms)))
    }));

    let fewer = SeriesControl { max_terms: (s.max_terms * 3 / 4).max(1), ..s };
    // Two truncations can only differ by the mass the shorter one drops.
    let neglected: f64 = [sc.d, sc.e, sc.p]
        .iter()
        .map(|l| ftr_channel::residual_mass(l, &fewer).unwrap_or(f64::NAN))
        .sum();
    checks.push(run("truncation stability", 1e-8 + neglected, || {
        let diff = (analytic(&sc, &fewer)? - analytic(&sc, &s)?).abs();
        Ok((diff, format!("{} vs {} terms, neglected mass {neglected:.2e}", fewer.max_terms, s.max_terms)))
    }));

    checks.push(run("regime limit I_th/P_M=+40dB", 1e-4, || {
        let v = Scenario { i_th: sc.p_max * db_to_linear(40.0), ..sc };
        Ok(((analytic(&v, &s)? - non_crn_sop(&v, &s)?).abs(), "against the non-cognitive SOP".into()))
    }));

    checks.push(run("regime limit I_th/P_M=-40dB", 1e-4, || {
        let v = Scenario { i_th: sc.p_max * db_to_linear(-40.0), ..sc };
        Ok(((analytic(&v, &s)? - power_control_sop(&v, &s)?).abs(), "against SOP2 at ρ = 0".into()))
    }));

    checks.push(run("nonincreasing in I_th", 1e-12, || {
        let mut rise = 0f64;
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let v = Scenario { i_th: sc.p_max * db_to_linear(-20.0 + 5.0 * i as f64), ..sc };
            let p = analytic(&v, &s)?;
            rise = rise.max(p - prev);
            prev = p;
        }
        Ok((rise.max(0.0), "largest rise over ρ in [-20, 25] dB".into()))
    }));

    checks.push(run("Monte Carlo cross-check", 4.0, || {
        let r = simulate(&sc, &opts.mc)?;
        let a = analytic(&sc, &s)?;
        Ok((
            (a - r.sop_hat).abs() / r.stderr.max(1.0 / r.trials as f64),
            format!("analytic {a:.6}, simulated {:.6} over {} trials (in standard errors)", r.sop_hat, r.trials),
        ))
    }));

    checks.push(run("Monte Carlo symmetry", 4.0, || {
        let v = Scenario { e: d, rs: 0.0, ..sc };
        let r = simulate(&v, &opts.mc)?;
        Ok(((r.sop_hat - 0.5).abs() / r.stderr, format!("simulated {:.6} (in standard errors)", r.sop_hat)))
    }));

    ValidationReport { checks }
}
