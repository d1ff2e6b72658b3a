//! One-dimensional parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftr_channel::{FtrParams, SeriesControl};
use crate::monte_carlo::{simulate, McConfig, McReport};
use crate::secrecy_engine::{sop_asymptotic, sop_exact, sop_regime_approx, Scenario, DEFAULT_REGIME_THRESHOLD};

use super::config::{db_to_linear, linspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Interference threshold, in dB.
    #[serde(rename = "i_th_db")]
    IThDb,
    /// Mean gain of the legitimate link, in dB.
    #[serde(rename = "mu_d_db")]
    MuDDb,
    /// K of all three links, linear. Link means are kept.
    #[serde(rename = "k_factor")]
    KFactor,
    /// Target secrecy rate in bit/s/Hz.
    #[serde(rename = "rs")]
    Rs,
}

impl SweepVariable {
    pub fn unit(self) -> &'static str {
        match self {
            SweepVariable::IThDb | SweepVariable::MuDDb => "dB",
            SweepVariable::KFactor => "linear",
            SweepVariable::Rs => "bit/s/Hz",
        }
    }

    pub fn apply(self, base: &Scenario, x: f64) -> Result<Scenario> {
        let mut sc = *base;
        match self {
            SweepVariable::IThDb => sc.i_th = db_to_linear(x),
            SweepVariable::MuDDb => sc.d = sc.d.with_mean(db_to_linear(x))?,
            SweepVariable::KFactor => {
                let set_k = |l: &FtrParams| FtrParams::from_mean(l.m, x, l.delta, l.mean());
                sc.d = set_k(&sc.d)?;
                sc.e = set_k(&sc.e)?;
                sc.p = set_k(&sc.p)?;
            }
            SweepVariable::Rs => sc.rs = x,
        }
        Scenario::new(sc.d, sc.e, sc.p, sc.p_max, sc.i_th, sc.n0, sc.rs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Exact,
    Sop1,
    Sop2,
    Asymptotic,
    RegimeApprox,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub base: Scenario,
    pub series: SeriesControl,
    pub outputs: Vec<Output>,
    pub mc: Option<McConfig>,
}

impl SweepSpec {
    /// Fails on an empty or reversed grid. A single point needs `start == stop`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        variable: SweepVariable,
        start: f64,
        stop: f64,
        points: usize,
        base: Scenario,
        series: SeriesControl,
        mut outputs: Vec<Output>,
        mc: Option<McConfig>,
    ) -> Result<Self> {
        let single = points == 1 && start == stop;
        if !single && !(points >= 2 && start < stop) {
            return Err(Error::Config(format!(
                "sweep needs points >= 2 and start < stop (got {points} points on [{start}, {stop}])"
            )));
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if outputs.is_empty() {
            return Err(Error::Config("sweep requests no outputs".into()));
        }
        outputs.sort();
        outputs.dedup();
        if let Some(cfg) = &mc {
            cfg.validate()?;
        }
        let spec = SweepSpec { variable, start, stop, points, base, series, outputs, mc };
        for x in spec.grid() {
            variable.apply(&base, x)?;
        }
        Ok(spec)
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// The MC settings used for the `mc` column.
    pub fn mc_config(&self) -> McConfig {
        self.mc.unwrap_or_default()
    }
}

/// One sweep point. Columns that were not requested, or that failed, are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub exact: Option<f64>,
    pub sop1: Option<f64>,
    pub sop2: Option<f64>,
    pub asymptotic: Option<f64>,
    pub regime: Option<f64>,
    pub mc: Option<McReport>,
    /// Why the row is invalid.
    pub error: Option<String>,
    /// Whether the failure was numerical (as opposed to a bad parameter).
    pub numerical: bool,
}

impl Row {
    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }

    fn invalid(x: f64, e: &Error) -> Self {
        Row {
            x,
            exact: None,
            sop1: None,
            sop2: None,
            asymptotic: None,
            regime: None,
            mc: None,
            error: Some(e.to_string()),
            numerical: e.is_numerical(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<Row>,
}

impl SweepTable {
    pub fn invalid_rows(&self) -> impl Iterator<Item = (usize, &Row)> {
        self.rows.iter().enumerate().filter(|(_, r)| !r.is_valid())
    }
}

fn probability(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if v < 0.0 {
        Err(Error::NegativeProbability { quantity: name, value: v })
    } else {
        Err(Error::overflow(name, format!("probability {v} outside [0, 1]")))
    }
}

fn evaluate(spec: &SweepSpec, x: f64) -> Result<Row> {
    let sc = spec.variable.apply(&spec.base, x)?;
    let s = &spec.series;
    let mut row = Row {
        x,
        exact: None,
        sop1: None,
        sop2: None,
        asymptotic: None,
        regime: None,
        mc: None,
        error: None,
        numerical: false,
    };
    if spec.wants(Output::Exact) || spec.wants(Output::Sop1) || spec.wants(Output::Sop2) {
        let r = sop_exact(&sc, s)?;
        let keep = |o, v| spec.wants(o).then_some(v);
        row.exact = keep(Output::Exact, probability("sop_exact", r.total)?);
        row.sop1 = keep(Output::Sop1, probability("sop1", r.sop1)?);
        row.sop2 = keep(Output::Sop2, probability("sop2", r.sop2)?);
    }
    if spec.wants(Output::Asymptotic) {
        // Not clamped: the asymptote exceeds one at low SNR.
        let a = sop_asymptotic(&sc, s)?.sop_asym;
        if !a.is_finite() {
            return Err(Error::overflow("sop_asymptotic", format!("non-finite value at x = {x}")));
        }
        row.asymptotic = Some(a);
    }
    if spec.wants(Output::RegimeApprox) {
        row.regime = Some(probability("sop_regime", sop_regime_approx(&sc, s, DEFAULT_REGIME_THRESHOLD)?)?);
    }
    if spec.wants(Output::Mc) {
        row.mc = Some(simulate(&sc, &spec.mc_config())?);
    }
    Ok(row)
}

/// Evaluates every grid point in parallel. Rows come back in grid order and
/// a failing point is marked invalid instead of aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepTable {
    let rows = spec
        .grid()
        .into_par_iter()
        .map(|x| evaluate(spec, x).unwrap_or_else(|e| Row::invalid(x, &e)))
        .collect();
    SweepTable { spec: spec.clone(), rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(p_max: f64) -> Scenario {
        let l = |mu| FtrParams::from_mean(2.8, 10.0, 0.5, mu).unwrap();
        Scenario::new(l(1.0), l(0.1), l(1.0), p_max, 1.0, 1.0, 0.1).unwrap()
    }

    fn spec(variable: SweepVariable, start: f64, stop: f64, points: usize, outputs: Vec<Output>) -> SweepSpec {
        SweepSpec::new(variable, start, stop, points, fig1(1.0), SeriesControl::default(), outputs, None).unwrap()
    }

    #[test]
    fn variables_touch_the_right_fields() {
        let base = fig1(1.0);
        assert_eq!(SweepVariable::IThDb.apply(&base, 20.0).unwrap().i_th, 100.0);
        let sc = SweepVariable::MuDDb.apply(&base, 10.0).unwrap();
        assert!((sc.d.mean() - 10.0).abs() < 1e-12 && sc.e == base.e);
        let sc = SweepVariable::KFactor.apply(&base, 5.0).unwrap();
        for (l, b) in [(sc.d, base.d), (sc.e, base.e), (sc.p, base.p)] {
            assert_eq!(l.k, 5.0);
            assert!((l.mean() - b.mean()).abs() < 1e-15);
        }
        assert_eq!(SweepVariable::Rs.apply(&base, 2.0).unwrap().rs, 2.0);
        assert!(SweepVariable::Rs.apply(&base, -1.0).is_err());
    }

    #[test]
    fn grid_validation() {
        let base = fig1(1.0);
        let s = SeriesControl::default();
        let mk = |a, b, n| SweepSpec::new(SweepVariable::Rs, a, b, n, base, s, vec![Output::Exact], None);
        assert!(mk(0.0, 1.0, 1).is_err());
        assert!(mk(1.0, 0.0, 4).is_err());
        assert!(mk(-1.0, 1.0, 4).is_err());
        assert!(mk(0.5, 0.5, 1).is_ok());
        assert!(SweepSpec::new(SweepVariable::Rs, 0.0, 1.0, 3, base, s, vec![], None).is_err());
        let sp = SweepSpec::new(SweepVariable::Rs, 0.0, 1.0, 3, base, s, vec![Output::Mc, Output::Exact, Output::Mc], None).unwrap();
        assert_eq!(sp.outputs, vec![Output::Exact, Output::Mc]);
    }

    #[test]
    fn fig1_sweep_trends() {
        let sp = spec(SweepVariable::IThDb, -20.0, 30.0, 26, vec![Output::Exact, Output::Sop1, Output::Sop2]);
        let t = run_sweep(&sp);
        assert_eq!(t.rows.len(), 26);
        let xs: Vec<f64> = t.rows.iter().map(|r| r.x).collect();
        assert_eq!(xs, sp.grid());
        let v: Vec<f64> = t.rows.iter().map(|r| r.exact.unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let flat: Vec<f64> = t.rows.iter().filter(|r| r.x >= 20.0).map(|r| r.exact.unwrap()).collect();
        let range = flat.iter().cloned().fold(f64::MIN, f64::max) - flat.iter().cloned().fold(f64::MAX, f64::min);
        assert!(range <= 1e-3);
        for r in &t.rows {
            assert!((r.sop1.unwrap() + r.sop2.unwrap() - r.exact.unwrap()).abs() < 1e-15);
            assert!(r.asymptotic.is_none() && r.mc.is_none() && r.regime.is_none());
        }
    }

    #[test]
    fn single_point_mc_matches_standalone_simulation() {
        let cfg = McConfig::new(50_000, 77, 4).unwrap();
        let base = fig1(1.0);
        let sp = SweepSpec::new(SweepVariable::IThDb, 0.0, 0.0, 1, base, SeriesControl::default(), vec![Output::Mc], Some(cfg)).unwrap();
        let row = &run_sweep(&sp).rows[0];
        assert_eq!(row.mc.unwrap(), simulate(&base, &cfg).unwrap());
        assert!(row.exact.is_none());
    }

    #[test]
    fn failing_points_are_marked_not_fatal() {
        // Five terms cannot hold the mixture mass of K = 10.
        let base = fig1(1.0);
        let sp = SweepSpec::new(SweepVariable::KFactor, 0.0, 10.0, 3, base, SeriesControl::with_terms(5), vec![Output::Exact], None).unwrap();
        let t = run_sweep(&sp);
        assert!(t.rows[0].is_valid());
        assert!(!t.rows[2].is_valid() && t.rows[2].numerical);
        assert_eq!(t.invalid_rows().count(), t.rows.iter().filter(|r| r.exact.is_none()).count());
    }
}
