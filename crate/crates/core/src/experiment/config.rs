//! Run configuration in TOML.
//!
//! Every physical quantity may be given linearly or in decibels by appending
//! `_db` to its key (`i_th = 0.1` and `i_th_db = -10` are the same). The
//! schema is documented in `configs/SCHEMA.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::ftr_channel::{FtrParams, SeriesControl};
use crate::monte_carlo::McConfig;
use crate::secrecy_engine::Scenario;

use super::sweep::{Output, SweepSpec, SweepVariable};

/// 10^{dB/10}.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Which link a `dist` table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkName {
    D,
    E,
    P,
}

impl LinkName {
    pub fn pick(self, sc: &Scenario) -> FtrParams {
        match self {
            LinkName::D => sc.d,
            LinkName::E => sc.e,
            LinkName::P => sc.p,
        }
    }
}

/// Grid of gains for a pdf/cdf table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistSpec {
    pub link: LinkName,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl DistSpec {
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Everything a config file can hold. Only the scenario is mandatory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub series: SeriesControl,
    pub sweep: Option<SweepSpec>,
    pub mc: Option<McConfig>,
    pub dist: Option<DistSpec>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut root: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let mut top = Section::new("top level", &mut root);

        let p_max = top.quantity("p_max")?.ok_or_else(|| missing("p_max"))?;
        let i_th = top.quantity("i_th")?.ok_or_else(|| missing("i_th"))?;
        let n0 = top.quantity("n0")?.unwrap_or(1.0);
        let rs = top.number("rs")?.unwrap_or(0.0);

        let mut links = top.table("link")?.unwrap_or_default();
        let mut own = |name: &str| -> Result<Table> { Ok(take_table(&mut links, name, "link")?.unwrap_or_default()) };
        let (td, te, tp) = (own("d")?, own("e")?, own("p")?);
        if let Some((k, _)) = links.iter().find(|(_, v)| v.is_table()) {
            return Err(Error::Config(format!("unknown link `[link.{k}]`, expected d, e or p")));
        }
        let d = link(&links, td, "link.d")?;
        let e = link(&links, te, "link.e")?;
        let p = link(&links, tp, "link.p")?;
        let scenario = Scenario::new(d, e, p, p_max, i_th, n0, rs)?;

        let series = match top.table("series")? {
            Some(mut t) => {
                let mut s = Section::new("series", &mut t);
                let terms = s.count("terms")?.unwrap_or(80);
                let tol = s.number("stop_tol")?.unwrap_or(0.0);
                s.finish()?;
                SeriesControl::new(terms, tol)?
            }
            None => SeriesControl::default(),
        };

        let mc = match top.table("mc")? {
            Some(mut t) => {
                let mut s = Section::new("mc", &mut t);
                let def = McConfig::default();
                let trials = s.count("trials")?.map_or(def.trials, |n| n as u64);
                let seed = s.unsigned("seed")?.unwrap_or(def.seed);
                let chunks = s.count("chunks")?.unwrap_or(def.chunks);
                s.finish()?;
                Some(McConfig::new(trials, seed, chunks)?)
            }
            None => None,
        };

        let sweep = match top.table("sweep")? {
            Some(mut t) => {
                let mut s = Section::new("sweep", &mut t);
                let variable: SweepVariable = s.parse_str("variable")?.ok_or_else(|| missing("sweep.variable"))?;
                let start = s.number("start")?.ok_or_else(|| missing("sweep.start"))?;
                let stop = s.number("stop")?.ok_or_else(|| missing("sweep.stop"))?;
                let points = s.count("points")?.ok_or_else(|| missing("sweep.points"))?;
                let outputs = s.outputs()?.unwrap_or_else(|| vec![Output::Exact, Output::Sop1, Output::Sop2]);
                s.finish()?;
                Some(SweepSpec::new(variable, start, stop, points, scenario, series, outputs, mc)?)
            }
            None => None,
        };

        let dist = match top.table("dist")? {
            Some(mut t) => {
                let mut s = Section::new("dist", &mut t);
                let link = s.parse_str("link")?.unwrap_or(LinkName::D);
                let start = s.number("start")?.unwrap_or(0.0);
                let stop = s.number("stop")?.ok_or_else(|| missing("dist.stop"))?;
                let points = s.count("points")?.unwrap_or(101);
                s.finish()?;
                if !(start >= 0.0 && stop > start) {
                    return Err(Error::Config(format!("dist grid [{start}, {stop}] must satisfy 0 <= start < stop")));
                }
                Some(DistSpec { link, start, stop, points })
            }
            None => None,
        };

        top.finish()?;
        Ok(RunConfig { scenario, series, sweep, mc, dist })
    }
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing required key `{key}`"))
}

fn take_table(t: &mut Table, key: &str, ctx: &str) -> Result<Option<Table>> {
    match t.remove(key) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(Error::Config(format!("`{ctx}.{key}` must be a table"))),
    }
}

/// Per-link keys override the shared `[link]` table.
fn link(shared: &Table, own: Table, ctx: &str) -> Result<FtrParams> {
    let mut merged = shared.clone();
    let overridden: Vec<String> = own.keys().map(|k| base_key(k).to_string()).collect();
    merged.retain(|k, _| !overridden.iter().any(|o| o == base_key(k)));
    merged.extend(own);
    let mut s = Section::new(ctx, &mut merged);
    let m = s.number("m")?.ok_or_else(|| missing(&format!("{ctx}.m")))?;
    let k = s.quantity("k")?.ok_or_else(|| missing(&format!("{ctx}.k")))?;
    let delta = s.number("delta")?.ok_or_else(|| missing(&format!("{ctx}.delta")))?;
    let mu = s.quantity("mu")?;
    let sigma2 = s.quantity("sigma2")?;
    s.finish()?;
    match (mu, sigma2) {
        (Some(mu), None) => FtrParams::from_mean(m, k, delta, mu),
        (None, Some(s2)) => FtrParams::new(m, k, delta, s2),
        (None, None) => Err(Error::Config(format!("{ctx} needs `mu` or `sigma2`"))),
        (Some(_), Some(_)) => Err(Error::Config(format!("{ctx} gives both `mu` and `sigma2`"))),
    }
}

/// Keys that set the same quantity. `sigma2` and `mu` both fix the scale.
fn base_key(k: &str) -> &str {
    match k.strip_suffix("_db").unwrap_or(k) {
        "sigma2" => "mu",
        b => b,
    }
}

/// Consumes keys from one table so that leftovers can be reported.
struct Section<'a> {
    name: &'a str,
    t: &'a mut Table,
}

impl<'a> Section<'a> {
    fn new(name: &'a str, t: &'a mut Table) -> Self {
        Section { name, t }
    }

    fn err(&self, key: &str, what: &str) -> Error {
        Error::Config(format!("`{key}` in {} {what}", self.name))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.t.remove(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(x)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(_) => Err(self.err(key, "must be a number")),
        }
    }

    /// `key` as a linear value or `key_db` in decibels, not both.
    fn quantity(&mut self, key: &str) -> Result<Option<f64>> {
        let db_key = format!("{key}_db");
        match (self.number(key)?, self.number(&db_key)?) {
            (Some(_), Some(_)) => Err(self.err(key, &format!("is also given as `{db_key}`"))),
            (lin, db) => Ok(lin.or(db.map(db_to_linear))),
        }
    }

    fn unsigned(&mut self, key: &str) -> Result<Option<u64>> {
        match self.t.remove(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(_) => Err(self.err(key, "must be a non-negative integer")),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        Ok(self.unsigned(key)?.map(|n| n as usize))
    }

    fn parse_str<T: for<'de> Deserialize<'de>>(&mut self, key: &str) -> Result<Option<T>> {
        match self.t.remove(key) {
            None => Ok(None),
            Some(v @ Value::String(_)) => {
                let shown = v.to_string();
                v.try_into().map(Some).map_err(|_| self.err(key, &format!("has unknown value {shown}")))
            }
            Some(_) => Err(self.err(key, "must be a string")),
        }
    }

    fn outputs(&mut self) -> Result<Option<Vec<Output>>> {
        match self.t.remove("outputs") {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .into_iter()
                .map(|v| {
                    let shown = v.to_string();
                    v.try_into().map_err(|_| self.err("outputs", &format!("has unknown entry {shown}")))
                })
                .collect::<Result<Vec<Output>>>()
                .map(Some),
            Some(_) => Err(self.err("outputs", "must be an array of strings")),
        }
    }

    fn table(&mut self, key: &str) -> Result<Option<Table>> {
        take_table(self.t, key, self.name)
    }

    fn finish(self) -> Result<()> {
        match self.t.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Config(format!("unknown key `{k}` in {}", self.name))),
        }
    }
}
