//! CSV tables and their JSON sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ftr_channel::{self, FtrParams, SeriesControl};
use crate::monte_carlo::McConfig;
use crate::secrecy_engine::Scenario;

use super::config::DistSpec;
use super::sweep::{Output, SweepSpec, SweepTable, SweepVariable};

pub const SWEEP_COLUMNS: [&str; 10] = [
    "x_value",
    "x_unit",
    "sop_exact",
    "sop1",
    "sop2",
    "sop_asymptotic",
    "sop_regime",
    "sop_mc",
    "mc_ci95",
    "mc_trials",
];

pub const DIST_COLUMNS: [&str; 4] = ["x", "pdf", "cdf", "ccdf"];

/// Shortest round-trip text, in exponent form outside [1e-4, 1e6).
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_sweep_csv<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    let unit = table.spec.variable.unit();
    for r in &table.rows {
        let mc = r.mc.as_ref();
        out.write_record([
            fmt_f64(r.x),
            unit.to_string(),
            cell(r.exact),
            cell(r.sop1),
            cell(r.sop2),
            cell(r.asymptotic),
            cell(r.regime),
            cell(mc.map(|m| m.sop_hat)),
            cell(mc.map(|m| m.ci95)),
            mc.map(|m| m.trials.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// `fig1.csv` gets `fig1.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

#[derive(Debug, Serialize)]
struct RowStatus<'a> {
    index: usize,
    x_value: f64,
    error: &'a str,
    numerical: bool,
}

#[derive(Debug, Serialize)]
struct SweepMeta<'a> {
    generator: &'static str,
    version: &'static str,
    table: String,
    columns: [&'static str; 10],
    variable: SweepVariable,
    x_unit: &'static str,
    start: f64,
    stop: f64,
    points: usize,
    outputs: &'a [Output],
    scenario: &'a Scenario,
    link_means: LinkMeans,
    series: &'a SeriesControl,
    mc: Option<McConfig>,
    seed: Option<u64>,
    invalid_rows: Vec<RowStatus<'a>>,
}

#[derive(Debug, Serialize)]
struct LinkMeans {
    d: f64,
    e: f64,
    p: f64,
}

impl LinkMeans {
    fn of(sc: &Scenario) -> Self {
        LinkMeans { d: sc.d.mean(), e: sc.e.mean(), p: sc.p.mean() }
    }
}

pub fn sweep_metadata(table: &SweepTable, csv_name: &str) -> Result<String> {
    let spec: &SweepSpec = &table.spec;
    let mc = spec.wants(Output::Mc).then(|| spec.mc_config());
    let meta = SweepMeta {
        generator: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        table: csv_name.to_string(),
        columns: SWEEP_COLUMNS,
        variable: spec.variable,
        x_unit: spec.variable.unit(),
        start: spec.start,
        stop: spec.stop,
        points: spec.points,
        outputs: &spec.outputs,
        scenario: &spec.base,
        link_means: LinkMeans::of(&spec.base),
        series: &spec.series,
        mc,
        seed: mc.map(|c| c.seed),
        invalid_rows: table
            .invalid_rows()
            .map(|(index, r)| RowStatus {
                index,
                x_value: r.x,
                error: r.error.as_deref().unwrap_or_default(),
                numerical: r.numerical,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes the CSV and its sidecar, returning the sidecar path.
pub fn write_sweep(table: &SweepTable, csv_path: &Path) -> Result<PathBuf> {
    let f = std::fs::File::create(csv_path)?;
    write_sweep_csv(table, std::io::BufWriter::new(f))?;
    let name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let side = sidecar_path(csv_path);
    std::fs::write(&side, sweep_metadata(table, &name)?)?;
    Ok(side)
}

/// pdf, cdf and ccdf of one link on the grid of `spec`.
pub fn write_dist_csv<W: Write>(p: &FtrParams, spec: &DistSpec, s: &SeriesControl, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(DIST_COLUMNS).map_err(csv_err)?;
    for x in spec.grid() {
        let row = [
            x,
            ftr_channel::pdf(p, x, s)?,
            ftr_channel::cdf(p, x, s)?,
            ftr_channel::ccdf(p, x, s)?,
        ];
        out.write_record(row.map(fmt_f64)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sweep::run_sweep;

    fn table(outputs: Vec<Output>) -> SweepTable {
        let l = |mu| FtrParams::from_mean(2.8, 10.0, 0.5, mu).unwrap();
        let base = Scenario::new(l(1.0), l(0.1), l(1.0), 1.0, 1.0, 1.0, 0.1).unwrap();
        let mc = McConfig::new(2000, 3, 2).unwrap();
        let spec = SweepSpec::new(SweepVariable::IThDb, -10.0, 10.0, 3, base, SeriesControl::default(), outputs, Some(mc)).unwrap();
        run_sweep(&spec)
    }

    fn csv_text(t: &SweepTable) -> String {
        let mut buf = Vec::new();
        write_sweep_csv(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(0.25), "0.25");
        assert_eq!(fmt_f64(-20.0), "-20");
        assert_eq!(fmt_f64(1.5e-7), "1.5e-7");
        assert_eq!(fmt_f64(1e300).parse::<f64>().unwrap(), 1e300);
    }

    #[test]
    fn unrequested_columns_stay_empty() {
        let text = csv_text(&table(vec![Output::Exact]));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 10);
            assert_eq!(cols[1], "dB");
            assert!(!cols[2].is_empty());
            assert!(cols[3..].iter().all(|c| c.is_empty()), "{line}");
        }
    }

    #[test]
    fn byte_stable_output() {
        let outs = vec![Output::Exact, Output::Sop1, Output::Sop2, Output::Asymptotic, Output::RegimeApprox, Output::Mc];
        let (a, b) = (table(outs.clone()), table(outs));
        assert_eq!(csv_text(&a), csv_text(&b));
        assert_eq!(sweep_metadata(&a, "t.csv").unwrap(), sweep_metadata(&b, "t.csv").unwrap());
        let line = csv_text(&a).lines().nth(1).unwrap().to_string();
        assert!(line.ends_with(",2000"), "{line}");
    }

    #[test]
    fn files_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let side = write_sweep(&table(vec![Output::Exact, Output::Mc]), &path).unwrap();
        assert_eq!(side, dir.path().join("sweep.meta.json"));
        let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(meta["table"], "sweep.csv");
        assert_eq!(meta["seed"], 3);
        assert_eq!(meta["series"]["max_terms"], 80);
        assert_eq!(meta["variable"], "i_th_db");
        assert_eq!(meta["invalid_rows"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn dist_table() {
        let p = FtrParams::new(2.0, 0.0, 0.3, 0.5).unwrap();
        let spec = DistSpec { link: super::super::config::LinkName::D, start: 0.0, stop: 2.0, points: 5 };
        let mut buf = Vec::new();
        write_dist_csv(&p, &spec, &SeriesControl::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(last[0], 2.0);
        assert!((last[1] - (-2f64).exp()).abs() < 1e-12);
        assert!((last[2] + last[3] - 1.0).abs() < 1e-12);
    }
}
