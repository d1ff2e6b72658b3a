//! SOP against I_th for P_M = 0 and 10 dB. Writes CSV tables with sidecars.
//!
//! cargo run --release --example fig1_sweep -- [out_dir]
use std::path::PathBuf;

use ftr_secrecy::experiment::presets::fig1_sweep;
use ftr_secrecy::experiment::{run_sweep, write_sweep};

fn main() -> ftr_secrecy::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/figures".into()));
    std::fs::create_dir_all(&dir)?;
    for pm in [0.0, 10.0] {
        let table = run_sweep(&fig1_sweep(pm));
        let path = dir.join(format!("fig1_pm{pm}.csv"));
        write_sweep(&table, &path)?;
        println!("P_M = {pm} dB -> {}", path.display());
        for r in table.rows.iter().step_by(5) {
            println!("  I_th = {:5} dB  SOP = {:.6}  SOP1 = {:.3e}  SOP2 = {:.3e}", r.x, r.exact.unwrap_or(f64::NAN), r.sop1.unwrap_or(f64::NAN), r.sop2.unwrap_or(f64::NAN));
        }
    }
    Ok(())
}
