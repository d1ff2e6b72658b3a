//! SOP against mu_d for K near 0, 5 and 10 at R_s = 3.
//!
//! cargo run --release --example fig3_sweep -- [out_dir]
use std::path::PathBuf;

use ftr_secrecy::experiment::presets::{fig3_sweep, K_NEAR_ZERO};
use ftr_secrecy::experiment::{run_sweep, write_sweep};

fn main() -> ftr_secrecy::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/figures".into()));
    std::fs::create_dir_all(&dir)?;
    let tables: Vec<_> = [K_NEAR_ZERO, 5.0, 10.0].iter().map(|&k| (k, run_sweep(&fig3_sweep(k)))).collect();
    for (k, t) in &tables {
        write_sweep(t, &dir.join(format!("fig3_k{}.csv", k.round())))?;
    }
    println!("mu_d(dB)  K~0        K=5        K=10");
    for i in (0..tables[0].1.rows.len()).step_by(2) {
        let v: Vec<String> = tables.iter().map(|(_, t)| format!("{:.4e}", t.rows[i].exact.unwrap_or(f64::NAN))).collect();
        println!("{:7}   {}", tables[0].1.rows[i].x, v.join(" "));
    }
    println!("tables in {}", dir.display());
    Ok(())
}
