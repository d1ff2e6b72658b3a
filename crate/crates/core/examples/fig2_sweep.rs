//! SOP against mu_d for several eavesdropper means and secrecy rates, with asymptotes.
//!
//! cargo run --release --example fig2_sweep -- [out_dir]
use std::path::PathBuf;

use ftr_secrecy::experiment::presets::fig2_sweep;
use ftr_secrecy::experiment::{run_sweep, write_sweep};

fn main() -> ftr_secrecy::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/figures".into()));
    std::fs::create_dir_all(&dir)?;
    for (mu_e, rs) in [(0.1, 1.0), (0.5, 1.0), (1.0, 1.0), (0.5, 0.5), (0.5, 2.0)] {
        let table = run_sweep(&fig2_sweep(mu_e, rs));
        let path = dir.join(format!("fig2_mue{mu_e}_rs{rs}.csv"));
        write_sweep(&table, &path)?;
        let last = table.rows.last().expect("non-empty sweep");
        println!(
            "mu_e = {mu_e:3}, R_s = {rs:3}: SOP(40 dB) = {:.4e}, asymptote {:.4e} -> {}",
            last.exact.unwrap_or(f64::NAN),
            last.asymptotic.unwrap_or(f64::NAN),
            path.display()
        );
    }
    Ok(())
}
