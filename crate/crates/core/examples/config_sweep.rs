//! Run any TOML config from `configs/` the way the `sweep` subcommand does.
//!
//! cargo run --release --example config_sweep -- crates/core/configs/fig2.toml out.csv
use std::path::PathBuf;

use ftr_secrecy::experiment::{run_sweep, write_sweep, RunConfig};
use ftr_secrecy::Error;

fn main() -> ftr_secrecy::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg_path = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig3_k5.toml").into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/config_sweep.csv".into()));
    let cfg = RunConfig::from_path(&cfg_path)?;
    let spec = cfg.sweep.ok_or_else(|| Error::Config(format!("{} has no [sweep] table", cfg_path.display())))?;
    println!("{:?} from {} to {} in {} points, outputs {:?}", spec.variable, spec.start, spec.stop, spec.points, spec.outputs);
    let table = run_sweep(&spec);
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let side = write_sweep(&table, &out)?;
    println!("{} rows ({} invalid) -> {} + {}", table.rows.len(), table.invalid_rows().count(), out.display(), side.display());
    Ok(())
}
