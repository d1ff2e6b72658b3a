//! High-SNR asymptote: unit diversity order and the secrecy array gain.
use ftr_secrecy::experiment::presets::fig2_scenario;
use ftr_secrecy::ftr_channel::SeriesControl;
use ftr_secrecy::secrecy_engine::{sop_asymptotic, sop_exact};

fn main() -> ftr_secrecy::Result<()> {
    let s = SeriesControl::default();
    let (mu_e, rs) = (0.5, 1.0);
    println!("mu_d(dB)  exact         asymptote     ratio");
    for db in (10..=40).step_by(5) {
        let sc = fig2_scenario(mu_e, rs, db as f64);
        let exact = sop_exact(&sc, &s)?.total;
        let a = sop_asymptotic(&sc, &s)?;
        println!("{db:7}   {exact:.6e}  {:.6e}  {:.4}", a.sop_asym, exact / a.sop_asym);
    }
    let a = sop_asymptotic(&fig2_scenario(mu_e, rs, 40.0), &s)?;
    println!("\narray gain G = {:.4}, diversity order = {}", a.array_gain, a.diversity_order);
    println!("full-power part {:.4e}, interference-limited part {:.4e}", a.sop1_asym, a.sop2_asym);

    for mu_e in [0.1, 0.5, 1.0] {
        let g = sop_asymptotic(&fig2_scenario(mu_e, rs, 0.0), &s)?.array_gain;
        println!("mu_e = {mu_e}: G = {g:.4}");
    }
    Ok(())
}
