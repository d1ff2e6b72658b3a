//! Brute-force simulation against the series, including the split on h_p < rho.
use ftr_secrecy::experiment::presets::fig1_scenario;
use ftr_secrecy::ftr_channel::{self, SeriesControl};
use ftr_secrecy::monte_carlo::{simulate, McConfig};
use ftr_secrecy::secrecy_engine::sop_exact;

fn main() -> ftr_secrecy::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1_000_000);
    let cfg = McConfig::new(trials, 2024, 64)?;
    let s = SeriesControl::default();
    println!("I_th(dB)  exact      simulated  ±ci95      z");
    for ith in [-10.0, 0.0, 5.0] {
        let sc = fig1_scenario(0.0, ith);
        let exact = sop_exact(&sc, &s)?;
        let r = simulate(&sc, &cfg)?;
        println!("{ith:7}   {:.6}   {:.6}   {:.6}  {:+.2}", exact.total, r.sop_hat, r.ci95, (r.sop_hat - exact.total) / r.stderr);
        let f = ftr_channel::cdf(&sc.p, sc.rho(), &s)?;
        println!(
            "          given h_p < rho: {:.6} vs {:.6}; given h_p >= rho: {:.6} vs {:.6}",
            r.below_rho.rate(),
            exact.sop1 / f,
            r.above_rho.rate(),
            exact.sop2 / ftr_channel::ccdf(&sc.p, sc.rho(), &s)?
        );
    }
    Ok(())
}
