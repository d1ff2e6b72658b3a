//! Where a stronger specular component starts to help the legitimate link.
//!
//! With R_s = 3 the outage threshold sits above the mean SNR at low mu_d. A
//! larger K concentrates h_d around its mean, which then hurts, so the K
//! ordering flips somewhere above 10 dB.
use ftr_secrecy::experiment::presets::{fig3_scenario, K_NEAR_ZERO};
use ftr_secrecy::ftr_channel::SeriesControl;
use ftr_secrecy::secrecy_engine::sop_exact;

fn main() -> ftr_secrecy::Result<()> {
    let s = SeriesControl::default();
    println!("mu_d(dB)  K~0       K=5       K=10      larger K better?");
    let mut crossing = None;
    for i in 0..=30 {
        let db = 5.0 + i as f64;
        let v = [K_NEAR_ZERO, 5.0, 10.0]
            .iter()
            .map(|&k| sop_exact(&fig3_scenario(k, db), &s).map(|r| r.total))
            .collect::<ftr_secrecy::Result<Vec<f64>>>()?;
        let better = v[0] > v[1] && v[1] > v[2];
        if better && crossing.is_none() {
            crossing = Some(db);
        }
        println!("{db:7}   {:.6}  {:.6}  {:.6}  {}", v[0], v[1], v[2], if better { "yes" } else { "no" });
    }
    match crossing {
        Some(db) => println!("ordering K~0 > 5 > 10 holds from mu_d = {db} dB"),
        None => println!("ordering never established on this grid"),
    }
    Ok(())
}
