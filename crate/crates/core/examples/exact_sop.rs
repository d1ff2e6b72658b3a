//! Exact SOP at one operating point and its split into SOP1 and SOP2.
use ftr_secrecy::experiment::presets::fig1_scenario;
use ftr_secrecy::ftr_channel::SeriesControl;
use ftr_secrecy::secrecy_engine::{sop_exact, sop_exact_direct};

fn main() -> ftr_secrecy::Result<()> {
    let s = SeriesControl::default();
    println!("P_M(dB) I_th(dB)  rho        SOP1          SOP2          SOP");
    for pm in [0.0, 10.0] {
        for ith in [-10.0, 0.0, 10.0, 20.0] {
            let sc = fig1_scenario(pm, ith);
            let r = sop_exact(&sc, &s)?;
            println!("{pm:6} {ith:8}  {:9.3e}  {:.6e}  {:.6e}  {:.8}", sc.rho(), r.sop1, r.sop2, r.total);
        }
    }
    let sc = fig1_scenario(0.0, 0.0);
    let gap = sop_exact(&sc, &s)?.total - sop_exact_direct(&sc, &s)?;
    println!("\nreordered vs nested summation at 0 dB / 0 dB: {gap:.1e}");
    Ok(())
}
