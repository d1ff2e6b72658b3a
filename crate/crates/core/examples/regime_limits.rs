//! The two limits of the interference threshold: non-cognitive operation and pure power control.
use ftr_secrecy::experiment::presets::fig1_scenario;
use ftr_secrecy::ftr_channel::SeriesControl;
use ftr_secrecy::secrecy_engine::{non_crn_sop, power_control_sop, sop_exact, sop_regime_approx, DEFAULT_REGIME_THRESHOLD};

fn main() -> ftr_secrecy::Result<()> {
    let s = SeriesControl::default();
    for pm in [0.0, 10.0] {
        println!("P_M = {pm} dB");
        println!("  rho(dB)  exact       non-CRN     SOP2|rho=0  regime approx");
        for rho_db in [-40.0, -20.0, -10.0, 0.0, 10.0, 20.0, 40.0] {
            let sc = fig1_scenario(pm, pm + rho_db);
            println!(
                "  {rho_db:6}   {:.6}  {:.6}  {:.6}  {:.6}",
                sop_exact(&sc, &s)?.total,
                non_crn_sop(&sc, &s)?,
                power_control_sop(&sc, &s)?,
                sop_regime_approx(&sc, &s, DEFAULT_REGIME_THRESHOLD)?
            );
        }
    }
    Ok(())
}
