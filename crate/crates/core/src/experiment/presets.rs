//! Operating points of the three reference figures.
//!
//! All links share K, Δ and m within a figure. The second figure leaves μ_e
//! and R_s open, so they are arguments here.

use crate::ftr_channel::{FtrParams, SeriesControl};
use crate::secrecy_engine::Scenario;

use super::config::db_to_linear;
use super::sweep::{Output, SweepSpec, SweepVariable};

/// Stand-in for K = 0 in the K comparison, close to Nakagami-m.
pub const K_NEAR_ZERO: f64 = 1e-9;

fn links(m: f64, k: f64, delta: f64, mu_d: f64, mu_e: f64, mu_p: f64) -> (FtrParams, FtrParams, FtrParams) {
    let l = |mu| FtrParams::from_mean(m, k, delta, mu).expect("preset link parameters are valid");
    (l(mu_d), l(mu_e), l(mu_p))
}

/// K = 10, Δ = 0.5, m = 2.8, N₀ = 0 dB, μ_d = μ_p = 1, μ_e = 0.1, R_s = 0.1.
pub fn fig1_scenario(p_max_db: f64, i_th_db: f64) -> Scenario {
    let (d, e, p) = links(2.8, 10.0, 0.5, 1.0, 0.1, 1.0);
    Scenario::new(d, e, p, db_to_linear(p_max_db), db_to_linear(i_th_db), 1.0, 0.1).expect("valid preset")
}

/// I_th from -20 to 30 dB in 26 points.
pub fn fig1_sweep(p_max_db: f64) -> SweepSpec {
    let outs = vec![Output::Exact, Output::Sop1, Output::Sop2, Output::RegimeApprox];
    SweepSpec::new(SweepVariable::IThDb, -20.0, 30.0, 26, fig1_scenario(p_max_db, 0.0), SeriesControl::default(), outs, None)
        .expect("valid preset")
}

/// K = 5, Δ = 0.5, m = 10.8, P_M = N₀ = 0 dB, ρ = -5 dB, μ_p = 1.
pub fn fig2_scenario(mu_e: f64, rs: f64, mu_d_db: f64) -> Scenario {
    let (d, e, p) = links(10.8, 5.0, 0.5, db_to_linear(mu_d_db), mu_e, 1.0);
    Scenario::new(d, e, p, 1.0, db_to_linear(-5.0), 1.0, rs).expect("valid preset")
}

/// μ_d from 0 to 40 dB in 21 points, with the high-SNR asymptote.
pub fn fig2_sweep(mu_e: f64, rs: f64) -> SweepSpec {
    let outs = vec![Output::Exact, Output::Asymptotic];
    SweepSpec::new(SweepVariable::MuDDb, 0.0, 40.0, 21, fig2_scenario(mu_e, rs, 0.0), SeriesControl::default(), outs, None)
        .expect("valid preset")
}

/// Common K, Δ = 0.5, m = 10.8, P_M = N₀ = 0 dB, ρ = -5 dB, R_s = 3, μ_e = μ_p = 1.
pub fn fig3_scenario(k: f64, mu_d_db: f64) -> Scenario {
    let (d, e, p) = links(10.8, k, 0.5, db_to_linear(mu_d_db), 1.0, 1.0);
    Scenario::new(d, e, p, 1.0, db_to_linear(-5.0), 1.0, 3.0).expect("valid preset")
}

pub fn fig3_sweep(k: f64) -> SweepSpec {
    let outs = vec![Output::Exact, Output::Asymptotic];
    SweepSpec::new(SweepVariable::MuDDb, 0.0, 40.0, 21, fig3_scenario(k, 0.0), SeriesControl::default(), outs, None)
        .expect("valid preset")
}
