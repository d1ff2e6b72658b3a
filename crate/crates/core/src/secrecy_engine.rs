//! Closed-form secrecy outage probability of the underlay link.
//!
//! The outage event γ_d ≤ λ−1+λγ_e splits on whether the primary-link gain
//! h_p lies below ρ = I_th/P_M (full power P_M) or above it (power I_th/h_p):
//! SOP = SOP₁ + SOP₂. Both parts reduce to finite double sums over the
//! mixture weights of h_d, the wiretap moments E{h_e^f e^{−λh_e/2σ_d²}} and,
//! for SOP₂, the truncated primary-link integrals I₁.
//!
//! Internally the outer j_d sum is reordered as Σ_n T_n·inner(n) with
//! T_n = Σ_{j_d≥n} c_{j_d}, and every positive inner sum is accumulated in
//! log space. [`sop_exact_direct`] evaluates the same series in the printed
//! nested order as an independent check of that reordering.

use crate::error::{Error, Result};
use crate::ftr_channel::{self, FtrParams, SeriesControl, SeriesSum};
use crate::specfun::{ln_binomial, ln_factorial, ln_upper_gamma};
use serde::{Deserialize, Serialize};

/// Negative truncation residue that is still treated as round-off.
pub const NEGATIVE_RESIDUE: f64 = 1e-8;

/// Default ρ at which [`sop_regime_approx`] switches branches (0 dB).
pub const DEFAULT_REGIME_THRESHOLD: f64 = 1.0;

/// The three links and the power budget of one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Source to destination.
    pub d: FtrParams,
    /// Source to eavesdropper.
    pub e: FtrParams,
    /// Source to primary user.
    pub p: FtrParams,
    /// Maximal transmit power P_M.
    pub p_max: f64,
    /// Interference threshold I_th at the primary user.
    pub i_th: f64,
    /// Noise power N₀.
    pub n0: f64,
    /// Target secrecy rate R_s in bits per channel use.
    pub rs: f64,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(d: FtrParams, e: FtrParams, p: FtrParams, p_max: f64, i_th: f64, n0: f64, rs: f64) -> Result<Self> {
        for (name, v) in [("p_max", p_max), ("i_th", i_th), ("n0", n0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be a positive finite power")));
            }
        }
        if !(rs >= 0.0 && rs.is_finite()) {
            return Err(Error::Config(format!("secrecy rate rs = {rs} must be non-negative")));
        }
        Ok(Scenario {
            d,
            e,
            p,
            p_max,
            i_th,
            n0,
            rs,
        })
    }

    /// ρ = I_th/P_M.
    pub fn rho(&self) -> f64 {
        self.i_th / self.p_max
    }

    /// λ = 2^{R_s}.
    pub fn lam(&self) -> f64 {
        self.rs.exp2()
    }

    /// (λ−1)N₀/P_M, the SNR gap at full power.
    fn gap_full_power(&self) -> f64 {
        (self.lam() - 1.0) * self.n0 / self.p_max
    }

    /// (λ−1)N₀/I_th, the SNR gap per unit of h_p under power control.
    fn gap_per_gain(&self) -> f64 {
        (self.lam() - 1.0) * self.n0 / self.i_th
    }
}

/// Exact SOP and its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SopBreakdown {
    pub sop1: f64,
    pub sop2: f64,
    pub total: f64,
}

/// High-SNR behaviour in 2σ_d²: SOP ≈ 1/(G·2σ_d²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub sop_asym: f64,
    pub sop1_asym: f64,
    pub sop2_asym: f64,
    /// Secrecy array gain G.
    pub array_gain: f64,
    pub diversity_order: u32,
}

/// Transmit power under the underlay rule, min(I_th/h_p, P_M).
pub fn power_rule(sc: &Scenario, hp: f64) -> f64 {
    if hp < sc.rho() {
        sc.p_max
    } else {
        sc.i_th / hp
    }
}

/// Instantaneous secrecy capacity max{log₂(1+γ_d) − log₂(1+γ_e), 0}.
pub fn secrecy_capacity(gamma_d: f64, gamma_e: f64) -> f64 {
    ((gamma_d.ln_1p() - gamma_e.ln_1p()) / std::f64::consts::LN_2).max(0.0)
}

/// ln Σ exp(xᵢ) over finite-or-−∞ inputs; −∞ for an empty or all −∞ input.
fn ln_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let top = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + xs.into_iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// (n−f)·ln x with the convention 0·ln 0 = 0.
fn ln_pow(x: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.ln()
    }
}

/// ln E{h_e^f exp(−λh_e/2σ_d²)} for f = 0..n.
fn ln_wiretap_moments(e: &FtrParams, sigma_d2: f64, lam: f64, s: &SeriesControl, n: usize) -> Result<Vec<f64>> {
    let mix = ftr_channel::series(e, s)?;
    let ln_w = mix.ln_weights(s.max_terms);
    let se = e.scale();
    let v = lam / (2.0 * sigma_d2) + 1.0 / se;
    let ln_v = v.ln();
    let ln_se = se.ln();
    Ok((0..n)
        .map(|f| {
            ln_sum_exp(ln_w.iter().enumerate().map(|(je, &lw)| {
                let a = (je + f + 1) as f64;
                lw - ln_factorial(je) - (je as f64 + 1.0) * ln_se + libm::lgamma(a) - a * ln_v
            }))
        })
        .collect())
}

/// E{h_e^f exp(−λh_e/2σ_d²)}, the wiretap moment shared by SOP₁ and SOP₂.
pub fn wiretap_moment(f: usize, e: &FtrParams, sigma_d2: f64, lam: f64, s: &SeriesControl) -> Result<f64> {
    if !(lam >= 1.0) {
        return Err(Error::domain("wiretap_moment", format!("λ = {lam} must be at least 1")));
    }
    if !(sigma_d2 > 0.0) {
        return Err(Error::domain("wiretap_moment", format!("σ_d² = {sigma_d2} must be positive")));
    }
    let v = ln_wiretap_moments(e, sigma_d2, lam, s, f + 1)?[f].exp();
    if !v.is_finite() {
        return Err(Error::overflow("wiretap_moment", format!("moment of order {f} exceeds f64")));
    }
    Ok(v)
}

/// ln I₁(q) for q = 0..n at threshold ρ and gap b = (λ−1)N₀/I_th:
/// ln ∫_ρ^∞ h^q e^{−b h/2σ_d²} f_{h_p}(h) dh.
fn ln_i1_table(p: &FtrParams, rho: f64, b: f64, sigma_d2: f64, s: &SeriesControl, n: usize) -> Result<Vec<f64>> {
    let mix = ftr_channel::series(p, s)?;
    let ln_w = mix.ln_weights(s.max_terms);
    if rho.is_infinite() {
        return Ok(vec![f64::NEG_INFINITY; n]);
    }
    let sp = p.scale();
    let w = b / (2.0 * sigma_d2) + 1.0 / sp;
    let (ln_w_rate, ln_sp) = (w.ln(), sp.ln());
    let x = w * rho;
    let mut out = Vec::with_capacity(n);
    for q in 0..n {
        let mut terms = Vec::with_capacity(ln_w.len());
        for (jp, &lw) in ln_w.iter().enumerate() {
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let a = (jp + q + 1) as f64;
            terms.push(lw - ln_factorial(jp) - (jp as f64 + 1.0) * ln_sp + ln_upper_gamma(a, x)? - a * ln_w_rate);
        }
        out.push(ln_sum_exp(terms));
    }
    Ok(out)
}

/// I₁ for the (n_d, f) term of SOP₂: ∫_ρ^∞ h_p^{n_d−f} e^{−(λ−1)N₀h_p/(2σ_d²I_th)} f_{h_p}(h_p) dh_p.
pub fn i1(sc: &Scenario, n_d: usize, f: usize, s: &SeriesControl) -> Result<f64> {
    if f > n_d {
        return Err(Error::domain("i1", format!("f = {f} exceeds n_d = {n_d}")));
    }
    let q = n_d - f;
    let v = ln_i1_table(&sc.p, sc.rho(), sc.gap_per_gain(), sc.d.sigma2, s, q + 1)?[q].exp();
    if !v.is_finite() {
        return Err(Error::overflow("i1", format!("I₁ of order {q} exceeds f64")));
    }
    Ok(v)
}

/// Per-scenario quantities shared by the SOP parts.
struct Prepared {
    n: usize,
    /// 2σ_d²
    sd: f64,
    lam: f64,
    /// T_n = Σ_{j≥n} c_j of h_d
    tail: Vec<f64>,
    weights: Vec<f64>,
    ln_moment: Vec<f64>,
    ln_fact: Vec<f64>,
    stop: f64,
}

fn prepare(sc: &Scenario, s: &SeriesControl) -> Result<Prepared> {
    let n = s.max_terms;
    let mix = ftr_channel::series(&sc.d, s)?;
    let weights = mix.weights(n).to_vec();
    let mut tail = vec![0.0; weights.len() + 1];
    for j in (0..weights.len()).rev() {
        tail[j] = tail[j + 1] + weights[j];
    }
    tail.truncate(weights.len());
    Ok(Prepared {
        n: weights.len(),
        sd: sc.d.scale(),
        lam: sc.lam(),
        tail,
        weights,
        ln_moment: ln_wiretap_moments(&sc.e, sc.d.sigma2, sc.lam(), s, n)?,
        ln_fact: (0..n).map(ln_factorial).collect(),
        stop: s.rel_stop_tol,
    })
}

impl Prepared {
    /// ln of the n-th inner term: 1/(n! sdⁿ) Σ_f C(n,f) gap^{n−f} λ^f X(n−f) M_f,
    /// with ln X supplied by `ln_extra` (zero for SOP₁).
    fn ln_inner(&self, n: usize, gap: f64, ln_extra: impl Fn(usize) -> f64) -> f64 {
        let ln_lam = self.lam.ln();
        let lead = -self.ln_fact[n] - n as f64 * self.sd.ln();
        let fs = (0..=n).filter(|&f| gap > 0.0 || f == n);
        lead + ln_sum_exp(fs.map(|f| {
            ln_binomial(n, f) + ln_pow(gap, n - f) + f as f64 * ln_lam + ln_extra(n - f) + self.ln_moment[f]
        }))
    }

    /// Σ_n T_n·exp(ln_inner(n)), with the early-stop rule and a check that
    /// the terms are no longer rising at the cutoff.
    fn outer(&self, func: &'static str, ln_term: impl Fn(usize) -> f64) -> Result<f64> {
        let mut acc = SeriesSum::new(self.stop);
        let (mut prev, mut last) = (0.0, 0.0);
        for n in 0..self.n {
            let term = self.tail[n] * ln_term(n).exp();
            prev = last;
            last = term;
            if acc.add(term) {
                return Ok(acc.value());
            }
        }
        if self.n >= 2 && last > prev && last > 1e-12 {
            return Err(Error::convergence(func, format!("terms still rising at n = {} ({last:e})", self.n)));
        }
        Ok(acc.value())
    }

    /// Pr{no outage} at full power P_M, truncated: Σ_n T_n inner₁(n).
    fn s1(&self, a: f64) -> Result<f64> {
        let shift = -a / self.sd;
        self.outer("sop1", |n| shift + self.ln_inner(n, a, |_| 0.0))
    }

    /// The SOP₂ triple series, given ln I₁(q).
    fn s2(&self, b: f64, ln_i1: &[f64]) -> Result<f64> {
        self.outer("sop2", |n| self.ln_inner(n, b, |q| ln_i1[q]))
    }
}

/// Clamps a truncation residue just below zero; larger negatives are errors.
fn clamp_probability(quantity: &'static str, v: f64, upper: f64) -> Result<f64> {
    if v < -NEGATIVE_RESIDUE || v.is_nan() {
        return Err(Error::NegativeProbability { quantity, value: v });
    }
    Ok(v.clamp(0.0, upper.max(0.0)))
}

/// SOP₁ = F_{h_p}(ρ)·Pr{P_M h_d/N₀ ≤ λ−1+λP_M h_e/N₀}.
pub fn sop1(sc: &Scenario, s: &SeriesControl) -> Result<f64> {
    let prep = prepare(sc, s)?;
    let f = ftr_channel::cdf(&sc.p, sc.rho(), s)?;
    clamp_probability("sop1", f * (1.0 - prep.s1(sc.gap_full_power())?), f)
}

/// SOP₂, the outage mass of the power-controlled regime h_p ≥ ρ.
pub fn sop2(sc: &Scenario, s: &SeriesControl) -> Result<f64> {
    sop2_at(sc, sc.rho(), s)
}

fn sop2_at(sc: &Scenario, rho: f64, s: &SeriesControl) -> Result<f64> {
    let prep = prepare(sc, s)?;
    let ccdf = ftr_channel::ccdf(&sc.p, rho, s)?;
    let b = sc.gap_per_gain();
    let ln_i1 = ln_i1_table(&sc.p, rho, b, sc.d.sigma2, s, prep.n)?;
    clamp_probability("sop2", ccdf - prep.s2(b, &ln_i1)?, ccdf)
}

/// Exact SOP as SOP₁ + SOP₂.
pub fn sop_exact(sc: &Scenario, s: &SeriesControl) -> Result<SopBreakdown> {
    let prep = prepare(sc, s)?;
    let rho = sc.rho();
    let f = ftr_channel::cdf(&sc.p, rho, s)?;
    let ccdf = ftr_channel::ccdf(&sc.p, rho, s)?;
    let b = sc.gap_per_gain();
    let ln_i1 = ln_i1_table(&sc.p, rho, b, sc.d.sigma2, s, prep.n)?;
    let sop1 = clamp_probability("sop1", f * (1.0 - prep.s1(sc.gap_full_power())?), f)?;
    let sop2 = clamp_probability("sop2", ccdf - prep.s2(b, &ln_i1)?, ccdf)?;
    Ok(SopBreakdown {
        sop1,
        sop2,
        total: (sop1 + sop2).min(1.0),
    })
}

/// Exact SOP summed in the printed nested order
/// 1 − F Σ_{j_d} Σ_{n≤j_d} Σ_{f≤n} (…) − Σ_{j_d} Σ_{n≤j_d} Σ_{f≤n} (…) I₁ I₂,
/// without clamping.
pub fn sop_exact_direct(sc: &Scenario, s: &SeriesControl) -> Result<f64> {
    let prep = prepare(sc, s)?;
    let rho = sc.rho();
    let f_rho = ftr_channel::cdf(&sc.p, rho, s)?;
    let (a, b, lam, sd) = (sc.gap_full_power(), sc.gap_per_gain(), prep.lam, prep.sd);
    let ln_i1 = ln_i1_table(&sc.p, rho, b, sc.d.sigma2, s, prep.n)?;
    let (mut first, mut second) = (0.0, 0.0);
    for (jd, &c) in prep.weights.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for n in 0..=jd {
            let lead = c.ln() - prep.ln_fact[n] - n as f64 * sd.ln();
            for f in 0..=n {
                let common = lead + ln_binomial(n, f) + f as f64 * lam.ln() + prep.ln_moment[f];
                if a > 0.0 || f == n {
                    first += (common - a / sd + ln_pow(a, n - f)).exp();
                }
                if b > 0.0 || f == n {
                    second += (common + ln_pow(b, n - f) + ln_i1[n - f]).exp();
                }
            }
        }
    }
    Ok(1.0 - f_rho * first - second)
}

/// SOP of the same link without the interference constraint (transmitter
/// always at P_M): SOP₁ with F_{h_p}(ρ) = 1.
pub fn non_crn_sop(sc: &Scenario, s: &SeriesControl) -> Result<f64> {
    let prep = prepare(sc, s)?;
    clamp_probability("non_crn_sop", 1.0 - prep.s1(sc.gap_full_power())?, 1.0)
}

/// SOP under pure power control P_t = I_th/h_p with no P_M cap: SOP₂ at ρ = 0.
pub fn power_control_sop(sc: &Scenario, s: &SeriesControl) -> Result<f64> {
    sop2_at(sc, 0.0, s)
}

/// Two-regime approximation: [`power_control_sop`] when ρ ≤ `threshold`,
/// otherwise [`non_crn_sop`].
pub fn sop_regime_approx(sc: &Scenario, s: &SeriesControl, threshold: f64) -> Result<f64> {
    if sc.rho() <= threshold {
        power_control_sop(sc, s)
    } else {
        non_crn_sop(sc, s)
    }
}

/// Slope of the CDF of h_d at the origin in units of x/2σ²: m^m d_0/Γ(m).
pub fn asym_cdf_coeff(d: &FtrParams) -> Result<f64> {
    Ok(ftr_channel::mixture(d, 1)?.weights(1)[0])
}

/// E{h_p·1{h_p ≥ ρ}} = 2σ_p² Σ c_j Γ(j+2, ρ/2σ_p²)/j!.
fn upper_first_moment(p: &FtrParams, rho: f64, s: &SeriesControl) -> Result<f64> {
    let mix = ftr_channel::series(p, s)?;
    let sp = p.scale();
    let mut acc = SeriesSum::new(s.rel_stop_tol);
    for (j, &lw) in mix.ln_weights(s.max_terms).iter().enumerate() {
        if lw == f64::NEG_INFINITY {
            continue;
        }
        let term = (lw - ln_factorial(j) + ln_upper_gamma(j as f64 + 2.0, rho / sp)?).exp();
        if acc.add(term) {
            break;
        }
    }
    Ok(sp * acc.value())
}

/// Asymptotic SOP for large 2σ_d² at fixed μ_e, with the secrecy array gain.
pub fn sop_asymptotic(sc: &Scenario, s: &SeriesControl) -> Result<AsymptoticResult> {
    let coeff = asym_cdf_coeff(&sc.d)?;
    let rho = sc.rho();
    let f = ftr_channel::cdf(&sc.p, rho, s)?;
    let ccdf = ftr_channel::ccdf(&sc.p, rho, s)?;
    let lam_mu_e = sc.lam() * sc.e.mean();
    let sd = sc.d.scale();
    let sop1_asym = coeff * f * (sc.gap_full_power() + lam_mu_e) / sd;
    let control = sc.gap_per_gain() * upper_first_moment(&sc.p, rho, s)?;
    let sop2_asym = coeff * (control + lam_mu_e * ccdf) / sd;
    let array_gain = 1.0 / (coeff * (f * sc.gap_full_power() + lam_mu_e + control));
    Ok(AsymptoticResult {
        sop_asym: 1.0 / (array_gain * sd),
        sop1_asym,
        sop2_asym,
        array_gain,
        diversity_order: 1,
    })
}
