//! Fluctuating two-ray (FTR) fading: the mixture coefficients, the truncated
//! series density and distribution, parameter conversion and an exact
//! generative sampler.
//!
//! The power gain h of an FTR link is a Gamma mixture,
//!
//! f(x) = Σ_j c_j x^j e^{−x/2σ²} / (j! (2σ²)^{j+1}),  c_j = m^m K^j d_j / (Γ(m) j!),
//!
//! with non-negative weights summing to one. The weights are computed once per
//! (m, K, Δ) and shared by every evaluation through a process-wide cache.

mod coeff;

use crate::error::{Error, Result};
use crate::specfun;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest accepted imaginary residue of d_j, relative to max(1, |d_j|).
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Parameters of one FTR link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtrParams {
    /// Shape of the unit-mean Gamma fluctuation of the specular waves.
    pub m: f64,
    /// Ratio of specular to diffuse power (linear).
    pub k: f64,
    /// Similarity of the two specular amplitudes, in [0, 1].
    pub delta: f64,
    /// Variance σ² of each real diffuse component.
    pub sigma2: f64,
}

impl FtrParams {
    pub fn new(m: f64, k: f64, delta: f64, sigma2: f64) -> Result<Self> {
        let bad = |what: String| Err(Error::Config(what));
        if !(m > 0.0 && m.is_finite()) {
            return bad(format!("FTR shape m = {m} must be positive"));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return bad(format!("FTR factor K = {k} must be non-negative"));
        }
        if !(0.0..=1.0).contains(&delta) {
            return bad(format!("FTR similarity Δ = {delta} must lie in [0, 1]"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return bad(format!("diffuse variance σ² = {sigma2} must be positive"));
        }
        let disc = (m + k) * (m + k) - (k * delta) * (k * delta);
        if !(disc > 0.0) {
            return bad(format!("(m+K)² − (KΔ)² = {disc} must be positive"));
        }
        Ok(FtrParams { m, k, delta, sigma2 })
    }

    /// Parameters with mean power `mu`, i.e. σ² = μ / (2(1+K)).
    pub fn from_mean(m: f64, k: f64, delta: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("mean power {mu} must be positive")));
        }
        FtrParams::new(m, k, delta, mu / (2.0 * (1.0 + k)))
    }

    /// Mean power E{h} = 2σ²(1+K).
    pub fn mean(&self) -> f64 {
        2.0 * self.sigma2 * (1.0 + self.k)
    }

    /// Scale 2σ² of the diffuse component.
    pub fn scale(&self) -> f64 {
        2.0 * self.sigma2
    }

    /// The same fading shape with a different mean power.
    pub fn with_mean(&self, mu: f64) -> Result<Self> {
        FtrParams::from_mean(self.m, self.k, self.delta, mu)
    }
}

/// Mean power of an FTR link.
pub fn mean(p: &FtrParams) -> f64 {
    p.mean()
}

/// See [`FtrParams::from_mean`].
pub fn from_mean(m: f64, k: f64, delta: f64, mu: f64) -> Result<FtrParams> {
    FtrParams::from_mean(m, k, delta, mu)
}

/// Truncation policy for the j-series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    /// Stop once three consecutive terms fall below this fraction of the
    /// running sum. Zero keeps every term.
    pub rel_stop_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 80,
            rel_stop_tol: 0.0,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_stop_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        if !(rel_stop_tol >= 0.0) {
            return Err(Error::Config(format!("rel_stop_tol = {rel_stop_tol} must be non-negative")));
        }
        Ok(SeriesControl {
            max_terms,
            rel_stop_tol,
        })
    }

    pub fn with_terms(max_terms: usize) -> Self {
        SeriesControl {
            max_terms,
            ..Default::default()
        }
    }
}

/// Running sum with the early-stop rule of [`SeriesControl`].
#[derive(Debug, Clone)]
pub struct SeriesSum {
    sum: f64,
    tol: f64,
    quiet: usize,
}

impl SeriesSum {
    pub fn new(tol: f64) -> Self {
        SeriesSum {
            sum: 0.0,
            tol,
            quiet: 0,
        }
    }

    /// Adds a term; true once the series may stop.
    pub fn add(&mut self, term: f64) -> bool {
        self.sum += term;
        if self.tol > 0.0 && term.abs() < self.tol * self.sum.abs() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= 3
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// The mixture weights of one (m, K, Δ) shape, shared across threads.
#[derive(Debug)]
pub struct Mixture {
    m: f64,
    k: f64,
    ln_d: Vec<f64>,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
    imag_rel: Vec<f64>,
    precision: usize,
}

impl Mixture {
    fn build(m: f64, k: f64, delta: f64, n: usize) -> Result<Self> {
        let raw = coeff::table(m, k, delta, n).ok_or_else(|| {
            Error::overflow("d_coeff", format!("precision ceiling reached for m = {m}, K = {k}, Δ = {delta}"))
        })?;
        for (j, (&ln_d, &rel)) in raw.ln_d.iter().zip(&raw.imag_rel).enumerate() {
            // |Im| ≤ tol·max(1, |Re|), written relative to Re so that large
            // d_j beyond the f64 range are still checked
            let allowed = IMAG_TOLERANCE * (-ln_d).exp().max(1.0);
            if !(rel <= allowed) {
                let re = ln_d.exp();
                return Err(Error::ImaginaryResidue { j, real: re, imag: rel * re });
            }
        }
        let weights = raw.ln_c.iter().map(|c| c.exp()).collect();
        Ok(Mixture {
            m,
            k,
            ln_d: raw.ln_d,
            weights,
            ln_weights: raw.ln_c,
            imag_rel: raw.imag_rel,
            precision: raw.precision,
        })
    }

    /// Number of tabulated terms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// c_0..c_{n−1}.
    pub fn weights(&self, n: usize) -> &[f64] {
        &self.weights[..n.min(self.len())]
    }

    /// ln c_j, −∞ where the weight vanishes.
    pub fn ln_weights(&self, n: usize) -> &[f64] {
        &self.ln_weights[..n.min(self.len())]
    }

    /// ln d_j.
    pub fn ln_d(&self, j: usize) -> f64 {
        self.ln_d[j]
    }

    /// Mass left outside the first n weights, 1 − Σ_{j<n} c_j.
    pub fn residual_mass(&self, n: usize) -> f64 {
        1.0 - self.weights(n).iter().sum::<f64>()
    }

    /// |Im d_j| / |Re d_j| left by the complex accumulation.
    pub fn imag_residue(&self, j: usize) -> f64 {
        self.imag_rel[j]
    }

    /// Working precision (bits) the table needed.
    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Rejects a truncation at n terms whose weights are still rising.
    pub fn check_truncation(&self, n: usize) -> Result<()> {
        if self.k == 0.0 || n < 2 {
            return Ok(());
        }
        let w = self.weights(n);
        let (last, prev) = (w[n - 1], w[n - 2]);
        if last > prev && last > 1e-12 {
            return Err(Error::convergence(
                "ftr_channel",
                format!(
                    "mixture weights still rising at term {n} (c = {last:e}) for m = {}, K = {}",
                    self.m, self.k
                ),
            ));
        }
        Ok(())
    }
}

type CacheKey = (u64, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Mixture>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Mixture>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The first `n` mixture weights of `p`'s shape, computed once and cached.
pub fn mixture(p: &FtrParams, n: usize) -> Result<Arc<Mixture>> {
    let key = (p.m.to_bits(), p.k.to_bits(), p.delta.to_bits());
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        if hit.len() >= n {
            return Ok(Arc::clone(hit));
        }
    }
    let built = Arc::new(Mixture::build(p.m, p.k, p.delta, n.max(1))?);
    let mut map = cache().lock().unwrap();
    let entry = map.entry(key).or_insert_with(|| Arc::clone(&built));
    if entry.len() < built.len() {
        *entry = Arc::clone(&built);
    }
    Ok(Arc::clone(entry))
}

/// Mixture for a series evaluation under `s`, with the truncation check.
pub fn series(p: &FtrParams, s: &SeriesControl) -> Result<Arc<Mixture>> {
    let mix = mixture(p, s.max_terms)?;
    mix.check_truncation(s.max_terms)?;
    Ok(mix)
}

/// d_j, the real coefficient of the FTR series.
pub fn d_coeff(p: &FtrParams, j: usize) -> Result<f64> {
    let v = mixture(p, j + 1)?.ln_d(j).exp();
    if !v.is_finite() {
        return Err(Error::overflow("d_coeff", format!("d_{j} exceeds f64")));
    }
    Ok(v)
}

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::domain(func, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

/// Truncated-series density of the power gain.
pub fn pdf(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<f64> {
    check_x("pdf", x)?;
    let mix = series(p, s)?;
    let scale = p.scale();
    let ln_w = mix.ln_weights(s.max_terms);
    if x == 0.0 {
        return Ok(mix.weights(1)[0] / scale);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let y = x / scale;
    let ln_y = y.ln();
    let mut acc = SeriesSum::new(s.rel_stop_tol);
    let (mut prev, mut last) = (0.0, 0.0);
    let mut stopped = false;
    for (j, &lw) in ln_w.iter().enumerate() {
        let term = (lw + j as f64 * ln_y - y - specfun::ln_factorial(j)).exp();
        prev = last;
        last = term;
        if acc.add(term) {
            stopped = true;
            break;
        }
    }
    let sum = acc.value();
    if !stopped && p.k > 0.0 && ln_w.len() >= 2 && last > prev && last > 1e-10 * sum {
        return Err(Error::convergence(
            "pdf",
            format!("density terms still growing at term {} for x = {x}", ln_w.len()),
        ));
    }
    Ok(sum / scale)
}

/// Σ c_j P(j+1, x/2σ²): the truncated mixture CDF before clamping.
fn cdf_series(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<f64> {
    let mix = series(p, s)?;
    let y = x / p.scale();
    let mut acc = SeriesSum::new(s.rel_stop_tol);
    for (j, &w) in mix.weights(s.max_terms).iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        if acc.add(w * specfun::reg_lower_gamma(j as f64 + 1.0, y)?) {
            break;
        }
    }
    Ok(acc.value())
}

/// Truncated-series CDF, clamped to [0, 1]; exactly 0 at the origin.
pub fn cdf(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<f64> {
    check_x("cdf", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(cdf_series(p, x, s)?.clamp(0.0, 1.0))
}

/// Σ c_j Q(j+1, x/2σ²): the upper-tail mass carried by the first terms.
fn tail_series(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<(f64, Arc<Mixture>)> {
    let mix = series(p, s)?;
    let y = x / p.scale();
    let mut acc = SeriesSum::new(s.rel_stop_tol);
    for (j, &w) in mix.weights(s.max_terms).iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        if acc.add(w * specfun::reg_upper_gamma(j as f64 + 1.0, y)?) {
            break;
        }
    }
    Ok((acc.value(), mix))
}

/// Unclamped CDF in the finite-sum form
/// 1 − Σ c_j e^{−y} Σ_{n≤j} yⁿ/n!, y = x/2σ².
///
/// Differs from [`cdf`] by the mass 1 − Σ c_j left out by the truncation.
pub fn cdf_raw(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<f64> {
    check_x("cdf_raw", x)?;
    Ok(1.0 - tail_series(p, x, s)?.0)
}

/// 1 − cdf, clamped to [0, 1].
///
/// Summed as (1 − Σ c_j) + Σ c_j Q(j+1, y), which equals 1 − cdf but keeps
/// its relative accuracy deep in the upper tail.
pub fn ccdf(p: &FtrParams, x: f64, s: &SeriesControl) -> Result<f64> {
    check_x("ccdf", x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let (tail, mix) = tail_series(p, x, s)?;
    Ok((mix.residual_mass(s.max_terms) + tail).clamp(0.0, 1.0))
}

/// Probability mass outside the first `s.max_terms` mixture weights.
pub fn residual_mass(p: &FtrParams, s: &SeriesControl) -> Result<f64> {
    Ok(mixture(p, s.max_terms)?.residual_mass(s.max_terms))
}

/// Draws FTR power gains from the generative model
/// h = |√ζ (V₁e^{iφ₁} + V₂e^{iφ₂}) + X + iY|².
#[derive(Debug, Clone)]
pub struct FtrSampler {
    zeta: Option<Gamma<f64>>,
    diffuse: Normal<f64>,
    v1: f64,
    v2: f64,
}

impl FtrSampler {
    pub fn new(p: &FtrParams) -> Self {
        let root = (1.0 - p.delta * p.delta).max(0.0).sqrt();
        let v1 = (p.sigma2 * p.k * (1.0 + root)).sqrt();
        let v2 = (p.sigma2 * p.k * (1.0 - root)).max(0.0).sqrt();
        FtrSampler {
            zeta: (p.k > 0.0).then(|| Gamma::new(p.m, 1.0 / p.m).expect("valid Gamma shape")),
            diffuse: Normal::new(0.0, p.sigma2.sqrt()).expect("valid variance"),
            v1,
            v2,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut re = self.diffuse.sample(rng);
        let mut im = self.diffuse.sample(rng);
        if let Some(zeta) = &self.zeta {
            let amp = zeta.sample(rng).sqrt();
            let (s1, c1) = (2.0 * PI * rng.gen::<f64>()).sin_cos();
            let (s2, c2) = (2.0 * PI * rng.gen::<f64>()).sin_cos();
            re += amp * (self.v1 * c1 + self.v2 * c2);
            im += amp * (self.v1 * s1 + self.v2 * s2);
        }
        re * re + im * im
    }
}

/// One power-gain draw. Build an [`FtrSampler`] once when drawing many.
pub fn sample<R: Rng + ?Sized>(p: &FtrParams, rng: &mut R) -> f64 {
    FtrSampler::new(p).sample(rng)
}

#[cfg(test)]
mod tests;
