//! Brute-force outage estimation by drawing channel triples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftr_channel::FtrSampler;
use crate::secrecy_engine::{power_rule, Scenario};

const Z95: f64 = 1.96;

/// Below this many expected outages the Wilson interval replaces the normal one.
pub const WILSON_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub chunks: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { trials: 10_000_000, seed: 0, chunks: 64 }
    }
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, chunks: usize) -> Result<Self> {
        let cfg = Self { trials, seed, chunks };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.chunks == 0 {
            return Err(Error::Config("chunks must be at least 1".into()));
        }
        Ok(())
    }

    fn chunk_trials(&self, i: usize) -> u64 {
        let c = self.chunks as u64;
        self.trials / c + u64::from((i as u64) < self.trials % c)
    }
}

/// Outage count over some subset of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub outages: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self { trials: self.trials + o.trials, outages: self.outages + o.outages }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.outages as f64 / self.trials as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Rare outages (or rare successes) get the Wilson interval.
    pub fn uses_wilson(&self) -> bool {
        let (n, p) = (self.trials as f64, self.rate());
        p * n < WILSON_CUTOFF || (1.0 - p) * n < WILSON_CUTOFF
    }

    /// 95% interval.
    pub fn interval(&self) -> (f64, f64) {
        if self.uses_wilson() {
            wilson(self.rate(), self.trials as f64)
        } else {
            let (p, h) = (self.rate(), Z95 * self.stderr());
            ((p - h).max(0.0), (p + h).min(1.0))
        }
    }
}

fn wilson(p: f64, n: f64) -> (f64, f64) {
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub trials: u64,
    pub outages: u64,
    pub sop_hat: f64,
    pub stderr: f64,
    pub ci95: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub chunks: usize,
    /// Trials with h_p below ρ (full power).
    pub below_rho: Tally,
    /// Trials with h_p at or above ρ (interference limited).
    pub above_rho: Tally,
}

impl McReport {
    fn from_tallies(cfg: &McConfig, below: Tally, above: Tally) -> Self {
        let all = below.merge(above);
        let (lo, hi) = all.interval();
        let sop_hat = all.rate();
        let ci95 = if all.uses_wilson() {
            0.5 * (hi - lo)
        } else {
            Z95 * all.stderr()
        };
        Self {
            trials: all.trials,
            outages: all.outages,
            sop_hat,
            stderr: all.stderr(),
            ci95,
            ci_low: lo,
            ci_high: hi,
            seed: cfg.seed,
            chunks: cfg.chunks,
            below_rho: below,
            above_rho: above,
        }
    }

    /// Is `p` within `k` standard errors of the estimate?
    pub fn agrees(&self, p: f64, k: f64) -> bool {
        (p - self.sop_hat).abs() <= k * self.stderr.max(1.0 / self.trials as f64)
    }
}

/// Outage test in the SNR domain, γ_d ≤ λ − 1 + λ γ_e.
pub fn is_outage(gamma_d: f64, gamma_e: f64, lam: f64) -> bool {
    gamma_d <= lam - 1.0 + lam * gamma_e
}

pub fn simulate(sc: &Scenario, cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    let (sd, se, sp) = (FtrSampler::new(&sc.d), FtrSampler::new(&sc.e), FtrSampler::new(&sc.p));
    let (rho, lam) = (sc.rho(), sc.lam());
    let (below, above) = (0..cfg.chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let (mut below, mut above) = (Tally::default(), Tally::default());
            for _ in 0..cfg.chunk_trials(i) {
                let hp = sp.sample(&mut rng);
                let hd = sd.sample(&mut rng);
                let he = se.sample(&mut rng);
                let pt = power_rule(sc, hp);
                let out = is_outage(pt * hd / sc.n0, pt * he / sc.n0, lam);
                let t = if hp < rho { &mut below } else { &mut above };
                t.trials += 1;
                t.outages += u64::from(out);
            }
            (below, above)
        })
        .reduce(|| (Tally::default(), Tally::default()), |a, b| (a.0.merge(b.0), a.1.merge(b.1)));
    Ok(McReport::from_tallies(cfg, below, above))
}
