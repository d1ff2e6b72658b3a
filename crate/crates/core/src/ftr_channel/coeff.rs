//! Multiprecision evaluation of the d_j table.
//!
//! The double sum behind d_j alternates in sign and its terms exceed the
//! result by a factor that grows geometrically in j, so it is accumulated in
//! binary floating point with a working precision chosen from that growth
//! and checked afterwards. Each term Γ(ν+1+2l−k)·P^{k−2l}_ν(z) is rewritten
//! through the order reflection as (m)_{j+|μ|}·Γ(m)·P^{−|μ|}_ν(z) with
//! μ = k−2l, so only the positive, well conditioned P^{−μ} are needed. Those
//! are carried scaled by ((z+1)/2)^{−ν}, seeded from their hypergeometric
//! series and advanced in degree by the three-term recurrence, in which P is
//! the dominant solution.

use astro_float::{BigFloat, RoundingMode};
use std::f64::consts::LN_2;

const RM: RoundingMode = RoundingMode::ToEven;
/// Bits that must survive the cancellation of the alternating sum.
const KEEP_BITS: f64 = 96.0;
const MAX_PRECISION: usize = 1 << 15;
const SERIES_MAX_ITER: usize = 2_000_000;

/// Powers of the imaginary unit, i^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct UnitPhase(u8);

impl UnitPhase {
    fn pow(n: i64) -> Self {
        UnitPhase(n.rem_euclid(4) as u8)
    }

    fn mul(self, other: UnitPhase) -> Self {
        UnitPhase((self.0 + other.0) % 4)
    }
}

/// Phase attached to the (k, l) term. The printed factor e^{iπ(2l−k)/2}
/// belongs to the Legendre function continued across the cut from below
/// (x < 1) to z > 1, which differs from the real z > 1 branch by
/// e^{−iπμ/2}; the product of the two is what multiplies the real branch.
fn term_phase(k: usize, l: usize) -> UnitPhase {
    let mu = k as i64 - 2 * l as i64;
    UnitPhase::pow(-mu).mul(UnitPhase::pow(-mu))
}

/// Raw d_j values: ln of the real part and the imaginary part relative to it.
pub(crate) struct RawTable {
    pub ln_d: Vec<f64>,
    pub ln_c: Vec<f64>,
    pub imag_rel: Vec<f64>,
    pub precision: usize,
}

/// Natural log of |x| for a finite non-zero BigFloat, −∞ for zero.
fn ln_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (words, _, _, e, _) = x.as_raw_parts().expect("finite BigFloat");
    let top = *words.last().expect("non-empty mantissa") as f64;
    let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
    let frac = (top + next * 2f64.powi(-64)) * 2f64.powi(-64);
    frac.ln() + e as f64 * LN_2
}

struct Mp {
    p: usize,
}

impl Mp {
    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }
    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }
    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }
    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }
    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }
    fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }
}

/// Scaled Legendre function P^{−μ}_ν(z)/((z+1)/2)^ν
/// = s^μ/μ! · ₂F₁(−ν, μ−ν; 1+μ; t), with t = (z−1)/(z+1), s = √t.
fn scaled_legendre(mp: &Mp, nu_b: &BigFloat, nu: f64, mu: usize, t: &BigFloat, lead: &BigFloat) -> Option<BigFloat> {
    if lead.is_zero() {
        return Some(lead.clone());
    }
    let mut term = mp.num(1.0);
    let mut sum = term.clone();
    let settle = nu + mu as f64 + 1.0;
    for i in 0..SERIES_MAX_ITER {
        let a = mp.sub(&mp.num(i as f64), nu_b);
        let b = mp.sub(&mp.num((i + mu) as f64), nu_b);
        let den = mp.num(((i + 1 + mu) * (i + 1)) as f64);
        term = mp.div(&mp.mul(&mp.mul(&mp.mul(&term, &a), &b), t), &den);
        if term.is_zero() {
            return Some(mp.mul(&sum, lead));
        }
        sum = mp.add(&sum, &term);
        if i as f64 > settle {
            let (et, es) = (term.exponent()?, sum.exponent()?);
            if (es as i64 - et as i64) > mp.p as i64 + 8 {
                return Some(mp.mul(&sum, lead));
            }
        }
    }
    None
}

/// One attempt at working precision `p`. Returns `None` when the precision
/// proves insufficient.
fn attempt(m: f64, k: f64, delta: f64, n: usize, p: usize) -> Option<RawTable> {
    let mp = Mp { p };
    // Every quantity derived from m is formed at full precision: a rounded
    // ν = j+m−1 would be amplified by the cancellation below.
    let m_b = mp.num(m);
    let mk = mp.add(&m_b, &mp.num(k));
    let kd = mp.mul(&mp.num(k), &mp.num(delta));
    let r = mp.sqrt(&mp.mul(&mp.sub(&mk, &kd), &mp.add(&mk, &kd)));
    let mk_r = mp.add(&mk, &r);
    let t = mp.div(&mp.mul(&kd, &kd), &mp.mul(&mk_r, &mk_r));
    let s = mp.sqrt(&t);
    let z = mp.div(&mk, &r);
    let g = mp.div(&mk_r, &mp.mul(&mp.num(2.0), &r));
    let zg = mp.mul(&z, &g);
    let g2 = mp.mul(&g, &g);
    let ln_g = ln_abs(&g);
    let ln_r = ln_abs(&r);

    // (m)_i for i < 2n
    let mut poch = Vec::with_capacity(2 * n);
    poch.push(mp.num(1.0));
    for i in 1..2 * n.max(1) {
        let next = mp.mul(&poch[i - 1], &mp.add(&m_b, &mp.num((i - 1) as f64)));
        poch.push(next);
    }
    // (Δ/2)^k
    let half_delta = mp.num(0.5 * delta);
    let mut dpow = Vec::with_capacity(n);
    dpow.push(mp.num(1.0));
    for i in 1..n {
        let next = mp.mul(&dpow[i - 1], &half_delta);
        dpow.push(next);
    }

    let lgm = libm::lgamma(m);
    let ln_m = m.ln();
    let ln_k = k.ln();
    let mut out = RawTable {
        ln_d: Vec::with_capacity(n),
        ln_c: Vec::with_capacity(n),
        imag_rel: Vec::with_capacity(n),
        precision: p,
    };

    // scaled[μ] = (Ŝ^μ at j−1, Ŝ^μ at j); lead[μ] = s^μ/μ!
    let mut scaled: Vec<(BigFloat, BigFloat)> = Vec::with_capacity(n);
    let mut lead: Vec<BigFloat> = Vec::with_capacity(n);
    let mut pascal: Vec<Vec<BigFloat>> = Vec::with_capacity(n);
    let zero = mp.num(0.0);
    let one = mp.num(1.0);

    for j in 0..n {
        let nu = j as f64 + m - 1.0;
        let nu_b = mp.add(&m_b, &mp.num(j as f64 - 1.0));
        lead.push(if j == 0 {
            mp.num(1.0)
        } else {
            mp.div(&mp.mul(&lead[j - 1], &s), &mp.num(j as f64))
        });
        scaled.push((zero.clone(), zero.clone()));
        for mu in 0..=j {
            let next = if mu + 1 >= j {
                scaled_legendre(&mp, &nu_b, nu, mu, &t, &lead[mu])?
            } else {
                // (ν'+μ+1) g² Ŝ_{ν'+1} = (2ν'+1) z g Ŝ_{ν'} − (ν'−μ) Ŝ_{ν'−1}, ν' = ν−1
                let nup = mp.sub(&nu_b, &one);
                let (prev, cur) = &scaled[mu];
                let two_nup_1 = mp.add(&mp.add(&nup, &nup), &one);
                let a = mp.mul(&mp.mul(&two_nup_1, &zg), cur);
                let b = mp.mul(&mp.sub(&nup, &mp.num(mu as f64)), prev);
                let c = mp.add(&nup, &mp.num(mu as f64 + 1.0));
                mp.div(&mp.sub(&a, &b), &mp.mul(&c, &g2))
            };
            let slot = &mut scaled[mu];
            slot.0 = std::mem::replace(&mut slot.1, next);
        }

        let row: Vec<BigFloat> = if j == 0 {
            vec![mp.num(1.0)]
        } else {
            let prev = &pascal[j - 1];
            (0..=j)
                .map(|i| match i {
                    0 => mp.num(1.0),
                    i if i == j => mp.num(1.0),
                    i => mp.add(&prev[i - 1], &prev[i]),
                })
                .collect()
        };
        pascal.push(row);

        // A_μ = (m)_{j+μ} Ŝ^μ_ν
        let amp: Vec<BigFloat> = (0..=j).map(|mu| mp.mul(&poch[j + mu], &scaled[mu].1)).collect();

        let mut acc = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
        for kk in 0..=j {
            let w = mp.mul(&pascal[j][kk], &dpow[kk]);
            if w.is_zero() {
                continue;
            }
            let mut inner = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
            let mut used = [false; 4];
            for (l, binom) in pascal[kk].iter().enumerate().take(kk + 1) {
                let mu = (kk as i64 - 2 * l as i64).unsigned_abs() as usize;
                let ph = term_phase(kk, l).0 as usize;
                inner[ph] = mp.add(&inner[ph], &mp.mul(binom, &amp[mu]));
                used[ph] = true;
            }
            for ph in 0..4 {
                if used[ph] {
                    acc[ph] = mp.add(&acc[ph], &mp.mul(&w, &inner[ph]));
                }
            }
        }
        let re = mp.sub(&acc[0], &acc[2]);
        let im = mp.sub(&acc[1], &acc[3]);
        let magnitude = mp.add(&mp.add(&acc[0], &acc[1]), &mp.add(&acc[2], &acc[3]));
        if re.is_zero() || re.is_negative() {
            return None;
        }
        let ln_re = ln_abs(&re);
        let lost = (ln_abs(&magnitude) - ln_re) / LN_2;
        if p as f64 - lost < KEEP_BITS {
            return None;
        }
        let ln_pref = nu * ln_g - (j as f64 + m) * ln_r;
        out.ln_d.push(lgm + ln_pref + ln_re);
        out.ln_c.push(if k > 0.0 {
            m * ln_m + j as f64 * ln_k - libm::lgamma(j as f64 + 1.0) + ln_pref + ln_re
        } else if j == 0 {
            0.0
        } else {
            f64::NEG_INFINITY
        });
        out.imag_rel.push((ln_abs(&im) - ln_re).exp());
    }
    Some(out)
}

/// Initial working precision in bits, from the growth of the cancelling sum.
fn initial_precision(m: f64, k: f64, delta: f64, n: usize) -> usize {
    let (mk, kd) = (m + k, k * delta);
    let growth = ((mk + kd) / (mk - kd)).log2().max(0.0);
    let bits = ((n as f64 - 1.0 + m).max(1.0) * growth).ceil() as usize + 128;
    bits.div_ceil(64) * 64
}

/// d_0..d_{n−1} for shape m, factor K and similarity Δ. `None` only if the
/// precision ceiling is reached.
pub(crate) fn table(m: f64, k: f64, delta: f64, n: usize) -> Option<RawTable> {
    let mut p = initial_precision(m, k, delta, n);
    while p <= MAX_PRECISION {
        if let Some(t) = attempt(m, k, delta, n, p) {
            return Some(t);
        }
        p *= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_are_real() {
        for k in 0..12 {
            for l in 0..=k {
                let ph = term_phase(k, l);
                assert_eq!(ph, UnitPhase(if k % 2 == 0 { 0 } else { 2 }));
            }
        }
    }

    #[test]
    fn ln_abs_matches_f64() {
        for v in [1.0, 0.75, 3.0e-300, 12345.678, 7.0e250, -2.5] {
            let b = BigFloat::from_f64(v, 192);
            assert!((ln_abs(&b) - f64::abs(v).ln()).abs() < 1e-13 * f64::abs(v).ln().abs().max(1.0));
        }
        assert_eq!(ln_abs(&BigFloat::from_f64(0.0, 128)), f64::NEG_INFINITY);
    }

    #[test]
    fn precision_grows_with_cancellation() {
        let easy = initial_precision(2.8, 10.0, 0.5, 80);
        let hard = initial_precision(0.5, 15.0, 1.0, 80);
        assert!(hard > easy);
        assert_eq!(initial_precision(2.0, 0.0, 0.5, 80) % 64, 0);
    }
}
