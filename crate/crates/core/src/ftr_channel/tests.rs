#![allow(clippy::excessive_precision)]

use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn params(m: f64, k: f64, delta: f64, mu: f64) -> FtrParams {
    FtrParams::from_mean(m, k, delta, mu).unwrap()
}

/// d_j from the angular integral Γ(j+m)·(1/2π)∮(1+Δcosθ)^j/(m+K+KΔcosθ)^{j+m}dθ,
/// by the trapezoid rule (spectrally accurate for this periodic integrand).
fn d_by_angle(m: f64, k: f64, delta: f64, j: usize) -> f64 {
    let n = 4096;
    let ln_f: Vec<f64> = (0..n)
        .map(|i| {
            let c = (2.0 * PI * i as f64 / n as f64).cos();
            j as f64 * (1.0 + delta * c).ln() - (j as f64 + m) * (m + k + k * delta * c).ln()
        })
        .collect();
    let top = ln_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = ln_f.iter().map(|v| (v - top).exp()).sum::<f64>() / n as f64;
    (libm::lgamma(j as f64 + m) + top + mean.ln()).exp()
}

/// Composite Gauss–Legendre (5 nodes per panel) on [a, b].
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            X.iter().zip(W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

#[test]
fn params_validation() {
    assert!(FtrParams::new(0.0, 1.0, 0.5, 1.0).is_err());
    assert!(FtrParams::new(1.0, -1.0, 0.5, 1.0).is_err());
    assert!(FtrParams::new(1.0, 1.0, 1.5, 1.0).is_err());
    assert!(FtrParams::new(1.0, 1.0, 0.5, 0.0).is_err());
    assert!(FtrParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    assert!(FtrParams::new(0.5, 15.0, 1.0, 1.0).is_ok());
}

#[test]
fn mean_and_from_mean() {
    let p = FtrParams::new(2.8, 10.0, 0.5, 1.0 / 22.0).unwrap();
    assert!((mean(&p) - 1.0).abs() < 1e-15);
    assert_eq!(mean(&FtrParams::new(1.0, 0.0, 0.3, 0.5).unwrap()), 1.0);
    assert_eq!(mean(&FtrParams::new(1.0, 5.0, 0.3, 2.0).unwrap()), 24.0);
    assert!((from_mean(2.8, 10.0, 0.5, 1.0).unwrap().sigma2 - 1.0 / 22.0).abs() < 1e-17);
    assert_eq!(from_mean(3.0, 0.0, 0.2, 7.0).unwrap().sigma2, 3.5);
}

#[test]
fn d_coeff_frozen_values() {
    // Trapezoid rule on the angular integral at 50 digits, converged to 1e-35.
    let frozen = [
        (2.8, 10.0, 0.5, 0, 0.002055290576934713146904816),
        (2.8, 10.0, 0.5, 3, 0.00003824399596283032451169587),
        (2.8, 10.0, 0.5, 20, 0.00003298590641726006770186722),
        (2.8, 10.0, 0.5, 40, 7088.917343763375751129133),
        (2.8, 10.0, 0.5, 79, 2.143437559038926260626436e+31),
        (10.8, 5.0, 0.5, 3, 0.0000001027317751744564765272379),
        (10.8, 5.0, 0.5, 40, 1765345.22260608807261146),
        (10.8, 5.0, 0.5, 79, 2.485736567358240817916483e+35),
        (0.5, 15.0, 1.0, 3, 0.000211773105320461557351198),
        (0.5, 15.0, 1.0, 40, 0.06210205831915372565845016),
        (0.5, 15.0, 1.0, 79, 2646320680669485020064.102),
        (15.0, 15.0, 1.0, 20, 3.5503396795780595492538e-14),
        (1.3, 4.2, 0.93, 11, 0.06073914158910294689728649),
    ];
    for (m, k, delta, j, want) in frozen {
        let p = FtrParams::new(m, k, delta, 1.0).unwrap();
        let got = d_coeff(&p, j).unwrap();
        assert!(rel(got, want) < 1e-11, "d_{j}({m}, {k}, {delta}) = {got}, want {want}");
    }
}

#[test]
fn d_coeff_single_wave_closed_form() {
    for (m, k) in [(2.8, 10.0), (0.5, 0.0), (10.8, 5.0), (15.0, 15.0)] {
        let p = FtrParams::new(m, k, 0.0, 1.0).unwrap();
        for j in [0, 1, 7, 40, 79] {
            let want = (libm::lgamma(j as f64 + m) - (j as f64 + m) * (m + k).ln()).exp();
            assert!(rel(d_coeff(&p, j).unwrap(), want) < 1e-12, "m = {m}, K = {k}, j = {j}");
        }
    }
    let p = FtrParams::new(2.8, 0.0, 0.5, 1.0).unwrap();
    let want = libm::tgamma(2.8) / 2.8f64.powf(2.8);
    assert!(rel(d_coeff(&p, 0).unwrap(), want) < 1e-14);
}

#[test]
fn weights_form_a_distribution() {
    for (m, k, delta) in [(2.8, 10.0, 0.5), (10.8, 5.0, 0.5), (10.8, 10.0, 0.5), (1.3, 4.2, 0.93)] {
        let mix = mixture(&FtrParams::new(m, k, delta, 1.0).unwrap(), 300).unwrap();
        let w = mix.weights(300);
        assert!(w.iter().all(|&c| c >= 0.0));
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "Σc = {total} for m = {m}, K = {k}");
    }
}

#[test]
fn mixture_cache_is_shared() {
    let p = params(3.3, 6.5, 0.71, 2.0);
    let a = mixture(&p, 60).unwrap();
    let b = mixture(&p.with_mean(9.0).unwrap(), 30).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    let c = mixture(&p, 90).unwrap();
    assert_eq!(c.len(), 90);
    assert_eq!(c.weights(60), a.weights(60));
}

#[test]
fn exponential_closure_at_zero_k() {
    let s = SeriesControl::default();
    for m in [0.7, 2.8, 10.8] {
        let p = FtrParams::new(m, 0.0, 0.4, 0.5).unwrap();
        for i in 0..=40 {
            let x = i as f64 * 0.25;
            assert!((cdf(&p, x, &s).unwrap() - (1.0 - (-x).exp())).abs() < 1e-12);
            assert!((pdf(&p, x, &s).unwrap() - (-x).exp()).abs() < 1e-12);
        }
    }
    let p = FtrParams::new(1.0, 0.0, 0.0, 0.5).unwrap();
    assert!((pdf(&p, 1.0, &s).unwrap() - 0.36787944117144233).abs() < 1e-15);
    assert!((cdf(&p, 2.0, &s).unwrap() - 0.8646647167633873).abs() < 1e-15);
}

#[test]
fn density_at_origin() {
    let p = params(2.8, 10.0, 0.5, 1.0);
    let d0 = d_coeff(&p, 0).unwrap();
    let want = 2.8f64.powf(2.8) * d0 / (libm::tgamma(2.8) * p.scale());
    assert!(rel(pdf(&p, 0.0, &SeriesControl::default()).unwrap(), want) < 1e-13);
    assert_eq!(cdf(&p, 0.0, &SeriesControl::default()).unwrap(), 0.0);
}

#[test]
fn distribution_frozen_values() {
    // Full mixture (400 terms) with weights from the angular integral.
    let s = SeriesControl::default();
    let fig1 = params(2.8, 10.0, 0.5, 1.0);
    assert!(rel(pdf(&fig1, 0.5, &s).unwrap(), 0.7121815455087908) < 1e-10);
    assert!(rel(cdf(&fig1, 0.5, &s).unwrap(), 0.2965690042850406) < 1e-10);
    let fig2 = params(10.8, 5.0, 0.5, 1.0);
    assert!(rel(cdf(&fig2, 1.0, &s).unwrap(), 0.5784774545076473) < 1e-10);
    let fig3 = params(10.8, 10.0, 0.5, 1.0);
    assert!(rel(cdf(&fig3, 1.0, &s).unwrap(), 0.5708454010849321) < 1e-10);
}

#[test]
fn pdf_integrates_to_one() {
    let s = SeriesControl::with_terms(250);
    for p in [params(2.8, 10.0, 0.5, 1.0), params(10.8, 5.0, 0.5, 1.0), params(10.8, 10.0, 0.5, 1.0)] {
        let total = integrate(|x| pdf(&p, x, &s).unwrap(), 0.0, 12.0, 600);
        assert!((total - 1.0).abs() < 1e-6, "∫pdf = {total}");
        let half = integrate(|x| pdf(&p, x, &s).unwrap(), 0.0, 0.8, 100);
        assert!((half - cdf(&p, 0.8, &s).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn cdf_derivative_matches_pdf() {
    let s = SeriesControl::with_terms(250);
    for p in [params(2.8, 10.0, 0.5, 1.0), params(10.8, 5.0, 0.5, 1.0)] {
        for i in 0..=40 {
            let x = 1e-3 * 1e4f64.powf(i as f64 / 40.0);
            let h = 1e-5 * x;
            let fd = if x < p.mean() {
                (cdf(&p, x + h, &s).unwrap() - cdf(&p, x - h, &s).unwrap()) / (2.0 * h)
            } else {
                (ccdf(&p, x - h, &s).unwrap() - ccdf(&p, x + h, &s).unwrap()) / (2.0 * h)
            };
            let f = pdf(&p, x, &s).unwrap();
            assert!(rel(fd, f) < 1e-4, "x = {x}: {fd} vs {f}");
        }
    }
}

#[test]
fn heavy_tail_shape_keeps_mass_beyond_many_terms() {
    let p = params(0.5, 15.0, 1.0, 1.0);
    let r80 = residual_mass(&p, &SeriesControl::default()).unwrap();
    let r300 = residual_mass(&p, &SeriesControl::with_terms(300)).unwrap();
    assert!(r80 > r300 && r300 > 1e-5);
}

#[test]
fn cdf_is_monotone() {
    let s = SeriesControl::default();
    let p = params(0.5, 15.0, 1.0, 1.0);
    let mut prev = 0.0;
    for i in 0..400 {
        let v = cdf(&p, i as f64 * 0.02, &s).unwrap();
        assert!(v >= prev && v <= 1.0);
        prev = v;
    }
}

#[test]
fn truncation_converges_for_moderate_k() {
    let (s60, s80) = (SeriesControl::with_terms(60), SeriesControl::default());
    let p = params(10.8, 5.0, 0.5, 1.0);
    for i in 1..=50 {
        let x = i as f64 * 0.1;
        assert!((cdf(&p, x, &s80).unwrap() - cdf(&p, x, &s60).unwrap()).abs() <= 1e-8);
    }
}

#[test]
fn raw_form_differs_by_residual_mass() {
    let s = SeriesControl::default();
    let p = params(2.8, 10.0, 0.5, 1.0);
    let gap = residual_mass(&p, &s).unwrap();
    assert!(gap > 1e-6 && gap < 1e-4);
    for x in [0.1, 0.7, 2.0, 6.0] {
        let d = cdf_raw(&p, x, &s).unwrap() - cdf(&p, x, &s).unwrap();
        assert!((d - gap).abs() < 1e-13);
        assert!((ccdf(&p, x, &s).unwrap() + cdf(&p, x, &s).unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn early_stop_agrees_with_full_sum() {
    let full = SeriesControl::with_terms(200);
    let early = SeriesControl::new(200, 1e-16).unwrap();
    let p = params(10.8, 5.0, 0.5, 1.0);
    for x in [0.05, 0.5, 1.5, 4.0] {
        assert!(rel(pdf(&p, x, &early).unwrap(), pdf(&p, x, &full).unwrap()) < 1e-14);
        assert!((cdf(&p, x, &early).unwrap() - cdf(&p, x, &full).unwrap()).abs() < 1e-14);
    }
    let mut acc = SeriesSum::new(1e-3);
    assert!(!acc.add(1.0));
    assert!(!acc.add(1e-4));
    assert!(!acc.add(1e-4));
    assert!(acc.add(1e-4));
}

#[test]
fn rising_weights_are_a_convergence_error() {
    let p = params(10.8, 10.0, 0.5, 1.0);
    let err = cdf(&p, 1.0, &SeriesControl::with_terms(5)).unwrap_err();
    assert!(matches!(err, Error::Convergence { .. }), "{err}");
}

#[test]
fn growing_density_terms_are_a_convergence_error() {
    let p = params(2.8, 10.0, 0.5, 1.0);
    let err = pdf(&p, 10.0, &SeriesControl::default()).unwrap_err();
    assert!(matches!(err, Error::Convergence { .. }));
    assert!(pdf(&p, 10.0, &SeriesControl::with_terms(250)).is_ok());
}

#[test]
fn domain_errors() {
    let p = params(2.8, 10.0, 0.5, 1.0);
    let s = SeriesControl::default();
    assert!(matches!(pdf(&p, -1.0, &s), Err(Error::Domain { .. })));
    assert!(matches!(cdf(&p, f64::NAN, &s), Err(Error::Domain { .. })));
    assert!(SeriesControl::new(0, 0.0).is_err());
    assert!(SeriesControl::new(10, -1.0).is_err());
}

#[test]
fn sampler_zero_k_is_exponential() {
    let p = FtrParams::new(2.0, 0.0, 0.5, 0.5).unwrap();
    let sampler = FtrSampler::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 1.63 / (n as f64).sqrt(), "KS = {ks}");
}

#[test]
fn sampler_mean_and_distribution() {
    let p = params(2.8, 10.0, 0.5, 1.0);
    let sampler = FtrSampler::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 200_000;
    let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt(), "mean {mean}");

    let mut sorted = xs;
    sorted.sort_by(f64::total_cmp);
    let s = SeriesControl::with_terms(250);
    for q in 1..=20 {
        let x = sorted[(q * n) / 21];
        let ecdf = sorted.partition_point(|&v| v <= x) as f64 / n as f64;
        assert!((ecdf - cdf(&p, x, &s).unwrap()).abs() <= 4.0 / (n as f64).sqrt());
    }
}

#[test]
fn sampler_specular_amplitudes() {
    let p = FtrParams::new(2.0, 6.0, 0.8, 0.3).unwrap();
    let smp = FtrSampler::new(&p);
    let (a, b) = (smp.v1 * smp.v1, smp.v2 * smp.v2);
    assert!(rel((a + b) / p.scale(), 6.0) < 1e-14);
    assert!(rel(2.0 * smp.v1 * smp.v2 / (a + b), 0.8) < 1e-14);
    let tie = FtrSampler::new(&FtrParams::new(2.0, 6.0, 1.0, 0.3).unwrap());
    assert_eq!(tie.v1, tie.v2);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn d_matches_angular_integral(m in 0.5f64..15.0, k in 0.0f64..15.0, delta in 0.0f64..=1.0, j in 0usize..60) {
            let p = FtrParams::new(m, k, delta, 1.0).unwrap();
            let got = d_coeff(&p, j).unwrap();
            let want = d_by_angle(m, k, delta, j);
            prop_assert!(rel(got, want) < 1e-9, "d_{} = {} vs {}", j, got, want);
        }

        #[test]
        fn from_mean_round_trips(m in 0.1f64..20.0, k in 0.0f64..50.0, delta in 0.0f64..=1.0, mu in 1e-6f64..1e6) {
            let p = FtrParams::from_mean(m, k, delta, mu).unwrap();
            prop_assert!(rel(p.mean(), mu) < 1e-15);
        }

        #[test]
        fn cdf_nondecreasing(m in 0.5f64..15.0, k in 0.0f64..10.0, delta in 0.0f64..=1.0, x in 0.0f64..5.0, dx in 0.0f64..1.0) {
            let p = FtrParams::from_mean(m, k, delta, 1.0).unwrap();
            let s = SeriesControl::with_terms(150);
            prop_assert!(cdf(&p, x + dx, &s).unwrap() >= cdf(&p, x, &s).unwrap());
        }
    }
}
