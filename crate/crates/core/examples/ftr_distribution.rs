//! pdf, cdf and mixture weights of one FTR link, checked against samples.
use ftr_secrecy::ftr_channel::{self, FtrParams, FtrSampler, SeriesControl};
use rand::SeedableRng;

fn main() -> ftr_secrecy::Result<()> {
    let p = FtrParams::from_mean(2.8, 10.0, 0.5, 1.0)?;
    let s = SeriesControl::default();
    let mix = ftr_channel::mixture(&p, s.max_terms)?;
    println!("m = {}, K = {}, Δ = {}, σ² = {:.6}", p.m, p.k, p.delta, p.sigma2);
    println!("d_j needed {} bits; mass beyond {} terms: {:.3e}", mix.precision(), s.max_terms, mix.residual_mass(s.max_terms));
    for j in [0, 1, 5, 20, 79] {
        println!("  d_{j:<2} = {:.12e}   c_{j:<2} = {:.6e}", ftr_channel::d_coeff(&p, j)?, mix.weights(80)[j]);
    }

    let sampler = FtrSampler::new(&p);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut xs: Vec<f64> = (0..200_000).map(|_| sampler.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let ecdf = |x: f64| xs.partition_point(|&v| v <= x) as f64 / xs.len() as f64;

    println!("\n   x      pdf        cdf        ecdf");
    for i in 0..=10 {
        let x = 0.3 * i as f64;
        println!("{x:5.2}  {:.6}  {:.6}  {:.6}", ftr_channel::pdf(&p, x, &s)?, ftr_channel::cdf(&p, x, &s)?, ecdf(x));
    }
    Ok(())
}
