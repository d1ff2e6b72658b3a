//! Log-gamma, incomplete gamma and associated Legendre values.
use ftr_secrecy::specfun::{legendre_p, ln_binomial, ln_gamma, reg_lower_gamma, reg_upper_gamma, upper_gamma};

fn main() -> ftr_secrecy::Result<()> {
    println!("ln Γ(0.5) = {:.15}  (ln √π = {:.15})", ln_gamma(0.5)?, std::f64::consts::PI.sqrt().ln());
    println!("C(80, 40) = {:.6e}", ln_binomial(80, 40).exp());

    println!("\n  a      x     P(a,x)             Q(a,x)             Γ(a,x)");
    for (a, x) in [(1.0, 1.0), (3.5, 2.0), (40.0, 35.0), (81.0, 120.0)] {
        println!(
            "{a:5} {x:6}  {:.15}  {:.15e}  {:.6e}",
            reg_lower_gamma(a, x)?,
            reg_upper_gamma(a, x)?,
            upper_gamma(a, x)?
        );
    }

    println!("\nP^μ_ν(z) for z > 1");
    for (nu, mu, z) in [(2.0, 0, 1.5), (2.0, 1, 1.5), (3.3, -2, 1.2), (12.8, -5, 1.01)] {
        println!("  ν = {nu:5}, μ = {mu:2}, z = {z:4}: {:.12e}", legendre_p(nu, mu, z)?);
    }
    Ok(())
}
