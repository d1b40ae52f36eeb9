//! Sieve sizes and convergence rates for regression and classification as
//! the smoothness grows.
//!
//! ```text
//! cargo run --example sieve_rates -- 100000
//! ```

use holonet::complexity::{classification_sieve, rational, regression_sieve, Noise};

fn main() -> holonet::Result<()> {
    let n: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1e5);
    let d = rational(2.0)?;
    println!("n = {n}, d = 2");
    println!("{:>6} {:>14} {:>10} {:>18} {:>10}", "alpha", "regression", "rate", "class. q=1", "rate");
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let a = rational(alpha)?;
        let reg = regression_sieve(n, a, d, None)?;
        let cls = classification_sieve(n, a, d, Noise::Finite(rational(1.0)?), None)?;
        println!(
            "{alpha:>6} {:>14} {:>10.3e} {:>18} {:>10.3e}",
            format!("n^-{}", reg.rate_exponent),
            reg.rate,
            format!("(log³n/n)^{}", cls.rate_exponent),
            cls.rate
        );
    }
    let hard = classification_sieve(n, rational(2.0)?, d, Noise::Infinite, None)?;
    println!("hard margin: width {} rate {:.3e}", hard.width, hard.rate);
    Ok(())
}
