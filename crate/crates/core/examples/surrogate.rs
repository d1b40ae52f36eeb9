//! Local Taylor surrogates on refining grids, with the measured sup error next
//! to the guaranteed `R·M^{-α}`.
//!
//! ```text
//! cargo run --release --example surrogate -- gauss_bump_d2
//! ```

use holonet::approx::{sup_error, surrogate, Scheme};
use holonet::corpus::corpus;

fn main() -> holonet::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "sin2pi_d1".into());
    let f = corpus(&name)?;
    println!("{name}: d={} alpha={} R={:.3} degree {}", f.dim, f.alpha, f.radius, f.taylor_degree());
    println!("{:>4} {:>12} {:>12}", "M", "sup error", "bound");
    for m in [2, 4, 8, 16, 32] {
        let s = surrogate(&f, m)?;
        let err = sup_error(&s, &f, Scheme::default_for(f.dim));
        println!("{m:>4} {err:>12.4e} {:>12.4e}", s.error_bound(&f));
    }
    Ok(())
}
