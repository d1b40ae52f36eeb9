//! Lists the activation catalog with each entry's class and constants.
//!
//! ```text
//! cargo run --example activations
//! ```

use holonet::activation::CATALOG;
use holonet::catalog;

fn main() -> holonet::Result<()> {
    println!("{:<18} {:<8} {:>10} {:>10} {:>10} {:>10}", "name", "class", "t", "s'(t)", "s''(t)", "K0");
    for name in CATALOG {
        let act = catalog(name)?;
        if let Some(q) = act.as_locally_quadratic() {
            let t = q.expansion_point();
            println!(
                "{:<18} {:<8} {:>10.3} {:>10.4} {:>10.4} {:>10.3e}",
                act.to_string(),
                "smooth",
                t,
                q.d1(t),
                q.d2(t),
                q.k0()
            );
        } else if let Some(p) = act.as_piecewise_linear() {
            println!("{:<18} {:<8} breakpoints {:?} slopes {:?}", act.to_string(), "pwl", p.breakpoints(), p.slopes());
        }
    }
    Ok(())
}
