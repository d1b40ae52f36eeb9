//! Rewrites a ReLU product network over other piecewise-linear activations
//! and checks the rewritten networks agree with the original.
//!
//! ```text
//! cargo run --example relu_lift
//! ```

use holonet::catalog;
use holonet::interval::Interval;
use holonet::lift::{lift, plan_lift, verify_lift};
use holonet::relu_gadgets::product;

fn main() -> holonet::Result<()> {
    let src = product(8, 1.0)?;
    let domain = vec![Interval::new(-1.0, 1.0); 2];
    println!("relu product  {}", src.metrics());
    for name in ["leaky_relu(0.01)", "leaky_relu(0.5)", "hard_tanh"] {
        let act = catalog(name)?;
        let plan = plan_lift(&src, &act, &domain)?;
        let lifted = lift(&src, &act, &plan)?;
        let diff = verify_lift(&src, &lifted, &domain, 10_000, 0, 1e-9)?;
        println!("{name:<17} {}  breakpoint {} radius {:.3}  max diff {diff:.2e}", lifted.metrics(), plan.breakpoint, plan.r);
    }
    Ok(())
}
