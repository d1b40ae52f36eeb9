//! ReLU approximation of a two-dimensional target, then the same network
//! rewritten for leaky ReLU.
//!
//! ```text
//! cargo run --release --example relu_pipeline -- 0.1
//! ```

use holonet::approx::{assemble_pwl, assemble_relu, AssemblyBudget, Measurement};
use holonet::catalog;
use holonet::corpus::corpus;

fn main() -> holonet::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let f = corpus("gauss_bump_d2")?;
    let budget = AssemblyBudget::relu_for_epsilon(eps, f.alpha)?;
    let (_, r) = assemble_relu(&f, budget.clone(), Measurement::default_for(f.dim, 0))?;
    println!("relu   M={} m={} {}  err {:.4e}", r.budget.resolution, r.budget.product_layers, r.metrics, r.sup_err_grid);
    let leaky = catalog("leaky_relu(0.1)")?;
    let (_, r) = assemble_pwl(&f, &leaky, budget, Measurement::default_for(f.dim, 0))?;
    println!("leaky  M={} m={} {}  err {:.4e}", r.budget.resolution, r.budget.product_layers, r.metrics, r.sup_err_grid);
    Ok(())
}
