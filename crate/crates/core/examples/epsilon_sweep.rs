//! Builds networks for `sin(2πx)` at several target accuracies, once with a
//! smooth activation and once with leaky ReLU, and prints the size/error table.
//!
//! ```text
//! cargo run --release --example epsilon_sweep -- tanh "leaky_relu(0.01)"
//! ```

use holonet::approx::{assemble, AssemblyBudget, Measurement};
use holonet::catalog;
use holonet::corpus::corpus;

fn main() -> holonet::Result<()> {
    let mut names: Vec<String> = std::env::args().skip(1).collect();
    if names.is_empty() {
        names = vec!["tanh".into(), "leaky_relu(0.01)".into()];
    }
    let f = corpus("sin2pi_d1")?;
    for name in &names {
        let act = catalog(name)?;
        println!("{act}");
        println!("  eps      M  K        depth width sparsity  magnitude   err_grid   err/eps  surrogate");
        for eps in [0.2, 0.1, 0.05] {
            let budget = if act.as_piecewise_linear().is_some() {
                AssemblyBudget::relu_for_epsilon(eps, f.alpha)?
            } else {
                AssemblyBudget::for_epsilon(eps, f.alpha, f.dim)?
            };
            let (_, r) = assemble(&f, &act, budget, Measurement::default_for(1, 7))?;
            println!(
                "  {eps:<6} {:>3} {:>8.0} {:>6} {:>5} {:>8} {:>10.3e} {:>10.3e} {:>9.3} {:>10.3e}",
                r.budget.resolution,
                r.budget.knob,
                r.metrics.depth,
                r.metrics.width,
                r.metrics.sparsity,
                r.metrics.magnitude,
                r.sup_err_grid,
                r.sup_err_grid / eps,
                r.surrogate_err
            );
        }
    }
    Ok(())
}
