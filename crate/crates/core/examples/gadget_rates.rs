//! Sweeps every gadget over `K ∈ {10², …, 10⁴}` and prints the fitted
//! log-log slopes next to the theoretical exponents.
//!
//! ```text
//! cargo run --release --example gadget_rates -- sigmoid
//! ```

use holonet::catalog;
use holonet::gadgets::GadgetKit;
use holonet::sweep::{default_knobs, sweep, GadgetKind};

fn main() -> holonet::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "sigmoid".into());
    let kit = GadgetKit::new(&catalog(&name)?)?;
    let kinds = [
        GadgetKind::Square,
        GadgetKind::Product { range: 1.0 },
        GadgetKind::Monomial { m: vec![1, 2], cap: 3 },
        GadgetKind::Sqrt,
        GadgetKind::Abs,
        GadgetKind::Relu,
    ];
    println!("{name}: K_0 = {:.4}", kit.k0());
    for kind in &kinds {
        let model = sweep(&kit, kind, &default_knobs(), kind.default_scheme())?;
        let slope = model.slope.map_or("n/a".to_string(), |s| format!("{s:+.3}"));
        println!(
            "{:<6} rate {:<10} slope {slope} (theory {:+.1})  C_hat {:.3e}",
            model.gadget,
            model.rate.label(),
            model.rate.exponent(),
            model.c_hat
        );
        for p in &model.points {
            println!(
                "    K {:>8.1}  depth {:>2} width {:>3}  err {:.3e}  floor {:.1e}{}",
                p.knob,
                p.metrics.depth,
                p.metrics.width,
                p.sup_error,
                p.floor,
                if p.used { "" } else { "  (dropped)" }
            );
        }
    }
    Ok(())
}
