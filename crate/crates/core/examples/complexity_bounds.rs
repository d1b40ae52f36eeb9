//! Covering-number bound for a network class, and an empirical check of the
//! parameter-perturbation estimate behind it.
//!
//! ```text
//! cargo run --example complexity_bounds
//! ```

use holonet::complexity::{covering_bound, lipschitz_propagation_check};
use holonet::network::random_network;
use holonet::{catalog, NetworkClassSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> holonet::Result<()> {
    let act = catalog("tanh")?;
    let spec = NetworkClassSpec { depth: 4.0, width: 16.0, sparsity: 300.0, magnitude: 2.0, input_dim: 2, output_dim: 1 };
    for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
        let b = covering_bound(delta, &spec, act.lipschitz_constant())?;
        println!("delta {delta:<7} log N <= {:.1}", b.value);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_network(&mut rng, &act, &[2, 16, 16, 16, 16, 1], 0.2, 1.0);
    let rep = lipschitz_propagation_check(&net, 1e-3, 20, 200, 5)?;
    println!(
        "perturbation 1e-3: max deviation {:.3e}, bound {:.3e}, {} violations",
        rep.max_deviation, rep.bound, rep.violations
    );
    Ok(())
}
