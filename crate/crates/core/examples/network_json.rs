//! Builds two small networks, composes them, and round-trips the result
//! through JSON.
//!
//! ```text
//! cargo run --example network_json -- /tmp/net.json
//! ```

use holonet::network::{parallel_compose, random_network, stack_compose, Passthrough};
use holonet::{catalog, Network};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> holonet::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "network.json".into());
    let act = catalog("relu")?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inner = random_network(&mut rng, &act, &[2, 6, 6, 3], 0.3, 1.0);
    let outer = random_network(&mut rng, &act, &[3, 4, 1], 0.3, 1.0);
    let stacked = stack_compose(&outer, &inner)?;
    println!("inner   {}", inner.metrics());
    println!("outer   {}", outer.metrics());
    println!("stacked {}", stacked.metrics());

    let shallow = random_network(&mut rng, &act, &[2, 5, 1], 0.0, 1.0);
    let side = parallel_compose(&[stacked.clone(), shallow], Passthrough::Exact)?;
    println!("parallel {} (passthrough error {:e})", side.net.metrics(), side.passthrough_error);

    stacked.save(path.as_ref())?;
    let back = Network::load(path.as_ref())?;
    let x = [0.3, 0.7];
    println!("saved to {path}; f(x) = {:?}, reloaded {:?}", stacked.forward(&x)?, back.forward(&x)?);
    Ok(())
}
