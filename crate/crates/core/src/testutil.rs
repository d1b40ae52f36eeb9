use rand_chacha::ChaCha8Rng;

use crate::activation::Activation;
use crate::network::{random_network, Network};

/// Random network with about 30% exact zeros among the weights.
pub(crate) fn random_net(rng: &mut ChaCha8Rng, act: &Activation, d: usize, widths: &[usize], o: usize) -> Network {
    let mut dims = vec![d];
    dims.extend_from_slice(widths);
    dims.push(o);
    random_network(rng, act, &dims, 0.3, 1.0)
}
