//! Interval arithmetic for certified layer-by-layer range bounds.

use crate::activation::{Activation, ActivationKind, SmoothKind};
use crate::error::{shape, Error, Result};
use crate::network::{Layer, Network};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn abs_max(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

/// The unit box `[0, 1]^d`.
pub fn unit_box(d: usize) -> Vec<Interval> {
    vec![Interval::new(0.0, 1.0); d]
}

/// Image of a box under an affine map, widened to absorb rounding.
pub fn affine_image(layer: &Layer, input: &[Interval]) -> Result<Vec<Interval>> {
    if input.len() != layer.cols {
        return Err(shape("interval input", layer.cols, input.len()));
    }
    Ok((0..layer.rows)
        .map(|i| {
            let (mut lo, mut hi, mut scale) = (layer.bias[i], layer.bias[i], layer.bias[i].abs());
            for (w, x) in layer.row(i).iter().zip(input) {
                if *w == 0.0 {
                    continue;
                }
                let (a, b) = (w * x.lo, w * x.hi);
                lo += a.min(b);
                hi += a.max(b);
                scale += a.abs().max(b.abs());
            }
            let slack = (layer.cols as f64 + 2.0) * f64::EPSILON * scale;
            Interval::new(lo - slack, hi + slack)
        })
        .collect())
}

/// Image of an interval under the activation.
pub fn activation_image(act: &Activation, x: Interval) -> Result<Interval> {
    let mut candidates = vec![x.lo, x.hi];
    match act.kind() {
        ActivationKind::PiecewiseLinear(p) => {
            candidates.extend(p.breakpoints().iter().copied().filter(|a| x.contains(*a)));
        }
        ActivationKind::LocallyQuadratic(q) => match q.kind() {
            // Monotone families need only the endpoints.
            SmoothKind::Sigmoid
            | SmoothKind::Tanh
            | SmoothKind::Isru(_)
            | SmoothKind::SoftClipping(_)
            | SmoothKind::Softplus
            | SmoothKind::Repu(_)
            | SmoothKind::Elu(_)
            | SmoothKind::Isrlu(_)
            | SmoothKind::Softsign
            | SmoothKind::Sqnl => {}
            SmoothKind::Swish => {
                // Unique critical point of x·logistic(x).
                const SWISH_ARGMIN: f64 = -1.278_464_542_761_074;
                if x.contains(SWISH_ARGMIN) {
                    candidates.push(SWISH_ARGMIN);
                }
            }
            SmoothKind::Custom(_) => {
                return Err(Error::Capability(format!("no interval image for custom activation {act}")));
            }
        },
    }
    let values: Vec<f64> = candidates.iter().map(|&v| act.evaluate(v)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
    Ok(Interval::new(lo - slack, hi + slack))
}

/// Certified enclosures of every hidden pre-activation (outer index = hidden
/// layer) and of the output, for inputs in `domain`.
pub fn layer_bounds(net: &Network, domain: &[Interval]) -> Result<(Vec<Vec<Interval>>, Vec<Interval>)> {
    let mut h = domain.to_vec();
    let mut hidden = Vec::with_capacity(net.depth());
    for layer in &net.layers()[..net.depth()] {
        let pre = affine_image(layer, &h)?;
        h = pre
            .iter()
            .map(|iv| activation_image(net.activation(), *iv))
            .collect::<Result<_>>()?;
        hidden.push(pre);
    }
    let out = affine_image(&net.layers()[net.depth()], &h)?;
    Ok((hidden, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::catalog;
    use crate::testutil::random_net;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enclosures_contain_sampled_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in ["relu", "hard_tanh", "tanh", "swish", "softsign"] {
            let act = catalog(name).unwrap();
            for _ in 0..10 {
                let net = random_net(&mut rng, &act, 2, &[4, 3], 2);
                let (hidden, out) = layer_bounds(&net, &unit_box(2)).unwrap();
                for _ in 0..200 {
                    let x = vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
                    let mut h = x;
                    for (l, layer) in net.layers()[..net.depth()].iter().enumerate() {
                        let pre = layer.apply(&h);
                        for (v, iv) in pre.iter().zip(&hidden[l]) {
                            assert!(iv.contains(*v), "{name}: {v} not in {iv:?}");
                        }
                        h = pre.iter().map(|v| act.evaluate(*v)).collect();
                    }
                }
                let y = net.forward(&[0.5, 0.5]).unwrap();
                assert!(out[0].contains(y[0]) && out[1].contains(y[1]));
            }
        }
    }

    #[test]
    fn zero_network_has_point_bounds() {
        let net = Network::new(catalog("relu").unwrap(), vec![Layer::zeros(3, 2), Layer::zeros(1, 3)]).unwrap();
        let (hidden, _) = layer_bounds(&net, &unit_box(2)).unwrap();
        assert!(hidden[0].iter().all(|iv| iv.abs_max() == 0.0));
    }
}
