//! ReLU networks for products and local hats.
//!
//! The product uses `xy = A²(f(|x+y|/2A) − f(|x−y|/2A))` where `f` is the
//! sawtooth approximation of `u²` on `[0,1]`:
//! `f_s(u) = u − Σ_{k=1}^s g_k(u)/4^k` with `g_k` the `k`-fold tent map, so
//! `0 ≤ f_s(u) − u² ≤ 4^{−s−1}`.

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::network::{Layer, Network};

/// Number of sawtooth levels used for `m` requested halvings of the error.
pub fn sawtooth_levels(m: u32) -> usize {
    m.div_ceil(2) as usize
}

/// Error bound `2A²·4^{−s−1}` of [`product`] on `[-A,A]²`.
pub fn product_error_bound(m: u32, a: f64) -> f64 {
    2.0 * a * a * 0.25f64.powi(sawtooth_levels(m) as i32 + 1)
}

/// ReLU product on `[-A,A]²` with error `≤ A²·2^{−m}`; depth `1 + ⌈m/2⌉`, width 6.
pub fn product(m: u32, a: f64) -> Result<Network> {
    if m == 0 {
        return Err(Error::Domain("the ReLU product needs at least one layer".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("product range must be positive, got {a}")));
    }
    let s = sawtooth_levels(m);
    let h = 1.0 / (2.0 * a);
    // Units ρ(p), ρ(−p), ρ(q), ρ(−q) with p = (x+y)/2A, q = (x−y)/2A.
    let first = Layer::new(4, 2, vec![h, h, -h, -h, h, -h, -h, h], vec![0.0; 4])?;
    let mut layers = vec![first];
    // Rows of the map from the previous hidden layer to (g, S) per channel.
    let mut g_rows = [vec![0.0; 4], vec![0.0; 4]];
    let mut s_rows = [vec![0.0; 4], vec![0.0; 4]];
    for c in 0..2 {
        g_rows[c][2 * c] = 1.0;
        g_rows[c][2 * c + 1] = 1.0;
        s_rows[c] = g_rows[c].clone();
    }
    let mut prev = 4;
    for k in 1..=s {
        // Units per channel: ρ(g), ρ(g − 1/2), ρ(S).
        let mut layer = Layer::zeros(6, prev);
        for c in 0..2 {
            for j in 0..prev {
                layer.set(3 * c, j, g_rows[c][j]);
                layer.set(3 * c + 1, j, g_rows[c][j]);
                layer.set(3 * c + 2, j, s_rows[c][j]);
            }
            layer.bias[3 * c + 1] = -0.5;
        }
        layers.push(layer);
        let scale = 0.25f64.powi(k as i32);
        for c in 0..2 {
            let mut g = vec![0.0; 6];
            g[3 * c] = 2.0;
            g[3 * c + 1] = -4.0;
            let mut sr = vec![0.0; 6];
            sr[3 * c] = -2.0 * scale;
            sr[3 * c + 1] = 4.0 * scale;
            sr[3 * c + 2] = 1.0;
            g_rows[c] = g;
            s_rows[c] = sr;
        }
        prev = 6;
    }
    let a2 = a * a;
    let out: Vec<f64> = s_rows[0].iter().zip(&s_rows[1]).map(|(p, q)| a2 * (p - q)).collect();
    layers.push(Layer::new(1, prev, out, vec![0.0])?);
    Network::new(Activation::relu(), layers)
}

/// Exact ReLU network for the hat `(1 − M|x − z|)_+`; depth 2, width 2.
pub fn hat_1d(z: f64, resolution: usize) -> Result<Network> {
    let m = resolution as f64;
    let first = Layer::new(2, 1, vec![1.0, -1.0], vec![-z, z])?;
    let second = Layer::new(1, 2, vec![-m, -m], vec![1.0])?;
    Network::new(Activation::relu(), vec![first, second, Layer::identity(1)])
}
