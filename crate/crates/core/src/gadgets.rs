//! Gadget networks for a locally-quadratic activation `σ` with expansion
//! point `t` (`σ'(t) ≠ 0`, `σ''(t) ≠ 0`).
//!
//! | gadget      | computes          | domain      | depth       | width | error        |
//! |-------------|-------------------|-------------|-------------|-------|--------------|
//! | `square`    | `x²`              | `[-1,1]`    | 1           | 3     | `O(1/K)`     |
//! | `product`   | `x₁x₂`            | `[-A,A]²`   | 1           | 9     | `O(A²/K)`    |
//! | `monomial`  | `x^m`             | `[0,1]^d`   | `⌈log₂α⌉`   | `9α`  | `O(1/K)`     |
//! | `sqrt`      | `√x`              | `[0,2]`     | `⌈ln K⌉`    | 5     | see below    |
//! | `abs`       | `|x|`             | `[-1,1]`    | `⌈ln K⌉`    | 5     | `O(1/√K)`    |
//! | `relu`      | `max(x,0)`        | `[-1,1]`    | `⌈ln K⌉`    | 7     | `O(1/√K)`    |
//!
//! The accuracy knob `K` bounds the magnitude of every gadget by `K²`
//! (`max{K², 2A²}` for products).
//!
//! The square-root gadget is a two-channel chain. With `w = u/2` the power
//! channel repeatedly squares `y_0 = 1 − w`, giving `y_k = (1 − w)^{2^k}`, and
//! the sum channel carries `S_k = S_{k−1} + c_{k+1}(1 − y_k)` through identity
//! gadgets. The coefficients are a least-squares fit of `√u` on `[0,2]`, so the
//! ideal chain error decays like `2^{−J/2}` in the number of stages `J`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::activation::{Activation, LocallyQuadratic};
use crate::error::{Error, Result};
use crate::network::{
    affine_post, affine_pre, identity_layer, parallel_compose, stack_compose, Layer, Network, Passthrough,
};

/// Gadget constructor bound to one locally-quadratic activation.
#[derive(Clone, Debug)]
pub struct GadgetKit {
    act: Activation,
    lq: LocallyQuadratic,
}

/// Monomial gadget with its tracked per-level ranges.
#[derive(Clone, Debug)]
pub struct MonomialGadget {
    pub net: Network,
    /// Range bound `A_k` of the inputs to product level `k`.
    pub level_ranges: Vec<f64>,
    /// Worst-case error bound from the square-gadget constant.
    pub error_bound: f64,
}

/// `⌈ln K⌉`, at least 1.
pub fn log_depth(k: f64) -> usize {
    (k.ln().ceil() as usize).max(1)
}

impl GadgetKit {
    pub fn new(act: &Activation) -> Result<Self> {
        let lq = act
            .as_locally_quadratic()
            .ok_or_else(|| Error::Capability(format!("{act} is not locally quadratic")))?
            .clone();
        Ok(Self { act: act.clone(), lq })
    }

    pub fn activation(&self) -> &Activation {
        &self.act
    }

    pub fn k0(&self) -> f64 {
        self.lq.k0()
    }

    fn check(&self, k: f64) -> Result<()> {
        if k.is_finite() && k > self.k0() {
            Ok(())
        } else {
            Err(Error::Budget { k, k0: self.k0() })
        }
    }

    /// Internal step scale `K' = K·sqrt(|σ''(t)|/2)`.
    fn internal_knob(&self, k: f64) -> f64 {
        k * (self.lq.jet_at_t()[2].abs() / 2.0).sqrt()
    }

    /// Constant `C` in `|square(x) − x²| ≤ C|x|³/K` from the documented
    /// bound on `|σ'''|`.
    pub fn square_constant(&self) -> f64 {
        let s2 = self.lq.jet_at_t()[2].abs();
        5.0 * self.lq.derivative_bound() / (3.0 * s2 * (s2 / 2.0).sqrt())
    }

    /// Hidden layer and output row of a square gadget reading `input`
    /// (a row vector over the caller's inputs), scaled by `out_scale`.
    fn square_block(&self, k: f64, input: &[f64], out_scale: f64) -> (Layer, Vec<f64>) {
        let kk = self.internal_knob(k);
        let [_, _, s2, _] = self.lq.jet_at_t();
        let t = self.lq.expansion_point();
        let n = input.len();
        let mut hidden = Layer::zeros(3, n);
        for step in 0..3 {
            for (j, &w) in input.iter().enumerate() {
                if step > 0 && w != 0.0 {
                    hidden.set(step, j, step as f64 * w / kk);
                }
            }
            hidden.bias[step] = t;
        }
        let c = out_scale * kk * kk / s2;
        (hidden, vec![c, -2.0 * c, c])
    }

    /// `x ↦ (K'²/σ''(t))·[σ(t) − 2σ(t + x/K') + σ(t + 2x/K')] ≈ x²` on `[-1,1]`.
    pub fn square(&self, k: f64) -> Result<Network> {
        self.check(k)?;
        let (hidden, out) = self.square_block(k, &[1.0], 1.0);
        Network::new(self.act.clone(), vec![hidden, Layer::new(1, 3, out, vec![0.0])?])
    }

    /// Difference-quotient identity for inputs in `[-range, range]`.
    pub fn identity(&self, k: f64, range: f64) -> Result<Network> {
        Ok(identity_layer(&self.act, 1, Passthrough::Bounded { range, knob: k })?.net)
    }

    /// Knob used by the three squares inside `product(k, a)`.
    pub fn product_knob(k: f64, a: f64) -> f64 {
        k / (2f64.sqrt() * a).max(1.0)
    }

    /// `2A²{sq((x₁+x₂)/2A) − sq(x₁/2A) − sq(x₂/2A)} ≈ x₁x₂` on `[-A,A]²`.
    pub fn product(&self, k: f64, a: f64) -> Result<Network> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("product range must be positive, got {a}")));
        }
        let ks = Self::product_knob(k, a);
        self.check(ks)?;
        let h = 1.0 / (2.0 * a);
        let blocks = [([h, h], 1.0), ([h, 0.0], -1.0), ([0.0, h], -1.0)];
        let mut hidden = Vec::new();
        let mut out = Vec::new();
        for (input, sign) in blocks {
            let (layer, row) = self.square_block(ks, &input, sign * 2.0 * a * a);
            hidden.push(layer);
            out.extend(row);
        }
        let refs: Vec<&Layer> = hidden.iter().collect();
        Network::new(self.act.clone(), vec![Layer::vstack(&refs)?, Layer::new(1, 9, out, vec![0.0])?])
    }

    /// Error bound of `product(k, a)` from the square constant.
    pub fn product_error_bound(&self, k: f64, a: f64) -> f64 {
        6.0 * a * a * self.square_constant() / Self::product_knob(k, a)
    }

    /// `n/2` products side by side: outputs `z_{2i} z_{2i+1}` with range `a`.
    fn product_level(&self, k: f64, n: usize, a: f64) -> Result<Network> {
        let p = self.product(k, a)?;
        let firsts: Vec<Layer> = (0..n / 2).map(|_| p.layers()[0].clone()).collect();
        let lasts: Vec<Layer> = (0..n / 2).map(|_| p.layers()[1].clone()).collect();
        let f: Vec<&Layer> = firsts.iter().collect();
        let l: Vec<&Layer> = lasts.iter().collect();
        Network::new(self.act.clone(), vec![Layer::block_diag(&f), Layer::block_diag(&l)])
    }

    /// Binary product tree over `z = (x_1 ×m_1, …, x_d ×m_d, 1, …, 1)` of
    /// length `2^q`, `q = ⌈log₂ alpha⌉`.
    pub fn monomial(&self, k: f64, m: &[u32], alpha: u32) -> Result<MonomialGadget> {
        let total: u32 = m.iter().sum();
        if total > alpha || alpha == 0 && total > 0 {
            return Err(Error::Domain(format!("|m| = {total} exceeds the cap {alpha}")));
        }
        let d = m.len();
        let q = ceil_log2(alpha.max(1));
        let len = 1usize << q;
        let mut select = Layer::zeros(len, d);
        let mut pos = 0;
        for (j, &mj) in m.iter().enumerate() {
            for _ in 0..mj {
                select.set(pos, j, 1.0);
                pos += 1;
            }
        }
        for i in pos..len {
            select.bias[i] = 1.0;
        }
        let mut net = Network::affine(self.act.clone(), select);
        let c1 = self.square_constant();
        let mut ranges = Vec::with_capacity(q);
        let mut err = 0.0f64;
        let mut width = len;
        for _ in 0..q {
            let a = 1.0 + err;
            ranges.push(a);
            net = stack_compose(&self.product_level(k, width, a)?, &net)?;
            err = 6.0 * a * a * c1 / Self::product_knob(k, a) + err * (2.0 + err);
            width /= 2;
        }
        Ok(MonomialGadget { net, level_ranges: ranges, error_bound: err })
    }

    /// One stage `(y, S) ↦ (sq(y), id(S) + c(1 − sq(y)))`.
    fn sqrt_stage(&self, k: f64, coef: f64, sum_range: f64) -> Result<Network> {
        let sq = affine_pre(&self.square(k)?, &Layer::selection(2, &[0]))?;
        let id = affine_pre(&self.identity(k, sum_range)?, &Layer::selection(2, &[1]))?;
        let both = parallel_compose(&[sq, id], Passthrough::Exact)?.net;
        affine_post(&both, &Layer::new(2, 2, vec![1.0, 0.0, -coef, 1.0], vec![0.0, coef])?)
    }

    /// Square-root chain with `stages` stages on `[0, 2]`.
    pub fn sqrt_chain(&self, k: f64, stages: usize) -> Result<Network> {
        self.check(k)?;
        let fit = sqrt_fit(stages);
        let c = &fit.coefficients;
        // (y_0, S_0) = (1 − u/2, c_0 + c_1 u/2).
        let start = Layer::new(2, 1, vec![-0.5, 0.5 * c[1]], vec![1.0, c[0]])?;
        let mut net = Network::affine(self.act.clone(), start);
        for s in 0..stages {
            net = stack_compose(&self.sqrt_stage(k, c[s + 2], fit.partial_sum_range * 1.25)?, &net)?;
        }
        affine_post(&net, &Layer::new(1, 2, vec![0.0, 1.0], vec![0.0])?)
    }

    /// `√x` on `[0, 2]` with `⌈ln K⌉` stages.
    pub fn sqrt(&self, k: f64) -> Result<Network> {
        self.sqrt_chain(k, log_depth(k))
    }

    /// `|x| ≈ sqrt(x² + 1/K)` on `[-1,1]`, depth `⌈ln K⌉`.
    pub fn abs(&self, k: f64) -> Result<Network> {
        let inner = affine_post(&self.square(k)?, &Layer::new(1, 1, vec![1.0], vec![1.0 / k])?)?;
        stack_compose(&self.sqrt_chain(k, log_depth(k) - 1)?, &inner)
    }

    /// `max(x, 0) = (x + |x|)/2` on `[-1,1]`, depth `⌈ln K⌉`.
    pub fn relu(&self, k: f64) -> Result<Network> {
        let abs = self.abs(k)?;
        let id = Network::affine(self.act.clone(), Layer::identity(1));
        let both = parallel_compose(&[abs, id], Passthrough::Bounded { range: 1.0, knob: k })?.net;
        affine_post(&both, &Layer::new(1, 2, vec![0.5, 0.5], vec![0.0])?)
    }
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: u32) -> usize {
    (u32::BITS - (n.max(1) - 1).leading_zeros()) as usize
}

/// Least-squares coefficients of the ideal square-root chain.
#[derive(Clone, Debug)]
pub struct SqrtFit {
    /// `c_0, c_1, c_2, …, c_{J+1}`.
    pub coefficients: Vec<f64>,
    /// Sup error of the ideal chain on the fit grid.
    pub max_error: f64,
    /// Largest `|S_k(u)|` over stages and the fit grid.
    pub partial_sum_range: f64,
}

fn sqrt_fit_grid() -> Vec<f64> {
    let mut u: Vec<f64> = (0..=4000).map(|i| 2.0 * (i as f64 / 4000.0).powi(4)).collect();
    u.extend((0..=2000).map(|i| 2.0 * i as f64 / 2000.0));
    u
}

fn sqrt_basis(u: f64, stages: usize) -> Vec<f64> {
    let w = u / 2.0;
    let mut row = vec![1.0, w];
    let mut y = 1.0 - w;
    for _ in 0..stages {
        y *= y;
        row.push(1.0 - y);
    }
    row
}

/// Near-minimax fit of `√u` by the chain basis, by iteratively reweighted
/// least squares; cached per stage count.
pub fn sqrt_fit(stages: usize) -> SqrtFit {
    static CACHE: OnceLock<Mutex<HashMap<usize, SqrtFit>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(fit) = cache.lock().unwrap().get(&stages) {
        return fit.clone();
    }
    let fit = compute_sqrt_fit(stages);
    cache.lock().unwrap().insert(stages, fit.clone());
    fit
}

fn compute_sqrt_fit(stages: usize) -> SqrtFit {
    let grid = sqrt_fit_grid();
    let cols = stages + 2;
    let basis = DMatrix::from_fn(grid.len(), cols, |i, j| sqrt_basis(grid[i], stages)[j]);
    let target = DVector::from_iterator(grid.len(), grid.iter().map(|u| u.sqrt()));
    let mut weights = vec![1.0; grid.len()];
    let mut best: Option<(f64, DVector<f64>)> = None;
    for _ in 0..60 {
        let sw: Vec<f64> = weights.iter().map(|w: &f64| w.sqrt()).collect();
        let a = DMatrix::from_fn(grid.len(), cols, |i, j| basis[(i, j)] * sw[i]);
        let b = DVector::from_iterator(grid.len(), (0..grid.len()).map(|i| target[i] * sw[i]));
        let Ok(c) = a.svd(true, true).solve(&b, 1e-13) else { break };
        let resid = &basis * &c - &target;
        let max_err = resid.amax();
        if best.as_ref().is_none_or(|(e, _)| max_err < *e) {
            best = Some((max_err, c.clone()));
        }
        let total: f64 = weights.iter().zip(resid.iter()).map(|(w, r)| w * r.abs()).sum();
        for (w, r) in weights.iter_mut().zip(resid.iter()) {
            *w *= r.abs() / total * grid.len() as f64 + 1e-12;
        }
    }
    let (max_error, c) = best.expect("least-squares fit of the square-root chain");
    let coefficients: Vec<f64> = c.iter().copied().collect();
    let mut range: f64 = 0.0;
    for &u in &grid {
        let row = sqrt_basis(u, stages);
        let mut s = coefficients[0] + coefficients[1] * row[1];
        range = range.max(s.abs());
        for k in 0..stages {
            s += coefficients[k + 2] * row[k + 2];
            range = range.max(s.abs());
        }
    }
    SqrtFit { coefficients, max_error, partial_sum_range: range.max(1.0) }
}
