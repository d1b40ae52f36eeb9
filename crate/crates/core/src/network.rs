//! Feedforward networks `x ↦ A_{L+1} ∘ σ ∘ A_L ∘ ⋯ ∘ σ ∘ A_1(x)`, their size
//! metrics, composition utilities and JSON export.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activation::{Activation, ActivationKind, ActivationSpec};
use crate::error::{shape, Error, Result};

/// Affine map `x ↦ W x + b` with a dense row-major weight matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(shape("layer weights", rows * cols, weights.len()));
        }
        if bias.len() != rows {
            return Err(shape("layer bias", rows, bias.len()));
        }
        Ok(Self { rows, cols, weights, bias })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            l.set(i, i, 1.0);
        }
        l
    }

    /// Selects coordinates: output `i` is input `picks[i]`.
    pub fn selection(cols: usize, picks: &[usize]) -> Self {
        let mut l = Self::zeros(picks.len(), cols);
        for (i, &j) in picks.iter().enumerate() {
            l.set(i, j, 1.0);
        }
        l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.weights[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(self.bias[i], |acc, (w, v)| acc + w * v))
            .collect()
    }

    pub fn nonzeros(&self) -> usize {
        self.weights.iter().chain(&self.bias).filter(|v| **v != 0.0).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.weights.iter().chain(&self.bias).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self ∘ inner`: the affine map `x ↦ W_s (W_i x + b_i) + b_s`.
    ///
    /// Products with a zero factor are skipped, so structurally zero entries
    /// stay literal zeros.
    pub fn compose(&self, inner: &Layer) -> Result<Layer> {
        if self.cols != inner.rows {
            return Err(shape("affine composition", self.cols, inner.rows));
        }
        let mut out = Layer::zeros(self.rows, inner.cols);
        for i in 0..self.rows {
            let mut b = self.bias[i];
            let dst = &mut out.weights[i * inner.cols..(i + 1) * inner.cols];
            for (k, &w) in self.row(i).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                if inner.bias[k] != 0.0 {
                    b += w * inner.bias[k];
                }
                for (d, &v) in dst.iter_mut().zip(inner.row(k)) {
                    if v != 0.0 {
                        *d += w * v;
                    }
                }
            }
            out.bias[i] = b;
        }
        Ok(out)
    }

    /// Stacks layers vertically (all read the same input).
    pub fn vstack(parts: &[&Layer]) -> Result<Layer> {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut out = Layer::zeros(0, cols);
        for p in parts {
            if p.cols != cols {
                return Err(shape("vertical stack", cols, p.cols));
            }
            out.rows += p.rows;
            out.weights.extend_from_slice(&p.weights);
            out.bias.extend_from_slice(&p.bias);
        }
        Ok(out)
    }

    /// Block-diagonal combination (each part reads its own slice of the input).
    pub fn block_diag(parts: &[&Layer]) -> Layer {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Layer::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for i in 0..p.rows {
                for j in 0..p.cols {
                    out.set(r0 + i, c0 + j, p.get(i, j));
                }
                out.bias[r0 + i] = p.bias[i];
            }
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }
}

/// The four size metrics of a network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Number of hidden layers `L`.
    pub depth: usize,
    /// Largest hidden layer; 0 when there is none.
    pub width: usize,
    /// Number of nonzero weights and biases, output layer included.
    pub sparsity: usize,
    /// Largest absolute parameter.
    pub magnitude: f64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depth {}, width {}, sparsity {}, magnitude {:.6e}",
            self.depth, self.width, self.sparsity, self.magnitude
        )
    }
}

/// Network class `Θ_{d,o}(L, N, S, B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkClassSpec {
    pub depth: f64,
    pub width: f64,
    pub sparsity: f64,
    pub magnitude: f64,
    pub input_dim: usize,
    pub output_dim: usize,
}

/// Network parameter: affine layers with an activation applied after every
/// layer but the last.
#[derive(Clone, Debug)]
pub struct Network {
    activation: Activation,
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(activation: Activation, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Domain("a network needs at least one (output) layer".into()));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[1].cols != pair[0].rows {
                return Err(shape(&format!("layer {} input", l + 2), pair[0].rows, pair[1].cols));
            }
        }
        for (l, layer) in layers.iter().enumerate() {
            if layer.weights.len() != layer.rows * layer.cols || layer.bias.len() != layer.rows {
                return Err(shape(&format!("layer {} storage", l + 1), layer.rows * layer.cols, layer.weights.len()));
            }
        }
        Ok(Self { activation, layers })
    }

    /// A depth-0 network computing a single affine map.
    pub fn affine(activation: Activation, layer: Layer) -> Self {
        Self { activation, layers: vec![layer] }
    }

    pub fn activation(&self) -> &Activation {
        &self.activation
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn width(&self) -> usize {
        self.layers[..self.depth()].iter().map(|l| l.rows).max().unwrap_or(0)
    }

    pub fn sparsity(&self) -> usize {
        self.layers.iter().map(Layer::nonzeros).sum()
    }

    pub fn magnitude(&self) -> f64 {
        self.layers.iter().fold(0.0, |m, l| m.max(l.max_abs()))
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            depth: self.depth(),
            width: self.width(),
            sparsity: self.sparsity(),
            magnitude: self.magnitude(),
        }
    }

    pub fn in_class(&self, spec: &NetworkClassSpec) -> bool {
        let m = self.metrics();
        self.input_dim() == spec.input_dim
            && self.output_dim() == spec.output_dim
            && m.depth as f64 <= spec.depth
            && m.width as f64 <= spec.width
            && m.sparsity as f64 <= spec.sparsity
            && m.magnitude <= spec.magnitude
    }

    /// Evaluates the network, rejecting non-finite intermediate values.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(shape("network input", self.input_dim(), x.len()));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric { layer: 0, detail: format!("input entry {v}") });
        }
        let mut h = x.to_vec();
        let last = self.depth();
        for (l, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if l < last {
                for v in &mut h {
                    *v = self.activation.evaluate(*v);
                }
            }
            if let Some(v) = h.iter().find(|v| !v.is_finite()) {
                return Err(Error::Numeric { layer: l + 1, detail: format!("value {v}") });
            }
        }
        Ok(h)
    }

    /// Sparse evaluator for repeated evaluation.
    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }

    /// Replaces the activation without touching the weights.
    pub fn with_activation(&self, activation: Activation) -> Self {
        Self { activation, layers: self.layers.clone() }
    }

    /// Reorders the nodes of hidden layer `hidden` (1-based) by `perm`; the
    /// computed function is unchanged.
    pub fn permute_hidden(&self, hidden: usize, perm: &[usize]) -> Result<Self> {
        if hidden == 0 || hidden > self.depth() {
            return Err(Error::Domain(format!("hidden layer {hidden} out of range 1..={}", self.depth())));
        }
        let n = self.layers[hidden - 1].rows;
        if perm.len() != n {
            return Err(shape("permutation", n, perm.len()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Domain("not a permutation".into()));
            }
        }
        let mut out = self.clone();
        let src = &self.layers[hidden - 1];
        let dst = &mut out.layers[hidden - 1];
        for (i, &p) in perm.iter().enumerate() {
            dst.weights[i * src.cols..(i + 1) * src.cols].copy_from_slice(src.row(p));
            dst.bias[i] = src.bias[p];
        }
        let src = &self.layers[hidden];
        let dst = &mut out.layers[hidden];
        for r in 0..src.rows {
            for (i, &p) in perm.iter().enumerate() {
                dst.set(r, i, src.get(r, p));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = NetworkDocument {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            activation: self.activation.spec().clone(),
            input_dim: self.input_dim(),
            output_dim: self.output_dim(),
            layers: self.layers.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        if doc.format != FORMAT_TAG || doc.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported network document {} v{} (expected {FORMAT_TAG} v{FORMAT_VERSION})",
                doc.format, doc.version
            )));
        }
        let activation = Activation::from_spec(&doc.activation)?;
        let net = Self::new(activation, doc.layers)?;
        if net.input_dim() != doc.input_dim {
            return Err(shape("document input_dim", doc.input_dim, net.input_dim()));
        }
        if net.output_dim() != doc.output_dim {
            return Err(shape("document output_dim", doc.output_dim, net.output_dim()));
        }
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

const FORMAT_TAG: &str = "holonet-network";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetworkDocument {
    format: String,
    version: u32,
    activation: ActivationSpec,
    input_dim: usize,
    output_dim: usize,
    layers: Vec<Layer>,
}

struct CsrLayer {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    bias: Vec<f64>,
}

/// Compressed-row copy of a network for fast repeated evaluation.
pub struct Evaluator {
    activation: Activation,
    layers: Vec<CsrLayer>,
    input_dim: usize,
    max_rows: usize,
}

/// Scratch buffers reused across [`Evaluator`] calls.
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Evaluator {
    fn new(net: &Network) -> Self {
        let layers = net
            .layers
            .iter()
            .map(|l| {
                let mut row_ptr = Vec::with_capacity(l.rows + 1);
                let mut cols = Vec::new();
                let mut vals = Vec::new();
                row_ptr.push(0);
                for i in 0..l.rows {
                    for (j, &w) in l.row(i).iter().enumerate() {
                        if w != 0.0 {
                            cols.push(j as u32);
                            vals.push(w);
                        }
                    }
                    row_ptr.push(cols.len());
                }
                CsrLayer { row_ptr, cols, vals, bias: l.bias.clone() }
            })
            .collect();
        let max_rows = net.layers.iter().map(|l| l.rows).max().unwrap_or(0).max(net.input_dim());
        Self {
            activation: net.activation.clone(),
            layers,
            input_dim: net.input_dim(),
            max_rows,
        }
    }

    pub fn scratch(&self) -> Scratch {
        Scratch {
            a: vec![0.0; self.max_rows],
            b: vec![0.0; self.max_rows],
        }
    }

    /// Evaluates and returns the output slice (valid until the next call).
    pub fn eval<'s>(&self, x: &[f64], s: &'s mut Scratch) -> &'s [f64] {
        debug_assert_eq!(x.len(), self.input_dim);
        s.a[..x.len()].copy_from_slice(x);
        let last = self.layers.len() - 1;
        let mut rows = x.len();
        for (l, layer) in self.layers.iter().enumerate() {
            let (src, dst) = (&s.a, &mut s.b);
            rows = layer.bias.len();
            for i in 0..rows {
                let mut acc = layer.bias[i];
                for k in layer.row_ptr[i]..layer.row_ptr[i + 1] {
                    acc += layer.vals[k] * src[layer.cols[k] as usize];
                }
                dst[i] = if l < last { self.activation.evaluate(acc) } else { acc };
            }
            std::mem::swap(&mut s.a, &mut s.b);
        }
        &s.a[..rows]
    }

    /// First output coordinate.
    pub fn eval_scalar(&self, x: &[f64], s: &mut Scratch) -> f64 {
        self.eval(x, s)[0]
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// How [`parallel_compose`] lengthens shallower networks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Passthrough {
    /// Only exact identity layers are allowed.
    Exact,
    /// Identity layers valid for inputs in `[-range, range]`; locally-quadratic
    /// activations use the difference-quotient gadget with accuracy knob `knob`.
    Bounded { range: f64, knob: f64 },
}

/// A depth-1 identity network together with its worst-case error.
#[derive(Clone, Debug)]
pub struct IdentityLayer {
    pub net: Network,
    /// Sup error over the admissible input range (0 when exact).
    pub error_bound: f64,
    /// Hidden units per channel.
    pub units_per_channel: usize,
}

/// Builds a depth-1 network reproducing `dim` inputs.
///
/// * Piecewise-linear with `σ(v) − σ(−v)` linear (ReLU, leaky ReLU):
///   `v = (σ(v) − σ(−v))/(s_0 + s_1)` exactly, for every input.
/// * Other piecewise-linear: one unit evaluated on a linear piece, exact for
///   `|v| ≤ range`.
/// * Locally quadratic: `v ≈ (σ(t + hv) − σ(t − hv))/(2hσ'(t))` with
///   `h = 1/(knob·range)`, error at most `|σ'''|·range/(6|σ'(t)|·knob²)`.
pub fn identity_layer(act: &Activation, dim: usize, pass: Passthrough) -> Result<IdentityLayer> {
    match act.kind() {
        ActivationKind::PiecewiseLinear(p) => {
            let s = p.slopes();
            if p.odd_part_is_linear() && s[0] + s[1] != 0.0 {
                let c = 1.0 / (s[0] + s[1]);
                let mut l1 = Layer::zeros(2 * dim, dim);
                let mut l2 = Layer::zeros(dim, 2 * dim);
                for j in 0..dim {
                    l1.set(2 * j, j, 1.0);
                    l1.set(2 * j + 1, j, -1.0);
                    l2.set(j, 2 * j, c);
                    l2.set(j, 2 * j + 1, -c);
                }
                let net = Network::new(act.clone(), vec![l1, l2])?;
                return Ok(IdentityLayer { net, error_bound: 0.0, units_per_channel: 2 });
            }
            let Passthrough::Bounded { range, .. } = pass else {
                return Err(Error::Capability(format!("{act} has no range-free exact identity layer")));
            };
            let (center, half_width, slope) = widest_linear_piece(p);
            let h = half_width / range;
            let mut l1 = Layer::zeros(dim, dim);
            let mut l2 = Layer::zeros(dim, dim);
            let out = 1.0 / (slope * h);
            let offset = -p.evaluate(center) * out;
            for j in 0..dim {
                l1.set(j, j, h);
                l1.bias[j] = center;
                l2.set(j, j, out);
                l2.bias[j] = offset;
            }
            let net = Network::new(act.clone(), vec![l1, l2])?;
            Ok(IdentityLayer { net, error_bound: 0.0, units_per_channel: 1 })
        }
        ActivationKind::LocallyQuadratic(q) => {
            let Passthrough::Bounded { range, knob } = pass else {
                return Err(Error::Capability(format!("{act} has no exact identity layer")));
            };
            if !(knob * q.margin() > 1.0) {
                return Err(Error::Budget { k: knob, k0: 1.0 / q.margin() });
            }
            let [_, d1, _, _] = q.jet_at_t();
            let t = q.expansion_point();
            let h = 1.0 / (knob * range);
            let out = 1.0 / (2.0 * h * d1);
            let mut l1 = Layer::zeros(2 * dim, dim);
            let mut l2 = Layer::zeros(dim, 2 * dim);
            for j in 0..dim {
                l1.set(2 * j, j, h);
                l1.set(2 * j + 1, j, -h);
                l1.bias[2 * j] = t;
                l1.bias[2 * j + 1] = t;
                l2.set(j, 2 * j, out);
                l2.set(j, 2 * j + 1, -out);
            }
            let net = Network::new(act.clone(), vec![l1, l2])?;
            let error_bound = q.derivative_bound() * range / (6.0 * d1.abs() * knob * knob);
            Ok(IdentityLayer { net, error_bound, units_per_channel: 2 })
        }
    }
}

/// Center, half-width and slope of the widest nonconstant linear piece.
/// Unbounded pieces are used on a unit-width window next to their breakpoint.
fn widest_linear_piece(p: &crate::activation::PiecewiseLinear) -> (f64, f64, f64) {
    let bp = p.breakpoints();
    let s = p.slopes();
    let k = bp.len();
    if s[k] != 0.0 {
        return (bp[k - 1] + 1.0, 1.0, s[k]);
    }
    if s[0] != 0.0 {
        return (bp[0] - 1.0, 1.0, s[0]);
    }
    let mut best = (0.0, 0.0, 0.0);
    for i in 1..k {
        let w = (bp[i] - bp[i - 1]) / 2.0;
        if s[i] != 0.0 && w > best.1 {
            best = ((bp[i] + bp[i - 1]) / 2.0, w, s[i]);
        }
    }
    best
}

/// `outer ∘ inner`; the last affine map of `inner` is merged into the first of `outer`.
pub fn stack_compose(outer: &Network, inner: &Network) -> Result<Network> {
    if outer.activation != inner.activation {
        return Err(Error::Domain(format!(
            "cannot stack networks with activations {} and {}",
            outer.activation, inner.activation
        )));
    }
    if outer.input_dim() != inner.output_dim() {
        return Err(shape("stack composition", inner.output_dim(), outer.input_dim()));
    }
    let mut layers: Vec<Layer> = inner.layers[..inner.depth()].to_vec();
    layers.push(outer.layers[0].compose(&inner.layers[inner.depth()])?);
    layers.extend_from_slice(&outer.layers[1..]);
    Network::new(outer.activation.clone(), layers)
}

/// `x ↦ net(A x + b)` where `pre` holds `(A, b)`.
pub fn affine_pre(net: &Network, pre: &Layer) -> Result<Network> {
    let mut layers = net.layers.clone();
    layers[0] = net.layers[0].compose(pre)?;
    Network::new(net.activation.clone(), layers)
}

/// `x ↦ A net(x) + b` where `post` holds `(A, b)`.
pub fn affine_post(net: &Network, post: &Layer) -> Result<Network> {
    let mut layers = net.layers.clone();
    let last = layers.len() - 1;
    layers[last] = post.compose(&net.layers[last])?;
    Network::new(net.activation.clone(), layers)
}

/// Appends identity layers until `net` has depth `depth`; returns the
/// lengthened network and the accumulated passthrough error bound.
pub fn extend_depth(net: &Network, depth: usize, pass: Passthrough) -> Result<(Network, f64)> {
    if net.depth() > depth {
        return Err(Error::Domain(format!("cannot shorten depth {} to {depth}", net.depth())));
    }
    if net.depth() == depth {
        return Ok((net.clone(), 0.0));
    }
    let id = identity_layer(&net.activation, net.output_dim(), pass)?;
    let mut out = net.clone();
    let mut err = 0.0;
    for _ in net.depth()..depth {
        out = stack_compose(&id.net, &out)?;
        err += id.error_bound;
    }
    Ok((out, err))
}

/// Upper bound on the parameters added when a network with `channels`
/// outputs and `last_layer_nonzeros` output parameters is lengthened by
/// `added` identity layers of `units` hidden nodes per channel.
pub fn passthrough_overhead_bound(channels: usize, last_layer_nonzeros: usize, added: usize, units: usize) -> usize {
    if added == 0 {
        return 0;
    }
    (units - 1) * last_layer_nonzeros + added * units * (units + 1) * channels + channels
}

/// Result of [`parallel_compose`].
#[derive(Clone, Debug)]
pub struct Parallel {
    pub net: Network,
    /// Worst passthrough error over all output channels.
    pub passthrough_error: f64,
}

/// Runs networks side by side on the same input and concatenates their
/// outputs. Shallower networks are lengthened with identity layers.
pub fn parallel_compose(nets: &[Network], pass: Passthrough) -> Result<Parallel> {
    let first = nets.first().ok_or_else(|| Error::Domain("parallel composition of no networks".into()))?;
    let depth = nets.iter().map(Network::depth).max().unwrap_or(0);
    let mut aligned = Vec::with_capacity(nets.len());
    let mut passthrough_error: f64 = 0.0;
    for net in nets {
        if net.input_dim() != first.input_dim() {
            return Err(shape("parallel composition input", first.input_dim(), net.input_dim()));
        }
        if net.activation != first.activation {
            return Err(Error::Domain("parallel composition needs a shared activation".into()));
        }
        let (n, e) = extend_depth(net, depth, pass)?;
        passthrough_error = passthrough_error.max(e);
        aligned.push(n);
    }
    let mut layers = Vec::with_capacity(depth + 1);
    let firsts: Vec<&Layer> = aligned.iter().map(|n| &n.layers[0]).collect();
    layers.push(Layer::vstack(&firsts)?);
    for l in 1..=depth {
        let parts: Vec<&Layer> = aligned.iter().map(|n| &n.layers[l]).collect();
        layers.push(Layer::block_diag(&parts));
    }
    let net = Network::new(first.activation.clone(), layers)?;
    Ok(Parallel { net, passthrough_error })
}

/// Random network with layer sizes `dims` (input first), entries uniform in
/// `[-scale, scale]` and about `zero_fraction` exact zeros among the weights.
pub fn random_network<R: rand::Rng>(rng: &mut R, act: &Activation, dims: &[usize], zero_fraction: f64, scale: f64) -> Network {
    let layers = dims
        .windows(2)
        .map(|w| {
            let weights = (0..w[0] * w[1])
                .map(|_| if rng.gen_bool(zero_fraction) { 0.0 } else { rng.gen_range(-scale..scale) })
                .collect();
            let bias = (0..w[1]).map(|_| rng.gen_range(-scale..scale)).collect();
            Layer { rows: w[1], cols: w[0], weights, bias }
        })
        .collect();
    Network::new(act.clone(), layers).expect("chained layer sizes")
}
