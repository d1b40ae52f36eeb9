//! Network assembly `N(x) = Σ_z Σ_m β_{z,m} · prod(x^m, φ_z(x))`.
//!
//! Stage one computes every monomial `x^m` (`|m| ≤ q`) once and every basis
//! hat `φ_z` once, depth-aligned side by side. Stage two multiplies each used
//! (monomial, hat) pair and sums with the Taylor coefficients as output
//! weights.

use serde::Serialize;

use super::measure::{output_ranges, sup_error, Region, Scheme};
use super::surrogate::{surrogate, Surrogate};
use crate::activation::Activation;
use crate::corpus::HolderFunction;
use crate::error::{Error, Result};
use crate::gadgets::GadgetKit;
use crate::interval::unit_box;
use crate::lift::{lift, plan_lift};
use crate::network::{affine_post, affine_pre, parallel_compose, stack_compose, Layer, Metrics, Network, Passthrough};
use crate::relu_gadgets;

/// Largest accuracy knob used before double-precision cancellation dominates.
pub const K_CAP: f64 = 1e4;

/// Largest parameter magnitude accepted from an assembly.
pub const MAGNITUDE_LIMIT: f64 = 1e15;

/// Resolution and gadget accuracy for one assembly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssemblyBudget {
    pub epsilon: Option<f64>,
    /// Grid resolution `M`.
    pub resolution: usize,
    /// Gadget knob `K` after capping (locally-quadratic pipeline).
    pub knob: f64,
    /// Knob demanded by the schedule before capping.
    pub requested_knob: f64,
    /// Sawtooth product layers `m` (ReLU pipeline).
    pub product_layers: u32,
}

fn resolution_for(eps: f64, alpha: f64) -> usize {
    (eps.powf(-1.0 / alpha).ceil() as usize).saturating_sub(1).max(1)
}

impl AssemblyBudget {
    /// `M + 1 = ⌈ε^{−1/α}⌉`, `K = min(ε^{−2d/α−2}, K_CAP)`.
    pub fn for_epsilon(eps: f64, alpha: f64, dim: usize) -> Result<Self> {
        check_eps(eps)?;
        let requested = eps.powf(-2.0 * dim as f64 / alpha - 2.0);
        Ok(Self {
            epsilon: Some(eps),
            resolution: resolution_for(eps, alpha),
            knob: requested.min(K_CAP),
            requested_knob: requested,
            product_layers: relu_layers_for(eps),
        })
    }

    /// Same `M`; `m = ⌈log₂(1/ε)⌉ + 6` sawtooth layers.
    pub fn relu_for_epsilon(eps: f64, alpha: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self {
            epsilon: Some(eps),
            resolution: resolution_for(eps, alpha),
            knob: f64::NAN,
            requested_knob: f64::NAN,
            product_layers: relu_layers_for(eps),
        })
    }

    pub fn explicit(resolution: usize, knob: f64, product_layers: u32) -> Self {
        Self { epsilon: None, resolution: resolution.max(1), knob, requested_knob: knob, product_layers }
    }

    pub fn knob_capped(&self) -> bool {
        self.requested_knob > self.knob
    }
}

fn relu_layers_for(eps: f64) -> u32 {
    (1.0 / eps).log2().ceil().max(0.0) as u32 + 6
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("epsilon must lie in (0,1), got {eps}")))
    }
}

/// Sizes predicted by the approximation theorem with unit constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryScaling {
    pub depth: f64,
    pub width: f64,
    pub sparsity: f64,
    pub magnitude: f64,
}

impl TheoryScaling {
    pub fn new(eps: f64, alpha: f64, dim: usize) -> Self {
        let r = dim as f64 / alpha;
        let log = (1.0 / eps).ln();
        Self {
            depth: log,
            width: eps.powf(-r),
            sparsity: eps.powf(-r) * log,
            magnitude: eps.powf(-4.0 * (r + 1.0)),
        }
    }
}

/// Outcome of an assembly and its measured accuracy.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationReport {
    pub target: String,
    pub activation: String,
    pub budget: AssemblyBudget,
    pub metrics: Metrics,
    pub theory: Option<TheoryScaling>,
    /// `sup |N − f|` on the default grid.
    pub sup_err_grid: f64,
    /// `sup |N − f|` on random points.
    pub sup_err_rand: f64,
    /// `sup |P_M − f|`.
    pub surrogate_err: f64,
    /// `R·M^{−α}`.
    pub surrogate_bound: f64,
    /// `sup |N − P_M|`.
    pub network_vs_surrogate: f64,
    /// Range bound `A` of the final products.
    pub product_range: f64,
    /// Error bound added by depth-alignment passthrough channels.
    pub passthrough_error: f64,
}

impl ApproximationReport {
    pub const CSV_HEADER: [&'static str; 10] =
        ["eps", "M", "K", "depth", "width", "sparsity", "magnitude", "sup_err_grid", "sup_err_rand", "surrogate_err"];

    pub fn csv_row(&self) -> Vec<String> {
        let eps = self.budget.epsilon.map_or_else(String::new, |e| e.to_string());
        let k = if self.budget.knob.is_nan() { String::new() } else { self.budget.knob.to_string() };
        vec![
            eps,
            self.budget.resolution.to_string(),
            k,
            self.metrics.depth.to_string(),
            self.metrics.width.to_string(),
            self.metrics.sparsity.to_string(),
            format!("{:e}", self.metrics.magnitude),
            format!("{:e}", self.sup_err_grid),
            format!("{:e}", self.sup_err_rand),
            format!("{:e}", self.surrogate_err),
        ]
    }
}

/// How assembled networks are measured.
#[derive(Clone, Copy, Debug)]
pub struct Measurement {
    pub grid: Scheme,
    pub random: Scheme,
}

impl Measurement {
    pub fn default_for(dim: usize, seed: u64) -> Self {
        Self { grid: Scheme::default_for(dim), random: Scheme::Random { n: 10_000, seed } }
    }
}

enum Toolkit {
    Smooth { kit: GadgetKit, knob: f64 },
    Relu { layers: u32 },
}

impl Toolkit {
    fn activation(&self) -> Activation {
        match self {
            Toolkit::Smooth { kit, .. } => kit.activation().clone(),
            Toolkit::Relu { .. } => Activation::relu(),
        }
    }

    fn product(&self, a: f64) -> Result<Network> {
        match self {
            Toolkit::Smooth { kit, knob } => kit.product(*knob, a),
            Toolkit::Relu { layers } => relu_gadgets::product(*layers, a),
        }
    }

    fn product_error(&self, a: f64) -> f64 {
        match self {
            Toolkit::Smooth { kit, knob } => kit.product_error_bound(*knob, a),
            Toolkit::Relu { layers } => relu_gadgets::product_error_bound(*layers, a),
        }
    }

    /// `(1 − M|x − z|)_+` on `[0,1]`.
    fn hat_1d(&self, z: f64, resolution: usize) -> Result<Network> {
        match self {
            Toolkit::Smooth { kit, knob } => {
                let m = resolution as f64;
                let abs = affine_pre(&kit.abs(*knob)?, &Layer::new(1, 1, vec![1.0], vec![-z])?)?;
                let abs = affine_post(&abs, &Layer::new(1, 1, vec![-1.0], vec![1.0 / m])?)?;
                let relu = affine_post(&kit.relu(*knob)?, &Layer::new(1, 1, vec![m], vec![0.0])?)?;
                stack_compose(&relu, &abs)
            }
            Toolkit::Relu { .. } => relu_gadgets::hat_1d(z, resolution),
        }
    }

    fn passthrough(&self, range: f64) -> Passthrough {
        match self {
            Toolkit::Smooth { knob, .. } => Passthrough::Bounded { range, knob: *knob },
            Toolkit::Relu { .. } => Passthrough::Exact,
        }
    }

    /// Multiplies all outputs of `net` (true values in `[0,1]`, off by at
    /// most `err`). Returns the product network and its error bound.
    fn product_tree(&self, mut net: Network, mut err: f64) -> Result<(Network, f64)> {
        let act = self.activation();
        while net.output_dim() > 1 {
            let n = net.output_dim();
            let a = 1.0 + err;
            let mut parts = Vec::with_capacity(n / 2 + 1);
            for i in 0..n / 2 {
                parts.push(affine_pre(&self.product(a)?, &Layer::selection(n, &[2 * i, 2 * i + 1]))?);
            }
            if n % 2 == 1 {
                parts.push(Network::affine(act.clone(), Layer::selection(n, &[n - 1])));
            }
            let level = parallel_compose(&parts, self.passthrough(a))?;
            net = stack_compose(&level.net, &net)?;
            err = self.product_error(a) + err * (2.0 + err) + level.passthrough_error;
        }
        Ok((net, err))
    }

    fn monomial(&self, m: &[u32]) -> Result<(Network, f64)> {
        let d = m.len();
        let picks: Vec<usize> = m.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize)).collect();
        if picks.is_empty() {
            return Ok((Network::affine(self.activation(), Layer::new(1, d, vec![0.0; d], vec![1.0])?), 0.0));
        }
        self.product_tree(Network::affine(self.activation(), Layer::selection(d, &picks)), 0.0)
    }

    fn hat(&self, z: &[f64], resolution: usize) -> Result<Network> {
        let d = z.len();
        let parts = z
            .iter()
            .enumerate()
            .map(|(j, &zj)| affine_pre(&self.hat_1d(zj, resolution)?, &Layer::selection(d, &[j])))
            .collect::<Result<Vec<_>>>()?;
        let side = parallel_compose(&parts, Passthrough::Exact)?.net;
        Ok(self.product_tree(side, 0.0)?.0)
    }
}

/// Builds stage one and two for `p`.
fn assemble_with(tk: &Toolkit, p: &Surrogate) -> Result<(Network, f64, f64)> {
    let act = tk.activation();
    let d = p.dim();
    let used: Vec<(usize, usize)> = (0..p.patches.len())
        .flat_map(|z| (0..p.indices.len()).map(move |i| (z, i)))
        .filter(|&(z, i)| p.patches[z].beta[i] != 0.0)
        .collect();
    if used.is_empty() {
        return Ok((Network::affine(act, Layer::zeros(1, d)), 1.0, 0.0));
    }
    let mut mono_slot = vec![None; p.indices.len()];
    let mut hat_slot = vec![None; p.patches.len()];
    let mut parts = Vec::new();
    for &(_, i) in &used {
        if mono_slot[i].is_none() {
            mono_slot[i] = Some(parts.len());
            parts.push(tk.monomial(&p.indices[i])?.0);
        }
    }
    for &(z, _) in &used {
        if hat_slot[z].is_none() {
            hat_slot[z] = Some(parts.len());
            parts.push(tk.hat(&p.patches[z].center, p.resolution())?);
        }
    }
    let stage1 = parallel_compose(&parts, tk.passthrough(2.0))?;
    let width = stage1.net.output_dim();
    let probe = match d {
        1 => Scheme::Grid(4097),
        2 => Scheme::Grid(129),
        _ => Scheme::Grid(33),
    };
    let ranges = output_ranges(&stage1.net, probe, &Region::unit(d));
    let a = ranges.iter().fold(1.0f64, |m, v| m.max(*v)) * (1.0 + 1e-3);
    let prod = tk.product(a)?;
    let products = used
        .iter()
        .map(|&(z, i)| affine_pre(&prod, &Layer::selection(width, &[mono_slot[i].unwrap(), hat_slot[z].unwrap()])))
        .collect::<Result<Vec<_>>>()?;
    let stage2 = parallel_compose(&products, Passthrough::Exact)?.net;
    let weights: Vec<f64> = used.iter().map(|&(z, i)| p.patches[z].beta[i]).collect();
    let stage2 = affine_post(&stage2, &Layer::new(1, used.len(), weights, vec![0.0])?)?;
    let net = stack_compose(&stage2, &stage1.net)?;
    if net.magnitude() > MAGNITUDE_LIMIT {
        return Err(Error::Numeric {
            layer: 0,
            detail: format!("parameter magnitude {:e} exceeds {MAGNITUDE_LIMIT:e}; raise epsilon", net.magnitude()),
        });
    }
    Ok((net, a, stage1.passthrough_error))
}

fn report(
    f: &HolderFunction,
    net: &Network,
    p: &Surrogate,
    budget: AssemblyBudget,
    product_range: f64,
    passthrough_error: f64,
    meas: Measurement,
) -> ApproximationReport {
    let ev = net.evaluator();
    ApproximationReport {
        target: f.name.clone(),
        activation: net.activation().to_string(),
        budget,
        metrics: net.metrics(),
        theory: budget.epsilon.map(|e| TheoryScaling::new(e, f.alpha, f.dim)),
        sup_err_grid: sup_error(&ev, f, meas.grid),
        sup_err_rand: sup_error(&ev, f, meas.random),
        surrogate_err: sup_error(p, f, meas.grid),
        surrogate_bound: p.error_bound(f),
        network_vs_surrogate: sup_error(&ev, p, meas.grid),
        product_range,
        passthrough_error,
    }
}

/// Locally-quadratic pipeline with hats `M·relu(1/M − abs(x − z))`.
pub fn assemble_locquad(
    f: &HolderFunction,
    act: &Activation,
    budget: AssemblyBudget,
    meas: Measurement,
) -> Result<(Network, ApproximationReport)> {
    let kit = GadgetKit::new(act)?;
    if !(budget.knob > kit.k0()) {
        return Err(Error::Budget { k: budget.knob, k0: kit.k0() });
    }
    let tk = Toolkit::Smooth { kit, knob: budget.knob };
    let p = surrogate(f, budget.resolution)?;
    let (net, a, pass) = assemble_with(&tk, &p)?;
    let rep = report(f, &net, &p, budget, a, pass, meas);
    Ok((net, rep))
}

/// ReLU pipeline: exact hats and sawtooth products with `budget.product_layers` layers.
pub fn assemble_relu(f: &HolderFunction, budget: AssemblyBudget, meas: Measurement) -> Result<(Network, ApproximationReport)> {
    if budget.product_layers == 0 {
        return Err(Error::Domain("the ReLU pipeline needs at least one product layer".into()));
    }
    let tk = Toolkit::Relu { layers: budget.product_layers };
    let p = surrogate(f, budget.resolution)?;
    let (net, a, pass) = assemble_with(&tk, &p)?;
    let rep = report(f, &net, &p, budget, a, pass, meas);
    Ok((net, rep))
}

/// ReLU pipeline followed by the exact lift to `act`.
pub fn assemble_pwl(
    f: &HolderFunction,
    act: &Activation,
    budget: AssemblyBudget,
    meas: Measurement,
) -> Result<(Network, ApproximationReport)> {
    if act.is_relu() {
        return assemble_relu(f, budget, meas);
    }
    let (src, rep) = assemble_relu(f, budget, meas)?;
    let plan = plan_lift(&src, act, &unit_box(f.dim))?;
    let lifted = lift(&src, act, &plan)?;
    let p = surrogate(f, budget.resolution)?;
    let rep = report(f, &lifted, &p, budget, rep.product_range, rep.passthrough_error, meas);
    Ok((lifted, rep))
}

/// Dispatches on the activation class.
pub fn assemble(
    f: &HolderFunction,
    act: &Activation,
    budget: AssemblyBudget,
    meas: Measurement,
) -> Result<(Network, ApproximationReport)> {
    if act.as_piecewise_linear().is_some() {
        assemble_pwl(f, act, budget, meas)
    } else {
        assemble_locquad(f, act, budget, meas)
    }
}
