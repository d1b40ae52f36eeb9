//! Exact rewriting of ReLU networks over an arbitrary piecewise-linear activation.
//!
//! Around a breakpoint `a` with slope jump `Δ`, and `c = r0/(2r)`,
//!
//! ```text
//! ρ(x) = u1·σ(a + c·x) + u2·σ(a − r0/2 + c·x) + v      for |x| ≤ r,
//! u1 = −u2 = 1/(Δ·c),   v = (σ(a − r0/2) − σ(a))/(Δ·c),
//! ```
//!
//! where `r0` is the distance from `a` to the nearest other breakpoint. Every
//! ReLU unit becomes two `σ` units, so width doubles and depth is unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{Activation, PiecewiseLinear};
use crate::error::{Error, Result};
use crate::interval::{layer_bounds, Interval};
use crate::network::{Layer, Network};

/// Coefficients of the ReLU reconstruction for one activation and input radius.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftPlan {
    /// Chosen breakpoint `a`.
    pub breakpoint: f64,
    /// `σ'(a+) − σ'(a−)`.
    pub slope_jump: f64,
    /// Distance to the nearest other breakpoint (1 when there is none).
    pub r0: f64,
    /// Radius of the pre-activation range the plan is exact on.
    pub r: f64,
    pub u1: f64,
    pub u2: f64,
    pub v: f64,
}

impl LiftPlan {
    /// Plan for a given radius, using the breakpoint that maximizes `|Δ|·r0`.
    pub fn for_radius(act: &PiecewiseLinear, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("lift radius must be positive and finite, got {r}")));
        }
        let bp = act.breakpoints();
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..bp.len() {
            let left = if k > 0 { bp[k] - bp[k - 1] } else { f64::INFINITY };
            let right = if k + 1 < bp.len() { bp[k + 1] - bp[k] } else { f64::INFINITY };
            let r0 = left.min(right);
            let r0 = if r0.is_finite() { r0 } else { 1.0 };
            let score = act.slope_jump(k).abs() * r0;
            if best.is_none_or(|(_, s, _)| score > s) {
                best = Some((k, score, r0));
            }
        }
        let (k, _, r0) = best.ok_or_else(|| Error::Domain("activation has no breakpoint".into()))?;
        let a = bp[k];
        let delta = act.slope_jump(k);
        let c = r0 / (2.0 * r);
        let u1 = 1.0 / (delta * c);
        let v = (act.evaluate(a - r0 / 2.0) - act.evaluate(a)) / (delta * c);
        Ok(Self { breakpoint: a, slope_jump: delta, r0, r, u1, u2: -u1, v })
    }

    /// `c = r0/(2r)`.
    pub fn scale(&self) -> f64 {
        self.r0 / (2.0 * self.r)
    }

    /// The reconstruction `u1 σ(a + cx) + u2 σ(a − r0/2 + cx) + v`.
    pub fn relu(&self, act: &PiecewiseLinear, x: f64) -> f64 {
        let c = self.scale();
        let a = self.breakpoint;
        self.u1 * act.evaluate(a + c * x) + self.u2 * act.evaluate(a - self.r0 / 2.0 + c * x) + self.v
    }

    /// Bound on the lifted magnitude for a source with width `n` and magnitude `b`.
    pub fn magnitude_bound(&self, n: usize, b: f64) -> f64 {
        let c = self.scale();
        let n = n as f64;
        let b = b.max(1.0);
        let cv = (self.v * c).abs();
        [
            c * b,
            b / self.slope_jump.abs(),
            self.breakpoint.abs() + self.r0 / 2.0 + cv * n * b + c * b,
            self.u1.abs() * b,
            self.v.abs() * n * b + b,
        ]
        .into_iter()
        .fold(0.0, f64::max)
            * (1.0 + 1e-12)
    }
}

fn relu_source(src: &Network) -> Result<()> {
    if src.activation().is_relu() {
        Ok(())
    } else {
        Err(Error::Domain(format!("lift needs a ReLU source network, got {}", src.activation())))
    }
}

/// Plans a lift of `src` over `domain`; the radius is the largest certified
/// pre-activation bound (interval arithmetic), or 1 when all bounds vanish.
pub fn plan_lift(src: &Network, act: &Activation, domain: &[Interval]) -> Result<LiftPlan> {
    relu_source(src)?;
    let pwl = act
        .as_piecewise_linear()
        .ok_or_else(|| Error::Domain(format!("{act} is not piecewise linear")))?;
    let (hidden, _) = layer_bounds(src, domain)?;
    let r = hidden.iter().flatten().fold(0.0, |m: f64, iv| m.max(iv.abs_max()));
    LiftPlan::for_radius(pwl, if r > 0.0 { r } else { 1.0 })
}

/// Rewrites the ReLU network `src` over `act` following `plan`.
pub fn lift(src: &Network, act: &Activation, plan: &LiftPlan) -> Result<Network> {
    relu_source(src)?;
    if act.as_piecewise_linear().is_none() {
        return Err(Error::Domain(format!("{act} is not piecewise linear")));
    }
    let depth = src.depth();
    let layers = src.layers();
    if depth == 0 {
        return Ok(src.with_activation(act.clone()));
    }
    let c = plan.scale();
    let a_top = plan.breakpoint;
    let a_bot = plan.breakpoint - plan.r0 / 2.0;
    let mut out = Vec::with_capacity(depth + 1);

    let first = &layers[0];
    let mut l1 = Layer::zeros(2 * first.rows, first.cols);
    for i in 0..first.rows {
        for j in 0..first.cols {
            let w = scaled(c, first.get(i, j));
            l1.set(i, j, w);
            l1.set(first.rows + i, j, w);
        }
        l1.bias[i] = a_top + scaled(c, first.bias[i]);
        l1.bias[first.rows + i] = a_bot + scaled(c, first.bias[i]);
    }
    out.push(l1);

    // Later layers read [σ(top); σ(bottom)] and undo the reconstruction.
    for (l, layer) in layers.iter().enumerate().skip(1) {
        let (n, m) = (layer.rows, layer.cols);
        let hidden = l < depth;
        let rows = if hidden { 2 * n } else { n };
        let (wu1, wu2, shift) = if hidden { (c * plan.u1, c * plan.u2, c) } else { (plan.u1, plan.u2, 1.0) };
        let mut next = Layer::zeros(rows, 2 * m);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..m {
                let w = layer.get(i, j);
                if w == 0.0 {
                    continue;
                }
                row_sum += w;
                next.set(i, j, wu1 * w);
                next.set(i, m + j, wu2 * w);
                if hidden {
                    next.set(n + i, j, wu1 * w);
                    next.set(n + i, m + j, wu2 * w);
                }
            }
            let inner = scaled(plan.v, row_sum) + layer.bias[i];
            if hidden {
                next.bias[i] = a_top + scaled(shift, inner);
                next.bias[n + i] = a_bot + scaled(shift, inner);
            } else {
                next.bias[i] = inner;
            }
        }
        out.push(next);
    }
    Network::new(act.clone(), out)
}

/// `c·w` that keeps literal zeros.
fn scaled(c: f64, w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        c * w
    }
}

/// Largest output discrepancy between `src` and `lifted` over `n` random
/// points of `domain`; fails with [`Error::LiftRange`] above `tolerance`.
pub fn verify_lift(src: &Network, lifted: &Network, domain: &[Interval], n: usize, seed: u64, tolerance: f64) -> Result<f64> {
    let (es, el) = (src.evaluator(), lifted.evaluator());
    let (mut ss, mut sl) = (es.scratch(), el.scratch());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; domain.len()];
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        for (xi, iv) in x.iter_mut().zip(domain) {
            *xi = if iv.lo < iv.hi { rng.gen_range(iv.lo..=iv.hi) } else { iv.lo };
        }
        let a = es.eval(&x, &mut ss);
        let b = el.eval(&x, &mut sl);
        for (u, v) in a.iter().zip(b) {
            let d = (u - v).abs();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    if worst > tolerance {
        return Err(Error::LiftRange { max_diff: worst, tolerance });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::catalog;
    use crate::interval::unit_box;
    use crate::testutil::random_net;

    #[test]
    fn zero_network_plans_unit_radius() {
        let net = Network::new(Activation::relu(), vec![Layer::zeros(3, 2), Layer::zeros(1, 3)]).unwrap();
        let plan = plan_lift(&net, &catalog("leaky_relu(0.01)").unwrap(), &unit_box(2)).unwrap();
        assert_eq!(plan.r, 1.0);
    }

    #[test]
    fn leaky_plan_reconstructs_relu() {
        let act = catalog("leaky_relu(0.01)").unwrap();
        let p = act.as_piecewise_linear().unwrap();
        let plan = LiftPlan::for_radius(p, 5.0).unwrap();
        assert_eq!(plan.breakpoint, 0.0);
        assert_eq!(plan.r0, 1.0);
        // u1 = 1/(Δ c) = 2r/(0.99 r0).
        assert!((plan.u1 - 10.0 / 0.99).abs() < 1e-12);
        assert_eq!(plan.u1, -plan.u2);
        for i in 0..=1000 {
            let x = -5.0 + 0.01 * i as f64;
            assert!((plan.relu(p, x) - x.max(0.0)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn hard_tanh_single_unit_is_exact() {
        let act = catalog("hard_tanh").unwrap();
        let p = act.as_piecewise_linear().unwrap();
        let plan = LiftPlan::for_radius(p, 3.0).unwrap();
        assert_eq!(plan.r0, 2.0);
        for i in 0..=600 {
            let x = -3.0 + 0.01 * i as f64;
            assert!((plan.relu(p, x) - x.max(0.0)).abs() < 1e-12, "{x}");
        }
        let src = Network::new(
            Activation::relu(),
            vec![
                Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap(),
                Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap(),
            ],
        )
        .unwrap();
        let lifted = lift(&src, &act, &plan).unwrap();
        for i in 0..=600 {
            let x = -3.0 + 0.01 * i as f64;
            assert!((lifted.forward(&[x]).unwrap()[0] - x.max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_linear_activation_is_rejected() {
        let relu = Activation::relu();
        let net = Network::new(relu.clone(), vec![Layer::zeros(1, 1), Layer::zeros(1, 1)]).unwrap();
        assert!(plan_lift(&net, &catalog("tanh").unwrap(), &unit_box(1)).is_err());
        assert!(plan_lift(&net.with_activation(catalog("hard_tanh").unwrap()), &relu, &unit_box(1)).is_err());
    }

    #[test]
    fn random_lifts_are_exact_and_within_metric_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for name in ["leaky_relu(0.01)", "hard_tanh", "leaky_relu(0.3)"] {
            let act = catalog(name).unwrap();
            for _ in 0..10 {
                let d = rng.gen_range(1..=3);
                let depth = rng.gen_range(1..=3);
                let widths: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=8)).collect();
                let src = random_net(&mut rng, &Activation::relu(), d, &widths, 1);
                let plan = plan_lift(&src, &act, &unit_box(d)).unwrap();
                let lifted = lift(&src, &act, &plan).unwrap();
                verify_lift(&src, &lifted, &unit_box(d), 2000, 1, 1e-9).unwrap();
                let (s, t) = (src.metrics(), lifted.metrics());
                assert_eq!(t.depth, s.depth);
                assert_eq!(t.width, 2 * s.width);
                assert!(t.sparsity <= 4 * s.sparsity + 2 * s.depth * s.width + 1);
                assert!(t.magnitude <= plan.magnitude_bound(s.width, s.magnitude));
            }
        }
    }

    #[test]
    fn undersized_radius_is_detected() {
        let src = Network::new(
            Activation::relu(),
            vec![
                Layer::new(2, 1, vec![4.0, -4.0], vec![-1.0, 1.0]).unwrap(),
                Layer::new(1, 2, vec![1.0, 1.0], vec![0.0]).unwrap(),
            ],
        )
        .unwrap();
        let act = catalog("hard_tanh").unwrap();
        let good = plan_lift(&src, &act, &unit_box(1)).unwrap();
        let lifted = lift(&src, &act, &good).unwrap();
        assert!(verify_lift(&src, &lifted, &unit_box(1), 1000, 3, 1e-9).is_ok());
        let small = LiftPlan::for_radius(act.as_piecewise_linear().unwrap(), good.r / 8.0).unwrap();
        let broken = lift(&src, &act, &small).unwrap();
        assert!(matches!(
            verify_lift(&src, &broken, &unit_box(1), 1000, 3, 1e-9),
            Err(Error::LiftRange { .. })
        ));
    }
}
