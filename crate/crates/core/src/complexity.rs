//! Covering-number bound for network classes and closed-form sieve sizes
//! and convergence rates for regression and classification.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Layer, Network, NetworkClassSpec};

/// `log N(δ) ≤ 2L(S+1)·log(δ^{−1} C_σ L (N+1) (B∨1))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoveringBound {
    pub delta: f64,
    pub depth: f64,
    pub width: f64,
    pub sparsity: f64,
    pub magnitude: f64,
    pub c_sigma: f64,
    pub value: f64,
}

pub fn covering_bound(delta: f64, spec: &NetworkClassSpec, c_sigma: Option<f64>) -> Result<CoveringBound> {
    let c = c_sigma.ok_or_else(|| Error::Capability("activation has no Lipschitz constant".into()))?;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("Lipschitz constant must be positive, got {c}")));
    }
    if !(spec.depth >= 1.0) {
        return Err(Error::Domain(format!("depth must be at least 1, got {}", spec.depth)));
    }
    let (l, n, s, b) = (spec.depth, spec.width, spec.sparsity, spec.magnitude);
    let value = 2.0 * l * (s + 1.0) * ((1.0 / delta) * c * l * (n + 1.0) * b.max(1.0)).ln();
    Ok(CoveringBound { delta, depth: l, width: n, sparsity: s, magnitude: b, c_sigma: c, value })
}

/// Outcome of [`lipschitz_propagation_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropagationReport {
    pub trials: usize,
    /// `δ·L·(C_σ(B∨1)(N+1))^L`.
    pub bound: f64,
    pub max_deviation: f64,
    pub max_ratio: f64,
    pub violations: usize,
}

/// Perturbs every nonzero parameter by at most `delta` (staying within
/// `[−B, B]`, `B` the network's magnitude) and compares outputs on random
/// points of `[0,1]^d` with `δ·L·(C_σ(B∨1)(N+1))^L`.
pub fn lipschitz_propagation_check(
    net: &Network,
    delta: f64,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<PropagationReport> {
    let c = net
        .activation()
        .lipschitz_constant()
        .ok_or_else(|| Error::Capability(format!("{} has no Lipschitz constant", net.activation())))?;
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    let l = net.depth();
    if l == 0 {
        return Err(Error::Domain("the propagation bound needs at least one hidden layer".into()));
    }
    let b = net.magnitude();
    let n = net.width() as f64;
    let bound = delta * l as f64 * (c * b.max(1.0) * (n + 1.0)).powi(l as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<f64>> = (0..samples).map(|_| (0..net.input_dim()).map(|_| rng.gen_range(0.0..=1.0)).collect()).collect();
    let clean: Vec<Vec<f64>> = xs.iter().map(|x| net.forward(x)).collect::<Result<_>>()?;
    let mut max_dev: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..trials {
        let layers: Vec<Layer> = net
            .layers()
            .iter()
            .map(|layer| {
                let mut out = layer.clone();
                for w in out.weights.iter_mut().chain(out.bias.iter_mut()) {
                    if *w != 0.0 && delta > 0.0 {
                        *w = (*w + rng.gen_range(-delta..=delta)).clamp(-b, b);
                    }
                }
                out
            })
            .collect();
        let other = Network::new(net.activation().clone(), layers)?;
        let mut dev: f64 = 0.0;
        for (x, y) in xs.iter().zip(&clean) {
            for (u, v) in other.forward(x)?.iter().zip(y) {
                dev = dev.max((u - v).abs());
            }
        }
        if dev > bound {
            violations += 1;
        }
        max_dev = max_dev.max(dev);
    }
    let max_ratio = if bound > 0.0 { max_dev / bound } else { 0.0 };
    Ok(PropagationReport { trials, bound, max_deviation: max_dev, max_ratio, violations })
}

/// Estimation task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Task {
    Regression,
    Classification,
}

/// Tsybakov noise exponent `q ∈ [0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Finite(Ratio<i64>),
    Infinite,
}

/// Exact rational from a decimal input such as `2`, `0.5` or `1.25`.
pub fn rational(x: f64) -> Result<Ratio<i64>> {
    Ratio::approximate_float(x).ok_or_else(|| Error::Domain(format!("{x} has no rational representation")))
}

/// Sieve sizes and rate for sample size `n`; universal constants are 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSpec {
    pub task: Task,
    pub n: f64,
    pub alpha: String,
    pub dim: String,
    /// `None` for `q = ∞` or regression.
    pub q: Option<String>,
    pub kappa: String,
    /// Power of `n` in the sieve width (`d/(2α+d)` or `ν`).
    pub width_exponent: String,
    /// Power of `n` (regression) or of `log³n/n` (classification) in the rate.
    pub rate_exponent: String,
    pub depth: f64,
    pub width: f64,
    pub sparsity: f64,
    pub magnitude: f64,
    pub rate: f64,
    pub constants_tracked: bool,
    #[serde(skip)]
    pub exact_width_exponent: Ratio<i64>,
    #[serde(skip)]
    pub exact_rate_exponent: Ratio<i64>,
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check(n: f64, alpha: Ratio<i64>, d: Ratio<i64>) -> Result<()> {
    let zero = Ratio::from_integer(0);
    if !(n >= 2.0 && n.is_finite()) {
        return Err(Error::Domain(format!("sample size must be at least 2, got {n}")));
    }
    if alpha <= zero || d <= zero {
        return Err(Error::Domain("alpha and d must be positive".into()));
    }
    Ok(())
}

/// `4(d/α + 1)`.
pub fn default_kappa(alpha: Ratio<i64>, d: Ratio<i64>) -> Ratio<i64> {
    Ratio::from_integer(4) * (d / alpha + Ratio::from_integer(1))
}

/// Regression sieve `(log n, n^{d/(2α+d)}, n^{d/(2α+d)} log n, n^κ)` and rate
/// `n^{−2α/(2α+d)} log³ n`.
pub fn regression_sieve(n: f64, alpha: Ratio<i64>, d: Ratio<i64>, kappa: Option<Ratio<i64>>) -> Result<RateSpec> {
    check(n, alpha, d)?;
    let kappa = kappa.unwrap_or_else(|| default_kappa(alpha, d));
    let two = Ratio::from_integer(2);
    let w = d / (two * alpha + d);
    let r = two * alpha / (two * alpha + d);
    let log = n.ln();
    let width = n.powf(to_f64(w));
    Ok(RateSpec {
        task: Task::Regression,
        n,
        alpha: alpha.to_string(),
        dim: d.to_string(),
        q: None,
        kappa: kappa.to_string(),
        width_exponent: w.to_string(),
        rate_exponent: r.to_string(),
        depth: log,
        width,
        sparsity: width * log,
        magnitude: n.powf(to_f64(kappa)),
        rate: n.powf(-to_f64(r)) * log.powi(3),
        constants_tracked: false,
        exact_width_exponent: w,
        exact_rate_exponent: r,
    })
}

/// Classification sieve with `ν = d/(α(q+2)+d)`: width `n^ν log^{−3ν} n`, rate
/// `(log³n/n)^{α(q+1)/(α(q+2)+d)}`. `q = ∞` gives the limits `ν = 0` and
/// exponent 1.
pub fn classification_sieve(
    n: f64,
    alpha: Ratio<i64>,
    d: Ratio<i64>,
    q: Noise,
    kappa: Option<Ratio<i64>>,
) -> Result<RateSpec> {
    check(n, alpha, d)?;
    let kappa = kappa.unwrap_or_else(|| default_kappa(alpha, d));
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    let (nu, e, q_str) = match q {
        Noise::Finite(q) if q < Ratio::from_integer(0) => {
            return Err(Error::Domain(format!("noise exponent must be nonnegative, got {q}")))
        }
        Noise::Finite(q) => (d / (alpha * (q + two) + d), alpha * (q + one) / (alpha * (q + two) + d), Some(q.to_string())),
        Noise::Infinite => (Ratio::from_integer(0), one, Some("inf".to_string())),
    };
    let log = n.ln();
    let width = n.powf(to_f64(nu)) * log.powf(-3.0 * to_f64(nu));
    Ok(RateSpec {
        task: Task::Classification,
        n,
        alpha: alpha.to_string(),
        dim: d.to_string(),
        q: q_str,
        kappa: kappa.to_string(),
        width_exponent: nu.to_string(),
        rate_exponent: e.to_string(),
        depth: log,
        width,
        sparsity: width * log,
        magnitude: n.powf(to_f64(kappa)),
        rate: (log.powi(3) / n).powf(to_f64(e)),
        constants_tracked: false,
        exact_width_exponent: nu,
        exact_rate_exponent: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::catalog;
    use crate::testutil::random_net;
    use proptest::prelude::*;

    fn spec(l: f64, n: f64, s: f64, b: f64) -> NetworkClassSpec {
        NetworkClassSpec { depth: l, width: n, sparsity: s, magnitude: b, input_dim: 1, output_dim: 1 }
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn covering_hand_values() {
        let v = covering_bound(1.0, &spec(1.0, 1.0, 1.0, 1.0), Some(1.0)).unwrap().value;
        assert!((v - 4.0 * 2f64.ln()).abs() < 1e-12);
        let a = covering_bound(0.1, &spec(2.0, 3.0, 5.0, 2.0), Some(0.25)).unwrap().value;
        let b = covering_bound(0.01, &spec(2.0, 3.0, 5.0, 2.0), Some(0.25)).unwrap().value;
        assert!((b - a - 2.0 * 2.0 * 6.0 * 10f64.ln()).abs() < 1e-9);
        assert!(matches!(covering_bound(0.0, &spec(1.0, 1.0, 1.0, 1.0), Some(1.0)), Err(Error::Domain(_))));
        assert!(matches!(covering_bound(0.1, &spec(1.0, 1.0, 1.0, 1.0), None), Err(Error::Capability(_))));
    }

    proptest! {
        #[test]
        fn covering_is_monotone(l in 1.0f64..5.0, n in 1.0f64..50.0, s in 0.0f64..500.0, b in 0.1f64..10.0, delta in 1e-4f64..0.5) {
            let base = covering_bound(delta, &spec(l, n, s, b), Some(1.0)).unwrap().value;
            prop_assert!(base >= 0.0);
            prop_assert!(covering_bound(delta, &spec(l + 1.0, n, s, b), Some(1.0)).unwrap().value >= base);
            prop_assert!(covering_bound(delta, &spec(l, n + 1.0, s, b), Some(1.0)).unwrap().value >= base);
            prop_assert!(covering_bound(delta, &spec(l, n, s + 1.0, b), Some(1.0)).unwrap().value >= base);
            prop_assert!(covering_bound(delta, &spec(l, n, s, b * 2.0), Some(1.0)).unwrap().value >= base);
            prop_assert!(covering_bound(delta / 2.0, &spec(l, n, s, b), Some(1.0)).unwrap().value >= base);
        }
    }

    #[test]
    fn propagation_is_zero_without_perturbation_and_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = random_net(&mut rng, &catalog("sigmoid").unwrap(), 2, &[4, 4], 1);
        let zero = lipschitz_propagation_check(&net, 0.0, 5, 50, 1).unwrap();
        assert_eq!(zero.max_deviation, 0.0);
        let rep = lipschitz_propagation_check(&net, 1e-3, 100, 50, 1).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.max_ratio < 1.0);
        let repu = random_net(&mut rng, &catalog("repu").unwrap(), 2, &[3], 1);
        assert!(lipschitz_propagation_check(&repu, 1e-3, 1, 1, 1).is_err());
    }

    #[test]
    fn worked_rate_examples() {
        let reg = regression_sieve(1e6, r(2, 1), r(2, 1), None).unwrap();
        assert_eq!(reg.exact_rate_exponent, r(2, 3));
        assert!((reg.rate - 1e6f64.powf(-2.0 / 3.0) * 1e6f64.ln().powi(3)).abs() < 1e-15);
        let same = regression_sieve(100.0, r(3, 2), r(3, 2), None).unwrap();
        assert_eq!(same.exact_rate_exponent, r(2, 3));
        let cls = classification_sieve(1e4, r(1, 1), r(1, 1), Noise::Finite(r(1, 1)), None).unwrap();
        assert_eq!(cls.exact_width_exponent, r(1, 4));
        assert_eq!(cls.exact_rate_exponent, r(1, 2));
        let inf = classification_sieve(1e4, r(1, 1), r(1, 1), Noise::Infinite, None).unwrap();
        assert_eq!(inf.exact_rate_exponent, r(1, 1));
        assert_eq!(default_kappa(r(2, 1), r(1, 1)), r(6, 1));
    }

    #[test]
    fn classification_exponent_increases_in_q() {
        let mut last = classification_sieve(1e4, r(2, 1), r(3, 1), Noise::Finite(r(0, 1)), None).unwrap().exact_rate_exponent;
        assert_eq!(last, r(2, 7));
        for q in 1..20 {
            let e = classification_sieve(1e4, r(2, 1), r(3, 1), Noise::Finite(r(q, 1)), None).unwrap().exact_rate_exponent;
            assert!(e > last && e < r(1, 1));
            last = e;
        }
    }

    #[test]
    fn rates_lie_in_unit_interval() {
        for n in [3.0, 1e3, 1e6] {
            let c = classification_sieve(n, r(1, 1), r(2, 1), Noise::Finite(r(1, 2)), None).unwrap();
            assert!(to_f64(c.exact_width_exponent) > 0.0 && to_f64(c.exact_width_exponent) <= 1.0);
        }
        let large = regression_sieve(1e12, r(2, 1), r(1, 1), None).unwrap().rate;
        let larger = regression_sieve(1e13, r(2, 1), r(1, 1), None).unwrap().rate;
        assert!(larger < large && large < 1.0);
        assert!(regression_sieve(1.0, r(1, 1), r(1, 1), None).is_err());
    }
}
