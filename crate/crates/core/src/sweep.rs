//! Accuracy-knob sweeps of the gadget networks and their fitted error models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::measure::{sup_error_on, FnField, Points, Region, Scheme};
use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::gadgets::GadgetKit;
use crate::multi_index::power;
use crate::network::{Metrics, Network};

/// `K ∈ {10², 10^2.5, 10³, 10^3.5, 10⁴}`.
pub fn default_knobs() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect()
}

/// Which gadget to sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum GadgetKind {
    Square,
    Product { range: f64 },
    Monomial { m: Vec<u32>, cap: u32 },
    Sqrt,
    Abs,
    Relu,
    Identity { range: f64 },
}

/// Theoretical error rate in `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RateTag {
    InvK,
    RangeSqOverK,
    LogKOverK,
    InvSqrtK,
}

impl RateTag {
    /// Power of `K` in the rate, ignoring logarithms.
    pub fn exponent(&self) -> f64 {
        match self {
            RateTag::InvSqrtK => -0.5,
            _ => -1.0,
        }
    }

    /// The rate's value at `k` with unit constant.
    pub fn scale(&self, k: f64, range: f64) -> f64 {
        match self {
            RateTag::InvK => 1.0 / k,
            RateTag::RangeSqOverK => range * range / k,
            RateTag::LogKOverK => k.ln() / k,
            RateTag::InvSqrtK => 1.0 / k.sqrt(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RateTag::InvK => "1/K",
            RateTag::RangeSqOverK => "A^2/K",
            RateTag::LogKOverK => "logK/K",
            RateTag::InvSqrtK => "1/sqrt(K)",
        }
    }
}

impl GadgetKind {
    /// Parses a CLI kind: `square|times|mono|sqrt|abs|relu|identity`.
    pub fn parse(kind: &str, m: Option<Vec<u32>>, alpha: Option<u32>, range: Option<f64>) -> Result<Self> {
        Ok(match kind {
            "square" => GadgetKind::Square,
            "times" | "product" => GadgetKind::Product { range: range.unwrap_or(1.0) },
            "mono" | "monomial" => {
                let m = m.ok_or_else(|| Error::Parse("mono needs --m".into()))?;
                let total: u32 = m.iter().sum();
                GadgetKind::Monomial { cap: alpha.unwrap_or(total.max(1)), m }
            }
            "sqrt" => GadgetKind::Sqrt,
            "abs" => GadgetKind::Abs,
            "relu" => GadgetKind::Relu,
            "identity" => GadgetKind::Identity { range: range.unwrap_or(1.0) },
            other => return Err(Error::Name(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GadgetKind::Square => "square",
            GadgetKind::Product { .. } => "times",
            GadgetKind::Monomial { .. } => "mono",
            GadgetKind::Sqrt => "sqrt",
            GadgetKind::Abs => "abs",
            GadgetKind::Relu => "relu",
            GadgetKind::Identity { .. } => "identity",
        }
    }

    pub fn build(&self, kit: &GadgetKit, k: f64) -> Result<Network> {
        match self {
            GadgetKind::Square => kit.square(k),
            GadgetKind::Product { range } => kit.product(k, *range),
            GadgetKind::Monomial { m, cap } => Ok(kit.monomial(k, m, *cap)?.net),
            GadgetKind::Sqrt => kit.sqrt(k),
            GadgetKind::Abs => kit.abs(k),
            GadgetKind::Relu => kit.relu(k),
            GadgetKind::Identity { range } => kit.identity(k, *range),
        }
    }

    pub fn region(&self) -> Region {
        match self {
            GadgetKind::Square | GadgetKind::Abs | GadgetKind::Relu => Region::cube(1, -1.0, 1.0),
            GadgetKind::Product { range } => Region::cube(2, -range, *range),
            GadgetKind::Monomial { m, .. } => Region::unit(m.len()),
            GadgetKind::Sqrt => Region::cube(1, 0.0, 2.0),
            GadgetKind::Identity { range } => Region::cube(1, -range, *range),
        }
    }

    pub fn target(&self, x: &[f64]) -> f64 {
        match self {
            GadgetKind::Square => x[0] * x[0],
            GadgetKind::Product { .. } => x[0] * x[1],
            GadgetKind::Monomial { m, .. } => power(x, m),
            GadgetKind::Sqrt => x[0].sqrt(),
            GadgetKind::Abs => x[0].abs(),
            GadgetKind::Relu => x[0].max(0.0),
            GadgetKind::Identity { .. } => x[0],
        }
    }

    pub fn rate(&self) -> RateTag {
        match self {
            GadgetKind::Square | GadgetKind::Monomial { .. } | GadgetKind::Identity { .. } => RateTag::InvK,
            GadgetKind::Product { .. } => RateTag::RangeSqOverK,
            GadgetKind::Sqrt => RateTag::LogKOverK,
            GadgetKind::Abs | GadgetKind::Relu => RateTag::InvSqrtK,
        }
    }

    fn range(&self) -> f64 {
        match self {
            GadgetKind::Product { range } | GadgetKind::Identity { range } => *range,
            _ => 1.0,
        }
    }

    /// 10⁵ points in one dimension, 512² in two, the pipeline default otherwise.
    pub fn default_scheme(&self) -> Scheme {
        Scheme::default_for(self.region().dim())
    }
}

/// One knob value of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub knob: f64,
    pub sup_error: f64,
    /// Estimated floating-point floor of the network's output.
    pub floor: f64,
    pub metrics: Metrics,
    /// Whether the point sits more than 10× above its floor.
    pub used: bool,
}

/// Measured errors across a sweep with the fitted rate.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetErrorModel {
    pub gadget: String,
    pub activation: String,
    pub rate: RateTag,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `ln error` against `ln K` over the used points.
    pub slope: Option<f64>,
    /// `max error / rate(K)` over the used points.
    pub c_hat: f64,
}

impl GadgetErrorModel {
    pub const CSV_HEADER: [&'static str; 9] =
        ["gadget", "activation", "K", "depth", "width", "magnitude", "sup_error", "floor", "used"];

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    self.gadget.clone(),
                    self.activation.clone(),
                    p.knob.to_string(),
                    p.metrics.depth.to_string(),
                    p.metrics.width.to_string(),
                    format!("{:e}", p.metrics.magnitude),
                    format!("{:e}", p.sup_error),
                    format!("{:e}", p.floor),
                    p.used.to_string(),
                ]
            })
            .collect()
    }
}

/// Estimated floating-point floor of `net`'s output over `region`.
///
/// Every pre-activation is perturbed by `u·ε_mach·Σ_j|w_ij h_j|` with `u`
/// uniform in `[-1,1]` (a model of one rounding per affine step) and the
/// largest resulting output change over a coarse grid and a few seeded
/// trials is returned. Unlike an absolute-value bound this keeps the
/// cancellations the gadgets rely on.
pub fn rounding_floor(net: &Network, region: &Region) -> f64 {
    let per_dim = match region.dim() {
        1 => 1025,
        2 => 33,
        _ => 9,
    };
    let pts = Points::new(Scheme::Grid(per_dim), region);
    let ev = net.evaluator();
    pts.max_of(
        || ev.scratch(),
        |x, s| {
            let clean = ev.eval_scalar(x, s);
            let seed = x.iter().fold(0u64, |acc, v| acc.rotate_left(17) ^ v.to_bits());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..3)
                .map(|_| (perturbed_forward(net, x, &mut rng) - clean).abs())
                .fold(0.0, f64::max)
        },
    )
}

fn perturbed_forward(net: &Network, x: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let act = net.activation();
    let n = net.layers().len();
    let mut h = x.to_vec();
    for (l, layer) in net.layers().iter().enumerate() {
        let mut z = Vec::with_capacity(layer.rows);
        for i in 0..layer.rows {
            let mut acc = layer.bias[i];
            let mut mag = layer.bias[i].abs();
            for (w, v) in layer.row(i).iter().zip(&h) {
                if *w != 0.0 {
                    acc += w * v;
                    mag += (w * v).abs();
                }
            }
            z.push(acc + rng.gen_range(-1.0..=1.0) * f64::EPSILON * mag);
        }
        if l + 1 < n {
            for v in z.iter_mut() {
                *v = act.evaluate(*v);
            }
        }
        h = z;
    }
    h[0]
}

/// Builds the gadget at every knob and measures its sup error.
pub fn sweep(kit: &GadgetKit, kind: &GadgetKind, knobs: &[f64], scheme: Scheme) -> Result<GadgetErrorModel> {
    let region = kind.region();
    let target = FnField { dim: region.dim(), f: |x: &[f64]| kind.target(x) };
    let points = knobs
        .par_iter()
        .map(|&k| {
            let net = kind.build(kit, k)?;
            let ev = net.evaluator();
            let sup = sup_error_on(&ev, &target, scheme, &region);
            let floor = rounding_floor(&net, &region);
            Ok(SweepPoint { knob: k, sup_error: sup, floor, metrics: net.metrics(), used: sup > 10.0 * floor })
        })
        .collect::<Result<Vec<_>>>()?;
    let (ks, es): (Vec<f64>, Vec<f64>) = points.iter().filter(|p| p.used).map(|p| (p.knob, p.sup_error)).unzip();
    let rate = kind.rate();
    let c_hat = ks.iter().zip(&es).map(|(k, e)| e / rate.scale(*k, kind.range())).fold(0.0, f64::max);
    Ok(GadgetErrorModel {
        gadget: kind.name().to_string(),
        activation: kit.activation().to_string(),
        rate,
        slope: loglog_fit(&ks, &es).map(|f| f.slope),
        points,
        c_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::catalog;

    #[test]
    fn square_sweep_has_unit_slope() {
        let kit = GadgetKit::new(&catalog("sigmoid").unwrap()).unwrap();
        let model = sweep(&kit, &GadgetKind::Square, &default_knobs(), Scheme::Grid(4001)).unwrap();
        let slope = model.slope.unwrap();
        assert!((slope + 1.0).abs() <= 0.25, "{slope}");
        for p in &model.points {
            assert!(p.floor > 0.0 && p.floor < 1e-6);
        }
    }

    #[test]
    fn floor_grows_with_knob() {
        let kit = GadgetKit::new(&catalog("tanh").unwrap()).unwrap();
        let region = GadgetKind::Square.region();
        let lo = rounding_floor(&kit.square(1e2).unwrap(), &region);
        let hi = rounding_floor(&kit.square(1e6).unwrap(), &region);
        assert!(hi / lo > 1e3);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(GadgetKind::parse("times", None, None, Some(2.0)).unwrap(), GadgetKind::Product { range: 2.0 });
        assert!(GadgetKind::parse("mono", None, None, None).is_err());
        assert!(matches!(GadgetKind::parse("cube", None, None, None), Err(Error::Name(_))));
    }
}
