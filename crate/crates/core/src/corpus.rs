//! Target functions on `[0,1]^d` with partial-derivative oracles and declared
//! smoothness `(α, R)`.
//!
//! Smoothness conventions: the Taylor degree for order `α` is `q = ⌈α⌉ − 1`,
//! so the top-order derivatives are `(α − q)`-Hölder with exponent in `(0, 1]`
//! (Lipschitz when `α` is an integer). Hölder quotients use the ℓ1 distance.
//!
//! Declared radii are `R = d^α · N_f` where `N_f` is an analytic upper bound on
//! the Hölder norm; the factor `d^α` makes `sup |P_M − f| ≤ R·M^{−α}` a true
//! bound for the local Taylor surrogate.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{parse_call, richardson};
use crate::error::{Error, Result};
use crate::multi_index::{self, order};

/// Taylor degree used for smoothness order `alpha`: `⌈α⌉ − 1`.
pub fn taylor_degree(alpha: f64) -> usize {
    (alpha.ceil() as usize).saturating_sub(1)
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TargetKind {
    Const(f64),
    Linear,
    Sin2Pi,
    SinProd,
    GaussBump { center: Vec<f64>, width: f64 },
    AbsKink,
    Polynomial(Vec<(Vec<u32>, f64)>),
    Wavy,
    /// Product hat `Π (1 − M|x_j − z_j|)_+`.
    Hat { center: Vec<f64>, resolution: usize },
    /// Value oracle only; derivatives by finite differences.
    Custom(ValueFn),
}

impl fmt::Debug for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::Custom(_) => write!(f, "Custom"),
            TargetKind::Const(c) => write!(f, "Const({c})"),
            TargetKind::Polynomial(t) => write!(f, "Polynomial({t:?})"),
            TargetKind::GaussBump { center, width } => write!(f, "GaussBump({center:?}, {width})"),
            TargetKind::Hat { center, resolution } => write!(f, "Hat({center:?}, {resolution})"),
            other => write!(
                f,
                "{}",
                match other {
                    TargetKind::Linear => "Linear",
                    TargetKind::Sin2Pi => "Sin2Pi",
                    TargetKind::SinProd => "SinProd",
                    TargetKind::AbsKink => "AbsKink",
                    _ => "Wavy",
                }
            ),
        }
    }
}

/// Target `f ∈ H^{α,R}([0,1]^d)`.
#[derive(Clone, Debug)]
pub struct HolderFunction {
    pub name: String,
    pub dim: usize,
    pub alpha: f64,
    pub radius: f64,
    kind: TargetKind,
}

/// Names accepted by [`corpus`]; `polynomial` needs coefficients and is built
/// with [`HolderFunction::polynomial`] or [`polynomial_from_csv`].
pub const CORPUS: &[&str] = &[
    "const",
    "linear",
    "sin2pi_d1",
    "sinprod_d2",
    "gauss_bump_d2",
    "abs_kink_d1",
    "wavy_d3",
];

const BUMP_WIDTH: f64 = 0.25;
const WAVY_FREQ: [f64; 3] = [2.0 * PI, PI, PI / 2.0];

/// Looks up a corpus entry, e.g. `sin2pi_d1` or `const(3)`.
pub fn corpus(name: &str) -> Result<HolderFunction> {
    let (base, args) = parse_call(name)?;
    let no_args = || {
        if args.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(format!("`{base}` takes no parameters")))
        }
    };
    let f = |dim, alpha, radius, kind| HolderFunction { name: base.clone(), dim, alpha, radius, kind };
    Ok(match base.as_str() {
        "const" => {
            let c = match args.as_slice() {
                [] => 1.0,
                [(k, v)] if k.as_deref().is_none_or(|k| k == "c") => *v,
                _ => return Err(Error::Domain("`const` takes a single parameter `c`".into())),
            };
            let mut t = f(1, 2.0, c.abs(), TargetKind::Const(c));
            t.name = format!("const({c})");
            t
        }
        "linear" => {
            no_args()?;
            f(1, 1.0, 2.0, TargetKind::Linear)
        }
        "sin2pi_d1" => {
            no_args()?;
            let w = 2.0 * PI;
            f(1, 2.0, 1.0 + w + w * w + w * w * w, TargetKind::Sin2Pi)
        }
        "sinprod_d2" => {
            no_args()?;
            let w = 2.0 * PI;
            // ‖f‖ + ‖∂_1 f‖ + ‖∂_2 f‖ + [∂_1 f]_1 + [∂_2 f]_1.
            let norm = 1.0 + 2.0 * w + 2.0 * w * w;
            f(2, 2.0, 4.0 * norm, TargetKind::SinProd)
        }
        "gauss_bump_d2" => {
            no_args()?;
            let s = BUMP_WIDTH;
            let norm = 1.0 + 2.0 * (-0.5f64).exp() / s + 2.0 / (s * s);
            f(2, 2.0, 4.0 * norm, TargetKind::GaussBump { center: vec![0.5, 0.5], width: s })
        }
        "abs_kink_d1" => {
            no_args()?;
            f(1, 1.0, 1.5, TargetKind::AbsKink)
        }
        "wavy_d3" => {
            no_args()?;
            let total: f64 = WAVY_FREQ.iter().sum();
            let top = WAVY_FREQ[0];
            let norm = 1.0 + total + top * total;
            f(3, 2.0, 9.0 * norm, TargetKind::Wavy)
        }
        "polynomial" => {
            return Err(Error::Domain("polynomial targets need a coefficient file (--coeffs)".into()));
        }
        _ => return Err(Error::Name(base)),
    })
}

/// Reads `exponent_1,…,exponent_d,coefficient` rows (no header).
pub fn polynomial_from_csv(path: &Path, alpha: Option<f64>) -> Result<HolderFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut terms = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::Parse(format!("row {:?} needs at least one exponent and a coefficient", record)));
        }
        let n = record.len() - 1;
        let exps = (0..n)
            .map(|i| record[i].parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent `{}`", &record[i]))))
            .collect::<Result<Vec<u32>>>()?;
        let c: f64 = record[n]
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient `{}`", &record[n])))?;
        terms.push((exps, c));
    }
    HolderFunction::polynomial(terms, alpha.unwrap_or(2.0))
}

impl HolderFunction {
    /// Polynomial `Σ c_m x^m` with declared order `alpha`.
    pub fn polynomial(terms: Vec<(Vec<u32>, f64)>, alpha: f64) -> Result<Self> {
        let dim = terms.first().map(|(m, _)| m.len()).unwrap_or(0);
        if dim == 0 || terms.iter().any(|(m, _)| m.len() != dim) {
            return Err(Error::Domain("polynomial terms need a common, nonzero dimension".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let q = taylor_degree(alpha);
        let beta = alpha - q as f64;
        let bound = |m: &[u32]| -> f64 {
            terms
                .iter()
                .map(|(k, c)| c.abs() * falling(k, m))
                .sum()
        };
        let mut norm = 0.0;
        for m in multi_index::up_to(dim, q) {
            norm += bound(&m);
            if order(&m) as usize == q {
                // ℓ1-Lipschitz constant, converted to a β-Hölder coefficient on [0,1]^d.
                let lip = (0..dim)
                    .map(|j| {
                        let mut e = m.clone();
                        e[j] += 1;
                        bound(&e)
                    })
                    .fold(0.0, f64::max);
                norm += lip * (dim as f64).powf(1.0 - beta);
            }
        }
        Ok(Self {
            name: "polynomial".into(),
            dim,
            alpha,
            radius: (dim as f64).powf(alpha) * norm,
            kind: TargetKind::Polynomial(terms),
        })
    }

    /// Local basis function of the grid `G_{d,M}` as a target (`α = 1`).
    pub fn hat(center: Vec<f64>, resolution: usize) -> Self {
        let dim = center.len();
        let lip = resolution as f64;
        Self {
            name: "hat".into(),
            dim,
            alpha: 1.0,
            radius: (dim as f64) * (1.0 + lip),
            kind: TargetKind::Hat { center, resolution },
        }
    }

    /// Black-box target; derivatives come from finite differences and the
    /// declaration is not verified.
    pub fn custom(name: &str, dim: usize, alpha: f64, radius: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), dim, alpha, radius, kind: TargetKind::Custom(Arc::new(f)) }
    }

    /// Same function with a different declaration.
    pub fn with_declaration(mut self, alpha: f64, radius: f64) -> Self {
        self.alpha = alpha;
        self.radius = radius;
        self
    }

    pub fn kind(&self) -> &TargetKind {
        &self.kind
    }

    pub fn taylor_degree(&self) -> usize {
        taylor_degree(self.alpha)
    }

    /// True when the derivative oracle is analytic.
    pub fn has_exact_derivatives(&self) -> bool {
        !matches!(self.kind, TargetKind::Custom(_))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            TargetKind::Const(c) => *c,
            TargetKind::Linear => x[0],
            TargetKind::Sin2Pi => (2.0 * PI * x[0]).sin(),
            TargetKind::SinProd => (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos(),
            TargetKind::GaussBump { center, width } => x
                .iter()
                .zip(center)
                .map(|(v, c)| (-(v - c) * (v - c) / (2.0 * width * width)).exp())
                .product(),
            TargetKind::AbsKink => (x[0] - 0.5).abs(),
            TargetKind::Polynomial(terms) => terms.iter().map(|(m, c)| c * multi_index::power(x, m)).sum(),
            TargetKind::Wavy => wavy_phase(x).sin(),
            TargetKind::Hat { center, resolution } => x
                .iter()
                .zip(center)
                .map(|(v, z)| (1.0 - *resolution as f64 * (v - z).abs()).max(0.0))
                .product(),
            TargetKind::Custom(f) => f(x),
        }
    }

    /// Partial derivative `∂^m f(x)`.
    ///
    /// Available for `|m| ≤ q` (and beyond for the smooth entries); kinks use
    /// the right derivative.
    pub fn derivative(&self, m: &[u32], x: &[f64]) -> Result<f64> {
        if m.len() != self.dim {
            return Err(crate::error::shape("multi-index", self.dim, m.len()));
        }
        let k = order(m);
        if k == 0 {
            return Ok(self.value(x));
        }
        Ok(match &self.kind {
            TargetKind::Const(_) => 0.0,
            TargetKind::Linear => {
                if k == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            TargetKind::Sin2Pi => (2.0 * PI).powi(k as i32) * (2.0 * PI * x[0] + f64::from(k) * PI / 2.0).sin(),
            TargetKind::SinProd => {
                let w = 2.0 * PI;
                w.powi(k as i32)
                    * (w * x[0] + f64::from(m[0]) * PI / 2.0).sin()
                    * (w * x[1] + f64::from(m[1]) * PI / 2.0).cos()
            }
            TargetKind::GaussBump { center, width } => x
                .iter()
                .zip(center)
                .zip(m)
                .map(|((v, c), &mj)| {
                    let u = (v - c) / width;
                    (-1.0 / width).powi(mj as i32) * hermite(mj, u) * (-u * u / 2.0).exp()
                })
                .product(),
            TargetKind::AbsKink => {
                if k > 1 {
                    0.0
                } else if x[0] >= 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            TargetKind::Polynomial(terms) => terms
                .iter()
                .map(|(p, c)| {
                    let f = falling(p, m);
                    if f == 0.0 {
                        0.0
                    } else {
                        let rest: Vec<u32> = p.iter().zip(m).map(|(a, b)| a - b).collect();
                        c * f * multi_index::power(x, &rest)
                    }
                })
                .sum(),
            TargetKind::Wavy => {
                let scale: f64 = WAVY_FREQ.iter().zip(m).map(|(w, &mj)| w.powi(mj as i32)).product();
                scale * (wavy_phase(x) + f64::from(k) * PI / 2.0).sin()
            }
            TargetKind::Hat { .. } => {
                if k > 1 {
                    return Err(Error::Capability("hat targets have first derivatives only".into()));
                }
                let j = m.iter().position(|&v| v == 1).unwrap_or(0);
                let h = 1e-7;
                let mut y = x.to_vec();
                y[j] += h;
                (self.value(&y) - self.value(x)) / h
            }
            TargetKind::Custom(_) => fd_derivative(&|y: &[f64]| self.value(y), m, x, 1e-3),
        })
    }
}

fn wavy_phase(x: &[f64]) -> f64 {
    WAVY_FREQ.iter().zip(x).map(|(w, v)| w * v).sum()
}

/// Falling factorial product `Π p_j!/(p_j − m_j)!`; zero unless `p ≥ m`.
fn falling(p: &[u32], m: &[u32]) -> f64 {
    let mut acc = 1.0;
    for (&a, &b) in p.iter().zip(m) {
        if b > a {
            return 0.0;
        }
        for i in 0..b {
            acc *= f64::from(a - i);
        }
    }
    acc
}

/// Probabilists' Hermite polynomial `He_n`.
fn hermite(n: u32, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, u);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = u * cur - f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Nested central differences with Richardson extrapolation.
fn fd_derivative(f: &dyn Fn(&[f64]) -> f64, m: &[u32], x: &[f64], h: f64) -> f64 {
    let Some(j) = m.iter().position(|&v| v > 0) else {
        return f(x);
    };
    let mut rest = m.to_vec();
    rest[j] -= 1;
    richardson(
        |t| {
            let mut y = x.to_vec();
            y[j] = t;
            fd_derivative(f, &rest, &y, h)
        },
        x[j],
        h,
    )
}

fn sample_box(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()
}

/// Checks every analytic derivative of order `1..=q` against a finite
/// difference of the next-lower derivative at `n` random interior points.
pub fn check_derivatives(f: &HolderFunction, n: usize, seed: u64) -> Result<()> {
    if !f.has_exact_derivatives() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = f.taylor_degree();
    for _ in 0..n {
        let x: Vec<f64> = (0..f.dim).map(|_| rng.gen_range(0.05..0.95)).collect();
        for m in multi_index::up_to(f.dim, q).into_iter().filter(|m| order(m) > 0) {
            if matches!(f.kind, TargetKind::AbsKink | TargetKind::Hat { .. }) {
                continue;
            }
            let j = m.iter().position(|&v| v > 0).unwrap();
            let mut lower = m.clone();
            lower[j] -= 1;
            let fd = richardson(
                |t| {
                    let mut y = x.clone();
                    y[j] = t;
                    f.derivative(&lower, &y).unwrap_or(f64::NAN)
                },
                x[j],
                1e-3,
            );
            let exact = f.derivative(&m, &x)?;
            let scale = f.derivative(&lower, &x)?.abs().max(1.0);
            if (exact - fd).abs() > 1e-4 * exact.abs() + 1e-8 * scale {
                return Err(Error::Domain(format!(
                    "{}: ∂^{m:?} at {x:?} is {exact}, finite difference gives {fd}",
                    f.name
                )));
            }
        }
    }
    Ok(())
}

/// Sampled lower bound on the Hölder norm of order `alpha`:
/// `Σ_{|m|≤q} max |∂^m f| + Σ_{|m|=q} max |∂^m f(x) − ∂^m f(y)| / |x − y|_1^{α−q}`.
pub fn empirical_holder_norm(f: &HolderFunction, alpha: f64, samples: usize, seed: u64) -> Result<f64> {
    let q = taylor_degree(alpha);
    let beta = alpha - q as f64;
    let d = f.dim;
    let per_dim = match d {
        1 => 2001,
        2 => 101,
        _ => 21,
    };
    let grid = crate::approx::grid::lattice(d, per_dim - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for m in multi_index::up_to(d, q) {
        let mut sup: f64 = 0.0;
        for x in &grid {
            sup = sup.max(f.derivative(&m, x)?.abs());
        }
        total += sup;
        if order(&m) as usize != q {
            continue;
        }
        let mut coef: f64 = 0.0;
        for i in 0..samples {
            let x = sample_box(&mut rng, d);
            let y: Vec<f64> = if i % 2 == 0 {
                sample_box(&mut rng, d)
            } else {
                let r = 10f64.powf(rng.gen_range(-4.0..-1.0));
                x.iter().map(|v| (v + rng.gen_range(-r..r)).clamp(0.0, 1.0)).collect()
            };
            let dist: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
            if dist == 0.0 {
                continue;
            }
            let num = (f.derivative(&m, &x)? - f.derivative(&m, &y)?).abs();
            coef = coef.max(num / dist.powf(beta));
        }
        total += coef;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_entries() -> Vec<HolderFunction> {
        let mut v: Vec<HolderFunction> = CORPUS.iter().map(|n| corpus(n).unwrap()).collect();
        v.push(corpus("const(3)").unwrap());
        v.push(HolderFunction::polynomial(vec![(vec![2, 1], 1.5), (vec![0, 3], -0.5), (vec![0, 0], 2.0)], 2.0).unwrap());
        v.push(HolderFunction::polynomial(vec![(vec![3], 1.0), (vec![1], -2.0)], 2.5).unwrap());
        v
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(corpus("bessel"), Err(Error::Name(_))));
    }

    #[test]
    fn constant_entry() {
        let f = corpus("const(3)").unwrap();
        assert_eq!(f.radius, 3.0);
        assert_eq!(f.value(&[0.3]), 3.0);
        assert_eq!(f.derivative(&[1], &[0.3]).unwrap(), 0.0);
        assert_eq!(empirical_holder_norm(&f, f.alpha, 200, 1).unwrap(), 3.0);
    }

    #[test]
    fn linear_norm_is_two() {
        let f = corpus("linear").unwrap();
        let n = empirical_holder_norm(&f, 1.0, 500, 2).unwrap();
        assert!((n - 2.0).abs() < 1e-12, "{n}");
    }

    #[test]
    fn abs_kink_norm_approaches_declaration() {
        let f = corpus("abs_kink_d1").unwrap();
        let n = empirical_holder_norm(&f, 1.0, 2000, 3).unwrap();
        assert!(n >= 1.49 && n <= f.radius * (1.0 + 1e-9), "{n}");
    }

    #[test]
    fn sin2pi_declaration() {
        let f = corpus("sin2pi_d1").unwrap();
        let w = 2.0 * PI;
        assert!((f.radius - (1.0 + w + w * w + w * w * w)).abs() < 1e-12);
    }

    #[test]
    fn declarations_dominate_sampled_norms() {
        for f in all_entries() {
            let n = empirical_holder_norm(&f, f.alpha, 4000, 4).unwrap();
            // Difference quotients carry rounding of order 1e-12.
            assert!(n <= f.radius * (1.0 + 1e-9), "{}: {n} > {}", f.name, f.radius);
        }
    }

    #[test]
    fn derivative_oracles_match_finite_differences() {
        for f in all_entries() {
            check_derivatives(&f, 100, 5).unwrap();
        }
        // Higher orders than the declaration needs, for the smooth entries.
        for name in ["sin2pi_d1", "sinprod_d2", "gauss_bump_d2", "wavy_d3"] {
            let f = corpus(name).unwrap().with_declaration(4.0, 1e9);
            check_derivatives(&f, 50, 6).unwrap();
        }
    }

    #[test]
    fn mixed_partials_commute() {
        for name in ["sinprod_d2", "gauss_bump_d2", "wavy_d3"] {
            let f = corpus(name).unwrap();
            let d = f.dim;
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (mut e1, mut e2) = (vec![0u32; d], vec![0u32; d]);
            e1[0] = 1;
            e2[1] = 1;
            for _ in 0..20 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..0.9)).collect();
                // ∂_2 of ∂_1 f versus ∂_1 of ∂_2 f, both by finite differences of the oracle.
                let a = richardson(|t| { let mut y = x.clone(); y[1] = t; f.derivative(&e1, &y).unwrap() }, x[1], 1e-3);
                let b = richardson(|t| { let mut y = x.clone(); y[0] = t; f.derivative(&e2, &y).unwrap() }, x[0], 1e-3);
                let mut m = vec![0u32; d];
                m[0] = 1;
                m[1] = 1;
                let exact = f.derivative(&m, &x).unwrap();
                assert!((a - b).abs() <= 1e-8 * exact.abs().max(1.0), "{name}: {a} vs {b}");
                assert!((a - exact).abs() <= 1e-8 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn custom_target_uses_finite_differences() {
        let f = HolderFunction::custom("cube", 1, 2.0, 10.0, |x| x[0].powi(3));
        assert!(!f.has_exact_derivatives());
        assert!((f.derivative(&[1], &[0.5]).unwrap() - 0.75).abs() < 1e-8);
        assert!((f.derivative(&[2], &[0.5]).unwrap() - 3.0).abs() < 1e-5);
    }

    #[test]
    fn polynomial_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "# x^2 y - 3\n2,1,1.0\n0,0,-3\n").unwrap();
        let f = polynomial_from_csv(&path, None).unwrap();
        assert_eq!(f.dim, 2);
        assert!((f.value(&[0.5, 2.0]) - (0.5 - 3.0)).abs() < 1e-15);
        assert!((f.derivative(&[1, 1], &[0.5, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        std::fs::write(&path, "2,x,1.0\n").unwrap();
        assert!(polynomial_from_csv(&path, None).is_err());
    }
}
