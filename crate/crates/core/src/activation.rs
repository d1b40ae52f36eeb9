//! Activation functions: the piecewise-linear and locally-quadratic classes,
//! plus the named catalog.
//!
//! Catalog names accept a single optional hyperparameter, written either as
//! `leaky_relu(a=0.01)` or `leaky_relu(0.01)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous piecewise-linear function with finitely many breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    /// Value of the function at each breakpoint, chained from the first.
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, value_at_first_breakpoint: f64) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Domain("a piecewise-linear activation needs at least one breakpoint".into()));
        }
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if breakpoints.iter().chain(&slopes).any(|v| !v.is_finite()) || !value_at_first_breakpoint.is_finite() {
            return Err(Error::Domain("breakpoints, slopes and value must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if slopes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("slopes must change at every breakpoint".into()));
        }
        let mut values = Vec::with_capacity(breakpoints.len());
        values.push(value_at_first_breakpoint);
        for k in 1..breakpoints.len() {
            let prev = values[k - 1];
            values.push(prev + slopes[k] * (breakpoints[k] - breakpoints[k - 1]));
        }
        Ok(Self { breakpoints, slopes, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Slopes of the `K+1` linear pieces, left to right.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn value_at_breakpoint(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `σ'(a_k+) − σ'(a_k−)`.
    pub fn slope_jump(&self, k: usize) -> f64 {
        self.slopes[k + 1] - self.slopes[k]
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        // Number of breakpoints <= x.
        let i = self.breakpoints.partition_point(|&a| a <= x);
        if i == 0 {
            self.values[0] + self.slopes[0] * (x - self.breakpoints[0])
        } else {
            self.values[i - 1] + self.slopes[i] * (x - self.breakpoints[i - 1])
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.slopes.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// True when `σ(x) − σ(−x)` is a nonzero multiple of `x` for every `x`,
    /// i.e. a single breakpoint at the origin with `σ(0) = 0`.
    pub fn odd_part_is_linear(&self) -> bool {
        self.breakpoints == [0.0] && self.values[0] == 0.0
    }
}

/// Oracles for a user-defined smooth activation.
pub struct CustomSmooth {
    pub name: String,
    pub value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d1: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d3: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomSmooth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSmooth").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum SmoothKind {
    Sigmoid,
    Tanh,
    Isru(f64),
    SoftClipping(f64),
    Softplus,
    Swish,
    Repu(u32),
    Elu(f64),
    Isrlu(f64),
    Softsign,
    Sqnl,
    Custom(Arc<CustomSmooth>),
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Value and first three derivatives of the logistic function.
fn logistic_jet(x: f64) -> [f64; 4] {
    let s = logistic(x);
    let s1 = s * (1.0 - s);
    [s, s1, s1 * (1.0 - 2.0 * s), s1 * (1.0 - 6.0 * s + 6.0 * s * s)]
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `x / sqrt(1 + a x^2)` and its derivatives.
fn isru_jet(a: f64, x: f64) -> [f64; 4] {
    let g = 1.0 + a * x * x;
    let r = g.sqrt();
    [
        x / r,
        1.0 / (g * r),
        -3.0 * a * x / (g * g * r),
        3.0 * a * (4.0 * a * x * x - 1.0) / (g * g * g * r),
    ]
}

impl SmoothKind {
    /// `[σ, σ', σ'', σ''']` at `x`.
    pub fn jet(&self, x: f64) -> [f64; 4] {
        match self {
            SmoothKind::Sigmoid => logistic_jet(x),
            SmoothKind::Tanh => {
                let t = x.tanh();
                let p = 1.0 - t * t;
                [t, p, -2.0 * t * p, p * (6.0 * t * t - 2.0)]
            }
            SmoothKind::Isru(a) => isru_jet(*a, x),
            SmoothKind::SoftClipping(a) => {
                let a = *a;
                let hi = logistic_jet(a * x);
                let lo = logistic_jet(a * (x - 1.0));
                [
                    (softplus(a * x) - softplus(a * (x - 1.0))) / a,
                    hi[0] - lo[0],
                    a * (hi[1] - lo[1]),
                    a * a * (hi[2] - lo[2]),
                ]
            }
            SmoothKind::Softplus => {
                let s = logistic_jet(x);
                [softplus(x), s[0], s[1], s[2]]
            }
            SmoothKind::Swish => {
                let s = logistic_jet(x);
                [x * s[0], s[0] + x * s[1], 2.0 * s[1] + x * s[2], 3.0 * s[2] + x * s[3]]
            }
            SmoothKind::Repu(k) => {
                if x <= 0.0 {
                    return [0.0; 4];
                }
                let k = *k as i32;
                let kf = k as f64;
                [
                    x.powi(k),
                    kf * x.powi(k - 1),
                    kf * (kf - 1.0) * x.powi(k - 2),
                    kf * (kf - 1.0) * (kf - 2.0) * x.powi(k - 3),
                ]
            }
            SmoothKind::Elu(a) => {
                if x >= 0.0 {
                    [x, 1.0, 0.0, 0.0]
                } else {
                    let e = x.exp();
                    [a * (e - 1.0), a * e, a * e, a * e]
                }
            }
            SmoothKind::Isrlu(a) => {
                if x >= 0.0 {
                    [x, 1.0, 0.0, 0.0]
                } else {
                    isru_jet(*a, x)
                }
            }
            SmoothKind::Softsign => {
                let g = 1.0 + x.abs();
                let sign = if x < 0.0 { -1.0 } else { 1.0 };
                [x / g, 1.0 / (g * g), -2.0 * sign / (g * g * g), 6.0 / (g * g * g * g)]
            }
            SmoothKind::Sqnl => {
                if x > 2.0 {
                    [1.0, 0.0, 0.0, 0.0]
                } else if x >= 0.0 {
                    [x - x * x / 4.0, 1.0 - x / 2.0, -0.5, 0.0]
                } else if x >= -2.0 {
                    [x + x * x / 4.0, 1.0 + x / 2.0, 0.5, 0.0]
                } else {
                    [-1.0, 0.0, 0.0, 0.0]
                }
            }
            SmoothKind::Custom(c) => [(c.value)(x), (c.d1)(x), (c.d2)(x), (c.d3)(x)],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            SmoothKind::Sigmoid => logistic(x),
            SmoothKind::Tanh => x.tanh(),
            SmoothKind::Softplus => softplus(x),
            SmoothKind::Custom(c) => (c.value)(x),
            _ => self.jet(x)[0],
        }
    }
}

/// Activation that is three times differentiable on `(a, b)` with
/// `σ'(t) ≠ 0` and `σ''(t) ≠ 0` at the expansion point `t`.
#[derive(Clone, Debug)]
pub struct LocallyQuadratic {
    kind: SmoothKind,
    interval: (f64, f64),
    t: f64,
    derivative_bound: f64,
    jet_t: [f64; 4],
}

impl LocallyQuadratic {
    /// Builds the descriptor and checks the defining conditions, including a
    /// finite-difference check of the derivative oracles.
    pub fn new(kind: SmoothKind, interval: (f64, f64), t: f64, derivative_bound: f64) -> Result<Self> {
        let (a, b) = interval;
        if !(a < t && t < b) {
            return Err(Error::Domain(format!("expansion point {t} is not inside ({a}, {b})")));
        }
        if !(derivative_bound >= 0.0) {
            return Err(Error::Domain("derivative bound must be nonnegative".into()));
        }
        let jet_t = kind.jet(t);
        if jet_t[1] == 0.0 || jet_t[2] == 0.0 || !jet_t.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!(
                "need σ'(t) ≠ 0 and σ''(t) ≠ 0 at t = {t}, got {} and {}",
                jet_t[1], jet_t[2]
            )));
        }
        let act = Self { kind, interval, t, derivative_bound, jet_t };
        act.check_derivatives()?;
        Ok(act)
    }

    pub fn custom(custom: CustomSmooth, interval: (f64, f64), t: f64, derivative_bound: f64) -> Result<Self> {
        Self::new(SmoothKind::Custom(Arc::new(custom)), interval, t, derivative_bound)
    }

    pub fn kind(&self) -> &SmoothKind {
        &self.kind
    }

    pub fn value(&self, x: f64) -> f64 {
        self.kind.value(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.kind.jet(x)[1]
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.kind.jet(x)[2]
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.kind.jet(x)[3]
    }

    pub fn smooth_interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn expansion_point(&self) -> f64 {
        self.t
    }

    /// Documented bound on `|σ'''|` over the smooth interval (not verified globally).
    pub fn derivative_bound(&self) -> f64 {
        self.derivative_bound
    }

    /// `[σ(t), σ'(t), σ''(t), σ'''(t)]`.
    pub fn jet_at_t(&self) -> [f64; 4] {
        self.jet_t
    }

    /// Distance from `t` to the nearest end of the smooth interval.
    pub fn margin(&self) -> f64 {
        (self.t - self.interval.0).min(self.interval.1 - self.t)
    }

    /// Threshold on the user-facing accuracy knob: the square gadget samples
    /// `σ` at `t + 2x/K'` with `K' = K·sqrt(|σ''(t)|/2)`, which must stay in
    /// the smooth interval for `|x| ≤ 1`.
    pub fn k0(&self) -> f64 {
        2.0 / (self.margin() * (self.jet_t[2].abs() / 2.0).sqrt())
    }

    /// Sample points used for the finite-difference check: ten equally spaced
    /// interior points of the smooth interval, clipped to `t ± 4`.
    pub fn check_points(&self) -> Vec<f64> {
        let lo = self.interval.0.max(self.t - 4.0);
        let hi = self.interval.1.min(self.t + 4.0);
        (1..=10).map(|i| lo + (hi - lo) * i as f64 / 11.0).collect()
    }

    fn check_derivatives(&self) -> Result<()> {
        for x in self.check_points() {
            let room = (x - self.interval.0).min(self.interval.1 - x);
            let h = (1e-2 * x.abs().max(1.0)).min(room / 4.0);
            let jet = self.kind.jet(x);
            let checks = [
                (1, richardson(|y| self.kind.jet(y)[0], x, h)),
                (2, richardson(|y| self.kind.jet(y)[1], x, h)),
                (3, richardson(|y| self.kind.jet(y)[2], x, h)),
            ];
            for (order, fd) in checks {
                let exact = jet[order];
                if (exact - fd).abs() > 1e-5 * exact.abs() + 1e-8 {
                    return Err(Error::Domain(format!(
                        "derivative of order {order} at x = {x}: oracle {exact}, finite difference {fd}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Central difference with two steps of Richardson extrapolation.
pub(crate) fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

#[derive(Clone, Debug)]
pub enum ActivationKind {
    PiecewiseLinear(PiecewiseLinear),
    LocallyQuadratic(LocallyQuadratic),
}

/// Serializable description of an activation: a catalog name with its
/// hyperparameters, or an explicit piecewise-linear function named `pwl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_at_first_breakpoint: Option<f64>,
}

impl ActivationSpec {
    fn named(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            breakpoints: None,
            slopes: None,
            value_at_first_breakpoint: None,
        }
    }
}

impl fmt::Display for ActivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(bp), Some(sl), Some(v)) = (&self.breakpoints, &self.slopes, self.value_at_first_breakpoint) {
            return write!(f, "{}(breakpoints={:?}, slopes={:?}, value={})", self.name, bp, sl, v);
        }
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let args: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

/// An activation with its class payload and Lipschitz constant (absent for RePU).
#[derive(Clone, Debug)]
pub struct Activation {
    spec: ActivationSpec,
    kind: ActivationKind,
    lipschitz: Option<f64>,
}

impl PartialEq for Activation {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.spec.fmt(f)
    }
}

/// Names accepted by [`catalog`].
pub const CATALOG: &[&str] = &[
    "relu",
    "leaky_relu",
    "hard_tanh",
    "sigmoid",
    "tanh",
    "isru",
    "soft_clipping",
    "softplus",
    "swish",
    "repu",
    "elu",
    "isrlu",
    "softsign",
    "sqnl",
];

const SWISH_LIPSCHITZ: f64 = 1.099_839_320_2;
const SWISH_D3_BOUND: f64 = 0.3082;
/// `max |σ''|` of the logistic function, `sqrt(3)/18`.
const LOGISTIC_D2_MAX: f64 = 0.096_225_044_864_937_6;

impl Activation {
    pub fn relu() -> Self {
        catalog("relu").expect("relu is in the catalog")
    }

    /// A custom piecewise-linear activation.
    pub fn piecewise_linear(pwl: PiecewiseLinear) -> Self {
        let spec = ActivationSpec {
            name: "pwl".into(),
            params: BTreeMap::new(),
            breakpoints: Some(pwl.breakpoints.clone()),
            slopes: Some(pwl.slopes.clone()),
            value_at_first_breakpoint: Some(pwl.values[0]),
        };
        let lipschitz = Some(pwl.lipschitz());
        Self { spec, kind: ActivationKind::PiecewiseLinear(pwl), lipschitz }
    }

    /// A custom locally-quadratic activation.
    pub fn locally_quadratic(name: &str, lq: LocallyQuadratic, lipschitz: Option<f64>) -> Self {
        Self {
            spec: ActivationSpec::named(name, &[]),
            kind: ActivationKind::LocallyQuadratic(lq),
            lipschitz,
        }
    }

    pub fn from_spec(spec: &ActivationSpec) -> Result<Self> {
        if spec.name == "pwl" {
            let (Some(bp), Some(sl), Some(v)) = (&spec.breakpoints, &spec.slopes, spec.value_at_first_breakpoint) else {
                return Err(Error::Domain("pwl activation needs breakpoints, slopes and value_at_first_breakpoint".into()));
            };
            return Ok(Self::piecewise_linear(PiecewiseLinear::new(bp.clone(), sl.clone(), v)?));
        }
        let args: Vec<(Option<String>, f64)> = spec.params.iter().map(|(k, v)| (Some(k.clone()), *v)).collect();
        build(&spec.name, &args)
    }

    pub fn spec(&self) -> &ActivationSpec {
        &self.spec
    }

    pub fn kind(&self) -> &ActivationKind {
        &self.kind
    }

    pub fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn as_piecewise_linear(&self) -> Option<&PiecewiseLinear> {
        match &self.kind {
            ActivationKind::PiecewiseLinear(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_locally_quadratic(&self) -> Option<&LocallyQuadratic> {
        match &self.kind {
            ActivationKind::LocallyQuadratic(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_relu(&self) -> bool {
        self.as_piecewise_linear()
            .is_some_and(|p| p.breakpoints == [0.0] && p.slopes == [0.0, 1.0] && p.values[0] == 0.0)
    }

    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        match &self.kind {
            ActivationKind::PiecewiseLinear(p) => {
                if p.breakpoints.len() == 1 {
                    let a = p.breakpoints[0];
                    let s = if x < a { p.slopes[0] } else { p.slopes[1] };
                    p.values[0] + s * (x - a)
                } else {
                    p.evaluate(x)
                }
            }
            ActivationKind::LocallyQuadratic(q) => q.value(x),
        }
    }
}

/// Splits `name(a=0.1)` / `name(0.1)` / `name` into a name and its arguments.
pub fn parse_call(s: &str) -> Result<(String, Vec<(Option<String>, f64)>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s.to_string(), Vec::new()));
    };
    if !s.ends_with(')') {
        return Err(Error::Parse(format!("missing closing parenthesis in `{s}`")));
    }
    let name = s[..open].trim().to_string();
    let inner = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = match part.split_once('=') {
            Some((k, v)) => (Some(k.trim().to_string()), v.trim()),
            None => (None, part),
        };
        let v: f64 = val
            .parse()
            .map_err(|_| Error::Parse(format!("`{val}` is not a number in `{s}`")))?;
        args.push((key, v));
    }
    Ok((name, args))
}

/// Looks up a catalog activation by its CLI string, e.g. `leaky_relu(a=0.01)`.
pub fn catalog(name: &str) -> Result<Activation> {
    let (base, args) = parse_call(name)?;
    build(&base, &args)
}

fn single_param(name: &str, key: &str, default: f64, args: &[(Option<String>, f64)]) -> Result<f64> {
    match args {
        [] => Ok(default),
        [(k, v)] if k.as_deref().is_none_or(|k| k == key) => Ok(*v),
        _ => Err(Error::Domain(format!("`{name}` takes a single parameter `{key}`"))),
    }
}

fn no_params(name: &str, args: &[(Option<String>, f64)]) -> Result<()> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain(format!("`{name}` takes no parameters")))
    }
}

fn positive(name: &str, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("`{name}` needs {key} > 0, got {v}")))
    }
}

fn build(name: &str, args: &[(Option<String>, f64)]) -> Result<Activation> {
    let smooth = |kind: SmoothKind, interval, t, bound, lip, params: &[(&str, f64)]| -> Result<Activation> {
        Ok(Activation {
            spec: ActivationSpec::named(name, params),
            kind: ActivationKind::LocallyQuadratic(LocallyQuadratic::new(kind, interval, t, bound)?),
            lipschitz: lip,
        })
    };
    let pwl = |bp: Vec<f64>, sl: Vec<f64>, v: f64, params: &[(&str, f64)]| -> Result<Activation> {
        let p = PiecewiseLinear::new(bp, sl, v)?;
        let lipschitz = Some(p.lipschitz());
        Ok(Activation {
            spec: ActivationSpec::named(name, params),
            kind: ActivationKind::PiecewiseLinear(p),
            lipschitz,
        })
    };
    let all = (f64::NEG_INFINITY, f64::INFINITY);
    let negative = (f64::NEG_INFINITY, 0.0);
    match name {
        "relu" => {
            no_params(name, args)?;
            pwl(vec![0.0], vec![0.0, 1.0], 0.0, &[])
        }
        "leaky_relu" => {
            let a = single_param(name, "a", 0.01, args)?;
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Domain(format!("leaky_relu needs a in (0, 1), got {a}")));
            }
            pwl(vec![0.0], vec![a, 1.0], 0.0, &[("a", a)])
        }
        "hard_tanh" => {
            no_params(name, args)?;
            pwl(vec![-1.0, 1.0], vec![0.0, 1.0, 0.0], -1.0, &[])
        }
        "sigmoid" => {
            no_params(name, args)?;
            smooth(SmoothKind::Sigmoid, all, 1.0, 0.125, Some(0.25), &[])
        }
        "tanh" => {
            no_params(name, args)?;
            smooth(SmoothKind::Tanh, all, 0.5, 2.0, Some(1.0), &[])
        }
        "isru" => {
            let a = positive(name, "a", single_param(name, "a", 1.0, args)?)?;
            smooth(SmoothKind::Isru(a), all, -1.0, 3.0 * a, Some(1.0), &[("a", a)])
        }
        "soft_clipping" => {
            let a = positive(name, "a", single_param(name, "a", 1.0, args)?)?;
            let bound = 2.0 * a * a * LOGISTIC_D2_MAX;
            smooth(SmoothKind::SoftClipping(a), all, 0.0, bound, Some((a / 4.0).tanh()), &[("a", a)])
        }
        "softplus" => {
            no_params(name, args)?;
            smooth(SmoothKind::Softplus, all, 0.0, LOGISTIC_D2_MAX, Some(1.0), &[])
        }
        "swish" => {
            no_params(name, args)?;
            smooth(SmoothKind::Swish, all, 1.0, SWISH_D3_BOUND, Some(SWISH_LIPSCHITZ), &[])
        }
        "repu" => {
            let k = single_param(name, "k", 2.0, args)?;
            if k.fract() != 0.0 || !(2.0..=16.0).contains(&k) {
                return Err(Error::Domain(format!("repu needs an integer k in [2, 16], got {k}")));
            }
            let ki = k as u32;
            let bound = k * (k - 1.0) * (k - 2.0) * 2f64.powi(ki as i32 - 3).max(1.0);
            smooth(SmoothKind::Repu(ki), (0.0, 2.0), 1.0, bound, None, &[("k", k)])
        }
        "elu" => {
            let a = positive(name, "a", single_param(name, "a", 1.0, args)?)?;
            smooth(SmoothKind::Elu(a), negative, -1.0, a, Some(a.max(1.0)), &[("a", a)])
        }
        "isrlu" => {
            let a = positive(name, "a", single_param(name, "a", 1.0, args)?)?;
            smooth(SmoothKind::Isrlu(a), negative, -1.0, 3.0 * a, Some(1.0), &[("a", a)])
        }
        "softsign" => {
            no_params(name, args)?;
            smooth(SmoothKind::Softsign, negative, -1.0, 6.0, Some(1.0), &[])
        }
        "sqnl" => {
            no_params(name, args)?;
            smooth(SmoothKind::Sqnl, (0.0, 2.0), 1.0, 0.0, Some(1.0), &[])
        }
        _ => Err(Error::Name(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spot_values() {
        assert_eq!(Activation::relu().evaluate(-1.0), 0.0);
        assert_eq!(catalog("sigmoid").unwrap().evaluate(0.0), 0.5);
        let leaky = catalog("leaky_relu(a=0.01)").unwrap();
        assert!((leaky.evaluate(-2.0) + 0.02).abs() < 1e-15);
    }

    #[test]
    fn catalog_classes() {
        let relu = Activation::relu();
        let p = relu.as_piecewise_linear().unwrap();
        assert_eq!(p.breakpoints(), &[0.0]);
        assert_eq!(p.slopes(), &[0.0, 1.0]);
        let sig = catalog("sigmoid").unwrap();
        let q = sig.as_locally_quadratic().unwrap();
        let t = q.expansion_point();
        assert!(q.d1(t) != 0.0 && q.d2(t) != 0.0);
        let ss = catalog("softsign").unwrap();
        let (a, b) = ss.as_locally_quadratic().unwrap().smooth_interval();
        assert!(b <= 0.0 || a >= 0.0);
    }

    #[test]
    fn name_errors() {
        assert!(matches!(catalog("gelu"), Err(Error::Name(_))));
        assert!(matches!(catalog("leaky_relu(a=1.5)"), Err(Error::Domain(_))));
        assert!(matches!(catalog("repu(k=2.5)"), Err(Error::Domain(_))));
        assert!(matches!(catalog("sigmoid(3)"), Err(Error::Domain(_))));
        assert!(matches!(catalog("elu(a=0.5"), Err(Error::Parse(_))));
        assert_eq!(catalog("leaky_relu(0.2)").unwrap(), catalog("leaky_relu(a=0.2)").unwrap());
    }

    #[test]
    fn every_smooth_entry_is_locally_quadratic() {
        for name in CATALOG {
            let act = catalog(name).unwrap();
            if let Some(q) = act.as_locally_quadratic() {
                let [_, d1, d2, _] = q.jet_at_t();
                assert!(d1 != 0.0 && d2 != 0.0, "{name}");
                let (a, b) = q.smooth_interval();
                assert!(a < q.expansion_point() && q.expansion_point() < b, "{name}");
                assert!(q.k0().is_finite() && q.k0() >= 0.0, "{name}");
            }
        }
    }

    fn closed_form(name: &str, x: f64) -> f64 {
        match name {
            "relu" => x.max(0.0),
            "leaky_relu" => {
                if x > 0.0 {
                    x
                } else {
                    0.01 * x
                }
            }
            "hard_tanh" => x.clamp(-1.0, 1.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn piecewise_linear_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for name in ["relu", "leaky_relu", "hard_tanh"] {
            let act = catalog(name).unwrap();
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(-10.0..10.0);
                assert!((act.evaluate(x) - closed_form(name, x)).abs() <= 1e-12, "{name} at {x}");
            }
        }
    }

    #[test]
    fn sampled_lipschitz_quotients_respect_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for name in CATALOG {
            let act = catalog(name).unwrap();
            let Some(c) = act.lipschitz_constant() else {
                assert_eq!(*name, "repu");
                continue;
            };
            for i in 0..20_000 {
                let x1: f64 = rng.gen_range(-100.0..100.0);
                // Mix of wide and close pairs; close pairs probe the steepest slope.
                let x2 = if i % 2 == 0 { rng.gen_range(-100.0..100.0) } else { x1 + rng.gen_range(-0.01..0.01) };
                if x1 == x2 {
                    continue;
                }
                let q = (act.evaluate(x1) - act.evaluate(x2)).abs() / (x1 - x2).abs();
                assert!(q <= c * (1.0 + 1e-9) + 1e-12, "{name}: {q} > {c}");
            }
        }
    }

    #[test]
    fn swish_lipschitz_is_the_slope_maximum() {
        let act = catalog("swish").unwrap();
        let q = act.as_locally_quadratic().unwrap();
        let best = (0..=400_000).map(|i| q.d1(i as f64 * 1e-5)).fold(f64::MIN, f64::max);
        let c = act.lipschitz_constant().unwrap();
        assert!(best <= c && c - best < 1e-9);
    }

    #[test]
    fn derivative_bounds_dominate_sampled_third_derivative() {
        for name in CATALOG {
            let act = catalog(name).unwrap();
            let Some(q) = act.as_locally_quadratic() else { continue };
            let (a, b) = q.smooth_interval();
            let lo = a.max(-50.0);
            let hi = b.min(50.0);
            for i in 1..20_000 {
                let x = lo + (hi - lo) * i as f64 / 20_000.0;
                assert!(q.d3(x).abs() <= q.derivative_bound() * (1.0 + 1e-9) + 1e-12, "{name} at {x}");
            }
        }
    }

    #[test]
    fn custom_oracle_with_wrong_derivative_is_rejected() {
        let bad = CustomSmooth {
            name: "bad".into(),
            value: Box::new(|x: f64| x.sin()),
            d1: Box::new(|x: f64| x.cos()),
            d2: Box::new(|x: f64| x.sin()),
            d3: Box::new(|x: f64| -x.cos()),
        };
        assert!(LocallyQuadratic::custom(bad, (-1.0, 1.0), 0.5, 1.0).is_err());
        let good = CustomSmooth {
            name: "sin".into(),
            value: Box::new(|x: f64| x.sin()),
            d1: Box::new(|x: f64| x.cos()),
            d2: Box::new(|x: f64| -x.sin()),
            d3: Box::new(|x: f64| -x.cos()),
        };
        assert!(LocallyQuadratic::custom(good, (-1.0, 1.0), 0.5, 1.0).is_ok());
    }

    #[test]
    fn spec_round_trip() {
        for name in CATALOG {
            let act = catalog(name).unwrap();
            let json = serde_json::to_string(act.spec()).unwrap();
            let back: ActivationSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(Activation::from_spec(&back).unwrap(), act);
        }
        let pwl = Activation::piecewise_linear(PiecewiseLinear::new(vec![-1.0, 2.0], vec![0.5, -1.0, 2.0], 3.0).unwrap());
        let back = Activation::from_spec(pwl.spec()).unwrap();
        assert_eq!(back.evaluate(5.0), pwl.evaluate(5.0));
    }

    proptest::proptest! {
        #[test]
        fn pwl_is_continuous_at_breakpoints(
            bps in proptest::collection::btree_set(-50i32..50, 1..5),
            slope_seed in proptest::collection::vec(-3.0f64..3.0, 6),
            v in -5.0f64..5.0,
        ) {
            let bp: Vec<f64> = bps.into_iter().map(|b| b as f64 / 4.0).collect();
            let mut slopes: Vec<f64> = slope_seed[..bp.len() + 1].to_vec();
            for k in 1..slopes.len() {
                if slopes[k] == slopes[k - 1] {
                    slopes[k] += 1.0;
                }
            }
            let p = PiecewiseLinear::new(bp.clone(), slopes, v).unwrap();
            for (k, &a) in bp.iter().enumerate() {
                let left = p.evaluate(a - 1e-9);
                let right = p.evaluate(a + 1e-9);
                proptest::prop_assert!((left - right).abs() < 1e-7);
                proptest::prop_assert!((p.evaluate(a) - p.value_at_breakpoint(k)).abs() < 1e-12);
            }
        }
    }
}
