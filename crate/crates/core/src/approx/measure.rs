//! Empirical sup-norm distances on `[0,1]^d` (or any box) by grid and random sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::surrogate::Surrogate;
use crate::corpus::HolderFunction;
use crate::network::{Evaluator, Network, Scratch};

/// Something evaluable at points of a box, possibly with per-thread state.
pub trait Field: Sync {
    type State: Send;
    fn dim(&self) -> usize;
    fn state(&self) -> Self::State;
    fn value(&self, x: &[f64], state: &mut Self::State) -> f64;
}

impl Field for HolderFunction {
    type State = ();
    fn dim(&self) -> usize {
        self.dim
    }
    fn state(&self) {}
    fn value(&self, x: &[f64], _: &mut ()) -> f64 {
        HolderFunction::value(self, x)
    }
}

impl Field for Surrogate {
    type State = ();
    fn dim(&self) -> usize {
        Surrogate::dim(self)
    }
    fn state(&self) {}
    fn value(&self, x: &[f64], _: &mut ()) -> f64 {
        self.eval(x)
    }
}

impl Field for Evaluator {
    type State = Scratch;
    fn dim(&self) -> usize {
        self.input_dim()
    }
    fn state(&self) -> Scratch {
        self.scratch()
    }
    fn value(&self, x: &[f64], s: &mut Scratch) -> f64 {
        self.eval_scalar(x, s)
    }
}

/// A plain function of `dim` variables.
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    type State = ();
    fn dim(&self) -> usize {
        self.dim
    }
    fn state(&self) {}
    fn value(&self, x: &[f64], _: &mut ()) -> f64 {
        (self.f)(x)
    }
}

/// Evaluation points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `n` equispaced points per coordinate, endpoints included.
    Grid(usize),
    /// `n` uniform points from a seeded generator.
    Random { n: usize, seed: u64 },
    /// Union of the two.
    Hybrid { per_dim: usize, n: usize, seed: u64 },
}

impl Scheme {
    /// 10⁵ points for `d = 1`, 512² for `d = 2`, 64³ plus 10⁵ random otherwise.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            0 | 1 => Scheme::Grid(100_000),
            2 => Scheme::Grid(512),
            _ => Scheme::Hybrid { per_dim: 64, n: 100_000, seed: 0 },
        }
    }

    pub fn len(&self, dim: usize) -> usize {
        match *self {
            Scheme::Grid(n) => n.pow(dim as u32),
            Scheme::Random { n, .. } => n,
            Scheme::Hybrid { per_dim, n, .. } => per_dim.pow(dim as u32) + n,
        }
    }

    pub fn is_empty(&self, dim: usize) -> bool {
        self.len(dim) == 0
    }
}

/// Axis-aligned box `Π [lo_j, hi_j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region(pub Vec<(f64, f64)>);

impl Region {
    pub fn unit(dim: usize) -> Self {
        Region(vec![(0.0, 1.0); dim])
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Region(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Materialized point cloud of a scheme over a box.
pub struct Points {
    dim: usize,
    grid: Option<(usize, usize)>,
    random: Vec<f64>,
    region: Region,
}

impl Points {
    pub fn new(scheme: Scheme, region: &Region) -> Self {
        let dim = region.dim();
        let (grid, random) = match scheme {
            Scheme::Grid(n) => (Some((n, n.pow(dim as u32))), (0, 0)),
            Scheme::Random { n, seed } => (None, (n, seed)),
            Scheme::Hybrid { per_dim, n, seed } => (Some((per_dim, per_dim.pow(dim as u32))), (n, seed)),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(random.1);
        let random = (0..random.0 * dim)
            .map(|i| {
                let (lo, hi) = region.0[i % dim];
                rng.gen_range(lo..=hi)
            })
            .collect();
        Self { dim, grid, random, region: region.clone() }
    }

    pub fn len(&self) -> usize {
        self.grid.map_or(0, |g| g.1) + self.random.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fill(&self, i: usize, x: &mut [f64]) {
        let grid_len = self.grid.map_or(0, |g| g.1);
        if i < grid_len {
            let n = self.grid.unwrap().0;
            let mut rest = i;
            for j in (0..self.dim).rev() {
                let (lo, hi) = self.region.0[j];
                let c = rest % n;
                rest /= n;
                x[j] = if n == 1 { lo } else { lo + (hi - lo) * c as f64 / (n - 1) as f64 };
            }
        } else {
            let k = i - grid_len;
            x.copy_from_slice(&self.random[k * self.dim..(k + 1) * self.dim]);
        }
    }

    /// Largest value of `g` over the cloud (NaN counts as `+∞`).
    pub fn max_of<S: Send>(&self, init: impl Fn() -> S + Sync + Send, g: impl Fn(&[f64], &mut S) -> f64 + Sync + Send) -> f64 {
        (0..self.len())
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || (init(), vec![0.0; self.dim]),
                |(s, x), i| {
                    self.fill(i, x);
                    let v = g(x, s);
                    if v.is_nan() {
                        f64::INFINITY
                    } else {
                        v
                    }
                },
            )
            .reduce(|| 0.0, f64::max)
    }
}

/// `max |a(x) − b(x)|` over the scheme's points in the unit cube.
pub fn sup_error<A: Field, B: Field>(a: &A, b: &B, scheme: Scheme) -> f64 {
    sup_error_on(a, b, scheme, &Region::unit(a.dim()))
}

/// `max |a(x) − b(x)|` over the scheme's points in `region`.
pub fn sup_error_on<A: Field, B: Field>(a: &A, b: &B, scheme: Scheme, region: &Region) -> f64 {
    assert_eq!(a.dim(), b.dim(), "fields must share the input dimension");
    let pts = Points::new(scheme, region);
    pts.max_of(|| (a.state(), b.state()), |x, (sa, sb)| (a.value(x, sa) - b.value(x, sb)).abs())
}

/// `max |a(x)|` over the scheme's points in `region`.
pub fn sup_abs_on<A: Field>(a: &A, scheme: Scheme, region: &Region) -> f64 {
    let pts = Points::new(scheme, region);
    pts.max_of(|| a.state(), |x, s| a.value(x, s).abs())
}

/// Largest absolute value of each network output over the scheme.
pub fn output_ranges(net: &Network, scheme: Scheme, region: &Region) -> Vec<f64> {
    let ev = net.evaluator();
    let pts = Points::new(scheme, region);
    let o = net.output_dim();
    (0..pts.len())
        .into_par_iter()
        .with_min_len(256)
        .fold(
            || (ev.scratch(), vec![0.0; pts.dim], vec![0.0f64; o]),
            |(mut s, mut x, mut acc), i| {
                pts.fill(i, &mut x);
                for (a, v) in acc.iter_mut().zip(ev.eval(&x, &mut s)) {
                    *a = a.max(if v.is_nan() { f64::INFINITY } else { v.abs() });
                }
                (s, x, acc)
            },
        )
        .map(|(_, _, acc)| acc)
        .reduce(|| vec![0.0; o], |a, b| a.iter().zip(&b).map(|(u, v)| u.max(*v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::surrogate::surrogate;
    use crate::corpus::corpus;

    #[test]
    fn self_distance_is_zero() {
        let f = corpus("sinprod_d2").unwrap();
        assert_eq!(sup_error(&f, &f, Scheme::Grid(64)), 0.0);
        assert_eq!(sup_error(&f, &f, Scheme::Random { n: 1000, seed: 1 }), 0.0);
    }

    #[test]
    fn constant_surrogate() {
        let f = corpus("const(2.5)").unwrap();
        let p = surrogate(&f, 4).unwrap();
        assert!(sup_error(&p, &f, Scheme::default_for(1)) <= 1e-12);
    }

    #[test]
    fn grid_and_random_agree_on_lipschitz_targets() {
        let f = corpus("abs_kink_d1").unwrap();
        let p = surrogate(&f, 7).unwrap();
        let g = sup_error(&p, &f, Scheme::Grid(100_001));
        let r = sup_error(&p, &f, Scheme::Random { n: 100_000, seed: 9 });
        assert!(g > 0.0 && r > 0.0);
        assert!(g / r < 2.0 && r / g < 2.0, "{g} vs {r}");
    }

    #[test]
    fn points_are_deterministic_and_in_range() {
        let region = Region::cube(2, -1.0, 1.0);
        let a = Points::new(Scheme::Hybrid { per_dim: 5, n: 10, seed: 4 }, &region);
        let b = Points::new(Scheme::Hybrid { per_dim: 5, n: 10, seed: 4 }, &region);
        assert_eq!(a.len(), 35);
        let (mut x, mut y) = (vec![0.0; 2], vec![0.0; 2]);
        for i in 0..a.len() {
            a.fill(i, &mut x);
            b.fill(i, &mut y);
            assert_eq!(x, y);
            assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
        a.fill(0, &mut x);
        assert_eq!(x, vec![-1.0, -1.0]);
        a.fill(24, &mut x);
        assert_eq!(x, vec![1.0, 1.0]);
    }
}
