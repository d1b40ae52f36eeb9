//! Invariant suites behind `holonet verify`, producing a deterministic text report.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{catalog, CATALOG};
use crate::approx::grid::{local_basis, Grid};
use crate::approx::measure::{sup_error, Scheme};
use crate::approx::surrogate::surrogate;
use crate::complexity::{covering_bound, lipschitz_propagation_check};
use crate::corpus::{check_derivatives, corpus, empirical_holder_norm, CORPUS};
use crate::error::{Error, Result};
use crate::gadgets::{log_depth, GadgetKit};
use crate::interval::unit_box;
use crate::lift::{lift, plan_lift, verify_lift};
use crate::network::{parallel_compose, random_network, stack_compose, Network, NetworkClassSpec, Passthrough};

pub const SUITES: &[&str] = &["activations", "network", "lift", "gadgets", "surrogate", "complexity", "corpus"];

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("holonet verify seed={}\n", self.seed);
        for c in &self.checks {
            let _ = writeln!(out, "{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail);
        }
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), self.failures());
        out
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.name, name: name.into(), passed, detail: detail.into() });
    }

    /// Records an error as a failed check instead of aborting the suite.
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        match f() {
            Ok((ok, detail)) => self.check(name, ok, detail),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run(suite: &str, seed: u64) -> Result<VerifyReport> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Name(suite.to_string()));
    };
    let mut checks = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
        checks.extend(match *name {
            "activations" => activations(s),
            "network" => network(s),
            "lift" => lift_suite(s),
            "gadgets" => gadgets(),
            "surrogate" => surrogate_suite(s),
            "complexity" => complexity(s),
            _ => corpus_suite(s),
        });
    }
    Ok(VerifyReport { seed, checks })
}

fn activations(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("activations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in CATALOG {
        s.run(name, || {
            let act = catalog(name)?;
            let mut worst: f64 = 0.0;
            if let Some(c) = act.lipschitz_constant() {
                for _ in 0..2000 {
                    let a = rng.gen_range(-100.0..100.0);
                    let b = a + rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-6..1));
                    if a != b {
                        worst = worst.max((act.evaluate(a) - act.evaluate(b)).abs() / ((a - b).abs() * c));
                    }
                }
            }
            let lq_ok = act.as_locally_quadratic().is_none_or(|q| {
                let [_, d1, d2, _] = q.jet_at_t();
                let (a, b) = q.smooth_interval();
                d1 != 0.0 && d2 != 0.0 && a < q.expansion_point() && q.expansion_point() < b
            });
            Ok((lq_ok && worst <= 1.0 + 1e-9, format!("lipschitz ratio {worst:.6}")))
        });
    }
    s.checks
}

fn network(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("network");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let act = catalog("tanh").unwrap();
    let a = random_network(&mut rng, &act, &[2, 4, 3, 1], 0.3, 1.0);
    let b = random_network(&mut rng, &act, &[2, 5, 2], 0.3, 1.0);
    let inner = random_network(&mut rng, &act, &[2, 3, 2], 0.3, 1.0);
    let xs: Vec<[f64; 2]> = (0..200).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
    s.run("stack_compose", || {
        let c = stack_compose(&b, &inner)?;
        let mut worst: f64 = 0.0;
        for x in &xs {
            let want = b.forward(&inner.forward(x)?)?;
            for (u, v) in c.forward(x)?.iter().zip(&want) {
                worst = worst.max((u - v).abs());
            }
        }
        Ok((worst <= 1e-12, format!("max diff {worst:.3e}")))
    });
    s.run("parallel_compose", || {
        let p = parallel_compose(&[a.clone(), b.clone()], Passthrough::Bounded { range: 4.0, knob: 1e3 })?;
        let mut worst: f64 = 0.0;
        for x in &xs {
            let mut want = a.forward(x)?;
            want.extend(b.forward(x)?);
            for (u, v) in p.net.forward(x)?.iter().zip(&want) {
                worst = worst.max((u - v).abs());
            }
        }
        let ok = worst <= p.passthrough_error + 1e-12;
        Ok((ok, format!("max diff {worst:.3e} within passthrough bound {:.3e}", p.passthrough_error)))
    });
    s.run("json_round_trip", || {
        let back = Network::from_json(&a.to_json()?)?;
        let same = xs.iter().all(|x| a.forward(x).ok() == back.forward(x).ok());
        Ok((same && back.metrics() == a.metrics(), format!("metrics {}", a.metrics())))
    });
    s.run("hidden_permutation", || {
        let mut perm: Vec<usize> = (0..4).collect();
        perm.reverse();
        let p = a.permute_hidden(1, &perm)?;
        let mut worst: f64 = 0.0;
        for x in &xs {
            worst = worst.max((p.forward(x)?[0] - a.forward(x)?[0]).abs());
        }
        Ok((worst <= 1e-12 && p.metrics() == a.metrics(), format!("max diff {worst:.3e}")))
    });
    s.checks
}

fn lift_suite(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("lift");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in ["leaky_relu(0.01)", "hard_tanh", "leaky_relu(0.5)"] {
        s.run(name, || {
            let act = catalog(name)?;
            let mut worst: f64 = 0.0;
            let mut metrics_ok = true;
            for t in 0..5 {
                let d = rng.gen_range(1..=3);
                let depth = rng.gen_range(1..=3);
                let mut dims = vec![d];
                dims.extend((0..depth).map(|_| rng.gen_range(1..=8)));
                dims.push(1);
                let src = random_network(&mut rng, &catalog("relu")?, &dims, 0.3, 1.0);
                let domain = unit_box(d);
                let lifted = lift(&src, &act, &plan_lift(&src, &act, &domain)?)?;
                worst = worst.max(verify_lift(&src, &lifted, &domain, 2000, seed + t, 1e-9)?);
                metrics_ok &= lifted.width() == 2 * src.width()
                    && lifted.depth() == src.depth()
                    && lifted.sparsity() <= 4 * src.sparsity() + 2 * src.depth() * src.width() + 1;
            }
            Ok((worst <= 1e-9 && metrics_ok, format!("max diff {worst:.3e}")))
        });
    }
    s.checks
}

fn gadgets() -> Vec<Check> {
    let mut s = Suite::new("gadgets");
    for name in ["sigmoid", "tanh"] {
        s.run(name, || {
            let kit = GadgetKit::new(&catalog(name)?)?;
            let k = 1e3;
            let sq = kit.square(k)?;
            let pr = kit.product(k, 1.0)?;
            let sqrt = kit.sqrt(k)?;
            let abs = kit.abs(k)?;
            let shapes = [
                (sq.depth(), sq.width()) == (1, 3),
                (pr.depth(), pr.width()) == (1, 9),
                sqrt.depth() == log_depth(k) && sqrt.width() <= 15,
                abs.depth() == log_depth(k) && abs.width() <= 15,
                sq.magnitude() <= k * k * (1.0 + 1e-12),
            ];
            let ev = sq.evaluator();
            let sq_target = crate::approx::measure::FnField { dim: 1, f: |x: &[f64]| x[0] * x[0] };
            let region = crate::approx::measure::Region::cube(1, -1.0, 1.0);
            let err = crate::approx::measure::sup_error_on(&ev, &sq_target, Scheme::Grid(4001), &region);
            let bound = kit.square_constant() / k;
            Ok((shapes.iter().all(|b| *b) && err <= bound, format!("square err {err:.3e} <= {bound:.3e}")))
        });
    }
    s.checks
}

fn surrogate_suite(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("surrogate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 1..=3 {
        let m = [7, 4, 3][d - 1];
        let grid = Grid::new(d, m);
        let pts = grid.points();
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let sum: f64 = pts.iter().map(|z| local_basis(z, m, &x)).sum();
            worst = worst.max((sum - 1.0).abs());
        }
        s.check(format!("partition_of_unity_d{d}"), worst <= 1e-12, format!("max deviation {worst:.3e}"));
    }
    for name in ["sin2pi_d1", "sinprod_d2", "gauss_bump_d2"] {
        s.run(name, || {
            let f = corpus(name)?;
            let p = surrogate(&f, 4)?;
            let mut taylor: f64 = 0.0;
            for patch in &p.patches {
                for _ in 0..10 {
                    let x: Vec<f64> = (0..f.dim).map(|_| rng.gen_range(0.0..1.0)).collect();
                    let a = patch.eval_shifted(&p.indices, &x);
                    let b = patch.eval_monomial(&p.indices, &x);
                    taylor = taylor.max((a - b).abs() / a.abs().max(1.0));
                }
            }
            let scheme = if f.dim == 1 { Scheme::Grid(20001) } else { Scheme::Grid(201) };
            let err = sup_error(&p, &f, scheme);
            let bound = p.error_bound(&f);
            Ok((taylor <= 1e-9 && err <= bound, format!("err {err:.4e} <= {bound:.4e}, taylor {taylor:.1e}")))
        });
    }
    s.checks
}

fn complexity(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("complexity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    s.run("covering_formula", || {
        let mut mismatches = 0;
        for _ in 0..200 {
            let (delta, l, n, sp, b, c) = (
                rng.gen_range(1e-4..1.0),
                rng.gen_range(1..6) as f64,
                rng.gen_range(1..100) as f64,
                rng.gen_range(0..1000) as f64,
                rng.gen_range(0.1..20.0),
                rng.gen_range(0.1..2.0),
            );
            let spec = NetworkClassSpec { depth: l, width: n, sparsity: sp, magnitude: b, input_dim: 1, output_dim: 1 };
            let v = covering_bound(delta, &spec, Some(c))?.value;
            let direct = 2.0 * l * (sp + 1.0) * ((1.0 / delta) * c * l * (n + 1.0) * b.max(1.0)).ln();
            if v != direct {
                mismatches += 1;
            }
        }
        Ok((mismatches == 0, format!("{mismatches} mismatches in 200 tuples")))
    });
    for name in ["sigmoid", "tanh", "leaky_relu(0.01)"] {
        s.run(&format!("propagation_{name}"), || {
            let net = random_network(&mut rng, &catalog(name)?, &[2, 4, 4, 1], 0.3, 1.0);
            let rep = lipschitz_propagation_check(&net, 1e-3, 20, 50, seed)?;
            Ok((rep.violations == 0, format!("max ratio {:.3e}", rep.max_ratio)))
        });
    }
    s.checks
}

fn corpus_suite(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("corpus");
    for name in CORPUS {
        s.run(name, || {
            let f = corpus(name)?;
            check_derivatives(&f, 50, seed)?;
            let n = empirical_holder_norm(&f, f.alpha, 500, seed)?;
            Ok((n <= f.radius * (1.0 + 1e-9), format!("norm {n:.4} <= R {:.4}", f.radius)))
        });
    }
    s.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run("nope", 1), Err(Error::Name(_))));
    }

    #[test]
    fn suites_pass_and_repeat() {
        let a = run("all", 3).unwrap();
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(a.to_text(), run("all", 3).unwrap().to_text());
    }
}
