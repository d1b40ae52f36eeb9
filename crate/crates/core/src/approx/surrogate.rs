//! Piecewise Taylor surrogate `P_M(x) = Σ_z φ_{z,M}(x) Σ_{|m|≤q} β_{z,m} x^m`.

use rayon::prelude::*;

use super::grid::Grid;
use crate::corpus::HolderFunction;
use crate::error::Result;
use crate::multi_index::{self, binomial, factorial, power};

/// Taylor polynomial of `f` at one grid point, in both the shifted form and
/// the monomial basis.
#[derive(Clone, Debug)]
pub struct TaylorPatch {
    pub center: Vec<f64>,
    /// `∂^m f(z)/m!`, aligned with the surrogate's multi-index list.
    pub raw: Vec<f64>,
    /// `β_{z,m}`, coefficients of `x^m`.
    pub beta: Vec<f64>,
}

impl TaylorPatch {
    pub fn new(f: &HolderFunction, center: Vec<f64>, indices: &[Vec<u32>]) -> Result<Self> {
        let mut raw = Vec::with_capacity(indices.len());
        for m in indices {
            raw.push(f.derivative(m, &center)? / factorial(m));
        }
        let neg: Vec<f64> = center.iter().map(|v| -v).collect();
        let beta = indices
            .iter()
            .map(|m| {
                indices
                    .iter()
                    .zip(&raw)
                    .filter(|(big, _)| big.iter().zip(m).all(|(b, s)| b >= s))
                    .map(|(big, r)| {
                        let rest: Vec<u32> = big.iter().zip(m).map(|(b, s)| b - s).collect();
                        r * binomial(big, m) * power(&neg, &rest)
                    })
                    .sum()
            })
            .collect();
        Ok(Self { center, raw, beta })
    }

    /// `Σ ∂^m f(z)(x − z)^m / m!`.
    pub fn eval_shifted(&self, indices: &[Vec<u32>], x: &[f64]) -> f64 {
        let dx: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        indices.iter().zip(&self.raw).map(|(m, r)| r * power(&dx, m)).sum()
    }

    /// `Σ β_{z,m} x^m`.
    pub fn eval_monomial(&self, indices: &[Vec<u32>], x: &[f64]) -> f64 {
        indices.iter().zip(&self.beta).map(|(m, b)| b * power(x, m)).sum()
    }
}

/// The surrogate `P_M` of a target.
#[derive(Clone, Debug)]
pub struct Surrogate {
    pub grid: Grid,
    pub degree: usize,
    /// Multi-indices `|m| ≤ q`, in [`multi_index::up_to`] order.
    pub indices: Vec<Vec<u32>>,
    pub patches: Vec<TaylorPatch>,
}

impl Surrogate {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.grid
            .active(x)
            .into_iter()
            .map(|(i, w)| w * self.patches[i].eval_monomial(&self.indices, x))
            .sum()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn resolution(&self) -> usize {
        self.grid.resolution
    }

    /// `R·M^{−α}`.
    pub fn error_bound(&self, f: &HolderFunction) -> f64 {
        f.radius * (self.grid.resolution as f64).powf(-f.alpha)
    }
}

/// Builds `P_M` for `f` with Taylor degree `⌈α⌉ − 1`.
pub fn surrogate(f: &HolderFunction, resolution: usize) -> Result<Surrogate> {
    let grid = Grid::new(f.dim, resolution);
    let degree = f.taylor_degree();
    let indices = multi_index::up_to(f.dim, degree);
    let patches = (0..grid.len())
        .into_par_iter()
        .map(|i| TaylorPatch::new(f, grid.point(i), &indices))
        .collect::<Result<Vec<_>>>()?;
    Ok(Surrogate { grid, degree, indices, patches })
}
