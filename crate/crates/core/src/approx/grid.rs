//! The uniform grid `{0, 1/M, …, 1}^d` and its product-hat partition of unity.

/// Grid `G_{d,M}` with points ordered lexicographically, last coordinate fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub dim: usize,
    pub resolution: usize,
}

impl Grid {
    pub fn new(dim: usize, resolution: usize) -> Self {
        assert!(resolution >= 1, "grid resolution must be positive");
        Self { dim, resolution }
    }

    pub fn len(&self) -> usize {
        (self.resolution + 1).pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integer coordinates of point `index`.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let n = self.resolution + 1;
        let mut c = vec![0; self.dim];
        for slot in c.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        c
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.coords(index).into_iter().map(|c| c as f64 / self.resolution as f64).collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * (self.resolution + 1) + c)
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Grid points whose basis function is nonzero at `x`, with the values.
    /// At most `2^d` entries.
    pub fn active(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let m = self.resolution as f64;
        let mut per_dim: Vec<Vec<(usize, f64)>> = Vec::with_capacity(self.dim);
        for &v in x {
            let s = (v.clamp(0.0, 1.0) * m).floor().min(m - 1.0) as usize;
            let mut opts = Vec::with_capacity(2);
            for c in [s, s + 1] {
                let w = hat(v, c as f64 / m, self.resolution);
                if w > 0.0 {
                    opts.push((c, w));
                }
            }
            per_dim.push(opts);
        }
        let mut out = vec![(0usize, 1.0f64)];
        for opts in per_dim {
            let mut next = Vec::with_capacity(out.len() * opts.len());
            for &(idx, w) in &out {
                for &(c, wc) in &opts {
                    next.push((idx * (self.resolution + 1) + c, w * wc));
                }
            }
            out = next;
        }
        out
    }
}

/// All points of `G_{d,M}`.
pub fn lattice(d: usize, m: usize) -> Vec<Vec<f64>> {
    Grid::new(d, m).points()
}

fn hat(x: f64, z: f64, m: usize) -> f64 {
    (1.0 - m as f64 * (x - z).abs()).max(0.0)
}

/// `φ_{z,M}(x) = Π_j (1 − M|x_j − z_j|)_+`.
pub fn local_basis(z: &[f64], m: usize, x: &[f64]) -> f64 {
    z.iter().zip(x).map(|(&zj, &xj)| hat(xj, zj, m)).product()
}
