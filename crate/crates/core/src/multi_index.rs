//! Multi-indices `m ∈ N_0^d` and the monomials `x^m`.

/// All multi-indices of dimension `d` with `|m| ≤ q`, ordered by total
/// degree and then lexicographically (largest first coordinate first).
pub fn up_to(d: usize, q: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=q {
        let mut cur = vec![0u32; d];
        fill(&mut cur, 0, total as u32, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, j: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    let d = cur.len();
    if d == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if j == d - 1 {
        cur[j] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[j] = k;
        fill(cur, j + 1, left - k, out);
    }
    cur[j] = 0;
}

/// Number of multi-indices with `|m| ≤ q`, i.e. `C(d+q, q)`.
pub fn count(d: usize, q: usize) -> usize {
    (1..=q).fold(1usize, |acc, k| acc * (d + k) / k)
}

pub fn order(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// `m! = Π m_j!`.
pub fn factorial(m: &[u32]) -> f64 {
    m.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
}

/// `x^m = Π x_j^{m_j}`.
pub fn power(x: &[f64], m: &[u32]) -> f64 {
    x.iter().zip(m).map(|(v, &k)| v.powi(k as i32)).product()
}

/// `Π C(big_j, small_j)`, zero unless `big ≥ small` componentwise.
pub fn binomial(big: &[u32], small: &[u32]) -> f64 {
    let mut acc = 1.0;
    for (&n, &k) in big.iter().zip(small) {
        if k > n {
            return 0.0;
        }
        for i in 0..k {
            acc *= f64::from(n - i) / f64::from(i + 1);
        }
    }
    acc
}
