//! Dense solvers for small nonnegative matrices (row-major, `n × n`).

use crate::error::{Error, Result};

/// Convergence threshold on successive normalized iterates (∞-norm).
pub const POWER_TOLERANCE: f64 = 1e-13;
/// Iteration budget for the Perron solver.
pub const POWER_BUDGET: usize = 1_000_000;

/// Solves `x P = x`, `Σ x = 1` by Gaussian elimination with partial
/// pivoting. Returns `None` when the system is singular, i.e. the chain does
/// not have a unique stationary distribution.
pub fn solve_stationary(p: &[f64], n: usize) -> Option<Vec<f64>> {
    // Rows of (Pᵀ - I), last row replaced by the normalization constraint.
    let mut a = vec![0.0; n * (n + 1)];
    let w = n + 1;
    for i in 0..n {
        for j in 0..n {
            a[i * w + j] = p[j * n + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * w + j] = 1.0;
    }
    a[(n - 1) * w + n] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))
            .expect("nonempty range");
        if a[pivot * w + col].abs() < 1e-13 {
            return None;
        }
        if pivot != col {
            for j in 0..w {
                a.swap(pivot * w + j, col * w + j);
            }
        }
        let d = a[col * w + col];
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * w + col] / d;
            if f != 0.0 {
                for j in col..w {
                    a[row * w + j] -= f * a[col * w + j];
                }
            }
        }
    }
    let mut x: Vec<f64> = (0..n)
        .map(|i| (a[i * w + n] / a[i * w + i]).max(0.0))
        .collect();
    let total: f64 = x.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= total);
    Some(x)
}

/// `‖x P − x‖∞`.
pub fn stationary_residual(p: &[f64], n: usize, x: &[f64]) -> f64 {
    (0..n)
        .map(|j| ((0..n).map(|i| x[i] * p[i * n + j]).sum::<f64>() - x[j]).abs())
        .fold(0.0, f64::max)
}

/// Perron eigenvalue with positive right (`M r = θ r`) and left
/// (`l M = θ l`) eigenvectors, each scaled to unit ∞-norm.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub theta: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration on `M + I`, which is primitive whenever `M` is
/// irreducible, so periodic matrices converge too. The caller checks
/// irreducibility.
pub fn perron(m: &[f64], n: usize) -> Result<PerronPair> {
    let (right, it_r) = power_iterate(n, |v, out| {
        for i in 0..n {
            out[i] = v[i] + (0..n).map(|j| m[i * n + j] * v[j]).sum::<f64>();
        }
    })?;
    let (left, it_l) = power_iterate(n, |v, out| {
        for j in 0..n {
            out[j] = v[j] + (0..n).map(|i| v[i] * m[i * n + j]).sum::<f64>();
        }
    })?;
    // Rayleigh quotient rᵀ M r / rᵀ r.
    let num: f64 = (0..n)
        .map(|i| right[i] * (0..n).map(|j| m[i * n + j] * right[j]).sum::<f64>())
        .sum();
    let den: f64 = right.iter().map(|x| x * x).sum();
    Ok(PerronPair {
        theta: num / den,
        right,
        left,
        iterations: it_r.max(it_l),
    })
}

fn power_iterate<F>(n: usize, apply: F) -> Result<(Vec<f64>, usize)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut v = vec![1.0; n];
    let mut next = vec![0.0; n];
    for it in 1..=POWER_BUDGET {
        apply(&v, &mut next);
        let norm = next.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NonConvergence { iterations: it });
        }
        let mut diff = 0.0_f64;
        for i in 0..n {
            next[i] /= norm;
            diff = diff.max((next[i] - v[i]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if diff < POWER_TOLERANCE {
            return Ok((v, it));
        }
    }
    Err(Error::NonConvergence {
        iterations: POWER_BUDGET,
    })
}

/// Period of an irreducible graph: gcd of `level(u) + 1 − level(v)` over
/// edges, with BFS levels from vertex 0.
pub fn period(adjacency: &[Vec<usize>]) -> usize {
    let n = adjacency.len();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for (u, succ) in adjacency.iter().enumerate() {
        for &v in succ {
            let d = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
            g = gcd(g, d);
        }
    }
    g
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
