//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use khessian::SymMat;
use rand::Rng;

/// Symmetric matrix with upper-triangle entries uniform in `[-1, 1]`.
pub fn random_sym<R: Rng>(rng: &mut R, n: usize) -> SymMat {
    let mut a = SymMat::zeros(n);
    for i in 0..n {
        for j in i..n {
            a.set(i, j, rng.gen_range(-1.0..=1.0));
        }
    }
    a
}

/// `B Bᵀ + 0.01 I`.
pub fn random_pd<R: Rng>(rng: &mut R, n: usize) -> SymMat {
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let mut a = SymMat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..n).map(|p| b[i][p] * b[j][p]).sum();
            a.set(i, j, s + if i == j { 0.01 } else { 0.0 });
        }
    }
    a
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Sum of all `k × k` principal minors, by subset enumeration.
pub fn principal_minor_sum(a: &SymMat, k: usize) -> f64 {
    let n = a.order();
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| {
            let idx: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
            let sub: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| a.get(i, j)).collect())
                .collect();
            det(&sub)
        })
        .sum()
}

/// Smallest eigenvalue by Jacobi rotations (independent of the closed forms).
pub fn min_eigenvalue_jacobi(a: &SymMat) -> f64 {
    let n = a.order();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (mrp, mrq) = (m[r][p], m[r][q]);
                    m[r][p] = c * mrp - s * mrq;
                    m[r][q] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let (mpr, mqr) = (m[p][r], m[q][r]);
                    m[p][r] = c * mpr - s * mqr;
                    m[q][r] = s * mpr + c * mqr;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}

/// `D²e^{x·x} = e^{x·x}(2I + 4 x xᵀ)`.
pub fn exp_r2_hessian(x: &[f64]) -> SymMat {
    let n = x.len();
    let e = x.iter().map(|t| t * t).sum::<f64>().exp();
    let mut h = SymMat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let d = if i == j { 2.0 } else { 0.0 };
            h.set(i, j, e * (d + 4.0 * x[i] * x[j]));
        }
    }
    h
}

/// `(Δ_d u)² + (f - S_2(H_d u)) / c(2,n)` at `node`, from raw values.
pub fn radicand(u: &khessian::MeshFunction, node: usize, f: f64) -> f64 {
    let h = khessian::discrete_hessian(u, node).unwrap();
    let n = h.order() as f64;
    let inv_c = 2.0 * n / (n - 1.0);
    h.trace().powi(2) + inv_c * (f - khessian::s_k(&h, 2))
}
