//! Pointwise algebra of the k-Hessian operator for matrices of order 2 and 3.
//!
//! `S_k(A)` is the k-th elementary symmetric polynomial of the eigenvalues of `A`,
//! i.e. the sum of its k×k principal minors. Derivatives with respect to `a_ij`
//! treat `a_ij` and `a_ji` as independent entries, so that
//! `{S_k^ij(A)} : A = k S_k(A)` holds without symmetrization factors.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::symmat::SymMat;

/// Validated pair `(k, n)` with `1 <= k <= n <= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HessianOrder {
    k: usize,
    n: usize,
}

impl HessianOrder {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n || n > 3 {
            return Err(Error::InvalidOrder { k, n });
        }
        Ok(HessianOrder { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maclaurin constant `binom(n,k) / n^k`.
    pub fn c(&self) -> Ratio<u64> {
        Ratio::new(binomial(self.n, self.k), (self.n as u64).pow(self.k as u32))
    }

    pub fn c_f64(&self) -> f64 {
        ratio_to_f64(self.c())
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

pub(crate) fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `c(k,n) = binom(n,k)/n^k` as an exact ratio.
pub fn c_const(k: usize, n: usize) -> Result<Ratio<u64>> {
    Ok(HessianOrder::new(k, n)?.c())
}

/// `binom(n,k)`, the value of `S_k` at the identity.
pub fn binom(n: usize, k: usize) -> u64 {
    binomial(n, k)
}

/// Sum of all k×k principal minors of `a`.
pub fn s_k(a: &SymMat, k: usize) -> f64 {
    let n = a.order();
    assert!(k >= 1 && k <= n, "S_k needs 1 <= k <= n (k = {k}, n = {n})");
    match (k, n) {
        (1, _) => a.trace(),
        (2, 2) => minor2(a, 0, 1),
        (2, 3) => minor2(a, 0, 1) + minor2(a, 0, 2) + minor2(a, 1, 2),
        (3, 3) => det3(a),
        _ => unreachable!(),
    }
}

#[inline]
fn minor2(a: &SymMat, i: usize, j: usize) -> f64 {
    a.get(i, i) * a.get(j, j) - a.get(i, j) * a.get(j, i)
}

#[inline]
fn det3(a: &SymMat) -> f64 {
    a.get(0, 0) * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
        - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
        + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0))
}

/// Matrix `{∂S_k/∂a_ij}`.
pub fn s_k_gradient(a: &SymMat, k: usize) -> SymMat {
    let n = a.order();
    assert!(k >= 1 && k <= n, "S_k needs 1 <= k <= n (k = {k}, n = {n})");
    match k {
        1 => SymMat::identity(n),
        2 => {
            // S_2^ii = sum of the other diagonal entries, S_2^ij = -a_ji.
            let tr = a.trace();
            let mut g = SymMat::zeros(n);
            for i in 0..n {
                g.set(i, i, tr - a.get(i, i));
                for j in (i + 1)..n {
                    g.set(i, j, -a.get(j, i));
                }
            }
            g
        }
        3 => {
            // cofactor matrix
            let c = |i: usize, j: usize| {
                let (r0, r1) = others(i);
                let (c0, c1) = others(j);
                let m = a.get(r0, c0) * a.get(r1, c1) - a.get(r0, c1) * a.get(r1, c0);
                if (i + j).is_multiple_of(2) {
                    m
                } else {
                    -m
                }
            };
            let mut g = SymMat::zeros(3);
            for i in 0..3 {
                for j in i..3 {
                    g.set(i, j, c(i, j));
                }
            }
            g
        }
        _ => unreachable!(),
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Eigenvalues in ascending order, from closed-form roots of the characteristic
/// polynomial (quadratic formula for n = 2, trigonometric form for n = 3).
pub fn eigenvalues_sym(a: &SymMat) -> Vec<f64> {
    match a.order() {
        1 => vec![a.get(0, 0)],
        2 => {
            let (p, q, r) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
            let mean = 0.5 * (p + r);
            let rad = (0.5 * (p - r)).hypot(q);
            vec![mean - rad, mean + rad]
        }
        3 => eig3(a),
        _ => unreachable!(),
    }
}

fn eig3(a: &SymMat) -> Vec<f64> {
    let off = a.get(0, 1).powi(2) + a.get(0, 2).powi(2) + a.get(1, 2).powi(2);
    let mut ev = if off == 0.0 {
        vec![a.get(0, 0), a.get(1, 1), a.get(2, 2)]
    } else {
        let q = a.trace() / 3.0;
        let b = *a - SymMat::scaled_identity(3, q);
        let p2 = (0..3).map(|i| b.get(i, i).powi(2)).sum::<f64>() + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let r = (det3(&b.scale(1.0 / p)) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        vec![e3, 3.0 * q - e1 - e3, e1]
    };
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// True iff `S_j(A) > 0` for every `j = 1..=k`.
pub fn is_k_admissible(a: &SymMat, k: usize) -> bool {
    (1..=k).all(|j| s_k(a, j) > 0.0)
}

/// True iff `S_l(A) >= 0` for every `l = 1..=k`.
pub fn is_k_convex(a: &SymMat, k: usize) -> bool {
    (1..=k).all(|j| s_k(a, j) >= 0.0)
}

/// Elementary symmetric polynomial of degree `k` in `lambda`.
pub fn elementary_symmetric(lambda: &[f64], k: usize) -> f64 {
    // e_j recurrence over the variables
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in lambda {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e[k]
}
