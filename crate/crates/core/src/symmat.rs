//! Small dense symmetric matrices (order 2 or 3).

use std::fmt;
use std::ops::{Add, Mul, Sub};

/// Maximum supported order.
pub const MAX_ORDER: usize = 3;

/// Dense symmetric matrix of order `n <= 3`.
///
/// Entries are stored in full but every write is mirrored, so `a[i][j] == a[j][i]`
/// holds bit-for-bit at all times.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMat {
    n: usize,
    a: [[f64; MAX_ORDER]; MAX_ORDER],
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_ORDER).contains(&n), "SymMat order must be 1..=3");
        SymMat {
            n,
            a: [[0.0; MAX_ORDER]; MAX_ORDER],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = s;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i][i] = v;
        }
        m
    }

    /// Builds from the upper triangle of `rows`; the lower triangle is ignored.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate().skip(i) {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.a[i][j]
    }

    /// Writes `a_ij` and `a_ji`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.a[i][j] = v;
        self.a[j][i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Frobenius inner product `A : B`.
    pub fn contract(&self, other: &SymMat) -> f64 {
        assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j] * other.a[i][j];
            }
        }
        s
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.contract(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s = s.max(self.a[i][j].abs());
            }
        }
        s
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] *= s;
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> [f64; MAX_ORDER] {
        let mut out = [0.0; MAX_ORDER];
        for (o, row) in out.iter_mut().zip(&self.a).take(self.n) {
            *o = row[..self.n].iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.a[i][j].is_finite()))
    }
}

impl Add for SymMat {
    type Output = SymMat;
    fn add(self, rhs: SymMat) -> SymMat {
        assert_eq!(self.n, rhs.n);
        let mut m = self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] += rhs.a[i][j];
            }
        }
        m
    }
}

impl Sub for SymMat {
    type Output = SymMat;
    fn sub(self, rhs: SymMat) -> SymMat {
        self + rhs.scale(-1.0)
    }
}

impl Mul<f64> for SymMat {
    type Output = SymMat;
    fn mul(self, s: f64) -> SymMat {
        self.scale(s)
    }
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.n).map(|i| &self.a[i][..self.n]).collect();
        f.debug_tuple("SymMat").field(&rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_are_mirrored() {
        let mut a = SymMat::zeros(3);
        a.set(0, 2, 4.5);
        assert_eq!(a.get(2, 0), 4.5);
        let b = SymMat::from_rows(&[&[1.0, 2.0], &[99.0, 3.0]]);
        assert_eq!(b.get(1, 0), 2.0);
    }

    #[test]
    fn contraction_with_identity_is_trace() {
        let a = SymMat::from_rows(&[&[1.0, 2.0, 3.0], &[0.0, 4.0, 5.0], &[0.0, 0.0, 6.0]]);
        assert_eq!(a.contract(&SymMat::identity(3)), a.trace());
    }
}
