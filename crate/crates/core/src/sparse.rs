//! Compressed-row matrices over the interior unknowns and the linear backends that
//! operate on them: Jacobi-preconditioned CG and BiCGSTAB, a Gauss-Seidel sweep, and
//! banded LU with partial pivoting.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Iteration count and final max-norm residual of a linear solve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists. Columns need not be sorted.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                debug_assert!(c < n);
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).find(|&(c, _)| c == i).map_or(0.0, |(_, v)| v))
            .collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        }
    }

    /// Max-norm of `b - A x`.
    pub fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.n];
        self.mul_vec_into(x, &mut ax);
        ax.iter()
            .zip(b)
            .fold(0.0, |m, (a, bi)| m.max((bi - a).abs()))
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut hi) = (0, 0);
        for i in 0..self.n {
            for (c, _) in self.row(i) {
                if c < i {
                    lo = lo.max(i - c);
                } else {
                    hi = hi.max(c - i);
                }
            }
        }
        (lo, hi)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn inverse_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    a.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            if d == 0.0 || !d.is_finite() {
                Err(Error::SolverBreakdown(format!("zero diagonal in row {i}")))
            } else {
                Ok(1.0 / d)
            }
        })
        .collect()
}

/// Jacobi-preconditioned conjugate gradients for definite (positive or negative)
/// symmetric systems. Stops when the true max-norm residual
/// is at most `tol`.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = a.dim();
    let dinv = inverse_diagonal(a)?;
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut iterations = 0;

    'restart: loop {
        a.mul_vec_into(x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let mut res = max_abs(&r);
        if res <= tol {
            return Ok(SolveStats {
                iterations,
                residual: res,
            });
        }
        for i in 0..n {
            z[i] = dinv[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            a.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            let alpha = rz / pap;
            // definite systems of either sign keep r·z and p·Ap of equal sign
            if alpha <= 0.0 || !alpha.is_finite() {
                return Err(Error::SolverBreakdown(format!(
                    "indefinite system in CG (p·Ap = {pap:e}, r·z = {rz:e})"
                )));
            }
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res = max_abs(&r);
            if res <= tol {
                // confirm against the true residual before accepting
                continue 'restart;
            }
            for i in 0..n {
                z[i] = dinv[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        return Err(Error::LinearNotConverged {
            iterations,
            residual: a.residual_norm(x, b),
        });
    }
}

/// Jacobi-preconditioned BiCGSTAB for nonsymmetric systems.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = a.dim();
    let dinv = inverse_diagonal(a)?;
    let mut r = vec![0.0; n];
    let mut r_hat = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut iterations = 0;
    let mut restarts = 0;

    'restart: loop {
        a.mul_vec_into(x, &mut v);
        for i in 0..n {
            r[i] = b[i] - v[i];
        }
        let res = max_abs(&r);
        if res <= tol {
            return Ok(SolveStats {
                iterations,
                residual: res,
            });
        }
        r_hat.copy_from_slice(&r);
        let mut rho = 1.0;
        let mut alpha = 1.0;
        let mut omega = 1.0;
        v.iter_mut().for_each(|e| *e = 0.0);
        p.iter_mut().for_each(|e| *e = 0.0);
        let r_hat_norm2 = dot(&r_hat, &r_hat);

        while iterations < max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() <= 1e-30 * r_hat_norm2 {
                // r has become orthogonal to the shadow residual
                restarts += 1;
                if restarts > 20 {
                    return Err(Error::SolverBreakdown("BiCGSTAB rho vanished".into()));
                }
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                p_hat[i] = dinv[i] * p[i];
            }
            a.mul_vec_into(&p_hat, &mut v);
            let rv = dot(&r_hat, &v);
            if rv == 0.0 || !rv.is_finite() {
                return Err(Error::SolverBreakdown("BiCGSTAB r̂·v vanished".into()));
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if max_abs(&s) <= tol {
                for i in 0..n {
                    x[i] += alpha * p_hat[i];
                }
                continue 'restart;
            }
            for i in 0..n {
                s_hat[i] = dinv[i] * s[i];
            }
            a.mul_vec_into(&s_hat, &mut t);
            let tt = dot(&t, &t);
            if tt == 0.0 || !tt.is_finite() {
                return Err(Error::SolverBreakdown("BiCGSTAB t vanished".into()));
            }
            omega = dot(&t, &s) / tt;
            if omega == 0.0 {
                return Err(Error::SolverBreakdown("BiCGSTAB omega vanished".into()));
            }
            for i in 0..n {
                x[i] += alpha * p_hat[i] + omega * s_hat[i];
                r[i] = s[i] - omega * t[i];
            }
            if !x.iter().all(|e| e.is_finite()) {
                return Err(Error::SolverBreakdown(
                    "BiCGSTAB produced non-finite iterate".into(),
                ));
            }
            if max_abs(&r) <= tol {
                continue 'restart;
            }
        }
        return Err(Error::LinearNotConverged {
            iterations,
            residual: a.residual_norm(x, b),
        });
    }
}

/// Forward Gauss-Seidel sweeps in row order.
pub fn gauss_seidel(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let dinv = inverse_diagonal(a)?;
    let mut iterations = 0;
    loop {
        let res = a.residual_norm(x, b);
        if res <= tol {
            return Ok(SolveStats {
                iterations,
                residual: res,
            });
        }
        if iterations >= max_iter {
            return Err(Error::LinearNotConverged {
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        for i in 0..a.dim() {
            let mut s = b[i];
            for (c, v) in a.row(i) {
                if c != i {
                    s -= v * x[c];
                }
            }
            x[i] = s * dinv[i];
        }
    }
}

/// LU factorization with partial pivoting in band storage.
pub struct BandedLu {
    n: usize,
    lower: usize,
    width: usize,
    // row i holds columns i - lower ..= i + lower + upper
    band: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let (lower, upper) = a.bandwidths();
        let width = 2 * lower + upper + 1;
        let mut band = vec![0.0; n * width];
        let at = |i: usize, j: usize| i * width + (j + lower - i);
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[at(i, j)] = v;
            }
        }
        let mut multipliers = vec![0.0; n * lower.max(1)];
        let mut pivots = vec![0; n];
        let scale = (0..n)
            .flat_map(|i| a.row(i).map(|(_, v)| v.abs()))
            .fold(0.0, f64::max);
        for k in 0..n {
            let last_row = (k + lower).min(n - 1);
            let mut piv = k;
            let mut best = band[at(k, k)].abs();
            for i in (k + 1)..=last_row {
                let v = band[at(i, k)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::SolverBreakdown(format!(
                    "singular pivot in column {k}"
                )));
            }
            pivots[k] = piv;
            let last_col = (k + lower + upper).min(n - 1);
            if piv != k {
                for j in k..=last_col {
                    band.swap(at(k, j), at(piv, j));
                }
            }
            let d = band[at(k, k)];
            for i in (k + 1)..=last_row {
                let l = band[at(i, k)] / d;
                multipliers[k * lower.max(1) + (i - k - 1)] = l;
                if l != 0.0 {
                    for j in k..=last_col {
                        band[at(i, j)] -= l * band[at(k, j)];
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            lower,
            width,
            band,
            multipliers,
            pivots,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, lower, width) = (self.n, self.lower, self.width);
        let at = |i: usize, j: usize| i * width + (j + lower - i);
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let last_row = (k + lower).min(n - 1);
            for i in (k + 1)..=last_row {
                y[i] -= self.multipliers[k * lower.max(1) + (i - k - 1)] * y[k];
            }
        }
        let upper_total = width - lower - 1;
        for k in (0..n).rev() {
            let last_col = (k + upper_total).min(n - 1);
            let mut s = y[k];
            for (j, yj) in y.iter().enumerate().take(last_col + 1).skip(k + 1) {
                s -= self.band[at(k, j)] * yj;
            }
            y[k] = s / self.band[at(k, k)];
        }
        y
    }
}
