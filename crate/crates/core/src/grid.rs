//! Uniform lattice on the closed unit cube and the second-order difference stencils.
//!
//! Nodes are numbered row-major over the multi-index `(i_1, ..., i_n)` with axis 1
//! fastest. The same order is used by every Gauss-Seidel sweep in the crate.

use crate::error::{Error, Result};
use crate::symmat::SymMat;

/// Uniform grid with `m` subdivisions per axis on `[0,1]^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    n: usize,
    m: usize,
    stride: [usize; 3],
}

impl Grid {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if m < 2 {
            return Err(Error::NoInteriorNodes(m));
        }
        let side = m + 1;
        let stride = [1, side, side * side];
        Ok(Grid { n, m, stride })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn subdivisions(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// `1/h^2`, computed exactly as `m^2`.
    #[inline]
    pub fn inv_h2(&self) -> f64 {
        (self.m * self.m) as f64
    }

    pub fn node_count(&self) -> usize {
        (self.m + 1).pow(self.n as u32)
    }

    pub fn interior_count(&self) -> usize {
        (self.m - 1).pow(self.n as u32)
    }

    pub fn boundary_count(&self) -> usize {
        self.node_count() - self.interior_count()
    }

    /// Flat-index offset of a unit step along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.stride[axis]
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let side = self.m + 1;
        let mut out = [0; 3];
        let mut rest = node;
        for slot in out.iter_mut().take(self.n) {
            *slot = rest % side;
            rest /= side;
        }
        out
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.n);
        multi
            .iter()
            .zip(self.stride.iter())
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Physical coordinates `i/m` of a node; unused trailing slots are zero.
    pub fn coords(&self, node: usize) -> [f64; 3] {
        let mi = self.multi_index(node);
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = mi[a] as f64 / self.m as f64;
        }
        x
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let mi = self.multi_index(node);
        mi[..self.n].iter().any(|&i| i == 0 || i == self.m)
    }

    pub fn is_interior(&self, node: usize) -> bool {
        node < self.node_count() && !self.is_boundary(node)
    }

    /// Interior nodes in sweep (row) order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&i| !self.is_boundary(i))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&i| self.is_boundary(i))
    }

    /// Maps every node to its position among interior nodes (`None` on the boundary).
    pub fn interior_ordinals(&self) -> Vec<Option<usize>> {
        let mut next = 0;
        (0..self.node_count())
            .map(|i| {
                if self.is_boundary(i) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    }

    /// Nearest interior node, obtained by clamping every index into `1..=m-1`.
    pub fn nearest_interior(&self, node: usize) -> usize {
        let mut mi = self.multi_index(node);
        for v in mi.iter_mut().take(self.n) {
            *v = (*v).clamp(1, self.m - 1);
        }
        self.index(&mi[..self.n])
    }
}

/// Real values on every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl MeshFunction {
    pub fn constant(grid: Grid, value: f64) -> Self {
        MeshFunction {
            grid,
            values: vec![value; grid.node_count()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { node });
        }
        Ok(MeshFunction { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    #[inline]
    pub fn set(&mut self, node: usize, v: f64) {
        self.values[node] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Max-norm distance to another mesh function on the same grid.
    pub fn max_diff(&self, other: &MeshFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "mesh functions on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Copies boundary values from `other`, leaving interior values untouched.
    pub fn copy_boundary_from(&mut self, other: &MeshFunction) {
        assert_eq!(self.grid, other.grid, "mesh functions on different grids");
        for node in self.grid.boundary_nodes() {
            self.values[node] = other.values[node];
        }
    }

    pub fn discrete_hessian(&self, node: usize) -> Result<SymMat> {
        discrete_hessian(self, node)
    }

    pub fn discrete_laplacian(&self, node: usize) -> Result<f64> {
        discrete_laplacian(self, node)
    }
}

/// Samples `v` at every node, boundary included.
pub fn restrict<F>(v: F, grid: &Grid) -> Result<MeshFunction>
where
    F: Fn(&[f64]) -> f64,
{
    let n = grid.dim();
    let mut values = Vec::with_capacity(grid.node_count());
    for node in 0..grid.node_count() {
        let x = grid.coords(node);
        let y = v(&x[..n]);
        if !y.is_finite() {
            return Err(Error::NonFiniteSample { node });
        }
        values.push(y);
    }
    Ok(MeshFunction {
        grid: *grid,
        values,
    })
}

/// Discrete Hessian at an interior node: 3-point second differences on the diagonal,
/// the centered 4-point cross stencil off the diagonal.
pub fn discrete_hessian(u: &MeshFunction, node: usize) -> Result<SymMat> {
    if !u.grid.is_interior(node) {
        return Err(Error::StencilLeavesGrid { node });
    }
    Ok(hessian_at(&u.grid, &u.values, node))
}

/// `Σ_i ∂⁺_i ∂⁻_i u` at an interior node; bit-identical to the trace of [`discrete_hessian`].
pub fn discrete_laplacian(u: &MeshFunction, node: usize) -> Result<f64> {
    if !u.grid.is_interior(node) {
        return Err(Error::StencilLeavesGrid { node });
    }
    Ok(laplacian_at(&u.grid, &u.values, node))
}

#[inline]
pub(crate) fn second_difference(grid: &Grid, v: &[f64], node: usize, axis: usize) -> f64 {
    let s = grid.stride(axis);
    (v[node + s] - 2.0 * v[node] + v[node - s]) * grid.inv_h2()
}

#[inline]
pub(crate) fn cross_difference(grid: &Grid, v: &[f64], node: usize, i: usize, j: usize) -> f64 {
    let (si, sj) = (grid.stride(i), grid.stride(j));
    (v[node + si + sj] + v[node - si - sj] - v[node + si - sj] - v[node - si + sj])
        * (0.25 * grid.inv_h2())
}

/// Unchecked Hessian stencil; `node` must be interior.
#[inline]
pub(crate) fn hessian_at(grid: &Grid, v: &[f64], node: usize) -> SymMat {
    let n = grid.dim();
    let mut a = SymMat::zeros(n);
    for i in 0..n {
        a.set(i, i, second_difference(grid, v, node, i));
        for j in (i + 1)..n {
            a.set(i, j, cross_difference(grid, v, node, i, j));
        }
    }
    a
}

/// Unchecked Laplacian stencil; sums the diagonal in the same order as `SymMat::trace`.
#[inline]
pub(crate) fn laplacian_at(grid: &Grid, v: &[f64], node: usize) -> f64 {
    (0..grid.dim())
        .map(|i| second_difference(grid, v, node, i))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let g = Grid::new(2, 2).unwrap();
        assert_eq!((g.node_count(), g.interior_count()), (9, 1));
        let g = Grid::new(3, 4).unwrap();
        assert_eq!((g.node_count(), g.interior_count()), (125, 27));
        assert_eq!(g.boundary_count(), 98);
        assert_eq!(g.interior_nodes().count(), 27);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(matches!(Grid::new(3, 1), Err(Error::NoInteriorNodes(1))));
        assert!(matches!(
            Grid::new(4, 8),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(matches!(
            Grid::new(1, 8),
            Err(Error::UnsupportedDimension(1))
        ));
    }

    #[test]
    fn boundary_iff_some_index_extreme() {
        let g = Grid::new(3, 5).unwrap();
        for node in 0..g.node_count() {
            let mi = g.multi_index(node);
            let expect = mi.iter().any(|&i| i == 0 || i == 5);
            assert_eq!(g.is_boundary(node), expect);
            assert_eq!(g.index(&mi), node);
        }
    }

    #[test]
    fn axis_one_is_fastest() {
        let g = Grid::new(2, 4).unwrap();
        assert_eq!(g.coords(1), [0.25, 0.0, 0.0]);
        assert_eq!(g.coords(5), [0.0, 0.25, 0.0]);
    }

    #[test]
    fn h_times_m_is_one() {
        for m in [2usize, 3, 4, 5, 7, 8, 10, 16, 32, 64, 128] {
            let g = Grid::new(2, m).unwrap();
            assert_eq!(g.h() * m as f64, 1.0, "m = {m}");
        }
    }

    #[test]
    fn restrict_samples_every_node() {
        let g = Grid::new(2, 2).unwrap();
        let ones = restrict(|_| 1.0, &g).unwrap();
        assert!(ones.values().iter().all(|&v| v == 1.0));
        let lin = restrict(|x| x[0], &g).unwrap();
        assert_eq!(lin.get(g.index(&[1, 1])), 0.5);

        let g3 = Grid::new(3, 2).unwrap();
        let u = restrict(|x| (x.iter().map(|t| t * t).sum::<f64>()).exp(), &g3).unwrap();
        let centre = u.get(g3.index(&[1, 1, 1]));
        assert!((centre - 0.75f64.exp()).abs() < 1e-15);
        assert!((centre - 2.117000).abs() < 1e-6);
    }

    #[test]
    fn restrict_rejects_non_finite() {
        let g = Grid::new(2, 4).unwrap();
        let err = restrict(|x| 1.0 / x[0], &g).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { node: 0 }));
    }

    #[test]
    fn hessian_exact_for_quadratics() {
        let g = Grid::new(3, 6).unwrap();
        let u = restrict(|x| x.iter().map(|t| t * t).sum(), &g).unwrap();
        for node in g.interior_nodes() {
            let hess = u.discrete_hessian(node).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((hess.get(i, j) - want).abs() < 1e-10);
                }
            }
            assert!((u.discrete_laplacian(node).unwrap() - 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hessian_of_bilinear() {
        let g = Grid::new(3, 4).unwrap();
        let u = restrict(|x| x[0] * x[1], &g).unwrap();
        for node in g.interior_nodes() {
            let hess = u.discrete_hessian(node).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if (i, j) == (0, 1) || (i, j) == (1, 0) {
                        1.0
                    } else {
                        0.0
                    };
                    assert!((hess.get(i, j) - want).abs() < 1e-12, "{i}{j}: {hess:?}");
                }
            }
        }
    }

    #[test]
    fn cubic_diagonal_exact() {
        let g = Grid::new(2, 4).unwrap();
        let u = restrict(|x| x[0].powi(3), &g).unwrap();
        let node = g.index(&[2, 1]);
        assert_eq!(u.discrete_hessian(node).unwrap().get(0, 0), 3.0);
        assert_eq!(u.discrete_laplacian(node).unwrap(), 3.0);
    }

    #[test]
    fn saddle_is_discrete_harmonic() {
        let g = Grid::new(2, 8).unwrap();
        let u = restrict(|x| x[0] * x[0] - x[1] * x[1], &g).unwrap();
        for node in g.interior_nodes() {
            assert!(u.discrete_laplacian(node).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_node_stencil_error() {
        let g = Grid::new(2, 4).unwrap();
        let u = MeshFunction::zeros(g);
        assert!(matches!(
            u.discrete_hessian(0),
            Err(Error::StencilLeavesGrid { node: 0 })
        ));
        assert!(u.discrete_laplacian(3).is_err());
    }

    #[test]
    fn nearest_interior_clamps() {
        let g = Grid::new(3, 4).unwrap();
        assert_eq!(g.nearest_interior(g.index(&[0, 4, 2])), g.index(&[1, 3, 2]));
        let n = g.index(&[2, 2, 2]);
        assert_eq!(g.nearest_interior(n), n);
    }
}
