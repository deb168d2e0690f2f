//! Linear elliptic problems on the grid: the discrete Laplacian, the divergence-form
//! operator `div_h(A D_h v)` and the non-divergence operator `A : H_d v`.
//!
//! Operators are assembled as per-interior-node stencils whose neighbours are global
//! node indices. Solving moves every boundary read to the right-hand side using the
//! Dirichlet data and hands the interior system to one of the [`sparse`](crate::sparse)
//! backends.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::{Grid, MeshFunction};
use crate::sparse::{self, BandedLu, CsrMatrix, SolveStats};
use crate::symmat::SymMat;

/// Backend used by [`linear_solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LinearMethod {
    /// CG for operators flagged symmetric, BiCGSTAB otherwise.
    #[default]
    Krylov,
    /// Forward Gauss-Seidel sweeps in row order.
    StationarySweep,
    /// Banded LU with partial pivoting.
    DirectBanded,
}

/// Stopping rule for a linear solve.
///
/// The solve succeeds once `max_x |Op u(x) - rhs(x)| <= tolerance * (1 + max_x |rhs(x)|)`
/// over interior nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSolveParams {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: LinearMethod,
}

impl Default for LinearSolveParams {
    fn default() -> Self {
        LinearSolveParams {
            tolerance: 1e-12,
            max_iterations: 20_000,
            method: LinearMethod::Krylov,
        }
    }
}

impl LinearSolveParams {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(
                "linear tolerance must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "linear max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Symmetric-matrix field indexed by node; `None` where no coefficient is defined.
#[derive(Clone, Debug)]
pub struct CoefficientField {
    grid: Grid,
    values: Vec<Option<SymMat>>,
}

impl CoefficientField {
    pub fn empty(grid: Grid) -> Self {
        CoefficientField {
            grid,
            values: vec![None; grid.node_count()],
        }
    }

    /// The same matrix on every node.
    pub fn constant(grid: Grid, a: SymMat) -> Self {
        CoefficientField {
            grid,
            values: vec![Some(a); grid.node_count()],
        }
    }

    /// Evaluates `f` on every interior node; boundary nodes stay undefined.
    pub fn from_interior<F: FnMut(usize) -> SymMat>(grid: Grid, mut f: F) -> Self {
        let mut field = Self::empty(grid);
        for node in grid.interior_nodes() {
            field.values[node] = Some(f(node));
        }
        field
    }

    /// Fills undefined boundary nodes with the value at the nearest interior node.
    pub fn extend_to_boundary(&mut self) {
        for node in self.grid.boundary_nodes() {
            if self.values[node].is_none() {
                self.values[node] = self.values[self.grid.nearest_interior(node)];
            }
        }
    }

    pub fn set(&mut self, node: usize, a: SymMat) {
        self.values[node] = Some(a);
    }

    pub fn get(&self, node: usize) -> Option<&SymMat> {
        self.values[node].as_ref()
    }

    fn require(&self, node: usize) -> Result<&SymMat> {
        self.get(node)
            .ok_or(Error::CoefficientFieldIncomplete { node })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Smallest eigenvalue over all defined entries.
    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.values
            .iter()
            .flatten()
            .map(|a| crate::hessian::eigenvalues_sym(a)[0])
            .reduce(f64::min)
    }
}

/// Linear stencil operator acting on interior nodes.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    grid: Grid,
    rows: Vec<usize>,
    row_ptr: Vec<usize>,
    nbrs: Vec<usize>,
    coeffs: Vec<f64>,
    symmetric: bool,
}

/// Accumulates unscaled stencil weights keyed by neighbour node.
struct StencilBuilder(BTreeMap<usize, f64>);

impl StencilBuilder {
    fn new() -> Self {
        StencilBuilder(BTreeMap::new())
    }

    fn add(&mut self, node: usize, w: f64) {
        *self.0.entry(node).or_insert(0.0) += w;
    }
}

impl LinearOperator {
    fn from_stencils<F>(grid: &Grid, symmetric: bool, mut stencil: F) -> Result<Self>
    where
        F: FnMut(usize, &mut StencilBuilder) -> Result<()>,
    {
        let mut rows = Vec::with_capacity(grid.interior_count());
        let mut row_ptr = vec![0];
        let mut nbrs = Vec::new();
        let mut coeffs = Vec::new();
        let scale = grid.inv_h2();
        for node in grid.interior_nodes() {
            let mut b = StencilBuilder::new();
            stencil(node, &mut b)?;
            for (nbr, w) in b.0 {
                if w != 0.0 {
                    nbrs.push(nbr);
                    coeffs.push(w * scale);
                }
            }
            rows.push(node);
            row_ptr.push(nbrs.len());
        }
        Ok(LinearOperator {
            grid: *grid,
            rows,
            row_ptr,
            nbrs,
            coeffs,
            symmetric,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Interior nodes in row order.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// `(neighbour node, coefficient)` pairs of the `row`-th interior node.
    pub fn stencil(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[row]..self.row_ptr[row + 1];
        self.nbrs[r.clone()]
            .iter()
            .copied()
            .zip(self.coeffs[r].iter().copied())
    }

    /// Coefficient with which the equation at interior node `x` reads node `y`.
    pub fn coefficient(&self, x: usize, y: usize) -> f64 {
        match self.rows.binary_search(&x) {
            Ok(row) => self
                .stencil(row)
                .find(|&(nb, _)| nb == y)
                .map_or(0.0, |(_, c)| c),
            Err(_) => 0.0,
        }
    }

    /// Value of the operator at the `row`-th interior node.
    pub fn apply_row(&self, u: &[f64], row: usize) -> f64 {
        self.stencil(row).map(|(nb, c)| c * u[nb]).sum()
    }

    /// Applies the operator; boundary entries of the result are zero.
    pub fn apply(&self, u: &MeshFunction) -> Result<MeshFunction> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = MeshFunction::zeros(self.grid);
        for (row, &node) in self.rows.iter().enumerate() {
            out.set(node, self.apply_row(u.values(), row));
        }
        Ok(out)
    }

    /// Max over interior nodes of `|Op u - rhs|`.
    pub fn residual_norm(&self, u: &MeshFunction, rhs: &MeshFunction) -> f64 {
        self.rows.iter().enumerate().fold(0.0, |m, (row, &node)| {
            m.max((self.apply_row(u.values(), row) - rhs.get(node)).abs())
        })
    }

    /// Interior system with boundary reads lifted into the right-hand side.
    fn interior_system(&self, rhs: &MeshFunction, start: &MeshFunction) -> (CsrMatrix, Vec<f64>) {
        let ordinal = self.grid.interior_ordinals();
        let mut b = Vec::with_capacity(self.rows.len());
        let mut mat_rows = Vec::with_capacity(self.rows.len());
        for (row, &node) in self.rows.iter().enumerate() {
            let mut bi = rhs.get(node);
            let mut entries = Vec::new();
            for (nb, c) in self.stencil(row) {
                match ordinal[nb] {
                    Some(col) => entries.push((col, c)),
                    None => bi -= c * start.get(nb),
                }
            }
            b.push(bi);
            mat_rows.push(entries);
        }
        (CsrMatrix::from_rows(mat_rows), b)
    }
}

/// Discrete Laplacian `Σ_i ∂⁺_i ∂⁻_i`.
pub fn laplacian(grid: &Grid) -> LinearOperator {
    let n = grid.dim();
    LinearOperator::from_stencils(grid, true, |node, b| {
        for i in 0..n {
            let s = grid.stride(i);
            b.add(node + s, 1.0);
            b.add(node, -2.0);
            b.add(node - s, 1.0);
        }
        Ok(())
    })
    .expect("Laplacian assembly cannot fail")
}

/// `v ↦ Σ_i ∂⁺_i ( Σ_j A_ij ∂⁻_j v )` at interior nodes.
///
/// Reads `A` at `x` and at `x + h e_i`, so the field must be defined on the interior and
/// on the boundary faces adjacent to it.
pub fn assemble_divergence_form(grid: &Grid, a: &CoefficientField) -> Result<LinearOperator> {
    if a.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let n = grid.dim();
    LinearOperator::from_stencils(grid, true, |x, b| {
        let ax = *a.require(x)?;
        for i in 0..n {
            let si = grid.stride(i);
            let xp = x + si;
            let axp = *a.require(xp)?;
            for j in 0..n {
                let sj = grid.stride(j);
                // A_ij(x + h e_i) ∂⁻_j v(x + h e_i)
                b.add(xp, axp.get(i, j));
                b.add(xp - sj, -axp.get(i, j));
                // - A_ij(x) ∂⁻_j v(x)
                b.add(x, -ax.get(i, j));
                b.add(x - sj, ax.get(i, j));
            }
        }
        Ok(())
    })
}

/// `v ↦ A(x) : H_d v(x)` at interior nodes.
pub fn assemble_nondivergence_form(grid: &Grid, a: &CoefficientField) -> Result<LinearOperator> {
    if a.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let n = grid.dim();
    let mut symmetric = true;
    let first = grid.interior_nodes().next().and_then(|x| a.get(x).copied());
    let op = LinearOperator::from_stencils(grid, false, |x, b| {
        let ax = *a.require(x)?;
        if Some(ax) != first {
            symmetric = false;
        }
        for i in 0..n {
            let si = grid.stride(i);
            let d = ax.get(i, i);
            b.add(x + si, d);
            b.add(x, -2.0 * d);
            b.add(x - si, d);
            for j in (i + 1)..n {
                let sj = grid.stride(j);
                // a_ij and a_ji both multiply the same cross stencil
                let w = 0.25 * (ax.get(i, j) + ax.get(j, i));
                b.add(x + si + sj, w);
                b.add(x - si - sj, w);
                b.add(x + si - sj, -w);
                b.add(x - si + sj, -w);
            }
        }
        Ok(())
    })?;
    // constant coefficients give a symmetric stencil
    Ok(LinearOperator { symmetric, ..op })
}

/// Solves `Op u = rhs` on the interior with `u = g` on the boundary.
pub fn linear_solve(
    op: &LinearOperator,
    rhs: &MeshFunction,
    g: &MeshFunction,
    params: &LinearSolveParams,
) -> Result<MeshFunction> {
    let mut start = g.clone();
    for &node in op.rows() {
        start.set(node, 0.0);
    }
    linear_solve_from(op, rhs, start, params).map(|(u, _)| u)
}

/// As [`linear_solve`], taking boundary data from `start` and using its interior values
/// as the initial iterate.
pub fn linear_solve_from(
    op: &LinearOperator,
    rhs: &MeshFunction,
    mut start: MeshFunction,
    params: &LinearSolveParams,
) -> Result<(MeshFunction, SolveStats)> {
    params.validate()?;
    if *rhs.grid() != op.grid || *start.grid() != op.grid {
        return Err(Error::GridMismatch);
    }
    let rhs_scale = op
        .rows()
        .iter()
        .fold(0.0f64, |m, &x| m.max(rhs.get(x).abs()));
    let tol = params.tolerance * (1.0 + rhs_scale);
    let (a, b) = op.interior_system(rhs, &start);
    let mut x: Vec<f64> = op.rows().iter().map(|&node| start.get(node)).collect();
    let stats = match params.method {
        LinearMethod::Krylov if op.is_symmetric() => {
            sparse::conjugate_gradient(&a, &b, &mut x, tol, params.max_iterations)?
        }
        LinearMethod::Krylov => sparse::bicgstab(&a, &b, &mut x, tol, params.max_iterations)?,
        LinearMethod::StationarySweep => {
            sparse::gauss_seidel(&a, &b, &mut x, tol, params.max_iterations)?
        }
        LinearMethod::DirectBanded => {
            let lu = BandedLu::factor(&a)?;
            x = lu.solve(&b);
            let mut residual = a.residual_norm(&x, &b);
            let mut iterations = 1;
            // iterative refinement
            while residual > tol && iterations < params.max_iterations.min(5) {
                let mut ax = vec![0.0; x.len()];
                a.mul_vec_into(&x, &mut ax);
                let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
                let d = lu.solve(&r);
                x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
                residual = a.residual_norm(&x, &b);
                iterations += 1;
            }
            if residual > tol {
                return Err(Error::LinearNotConverged {
                    iterations,
                    residual,
                });
            }
            SolveStats {
                iterations,
                residual,
            }
        }
    };
    for (&node, &v) in op.rows().iter().zip(&x) {
        if !v.is_finite() {
            return Err(Error::SolverBreakdown(format!(
                "non-finite value at node {node}"
            )));
        }
        start.set(node, v);
    }
    Ok((start, stats))
}

/// Solves `Δ_d u = rhs` on the interior with `u = g` on the boundary.
pub fn solve_poisson(
    grid: &Grid,
    rhs: &MeshFunction,
    g: &MeshFunction,
    params: &LinearSolveParams,
) -> Result<MeshFunction> {
    linear_solve(&laplacian(grid), rhs, g, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{discrete_laplacian, restrict};

    fn sq(x: &[f64]) -> f64 {
        x.iter().map(|t| t * t).sum()
    }

    #[test]
    fn poisson_reproduces_linear_data() {
        let g = Grid::new(3, 6).unwrap();
        let lin = restrict(|x| x[0], &g).unwrap();
        let u = solve_poisson(&g, &MeshFunction::zeros(g), &lin, &Default::default()).unwrap();
        assert!(u.max_diff(&lin) < 1e-12);
    }

    #[test]
    fn poisson_reproduces_quadratic() {
        let g = Grid::new(2, 10).unwrap();
        let q = restrict(sq, &g).unwrap();
        let rhs = MeshFunction::constant(g, 4.0);
        let u = solve_poisson(&g, &rhs, &q, &Default::default()).unwrap();
        assert!(u.max_diff(&q) < 1e-12);
    }

    #[test]
    fn single_unknown_by_hand() {
        let g = Grid::new(2, 2).unwrap();
        let u = solve_poisson(
            &g,
            &MeshFunction::constant(g, 1.0),
            &MeshFunction::zeros(g),
            &Default::default(),
        )
        .unwrap();
        assert!((u.get(4) + 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_stencil_matches_pointwise() {
        let g = Grid::new(3, 5).unwrap();
        let u = restrict(|x| (x[0] * 3.0).sin() + x[1] * x[2].powi(3), &g).unwrap();
        let op = laplacian(&g);
        let lu = op.apply(&u).unwrap();
        for node in g.interior_nodes() {
            let want = discrete_laplacian(&u, node).unwrap();
            assert!((lu.get(node) - want).abs() < 1e-10 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn divergence_identity_equals_laplacian() {
        let g = Grid::new(3, 5).unwrap();
        let div = assemble_divergence_form(&g, &CoefficientField::constant(g, SymMat::identity(3)))
            .unwrap();
        let lap = laplacian(&g);
        assert_eq!(div.rows(), lap.rows());
        for row in 0..lap.rows().len() {
            let a: Vec<_> = div.stencil(row).collect();
            let b: Vec<_> = lap.stencil(row).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn divergence_diagonal_constant() {
        let g = Grid::new(3, 6).unwrap();
        let d = [0.5, 2.0, 3.0];
        let op =
            assemble_divergence_form(&g, &CoefficientField::constant(g, SymMat::diag(&d))).unwrap();
        let out = op.apply(&restrict(sq, &g).unwrap()).unwrap();
        for node in g.interior_nodes() {
            assert!((out.get(node) - 11.0).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_cross_term() {
        // A_12 = A_21 = 1: both ∂⁺_1∂⁻_2 and ∂⁺_2∂⁻_1 of x1·x2 equal 1.
        let g = Grid::new(2, 6).unwrap();
        let a = SymMat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let op = assemble_divergence_form(&g, &CoefficientField::constant(g, a)).unwrap();
        let out = op.apply(&restrict(|x| x[0] * x[1], &g).unwrap()).unwrap();
        for node in g.interior_nodes() {
            assert!((out.get(node) - 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn divergence_requires_boundary_coefficients() {
        let g = Grid::new(2, 4).unwrap();
        let field = CoefficientField::from_interior(g, |_| SymMat::identity(2));
        let err = assemble_divergence_form(&g, &field).unwrap_err();
        assert!(matches!(err, Error::CoefficientFieldIncomplete { .. }));
        let mut field = field;
        field.extend_to_boundary();
        assert!(assemble_divergence_form(&g, &field).is_ok());
    }

    #[test]
    fn nondivergence_examples() {
        let g = Grid::new(3, 4).unwrap();
        let op =
            assemble_nondivergence_form(&g, &CoefficientField::constant(g, SymMat::identity(3)))
                .unwrap();
        let out = op.apply(&restrict(sq, &g).unwrap()).unwrap();
        for node in g.interior_nodes() {
            assert!((out.get(node) - 6.0).abs() < 1e-11);
        }
        let mut a = SymMat::zeros(3);
        a.set(0, 1, 1.0);
        let op = assemble_nondivergence_form(&g, &CoefficientField::constant(g, a)).unwrap();
        let out = op.apply(&restrict(|x| x[0] * x[1], &g).unwrap()).unwrap();
        for node in g.interior_nodes() {
            assert!((out.get(node) - 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn nondivergence_needs_interior_field() {
        let g = Grid::new(2, 4).unwrap();
        let err = assemble_nondivergence_form(&g, &CoefficientField::empty(g)).unwrap_err();
        assert!(matches!(err, Error::CoefficientFieldIncomplete { .. }));
    }

    #[test]
    fn forced_failure_with_one_iteration() {
        let g = Grid::new(2, 8).unwrap();
        let params = LinearSolveParams {
            max_iterations: 1,
            ..Default::default()
        };
        let err = solve_poisson(
            &g,
            &restrict(|x| (5.0 * x[0]).sin() + x[1], &g).unwrap(),
            &MeshFunction::zeros(g),
            &params,
        )
        .unwrap_err();
        match err {
            Error::LinearNotConverged { residual, .. } => assert!(residual > 0.0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let g = Grid::new(2, 4).unwrap();
        let z = MeshFunction::zeros(g);
        let p = LinearSolveParams {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            solve_poisson(&g, &z, &z, &p),
            Err(Error::InvalidConfig(_))
        ));
    }
}
