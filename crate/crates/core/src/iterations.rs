//! Nonlinear iterations for the discrete k-Hessian system
//! `S_k(H_d u) = r_h(f)` on interior nodes, `u = r_h(g)` on the boundary.
//!
//! Every method terminates on the max-norm of the difference between successive
//! iterates (or sweeps). Residuals and the smallest discrete Laplacian are recorded for
//! every iterate so callers can audit convergence and subharmonicity.

use std::fmt;
use std::str::FromStr;

use crate::elliptic::{
    assemble_divergence_form, assemble_nondivergence_form, laplacian, linear_solve,
    linear_solve_from, CoefficientField, LinearOperator, LinearSolveParams,
};
use crate::error::{Error, Result};
use crate::grid::{hessian_at, Grid, MeshFunction};
use crate::hessian::{s_k, s_k_gradient, HessianOrder};
use crate::problems::Problem;

/// Max-norm above which an iterate is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e8;

/// How the starting iterate is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitRule {
    /// `Δ_d u⁰ = 2√f`; CLI tag `paper`.
    #[default]
    TwiceRoot,
    /// `Δ_d u⁰ = (f / c(k,n))^{1/k}`.
    Maclaurin,
}

impl FromStr for InitRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(InitRule::TwiceRoot),
            "maclaurin" => Ok(InitRule::Maclaurin),
            other => Err(Error::InvalidConfig(format!(
                "unknown initial-guess rule {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    /// Stop once `max |u^{m+1} - u^m| <= tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub linear: LinearSolveParams,
    /// Clamp negative radicands to zero instead of failing.
    pub clamp: bool,
    pub init: InitRule,
    /// Replaces `c(k,n)` in the fixed-point and Gauss-Seidel updates.
    pub c_override: Option<f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            tolerance: 1e-10,
            max_iterations: 10_000,
            linear: LinearSolveParams::default(),
            clamp: true,
            init: InitRule::TwiceRoot,
            c_override: None,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if let Some(c) = self.c_override {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidConfig("c override must be positive".into()));
            }
        }
        self.linear.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    BudgetExhausted,
    Diverged,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::BudgetExhausted => "budget-exhausted",
            Termination::Diverged => "diverged",
        })
    }
}

/// Per-step history of a nonlinear solve. Entry `m` describes the iterate produced by
/// step `m + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `max_x |f(x) - S_k(H_d u(x))|`.
    pub residual_history: Vec<f64>,
    /// `max_x |u^{m+1}(x) - u^m(x)|`.
    pub difference_history: Vec<f64>,
    /// `min_x Δ_d u(x)`; negative values are subharmonicity violations.
    pub min_laplacian_history: Vec<f64>,
    pub termination: Termination,
    /// Smallest eigenvalue of the assembled coefficient field, where one is assembled.
    pub min_coefficient_eigenvalue: Option<f64>,
    /// Total inner iterations, for nested methods.
    pub inner_iterations: Option<usize>,
}

impl SolveReport {
    fn new() -> Self {
        SolveReport {
            iterations: 0,
            residual_history: Vec::new(),
            difference_history: Vec::new(),
            min_laplacian_history: Vec::new(),
            termination: Termination::BudgetExhausted,
            min_coefficient_eigenvalue: None,
            inner_iterations: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }

    pub fn final_difference(&self) -> Option<f64> {
        self.difference_history.last().copied()
    }
}

/// A problem sampled on a grid: `r_h(f)` on the interior and `r_h(g)` on the boundary.
#[derive(Clone, Debug)]
pub struct DiscreteProblem {
    pub grid: Grid,
    pub order: HessianOrder,
    pub rhs: MeshFunction,
    pub boundary: MeshFunction,
}

impl DiscreteProblem {
    pub fn new(problem: &Problem, grid: &Grid) -> Result<Self> {
        Ok(DiscreteProblem {
            grid: *grid,
            order: problem.order,
            rhs: problem.sample_rhs(grid)?,
            boundary: problem.sample_boundary(grid)?,
        })
    }

    pub fn from_parts(
        order: HessianOrder,
        rhs: MeshFunction,
        boundary: MeshFunction,
    ) -> Result<Self> {
        let grid = *rhs.grid();
        if *boundary.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if order.n() != grid.dim() {
            return Err(Error::InvalidOrder {
                k: order.k(),
                n: grid.dim(),
            });
        }
        Ok(DiscreteProblem {
            grid,
            order,
            rhs,
            boundary,
        })
    }

    /// Max over interior nodes of `|S_k(H_d u) - f|`.
    pub fn residual(&self, u: &MeshFunction) -> f64 {
        self.diagnostics(u).0
    }

    /// `(residual, min Δ_d u)`.
    fn diagnostics(&self, u: &MeshFunction) -> (f64, f64) {
        let k = self.order.k();
        let mut res: f64 = 0.0;
        let mut min_lap = f64::INFINITY;
        for node in self.grid.interior_nodes() {
            let h = hessian_at(&self.grid, u.values(), node);
            res = res.max((s_k(&h, k) - self.rhs.get(node)).abs());
            min_lap = min_lap.min(h.trace());
        }
        (res, min_lap)
    }

    fn check_nonnegative_rhs(&self) -> Result<()> {
        for node in self.grid.interior_nodes() {
            let v = self.rhs.get(node);
            if v < 0.0 {
                return Err(Error::NegativeRhs { node, value: v });
            }
        }
        Ok(())
    }

    /// Copy of `u` with the Dirichlet data written on the boundary.
    fn with_boundary(&self, mut u: MeshFunction) -> MeshFunction {
        u.copy_boundary_from(&self.boundary);
        u
    }
}

/// Max over interior nodes of `|S_k(H_d u(x)) - f(x)|`.
pub fn residual(u: &MeshFunction, problem: &Problem) -> Result<f64> {
    Ok(DiscreteProblem::new(problem, u.grid())?.residual(u))
}

/// `1/c` where `c` is the Maclaurin constant or its override.
fn inverse_c(order: &HessianOrder, config: &IterationConfig) -> f64 {
    match config.c_override {
        Some(c) => 1.0 / c,
        None => {
            let c = order.c();
            *c.denom() as f64 / *c.numer() as f64
        }
    }
}

#[inline]
fn kth_root(x: f64, k: usize) -> f64 {
    match k {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / k as f64),
    }
}

/// Starting iterate: Poisson problem `Δ_d u⁰ = ρ(f)` with `u⁰ = g` on the boundary.
pub fn initial_guess(problem: &Problem, grid: &Grid, rule: InitRule) -> Result<MeshFunction> {
    let dp = DiscreteProblem::new(problem, grid)?;
    initial_guess_discrete(&dp, rule, &LinearSolveParams::default())
}

pub fn initial_guess_discrete(
    dp: &DiscreteProblem,
    rule: InitRule,
    params: &LinearSolveParams,
) -> Result<MeshFunction> {
    dp.check_nonnegative_rhs()?;
    let k = dp.order.k();
    let c = dp.order.c_f64();
    let mut rhs = MeshFunction::zeros(dp.grid);
    for node in dp.grid.interior_nodes() {
        let f = dp.rhs.get(node);
        rhs.set(
            node,
            match rule {
                InitRule::TwiceRoot => 2.0 * f.sqrt(),
                InitRule::Maclaurin => kth_root(f / c, k),
            },
        );
    }
    linear_solve(&laplacian(&dp.grid), &rhs, &dp.boundary, params)
}

/// Shared outer loop: applies `step` until successive iterates agree to the tolerance.
fn drive<S>(
    dp: &DiscreteProblem,
    mut u: MeshFunction,
    config: &IterationConfig,
    mut report: SolveReport,
    mut step: S,
) -> Result<(MeshFunction, SolveReport)>
where
    S: FnMut(&MeshFunction, usize) -> Result<MeshFunction>,
{
    while report.iterations < config.max_iterations {
        let next = step(&u, report.iterations)?;
        report.iterations += 1;
        if !next.is_finite() || next.max_abs() > DIVERGENCE_BOUND {
            report.difference_history.push(f64::INFINITY);
            report.residual_history.push(f64::INFINITY);
            report.min_laplacian_history.push(f64::NAN);
            report.termination = Termination::Diverged;
            return Ok((u, report));
        }
        let diff = next.max_diff(&u);
        let (res, min_lap) = dp.diagnostics(&next);
        report.difference_history.push(diff);
        report.residual_history.push(res);
        report.min_laplacian_history.push(min_lap);
        u = next;
        if diff <= config.tolerance {
            report.termination = Termination::Converged;
            return Ok((u, report));
        }
    }
    report.termination = Termination::BudgetExhausted;
    Ok((u, report))
}

/// Subharmonicity-preserving fixed point: each step solves
/// `Δ_d u^{m+1} = ((Δ_d u^m)^k + (f - S_k(H_d u^m)) / c(k,n))^{1/k}`.
pub fn fixed_point_solve(
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    fixed_point_from(&dp, u0, config)
}

/// Fixed-point iteration from a given starting iterate (its boundary is overwritten).
pub fn fixed_point_from(
    dp: &DiscreteProblem,
    start: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    dp.check_nonnegative_rhs()?;
    let grid = dp.grid;
    let k = dp.order.k();
    let inv_c = inverse_c(&dp.order, config);
    let lap = laplacian(&grid);
    let u = dp.with_boundary(start);
    let mut rhs = MeshFunction::zeros(grid);
    drive(dp, u, config, SolveReport::new(), |u, _| {
        for node in grid.interior_nodes() {
            let h = hessian_at(&grid, u.values(), node);
            let radicand = h.trace().powi(k as i32) + inv_c * (dp.rhs.get(node) - s_k(&h, k));
            let radicand = clamp_radicand(radicand, node, config.clamp)?;
            rhs.set(node, kth_root(radicand, k));
        }
        let (next, _) = linear_solve_from(&lap, &rhs, u.clone(), &config.linear)?;
        Ok(next)
    })
}

#[inline]
fn clamp_radicand(value: f64, node: usize, clamp: bool) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if clamp {
        Ok(0.0)
    } else {
        Err(Error::RadicandNegative { node, value })
    }
}

/// Frozen-coefficient linearization: each step solves
/// `div_h(A D_h u^{m+1}) = div_h(A D_h u^m) + f - S_k(H_d u^m)` with
/// `A = {S_k^ij(H_d u0)}`.
///
/// `A` is only defined on interior nodes; the divergence stencil also reads it on the
/// boundary layer, where the value at the nearest interior node is used.
pub fn linearized_cofactor_solve(
    problem: &Problem,
    grid: &Grid,
    u0: &MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    linearized_cofactor_from(&dp, u0.clone(), config)
}

pub fn linearized_cofactor_from(
    dp: &DiscreteProblem,
    u0: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    if *u0.grid() != dp.grid {
        return Err(Error::GridMismatch);
    }
    let grid = dp.grid;
    let k = dp.order.k();
    let u0 = dp.with_boundary(u0);
    let mut field = CoefficientField::from_interior(grid, |x| {
        s_k_gradient(&hessian_at(&grid, u0.values(), x), k)
    });
    let min_eig = field.min_eigenvalue();
    field.extend_to_boundary();
    let op = assemble_divergence_form(&grid, &field)?;
    let mut report = SolveReport::new();
    report.min_coefficient_eigenvalue = min_eig;
    let zero = MeshFunction::zeros(grid);
    drive(dp, u0, config, report, |u, _| {
        let correction = correction_rhs(dp, u);
        let delta = linear_solve(&op, &correction, &zero, &config.linear)
            .map_err(|e| Error::FrozenCoefficientNotElliptic(Box::new(e)))?;
        Ok(add(u, &delta))
    })
}

/// `f - S_k(H_d u)` on interior nodes.
fn correction_rhs(dp: &DiscreteProblem, u: &MeshFunction) -> MeshFunction {
    let k = dp.order.k();
    let mut out = MeshFunction::zeros(dp.grid);
    for node in dp.grid.interior_nodes() {
        let h = hessian_at(&dp.grid, u.values(), node);
        out.set(node, dp.rhs.get(node) - s_k(&h, k));
    }
    out
}

fn add(u: &MeshFunction, delta: &MeshFunction) -> MeshFunction {
    let mut out = u.clone();
    out.values_mut()
        .iter_mut()
        .zip(delta.values())
        .for_each(|(a, d)| *a += d);
    out
}

/// Newton's method: `{S_k^ij(H_d u^m)} : H_d(u^{m+1} - u^m) = f - S_k(H_d u^m)`.
pub fn newton_solve(
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    newton_from(&dp, u0, config)
}

pub fn newton_from(
    dp: &DiscreteProblem,
    start: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let grid = dp.grid;
    let k = dp.order.k();
    let zero = MeshFunction::zeros(grid);
    let u = dp.with_boundary(start);
    let mut min_eig = f64::INFINITY;
    let (u, mut report) = drive(dp, u, config, SolveReport::new(), |u, _| {
        let field = CoefficientField::from_interior(grid, |x| {
            s_k_gradient(&hessian_at(&grid, u.values(), x), k)
        });
        if let Some(e) = field.min_eigenvalue() {
            min_eig = min_eig.min(e);
        }
        let op: LinearOperator = assemble_nondivergence_form(&grid, &field)?;
        let correction = correction_rhs(dp, u);
        let delta = linear_solve(&op, &correction, &zero, &config.linear)
            .map_err(|e| Error::NewtonNotSolvable(Box::new(e)))?;
        Ok(add(u, &delta))
    })?;
    if min_eig.is_finite() {
        report.min_coefficient_eigenvalue = Some(min_eig);
    }
    Ok((u, report))
}

fn require_k2(dp: &DiscreteProblem, what: &str) -> Result<()> {
    if dp.order.k() != 2 {
        return Err(Error::UnsupportedMethod(format!("k = 2 for {what}")));
    }
    Ok(())
}

/// Nonlinear Gauss-Seidel for `k = 2`: sweeps interior nodes in row order, solving the
/// local equation for `u(x)` with the most recent neighbour values.
pub fn nonlinear_gs_solve(
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    nonlinear_gs_from(&dp, u0, config)
}

pub fn nonlinear_gs_from(
    dp: &DiscreteProblem,
    start: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    require_k2(dp, "nonlinear Gauss-Seidel")?;
    dp.check_nonnegative_rhs()?;
    let grid = dp.grid;
    let inv_c = inverse_c(&dp.order, config);
    let nodes: Vec<usize> = grid.interior_nodes().collect();
    let u = dp.with_boundary(start);
    drive(dp, u, config, SolveReport::new(), |u, _| {
        let mut next = u.clone();
        let v = next.values_mut();
        for &node in &nodes {
            let h = hessian_at(&grid, v, node);
            let radicand = h.trace().powi(2) + inv_c * (dp.rhs.get(node) - s_k(&h, 2));
            let radicand = clamp_radicand(radicand, node, config.clamp)?;
            v[node] = local_update(&grid, v, node, radicand.sqrt());
        }
        Ok(next)
    })
}

/// `u(x) = (h²/2n) [ Σ_i (u(x+he_i) + u(x-he_i)) / h² - root ]`.
#[inline]
fn local_update(grid: &Grid, v: &[f64], node: usize, root: f64) -> f64 {
    let n = grid.dim();
    let mut sum = 0.0;
    for i in 0..n {
        let s = grid.stride(i);
        sum += v[node + s] + v[node - s];
    }
    (sum - root / grid.inv_h2()) / (2 * n) as f64
}

/// Partial Gauss-Seidel for `k = 2`: the radicand is frozen at the previous sweep and only
/// the linear part sees updated values.
pub fn partial_gs_solve(
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    partial_gs_from(&dp, u0, config)
}

pub fn partial_gs_from(
    dp: &DiscreteProblem,
    start: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    require_k2(dp, "partial Gauss-Seidel")?;
    dp.check_nonnegative_rhs()?;
    let grid = dp.grid;
    let inv_c = inverse_c(&dp.order, config);
    let nodes: Vec<usize> = grid.interior_nodes().collect();
    let mut roots = vec![0.0; nodes.len()];
    let u = dp.with_boundary(start);
    drive(dp, u, config, SolveReport::new(), |u, _| {
        for (slot, &node) in roots.iter_mut().zip(&nodes) {
            let h = hessian_at(&grid, u.values(), node);
            let radicand = h.trace().powi(2) + inv_c * (dp.rhs.get(node) - s_k(&h, 2));
            *slot = clamp_radicand(radicand, node, config.clamp)?.sqrt();
        }
        let mut next = u.clone();
        let v = next.values_mut();
        for (&root, &node) in roots.iter().zip(&nodes) {
            v[node] = local_update(&grid, v, node, root);
        }
        Ok(next)
    })
}

/// Degenerate three-dimensional Monge-Ampère (`k = n = 3`) as a sequence of 2-Hessian
/// problems `S_2(H_d u^{m+1}) = 3((S_2/3)^{3/2} + f - det)^{2/3}`, with `S_2` and `det`
/// of `H_d u^m` both set to zero wherever `S_2 <= 0`. Each inner problem is solved by
/// the fixed-point iteration with `k = 2`.
pub fn degenerate_ma_solve(
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    degenerate_ma_from(&dp, u0, config)
}

pub fn degenerate_ma_from(
    dp: &DiscreteProblem,
    start: MeshFunction,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    if dp.order.k() != 3 || dp.order.n() != 3 {
        return Err(Error::UnsupportedMethod(
            "k = 3, n = 3 for the degenerate Monge-Ampère iteration".into(),
        ));
    }
    dp.check_nonnegative_rhs()?;
    let grid = dp.grid;
    let inner_order = HessianOrder::new(2, 3)?;
    let inner_config = IterationConfig {
        c_override: None,
        ..*config
    };
    let mut inner_total = 0;
    let u = dp.with_boundary(start);
    let (u, mut report) = drive(dp, u, config, SolveReport::new(), |u, outer| {
        let mut rhs2 = MeshFunction::zeros(grid);
        for node in grid.interior_nodes() {
            let h = hessian_at(&grid, u.values(), node);
            let (mut s2, mut det) = (s_k(&h, 2), s_k(&h, 3));
            if s2 <= 0.0 {
                s2 = 0.0;
                det = 0.0;
            }
            let radicand = (s2 / 3.0).powf(1.5) + dp.rhs.get(node) - det;
            let radicand = clamp_radicand(radicand, node, config.clamp)?;
            rhs2.set(node, 3.0 * radicand.powf(2.0 / 3.0));
        }
        let inner = DiscreteProblem {
            grid,
            order: inner_order,
            rhs: rhs2,
            boundary: dp.boundary.clone(),
        };
        let wrap = |e: Error| Error::InnerSolve {
            outer: outer + 1,
            source: Box::new(e),
        };
        let (next, inner_report) =
            fixed_point_from(&inner, u.clone(), &inner_config).map_err(wrap)?;
        inner_total += inner_report.iterations;
        match inner_report.termination {
            Termination::Converged => Ok(next),
            t => Err(wrap(Error::NotConverged(format!(
                "inner 2-Hessian solve {t}"
            )))),
        }
    })?;
    report.inner_iterations = Some(inner_total);
    Ok((u, report))
}

/// Iteration family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    FixedPoint,
    Broyden,
    Newton,
    GaussSeidel,
    PartialGs,
    DegenerateMa,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::FixedPoint,
        Method::Broyden,
        Method::Newton,
        Method::GaussSeidel,
        Method::PartialGs,
        Method::DegenerateMa,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed-point",
            Method::Broyden => "broyden",
            Method::Newton => "newton",
            Method::GaussSeidel => "gauss-seidel",
            Method::PartialGs => "partial-gs",
            Method::DegenerateMa => "degenerate-ma",
        }
    }

    /// Whether the method applies to order `(k, n)`.
    pub fn supports(&self, order: HessianOrder) -> bool {
        match self {
            Method::GaussSeidel | Method::PartialGs => order.k() == 2,
            Method::DegenerateMa => order.k() == 3 && order.n() == 3,
            _ => true,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Runs `method` from the configured initial guess.
pub fn solve(
    method: Method,
    problem: &Problem,
    grid: &Grid,
    config: &IterationConfig,
) -> Result<(MeshFunction, SolveReport)> {
    config.validate()?;
    if !method.supports(problem.order) {
        return Err(Error::UnsupportedMethod(format!(
            "a different order for {method} (problem has k = {}, n = {})",
            problem.k(),
            problem.n()
        )));
    }
    let dp = DiscreteProblem::new(problem, grid)?;
    let u0 = initial_guess_discrete(&dp, config.init, &config.linear)?;
    match method {
        Method::FixedPoint => fixed_point_from(&dp, u0, config),
        Method::Broyden => linearized_cofactor_from(&dp, u0, config),
        Method::Newton => newton_from(&dp, u0, config),
        Method::GaussSeidel => nonlinear_gs_from(&dp, u0, config),
        Method::PartialGs => partial_gs_from(&dp, u0, config),
        Method::DegenerateMa => degenerate_ma_from(&dp, u0, config),
    }
}
