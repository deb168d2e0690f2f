//! Catalog of Dirichlet problems `S_k(D²u) = f` in `(0,1)^n`, `u = g` on the boundary.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{restrict, Grid, MeshFunction};
use crate::hessian::{binom, HessianOrder};

/// Scalar field on `[0,1]^n`.
pub type Field = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Problem {
    pub label: String,
    pub order: HessianOrder,
    pub f: Field,
    pub g: Field,
    pub exact: Option<Field>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("label", &self.label)
            .field("k", &self.order.k())
            .field("n", &self.order.n())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

fn r2(x: &[f64]) -> f64 {
    x.iter().map(|t| t * t).sum()
}

impl Problem {
    pub fn new(label: impl Into<String>, k: usize, n: usize, f: Field, g: Field) -> Result<Self> {
        Ok(Problem {
            label: label.into(),
            order: HessianOrder::new(k, n)?,
            f,
            g,
            exact: None,
        })
    }

    pub fn with_exact(mut self, exact: Field) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn k(&self) -> usize {
        self.order.k()
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    /// `r_h(f)` on interior nodes; boundary entries are zero and never read.
    pub fn sample_rhs(&self, grid: &Grid) -> Result<MeshFunction> {
        self.check_grid(grid)?;
        let mut out = MeshFunction::zeros(*grid);
        for node in grid.interior_nodes() {
            let x = grid.coords(node);
            let v = (self.f)(&x[..grid.dim()]);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { node });
            }
            out.set(node, v);
        }
        Ok(out)
    }

    /// `r_h(g)` on boundary nodes; interior entries are zero.
    pub fn sample_boundary(&self, grid: &Grid) -> Result<MeshFunction> {
        self.check_grid(grid)?;
        let mut out = MeshFunction::zeros(*grid);
        for node in grid.boundary_nodes() {
            let x = grid.coords(node);
            let v = (self.g)(&x[..grid.dim()]);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { node });
            }
            out.set(node, v);
        }
        Ok(out)
    }

    /// `r_h(exact)` on all nodes.
    pub fn sample_exact(&self, grid: &Grid) -> Result<MeshFunction> {
        self.check_grid(grid)?;
        let exact = self.exact.as_ref().ok_or(Error::NoExactSolution)?;
        restrict(|x| exact(x), grid)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.n() {
            return Err(Error::InvalidConfig(format!(
                "problem {} is {}-dimensional, grid is {}-dimensional",
                self.label,
                self.n(),
                grid.dim()
            )));
        }
        Ok(())
    }
}

/// Test 2 closed forms for `u = ln(a + r²)` in three dimensions.
pub mod log_radial {
    pub const A: f64 = 2.0;

    pub fn laplacian(r2: f64) -> f64 {
        (6.0 * A + 2.0 * r2) / (A + r2).powi(2)
    }

    pub fn s2(r2: f64) -> f64 {
        4.0 * (3.0 * A - r2) / (A + r2).powi(3)
    }

    /// `det D²u = λ₁ λ₂²` with `λ₁ = 2(a - r²)/(a + r²)²`, `λ₂ = 2/(a + r²)`.
    pub fn det(r2: f64) -> f64 {
        8.0 * (A - r2) / (A + r2).powi(4)
    }
}

/// Labels accepted by [`make_problem`].
pub const LABELS: &[&str] = &[
    "test1",
    "test2",
    "test3",
    "test4",
    "test5",
    "quadratic(k,n)",
];

/// Builds a catalog problem by label.
///
/// `quadratic(k,n)` (also written `quadratic-k-n`) has exact solution `Σ x_i²`.
pub fn make_problem(label: &str) -> Result<Problem> {
    let label = label.trim();
    let p = match label {
        "test1" => Problem::new(
            label,
            2,
            3,
            Arc::new(|x| {
                let r = r2(x);
                4.0 * (3.0 + 4.0 * r) * (2.0 * r).exp()
            }),
            Arc::new(|x| r2(x).exp()),
        )?
        .with_exact(Arc::new(|x| r2(x).exp())),
        "test2" => Problem::new(
            label,
            2,
            3,
            Arc::new(|x| log_radial::s2(r2(x))),
            Arc::new(|x| (log_radial::A + r2(x)).ln()),
        )?
        .with_exact(Arc::new(|x| (log_radial::A + r2(x)).ln())),
        "test3" => Problem::new(
            label,
            2,
            3,
            Arc::new(|x| {
                let r = r2(x);
                -(r - 9.0) / (r - 3.0).powi(2)
            }),
            Arc::new(|x| -(3.0 - r2(x)).max(0.0).sqrt()),
        )?
        .with_exact(Arc::new(|x| -(3.0 - r2(x)).max(0.0).sqrt())),
        "test4" => Problem::new(label, 2, 3, Arc::new(|_| 1.0), Arc::new(|_| 0.0))?,
        "test5" => Problem::new(
            label,
            3,
            3,
            Arc::new(|_| 0.0),
            Arc::new(|x| (x[0] - 0.5).abs()),
        )?,
        other => {
            let (k, n) =
                parse_quadratic(other).ok_or_else(|| Error::UnknownProblem(other.to_string()))?;
            quadratic(k, n)?
        }
    };
    Ok(p)
}

/// `u = Σ x_i²`, `f = S_k(2I) = binom(n,k) 2^k`.
pub fn quadratic(k: usize, n: usize) -> Result<Problem> {
    let order = HessianOrder::new(k, n)?;
    let fval = binom(n, k) as f64 * 2f64.powi(k as i32);
    Ok(Problem::new(
        format!("quadratic({k},{n})"),
        order.k(),
        order.n(),
        Arc::new(move |_| fval),
        Arc::new(r2),
    )?
    .with_exact(Arc::new(r2)))
}

fn parse_quadratic(label: &str) -> Option<(usize, usize)> {
    let rest = label.strip_prefix("quadratic")?;
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| rest.strip_prefix('-'))?;
    let mut parts = inner.split([',', '-']);
    let k = parts.next()?.trim().parse().ok()?;
    let n = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((k, n))
}

/// Max over all nodes of `|u - r_h(exact)|`.
pub fn max_error(u: &MeshFunction, problem: &Problem) -> Result<f64> {
    let exact = problem.sample_exact(u.grid())?;
    Ok(u.max_diff(&exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_at_origin() {
        let o = [0.0, 0.0, 0.0];
        assert_eq!((make_problem("test1").unwrap().f)(&o), 12.0);
        assert_eq!((make_problem("test2").unwrap().f)(&o), 3.0);
        assert_eq!((make_problem("test3").unwrap().f)(&o), 1.0);
    }

    #[test]
    fn orders() {
        for (label, k) in [("test1", 2), ("test4", 2), ("test5", 3)] {
            let p = make_problem(label).unwrap();
            assert_eq!((p.k(), p.n()), (k, 3));
        }
        assert!(make_problem("test4").unwrap().exact.is_none());
    }

    #[test]
    fn quadratic_labels() {
        let p = make_problem("quadratic(2,3)").unwrap();
        assert_eq!((p.k(), p.n()), (2, 3));
        assert_eq!((p.f)(&[0.3, 0.1, 0.2]), 12.0);
        let p = make_problem("quadratic-3-3").unwrap();
        assert_eq!((p.f)(&[0.0; 3]), 8.0);
        assert!(matches!(
            make_problem("quadratic(3,2)"),
            Err(Error::InvalidOrder { .. })
        ));
        assert!(matches!(
            make_problem("test9"),
            Err(Error::UnknownProblem(_))
        ));
    }

    #[test]
    fn max_error_examples() {
        let p = make_problem("test1").unwrap();
        let g = Grid::new(3, 4).unwrap();
        let mut u = p.sample_exact(&g).unwrap();
        assert_eq!(max_error(&u, &p).unwrap(), 0.0);
        for node in g.interior_nodes() {
            u.set(node, u.get(node) + 1e-3);
        }
        assert!((max_error(&u, &p).unwrap() - 1e-3).abs() < 1e-12);
        let p4 = make_problem("test4").unwrap();
        assert!(matches!(max_error(&u, &p4), Err(Error::NoExactSolution)));
    }

    #[test]
    fn test3_rhs_finite_on_interior() {
        let p = make_problem("test3").unwrap();
        for m in [4, 16, 64] {
            let g = Grid::new(3, m).unwrap();
            assert!(p.sample_rhs(&g).unwrap().is_finite());
        }
    }

    #[test]
    fn test1_rhs_is_s2_of_exact_hessian() {
        // D²e^{r²} = e^{r²}(2I + 4 x xᵀ)
        let p = make_problem("test1").unwrap();
        for x in [[0.1, 0.5, 0.9], [1.0, 1.0, 1.0], [0.3, 0.0, 0.7]] {
            let e = r2(&x).exp();
            let mut h = crate::SymMat::zeros(3);
            for i in 0..3 {
                for j in i..3 {
                    let d = if i == j { 2.0 } else { 0.0 };
                    h.set(i, j, e * (d + 4.0 * x[i] * x[j]));
                }
            }
            let want = crate::s_k(&h, 2);
            assert!(((p.f)(&x) - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn log_radial_closed_forms_consistent() {
        // S_2 = 2λ₁λ₂ + λ₂², Δ = λ₁ + 2λ₂
        for r in [0.0, 0.7, 1.9, 3.0] {
            let a = log_radial::A;
            let l1 = 2.0 * (a - r) / (a + r).powi(2);
            let l2 = 2.0 / (a + r);
            assert!((log_radial::laplacian(r) - (l1 + 2.0 * l2)).abs() < 1e-14);
            assert!((log_radial::s2(r) - (2.0 * l1 * l2 + l2 * l2)).abs() < 1e-14);
            assert!((log_radial::det(r) - l1 * l2 * l2).abs() < 1e-14);
        }
    }
}
