//! Browser bindings: solve a catalog problem, run a refinement study, and inspect
//! `S_k` of a symmetric matrix. Every export returns JSON.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use khessian::hessian::is_k_convex;
use khessian::iterations::{IterationConfig, Method};
use khessian::report::{render_table, run_convergence_study, solve_row, RunConfig};
use khessian::{eigenvalues_sym, is_k_admissible, s_k, Grid, MeshFunction, SymMat};

/// Largest grid the page will solve; keeps a browser tab responsive.
pub const MAX_M: usize = 24;

#[derive(Debug, Serialize)]
pub struct SolveView {
    pub problem: String,
    pub method: String,
    pub m: usize,
    pub termination: String,
    pub iterations: usize,
    pub residual: f64,
    pub max_error: Option<f64>,
    pub differences: Vec<f64>,
    /// Values on the plane `x_n = 1/2` (the whole field when `n = 2`), row-major.
    pub slice: Vec<f64>,
    pub slice_side: usize,
}

#[derive(Debug, Serialize)]
pub struct StudyView {
    pub table: String,
    pub csv: String,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct MatrixView {
    pub n: usize,
    pub s: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// `S_j > 0` for `j <= k`.
    pub admissible: Vec<bool>,
    /// `S_j >= 0` for `j <= k`.
    pub convex: Vec<bool>,
}

fn check_m(m: usize) -> Result<(), String> {
    if !(2..=MAX_M).contains(&m) {
        return Err(format!("m must lie in 2..={MAX_M}"));
    }
    Ok(())
}

fn mid_plane(u: &MeshFunction) -> (Vec<f64>, usize) {
    let grid: &Grid = u.grid();
    let side = grid.subdivisions() + 1;
    if grid.dim() == 2 {
        return (u.values().to_vec(), side);
    }
    // the top axis has the largest stride, so one plane is one contiguous block
    let plane = grid.subdivisions() / 2;
    let start = plane * grid.stride(2);
    (u.values()[start..start + side * side].to_vec(), side)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Solves one problem on one grid.
pub fn solve_view(problem: &str, method: &str, m: usize) -> Result<SolveView, String> {
    check_m(m)?;
    let method: Method = method.parse().map_err(|e: khessian::Error| e.to_string())?;
    let config = RunConfig {
        problem: problem.to_string(),
        method,
        ms: vec![m],
        iteration: IterationConfig::default(),
    };
    let p = config.validate().map_err(|e| e.to_string())?;
    let (row, u, report) =
        solve_row(&p, method, m, &config.iteration).map_err(|e| e.to_string())?;
    let (slice, slice_side) = mid_plane(&u);
    Ok(SolveView {
        problem: p.label.clone(),
        method: method.to_string(),
        m,
        termination: report.termination.to_string(),
        iterations: report.iterations,
        residual: row.residual,
        max_error: row.max_error,
        differences: report.difference_history,
        slice,
        slice_side,
    })
}

/// Refinement study over comma-separated `ms`; a failing grid keeps the rows before it.
pub fn study_view(problem: &str, method: &str, ms: &str) -> Result<StudyView, String> {
    let method: Method = method.parse().map_err(|e: khessian::Error| e.to_string())?;
    let ms = ms
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad grid size {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for &m in &ms {
        check_m(m)?;
    }
    let config = RunConfig::new(problem, method, ms);
    let (rows, error) = match run_convergence_study(&config) {
        Ok(rows) => (rows, None),
        Err(e) => (e.partial, Some(e.source.to_string())),
    };
    let (table, csv) = render_table(&rows);
    Ok(StudyView { table, csv, error })
}

/// `S_1..S_n`, eigenvalues and `k`-admissibility of a symmetric matrix given by its
/// row-major entries (upper triangle is used).
pub fn matrix_view(entries: &[f64]) -> Result<MatrixView, String> {
    let n = match entries.len() {
        4 => 2,
        9 => 3,
        len => return Err(format!("expected 4 or 9 entries, got {len}")),
    };
    if entries.iter().any(|v| !v.is_finite()) {
        return Err("entries must be finite".into());
    }
    let rows: Vec<&[f64]> = entries.chunks(n).collect();
    let a = SymMat::from_rows(&rows);
    Ok(MatrixView {
        n,
        s: (1..=n).map(|k| s_k(&a, k)).collect(),
        eigenvalues: eigenvalues_sym(&a),
        admissible: (1..=n).map(|k| is_k_admissible(&a, k)).collect(),
        convex: (1..=n).map(|k| is_k_convex(&a, k)).collect(),
    })
}

#[wasm_bindgen]
pub fn solve(problem: &str, method: &str, m: usize) -> Result<String, JsValue> {
    solve_view(problem, method, m)
        .and_then(|v| to_json(&v))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn study(problem: &str, method: &str, ms: &str) -> Result<String, JsValue> {
    study_view(problem, method, ms)
        .and_then(|v| to_json(&v))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn matrix(entries: &[f64]) -> Result<String, JsValue> {
    matrix_view(entries)
        .and_then(|v| to_json(&v))
        .map_err(|e| JsValue::from_str(&e))
}
