//! Convergence studies, table rendering, and CSV field/slice files.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, MeshFunction};
use crate::iterations::{solve, IterationConfig, Method, SolveReport};
use crate::problems::{make_problem, max_error, Problem};

/// One row of a grid-refinement table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub m: usize,
    pub h: f64,
    pub iterations: usize,
    pub residual: f64,
    pub max_error: Option<f64>,
    pub rate: Option<f64>,
}

/// What to solve and on which grids.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: String,
    pub method: Method,
    pub ms: Vec<usize>,
    pub iteration: IterationConfig,
}

impl RunConfig {
    pub fn new(problem: impl Into<String>, method: Method, ms: Vec<usize>) -> Self {
        RunConfig {
            problem: problem.into(),
            method,
            ms,
            iteration: IterationConfig::default(),
        }
    }

    /// Resolves the problem and checks method/order compatibility.
    pub fn validate(&self) -> Result<Problem> {
        self.iteration.validate()?;
        if self.ms.is_empty() {
            return Err(Error::InvalidConfig("empty list of grid sizes".into()));
        }
        if let Some(&m) = self.ms.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidConfig(format!(
                "m = {m} has no interior nodes"
            )));
        }
        let problem = make_problem(&self.problem)?;
        if !self.method.supports(problem.order) {
            return Err(Error::InvalidConfig(format!(
                "method {} does not apply to k = {}, n = {}",
                self.method,
                problem.k(),
                problem.n()
            )));
        }
        Ok(problem)
    }
}

/// A study aborted by a failed solve; `partial` holds the rows completed before it.
#[derive(Debug, thiserror::Error)]
#[error("convergence study failed at m = {m}: {source}")]
pub struct StudyError {
    pub m: usize,
    pub partial: Vec<StudyRow>,
    #[source]
    pub source: Error,
}

/// Solves one grid size and returns the row (without rate), the field and the report.
pub fn solve_row(
    problem: &Problem,
    method: Method,
    m: usize,
    config: &IterationConfig,
) -> Result<(StudyRow, MeshFunction, SolveReport)> {
    let grid = Grid::new(problem.n(), m)?;
    let (u, report) = solve(method, problem, &grid, config)?;
    let error = match problem.exact {
        Some(_) => Some(max_error(&u, problem)?),
        None => None,
    };
    let row = StudyRow {
        m,
        h: grid.h(),
        iterations: report.iterations,
        residual: report.final_residual().unwrap_or(f64::NAN),
        max_error: error,
        rate: None,
    };
    Ok((row, u, report))
}

/// Solves every `m` independently from its own initial guess, in increasing order of
/// `m`, and fills in the observed rates.
pub fn run_convergence_study(config: &RunConfig) -> std::result::Result<Vec<StudyRow>, StudyError> {
    let first = config.ms.first().copied().unwrap_or(0);
    let problem = config.validate().map_err(|source| StudyError {
        m: first,
        partial: Vec::new(),
        source,
    })?;
    let mut ms = config.ms.clone();
    ms.sort_unstable();
    ms.dedup();
    let mut rows: Vec<StudyRow> = Vec::with_capacity(ms.len());
    for m in ms {
        let outcome = solve_row(&problem, config.method, m, &config.iteration).and_then(
            |(row, _, report)| {
                if report.converged() {
                    Ok(row)
                } else {
                    Err(Error::NotConverged(format!(
                        "{} terminated with {} after {} iterations",
                        config.method, report.termination, report.iterations
                    )))
                }
            },
        );
        match outcome {
            Ok(row) => {
                rows.push(row);
                fill_rates(&mut rows);
            }
            Err(source) => {
                return Err(StudyError {
                    m,
                    partial: rows,
                    source,
                })
            }
        }
    }
    Ok(rows)
}

/// `rate_i = log2(error_{i-1} / error_i)` where both errors are present and positive.
pub fn fill_rates(rows: &mut [StudyRow]) {
    if let Some(first) = rows.first_mut() {
        first.rate = None;
    }
    for i in 1..rows.len() {
        rows[i].rate = match (rows[i - 1].max_error, rows[i].max_error) {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a / b).log2()),
            _ => None,
        };
    }
}

/// Five significant digits, fixed notation for moderate magnitudes, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..5).contains(&e) {
        let decimals = (4 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        fmt_sci(x)
    }
}

/// Five significant digits in scientific notation, e.g. `5.2449e-4`.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.4e}")
}

const HEADER: [&str; 6] = ["m", "h", "iterations", "residual", "max_error", "rate"];

fn cells(row: &StudyRow) -> [String; 6] {
    [
        row.m.to_string(),
        fmt_sig(row.h),
        row.iterations.to_string(),
        fmt_sci(row.residual),
        row.max_error.map(fmt_sci).unwrap_or_default(),
        row.rate.map(fmt_sig).unwrap_or_default(),
    ]
}

/// Aligned text table and CSV (header `m,h,iterations,residual,max_error,rate`).
pub fn render_table(rows: &[StudyRow]) -> (String, String) {
    let body: Vec<[String; 6]> = rows.iter().map(cells).collect();
    let mut widths = HEADER.map(str::len);
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut text = String::new();
    let line = |cols: &[String], out: &mut String| {
        let parts: Vec<String> = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&HEADER.map(String::from), &mut text);
    for r in &body {
        line(r, &mut text);
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "{}", HEADER.join(","));
    for r in &body {
        let _ = writeln!(csv, "{}", r.join(","));
    }
    (text, csv)
}

/// Parses CSV produced by [`render_table`].
pub fn parse_table_csv(text: &str) -> Result<Vec<StudyRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

fn axis_name(a: usize) -> String {
    format!("x{}", a + 1)
}

/// Writes `x1,...,xn,u`, one row per node in storage order, 17 significant digits.
pub fn write_field_csv<W: Write>(u: &MeshFunction, out: W) -> Result<()> {
    let grid = u.grid();
    let n = grid.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..n).map(axis_name).collect();
    header.push("u".into());
    w.write_record(&header)?;
    for node in 0..grid.node_count() {
        let x = grid.coords(node);
        let mut rec: Vec<String> = x[..n].iter().map(|v| format!("{v:.16e}")).collect();
        rec.push(format!("{:.16e}", u.get(node)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn field_to_csv_string(u: &MeshFunction) -> Result<String> {
    let mut buf = Vec::new();
    write_field_csv(u, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Reads a field file written by [`write_field_csv`].
pub fn read_field_csv<R: Read>(input: R) -> Result<MeshFunction> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    let n = header.len().saturating_sub(1);
    let expected: Vec<String> = (0..n).map(axis_name).chain(["u".to_string()]).collect();
    if !(2..=3).contains(&n) || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::MalformedField(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::MalformedField(format!("{s:?}: {e}")))
        };
        let mut x = [0.0; 3];
        for a in 0..n {
            x[a] = parse(&rec[a])?;
        }
        coords.push(x);
        values.push(parse(&rec[n])?);
    }
    let count = values.len();
    let side = (count as f64).powf(1.0 / n as f64).round() as usize;
    if side < 3 || side.pow(n as u32) != count {
        return Err(Error::MalformedField(format!(
            "{count} rows do not form a {n}-dimensional lattice"
        )));
    }
    let grid = Grid::new(n, side - 1)?;
    for (node, x) in coords.iter().enumerate() {
        let want = grid.coords(node);
        if (0..n).any(|a| (x[a] - want[a]).abs() > 1e-9) {
            return Err(Error::MalformedField(format!(
                "row {node} is out of lattice order"
            )));
        }
    }
    MeshFunction::from_values(grid, values)
}

/// Parses `x|y|z` (or `x1|x2|x3`) into an axis index.
pub fn parse_axis(s: &str) -> Result<usize> {
    match s {
        "x" | "x1" => Ok(0),
        "y" | "x2" => Ok(1),
        "z" | "x3" => Ok(2),
        other => Err(Error::InvalidConfig(format!("unknown axis {other:?}"))),
    }
}

/// Values on the lattice plane `x_axis = value`, as CSV of the remaining coordinates and
/// `u`, in storage order.
pub fn export_slice(u: &MeshFunction, axis: usize, value: f64) -> Result<String> {
    let grid = u.grid();
    let n = grid.dim();
    if axis >= n {
        return Err(Error::InvalidConfig(format!(
            "axis {} out of range for n = {n}",
            axis + 1
        )));
    }
    let scaled = value * grid.subdivisions() as f64;
    let plane = scaled.round();
    if !(0.0..=1.0).contains(&value) || (scaled - plane).abs() > 1e-9 {
        return Err(Error::SliceOffGrid(value));
    }
    let plane = plane as usize;
    let others: Vec<usize> = (0..n).filter(|&a| a != axis).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = others.iter().map(|&a| axis_name(a)).collect();
    header.push("u".into());
    w.write_record(&header)?;
    for node in 0..grid.node_count() {
        if grid.multi_index(node)[axis] != plane {
            continue;
        }
        let x = grid.coords(node);
        let mut rec: Vec<String> = others.iter().map(|&a| format!("{:.16e}", x[a])).collect();
        rec.push(format!("{:.16e}", u.get(node)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::restrict;

    fn row(m: usize, err: Option<f64>) -> StudyRow {
        StudyRow {
            m,
            h: 1.0 / m as f64,
            iterations: 3,
            residual: 1e-3,
            max_error: err,
            rate: None,
        }
    }

    #[test]
    fn rates() {
        let mut rows = vec![row(4, Some(4e-3)), row(8, Some(1e-3)), row(16, Some(1e-3))];
        fill_rates(&mut rows);
        assert_eq!(rows[0].rate, None);
        assert_eq!(rows[1].rate, Some(2.0));
        assert_eq!(rows[2].rate, Some(0.0));
    }

    #[test]
    fn number_formats() {
        assert_eq!(fmt_sig(1.97), "1.97");
        assert_eq!(fmt_sig(1.9700), "1.97");
        assert_eq!(fmt_sig(0.03125), "0.03125");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.33333");
        assert_eq!(fmt_sci(5.2449e-4), "5.2449e-4");
    }

    #[test]
    fn empty_cells_without_exact() {
        let (_, csv) = render_table(&[row(8, None)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,h,iterations,residual,max_error,rate");
        assert_eq!(lines[1], "8,0.125,3,1.0000e-3,,");
        let back = parse_table_csv(&csv).unwrap();
        assert_eq!(back[0].max_error, None);
        assert_eq!(back[0].rate, None);
    }

    #[test]
    fn slice_of_linear_field() {
        let g = Grid::new(3, 4).unwrap();
        let u = restrict(|x| x[0], &g).unwrap();
        let csv = export_slice(&u, 2, 0.5).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x1,x2,u"));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 25);
        for r in rows {
            assert_eq!(r[0], r[2]);
        }
        assert!(matches!(
            export_slice(&u, 2, 0.3),
            Err(Error::SliceOffGrid(_))
        ));
        assert!(export_slice(&u, 2, 1.5).is_err());
    }

    #[test]
    fn slice_of_constant() {
        let g = Grid::new(3, 2).unwrap();
        let u = MeshFunction::constant(g, 2.5);
        for axis in 0..3 {
            let csv = export_slice(&u, axis, 1.0).unwrap();
            assert!(csv
                .lines()
                .skip(1)
                .all(|l| l.ends_with(",2.5000000000000000e0")));
        }
    }

    #[test]
    fn field_file_round_trip() {
        let g = Grid::new(3, 3).unwrap();
        let u = restrict(|x| (x[0] + 2.0 * x[1]).sin() / (1.0 + x[2]), &g).unwrap();
        let text = field_to_csv_string(&u).unwrap();
        assert!(text.starts_with("x1,x2,x3,u\n"));
        let back = read_field_csv(text.as_bytes()).unwrap();
        assert_eq!(back, u);
        assert!(read_field_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = RunConfig::new("test5", Method::GaussSeidel, vec![4]);
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = RunConfig::new("test1", Method::DegenerateMa, vec![4]);
        assert!(bad.validate().is_err());
        let bad = RunConfig::new("test1", Method::FixedPoint, vec![1]);
        assert!(bad.validate().is_err());
        let err =
            run_convergence_study(&RunConfig::new("nope", Method::Newton, vec![4])).unwrap_err();
        assert!(err.partial.is_empty());
    }
}
