use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use khessian::iterations::{InitRule, IterationConfig, Method};
use khessian::report::{
    export_slice, parse_axis, read_field_csv, render_table, run_convergence_study, solve_row,
    write_field_csv, RunConfig,
};
use khessian::{make_problem, Error};

#[derive(Parser)]
#[command(
    name = "khessian",
    version,
    about = "Finite-difference k-Hessian solvers on the unit cube"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem on one grid and optionally write the field.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Subdivisions per axis.
        #[arg(long)]
        m: usize,
        /// Field CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-refinement study with observed rates.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list of subdivisions.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        /// Table CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a lattice plane from a field file.
    ExportSlice {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long)]
        value: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// test1..test5 or quadratic(k,n).
    #[arg(long)]
    problem: String,
    /// fixed-point | broyden | newton | gauss-seidel | partial-gs | degenerate-ma
    #[arg(long)]
    method: String,
    /// Successive-iterate tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,
    /// Linear-solve relative residual tolerance.
    #[arg(long = "lin-tol", default_value_t = 1e-12)]
    lin_tol: f64,
    /// paper | maclaurin
    #[arg(long, default_value = "paper")]
    init: String,
}

impl Common {
    fn config(&self) -> Result<(Method, IterationConfig), Error> {
        let method: Method = self.method.parse()?;
        let init: InitRule = self.init.parse()?;
        let mut cfg = IterationConfig {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            init,
            ..Default::default()
        };
        cfg.linear.tolerance = self.lin_tol;
        cfg.validate()?;
        Ok((method, cfg))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve { common, m, out } => {
            let (method, cfg) = common.config()?;
            let problem = make_problem(&common.problem)?;
            RunConfig {
                problem: common.problem.clone(),
                method,
                ms: vec![m],
                iteration: cfg,
            }
            .validate()?;
            let start = Instant::now();
            let (row, u, report) = solve_row(&problem, method, m, &cfg)?;
            println!("problem      {}", problem.label);
            println!("method       {method}");
            println!("m            {m}");
            println!("termination  {}", report.termination);
            println!("iterations   {}", report.iterations);
            if let Some(inner) = report.inner_iterations {
                println!("inner        {inner}");
            }
            println!("residual     {:.4e}", row.residual);
            if let Some(d) = report.final_difference() {
                println!("difference   {d:.4e}");
            }
            if let Some(l) = report.min_laplacian_history.last() {
                println!("min lap      {l:.4e}");
            }
            if let Some(e) = row.max_error {
                println!("max error    {e:.4e}");
            }
            println!("seconds      {:.2}", start.elapsed().as_secs_f64());
            if let Some(path) = out {
                let mut w = create(&path)?;
                write_field_csv(&u, &mut w)?;
                w.flush()?;
            }
            if !report.converged() {
                return Err(Error::NotConverged(format!(
                    "{method} terminated with {}",
                    report.termination
                )));
            }
            Ok(())
        }
        Command::Convergence { common, m, out } => {
            let (method, cfg) = common.config()?;
            let config = RunConfig {
                problem: common.problem,
                method,
                ms: m,
                iteration: cfg,
            };
            let (rows, failure) = match run_convergence_study(&config) {
                Ok(rows) => (rows, None),
                Err(e) => (e.partial, Some(e.source)),
            };
            let (text, csv) = render_table(&rows);
            print!("{text}");
            let mut w = create(&out)?;
            w.write_all(csv.as_bytes())?;
            w.flush()?;
            failure.map_or(Ok(()), Err)
        }
        Command::ExportSlice {
            input,
            axis,
            value,
            out,
        } => {
            let axis = parse_axis(&axis)?;
            let u = read_field_csv(BufReader::new(File::open(&input)?))?;
            let csv = export_slice(&u, axis, value)?;
            let mut w = create(&out)?;
            w.write_all(csv.as_bytes())?;
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
