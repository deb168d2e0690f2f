use std::process::{Command, Output};

use khessian::report::{parse_table_csv, read_field_csv};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khessian"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn solve_then_slice() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("u.csv");
    let slice = dir.path().join("s.csv");
    let out = run(&[
        "solve",
        "--problem",
        "quadratic(2,3)",
        "--method",
        "newton",
        "--m",
        "4",
        "--out",
        field.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("converged"));

    let u = read_field_csv(std::fs::File::open(&field).unwrap()).unwrap();
    assert_eq!(u.grid().subdivisions(), 4);

    let out = run(&[
        "export-slice",
        "--in",
        field.to_str().unwrap(),
        "--axis",
        "z",
        "--value",
        "0.5",
        "--out",
        slice.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&slice).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,u"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    for r in rows {
        assert!((r[2] - (r[0] * r[0] + r[1] * r[1] + 0.25)).abs() < 1e-9);
    }
}

#[test]
fn convergence_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = run(&[
        "convergence",
        "--problem",
        "test1",
        "--method",
        "fixed-point",
        "--m",
        "2,4,8",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("6.2328e-2") && stdout.contains("1.77"),
        "{stdout}"
    );
    let rows = parse_table_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![2, 4, 8]);
    assert!(rows[0].rate.is_none() && rows[2].rate.is_some());
}

#[test]
fn failed_study_keeps_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = run(&[
        "convergence",
        "--problem",
        "test1",
        "--method",
        "fixed-point",
        "--m",
        "2,8",
        "--max-iter",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let rows = parse_table_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].m, 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = dir.path().join("o.csv");
    let o = out.to_str().unwrap();

    // invalid configuration
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test9",
            "--method",
            "newton",
            "--m",
            "4"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test1",
            "--method",
            "sor",
            "--m",
            "4"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test5",
            "--method",
            "gauss-seidel",
            "--m",
            "4"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test1",
            "--method",
            "newton",
            "--m",
            "1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test1",
            "--method",
            "newton",
            "--m",
            "4",
            "--tol",
            "-1"
        ])),
        2
    );
    // non-convergence
    assert_eq!(
        code(&run(&[
            "solve",
            "--problem",
            "test1",
            "--method",
            "fixed-point",
            "--m",
            "8",
            "--max-iter",
            "2"
        ])),
        3
    );
    // I/O
    assert_eq!(
        code(&run(&[
            "export-slice",
            "--in",
            missing.to_str().unwrap(),
            "--axis",
            "x",
            "--value",
            "0.5",
            "--out",
            o
        ])),
        4
    );
    std::fs::write(&missing, "x1,x2,u\n0,0,1\n").unwrap();
    assert_eq!(
        code(&run(&[
            "export-slice",
            "--in",
            missing.to_str().unwrap(),
            "--axis",
            "x",
            "--value",
            "0.5",
            "--out",
            o
        ])),
        4
    );
}

#[test]
fn slice_off_lattice_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("u.csv");
    let f = field.to_str().unwrap();
    let out = run(&[
        "solve",
        "--problem",
        "test4",
        "--method",
        "fixed-point",
        "--m",
        "4",
        "--out",
        f,
    ]);
    assert_eq!(code(&out), 0);
    let o = dir.path().join("s.csv");
    let o = o.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "export-slice",
            "--in",
            f,
            "--axis",
            "y",
            "--value",
            "0.3",
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "export-slice",
            "--in",
            f,
            "--axis",
            "w",
            "--value",
            "0.5",
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "export-slice",
            "--in",
            f,
            "--axis",
            "y",
            "--value",
            "0.75",
            "--out",
            o
        ])),
        0
    );
}
