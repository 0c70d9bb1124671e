use std::process::Command;

use uzawa_cavity::cli::{self, RunConfig, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uzawa-cavity"))
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["uzawa-cavity"];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::main_with_args(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn binary_exit_codes() {
    let bad = bin().args(["run", "--set", "nonsense=1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let missing = bin().arg("frobnicate").output().unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_USAGE));
    let diverge = bin().args(["run", "--set", "mesh_n=6", "--set", "alpha2=2.5"]).output().unwrap();
    assert_eq!(diverge.status.code(), Some(EXIT_NOT_CONVERGED));
    let stdout = String::from_utf8(diverge.stdout).unwrap();
    assert!(stdout.contains("converged=false"), "{stdout}");
    assert!(stdout.contains("status=diverged"), "{stdout}");
    let ok = bin().args(["run", "--set", "mesh_n=6"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
}

#[test]
fn run_output_layout() {
    let (code, out, _) = call(&["run", "--set", "mesh_n=10"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("# mesh_n=10"));
    assert!(out.contains("# alpha2=1.5"));
    let lines = data_lines(&out);
    assert_eq!(lines[0], "iter,u_inc,p_inc,div_norm");
    let summary = lines.last().unwrap();
    assert!(summary.starts_with("converged=true"));
    assert!(summary.contains(" tol=1e-6"), "{summary}");
    let iterations: usize = summary.split(' ').find_map(|t| t.strip_prefix("iterations=")).unwrap().parse().unwrap();
    assert_eq!(lines.len(), iterations + 2);
    let last_row: Vec<&str> = lines[iterations].split(',').collect();
    assert_eq!(last_row[0], iterations.to_string());
    assert!(last_row[1..].iter().all(|v| v.parse::<f64>().is_ok()));
}

#[test]
fn run_iteration_count_at_mesh_10() {
    let mut cfg = RunConfig::default();
    cfg.mesh_n = 10;
    let hist = cli::run_cavity(&cfg, 10, cfg.lid, 0.0).unwrap();
    assert!(hist.converged());
    assert!((30..=300).contains(&hist.iterations), "iterations={}", hist.iterations);
}

#[test]
fn run_is_deterministic() {
    let args = ["run", "--set", "mesh_n=8", "--set", "beta=0.05"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_table_and_divergent_row() {
    let (code, out, _) = call(&["sweep", "--set", "mesh_list=4,6", "--set", "beta_list=0,0.5"]);
    assert_eq!(code, EXIT_NOT_CONVERGED);
    let lines = data_lines(&out);
    assert_eq!(lines[0], "mesh_n,beta,alpha2,iterations,converged,final_div_norm");
    let rows: Vec<Vec<&str>> = lines[1..5].iter().map(|l| l.split(',').collect()).collect();
    let order: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(order, [("4", "0"), ("4", "0.5"), ("6", "0"), ("6", "0.5")]);
    assert_eq!(rows[0][4], "true");
    assert_eq!(rows[1][4], "false");
    let (_, again, _) = call(&["sweep", "--set", "mesh_list=4,6", "--set", "beta_list=0,0.5"]);
    assert_eq!(out, again);
}

#[test]
fn divnorm_matches_individual_runs() {
    let (code, out, _) = call(&["divnorm", "--set", "mesh_n=5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("# beta=0.05"));
    assert!(out.contains("# alpha2=1.5"));
    let lines = data_lines(&out);
    assert_eq!(lines[0], "iter,div_norm_regularized,div_norm_unit");

    let trace = |lid: &str| {
        let (_, o, _) = call(&["run", "--set", "mesh_n=5", "--set", "beta=0.05", "--set", &format!("lid={lid}")]);
        data_lines(&o)[1..].iter().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).map(|l| l.split(',').nth(3).unwrap().to_string()).collect::<Vec<_>>()
    };
    let (reg, unit) = (trace("regularized"), trace("unit"));
    let rows: Vec<&str> = lines[1..].iter().copied().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert!(lines.last().unwrap().starts_with("unit: converged=true"));
    assert_eq!(rows.len(), reg.len().max(unit.len()));
    for (k, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], (k + 1).to_string());
        assert_eq!(cells[1], reg.get(k).map_or("", String::as_str));
        assert_eq!(cells[2], unit.get(k).map_or("", String::as_str));
    }
}

#[test]
fn spectrum_report() {
    let (code, out, _) = call(&["spectrum", "--set", "mesh_n=4", "--set", "eig_tol=1e-9", "--set", "eig_max_iter=20000"]);
    assert_eq!(code, EXIT_OK);
    let field = |k: &str| out.split_whitespace().find_map(|t| t.strip_prefix(&format!("{k}="))).unwrap().to_string();
    let m: f64 = field("m").parse().unwrap();
    let big_m: f64 = field("M").parse().unwrap();
    assert!((m - 0.391_435_363_522_334_1).abs() <= 0.05 * 0.3914);
    assert!((big_m - 1.0).abs() <= 0.01);
    assert_eq!(field("sufficient"), "false");
    let rho: f64 = field("predicted_rho").parse().unwrap();
    assert!(rho < 1.0);

    let (_, out, _) = call(&["spectrum", "--set", "mesh_n=12"]);
    assert!(out.contains("predicted_rho=n/a"));
}

#[test]
fn config_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cavity.cfg");
    std::fs::write(&cfg_path, "# small run\nmesh_n = 6\nbeta=0.05\nlid=unit\n").unwrap();
    let out_path = dir.path().join("trace.csv");
    let (code, stdout, _) = call(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--set",
        "alpha2=1.2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(!stdout.contains("iter,u_inc"));
    assert!(stdout.starts_with("converged=true"));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.contains("# mesh_n=6"));
    assert!(csv.contains("# lid=unit"));
    assert!(csv.contains("# alpha2=1.2"));

    let (code, _, err) = call(&["run", "--config", dir.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cannot read config"));
}
