use std::path::Path;
use std::process::{Command, Output};

use rabivar::ansatz;
use rabivar::cli::{self, CSV_COLUMNS, JSON_KEYS};
use rabivar::model::ModelParams;
use rabivar::optimize;

fn rabivar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabivar")).args(args).output().expect("spawn rabivar")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    (header, rdr.records().map(Result::unwrap).collect())
}

fn field(header: &[String], rec: &csv::StringRecord, name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap();
    rec[i].parse().unwrap()
}

#[test]
fn sweep_writes_rows_in_order_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["sweep", "--omega-q", "176,20", "--g-over-gstar", "0:1.5:4", "--seed", "5", "--out"];
    let out = rabivar(&[&args[..], &[path_str(&a)]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = rabivar(&[&args[..], &[path_str(&b)]].concat());
    assert!(out.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (header, rows) = read_csv(&a);
    assert_eq!(header, CSV_COLUMNS);
    assert_eq!(rows.len(), 8);
    let order: Vec<(f64, f64)> =
        rows.iter().map(|r| (field(&header, r, "omega_q"), field(&header, r, "g_over_gstar"))).collect();
    assert_eq!(order[0], (176.0, 0.0));
    assert_eq!(order[3], (176.0, 1.5));
    assert_eq!(order[4], (20.0, 0.0));
    for r in &rows {
        assert_eq!(&r[15], "ok");
        assert!(field(&header, r, "fidelity_error") < 0.01);
        assert_eq!(field(&header, r, "seed"), 5.0);
    }
    // g = 0: vacuum times |−z⟩
    let g0 = &rows[0];
    assert!(field(&header, g0, "fidelity_error") < 1e-8);
    assert!((field(&header, g0, "p_minus") - 1.0).abs() < 1e-8);
    assert!((field(&header, g0, "purity_noq") - 1.0).abs() < 1e-8);
}

#[test]
fn p_minus_falls_and_alpha_grows_at_176() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    let out = rabivar(&["sweep", "--omega-q", "176", "--g-over-gstar", "0.25:2.5:10", "--out", path_str(&out_path)]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&out_path);
    let pm: Vec<f64> = rows.iter().map(|r| field(&header, r, "p_minus")).collect();
    let alpha: Vec<f64> = rows.iter().map(|r| field(&header, r, "alpha_c")).collect();
    assert!(pm.windows(2).all(|w| w[1] < w[0]), "p_minus {pm:?}");
    assert!(alpha.windows(2).all(|w| w[1] > w[0]), "alpha_c {alpha:?}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep settings\nomega_q = 20\ng_over_gstar = 0.5\nseed = 9\nansatz = ecs-ground\n")
        .unwrap();
    let out_path = dir.path().join("s.csv");
    let out = rabivar(&["sweep", "--config", path_str(&cfg), "--seed", "2", "--out", path_str(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&out_path);
    assert_eq!(rows.len(), 1);
    assert_eq!(field(&header, &rows[0], "seed"), 2.0);
    assert_eq!(field(&header, &rows[0], "omega_q"), 20.0);
    // ECS rows report r = 0, phi = π/2
    assert_eq!(field(&header, &rows[0], "r"), 0.0);

    std::fs::write(&cfg, "omega_q = 20\nbogus = 1\n").unwrap();
    let out = rabivar(&["sweep", "--config", path_str(&cfg), "--g-over-gstar", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_points_give_nonzero_exit_and_status() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    let out = rabivar(&[
        "sweep",
        "--omega-q",
        "20",
        "--g-over-gstar",
        "0.5",
        "--objective",
        "energy",
        "--ansatz",
        "ecs-ground",
        "--out",
        path_str(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let (_, rows) = read_csv(&out_path);
    assert!(rows[0][15].starts_with("error:"));
}

#[test]
fn point_report_has_stable_finite_keys() {
    let out = rabivar(&["point", "--omega-q", "10", "--g-over-gstar", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let mut expected: Vec<&str> = JSON_KEYS.to_vec();
    expected.sort_unstable();
    let mut got = keys.clone();
    got.sort_unstable();
    assert_eq!(got, expected);
    for k in [
        "fidelity_error",
        "energy_error",
        "exact_energy_shift",
        "alpha_c",
        "r",
        "phi",
        "p_minus",
        "purity_noq",
        "purity_exact",
    ] {
        assert!(obj[k].as_f64().unwrap().is_finite(), "{k}");
    }
    // key order in the text follows JSON_KEYS
    let text = String::from_utf8(out.stdout).unwrap();
    let pos: Vec<usize> = JSON_KEYS.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn energy_min_matches_large_coupling_displacement() {
    let out = rabivar(&["energy-min", "--omega-q", "176", "--g-over-gstar", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = ModelParams::from_g_over_gstar(176.0, 5.0).unwrap();
    let a = optimize::asymptotic_alpha(&p).unwrap();
    let got = v["alpha_c"].as_f64().unwrap();
    assert!((got - a).abs() / a < 0.02, "{got} vs {a}");
    assert!(v["p_minus"].as_f64().unwrap() - 0.5 <= 0.07);
    assert_eq!(v["objective"], "energy");
}

#[test]
fn seed_changes_only_the_seed_echo_at_a_converged_optimum() {
    let run = |seed: &str| {
        let out = rabivar(&["point", "--omega-q", "20", "--g-over-gstar", "0.8", "--seed", seed]);
        assert!(out.status.success());
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 2);
    for k in ["fidelity_error", "alpha_c", "r", "phi", "p_minus"] {
        let (x, y) = (a[k].as_f64().unwrap(), b[k].as_f64().unwrap());
        assert!((x - y).abs() < 1e-4, "{k}: {x} vs {y}");
    }
}

#[test]
fn aliases_fix_their_mode() {
    let out = rabivar(&["excited-sweep", "--omega-q", "20", "--g-over-gstar", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    let out = rabivar(&["excited-sweep", "--omega-q", "20", "--g-over-gstar", "1", "--ansatz", "noq-ground"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_columns_and_keys() {
    let out = rabivar(&["sweep", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("de_generations, seed, status"));
    let out = rabivar(&["point", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("exact_eigenvalues"));
}

fn wigner_file(dir: &Path, name: &str, args: &[&str]) -> (rabivar::ansatz::GridSpec, String, Vec<Vec<f64>>) {
    let path = dir.join(name);
    let out = rabivar(&[&["wigner"], args, &["--out", path_str(&path)]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    cli::read_wigner(&path).unwrap()
}

#[test]
fn wigner_vacuum_peak() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, echo, rows) =
        wigner_file(dir.path(), "v.txt", &["--omega-q", "1", "--g-over-gstar", "0", "--points", "41", "--extent", "4"]);
    assert_eq!((spec.nx, spec.np), (41, 41));
    assert!(echo.starts_with('#') && echo.contains("state=exact-ground"));
    assert!((rows[20][20] - 2.0).abs() < 1e-6);
}

#[test]
fn wigner_exact_and_noq_agree_at_gstar() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--omega-q", "176", "--g-over-gstar", "1", "--points", "61"];
    let (_, _, exact) = wigner_file(dir.path(), "e.txt", &common);
    let (_, echo, noq) = wigner_file(dir.path(), "n.txt", &[&common[..], &["--state", "noq-optimized"]].concat());
    assert!(echo.contains("alpha_c="));
    let diff = exact.iter().flatten().zip(noq.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 0.05, "max difference {diff}");
}

#[test]
fn wigner_degenerate_limit_is_a_mixture_of_two_lobes() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, _, rows) = wigner_file(dir.path(), "m.txt", &["--omega-q", "0", "--g", "2", "--points", "81"]);
    let xs = spec.xs();
    let mid = spec.np / 2;
    let lobe = 2.0 * std::f64::consts::SQRT_2;
    let j = xs.iter().enumerate().min_by(|a, b| (a.1 - lobe).abs().total_cmp(&(b.1 - lobe).abs())).unwrap().0;
    // each lobe carries half the weight of a coherent state
    assert!((rows[mid][j] - 1.0).abs() < 0.05, "{}", rows[mid][j]);
    // no fringes: W stays non-negative everywhere
    let min = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    assert!(min > -1e-8, "min {min}");
    let ecs = ansatz::ecs_ground(-2.0, 60).unwrap();
    assert!(ansatz::cavity_purity(&ecs) < 0.5 + 1e-6);
}
