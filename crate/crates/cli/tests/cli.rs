//! End-to-end tests of the binary: output schemas, exit codes, env-var
//! precedence, and cache behavior.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_harmonic-li"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn constants_printed_digits_and_nesting() {
    let out = run(&["constants", "--digits", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mu,1.451369234883,"), "{text}");
    assert!(text.contains("inv_log_mu,2.684510350820,"), "{text}");

    // nested refinement: the 5-digit rows contain the 13-digit rows
    let coarse = stdout(&run(&["constants", "--digits", "5"]));
    let parse = |text: &str, name: &str| -> (f64, f64) {
        let row = text
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap()
            .to_string();
        let mut it = row.split(',').skip(1);
        (
            it.next().unwrap().parse().unwrap(),
            it.next().unwrap().parse().unwrap(),
        )
    };
    for name in ["gamma,", "mu,", "alpha_star,"] {
        let (c_lo, c_hi) = parse(&coarse, name);
        let (f_lo, f_hi) = parse(&text, name);
        assert!(c_lo <= f_lo && f_hi <= c_hi, "{name} enclosures not nested");
    }
}

#[test]
fn verify_rh9_finds_the_exception() {
    let out = run(&["verify", "--preset", "rh9", "--range", "1:977"]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "expected exit 4 on a certified violation"
    );
    let text = stdout(&out);
    let fails: Vec<&str> = text.lines().filter(|l| l.ends_with(",fails")).collect();
    assert_eq!(fails.len(), 1);
    assert!(fails[0].starts_with("rh9,82,"));
    assert!(!text.contains("indeterminate"));
}

#[test]
fn verify_rh6b_holds_and_csv_is_stable() {
    let a = run(&["verify", "--preset", "rh6b", "--range", "1:548"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify", "--preset", "rh6b", "--range", "1:548"]);
    assert_eq!(stdout(&a), stdout(&b), "scan output not deterministic");
    let header = stdout(&a).lines().next().unwrap().to_string();
    assert_eq!(header, "preset,n,lhs_lo,lhs_hi,rhs_lo,rhs_hi,verdict");
}

#[test]
fn verify_json_metadata() {
    let out = run(&[
        "verify", "--preset", "rh5", "--range", "803:805", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"precision_digits\": 40"));
    assert!(text.contains("\"cache_checksum\""));
    assert!(text.contains("\"holds\": 3"));
}

#[test]
fn verify_custom_tuple() {
    let out = run(&[
        "verify",
        "--custom",
        "0.0398,0.5,2657,gamma,1,0.4986013304",
        "--range",
        "1495:1500",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn pi_and_cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("pi.cache");
    let out = run(&["pi", "--x", "100", "--cache-path", cache.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "25");
    let text = std::fs::read_to_string(&cache).unwrap();
    assert!(text.starts_with("harmonic-li-picache v1 "), "{text}");
    assert!(text.contains("100,25"));

    // corrupted cache is detected, warned about, and recomputed
    std::fs::write(&cache, text.replace("100,25", "100,26")).unwrap();
    let out = run(&["pi", "--x", "100", "--cache-path", cache.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "25");
    assert!(String::from_utf8_lossy(&out.stderr).contains("re-sieving"));
}

#[test]
fn env_var_digits_with_flag_priority() {
    let out = bin()
        .env("HARMONIC_LI_DIGITS", "20")
        .args(["beta", "--t", "0", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out2 = bin()
        .env("HARMONIC_LI_DIGITS", "banana")
        .args(["beta", "--t", "0", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(
        out2.status.code(),
        Some(2),
        "bad env digits should be a usage error"
    );
    let out3 = bin()
        .env("HARMONIC_LI_DIGITS", "banana")
        .args(["--digits", "20", "beta", "--t", "0", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(
        out3.status.code(),
        Some(0),
        "flag must win over the env var"
    );
}

#[test]
fn integer_boundary_exits_3() {
    // a shift agreeing with log mu beyond any allowed precision: the
    // ceiling of mu e^{-t} cannot be certified
    let t = "0.3725074107813666344619918665801191335356894977716540515556574352422001206362018543849260499515489423924647410089784888971884859964513190909730851441030323246757175996464553431492013427280264636400043516796895802963952541696002687969488523429259713357476646";
    let out = run(&["beta", "--t", t, "--n", "1"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("straddles an integer"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["table", "7"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--range", "1:10"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "residuals",
            "--t",
            "gamma",
            "--N",
            "1",
            "--range",
            "10:20",
            "--stride",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["beta", "--t", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn table2_schema_and_logmu_row() {
    let out = run(&["table", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "t,n,beta_lower,beta_upper,li_rt_lo,li_rt_hi,r_ceiling"
    );
    assert_eq!(text.lines().count(), 10);
    let logmu = text.lines().find(|l| l.starts_with("logmu,")).unwrap();
    assert!(
        logmu.contains(",0,0,1"),
        "li column at log mu must be exactly zero: {logmu}"
    );
}

#[test]
fn beta_logmu_coarsest_bound() {
    let out = run(&["beta", "--t", "logmu"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("logmu,1,1,"), "{row}");
}

#[test]
fn out_file_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["pi", "--x", "1000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "168");
    assert!(!Path::new(&path.with_extension("tmp")).exists());
}

#[test]
fn residuals_rows() {
    let out = run(&[
        "residuals",
        "--t",
        "gamma",
        "--N",
        "1",
        "--range",
        "10:20",
        "--stride",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("10,"));
    assert!(text.lines().nth(3).unwrap().starts_with("20,"));
}

#[test]
fn rho_matches_published_value() {
    let out = run(&["rho", "--n", "2", "--tol", "0.0000001"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("2,1.294749"), "{row}");
}
