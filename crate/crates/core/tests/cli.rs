use std::path::Path;

use htp_lz::cli::dispatch_to;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("htp-lz").chain(args.iter().copied());
    let code = dispatch_to(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, _) = run(&full);
    (code, serde_json::from_str(out.trim()).expect("valid JSON"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn params_rho_zero() {
    let (code, v) = json(&["params", "--rho", "0"]);
    assert_eq!(code, 0);
    assert_eq!((v["m"].as_u64(), v["p"].as_u64(), v["q"].as_u64(), v["k"].as_u64()), (Some(2), Some(5), Some(7), Some(35)));
}

#[test]
fn bad_token_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.lz", "E x . x - 1 = 0\n");
    let (code, _, err) = run(&["formula", "parse", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("not in the positive existential language"), "{err}");
}

#[test]
fn unknown_subcommand_and_missing_file() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["formula", "parse", "/nonexistent/f.lz"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn pell_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let (code, g3, _) = run(&["pell", "gen", "3"]);
    assert_eq!(code, 0);
    let (_, g4, _) = run(&["pell", "gen", "4"]);
    let (_, g7, _) = run(&["pell", "gen", "7"]);
    let a = write(&dir, "a.pair", &g3);
    let b = write(&dir, "b.pair", &g4);
    assert_eq!(run(&["pell", "add", &a, &b]).1, g7);

    let c = write(&dir, "c.pair", &g7);
    let (code, v) = json(&["pell", "recognize", &c]);
    assert_eq!(code, 0);
    assert_eq!(v["n"], "7");

    // violates the Pell invariant, so it cannot be checked at all
    let junk = write(&dir, "junk.pair", "[2, 0]\n[1]\n");
    assert_eq!(run(&["pell", "recognize", &junk]).0, 2);
}

#[test]
fn pell_negative_index_and_denef() {
    let (code, v) = json(&["pell", "gen", "-2"]);
    assert_eq!(code, 0);
    assert_eq!(v["y"], "[0, -2]");
    assert_eq!(run(&["pell", "denef", "--max", "20"]).0, 0);
}

#[test]
fn cyclotomic_commands() {
    let (code, v) = json(&["cyclo", "rank", "--q", "7", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["rank"], 3);
    let (code, v) = json(&["cyclo", "nullspace", "--k", "35", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["dimension"], 1);
    assert_eq!(run(&["cyclo", "phi", "6"]).1.trim(), "[1, -1, 1]");
}

#[test]
fn formula_eval() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.lz", "E x . x*x = z*z + (1+1)*z + 1\n");
    let good = write(&dir, "good.wit", "x = [1, 1]\n");
    let bad = write(&dir, "bad.wit", "x = [1, 2]\n");
    assert_eq!(run(&["formula", "eval", &f, "--assign", &good]).0, 0);
    assert_eq!(run(&["formula", "eval", &f, "--assign", &bad]).0, 1);
}

#[test]
fn compile_witness_check() {
    let dir = TempDir::new().unwrap();
    let (code, sentence, _) = run(&["reduce", "compile", "--rho", "0", "n - 3"]);
    assert_eq!(code, 0);
    let (code, witness, _) = run(&["reduce", "witness", "--rho", "0", "n - 3", "--solution", "3"]);
    assert_eq!(code, 0);
    let f = write(&dir, "f.lz", &sentence);
    let w = write(&dir, "w.wit", &witness);
    assert_eq!(run(&["reduce", "check", &f, &w]).0, 0);

    // bump the first coefficient of the first entry
    let mut lines: Vec<String> = witness.lines().map(str::to_owned).collect();
    let i = lines.iter().position(|l| l.contains("= [")).unwrap();
    let (head, tail) = lines[i].split_once("= [").unwrap();
    let (first, rest) = tail.split_once([',', ']']).map(|(a, _)| (a, &tail[a.len()..])).unwrap();
    let bumped: i64 = first.trim().parse::<i64>().unwrap() + 1;
    lines[i] = format!("{head}= [{bumped}{rest}");
    let bad = write(&dir, "bad.wit", &lines.join("\n"));
    assert_eq!(run(&["reduce", "check", &f, &bad]).0, 1);

    let (code, _, _) = run(&["reduce", "witness", "--rho", "0", "n - 3", "--solution", "4"]);
    assert_eq!(code, 1);
}

#[test]
fn search_finds_small_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "sq.lz", "E x . x*x = z*z\n");
    let (code, v) = json(&["reduce", "search", &f, "--maxdeg", "1", "--maxheight", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["x"], "[0, -1]");
    let none = write(&dir, "none.lz", "E x . x*x = z\n");
    assert_eq!(run(&["reduce", "search", &none, "--maxdeg", "2", "--maxheight", "2"]).0, 1);
}

#[test]
fn growth_commands() {
    let (code, v) = json(&["growth", "order", "--n", "1", "--h", "[1]", "--rmin", "10", "--rmax", "10000"]);
    assert_eq!(code, 0);
    assert!((v["rho_hat"].as_f64().unwrap() - 1.0).abs() < 0.25);
    let (code, v) = json(&["growth", "residual", "--n", "2", "--h", "[0, 1]", "--radius", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(run(&["growth", "residual", "--n", "2", "--h", "[1]", "--radius", "0.5"]).0, 2);
}

#[test]
fn verify_quick_and_fault() {
    assert_eq!(run(&["verify", "quick"]).0, 0);
    let (code, v) = json(&["verify", "quick", "--inject-fault", "parser"]);
    assert_eq!(code, 1);
    let suites = v["suites"].as_array().unwrap();
    let failed: Vec<&str> = suites
        .iter()
        .filter(|s| s["pass"] == false)
        .map(|s| s["suite"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["parser"]);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--json", "reduce", "compile", "--rho", "0", "n1*n2 - 6"];
    let first = run(&args).1;
    assert_eq!(first, run(&args).1);
    let out = dir.path().join("compiled.json");
    std::fs::write(&out, &first).unwrap();
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path(&out)).unwrap()).unwrap();
    assert!(v.is_object());
}
