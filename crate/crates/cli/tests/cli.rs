use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use apx::knf::{Clause, Connective, Knf, Literal};
use apx::tfnp::{description_size, BuiltinGenerator, CircuitLossyCode, RefuterInstance};
use apx::{Circuit, GateKind, LayeredAc0, Rational, Scalar};
use serde_json::Value;

fn apx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apx")).args(args).env_remove("APX_CAP").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, text: &str) -> String {
    let p = dir.join(file);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn refuter_file(n: usize, m: usize, delta: (i64, u64)) -> String {
    let s = description_size(&Circuit::constant(0, false)).unwrap();
    let inst = RefuterInstance::builtin(
        n,
        m,
        s,
        Rational::from_ratio(delta.0, delta.1),
        BuiltinGenerator::Constant { index: 1, value: false },
    )
    .unwrap();
    serde_json::to_string(&inst.to_file().unwrap()).unwrap()
}

#[test]
fn count_null_circuit() {
    let dir = scratch("count");
    let path = write(&dir, "null3.json", &Circuit::null(3).to_json());
    let out = apx(&["count", "--circuit", &path, "--oracle", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["probability"], "0/1");
    assert_eq!(r["pass"], true);

    let lt = write(&dir, "lt5.json", &Circuit::threshold_less_than(3, 5).unwrap().to_json());
    assert_eq!(report(&apx(&["count", "--circuit", &lt]))["probability"], "5/8");
    let dist = write(&dir, "d.txt", "000\n111\n110\n101\n");
    let r = report(&apx(&["count", "--circuit", &lt, "--oracle", "empirical", "--dist", &dist]));
    // Indices 0, 7, 3, 5 (x₁ least significant): two lie below 5.
    assert_eq!(r["probability"], "1/2");
}

#[test]
fn lossycode_check_exit_codes() {
    let dir = scratch("lossy");
    let inst = serde_json::to_string(&CircuitLossyCode::drop_last(3).unwrap()).unwrap();
    let path = write(&dir, "drop.json", &inst);
    let out = apx(&["lossycode", "check", "--instance", &path, "--x", "000"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
    assert_eq!(apx(&["lossycode", "check", "--instance", &path, "--x", "001"]).status.code(), Some(0));
    let out = apx(&["lossycode", "solve", "--instance", &path]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn refuter_commands() {
    let dir = scratch("refuter");
    let big = write(&dir, "big.json", &refuter_file(8, 1000, (1, 2)));
    let bundle = dir.join("bundle.json");
    let out = apx(&["refuter", "reduce", "--instance", &big, "--bundle", bundle.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["condition_holds"], true);
    let b: Value = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    assert_eq!(b["refuter"]["m"], 1000);

    let small = write(&dir, "small.json", &refuter_file(8, 100, (1, 2)));
    let out = apx(&["refuter", "reduce", "--instance", &small]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["error"].is_string());

    let inst = write(&dir, "inst.json", &refuter_file(3, 4, (1, 4)));
    let balanced = write(&dir, "bal.txt", "000\n100\n011\n111\n");
    let zeros = write(&dir, "zero.txt", "000\n000\n000\n000\n");
    assert_eq!(apx(&["refuter", "check", "--instance", &inst, "--dist", &balanced]).status.code(), Some(0));
    assert_eq!(apx(&["refuter", "check", "--instance", &inst, "--dist", &zeros]).status.code(), Some(1));
}

#[test]
fn selftest_quick_and_corrupted() {
    let out = apx(&["selftest", "quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert!(r["suites"].as_array().unwrap().iter().all(|s| s["pass"] == true));

    let out = apx(&["selftest", "quick", "--corrupt-oracle"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let local = r["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"].as_str().unwrap().contains("local") && s["pass"] == false);
    assert!(local.is_some(), "local consistency suite should fail: {r}");
}

#[test]
fn usage_errors_exit_two() {
    let out = apx(&["count"]);
    assert_eq!(out.status.code(), Some(2));
    let out = apx(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = apx(&["count", "--circuit", "/nonexistent/c.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let dir = scratch("usage");
    let path = write(&dir, "c.json", &Circuit::null(2).to_json());
    assert_eq!(apx(&["count", "--circuit", &path, "--delta", "0"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let dir = scratch("determinism");
    let c = write(&dir, "c.json", &Circuit::parity(6).to_json());
    let runs = [
        vec!["count", "--circuit", c.as_str(), "--oracle", "sample", "--seed", "7"],
        vec!["rv", "verify", "--seed", "3"],
        vec!["selftest", "quick", "--seed", "5"],
    ];
    for args in runs {
        let a = apx(&args);
        let b = apx(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn out_flag_and_input_roundtrips() {
    let dir = scratch("roundtrip");
    let c = Circuit::threshold_less_than(4, 11).unwrap();
    let path = write(&dir, "c.json", &c.to_json());
    let text = fs::read_to_string(&path).unwrap();
    let back = Circuit::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    let out_path = dir.join("report.json");
    let out = apx(&["count", "--circuit", &path, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["probability"], "11/16");

    let rf = refuter_file(3, 4, (1, 4));
    let f: apx::tfnp::RefuterInstanceFile = serde_json::from_str(&rf).unwrap();
    let again = RefuterInstance::from_file(&f).unwrap().to_file().unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), rf);

    let ac0 =
        LayeredAc0::random_depth2(6, 5, 3, &mut <rand_chacha::ChaCha20Rng as rand::SeedableRng>::seed_from_u64(1))
            .unwrap();
    let file = serde_json::to_string(&ac0.to_file()).unwrap();
    let parsed: apx::ac0::LayeredAc0File = serde_json::from_str(&file).unwrap();
    assert_eq!(LayeredAc0::from_file(&parsed).unwrap(), ac0);
}

#[test]
fn restriction_and_parity_commands() {
    let dir = scratch("restrict");
    let or4 =
        Knf::new(Connective::Dnf, (1..=4).map(|v| Clause::from_literals([Literal::pos(v)])).collect(), 1).unwrap();
    let fpath = write(&dir, "f.json", &serde_json::to_string(&vec![or4]).unwrap());
    let out = apx(&["restrict", "select", "--formulas", &fpath, "--n", "4", "--t", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = apx(&["restrict", "apply", "--formulas", &fpath, "--restriction", "1***"]);
    assert_eq!(out.status.code(), Some(0));
    let out = apx(&["restrict", "pipeline", "--formulas", &fpath, "--n", "4", "--t", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let null = LayeredAc0::single_gate(5, GateKind::Or, vec![]).unwrap();
    let cpath = write(&dir, "null.json", &serde_json::to_string(&null.to_file()).unwrap());
    let out = apx(&["parity", "separate", "--circuit", &cpath]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let x = apx::bits::parse_bits(r["x"].as_str().unwrap()).unwrap();
    assert!(apx::bits::parity(&x));
}

#[test]
fn cap_override_from_environment() {
    let dir = scratch("cap");
    let path = write(&dir, "c.json", &Circuit::parity(8).to_json());
    let out = Command::new(env!("CARGO_BIN_EXE_apx"))
        .args(["count", "--circuit", &path])
        .env("APX_CAP", "4")
        .output()
        .unwrap();
    assert_ne!(out.status.code(), Some(0));
    let ok = Command::new(env!("CARGO_BIN_EXE_apx"))
        .args(["count", "--circuit", &path])
        .env("APX_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["cap"], 8);
}
