use std::process::{Command, Output};

use serde_json::Value;

fn ks_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ks-lab"))
        .args(args)
        .env_remove("KS_LAB_ORDER")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> (String, Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = ks_lab(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (text, value, out.status.code().unwrap())
}

#[test]
fn rigid_star_zero() {
    let (_, v, code) = json_of(&["rigidity", "scan", "--type", "A", "--rank", "1", "--star-list", "0", "--order", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["items"][0]["verdict"], "rigid-consistent");
    assert_eq!(v["order"], 12);
}

#[test]
fn obstructed_star_third() {
    let (_, v, code) = json_of(&["rigidity", "scan", "--type", "A", "--rank", "1", "--star-list", "1/3"]);
    assert_eq!(code, 0);
    assert_eq!(v["items"][0]["verdict"], "obstructed");
    assert_eq!(v["items"][0]["obstruction_trace"], "2/3");
    assert_eq!(v["items"][0]["certificate"]["trace_value"], "2/3");
}

#[test]
fn expectation_mismatch_exits_two() {
    let out = ks_lab(&["rigidity", "scan", "--star-list", "1/3", "--order", "8", "--expect", "rigid"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ks_lab(&["rigidity", "scan", "--star-list", "0", "--order", "8", "--expect", "rigid"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ks_lab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ks_lab(&["selftest", "--order", "3"]).status.code(), Some(1));
    assert_eq!(ks_lab(&["algebra", "show", "--type", "B"]).status.code(), Some(1));
    assert_eq!(ks_lab(&["gauge", "fix", "--potential", "z + + 1"]).status.code(), Some(1));
}

#[test]
fn order_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ks-lab"))
        .args(["rigidity", "scan", "--star-list", "2", "--format", "json"])
        .env("KS_LAB_ORDER", "6")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 6);
    let out = Command::new(env!("CARGO_BIN_EXE_ks-lab"))
        .args(["selftest"])
        .env("KS_LAB_ORDER", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_round_trips_byte_for_byte() {
    let cases: [&[&str]; 7] = [
        &["algebra", "show", "--type", "C", "--rank", "2"],
        &["blend", "verify", "--h", "3", "--order", "12"],
        &["gauge", "fix", "--h", "2", "--potential", "z - 1/4 z^-2 + 3 z^-5", "--floor", "-12"],
        &["dress", "wk", "--type", "A", "--rank", "1", "--order", "8"],
        &["rigidity", "scan", "--star-list", "0,1/4", "--samples", "1", "--order", "8"],
        &["witt", "check", "--bound", "2"],
        &["selftest"],
    ];
    for args in cases {
        let (text, value, code) = json_of(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(value["schema"], "ks-lab/1");
        let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn seeded_runs_are_identical() {
    let args = ["rigidity", "scan", "--type", "A", "--rank", "2", "--star-list", "0,1/3", "--samples", "2", "--order", "8", "--seed", "5"];
    let a = ks_lab(&args);
    let b = ks_lab(&args);
    assert_eq!(a.stdout, b.stdout);
    let (_, v, _) = json_of(&args);
    let items = v["items"].as_array().unwrap();
    assert_eq!(items.len(), 6);
    let stars: Vec<&str> = items.iter().map(|i| i["star"].as_str().unwrap()).collect();
    assert_eq!(stars, ["0", "0", "0", "1/3", "1/3", "1/3"]);
}

#[test]
fn dress_and_blend_commands_succeed() {
    let out = ks_lab(&["dress", "cartan", "--type", "A", "--rank", "2", "--H", "1/2,-1/3,-1/6", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("stabilization residual zero: ok"));
    let (_, v, code) = json_of(&["dress", "wk", "--type", "A", "--rank", "2", "--order", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["unblended_stable"], true);
    let (_, v, code) = json_of(&["blend", "verify", "--h", "2", "--order", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["c"], "-1/4");
    assert_eq!(v["passed"], true);
}

#[test]
fn gauge_fix_accepts_whole_operators() {
    let (_, v, code) = json_of(&["gauge", "fix", "--h", "2", "--operator", "(1/2 z^-1) D + z - 1/4 z^-2 + 3 z^-5", "--floor", "-10"]);
    assert_eq!(code, 0);
    assert_eq!(v["input"]["mode"], "scalar");
    assert_eq!(v["input"]["deriv_coeff"], "1/2 z^-1");
    assert_eq!(v["fixed"]["potential"], "z - 1/4 z^-2 + O(z^-11)");
    assert_eq!(v["gamma"], "1 + 2 z^-3 + 2 z^-6 + O(z^-9)");
    let (_, w, _) = json_of(&["gauge", "fix", "--h", "2", "--potential", "z - 1/4 z^-2 + 3 z^-5", "--floor", "-10"]);
    assert_eq!(v, w);
    let both = ks_lab(&["gauge", "fix", "--potential", "z", "--operator", "D + z"]);
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn scan_items_carry_dressings() {
    let (_, v, code) = json_of(&["rigidity", "scan", "--star-list", "0", "--order", "8"]);
    assert_eq!(code, 0);
    let d = &v["items"][0]["dressing"];
    assert_eq!(d["residual_zero"], true);
    assert!(d["a"].is_string());
    assert!(d["steps"].as_u64().unwrap() > 0);
}

#[test]
fn selftest_is_green() {
    let out = ks_lab(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("selftest: ok"));
}
