use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_strandc");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("strandc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn strandc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn compile_writes_system_file() {
    let out = std::env::temp_dir().join(format!("strandc-cli-{}-ab.json", std::process::id()));
    let o = strandc(&[
        "compile",
        data("ab.crn").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for key in [
        "domains",
        "strands",
        "complexes",
        "assignment",
        "counts",
        "gc_sinks",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["assignment"]["label_count"], 1);
}

#[test]
fn ordering_violation_exits_2_and_lists_it() {
    let p = scratch("viol.crn", "X + Y + Z1 -> P\nW + X + V -> Q\n");
    let o = strandc(&["compile", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o)
        .contains("X is the first reactant of r0 and the second reactant of termolecular r1"));
    assert!(o.stdout.is_empty());

    let o = strandc(&["compile", p.to_str().unwrap(), "--fix-order"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("\"X + W + V -> Q\""));
}

#[test]
fn infeasible_repair_exits_2() {
    let p = scratch("inf.crn", "X + X + Z -> W\n");
    let o = strandc(&["compile", p.to_str().unwrap(), "--fix-order"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("r0"));
}

#[test]
fn parse_errors_exit_3() {
    let p = scratch("bad.crn", "A + B + C + D -> E\n");
    for cmd in ["compile", "check", "simulate", "export-dot"] {
        let o = strandc(&[cmd, p.to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{cmd}");
        assert!(stderr(&o).contains("[arity]"));
    }
}

#[test]
fn unimolecular_and_usage_errors_exit_1() {
    let p = scratch("uni.crn", "A -> B\n");
    assert_eq!(code(&strandc(&["compile", p.to_str().unwrap()])), 1);
    assert_eq!(code(&strandc(&["compile", "--no-such-flag"])), 1);
    assert_eq!(code(&strandc(&["compile", "/no/such/file.crn"])), 1);
    let ab = data("ab.crn");
    assert_eq!(
        code(&strandc(&[
            "compile",
            ab.to_str().unwrap(),
            "--init",
            "Q=1"
        ])),
        1
    );
    assert_eq!(
        code(&strandc(&[
            "compile",
            ab.to_str().unwrap(),
            "--fuel-count",
            "0"
        ])),
        1
    );
    assert_eq!(code(&strandc(&["--help"])), 0);
}

#[test]
fn clean_check_reports_zero_spurious() {
    let o = strandc(&["check", data("nand.crn").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 spurious"));
    let o = strandc(&["check", data("nand.crn").to_str().unwrap(), "--gc", "off"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("summary (gc off)"));
}

#[test]
fn empty_network_checks_clean() {
    let p = scratch("empty.crn", "# nothing\n");
    let o = strandc(&["check", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "summary (gc assumed): 0 events, 0 intended, 0 reverse, 0 spurious\n"
    );
}

#[test]
fn shared_toehold_sabotage_names_final_reactant() {
    let o = strandc(&[
        "check",
        data("nand.crn").to_str().unwrap(),
        "--sabotage",
        "share-linker-toehold",
    ]);
    assert_eq!(code(&o), 4);
    let text = stdout(&o);
    assert!(
        text.contains("spurious  shared-linker-toehold      L_r1 [x_O0 t1 j1] -> g1_r0@FinalBound")
    );
    assert!(text.contains("displaces O0 [t x_O0]"));
}

#[test]
fn linker_equals_t_sabotage_names_non_final_reactant() {
    let o = strandc(&[
        "check",
        data("nand.crn").to_str().unwrap(),
        "--sabotage",
        "linker-equals-t",
    ]);
    assert_eq!(code(&o), 4);
    // O0 is the first (non-final) reactant of r3
    assert!(
        stdout(&o).contains("L_r0 [x_O0 t j0] -> g1_r3@R1Bound site t*@0.2 displaces O0 [t x_O0]")
    );
}

#[test]
fn swap_order_sabotage_compiles_and_collides() {
    let nand = data("nand.crn");
    let o = strandc(&["check", nand.to_str().unwrap(), "--sabotage", "swap-order"]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("buffer-identity-collision"));
    let o = strandc(&[
        "compile",
        nand.to_str().unwrap(),
        "--sabotage",
        "swap-order",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"B0 + A1 + O0 -> A1 + B0 + O1\""));
}

#[test]
fn check_writes_structured_report() {
    let out = std::env::temp_dir().join(format!("strandc-cli-{}-report.json", std::process::id()));
    let o = strandc(&[
        "check",
        data("nand.crn").to_str().unwrap(),
        "--sabotage",
        "share-linker-toehold",
        "--report",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["spurious_count"], 2);
    assert_eq!(doc["rule_counts"]["shared-linker-toehold"], 2);
    assert_eq!(doc["sabotage"]["reactions"], serde_json::json!([0, 1]));
}

#[test]
fn simulate_a_plus_b() {
    let ab = data("ab.crn");
    let args = [
        "simulate",
        ab.to_str().unwrap(),
        "--init",
        "A=1,B=1",
        "--fuel-count",
        "1",
        "--seed",
        "7",
    ];
    let a = strandc(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let text = stdout(&a);
    assert!(text.contains("\nfinal A=0 B=0 C=1\n"));
    assert!(text.contains("# audit: ok, r0 completed 1"));
    let b = strandc(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_all_zero_is_empty() {
    let o = strandc(&["simulate", data("ab.crn").to_str().unwrap(), "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text
        .contains("step\ttime\treaction\tdelta\n# stop: quiescent at time 0.000000 after 0 steps"));
}

#[test]
fn unreachable_stop_exits_5() {
    let ab = data("ab.crn");
    assert_eq!(
        code(&strandc(&[
            "simulate",
            ab.to_str().unwrap(),
            "--max-steps",
            "0"
        ])),
        5
    );
    assert_eq!(
        code(&strandc(&[
            "simulate",
            ab.to_str().unwrap(),
            "--max-time",
            "0"
        ])),
        5
    );
    assert_eq!(
        code(&strandc(&[
            "simulate",
            ab.to_str().unwrap(),
            "--max-time=-1"
        ])),
        5
    );
}

#[test]
fn simulate_several_trajectories_in_seed_order() {
    let ab = data("ab.crn");
    let o = strandc(&[
        "simulate",
        ab.to_str().unwrap(),
        "--init",
        "A=3,B=3",
        "--seed",
        "10",
        "--trajectories",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let seeds: Vec<&str> = text.lines().filter(|l| l.starts_with("# seed")).collect();
    assert_eq!(seeds, ["# seed 10", "# seed 11", "# seed 12", "# seed 13"]);
}

#[test]
fn rate_overrides_are_checked() {
    let ab = data("ab.crn");
    let o = strandc(&["simulate", ab.to_str().unwrap(), "--rate", "r0:release=2"]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("r0:release: g1_r0@LinkerBound + g2_r0 -> spent_r0 + [t x_C] (rate 2)")
    );
    assert_eq!(
        code(&strandc(&[
            "simulate",
            ab.to_str().unwrap(),
            "--rate",
            "nope=2"
        ])),
        1
    );
}

#[test]
fn simulate_with_spurious_channels() {
    let o = strandc(&[
        "simulate",
        data("nand.crn").to_str().unwrap(),
        "--sabotage",
        "share-linker-toehold",
        "--include-spurious",
        "--init",
        "A1=2,B0=2,O0=2",
        "--seed",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("spurious"));
    assert!(!stdout(&o).contains("# audit"));
}

#[test]
fn dot_for_bimolecular_gadget() {
    let o = strandc(&["export-dot", data("ab.crn").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for (i, label) in ["t*", "x_A*", "t*", "x_B*", "t1*"].iter().enumerate() {
        assert!(
            text.contains(&format!("\"g1_r0:0:{i}\" [label=\"{label}\"];")),
            "{label}"
        );
    }
    assert!(!text.contains("buffer2"));
}

#[test]
fn dot_for_termolecular_gadget_has_buffer2() {
    let p = scratch("ter.crn", "A + B + C -> D\n");
    let o = strandc(&["export-dot", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("label=\"buffer2_r0 (buffer2)\";"));
}

#[test]
fn dot_for_empty_network() {
    let p = scratch("empty2.crn", "");
    let o = strandc(&["export-dot", p.to_str().unwrap()]);
    assert_eq!(stdout(&o), "graph strandc {\n}\n");
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(BIN)
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"A + B -> C\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 spurious"));
}
