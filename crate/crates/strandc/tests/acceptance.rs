//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strandc_core::analyzer::{enumerate_interactions, AnalyzerOptions, GcMode};
use strandc_core::compiler::{allocate_toeholds, buffer_sets, compile_crn, CompileOptions};
use strandc_core::crn::{parse_crn, serialize_crn, Crn, Species};
use strandc_core::ordering::{solve_ordering, validate_ordering};
use strandc_core::sim::{
    audit_trajectory, build_ssa_network, map_state, simulate, SsaOptions, Stop, StopReason,
    SystemState,
};

const BIN: &str = env!("CARGO_BIN_EXE_strandc");

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn sp(s: &str) -> Species {
    Species::new(s).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn strandc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("run strandc")
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Random network: 1..=`max_reactions` reactions over `species` names,
/// arity 2 or 3, up to two products.
fn random_crn(rng: &mut ChaCha8Rng, max_reactions: usize, species: usize) -> Crn {
    let names: Vec<Species> = (0..species).map(|i| sp(&format!("S{i}"))).collect();
    let n = rng.random_range(1..=max_reactions);
    Crn::from_reactions((0..n).map(|_| {
        let arity = rng.random_range(2..=3);
        let products = rng.random_range(0..=2);
        let mut pick = |k| {
            (0..k)
                .map(|_| names[rng.random_range(0..species)].clone())
                .collect::<Vec<_>>()
        };
        (pick(arity), pick(products))
    }))
    .unwrap()
}

fn ordering_ok_directly(crn: &Crn) -> bool {
    let firsts: Vec<&Species> = crn.reactions().iter().map(|r| &r.reactants[0]).collect();
    crn.reactions()
        .iter()
        .filter(|r| r.reactants.len() == 3)
        .all(|r| !firsts.contains(&&r.reactants[1]))
}

fn rule_soundness() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    let mut events = 0;
    while checked < 200 {
        let crn = random_crn(&mut rng, 6, 6);
        if !validate_ordering(&crn).is_empty() {
            continue;
        }
        let sys =
            compile_crn(&crn, &CompileOptions::default()).map_err(|e| format!("{crn}: {e}"))?;
        for gc in [GcMode::Assumed, GcMode::Off] {
            let r = enumerate_interactions(&sys, &AnalyzerOptions { gc });
            if r.spurious_count != 0 {
                return Err(format!(
                    "{} spurious (gc {}) on\n{crn}",
                    r.spurious_count,
                    gc.name()
                ));
            }
            events += r.events.len();
        }
        checked += 1;
    }
    let t = start.elapsed();
    if t > Duration::from_secs(30) {
        return Err(format!("took {}", secs(t)));
    }
    Ok(format!(
        "200 ordering-valid CRNs, {events} events, 0 spurious in both gc modes, {}",
        secs(t)
    ))
}

fn str_of(v: &serde_json::Value) -> &str {
    v.as_str().unwrap_or("?")
}

fn check_report(sabotage: &str, tag: &str) -> Result<(i32, serde_json::Value), String> {
    let report = std::env::temp_dir().join(format!(
        "strandc-acceptance-{}-{tag}.json",
        std::process::id()
    ));
    let o = strandc(&[
        "check",
        data("nand.crn").to_str().unwrap(),
        "--sabotage",
        sabotage,
        "--report",
        report.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&report).map_err(|e| format!("no report: {e}"))?;
    let doc = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), doc))
}

fn shared_toehold_failure() -> Verdict {
    let crn = parse_crn(&std::fs::read_to_string(data("nand.crn")).unwrap()).unwrap();
    let (code, doc) = check_report("share-linker-toehold", "share")?;
    if code != 4 {
        return Err(format!("exit code {code}"));
    }
    let pair: Vec<usize> = serde_json::from_value(doc["sabotage"]["reactions"].clone()).unwrap();
    let [a, b] = pair[..] else {
        return Err("sabotage changed nothing".into());
    };
    let shared = crn.reactions()[a].reactants.last().unwrap();
    if crn.reactions()[b].reactants.last().unwrap() != shared {
        return Err(format!("r{a} and r{b} do not share a final reactant"));
    }
    let hits: Vec<String> = doc["events"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["classification"] == "spurious")
        .filter(|e| {
            let target = e["reaction"].as_u64().unwrap() as usize;
            let other = if target == a { b } else { a };
            (target == a || target == b)
                && e["displaced_name"] == shared.as_str()
                && e["invader_name"] == format!("L_r{other}")
        })
        .map(|e| {
            format!(
                "{} displaces {} from g1_r{}",
                str_of(&e["invader_name"]),
                str_of(&e["displaced_name"]),
                e["reaction"]
            )
        })
        .collect();
    if hits.is_empty() {
        return Err("no spurious event where the other reaction's linker displaces the shared final reactant".into());
    }
    Ok(format!("exit 4; {}", hits.join(", ")))
}

fn linker_equals_t_failure() -> Verdict {
    let crn = parse_crn(&std::fs::read_to_string(data("nand.crn")).unwrap()).unwrap();
    let (code, doc) = check_report("linker-equals-t", "eqt")?;
    if code != 4 {
        return Err(format!("exit code {code}"));
    }
    let hits: Vec<String> = doc["events"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["classification"] == "spurious")
        .filter(|e| {
            let r = &crn.reactions()[e["reaction"].as_u64().unwrap() as usize];
            let non_final = &r.reactants[..r.reactants.len() - 1];
            non_final.iter().any(|s| e["displaced_name"] == s.as_str())
        })
        .map(|e| {
            format!(
                "{} displaces non-final {} from g1_r{}",
                str_of(&e["invader_name"]),
                str_of(&e["displaced_name"]),
                e["reaction"]
            )
        })
        .collect();
    let example = hits.iter().find(|h| h.starts_with("L_")).or(hits.first());
    match example {
        Some(h) => Ok(format!("exit 4; {} such event(s), e.g. {h}", hits.len())),
        None => Err("no spurious event displaces a non-final reactant".into()),
    }
}

/// Set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            go(n, cur, out);
            cur.pop();
        }
    }
    go(n, &mut cur, &mut out);
    out
}

/// Fewest labels with distinct labels inside every group, by trying every
/// labelling with k labels for growing k.
fn brute_force_labels(groups: &[usize]) -> usize {
    let n = groups.len();
    if n == 0 {
        return 0;
    }
    (1..=n)
        .find(|&k| {
            (0..k.pow(n as u32)).any(|code| {
                let l: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
                (0..n).all(|i| (i + 1..n).all(|j| groups[i] != groups[j] || l[i] != l[j]))
            })
        })
        .unwrap()
}

fn allocator_minimality() -> Verdict {
    let mut structures = 0;
    for n in 0..=5 {
        for groups in partitions(n) {
            for arities in 0..1u32 << n {
                let crn = Crn::from_reactions((0..n).map(|i| {
                    let mut rs = vec![sp(&format!("P{i}"))];
                    if arities >> i & 1 == 1 {
                        rs.push(sp(&format!("Q{i}")));
                    }
                    rs.push(sp(&format!("F{}", groups[i])));
                    (rs, vec![])
                }))
                .unwrap();
                let asg = allocate_toeholds(&crn);
                if !asg.faults(&crn).is_empty() {
                    return Err(format!("invalid assignment for groups {groups:?}"));
                }
                let want = brute_force_labels(&groups);
                if asg.label_count() != want {
                    return Err(format!(
                        "groups {groups:?}: {} labels, brute force {want}",
                        asg.label_count()
                    ));
                }
                structures += 1;
            }
        }
    }
    let o = strandc(&["compile", data("nand.crn").to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    let count = &doc["assignment"]["label_count"];
    if count != 3 {
        return Err(format!("bundled example uses {count} labels, expected 3"));
    }
    Ok(format!("{structures} group/arity structures match brute force; bundled example uses exactly 3 labels"))
}

fn ordering_iff_disjoint() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut valid = 0;
    for _ in 0..500 {
        let crn = random_crn(&mut rng, 6, 5);
        let ok = validate_ordering(&crn).is_empty();
        let sys = compile_crn(
            &crn,
            &CompileOptions {
                force: true,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let (b1, b2) = buffer_sets(&sys);
        if ok != b1.is_disjoint(&b2) {
            return Err(format!("counterexample:\n{crn}"));
        }
        valid += ok as usize;
    }
    Ok(format!(
        "500 random CRNs ({valid} valid, {} violating), 0 counterexamples",
        500 - valid
    ))
}

/// Every reactant tuple of arity 2 or 3 over `species` names.
fn reactant_tuples(species: &[Species]) -> Vec<Vec<Species>> {
    let mut out = Vec::new();
    for a in species {
        for b in species {
            out.push(vec![a.clone(), b.clone()]);
            for c in species {
                out.push(vec![a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

/// Feasible iff some choice of first/second swaps over the termolecular
/// reactions satisfies the rule.
fn exhaustive_feasible(reactions: &[&Vec<Species>]) -> bool {
    let ter: Vec<usize> = (0..reactions.len())
        .filter(|&i| reactions[i].len() == 3)
        .collect();
    (0u32..1 << ter.len()).any(|mask| {
        let roles: Vec<(&Species, Option<&Species>)> = reactions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let swapped = ter
                    .iter()
                    .position(|&t| t == i)
                    .is_some_and(|k| mask >> k & 1 == 1);
                let (first, second) = if swapped {
                    (&r[1], &r[0])
                } else {
                    (&r[0], &r[1])
                };
                (first, (r.len() == 3).then_some(second))
            })
            .collect();
        roles
            .iter()
            .all(|(_, second)| second.is_none_or(|s| roles.iter().all(|(f, _)| *f != s)))
    })
}

fn solver_completeness() -> Verdict {
    let start = Instant::now();
    let species: Vec<Species> = ["A", "B", "C", "D"].iter().map(|s| sp(s)).collect();
    let tuples = reactant_tuples(&species);
    let mut checked = 0u64;
    let mut infeasible = 0u64;
    let mut check = |rs: &[&Vec<Species>]| -> Result<(), String> {
        let crn = Crn::from_reactions(rs.iter().map(|r| ((*r).clone(), vec![]))).unwrap();
        let solver = solve_ordering(&crn);
        let truth = exhaustive_feasible(rs);
        if solver.is_ok() != truth {
            return Err(format!("mismatch on\n{crn}"));
        }
        if let Ok(fixed) = solver {
            if !ordering_ok_directly(&fixed) {
                return Err(format!("invalid repair of\n{crn}"));
            }
        }
        checked += 1;
        infeasible += (!truth) as u64;
        Ok(())
    };
    check(&[])?;
    for a in &tuples {
        check(&[a])?;
        for b in &tuples {
            check(&[a, b])?;
            for c in &tuples {
                check(&[a, b, c])?;
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(10) {
        return Err(format!("{checked} CRNs agree but took {}", secs(t)));
    }
    Ok(format!(
        "{checked} CRNs ({infeasible} infeasible), 0 mismatches, {}",
        secs(t)
    ))
}

fn simulation_soundness() -> Verdict {
    let ab = compile_crn(
        &parse_crn("A + B -> C").unwrap(),
        &CompileOptions {
            fuel_count: 1,
            initial: [(sp("A"), 1), (sp("B"), 1)].into_iter().collect(),
            ..Default::default()
        },
    )
    .unwrap();
    let net = build_ssa_network(&ab, &SsaOptions::default());
    let init = SystemState::initial(&ab);
    let want: BTreeMap<Species, u64> = [(sp("A"), 0), (sp("B"), 0), (sp("C"), 1)]
        .into_iter()
        .collect();
    for seed in 0..100 {
        let t = simulate(&net, &init, seed, Stop::Quiescence).unwrap();
        let m = map_state(&ab, &t.final_state).map_err(|e| e.to_string())?;
        if t.reason != StopReason::Quiescent
            || m.species != want
            || m.in_flight.values().any(|&n| n > 0)
        {
            return Err(format!(
                "A + B -> C, seed {seed}: {:?} {:?}",
                t.reason, m.species
            ));
        }
    }

    let crn = parse_crn(&std::fs::read_to_string(data("nand.crn")).unwrap()).unwrap();
    let inputs: BTreeMap<Species, u64> = crn
        .reactions()
        .iter()
        .flat_map(|r| r.reactants.iter().cloned())
        .map(|s| (s, 20))
        .collect();
    let sys = compile_crn(
        &crn,
        &CompileOptions {
            initial: inputs,
            ..Default::default()
        },
    )
    .unwrap();
    let net = build_ssa_network(&sys, &SsaOptions::default());
    let init = SystemState::initial(&sys);
    let mut completions = 0;
    let mut steps = 0;
    for seed in 0..100 {
        let t = simulate(&net, &init, seed, Stop::Quiescence).unwrap();
        if t.reason != StopReason::Quiescent {
            return Err(format!("bundled example, seed {seed}: {:?}", t.reason));
        }
        let done =
            audit_trajectory(&sys, &net, &init, &t).map_err(|e| format!("seed {seed}: {e}"))?;
        completions += done.values().sum::<u64>();
        steps += t.steps.len();
    }
    Ok(format!(
        "A + B -> C: 100/100 seeds end at A=0 B=0 C=1; bundled example: 100/100 seeds quiesce and pass the audit \
         ({completions} completed pathways over {steps} steps)"
    ))
}

fn determinism_and_roundtrip() -> Verdict {
    let nand = data("nand.crn");
    let nand = nand.to_str().unwrap();
    let report = std::env::temp_dir().join(format!(
        "strandc-acceptance-{}-det.json",
        std::process::id()
    ));
    let report = report.to_str().unwrap();
    let runs: [&[&str]; 5] = [
        &["compile", nand, "--init", "A0=3,B1=2"],
        &[
            "check",
            nand,
            "--sabotage",
            "share-linker-toehold",
            "--report",
            report,
        ],
        &[
            "simulate",
            nand,
            "--init",
            "A0=5,A1=5,B0=5,B1=5,O0=5,Rep=5",
            "--seed",
            "42",
            "--trajectories",
            "3",
        ],
        &["export-dot", nand],
        &["check", nand, "--gc", "off"],
    ];
    for args in runs {
        let a = strandc(args);
        let ra = std::fs::read(report).unwrap_or_default();
        let b = strandc(args);
        let rb = std::fs::read(report).unwrap_or_default();
        if a.stdout != b.stdout || a.status != b.status || ra != rb {
            return Err(format!(
                "output differs across runs: strandc {}",
                args.join(" ")
            ));
        }
        if a.stdout.is_empty() {
            return Err(format!("no output: strandc {}", args.join(" ")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let crn = random_crn(&mut rng, 8, 6);
        let text = serialize_crn(&crn);
        let back = parse_crn(&text).map_err(|e| format!("{e} on\n{text}"))?;
        if !back.structurally_eq(&crn) || serialize_crn(&back) != text {
            return Err(format!("round-trip changed\n{text}"));
        }
    }
    Ok("5 CLI invocations byte-identical across runs; parse after serialize is the identity on 1000 random CRNs".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("rule soundness", rule_soundness),
        (
            "shared-toehold failure reproduction",
            shared_toehold_failure,
        ),
        (
            "linker toehold equal to t failure reproduction",
            linker_equals_t_failure,
        ),
        ("allocator minimality", allocator_minimality),
        ("ordering iff buffer disjointness", ordering_iff_disjoint),
        ("ordering solver completeness", solver_completeness),
        ("simulation soundness", simulation_soundness),
        ("determinism and round-trip", determinism_and_roundtrip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
