//! Command-line front end for `strandc-core`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage, I/O, unsupported input (e.g. unimolecular reactions), failed audit |
//! | 2 | reactant-ordering violation, or no repair exists under `--fix-order` |
//! | 3 | CRN parse error |
//! | 4 | `check` found spurious interactions |
//! | 5 | `simulate` stop condition can never be met |

pub mod cli;
pub mod dot;
pub mod export;

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use strandc_core::analyzer::{
    enumerate_interactions, explain, AnalyzerOptions, Classification, GcMode,
};
use strandc_core::compiler::{compile_crn, CompileError, CompileOptions, DsdSystem};
use strandc_core::crn::{parse_crn, Crn};
use strandc_core::sim::{
    audit_trajectory, build_ssa_network, map_state, simulate, LowReaction, SsaOptions, Stop,
    StopReason, SystemState, Trajectory,
};

use cli::{CheckArgs, Cli, Command, CompileArgs, SimulateArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ORDERING: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_SPURIOUS: i32 = 4;
pub const EXIT_STOP: i32 = 5;

/// A diagnostic plus the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs one command. Results go to `out` (or the `-o` file), diagnostics
/// to `err`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Compile(a) => cmd_compile(&a, out, err),
        Command::Check(a) => cmd_check(&a, out, err),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::ExportDot(a) => cmd_export_dot(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "strandc: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn load(args: &CompileArgs) -> Result<Crn, Failure> {
    let text = read_input(&args.input)?;
    let crn = parse_crn(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}:{e}", args.input.display())))?;
    if let Some(init) = &args.init {
        if let Some(s) = init.keys().find(|s| !crn.species().contains(*s)) {
            return Err(Failure::new(
                EXIT_FAILURE,
                format!("--init names {s}, which the network does not use"),
            ));
        }
    }
    Ok(crn)
}

fn compile(args: &CompileArgs, crn: &Crn) -> Result<DsdSystem, Failure> {
    let opts = CompileOptions {
        fix_order: args.fix_order,
        fuel_count: args.fuel_count,
        initial: args.init.clone().unwrap_or_default(),
        sabotage: args.sabotage.map(Into::into),
        ..Default::default()
    };
    compile_crn(crn, &opts).map_err(|e| {
        let code = match e {
            CompileError::Ordering(_) | CompileError::Infeasible(_) => EXIT_ORDERING,
            CompileError::Arity(_) | CompileError::MissingToehold(_) => EXIT_FAILURE,
        };
        let hint = if matches!(e, CompileError::Ordering(_)) {
            "\n(rerun with --fix-order to swap reactants where possible)"
        } else {
            ""
        };
        Failure::new(code, format!("{e}{hint}"))
    })
}

fn load_and_compile(args: &CompileArgs) -> Result<DsdSystem, Failure> {
    compile(args, &load(args)?)
}

fn emit(args: &CompileArgs, out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &args.output {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
    .map_err(|e| {
        let target = args
            .output
            .as_deref()
            .map_or("standard output".into(), |p| p.display().to_string());
        Failure::new(EXIT_FAILURE, format!("{target}: {e}"))
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("export types serialize");
    s.push('\n');
    s
}

fn note_sabotage(sys: &DsdSystem, err: &mut dyn Write) {
    if let Some(n) = &sys.sabotage {
        let _ = writeln!(err, "sabotage {}: {}", n.kind.name(), n.description);
    }
}

pub fn cmd_compile(args: &CompileArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let sys = load_and_compile(args)?;
    note_sabotage(&sys, err);
    emit(args, out, &to_json(&export::system_export(&sys)))?;
    let _ = writeln!(
        err,
        "compiled {} reactions with {} linker toehold label(s)",
        sys.gadgets.len(),
        sys.assignment.label_count()
    );
    Ok(EXIT_OK)
}

/// Human-readable report: the sabotage note, one line per event, and a
/// summary that is present even when there are no events.
pub fn report_text(sys: &DsdSystem, report: &strandc_core::analyzer::CrosstalkReport) -> String {
    let mut s = String::new();
    if let Some(n) = &sys.sabotage {
        let _ = writeln!(s, "# sabotage {}: {}", n.kind.name(), n.description);
    }
    let body = explain(report);
    if body.is_empty() {
        let _ = writeln!(
            s,
            "summary (gc {}): 0 events, 0 intended, 0 reverse, 0 spurious",
            report.gc.name()
        );
    } else {
        s.push_str(&body);
    }
    s
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let sys = load_and_compile(&args.compile)?;
    let report = enumerate_interactions(&sys, &AnalyzerOptions { gc: args.gc.into() });
    emit(&args.compile, out, &report_text(&sys, &report))?;
    if let Some(path) = &args.report {
        std::fs::write(path, to_json(&export::report_export(&report, &sys)))
            .map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    }
    if report.spurious_count > 0 {
        let _ = writeln!(
            err,
            "{} spurious interaction(s); {} intended",
            report.spurious_count,
            report.count(Classification::Intended)
        );
        return Ok(EXIT_SPURIOUS);
    }
    Ok(EXIT_OK)
}

fn stop_condition(args: &SimulateArgs) -> Stop {
    match (args.max_steps, args.max_time) {
        (Some(n), _) => Stop::MaxSteps(n),
        (None, Some(t)) => Stop::MaxTime(t),
        (None, None) => Stop::Quiescence,
    }
}

fn format_network(net: &[LowReaction]) -> String {
    let mut s = format!("# network: {} reactions\n", net.len());
    let side = |v: &[strandc_core::compiler::Entity]| {
        if v.is_empty() {
            "0".to_owned()
        } else {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" + ")
        }
    };
    for (i, r) in net.iter().enumerate() {
        let _ = writeln!(
            s,
            "#   {i} {}: {} -> {} (rate {})",
            r.label,
            side(&r.reactants),
            side(&r.products),
            r.rate
        );
    }
    s
}

/// One trajectory as text: a header, one tab-separated line per step
/// (index, time, reaction label, delta), then the stop reason, the audit
/// verdict and the final mapped state. Times use six decimals.
pub fn format_trajectory(
    sys: &DsdSystem,
    net: &[LowReaction],
    traj: &Trajectory,
    audit: Option<&str>,
) -> Result<String, Failure> {
    let mut s = format!("# seed {}\nstep\ttime\treaction\tdelta\n", traj.seed);
    for (i, step) in traj.steps.iter().enumerate() {
        let delta: Vec<String> = step
            .delta
            .iter()
            .map(|(e, d)| format!("{e} {d:+}"))
            .collect();
        let _ = writeln!(
            s,
            "{}\t{:.6}\t{}\t{}",
            i + 1,
            step.time,
            net[step.reaction].label,
            delta.join("; ")
        );
    }
    let reason = match traj.reason {
        StopReason::Quiescent => "quiescent",
        StopReason::MaxSteps => "max-steps",
        StopReason::MaxTime => "max-time",
    };
    let _ = writeln!(
        s,
        "# stop: {reason} at time {:.6} after {} steps",
        traj.final_state.time,
        traj.steps.len()
    );
    if let Some(a) = audit {
        let _ = writeln!(s, "# audit: {a}");
    }
    let mapped =
        map_state(sys, &traj.final_state).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    let species: Vec<String> = mapped
        .species
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(s, "final {}", species.join(" "));
    let flight: Vec<String> = mapped
        .in_flight
        .iter()
        .filter(|(_, &v)| v > 0)
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(
        s,
        "in_flight {}",
        if flight.is_empty() {
            "-".into()
        } else {
            flight.join(" ")
        }
    );
    Ok(s)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let stop = stop_condition(args)
        .validate()
        .map_err(|e| Failure::new(EXIT_STOP, e.to_string()))?;
    let sys = load_and_compile(&args.compile)?;
    note_sabotage(&sys, err);
    let gc: GcMode = args.gc.into();
    let opts = SsaOptions {
        gc,
        include_spurious: args.include_spurious,
        rate_overrides: args.rate.iter().cloned().collect(),
    };
    let net = build_ssa_network(&sys, &opts);
    if let Some((label, _)) = args
        .rate
        .iter()
        .find(|(l, _)| !net.iter().any(|r| &r.label == l))
    {
        return Err(Failure::new(
            EXIT_FAILURE,
            format!("--rate names unknown reaction {label}"),
        ));
    }
    let init = SystemState::initial(&sys);
    let seeds: Vec<u64> = (0..args.trajectories)
        .map(|i| args.seed.wrapping_add(i))
        .collect();
    let runs: Vec<Result<String, Failure>> = seeds
        .par_iter()
        .map(|&seed| {
            let traj = simulate(&net, &init, seed, stop)
                .map_err(|e| Failure::new(EXIT_STOP, e.to_string()))?;
            let audit = if args.include_spurious {
                None
            } else {
                let done = audit_trajectory(&sys, &net, &init, &traj)
                    .map_err(|e| Failure::new(EXIT_FAILURE, format!("seed {seed}: {e}")))?;
                let mut a = String::from("ok");
                for (r, n) in &done {
                    let _ = write!(a, ", r{r} completed {n}");
                }
                Some(a)
            };
            format_trajectory(&sys, &net, &traj, audit.as_deref())
        })
        .collect();

    let mut text = format_network(&net);
    for r in runs {
        text.push_str(&r?);
    }
    emit(&args.compile, out, &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_export_dot(args: &CompileArgs, out: &mut dyn Write) -> Outcome {
    let sys = load_and_compile(args)?;
    emit(args, out, &dot::render(&sys))?;
    Ok(EXIT_OK)
}
