//! Operator surface for the dichotomy engine: run proofs, re-check traces
//! against brute-force enumeration, print candidates, and scan Collatz
//! ranges.
//!
//! Exit codes: 0 success, 1 violation or counter-example found, 2 the run
//! closed/stuck/aborted, 3 usage or I/O failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use dichotomy::collatz::{descent_analysis, validate_descent_certificate, verify_range};
use dichotomy::engine::{
    run_dichotomy, Parity, ProofTrace, ScriptedProver, StepProver, Termination, TraceFile,
};
use dichotomy::oracle::cross_check;
use dichotomy::props::ExactProver;
use dichotomy::propspec::parse_prop_spec;
use dichotomy::residue::ResidueClass;

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_NO_PROGRESS: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dichotomy",
    version,
    about = "Dichotomy proofs over residue classes, with brute-force verification and Collatz tooling"
)]
struct Cli {
    /// Worker threads for range scans (1 = sequential, 0 = all cores).
    #[arg(long, global = true, env = "DICHOTOMY_THREADS", default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a dichotomy proof and record its trace.
    Run(RunArgs),
    /// Re-check a trace file against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Print the candidate counter-example recorded in a trace file.
    Candidate {
        /// Trace file to read.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Collatz range scans and descent certificates.
    Collatz {
        #[command(subcommand)]
        command: CollatzCommand,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Proposition spec: single-hole:M, multi-hole:M1,M2,..., periodic:P:bits,
    /// collatz:BUDGET, or pullback:affine:A:B:<inner>. Required for the exact
    /// prover; optional for scripted runs.
    #[arg(long)]
    prop: Option<String>,
    /// Prover: "exact" (needs --prop with a class-decidable family) or
    /// "scripted:even,odd,..." (replays the listed decisions).
    #[arg(long, default_value = "exact")]
    prover: String,
    /// Step budget. Defaults to the script length for scripted provers and
    /// to 32 for the exact prover.
    #[arg(long)]
    steps: Option<usize>,
    /// Starting class as K:R (modulus exponent, remainder); "0:0" is ℕ.
    #[arg(long, default_value = "0:0")]
    initial: String,
    /// Where to write the trace file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Consecutive odd-half proofs required at the end of the trace before
    /// the eventually-odd-only verdict is reported. Without a window no
    /// verdict is inferred.
    #[arg(long)]
    tail_window: Option<usize>,
    /// After the run, re-check the trace against enumeration below this
    /// bound (requires --prop).
    #[arg(long)]
    oracle_bound: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trace file to check.
    #[arg(long)]
    trace: PathBuf,
    /// Proposition the trace claims to prove.
    #[arg(long)]
    prop: String,
    /// Enumeration bound.
    #[arg(long, default_value_t = 65536)]
    bound: u64,
}

#[derive(Subcommand)]
enum CollatzCommand {
    /// Scan a range for numbers that fail to descend.
    Verify {
        /// First number to check (inclusive).
        #[arg(long, default_value_t = 1)]
        from: u64,
        /// End of the range (exclusive).
        #[arg(long)]
        to: u64,
        /// Step budget per number.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Compute bounded-descent certificates for all classes modulo 2^k.
    Descent {
        /// Modulus exponent k (table size 2^k).
        #[arg(short = 'k', long)]
        modulus_exponent: u32,
        /// Symbolic iteration budget per class.
        #[arg(long, default_value_t = 64)]
        step_bound: u64,
        /// Also validate every certificate on this many members per class.
        #[arg(long)]
        validate_samples: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs, not usage errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let threads = cli.threads;
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Candidate { trace } => cmd_candidate(&trace),
        Command::Collatz { command } => match command {
            CollatzCommand::Verify { from, to, budget } => {
                cmd_collatz_verify(from, to, budget, threads)
            }
            CollatzCommand::Descent {
                modulus_exponent,
                step_bound,
                validate_samples,
            } => cmd_collatz_descent(modulus_exponent, step_bound, validate_samples),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

enum ProverChoice {
    Exact,
    Scripted(Vec<Parity>),
}

fn parse_prover(text: &str) -> Result<ProverChoice, String> {
    if text == "exact" {
        return Ok(ProverChoice::Exact);
    }
    if let Some(rest) = text.strip_prefix("scripted:") {
        let script = rest
            .split(',')
            .map(|part| match part {
                "even" => Ok(Parity::Even),
                "odd" => Ok(Parity::Odd),
                other => Err(format!(
                    "scripted decisions must be \"even\" or \"odd\", got {other:?}"
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if script.is_empty() {
            return Err("scripted prover needs at least one decision".into());
        }
        return Ok(ProverChoice::Scripted(script));
    }
    Err(format!(
        "unknown prover {text:?}; use \"exact\" or \"scripted:even,odd,...\""
    ))
}

fn parse_initial(text: &str) -> Result<ResidueClass, String> {
    let (k_text, r_text) = text
        .split_once(':')
        .ok_or_else(|| format!("initial class must look like K:R, got {text:?}"))?;
    let k: u32 = k_text
        .parse()
        .map_err(|_| format!("invalid modulus exponent {k_text:?}"))?;
    let r: BigUint = r_text
        .parse()
        .map_err(|_| format!("invalid remainder {r_text:?}"))?;
    ResidueClass::new(k, r).map_err(|e| e.to_string())
}

fn describe_termination(t: &Termination) -> String {
    match t {
        Termination::Truncated { after } => format!("truncated after {after} step(s)"),
        Termination::ClosedBoth { at_step } => {
            format!("closed (both halves proven) at step {at_step}")
        }
        Termination::Stuck { at_step } => format!("stuck at step {at_step}"),
        Termination::Aborted { at_step, reason } => {
            format!("aborted at step {at_step}: {reason}")
        }
    }
}

fn print_run_summary(trace: &ProofTrace, tail_window: Option<usize>) {
    let decisions = if trace.steps.is_empty() {
        "(none)".to_string()
    } else {
        trace
            .steps
            .iter()
            .map(|s| match s.decision {
                Parity::Even => "even",
                Parity::Odd => "odd",
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("steps completed: {}", trace.completed_steps());
    println!("termination: {}", describe_termination(&trace.termination));
    println!("decisions: {decisions}");
    println!("candidate: {}", trace.candidate_prefix());
    println!("density: {}", trace.density());
    match tail_window {
        Some(window) => {
            let c = trace.classify(window);
            println!("classification (window {window}): {}", c.verdict);
            match c.last_even_step {
                Some(step) => println!("last even-half proof: step {step}"),
                None => println!("last even-half proof: never"),
            }
            println!("caveat: {}", c.caveat);
        }
        None => {
            println!("classification: not inferred (pass --tail-window to request a verdict)")
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, String> {
    let prover_choice = parse_prover(&args.prover)?;
    let initial = parse_initial(&args.initial)?;
    let prop = args
        .prop
        .as_deref()
        .map(parse_prop_spec)
        .transpose()
        .map_err(|e| e.to_string())?;
    if let Some(p) = &prop {
        println!("proposition: {}", p.name());
    }

    let (mut prover, default_steps): (Box<dyn StepProver>, usize) = match prover_choice {
        ProverChoice::Exact => {
            let prop = prop
                .clone()
                .ok_or("the exact prover needs --prop to know what to prove")?;
            let exact = ExactProver::new(prop).map_err(|e| e.to_string())?;
            println!("prover: exact");
            (Box::new(exact), 32)
        }
        ProverChoice::Scripted(script) => {
            println!("prover: scripted ({} decisions)", script.len());
            let len = script.len();
            (Box::new(ScriptedProver::new(script)), len)
        }
    };
    let max_steps = args.steps.unwrap_or(default_steps);
    if max_steps == 0 {
        return Err("--steps must be at least 1".into());
    }

    let trace = run_dichotomy(prover.as_mut(), &initial, max_steps);
    print_run_summary(&trace, args.tail_window);
    let file = TraceFile::new(trace);

    if let Some(path) = &args.out {
        fs::write(path, file.to_json())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        println!("trace written: {}", path.display());
    }

    let mut oracle_clean = true;
    if let Some(bound) = args.oracle_bound {
        let prop = prop.ok_or("--oracle-bound needs --prop to evaluate solved classes")?;
        let report = cross_check(&file, &prop, bound);
        oracle_clean = report.is_consistent();
        println!(
            "oracle check (bound {bound}): {}",
            if oracle_clean {
                "consistent".to_string()
            } else {
                format!(
                    "{} mismatches, {} solved violations, candidate agreement {}",
                    report.mismatch_count, report.violation_count, report.candidate_agreement
                )
            }
        );
    }

    if !oracle_clean {
        return Ok(EXIT_VIOLATION);
    }
    Ok(match file.trace.termination {
        Termination::Truncated { .. } => EXIT_OK,
        _ => EXIT_NO_PROGRESS,
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let text = fs::read_to_string(&args.trace)
        .map_err(|e| format!("cannot read {}: {e}", args.trace.display()))?;
    let file = TraceFile::from_json(&text)
        .map_err(|e| format!("cannot parse {}: {e}", args.trace.display()))?;
    let prop = parse_prop_spec(&args.prop).map_err(|e| e.to_string())?;
    let report = cross_check(&file, &prop, args.bound);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialization is total")
    );
    if report.is_consistent() {
        println!("oracle check: consistent");
        Ok(EXIT_OK)
    } else {
        println!(
            "oracle check: {} mismatches, {} solved violations, candidate agreement {}",
            report.mismatch_count, report.violation_count, report.candidate_agreement
        );
        Ok(EXIT_VIOLATION)
    }
}

fn cmd_candidate(path: &PathBuf) -> Result<u8, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file = TraceFile::from_json(&text)
        .map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    println!("{}", file.candidate_prefix);
    Ok(EXIT_OK)
}

fn cmd_collatz_verify(from: u64, to: u64, budget: u64, threads: usize) -> Result<u8, String> {
    if from >= to {
        return Err(format!("empty range: --from {from} is not below --to {to}"));
    }
    if budget == 0 {
        return Err("--budget must be at least 1".into());
    }
    let report = verify_range(from, to, budget, threads);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialization is total")
    );
    println!(
        "checked {} number(s) in [{}, {}): {} failure(s)",
        report.checked,
        report.lo,
        report.hi,
        report.failures.len()
    );
    Ok(if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_collatz_descent(
    modulus_exponent: u32,
    step_bound: u64,
    validate_samples: Option<u64>,
) -> Result<u8, String> {
    if modulus_exponent > 24 {
        return Err("modulus exponent above 24 exceeds desk scale".into());
    }
    if step_bound == 0 {
        return Err("--step-bound must be at least 1".into());
    }
    let cert = descent_analysis(modulus_exponent, step_bound);
    for (r, entry) in cert.entries().iter().enumerate() {
        println!("r={r}: {entry}");
    }
    println!("certified fraction: {}", cert.certified_fraction());
    if let Some(samples) = validate_samples {
        let violations = validate_descent_certificate(&cert, samples);
        if violations.is_empty() {
            println!("validation: {samples} sample(s) per certified class, all descend");
        } else {
            for v in &violations {
                println!(
                    "validation failure: r={} sample {} did not descend",
                    v.remainder, v.sample
                );
            }
            return Ok(EXIT_VIOLATION);
        }
    }
    Ok(EXIT_OK)
}
