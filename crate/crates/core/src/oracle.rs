//! Brute-force ground truth for proof traces.
//!
//! Everything the engine claims symbolically is re-derived here by explicit
//! enumeration of `[0, N)`. Membership is recomputed with direct modular
//! arithmetic on machine words — deliberately not through the residue
//! module's own operations, since independence is the point of an oracle.
//! Violations are data in the report, never exceptions: a corrupted trace is
//! a result to describe, not an error to die on.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Parity, ProofTrace, StepRecord, Termination, TraceFile};
use crate::props::{ClassDecision, Proposition, Truth};
use crate::residue::ResidueClass;

/// The oracle's own membership test: plain `n mod 2^k == r` on words, with a
/// big-integer comparison once the modulus exceeds the word size.
fn member(n: u64, class: &ResidueClass) -> bool {
    let k = class.modulus_exponent();
    if k >= 64 {
        BigUint::from(n) == *class.remainder()
    } else {
        match class.remainder().to_u64() {
            Some(r) => n % (1u64 << k) == r,
            None => false,
        }
    }
}

/// Where a number sits relative to one step's two recorded classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Proven,
    Unsolved,
    Neither,
    /// In both recorded classes at once — only a corrupted trace can say this.
    Both,
}

/// A number whose recorded location contradicts the location implied by the
/// step's decision and the number's own bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub step_index: usize,
    pub expected: Location,
    pub actual: Location,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationTruth {
    /// The proposition outright fails on a number the trace calls solved.
    Fails,
    /// The evaluation budget ran out — "solved" is unsupported, not refuted.
    Unknown,
}

/// A number in some proven class whose point evaluation is not `Holds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolvedViolation {
    pub n: u64,
    pub step_index: usize,
    pub truth: ViolationTruth,
}

/// Per-step set sizes observed below the bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub step_index: usize,
    /// `|U_s ∩ [0, N)|`.
    pub unsolved_count: u64,
    /// `|S_s ∩ [0, N)|` — cumulative over all proven classes so far.
    pub solved_count: u64,
}

const LIST_CAP: usize = 4096;

/// Everything [`cross_check`] found. The lists are capped at a few thousand
/// entries; the `*_count` fields always carry the full totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub bound: u64,
    pub per_step: Vec<StepCounts>,
    pub mismatches: Vec<Mismatch>,
    pub mismatch_count: u64,
    pub solved_violations: Vec<SolvedViolation>,
    pub violation_count: u64,
    /// Whether the trace's recorded candidate is exactly the one member of
    /// the final unsolved class inside the candidate window.
    pub candidate_agreement: bool,
}

impl CrossCheckReport {
    /// True iff the trace is oracle-consistent below the bound.
    pub fn is_consistent(&self) -> bool {
        self.mismatch_count == 0 && self.violation_count == 0 && self.candidate_agreement
    }
}

/// Replays a trace against explicit enumeration of `[0, bound)`: every
/// number's step-by-step location must match what the recorded decision plus
/// the number's own bit implies, every number in a proven class must evaluate
/// `Holds`, and the final unsolved class must contain exactly the recorded
/// candidate inside the candidate window (`2^s` from a ℕ start, clipped to
/// the bound).
pub fn cross_check(file: &TraceFile, prop: &Proposition, bound: u64) -> CrossCheckReport {
    assert!(bound >= 1, "bound must be positive");
    assert!(bound <= 1 << 24, "bound beyond desk scale");
    let trace = &file.trace;
    let steps: &[StepRecord] = &trace.steps;

    let mut unsolved_counts = vec![0u64; steps.len()];
    let mut newly_solved = vec![0u64; steps.len()];
    let mut mismatches: Vec<Mismatch> = Vec::new();
    let mut mismatch_count: u64 = 0;
    let mut solved_violations: Vec<SolvedViolation> = Vec::new();
    let mut violation_count: u64 = 0;

    // The window in which the candidate is pinned down uniquely.
    let final_exponent =
        u64::from(trace.initial_class.modulus_exponent()) + steps.len() as u64;
    let window = if final_exponent < 64 {
        bound.min(1u64 << final_exponent)
    } else {
        bound
    };
    let mut final_members: Vec<u64> = Vec::new();

    for n in 0..bound {
        let mut inside = member(n, &trace.initial_class);
        let mut solved_at: Option<usize> = None;
        for (i, step) in steps.iter().enumerate() {
            let expected = if !inside {
                Location::Neither
            } else {
                let bit = if step.divisor_exponent < 64 {
                    (n >> step.divisor_exponent) & 1
                } else {
                    0
                };
                let proven_bit = match step.decision {
                    Parity::Even => 0,
                    Parity::Odd => 1,
                };
                if bit == proven_bit {
                    Location::Proven
                } else {
                    Location::Unsolved
                }
            };
            let in_proven = member(n, &step.proven_class);
            let in_unsolved = member(n, &step.unsolved_class);
            let actual = match (in_proven, in_unsolved) {
                (true, true) => Location::Both,
                (true, false) => Location::Proven,
                (false, true) => Location::Unsolved,
                (false, false) => Location::Neither,
            };
            if expected != actual {
                mismatch_count += 1;
                if mismatches.len() < LIST_CAP {
                    mismatches.push(Mismatch {
                        n,
                        step_index: step.step_index,
                        expected,
                        actual,
                    });
                }
            }
            if in_proven && solved_at.is_none() {
                solved_at = Some(i);
            }
            if in_unsolved {
                unsolved_counts[i] += 1;
            }
            inside = in_unsolved;
        }
        if let Some(i) = solved_at {
            newly_solved[i] += 1;
            let truth = match prop.eval_u64(n) {
                Truth::Holds => None,
                Truth::Fails => Some(ViolationTruth::Fails),
                Truth::Unknown { .. } => Some(ViolationTruth::Unknown),
            };
            if let Some(truth) = truth {
                violation_count += 1;
                if solved_violations.len() < LIST_CAP {
                    solved_violations.push(SolvedViolation {
                        n,
                        step_index: steps[i].step_index,
                        truth,
                    });
                }
            }
        }
        if inside && n < window {
            final_members.push(n);
        }
    }

    let mut per_step = Vec::with_capacity(steps.len());
    let mut solved_so_far = 0u64;
    for (i, step) in steps.iter().enumerate() {
        solved_so_far += newly_solved[i];
        per_step.push(StepCounts {
            step_index: step.step_index,
            unsolved_count: unsolved_counts[i],
            solved_count: solved_so_far,
        });
    }

    let candidate_agreement = match file.candidate_prefix.to_u64() {
        Some(c) if c < window => final_members == [c],
        _ => final_members.is_empty(),
    };

    CrossCheckReport {
        bound,
        per_step,
        mismatches,
        mismatch_count,
        solved_violations,
        violation_count,
        candidate_agreement,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The enumerated unsolved half is not a residue-class prefix — if the
    /// engine ever disagrees with this loop, one of them has this bug.
    #[error("reference simulation, step {step}: enumerated half is not a residue-class prefix ({detail})")]
    AbstractionFailure { step: usize, detail: String },
    #[error("proposition {name:?} has no exact class decider; the reference loop cannot decide halves")]
    MissingClassDecider { name: String },
}

/// Checks that a sorted set is exactly `{first + 2^k·t} ∩ [0, bound)` and
/// abstracts it back to the class it denotes.
fn abstract_class(
    set: &[u64],
    k: u32,
    bound: u64,
    step: usize,
) -> Result<ResidueClass, OracleError> {
    let fail = |detail: String| OracleError::AbstractionFailure { step, detail };
    let Some(&first) = set.first() else {
        return Err(fail("enumerated half is empty".into()));
    };
    let stride = 1u64 << k;
    let mut expect = Some(first);
    for &n in set {
        if expect != Some(n) {
            return Err(fail(format!("element {n} breaks the expected progression")));
        }
        expect = n.checked_add(stride);
    }
    if expect.is_some_and(|e| e < bound) {
        return Err(fail("progression stops short of the bound".into()));
    }
    ResidueClass::new(k, BigUint::from(first)).map_err(|e| fail(e.to_string()))
}

/// An independent, enumeration-based implementation of the step loop, for
/// differential testing: sets are explicit vectors of numbers below `bound`,
/// each step partitions the current set by the relevant bit, abstracts both
/// halves back to residue classes, and consults the proposition's class
/// decider exactly like the exact prover does. The resulting trace must equal
/// the engine's bit for bit.
pub fn simulate_reference(
    prop: &Proposition,
    max_steps: usize,
    bound: u64,
) -> Result<ProofTrace, OracleError> {
    if !prop.has_class_decider() {
        return Err(OracleError::MissingClassDecider {
            name: prop.name().to_string(),
        });
    }
    assert!((1..64).contains(&max_steps), "step budget out of range");
    assert!(
        bound >= (1u64 << max_steps),
        "bound must cover 2^max_steps so every class stays populated"
    );

    let mut current: Vec<u64> = (0..bound).collect();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut termination = Termination::Truncated { after: max_steps };
    for step_index in 1..=max_steps {
        let exponent = (step_index - 1) as u32;
        let (evens, odds): (Vec<u64>, Vec<u64>) = current
            .iter()
            .partition(|&&n| (n >> exponent) & 1 == 0);
        let even_class = abstract_class(&evens, step_index as u32, bound, step_index)?;
        let odd_class = abstract_class(&odds, step_index as u32, bound, step_index)?;
        let even_verdict = prop.holds_on_class(&even_class).expect("decider present");
        let odd_verdict = prop.holds_on_class(&odd_class).expect("decider present");
        match (even_verdict, odd_verdict) {
            (ClassDecision::AllHold, ClassDecision::AllHold) => {
                termination = Termination::ClosedBoth { at_step: step_index };
                break;
            }
            (ClassDecision::AllHold, _) => {
                steps.push(StepRecord {
                    step_index,
                    divisor_exponent: exponent,
                    decision: Parity::Even,
                    proven_class: even_class,
                    unsolved_class: odd_class,
                });
                current = odds;
            }
            (_, ClassDecision::AllHold) => {
                steps.push(StepRecord {
                    step_index,
                    divisor_exponent: exponent,
                    decision: Parity::Odd,
                    proven_class: odd_class,
                    unsolved_class: even_class,
                });
                current = evens;
            }
            _ => {
                termination = Termination::Stuck { at_step: step_index };
                break;
            }
        }
    }
    Ok(ProofTrace {
        initial_class: ResidueClass::natural_numbers(),
        steps,
        termination,
    })
}
