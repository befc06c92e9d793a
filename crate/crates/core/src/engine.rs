//! The dichotomy step loop and its proof traces.
//!
//! A run starts from an unsolved class `U_0` (by default ℕ) and repeatedly
//! splits the current unsolved class on the parity of the quotient: step `s`
//! splits on bit `s − 1` of the members (divisor `2^(s−1)`). A pluggable
//! [`StepProver`] declares which half is proven; that half joins the solved
//! side `S_s`, the other half becomes `U_s`, and the loop continues until the
//! step budget runs out, the prover proves both halves, or it can prove
//! neither. The recorded [`ProofTrace`] determines the unique candidate
//! counter-example: reading the decisions as bits (1 where the even-quotient
//! half was proven, 0 where the odd-quotient half was), the candidate is the
//! one number every unsolved class contains.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::residue::ResidueClass;

/// Which half of a split was proven, as recorded in a completed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A step prover's verdict on the two halves of the current unsolved class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// The even-quotient half is proven; the odd half stays unsolved.
    ProvenEven,
    /// The odd-quotient half is proven; the even half stays unsolved.
    ProvenOdd,
    /// Both halves are proven: the whole run is closed.
    ProvenBoth,
    /// Neither half can be proven: the method fails here.
    Stuck,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProverError {
    #[error("scripted decisions exhausted at step {at_step}")]
    ScriptExhausted { at_step: usize },
}

/// Everything a prover may consult when deciding a step: the two halves of
/// the current unsolved class and the classes proven so far.
#[derive(Debug)]
pub struct StepContext<'a> {
    pub step_index: usize,
    pub even_child: &'a ResidueClass,
    pub odd_child: &'a ResidueClass,
    pub proven_so_far: &'a [ResidueClass],
}

/// The pluggable decision procedure driving a run. Implementations must be
/// deterministic so traces are reproducible.
pub trait StepProver {
    fn decide(&mut self, ctx: &StepContext<'_>) -> Result<Decision, ProverError>;
}

/// A prover that replays a fixed list of decisions — "assume we could prove
/// this half" — so trace shapes can be exercised without any proposition.
/// Running past the end of the script aborts the run.
#[derive(Debug, Clone)]
pub struct ScriptedProver {
    script: Vec<Parity>,
    cursor: usize,
}

impl ScriptedProver {
    pub fn new(script: Vec<Parity>) -> Self {
        ScriptedProver { script, cursor: 0 }
    }

    /// A script of `len` odd-half proofs, the shape whose candidate is 0.
    pub fn all_odd(len: usize) -> Self {
        Self::new(vec![Parity::Odd; len])
    }
}

impl StepProver for ScriptedProver {
    fn decide(&mut self, ctx: &StepContext<'_>) -> Result<Decision, ProverError> {
        match self.script.get(self.cursor) {
            None => Err(ProverError::ScriptExhausted {
                at_step: ctx.step_index,
            }),
            Some(parity) => {
                self.cursor += 1;
                Ok(match parity {
                    Parity::Even => Decision::ProvenEven,
                    Parity::Odd => Decision::ProvenOdd,
                })
            }
        }
    }
}

/// One completed dichotomy step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based position in the run.
    pub step_index: usize,
    /// The step split on the parity of `floor(n / 2^divisor_exponent)`,
    /// i.e. on bit `divisor_exponent` of the members. Starting from ℕ this is
    /// `step_index − 1`.
    pub divisor_exponent: u32,
    /// Which half was proven.
    pub decision: Parity,
    pub proven_class: ResidueClass,
    pub unsolved_class: ResidueClass,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    /// The step budget ran out; the run could have continued.
    Truncated { after: usize },
    /// Both halves were proven at this step: the proof is closed.
    ClosedBoth { at_step: usize },
    /// Neither half could be proven: the method fails at this step.
    Stuck { at_step: usize },
    /// The prover itself failed (e.g. a script ran dry).
    Aborted { at_step: usize, reason: String },
}

/// The full history of a run: the starting class, every completed step, and
/// how the run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub initial_class: ResidueClass,
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
}

impl ProofTrace {
    /// Number of completed steps.
    pub fn completed_steps(&self) -> usize {
        self.steps.len()
    }

    /// The current unsolved class: the last step's, or the initial class when
    /// no step completed.
    pub fn unsolved_class(&self) -> &ResidueClass {
        self.steps
            .last()
            .map(|s| &s.unsolved_class)
            .unwrap_or(&self.initial_class)
    }

    /// The unique candidate counter-example determined by the decisions so
    /// far: bit `i` of the offset above the initial remainder is 1 when step
    /// `i+1` proved the even-quotient half (the candidate hid in the odd one)
    /// and 0 otherwise. Starting from ℕ this is the only element of the final
    /// unsolved class below `2^s` after `s` steps.
    pub fn candidate_prefix(&self) -> BigUint {
        let mut candidate = self.initial_class.remainder().clone();
        for step in &self.steps {
            if step.decision == Parity::Even {
                candidate += BigUint::one() << step.divisor_exponent;
            }
        }
        candidate
    }

    /// Index of the last step that proved the even-quotient half.
    pub fn last_even_step(&self) -> Option<usize> {
        self.steps
            .iter()
            .rev()
            .find(|s| s.decision == Parity::Even)
            .map(|s| s.step_index)
    }

    /// Fraction of the starting class still unsolved after the completed
    /// steps: exactly `1/2^s`.
    pub fn density(&self) -> Ratio<BigUint> {
        Ratio::new(BigUint::one(), BigUint::one() << self.steps.len())
    }

    /// Classifies the observed decision tail. `EventuallyOddOnly(K)` means
    /// every decision after step `K` proved the odd half and at least
    /// `tail_window` such steps were observed; a run that closed, stuck, or
    /// aborted gets no tail verdict. The verdict always carries a caveat:
    /// finite evidence says nothing about the steps never taken.
    pub fn classify(&self, tail_window: usize) -> TraceClassification {
        let last_even_step = self.last_even_step();
        let verdict = match self.termination {
            Termination::Truncated { .. } => {
                let k = last_even_step.unwrap_or(0);
                if self.steps.len() - k >= tail_window {
                    Verdict::EventuallyOddOnly(k)
                } else {
                    Verdict::EvenRecurringSoFar
                }
            }
            _ => Verdict::ClosedOrStuck,
        };
        TraceClassification {
            last_even_step,
            candidate_prefix: self.candidate_prefix(),
            verdict,
            caveat: format!(
                "finite evidence: only {} completed steps were observed; \
                 the verdict describes this prefix, not the unbounded run",
                self.steps.len()
            ),
        }
    }
}

/// Verdict on a trace's decision tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// After step `K`, only odd-quotient halves were proven (for at least the
    /// requested window).
    EventuallyOddOnly(usize),
    /// An even-quotient proof occurred inside the tail window.
    EvenRecurringSoFar,
    /// The run closed, stuck, or aborted; tail shape is moot.
    ClosedOrStuck,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::EventuallyOddOnly(k) => write!(f, "eventually-odd-only(K={k})"),
            Verdict::EvenRecurringSoFar => write!(f, "even-recurring-so-far"),
            Verdict::ClosedOrStuck => write!(f, "closed-or-stuck"),
        }
    }
}

/// A trace's tail classification together with the candidate it pins down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceClassification {
    pub last_even_step: Option<usize>,
    pub candidate_prefix: BigUint,
    pub verdict: Verdict,
    pub caveat: String,
}

enum StepOutcome {
    Completed(StepRecord),
    Terminal(Termination),
}

fn execute_step(
    prover: &mut dyn StepProver,
    step_index: usize,
    parent: &ResidueClass,
    proven_so_far: &[ResidueClass],
) -> StepOutcome {
    let (even_child, odd_child) = parent.split();
    let ctx = StepContext {
        step_index,
        even_child: &even_child,
        odd_child: &odd_child,
        proven_so_far,
    };
    match prover.decide(&ctx) {
        Err(e) => StepOutcome::Terminal(Termination::Aborted {
            at_step: step_index,
            reason: e.to_string(),
        }),
        Ok(Decision::ProvenBoth) => StepOutcome::Terminal(Termination::ClosedBoth {
            at_step: step_index,
        }),
        Ok(Decision::Stuck) => StepOutcome::Terminal(Termination::Stuck {
            at_step: step_index,
        }),
        Ok(Decision::ProvenEven) => StepOutcome::Completed(StepRecord {
            step_index,
            divisor_exponent: parent.modulus_exponent(),
            decision: Parity::Even,
            proven_class: even_child,
            unsolved_class: odd_child,
        }),
        Ok(Decision::ProvenOdd) => StepOutcome::Completed(StepRecord {
            step_index,
            divisor_exponent: parent.modulus_exponent(),
            decision: Parity::Odd,
            proven_class: odd_child,
            unsolved_class: even_child,
        }),
    }
}

/// Runs the dichotomy loop from `initial` for at most `max_steps` steps.
///
/// Each step splits the current unsolved class, asks the prover for a
/// [`Decision`], and records the proven/unsolved halves. The run ends
/// `Truncated` when the budget is spent, or earlier with `ClosedBoth`,
/// `Stuck`, or `Aborted` (prover failure). Deterministic provers yield
/// byte-for-byte reproducible traces.
pub fn run_dichotomy(
    prover: &mut dyn StepProver,
    initial: &ResidueClass,
    max_steps: usize,
) -> ProofTrace {
    assert!(max_steps >= 1, "a run needs at least one step");
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut proven: Vec<ResidueClass> = Vec::new();
    let mut parent = initial.clone();
    let mut termination = Termination::Truncated { after: max_steps };
    for step_index in 1..=max_steps {
        match execute_step(prover, step_index, &parent, &proven) {
            StepOutcome::Terminal(t) => {
                termination = t;
                break;
            }
            StepOutcome::Completed(record) => {
                parent = record.unsolved_class.clone();
                proven.push(record.proven_class.clone());
                steps.push(record);
            }
        }
    }
    ProofTrace {
        initial_class: initial.clone(),
        steps,
        termination,
    }
}

/// Finite mode: runs on `[0, bound)` (classes intersected with the bound) and
/// stops as soon as at most one unsolved element remains, reporting how many
/// steps that took — about `log₂(bound)` for well-behaved provers.
pub fn run_finite(prover: &mut dyn StepProver, bound: u64) -> (ProofTrace, usize) {
    assert!(bound >= 2, "finite mode needs at least two elements");
    let initial = ResidueClass::natural_numbers();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut proven: Vec<ResidueClass> = Vec::new();
    let mut parent = initial.clone();
    let mut termination = None;
    while parent.count_below(bound) > 1 {
        let step_index = steps.len() + 1;
        match execute_step(prover, step_index, &parent, &proven) {
            StepOutcome::Terminal(t) => {
                termination = Some(t);
                break;
            }
            StepOutcome::Completed(record) => {
                parent = record.unsolved_class.clone();
                proven.push(record.proven_class.clone());
                steps.push(record);
            }
        }
    }
    let steps_used = steps.len();
    let termination = termination.unwrap_or(Termination::Truncated { after: steps_used });
    (
        ProofTrace {
            initial_class: initial,
            steps,
            termination,
        },
        steps_used,
    )
}

/// The on-disk form of a trace: the trace itself plus the derived candidate
/// (as a decimal string, like every big integer in the format) and a
/// truncation marker. Parsing checks structure only — classes must be
/// canonical — so that semantic corruption stays visible to the brute-force
/// checker instead of being rejected or repaired here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    #[serde(flatten)]
    pub trace: ProofTrace,
    #[serde(with = "crate::serde_support::biguint_decimal")]
    pub candidate_prefix: BigUint,
    pub truncated: bool,
}

impl TraceFile {
    pub fn new(trace: ProofTrace) -> Self {
        let candidate_prefix = trace.candidate_prefix();
        let truncated = matches!(trace.termination, Termination::Truncated { .. });
        TraceFile {
            trace,
            candidate_prefix,
            truncated,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("trace serialization is total");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
