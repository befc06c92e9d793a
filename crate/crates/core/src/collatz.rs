//! The 3x+1 map: trajectories, a chunked range verifier, the fixed-point
//! check, bounded-descent certificates per residue class, and a budgeted
//! proposition wrapper.
//!
//! Nothing here decides the conjecture. The point evaluator is three-valued
//! (a budget can run out), the range verifier produces finite evidence, and
//! descent certificates prove class-level descent only where the parity chain
//! is forced — the proposition deliberately has no exact class decider, so
//! the exact step prover cannot run on it.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

use crate::props::{Proposition, Truth};

/// One application of the map: `n/2` for even `n`, `3n+1` for odd `n`.
/// Arbitrary precision, so there is nothing to overflow.
pub fn collatz_step(n: &BigUint) -> BigUint {
    if n.bit(0) {
        n * 3u32 + BigUint::one()
    } else {
        n >> 1
    }
}

/// Machine-word fast path: `None` when `3n+1` would not fit in 64 bits, so a
/// caller must promote to [`collatz_step`] instead of wrapping around.
pub fn collatz_step_u64(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        Some(n / 2)
    } else {
        n.checked_mul(3)?.checked_add(1)
    }
}

/// How a budgeted trajectory ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrajectoryOutcome {
    /// Reached 1 after this many applications of the map.
    ReachesOne { steps: u64 },
    /// Revisited a value without passing through 1 (the value at which the
    /// cycle closed). Happens at `n = 0`, which maps to itself.
    CycleWithoutOne { entry: BigUint },
    /// The budget ran out; this is the last value seen.
    BudgetExceeded { last: BigUint },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryResult {
    pub outcome: TrajectoryOutcome,
    /// Largest value seen, the starting point included.
    pub peak: BigUint,
}

/// Iterates the map from `n` until it reaches 1, revisits a value, or spends
/// the budget.
pub fn trajectory(n: &BigUint, budget: u64) -> TrajectoryResult {
    assert!(budget >= 1, "trajectory needs a positive budget");
    let mut v = n.clone();
    let mut peak = v.clone();
    let mut seen: HashSet<BigUint> = HashSet::new();
    let mut steps: u64 = 0;
    loop {
        if v.is_one() {
            return TrajectoryResult {
                outcome: TrajectoryOutcome::ReachesOne { steps },
                peak,
            };
        }
        if !seen.insert(v.clone()) {
            return TrajectoryResult {
                outcome: TrajectoryOutcome::CycleWithoutOne { entry: v },
                peak,
            };
        }
        if steps == budget {
            return TrajectoryResult {
                outcome: TrajectoryOutcome::BudgetExceeded { last: v },
                peak,
            };
        }
        v = collatz_step(&v);
        steps += 1;
        if v > peak {
            peak = v.clone();
        }
    }
}

/// The orbit-reaches-1 claim as a budgeted proposition: `Holds` when the
/// trajectory reaches 1 within the budget, `Fails` on a 1-free cycle (so
/// `eval(0) = Fails`), `Unknown` when the budget runs out. No class decider:
/// no exact class-level decision procedure is known, which is the whole
/// point of keeping it as evidence-only.
pub fn collatz_proposition(budget: u64) -> Proposition {
    Proposition::from_eval(format!("collatz:{budget}"), move |n| {
        match trajectory(n, budget).outcome {
            TrajectoryOutcome::ReachesOne { .. } => Truth::Holds,
            TrajectoryOutcome::CycleWithoutOne { .. } => Truth::Fails,
            TrajectoryOutcome::BudgetExceeded { .. } => Truth::Unknown {
                budget_spent: budget,
            },
        }
    })
}

/// A scanned number that did not descend: either its budget ran out or it
/// closed a cycle away from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeFailure {
    pub n: u64,
    #[serde(flatten)]
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureKind {
    BudgetExceeded {
        #[serde(with = "crate::serde_support::biguint_decimal")]
        last: BigUint,
    },
    CycleWithoutOne {
        #[serde(with = "crate::serde_support::biguint_decimal")]
        entry: BigUint,
    },
}

/// Steps record among the successfully scanned numbers (ties keep the
/// smallest `n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxSteps {
    pub steps: u64,
    pub n: u64,
}

/// Peak-value record among the successfully scanned numbers (ties keep the
/// smallest `n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxPeak {
    #[serde(with = "crate::serde_support::biguint_decimal")]
    pub peak: BigUint,
    pub n: u64,
}

/// Outcome of [`verify_range`]. `max_steps`/`max_peak` are `None` only when
/// no number in the range was successfully verified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeReport {
    pub lo: u64,
    pub hi: u64,
    pub budget: u64,
    pub checked: u64,
    pub failures: Vec<RangeFailure>,
    pub max_steps: Option<MaxSteps>,
    pub max_peak: Option<MaxPeak>,
}

impl RangeReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-number verdict: a number counts as verified as soon as its orbit drops
/// strictly below its starting point (or hits 1), since every smaller start
/// is checked on its own. This keeps the result independent of scan order and
/// of how the range is divided among threads. `steps` and `peak` describe the
/// orbit up to that stopping point.
fn scan_one(n: u64, budget: u64) -> Result<(u64, BigUint), FailureKind> {
    if n == 0 {
        // 0 maps to itself: a genuine 1-free cycle.
        return Err(FailureKind::CycleWithoutOne {
            entry: BigUint::zero(),
        });
    }
    if n == 1 {
        return Ok((0, BigUint::one()));
    }
    let mut v = n;
    let mut peak = n;
    let mut steps: u64 = 0;
    while steps < budget {
        match collatz_step_u64(v) {
            Some(next) => {
                v = next;
                steps += 1;
                if v > peak {
                    peak = v;
                }
                if v < n {
                    return Ok((steps, BigUint::from(peak)));
                }
            }
            None => return scan_one_big(n, BigUint::from(v), BigUint::from(peak), steps, budget),
        }
    }
    Err(FailureKind::BudgetExceeded {
        last: BigUint::from(v),
    })
}

/// Continuation of [`scan_one`] after the orbit left the 64-bit range.
fn scan_one_big(
    n: u64,
    mut v: BigUint,
    mut peak: BigUint,
    mut steps: u64,
    budget: u64,
) -> Result<(u64, BigUint), FailureKind> {
    let floor = BigUint::from(n);
    while steps < budget {
        v = collatz_step(&v);
        steps += 1;
        if v > peak {
            peak = v.clone();
        }
        if v < floor {
            return Ok((steps, peak));
        }
    }
    Err(FailureKind::BudgetExceeded { last: v })
}

struct ChunkSummary {
    failures: Vec<RangeFailure>,
    max_steps: Option<MaxSteps>,
    max_peak: Option<MaxPeak>,
}

fn scan_chunk(lo: u64, hi: u64, budget: u64) -> ChunkSummary {
    let mut failures = Vec::new();
    let mut max_steps: Option<MaxSteps> = None;
    let mut max_peak: Option<MaxPeak> = None;
    for n in lo..hi {
        match scan_one(n, budget) {
            Err(kind) => failures.push(RangeFailure { n, kind }),
            Ok((steps, peak)) => {
                if max_steps.as_ref().is_none_or(|m| steps > m.steps) {
                    max_steps = Some(MaxSteps { steps, n });
                }
                if max_peak.as_ref().is_none_or(|m| peak > m.peak) {
                    max_peak = Some(MaxPeak { peak, n });
                }
            }
        }
    }
    ChunkSummary {
        failures,
        max_steps,
        max_peak,
    }
}

const CHUNK: u64 = 16384;

/// Scans `[lo, hi)`, reporting every number that fails to descend plus the
/// steps and peak records. `threads` selects the worker count: 1 scans
/// sequentially, 0 uses all cores. The report is identical for every thread
/// count: chunks are fixed-size, each chunk is summarized independently, and
/// summaries merge in chunk order with ties resolved toward the smallest `n`.
pub fn verify_range(lo: u64, hi: u64, budget: u64, threads: usize) -> RangeReport {
    assert!(lo < hi, "range is empty");
    assert!(budget >= 1, "budget must be positive");
    let bounds: Vec<(u64, u64)> = (lo..hi)
        .step_by(CHUNK as usize)
        .map(|start| (start, hi.min(start.saturating_add(CHUNK))))
        .collect();
    let summaries: Vec<ChunkSummary> = if threads == 1 {
        bounds
            .iter()
            .map(|&(a, b)| scan_chunk(a, b, budget))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("worker pool");
        pool.install(|| {
            bounds
                .par_iter()
                .map(|&(a, b)| scan_chunk(a, b, budget))
                .collect()
        })
    };

    let mut failures = Vec::new();
    let mut max_steps: Option<MaxSteps> = None;
    let mut max_peak: Option<MaxPeak> = None;
    for summary in summaries {
        failures.extend(summary.failures);
        if let Some(m) = summary.max_steps {
            if max_steps.as_ref().is_none_or(|best| m.steps > best.steps) {
                max_steps = Some(m);
            }
        }
        if let Some(m) = summary.max_peak {
            if max_peak.as_ref().is_none_or(|best| m.peak > best.peak) {
                max_peak = Some(m);
            }
        }
    }
    RangeReport {
        lo,
        hi,
        budget,
        checked: hi - lo,
        failures,
        max_steps,
        max_peak,
    }
}

/// True iff the map has no fixed point in `[1, bound)` — checked exhaustively
/// even though `n/2 < n` and `3n+1 > n` force it analytically.
pub fn no_fixed_point_check(bound: u64) -> bool {
    (1..bound).all(|n| collatz_step_u64(n) != Some(n))
}

/// Verdict for one residue class `{2^k·a + r : a ≥ 1}`: either every member
/// provably drops strictly below itself within `steps` applications of the
/// map, or nothing could be established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassDescent {
    Descends { steps: u64 },
    Unknown,
}

impl fmt::Display for ClassDescent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassDescent::Descends { steps } => write!(f, "descends within {steps} step(s)"),
            ClassDescent::Unknown => write!(f, "unknown"),
        }
    }
}

/// Bounded-descent evidence for every residue class modulo `2^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentCertificate {
    modulus_exponent: u32,
    entries: Vec<ClassDescent>,
}

impl DescentCertificate {
    pub fn modulus_exponent(&self) -> u32 {
        self.modulus_exponent
    }

    /// Entries indexed by remainder.
    pub fn entries(&self) -> &[ClassDescent] {
        &self.entries
    }

    pub fn entry(&self, remainder: u64) -> &ClassDescent {
        &self.entries[remainder as usize]
    }

    pub fn certified_count(&self) -> u64 {
        self.entries
            .iter()
            .filter(|e| matches!(e, ClassDescent::Descends { .. }))
            .count() as u64
    }

    /// Certified classes over all classes, as an exact fraction.
    pub fn certified_fraction(&self) -> Ratio<BigUint> {
        Ratio::new(
            BigUint::from(self.certified_count()),
            BigUint::one() << self.modulus_exponent,
        )
    }
}

/// Symbolically iterates the map on the affine form `2^k·a + r` (coefficient
/// and constant tracked exactly) and certifies `Descends` for a class when
/// the iterate provably sits strictly below the start for every `a ≥ 1`. A
/// branch is taken only when the parity of the form is independent of `a`
/// (coefficient even); the first parity ambiguity ends the attempt with
/// `Unknown` — certificates are proofs, not samples.
pub fn descent_analysis(modulus_exponent: u32, step_bound: u64) -> DescentCertificate {
    assert!(modulus_exponent <= 24, "table would exceed desk scale");
    assert!(step_bound >= 1);
    let two_k = BigUint::one() << modulus_exponent;
    let entries = (0..(1u64 << modulus_exponent))
        .map(|r| analyze_residue(r, &two_k, step_bound))
        .collect();
    DescentCertificate {
        modulus_exponent,
        entries,
    }
}

fn analyze_residue(r: u64, two_k: &BigUint, step_bound: u64) -> ClassDescent {
    let mut coeff = two_k.clone();
    let mut constant = BigUint::from(r);
    // Descent for all a ≥ 1 needs slope ≤ 2^k, and then a = 1 is the worst
    // case: coeff + constant < 2^k + r.
    let start_at_one = two_k + BigUint::from(r);
    for step in 1..=step_bound {
        if coeff.bit(0) {
            return ClassDescent::Unknown;
        }
        if constant.bit(0) {
            coeff *= 3u32;
            constant = constant * 3u32 + BigUint::one();
        } else {
            coeff >>= 1;
            constant >>= 1;
        }
        if coeff <= *two_k && &coeff + &constant < start_at_one {
            return ClassDescent::Descends { steps: step };
        }
    }
    ClassDescent::Unknown
}

/// A sampled member of a certified class that failed to descend within the
/// certified step count — the certificate is wrong if any exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentViolation {
    pub remainder: u64,
    pub sample: BigUint,
}

/// Checks every `Descends` entry against `samples_per_class` concrete members
/// (`a = 1..=samples_per_class`), returning any members that fail to drop
/// below themselves within the certified number of steps.
pub fn validate_descent_certificate(
    cert: &DescentCertificate,
    samples_per_class: u64,
) -> Vec<DescentViolation> {
    let mut violations = Vec::new();
    let modulus = BigUint::one() << cert.modulus_exponent;
    for (r, entry) in cert.entries.iter().enumerate() {
        let ClassDescent::Descends { steps } = entry else {
            continue;
        };
        for a in 1..=samples_per_class {
            let n = &modulus * a + BigUint::from(r as u64);
            let mut v = n.clone();
            let mut descended = false;
            for _ in 0..*steps {
                v = collatz_step(&v);
                if v < n {
                    descended = true;
                    break;
                }
            }
            if !descended {
                violations.push(DescentViolation {
                    remainder: r as u64,
                    sample: n,
                });
                if violations.len() >= 8 {
                    return violations;
                }
            }
        }
    }
    violations
}
