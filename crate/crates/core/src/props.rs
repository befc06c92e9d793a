//! Propositions over ℕ and the exact step prover built on them.
//!
//! A [`Proposition`] is a point evaluator returning [`Truth`] (three-valued,
//! because budget-limited evaluation exists) plus an optional exact
//! class-level decider. The decider is phrased over arithmetic progressions
//! `{offset + stride·t : t ∈ ℕ}` rather than residue classes directly: a
//! residue class is the progression `(r, 2^k)`, and phrasing it this way lets
//! an affine pull-back compose exactly — the image of a class under
//! `n ↦ a·n + b` is again a progression, just not a residue class when `a` is
//! not a power of two.
//!
//! The bundled families are synthetic vehicles for exercising the engine:
//! `single_hole` (fails at exactly one point), `multi_hole` (a finite failure
//! set), and `periodic` (truth depends only on `n mod 2^p`).

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::engine::{Decision, ProverError, StepContext, StepProver};
use crate::residue::ResidueClass;

/// Point-level truth value. `Unknown` carries the budget spent before giving
/// up; exact propositions never produce it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Holds,
    Fails,
    Unknown { budget_spent: u64 },
}

/// Exact class-level verdict: the proposition holds on every member, fails on
/// at least one member, or the decider cannot tell at this granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassDecision {
    AllHold,
    SomeFails,
    Undecidable,
}

type EvalFn = dyn Fn(&BigUint) -> Truth + Send + Sync;
type ProgressionFn = dyn Fn(&BigUint, &BigUint) -> ClassDecision + Send + Sync;

/// A named proposition: a total point evaluator plus an optional exact
/// decider over arithmetic progressions. Immutable and cheap to clone.
#[derive(Clone)]
pub struct Proposition {
    name: String,
    eval_fn: Arc<EvalFn>,
    progression_fn: Option<Arc<ProgressionFn>>,
}

impl fmt::Debug for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Proposition")
            .field("name", &self.name)
            .field("has_class_decider", &self.progression_fn.is_some())
            .finish()
    }
}

impl Proposition {
    /// A proposition with point evaluation only (no exact class decisions).
    pub fn from_eval(
        name: impl Into<String>,
        eval: impl Fn(&BigUint) -> Truth + Send + Sync + 'static,
    ) -> Self {
        Proposition {
            name: name.into(),
            eval_fn: Arc::new(eval),
            progression_fn: None,
        }
    }

    /// A proposition with an exact decider over progressions
    /// `{offset + stride·t : t ∈ ℕ}`. The decider must be sound: `AllHold`
    /// only if every member evaluates `Holds`, `SomeFails` only if some
    /// member evaluates `Fails`.
    pub fn with_class_decider(
        name: impl Into<String>,
        eval: impl Fn(&BigUint) -> Truth + Send + Sync + 'static,
        decide: impl Fn(&BigUint, &BigUint) -> ClassDecision + Send + Sync + 'static,
    ) -> Self {
        Proposition {
            name: name.into(),
            eval_fn: Arc::new(eval),
            progression_fn: Some(Arc::new(decide)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: &BigUint) -> Truth {
        (self.eval_fn)(n)
    }

    pub fn eval_u64(&self, n: u64) -> Truth {
        self.eval(&BigUint::from(n))
    }

    pub fn has_class_decider(&self) -> bool {
        self.progression_fn.is_some()
    }

    /// Exact verdict for an arbitrary progression, when a decider exists.
    pub fn decide_progression(&self, offset: &BigUint, stride: &BigUint) -> Option<ClassDecision> {
        self.progression_fn.as_ref().map(|f| f(offset, stride))
    }

    /// Exact verdict for a residue class — the progression `(r, 2^k)`.
    pub fn holds_on_class(&self, class: &ResidueClass) -> Option<ClassDecision> {
        self.decide_progression(class.remainder(), &class.modulus())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropError {
    #[error("periodic table must have {expected} entries, got {got}")]
    TableSize { expected: usize, got: usize },
    #[error("periodic table must contain at least one true entry")]
    AllFalseTable,
    #[error("affine map scale must be at least 1")]
    ZeroScale,
    #[error("proposition {name:?} has no exact class decider")]
    NoClassDecider { name: String },
}

/// Does the progression `{offset + stride·t : t ∈ ℕ}` contain `m`?
fn progression_contains(m: &BigUint, offset: &BigUint, stride: &BigUint) -> bool {
    if m < offset {
        return false;
    }
    if stride.is_zero() {
        return m == offset;
    }
    ((m - offset) % stride).is_zero()
}

/// The proposition that fails at exactly one point `m` — the canonical
/// "at most one counter-example" vehicle.
pub fn single_hole(m: impl Into<BigUint>) -> Proposition {
    let hole = m.into();
    let eval_hole = hole.clone();
    let name = format!("single-hole:{hole}");
    Proposition::with_class_decider(
        name,
        move |n| {
            if *n == eval_hole {
                Truth::Fails
            } else {
                Truth::Holds
            }
        },
        move |offset, stride| {
            if progression_contains(&hole, offset, stride) {
                ClassDecision::SomeFails
            } else {
                ClassDecision::AllHold
            }
        },
    )
}

/// The proposition that fails exactly on a finite set of points. The empty
/// set gives the always-true proposition.
pub fn multi_hole<I>(holes: I) -> Proposition
where
    I: IntoIterator,
    I::Item: Into<BigUint>,
{
    let holes: BTreeSet<BigUint> = holes.into_iter().map(Into::into).collect();
    let name = format!(
        "multi-hole:{}",
        holes
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let eval_holes = holes.clone();
    Proposition::with_class_decider(
        name,
        move |n| {
            if eval_holes.contains(n) {
                Truth::Fails
            } else {
                Truth::Holds
            }
        },
        move |offset, stride| {
            if holes
                .iter()
                .any(|h| progression_contains(h, offset, stride))
            {
                ClassDecision::SomeFails
            } else {
                ClassDecision::AllHold
            }
        },
    )
}

/// The proposition whose truth depends only on `n mod 2^p`, given as a table
/// of `2^p` booleans. A progression pins the table index down exactly when
/// its stride is a multiple of `2^p`; anything coarser is `Undecidable`.
/// All-false tables are rejected (every run on one closes trivially).
pub fn periodic(p_exponent: u32, table: Vec<bool>) -> Result<Proposition, PropError> {
    let expected = 1usize
        .checked_shl(p_exponent)
        .filter(|_| p_exponent <= 24)
        .ok_or(PropError::TableSize {
            expected: usize::MAX,
            got: table.len(),
        })?;
    if table.len() != expected {
        return Err(PropError::TableSize {
            expected,
            got: table.len(),
        });
    }
    if table.iter().all(|&b| !b) {
        return Err(PropError::AllFalseTable);
    }
    let name = format!(
        "periodic:{p_exponent}:{}",
        table
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect::<String>()
    );
    let period = BigUint::from(expected);
    let eval_table = table.clone();
    let eval_period = period.clone();
    Ok(Proposition::with_class_decider(
        name,
        move |n| {
            let idx = (n % &eval_period).to_usize().expect("index below 2^24");
            if eval_table[idx] {
                Truth::Holds
            } else {
                Truth::Fails
            }
        },
        move |offset, stride| {
            if !(stride % &period).is_zero() {
                return ClassDecision::Undecidable;
            }
            let idx = (offset % &period).to_usize().expect("index below 2^24");
            if table[idx] {
                ClassDecision::AllHold
            } else {
                ClassDecision::SomeFails
            }
        },
    ))
}

/// Pulls a proposition back along the affine injection `n ↦ scale·n + shift`
/// (`scale ≥ 1`): the result is `n ↦ inner(scale·n + shift)`, the standard
/// route for running the method over a countable set enumerated by an affine
/// map (odd numbers via `2n+1`, and so on). The pulled-back proposition has a
/// class decider exactly when the inner one does, since the decider works on
/// arbitrary progressions: a class `(r, 2^k)` maps to the progression
/// `(scale·r + shift, scale·2^k)`.
pub fn pull_back_affine(
    inner: Proposition,
    scale: impl Into<BigUint>,
    shift: impl Into<BigUint>,
) -> Result<Proposition, PropError> {
    let scale = scale.into();
    let shift = shift.into();
    if scale.is_zero() {
        return Err(PropError::ZeroScale);
    }
    let name = format!("pullback:affine:{scale}:{shift}:{}", inner.name);
    let eval_scale = scale.clone();
    let eval_shift = shift.clone();
    let eval_inner = inner.clone();
    let progression_fn = inner.progression_fn.clone().map(|decide| {
        Arc::new(move |offset: &BigUint, stride: &BigUint| {
            decide(&(&scale * offset + &shift), &(&scale * stride))
        }) as Arc<ProgressionFn>
    });
    Ok(Proposition {
        name,
        eval_fn: Arc::new(move |n| eval_inner.eval(&(&eval_scale * n + &eval_shift))),
        progression_fn,
    })
}

/// The exact step prover: asks the proposition's class decider about both
/// halves and proves exactly those that come back `AllHold`. When both do the
/// run closes; when neither does (failure or undecidable) it is stuck.
#[derive(Debug, Clone)]
pub struct ExactProver {
    prop: Proposition,
}

impl ExactProver {
    pub fn new(prop: Proposition) -> Result<Self, PropError> {
        if !prop.has_class_decider() {
            return Err(PropError::NoClassDecider {
                name: prop.name().to_string(),
            });
        }
        Ok(ExactProver { prop })
    }

    pub fn proposition(&self) -> &Proposition {
        &self.prop
    }
}

impl StepProver for ExactProver {
    fn decide(&mut self, ctx: &StepContext<'_>) -> Result<Decision, ProverError> {
        let even = self
            .prop
            .holds_on_class(ctx.even_child)
            .expect("decider checked at construction");
        let odd = self
            .prop
            .holds_on_class(ctx.odd_child)
            .expect("decider checked at construction");
        Ok(match (even, odd) {
            (ClassDecision::AllHold, ClassDecision::AllHold) => Decision::ProvenBoth,
            (ClassDecision::AllHold, _) => Decision::ProvenEven,
            (_, ClassDecision::AllHold) => Decision::ProvenOdd,
            _ => Decision::Stuck,
        })
    }
}
