//! Tower heights along the binary chain of a recurrent pair, the witness
//! terms `aₙ`, and execution-based verification of chain prefixes.
//!
//! The heights are the mutually recursive sequences
//!
//! ```text
//! Π₀ = n2                Π′₀ = n3
//! Πₙ₊₁ = Δₙ + n2         Π′ₙ₊₁ = Δ′ₙ + n3
//! Δₙ = 0 (t = s)  or  Δ′ₙ (t = x)
//! Δ′ₙ = i·Π′ₙ + Πₙ
//! ```
//!
//! evaluated at `i = n1`. `aₙ = f(c^Πₙ[s], c^Π′ₙ[s])` and each segment
//! `aₙ ⇒^{Π′ₙ}_{r1} · ⇒_{r2} aₙ₊₁` is replayed with the rewrite engine.
//!
//! Arithmetic is generic over [`Count`]; [`BigUint`] never overflows and is
//! what the crate-level aliases use. Fixed-width types report overflow.

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::engine::{iterate_rule, step, Mode};
use crate::recurrence::{RecurrentPair, TKind};
use crate::term::{FreshSupply, Term};

/// Non-negative integer type used for tower heights.
pub trait Count:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Zero
    + One
    + CheckedAdd
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
}

impl<T> Count for T where
    T: Clone
        + Debug
        + Display
        + PartialOrd
        + Zero
        + One
        + CheckedAdd
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("arithmetic overflow evaluating tower heights at index {index}")]
    Overflow { index: usize },
    #[error("closed form only applies when t = s")]
    NotIsS,
    #[error("term of {size} nodes exceeds the size guard of {limit} nodes")]
    SizeGuard { size: String, limit: usize },
    #[error("rule {rule} does not apply to {term}")]
    Stuck { rule: &'static str, term: Term },
    #[error("expected {expected}, got {found}")]
    Mismatch { expected: Term, found: Term },
}

/// `(Πₙ(i), Π′ₙ(i))` for one index `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiPair<T> {
    pub n: usize,
    pub pi: T,
    pub pi_prime: T,
}

fn lift<T: Count>(v: u32) -> T {
    T::from_u32(v).expect("every count type holds u32")
}

/// `(Πₖ(i), Π′ₖ(i))` for `k = 0..=n`, bottom up.
pub fn pi_table<T: Count>(
    t_kind: TKind,
    n2: u32,
    n3: u32,
    i: &T,
    n: usize,
) -> Result<Vec<PiPair<T>>, ChainError> {
    let (n2, n3): (T, T) = (lift(n2), lift(n3));
    let mut out = Vec::with_capacity(n + 1);
    out.push(PiPair {
        n: 0,
        pi: n2.clone(),
        pi_prime: n3.clone(),
    });
    for k in 0..n {
        let prev = &out[k];
        let overflow = ChainError::Overflow { index: k + 1 };
        let delta_prime = i
            .checked_mul(&prev.pi_prime)
            .and_then(|p| p.checked_add(&prev.pi))
            .ok_or_else(|| overflow.clone())?;
        let delta = match t_kind {
            TKind::IsS => T::zero(),
            TKind::IsX => delta_prime.clone(),
        };
        let pi = delta.checked_add(&n2).ok_or_else(|| overflow.clone())?;
        let pi_prime = delta_prime.checked_add(&n3).ok_or(overflow)?;
        out.push(PiPair {
            n: k + 1,
            pi,
            pi_prime,
        });
    }
    Ok(out)
}

/// `(Πₙ(i), Π′ₙ(i))` for an arbitrary evaluation point.
pub fn pi_eval_at<T: Count>(
    t_kind: TKind,
    n2: u32,
    n3: u32,
    i: &T,
    n: usize,
) -> Result<PiPair<T>, ChainError> {
    Ok(pi_table(t_kind, n2, n3, i, n)?
        .pop()
        .expect("table has n + 1 rows"))
}

/// `(Πₙ(n1), Π′ₙ(n1))` for a certificate.
pub fn pi_eval<T: Count>(pair: &RecurrentPair, n: usize) -> Result<PiPair<T>, ChainError> {
    pi_eval_at(pair.t_kind, pair.n2, pair.n3, &lift(pair.n1), n)
}

/// Closed form for `t = s`: `Πₙ = n2` and `Π′ₙ = n3·iⁿ + (n2 + n3)·Σ_{k<n} iᵏ`.
pub fn pi_closed_form_s_at<T: Count>(
    t_kind: TKind,
    n2: u32,
    n3: u32,
    i: &T,
    n: usize,
) -> Result<PiPair<T>, ChainError> {
    if t_kind != TKind::IsS {
        return Err(ChainError::NotIsS);
    }
    let overflow = ChainError::Overflow { index: n };
    let sum_coeff: T = lift(n2.checked_add(n3).ok_or_else(|| overflow.clone())?);
    let mut power = T::one();
    let mut geometric = T::zero();
    for _ in 0..n {
        geometric = geometric
            .checked_add(&power)
            .ok_or_else(|| overflow.clone())?;
        power = power.checked_mul(i).ok_or_else(|| overflow.clone())?;
    }
    let pi_prime = lift::<T>(n3)
        .checked_mul(&power)
        .and_then(|a| {
            sum_coeff
                .checked_mul(&geometric)
                .and_then(|b| a.checked_add(&b))
        })
        .ok_or(overflow)?;
    Ok(PiPair {
        n,
        pi: lift(n2),
        pi_prime,
    })
}

pub fn pi_closed_form_s<T: Count>(pair: &RecurrentPair, n: usize) -> Result<PiPair<T>, ChainError> {
    pi_closed_form_s_at(pair.t_kind, pair.n2, pair.n3, &lift(pair.n1), n)
}

/// Bound on the number of nodes of any term materialized during witness
/// construction or verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_term_size: usize,
}

impl SizeGuard {
    pub const DEFAULT_MAX_TERM_SIZE: usize = 1_000_000;

    pub fn new(max_term_size: usize) -> Self {
        SizeGuard { max_term_size }
    }
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard::new(Self::DEFAULT_MAX_TERM_SIZE)
    }
}

/// Node count of `f(c^m[s], c^n[s])`, or `None` once it exceeds `limit`.
///
/// With `h` holes and `k` other nodes in `c`,
/// `|cᵐ[s]| = k·(1 + h + … + h^{m-1}) + hᵐ·|s|`.
pub fn binary_term_size<T: Count>(
    pair: &RecurrentPair,
    m: &T,
    n: &T,
    limit: usize,
) -> Option<usize> {
    let a = tower_size(pair, m, limit)?;
    let b = tower_size(pair, n, limit)?;
    let total = 1usize.checked_add(a)?.checked_add(b)?;
    (total <= limit).then_some(total)
}

fn tower_size<T: Count>(pair: &RecurrentPair, height: &T, limit: usize) -> Option<usize> {
    let holes = pair.c.hole_count() as u128;
    let skeleton = pair.c.skeleton_size() as u128;
    let base = pair.s.size() as u128;
    let limit = limit as u128;
    let size = if holes == 1 {
        let h = height.to_u128()?;
        skeleton.checked_mul(h)?.checked_add(base)?
    } else {
        // at least doubles per layer, so this loop is short
        let mut size = base;
        let mut remaining = height.clone();
        while remaining > T::zero() {
            size = skeleton.checked_add(holes.checked_mul(size)?)?;
            if size > limit {
                return None;
            }
            remaining = T::from_u128(remaining.to_u128()? - 1)?;
        }
        size
    };
    (size <= limit).then_some(size as usize)
}

fn height_u64<T: Count>(v: &T) -> Option<u64> {
    v.to_u64()
}

fn size_error<T: Count>(pair: &RecurrentPair, m: &T, n: &T, guard: SizeGuard) -> ChainError {
    let size = match (
        tower_size(pair, m, usize::MAX),
        tower_size(pair, n, usize::MAX),
    ) {
        (Some(a), Some(b)) => (1u128 + a as u128 + b as u128).to_string(),
        _ => "too many".to_owned(),
    };
    ChainError::SizeGuard {
        size,
        limit: guard.max_term_size,
    }
}

/// `f(c^m[s], c^n[s])`, subject to the size guard.
pub fn binary_term<T: Count>(
    pair: &RecurrentPair,
    m: &T,
    n: &T,
    guard: SizeGuard,
) -> Result<Term, ChainError> {
    if binary_term_size(pair, m, n, guard.max_term_size).is_none() {
        return Err(size_error(pair, m, n, guard));
    }
    let (m, n) = (
        height_u64(m).expect("guarded"),
        height_u64(n).expect("guarded"),
    );
    let shape = pair.shape();
    Ok(shape.binary(pair.c.tower(m, &pair.s), pair.c.tower(n, &pair.s)))
}

/// The witness term `aₙ = f(c^Πₙ(n1)[s], c^Π′ₙ(n1)[s])`.
pub fn witness_term(pair: &RecurrentPair, n: usize, guard: SizeGuard) -> Result<Term, ChainError> {
    let pi: PiPair<BigUint> = pi_eval(pair, n)?;
    binary_term(pair, &pi.pi, &pi.pi_prime, guard)
}

/// Runs `n` steps of `r1` from `f(m, n)` and checks the result is
/// `f(n1·n + m, 0)`.
pub fn lemma_r1_run(
    pair: &RecurrentPair,
    m: u64,
    n: u64,
    mode: Mode,
    guard: SizeGuard,
    supply: &mut FreshSupply,
) -> Result<Term, ChainError> {
    let target_height = u64::from(pair.n1) * n + m;
    let expected = binary_term(pair, &target_height, &0u64, guard)?;
    let start = binary_term(pair, &m, &n, guard)?;
    let found = iterate_rule(mode, &pair.r1, &start, n, supply).ok_or(ChainError::Stuck {
        rule: "r1",
        term: start,
    })?;
    if found == expected {
        Ok(found)
    } else {
        Err(ChainError::Mismatch { expected, found })
    }
}

/// Runs one `r2` step from `f(m, 0)` and checks the result is
/// `f(m′ + n2, m + n3)` with `m′ = 0` for `t = s` and `m′ = m` for `t = x`.
pub fn lemma_r2_run(
    pair: &RecurrentPair,
    m: u64,
    mode: Mode,
    guard: SizeGuard,
    supply: &mut FreshSupply,
) -> Result<Term, ChainError> {
    let m_prime = match pair.t_kind {
        TKind::IsS => 0,
        TKind::IsX => m,
    };
    let expected = binary_term(
        pair,
        &(m_prime + u64::from(pair.n2)),
        &(m + u64::from(pair.n3)),
        guard,
    )?;
    let start = binary_term(pair, &m, &0u64, guard)?;
    let found = step(mode, &pair.r2, &start, supply).ok_or(ChainError::Stuck {
        rule: "r2",
        term: start,
    })?;
    if found == expected {
        Ok(found)
    } else {
        Err(ChainError::Mismatch { expected, found })
    }
}

/// One element `aₙ` of a verified prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessEntry<T> {
    pub n: usize,
    pub pi: T,
    /// Number of `r1` steps from `aₙ` before the `r2` step.
    pub pi_prime: T,
    /// `None` when the term exceeds the size guard.
    pub term: Option<Term>,
    /// Whether the segment from `aₙ` to `aₙ₊₁` was replayed successfully;
    /// `None` when it was not attempted.
    pub verified: Option<bool>,
}

/// A finite prefix of the binary chain of a recurrent pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainWitness<T> {
    pub pair: RecurrentPair,
    pub mode: Mode,
    pub entries: Vec<WitnessEntry<T>>,
    /// First index whose segment could not be attempted because of the
    /// size guard.
    pub truncated_at: Option<usize>,
    /// The first failure, if any segment did not replay.
    pub failure: Option<ChainError>,
}

impl<T> ChainWitness<T> {
    /// Every attempted segment replayed. An empty prefix is verified.
    pub fn verified(&self) -> bool {
        self.failure.is_none() && self.entries.iter().all(|e| e.verified != Some(false))
    }

    /// Verified and not cut short by the size guard.
    pub fn complete(&self) -> bool {
        self.verified() && self.truncated_at.is_none()
    }

    /// Largest `n` such that `aₙ ⇒ aₙ₊₁` was replayed.
    pub fn largest_verified(&self) -> Option<usize> {
        self.entries
            .iter()
            .take_while(|e| e.verified == Some(true))
            .last()
            .map(|e| e.n)
    }
}

/// Replays the first `len` segments `aₙ (⇒^{Π′ₙ}_{r1} ∘ ⇒_{r2}) aₙ₊₁`.
///
/// Heights are always computed for every entry; term construction and
/// replay stop at the first index whose terms exceed the size guard.
pub fn verify_prefix<T: Count>(
    pair: &RecurrentPair,
    len: usize,
    mode: Mode,
    guard: SizeGuard,
    supply: &mut FreshSupply,
) -> Result<ChainWitness<T>, ChainError> {
    let table: Vec<PiPair<T>> = pi_table(pair.t_kind, pair.n2, pair.n3, &lift(pair.n1), len)?;
    let mut witness = ChainWitness {
        pair: pair.clone(),
        mode,
        entries: Vec::with_capacity(len),
        truncated_at: None,
        failure: None,
    };
    let mut current: Option<Term> = None;
    for n in 0..len {
        let (row, next_row) = (&table[n], &table[n + 1]);
        let mut entry = WitnessEntry {
            n,
            pi: row.pi.clone(),
            pi_prime: row.pi_prime.clone(),
            term: None,
            verified: None,
        };
        if witness.truncated_at.is_none() && witness.failure.is_none() {
            let here = match current.take() {
                Some(t) => Ok(t),
                None => binary_term(pair, &row.pi, &row.pi_prime, guard),
            };
            let next = binary_term(pair, &next_row.pi, &next_row.pi_prime, guard);
            match (here, next) {
                (Ok(a), Ok(b)) => {
                    let outcome = replay_segment(pair, &a, &row.pi_prime, &b, mode, supply);
                    entry.term = Some(a);
                    entry.verified = Some(outcome.is_ok());
                    match outcome {
                        Ok(()) => current = Some(b),
                        Err(e) => witness.failure = Some(e),
                    }
                }
                (Ok(a), Err(_)) => {
                    entry.term = Some(a);
                    witness.truncated_at = Some(n);
                }
                (Err(_), _) => witness.truncated_at = Some(n),
            }
        }
        witness.entries.push(entry);
    }
    Ok(witness)
}

fn replay_segment<T: Count>(
    pair: &RecurrentPair,
    from: &Term,
    r1_steps: &T,
    to: &Term,
    mode: Mode,
    supply: &mut FreshSupply,
) -> Result<(), ChainError> {
    let steps = height_u64(r1_steps).expect("height of a materialized term fits u64");
    let mid =
        iterate_rule(mode, &pair.r1, from, steps, supply).ok_or_else(|| ChainError::Stuck {
            rule: "r1",
            term: from.clone(),
        })?;
    let end = step(mode, &pair.r2, &mid, supply).ok_or(ChainError::Stuck {
        rule: "r2",
        term: mid,
    })?;
    if &end == to {
        Ok(())
    } else {
        Err(ChainError::Mismatch {
            expected: to.clone(),
            found: end,
        })
    }
}
