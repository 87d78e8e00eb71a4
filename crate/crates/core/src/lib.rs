//! Non-termination analysis for root-rewriting systems.
//!
//! A program is a list of rules `lhs -> rhs` applied at the root of a term,
//! either by instantiation (term rewriting, [`Mode::Trs`]) or by narrowing
//! with a renamed-apart rule (logic programming, [`Mode::Lp`]). The
//! analyzer looks for *recurrent pairs* of rules: `r1` moves a tower of a
//! ground context `c` from the second argument of a binary symbol to the
//! first, and `r2` puts a tower back. Every recurrent pair yields an
//! infinite chain `a0 ⇒* ⇒ a1 ⇒* ⇒ a2 …` whose tower heights are given by a
//! pair of mutually recursive polynomials; [`chain::verify_prefix`] builds
//! the first terms of that chain and replays each segment with the rewrite
//! engine.
//!
//! Tower-height arithmetic is generic over [`chain::Count`]. The aliases
//! below fix it to [`BigUint`], which is what the command layer uses.

pub mod chain;
pub mod engine;
pub mod recurrence;
pub mod report;
pub mod syntax;
pub mod term;
pub mod unify;

pub use num_bigint::BigUint;

pub use chain::{ChainError, Count, SizeGuard};
pub use engine::Mode;
pub use recurrence::{detect, RecurrentPair, TKind};
pub use syntax::{format_program, parse_program, parse_term, ParseError, ProgramFile};
pub use term::{Context, FreshSupply, Program, Renaming, Rule, Substitution, Symbol, Term, Var};
pub use unify::{match_term, mgu, variant_of, UnifyFailure, UnifyOutcome};

/// Tower heights with exact arbitrary-precision arithmetic.
pub type PiPair = chain::PiPair<BigUint>;
/// A replayed chain prefix with exact heights.
pub type ChainWitness = chain::ChainWitness<BigUint>;
/// One witness entry with exact heights.
pub type WitnessEntry = chain::WitnessEntry<BigUint>;
/// Heights in machine words; evaluation reports overflow instead of wrapping.
pub type PiPairU64 = chain::PiPair<u64>;
