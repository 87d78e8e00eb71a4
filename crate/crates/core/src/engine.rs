//! Root rewriting by instantiation (term rewriting) and by narrowing with
//! renamed-apart rules (logic programming).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{fresh_variant, FreshSupply, Program, Rule, Substitution, Term, Var};
use crate::unify::{match_term, mgu, variant_terms};

/// Which rewrite relation a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `uθ → vθ`: the term must be an instance of the left-hand side.
    Trs,
    /// `s ⤳ vθ` with `θ = mgu(s, u)` for a variant `(u, v)` of the rule
    /// sharing no variable with `s`.
    Lp,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Trs, Mode::Lp];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Trs => "trs",
            Mode::Lp => "lp",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trs" => Ok(Mode::Trs),
            "lp" => Ok(Mode::Lp),
            other => Err(format!("unknown mode `{other}` (expected trs or lp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rule sequences must be non-empty")]
    EmptySequence,
}

/// One root step, with enough information to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub start: Term,
    pub rule: usize,
    /// The rule as applied: the program rule itself in TRS mode, the fresh
    /// variant in LP mode.
    pub applied: Rule,
    pub substitution: Substitution,
    pub result: Term,
    pub mode: Mode,
}

impl StepTrace {
    /// Re-derives the step from the recorded substitution.
    pub fn replays(&self) -> bool {
        let theta = &self.substitution;
        let lhs_ok = match self.mode {
            Mode::Trs => theta.apply(&self.applied.lhs) == self.start,
            Mode::Lp => theta.apply(&self.applied.lhs) == theta.apply(&self.start),
        };
        lhs_ok && theta.apply(&self.applied.rhs) == self.result
    }
}

pub fn trs_step(rule: &Rule, t: &Term) -> Option<Term> {
    trs_step_traced(rule, t).map(|(_, result)| result)
}

fn trs_step_traced(rule: &Rule, t: &Term) -> Option<(Substitution, Term)> {
    let theta = match_term(&rule.lhs, t)?;
    let result = theta.apply(&rule.rhs);
    Some((theta, result))
}

pub fn lp_step(rule: &Rule, t: &Term, supply: &mut FreshSupply) -> Option<Term> {
    lp_step_traced(rule, t, supply).map(|(_, _, result)| result)
}

fn lp_step_traced(
    rule: &Rule,
    t: &Term,
    supply: &mut FreshSupply,
) -> Option<(Rule, Substitution, Term)> {
    let variant = fresh_variant(rule, &t.vars(), supply);
    // Variable-variable equations bind the rule's fresh variables, which
    // keeps the term's own variable names in the result.
    let theta = mgu(&variant.lhs, t).ok()?;
    let result = theta.apply(&variant.rhs);
    Some((variant, theta, result))
}

pub fn step(mode: Mode, rule: &Rule, t: &Term, supply: &mut FreshSupply) -> Option<Term> {
    match mode {
        Mode::Trs => trs_step(rule, t),
        Mode::Lp => lp_step(rule, t, supply),
    }
}

pub fn step_traced(
    mode: Mode,
    index: usize,
    rule: &Rule,
    t: &Term,
    supply: &mut FreshSupply,
) -> Option<StepTrace> {
    let (applied, substitution, result) = match mode {
        Mode::Trs => {
            let (theta, result) = trs_step_traced(rule, t)?;
            (rule.clone(), theta, result)
        }
        Mode::Lp => lp_step_traced(rule, t, supply)?,
    };
    Some(StepTrace {
        start: t.clone(),
        rule: index,
        applied,
        substitution,
        result,
        mode,
    })
}

/// `⇒_ω` for a non-empty sequence `ω`, applied left to right.
pub fn step_seq(
    mode: Mode,
    rules: &[&Rule],
    t: &Term,
    supply: &mut FreshSupply,
) -> Result<Option<Term>, EngineError> {
    if rules.is_empty() {
        return Err(EngineError::EmptySequence);
    }
    let mut current = t.clone();
    for r in rules {
        match step(mode, r, &current, supply) {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

/// `⇒ⁿ_r`; zero steps is the identity.
pub fn iterate_rule(
    mode: Mode,
    rule: &Rule,
    t: &Term,
    n: u64,
    supply: &mut FreshSupply,
) -> Option<Term> {
    let mut current = t.clone();
    for _ in 0..n {
        current = step(mode, rule, &current, supply)?;
    }
    Some(current)
}

/// Terms reachable from a start term by root steps of a program.
#[derive(Debug, Clone)]
pub struct Exploration {
    /// Distinct reached terms modulo renaming, start term first, in
    /// breadth-first order.
    pub terms: Vec<Term>,
    /// Depth (number of steps from the start) of each entry in `terms`.
    pub depths: Vec<usize>,
    /// Every step taken, successors of a term in program order.
    pub traces: Vec<StepTrace>,
    /// True when the depth bound cut off further successors.
    pub exhausted: bool,
}

impl Exploration {
    pub fn contains(&self, t: &Term) -> bool {
        self.terms.iter().any(|u| variant_terms(u, t).is_some())
    }
}

/// Breadth-first enumeration of root successors up to `max_steps` steps.
pub fn explore(
    mode: Mode,
    program: &Program,
    start: &Term,
    max_steps: usize,
    supply: &mut FreshSupply,
) -> Exploration {
    let mut out = Exploration {
        terms: vec![start.clone()],
        depths: vec![0],
        traces: Vec::new(),
        exhausted: false,
    };
    let mut frontier = vec![start.clone()];
    for depth in 1..=max_steps {
        let mut next = Vec::new();
        for t in &frontier {
            for (i, r) in program.iter().enumerate() {
                let Some(trace) = step_traced(mode, i, r, t, supply) else {
                    continue;
                };
                if !out.contains(&trace.result) {
                    out.terms.push(trace.result.clone());
                    out.depths.push(depth);
                    next.push(trace.result.clone());
                }
                out.traces.push(trace);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            return out;
        }
    }
    out.exhausted = frontier.iter().any(|t| {
        program
            .iter()
            .any(|r| step(mode, r, t, supply).is_some_and(|u| !out.contains(&u)))
    });
    out
}

/// Variables a step result may introduce beyond those of the start term.
pub fn introduced_vars(start: &Term, result: &Term) -> BTreeSet<Var> {
    result.vars().difference(&start.vars()).cloned().collect()
}
