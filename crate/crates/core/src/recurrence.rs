//! Syntactic detection of recurrent pairs.
//!
//! A recurrent pair is two rules of the shapes
//!
//! ```text
//! r1 = f(x, c[y])  -> f(c^n1[x], y)
//! r2 = f(x, s)     -> f(c^n2[t], c^n3[x])      t ∈ {x, s}
//! ```
//!
//! with `x ≠ y` and `c`, `s` ground. Each rule is matched against its
//! template independently, modulo renaming; `f`, `c` and `s` must agree
//! syntactically between the two.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Context, Program, Rule, Symbol, Term, Var};
use crate::unify::variant_of;

/// Whether the first argument of the `r2` right-hand side is built on `x`
/// or on `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TKind {
    #[serde(rename = "x")]
    IsX,
    #[serde(rename = "s")]
    IsS,
}

impl fmt::Display for TKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TKind::IsX => "x",
            TKind::IsS => "s",
        })
    }
}

/// An instantiation of the `r1` template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R1Match {
    pub f: Symbol,
    pub x: Var,
    pub y: Var,
    pub c: Context,
    pub n1: u32,
}

/// An instantiation of the `r2` template for a given context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R2Match {
    pub f: Symbol,
    pub x: Var,
    pub s: Term,
    pub t_kind: TKind,
    pub n2: u32,
    pub n3: u32,
}

/// A recurrent-pair certificate for two rules of a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrentPair {
    pub r1_index: usize,
    pub r2_index: usize,
    pub r1: Rule,
    pub r2: Rule,
    pub f: Symbol,
    pub c: Context,
    pub s: Term,
    pub t_kind: TKind,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

/// The parameters of a recurrent pair, without the rules they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairShape {
    pub f: Symbol,
    pub c: Context,
    pub s: Term,
    pub t_kind: TKind,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

impl PairShape {
    /// `f(x, c[y]) -> f(c^n1[x], y)`.
    pub fn r1_template(&self) -> Rule {
        let (x, y) = (Term::var("x"), Term::var("y"));
        Rule::new(
            self.binary(x.clone(), self.c.plug(&y)),
            self.binary(self.c.tower(self.n1.into(), &x), y),
        )
    }

    /// `f(x, s) -> f(c^n2[t], c^n3[x])`.
    pub fn r2_template(&self) -> Rule {
        let x = Term::var("x");
        let t = match self.t_kind {
            TKind::IsX => x.clone(),
            TKind::IsS => self.s.clone(),
        };
        Rule::new(
            self.binary(x.clone(), self.s.clone()),
            self.binary(
                self.c.tower(self.n2.into(), &t),
                self.c.tower(self.n3.into(), &x),
            ),
        )
    }

    pub fn binary(&self, a: Term, b: Term) -> Term {
        Term::apply_symbol(self.f.clone(), vec![a, b])
    }

    /// The two template rules as a program `[r1, r2]`.
    pub fn program(&self) -> Program {
        Program::new(vec![self.r1_template(), self.r2_template()])
    }
}

impl RecurrentPair {
    pub fn shape(&self) -> PairShape {
        PairShape {
            f: self.f.clone(),
            c: self.c.clone(),
            s: self.s.clone(),
            t_kind: self.t_kind,
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
        }
    }

    /// Rebuilds both rules from the parameters and checks that they are
    /// variants of the program rules, and that the side conditions hold.
    pub fn reconstructs(&self) -> bool {
        let shape = self.shape();
        !self.c.is_trivial()
            && self.c.is_ground()
            && self.s.is_ground()
            && variant_of(&self.r1, &shape.r1_template()).is_some()
            && variant_of(&self.r2, &shape.r2_template()).is_some()
    }

    /// `n1 = 0`: `r1` only strips the context. Allowed, but worth flagging.
    pub fn is_degenerate(&self) -> bool {
        self.n1 == 0
    }
}

impl fmt::Display for RecurrentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rules ({}, {}): f = {}, c = {}, s = {}, t = {}, (n1, n2, n3) = ({}, {}, {})",
            self.r1_index,
            self.r2_index,
            self.f,
            self.c,
            self.s,
            self.t_kind,
            self.n1,
            self.n2,
            self.n3
        )
    }
}

/// `t` with every occurrence of `y` replaced by a hole, provided `y` is the
/// only variable of `t`. Returns `□` for `t = y`; callers decide whether the
/// trivial context is acceptable.
pub fn abstract_context(t: &Term, y: &Var) -> Option<Context> {
    let vars = t.vars();
    if vars.len() != 1 || !vars.contains(y) {
        return None;
    }
    let hole = crate::term::Substitution::singleton(y.clone(), Term::hole());
    Context::new(hole.apply(t))
}

/// One layer: `w` with `u = c[w]`, if any.
fn peel_once(c: &Context, u: &Term) -> Option<Term> {
    let mut filler: Option<&Term> = None;
    let mut work = vec![(c.as_term(), u)];
    while let Some((p, t)) = work.pop() {
        if p.is_hole() {
            match filler {
                Some(w) if w != t => return None,
                Some(_) => {}
                None => filler = Some(t),
            }
            continue;
        }
        match (p, t) {
            (Term::App(f, pargs), Term::App(g, targs)) if f == g && pargs.len() == targs.len() => {
                work.extend(pargs.iter().zip(targs.iter()));
            }
            _ => return None,
        }
    }
    filler.cloned()
}

/// Every `(n, w)` with `u = cⁿ[w]`, by descending `n`. Always ends with
/// `(0, u)`. For `c = □` every `n` works, so only `(0, u)` is returned.
pub fn peel(c: &Context, u: &Term) -> Vec<(u32, Term)> {
    let mut layers = vec![u.clone()];
    if !c.is_trivial() {
        while let Some(w) = peel_once(c, layers.last().expect("non-empty")) {
            layers.push(w);
        }
    }
    layers
        .into_iter()
        .enumerate()
        .rev()
        .map(|(n, w)| (n as u32, w))
        .collect()
}

fn binary_root(t: &Term) -> Option<(&Symbol, &Term, &Term)> {
    match t.root()? {
        (f, [a, b]) => Some((f, a, b)),
        _ => None,
    }
}

/// All ways `r` fits `f(x, c[y]) -> f(c^n1[x], y)` with `x ≠ y` and `c` a
/// ground, non-trivial context.
pub fn match_r1(r: &Rule) -> Vec<R1Match> {
    let Some((f, lx, lcy)) = binary_root(&r.lhs) else {
        return Vec::new();
    };
    let Some((g, rcx, ry)) = binary_root(&r.rhs) else {
        return Vec::new();
    };
    if f != g {
        return Vec::new();
    }
    let (Some(x), Some(y)) = (lx.as_var(), ry.as_var()) else {
        return Vec::new();
    };
    if x == y {
        return Vec::new();
    }
    let Some(c) = abstract_context(lcy, y) else {
        return Vec::new();
    };
    if c.is_trivial() {
        return Vec::new();
    }
    peel(&c, rcx)
        .into_iter()
        .filter(|(_, w)| w.as_var() == Some(x))
        .map(|(n1, _)| R1Match {
            f: f.clone(),
            x: x.clone(),
            y: y.clone(),
            c: c.clone(),
            n1,
        })
        .collect()
}

/// All ways `r` fits `f(x, s) -> f(c^n2[t], c^n3[x])` for the given `c`,
/// with `s` ground and `t ∈ {x, s}`.
pub fn match_r2(r: &Rule, c: &Context) -> Vec<R2Match> {
    let Some((f, lx, s)) = binary_root(&r.lhs) else {
        return Vec::new();
    };
    let Some((g, ra, rb)) = binary_root(&r.rhs) else {
        return Vec::new();
    };
    if f != g || !s.is_ground() || !c.is_ground() {
        return Vec::new();
    }
    let Some(x) = lx.as_var() else {
        return Vec::new();
    };
    let x_term = Term::Var(x.clone());
    let n3s: Vec<u32> = peel(c, rb)
        .into_iter()
        .filter(|(_, w)| *w == x_term)
        .map(|(n, _)| n)
        .collect();
    let mut out = Vec::new();
    for (n2, w) in peel(c, ra) {
        let t_kind = if w == x_term {
            TKind::IsX
        } else if w == *s {
            TKind::IsS
        } else {
            continue;
        };
        for &n3 in &n3s {
            out.push(R2Match {
                f: f.clone(),
                x: x.clone(),
                s: s.clone(),
                t_kind,
                n2,
                n3,
            });
        }
    }
    out
}

/// Every recurrent pair of the program, scanning ordered pairs of rule
/// indices (the diagonal included) in program order. Each certificate is
/// checked by reconstruction before it is returned.
pub fn detect(program: &Program) -> Vec<RecurrentPair> {
    let mut out = Vec::new();
    for (i, r1) in program.iter().enumerate() {
        for m1 in match_r1(r1) {
            for (j, r2) in program.iter().enumerate() {
                for m2 in match_r2(r2, &m1.c) {
                    if m2.f != m1.f {
                        continue;
                    }
                    let pair = RecurrentPair {
                        r1_index: i,
                        r2_index: j,
                        r1: r1.clone(),
                        r2: r2.clone(),
                        f: m1.f.clone(),
                        c: m1.c.clone(),
                        s: m2.s,
                        t_kind: m2.t_kind,
                        n1: m1.n1,
                        n2: m2.n2,
                        n3: m2.n3,
                    };
                    if pair.reconstructs() {
                        out.push(pair);
                    }
                }
            }
        }
    }
    out
}
