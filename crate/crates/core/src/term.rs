//! First-order terms, contexts, substitutions and renamings.
//!
//! Terms are immutable. Argument lists live behind an `Arc`, so cloning a
//! term and plugging the same subterm into several holes share structure;
//! equality is always structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Name of the distinguished nullary hole symbol used by contexts.
pub const HOLE_NAME: &str = "□";

/// A variable identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A function symbol. Arity is carried by the argument list of each
/// application; the parser enforces a single arity per symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn hole() -> Self {
        Symbol::new(HOLE_NAME)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_hole(&self) -> bool {
        &*self.0 == HOLE_NAME
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_hole() {
            f.write_str("[]")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// A first-order term: a variable or a symbol applied to arguments.
///
/// The hole `□` is an ordinary nullary application of [`Symbol::hole`], so
/// contexts are terms and every term operation works on them unchanged.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::App(Symbol::new(name), Arc::from(Vec::new()))
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Self {
        Term::App(Symbol::new(symbol), Arc::from(args))
    }

    pub fn apply_symbol(symbol: Symbol, args: Vec<Term>) -> Self {
        Term::App(symbol, Arc::from(args))
    }

    pub fn hole() -> Self {
        Term::App(Symbol::hole(), Arc::from(Vec::new()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Term::App(sym, args) if sym.is_hole() && args.is_empty())
    }

    /// Root symbol and arguments, if this is an application.
    pub fn root(&self) -> Option<(&Symbol, &[Term])> {
        match self {
            Term::App(sym, args) => Some((sym, args)),
            Term::Var(_) => None,
        }
    }

    /// The set of variables occurring in the term. Holes are not variables.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => {
                    out.insert(v.clone());
                }
                Term::App(_, args) => stack.extend(args.iter()),
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(_) => return false,
                Term::App(_, args) => stack.extend(args.iter()),
            }
        }
        true
    }

    pub fn occurs(&self, var: &Var) -> bool {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) if v == var => return true,
                Term::Var(_) => {}
                Term::App(_, args) => stack.extend(args.iter()),
            }
        }
        false
    }

    /// Number of nodes (variables, constants and applications).
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            if let Term::App(_, args) = t {
                stack.extend(args.iter());
            }
        }
        n
    }

    pub fn hole_count(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                t if t.is_hole() => n += 1,
                Term::App(_, args) => stack.extend(args.iter()),
                Term::Var(_) => {}
            }
        }
        n
    }

    /// Replace every hole by `filler`. A hole-free term is returned as is.
    pub fn fill_holes(&self, filler: &Term) -> Term {
        self.fill_holes_shared(filler)
            .unwrap_or_else(|| self.clone())
    }

    fn fill_holes_shared(&self, filler: &Term) -> Option<Term> {
        match self {
            Term::Var(_) => None,
            t if t.is_hole() => Some(filler.clone()),
            Term::App(sym, args) => rebuild(sym, args, |a| a.fill_holes_shared(filler)),
        }
    }
}

/// Rebuild an application from per-argument rewrites, reusing the original
/// argument slice when nothing changed.
fn rebuild(sym: &Symbol, args: &Arc<[Term]>, f: impl Fn(&Term) -> Option<Term>) -> Option<Term> {
    let mut changed: Option<Vec<Term>> = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(new) = f(a) {
            changed.get_or_insert_with(|| args[..i].to_vec()).push(new);
        } else if let Some(v) = changed.as_mut() {
            v.push(a.clone());
        }
    }
    changed.map(|v| Term::App(sym.clone(), Arc::from(v)))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(sym, args) => {
                write!(f, "{sym}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term with at least one hole.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(Term);

impl Context {
    /// Wraps `t` if it contains a hole.
    pub fn new(t: Term) -> Option<Self> {
        (t.hole_count() > 0).then_some(Context(t))
    }

    /// The trivial context `□`.
    pub fn hole() -> Self {
        Context(Term::hole())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_hole()
    }

    pub fn as_term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }

    /// `c[t]`: all holes filled with `t`.
    pub fn plug(&self, t: &Term) -> Term {
        self.0.fill_holes(t)
    }

    /// `c[d]`, which is again a context.
    pub fn nest(&self, inner: &Context) -> Context {
        Context(self.0.fill_holes(&inner.0))
    }

    /// `cⁿ`, with `c⁰ = □`.
    pub fn power(&self, n: u32) -> Context {
        let mut acc = Context::hole();
        for _ in 0..n {
            acc = self.nest(&acc);
        }
        acc
    }

    /// `cⁿ[t]`, built inside out.
    pub fn tower(&self, n: u64, t: &Term) -> Term {
        let mut acc = t.clone();
        for _ in 0..n {
            acc = self.plug(&acc);
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.0.vars()
    }

    pub fn is_ground(&self) -> bool {
        self.0.is_ground()
    }

    pub fn hole_count(&self) -> usize {
        self.0.hole_count()
    }

    /// Nodes of the context other than holes.
    pub fn skeleton_size(&self) -> usize {
        self.0.size() - self.hole_count()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A substitution with finite domain. Identity bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(var: Var, term: Term) -> Self {
        let mut s = Self::new();
        s.bind(var, term);
        s
    }

    /// Adds or replaces a binding; `x ↦ x` removes `x` from the domain.
    pub fn bind(&mut self, var: Var, term: Term) {
        if term.as_var() == Some(&var) {
            self.map.remove(&var);
        } else {
            self.map.insert(var, term);
        }
    }

    pub fn get(&self, var: &Var) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `tθ`.
    pub fn apply(&self, t: &Term) -> Term {
        if self.is_empty() {
            return t.clone();
        }
        self.apply_shared(t).unwrap_or_else(|| t.clone())
    }

    fn apply_shared(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(v) => self.map.get(v).cloned(),
            Term::App(sym, args) => rebuild(sym, args, |a| self.apply_shared(a)),
        }
    }

    pub fn apply_rule(&self, r: &Rule) -> Rule {
        Rule::new(self.apply(&r.lhs), self.apply(&r.rhs))
    }

    /// The composition `σθ` (apply `self` first, then `other`).
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.map {
            out.bind(v.clone(), other.apply(t));
        }
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                out.bind(v.clone(), t.clone());
            }
        }
        out
    }

    /// `θⁿ`, with `θ⁰ = ∅`.
    pub fn power(&self, n: u32) -> Substitution {
        let mut acc = Substitution::new();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.apply(t) == *t)
    }

    /// Variables occurring in the range.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.bind(v, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A substitution that permutes the variables it touches.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Renaming(Substitution);

impl Renaming {
    /// Accepts `subst` if it maps variables to variables and its image is
    /// exactly its domain.
    pub fn new(subst: Substitution) -> Option<Self> {
        let mut image = BTreeSet::new();
        for (_, t) in subst.iter() {
            if !image.insert(t.as_var()?.clone()) {
                return None;
            }
        }
        let domain: BTreeSet<Var> = subst.domain().cloned().collect();
        (domain == image).then_some(Renaming(subst))
    }

    /// Extends an injective variable map to a permutation of the variables
    /// it mentions. Leftover sources and targets are paired in sorted order.
    pub fn from_injective(pairs: &BTreeMap<Var, Var>) -> Option<Self> {
        let targets: BTreeSet<&Var> = pairs.values().collect();
        if targets.len() != pairs.len() {
            return None;
        }
        let sources: BTreeSet<&Var> = pairs.keys().collect();
        let free_sources = targets.difference(&sources).map(|v| (*v).clone());
        let free_targets = sources.difference(&targets).map(|v| (*v).clone());
        let mut s: Substitution = pairs
            .iter()
            .map(|(a, b)| (a.clone(), Term::Var(b.clone())))
            .collect();
        for (a, b) in free_sources.zip(free_targets) {
            s.bind(a, Term::Var(b));
        }
        Renaming::new(s)
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Var) -> Var {
        match self.0.get(v) {
            Some(Term::Var(w)) => w.clone(),
            _ => v.clone(),
        }
    }

    pub fn inverse(&self) -> Renaming {
        Renaming(
            self.0
                .iter()
                .map(|(v, t)| {
                    (
                        t.as_var().expect("renaming image").clone(),
                        Term::Var(v.clone()),
                    )
                })
                .collect(),
        )
    }

    pub fn as_substitution(&self) -> &Substitution {
        &self.0
    }

    pub fn apply(&self, t: &Term) -> Term {
        self.0.apply(t)
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A rewrite rule `lhs -> rhs`. The right-hand side may mention variables
/// absent from the left-hand side.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Rule { lhs, rhs }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.lhs.vars();
        self.rhs.collect_vars(&mut out);
        out
    }

    /// `Var(rhs) ⊆ Var(lhs)`.
    pub fn is_variable_preserving(&self) -> bool {
        self.rhs.vars().is_subset(&self.lhs.vars())
    }

    pub fn is_ground(&self) -> bool {
        self.lhs.is_ground() && self.rhs.is_ground()
    }

    pub fn rename(&self, gamma: &Renaming) -> Rule {
        gamma.as_substitution().apply_rule(self)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered list of rules. Rule indices are positions in this list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rule> {
        self.rules.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        Program::new(iter.into_iter().collect())
    }
}

/// Source of fresh variable names `base_k` with a strictly increasing `k`.
///
/// The counter is the only state, so replaying a supply from the same
/// starting point reproduces the same names. Callers that work in parallel
/// should hand each worker its own supply started at a disjoint offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshSupply {
    next: u64,
}

impl Default for FreshSupply {
    fn default() -> Self {
        FreshSupply { next: 1 }
    }
}

impl FreshSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(next: u64) -> Self {
        FreshSupply { next }
    }

    pub fn peek(&self) -> u64 {
        self.next
    }

    /// A fresh variable derived from `base` and not in `avoid`.
    pub fn fresh(&mut self, base: &Var, avoid: &BTreeSet<Var>) -> Var {
        let stem = strip_counter(base.name());
        loop {
            let k = self.next;
            self.next += 1;
            let v = Var::new(&format!("{stem}_{k}"));
            if !avoid.contains(&v) {
                return v;
            }
        }
    }
}

// Everything after the last `_` is the counter, so distinct counters give
// distinct names regardless of the stem.
fn strip_counter(name: &str) -> &str {
    match name.rfind('_') {
        Some(i)
            if i > 0 && i + 1 < name.len() && name[i + 1..].bytes().all(|b| b.is_ascii_digit()) =>
        {
            &name[..i]
        }
        _ => name,
    }
}

/// A variant of `r` whose variables avoid `avoid`. Variables are renamed in
/// sorted order, so the result depends only on `r`, `avoid` and the supply.
pub fn fresh_variant(r: &Rule, avoid: &BTreeSet<Var>, supply: &mut FreshSupply) -> Rule {
    let mut pairs = BTreeMap::new();
    for v in r.vars() {
        let w = supply.fresh(&v, avoid);
        pairs.insert(v, w);
    }
    let gamma = Renaming::from_injective(&pairs).expect("fresh names are distinct");
    r.rename(&gamma)
}
