//! Random generators shared by the integration test targets.
#![allow(dead_code)]

use nonterm::recurrence::{PairShape, TKind};
use nonterm::{Context, Rule, Symbol, Term};
use rand::seq::SliceRandom;
use rand::Rng;

/// `(name, arity)`.
pub type Sig = &'static [(&'static str, usize)];

pub const UNIFY_SIG: Sig = &[("a", 0), ("g", 1), ("h", 2)];
pub const CONTEXT_SIG: Sig = &[("a", 0), ("b", 0), ("g", 1), ("h", 2)];
pub const VARS: &[&str] = &["x", "y", "z"];

pub fn random_term<R: Rng>(rng: &mut R, depth: usize, sig: Sig, vars: &[&str]) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let constants: Vec<_> = sig.iter().filter(|(_, k)| *k == 0).collect();
        if !vars.is_empty() && (constants.is_empty() || rng.gen_bool(0.5)) {
            return Term::var(vars.choose(rng).unwrap());
        }
        return Term::constant(constants.choose(rng).unwrap().0);
    }
    let (name, arity) = *sig.choose(rng).unwrap();
    let args = (0..arity)
        .map(|_| random_term(rng, depth - 1, sig, vars))
        .collect();
    Term::app(name, args)
}

pub fn random_ground<R: Rng>(rng: &mut R, depth: usize, sig: Sig) -> Term {
    random_term(rng, depth, sig, &[])
}

/// A ground context with at least one hole and a non-hole root, of depth
/// at most `depth` (≥ 1) and at most `max_holes` holes.
pub fn random_context<R: Rng>(rng: &mut R, depth: usize, max_holes: usize) -> Context {
    loop {
        let t = context_term(rng, depth, true);
        let holes = t.hole_count();
        if holes >= 1 && holes <= max_holes {
            return Context::new(t).unwrap();
        }
    }
}

fn context_term<R: Rng>(rng: &mut R, depth: usize, root: bool) -> Term {
    if !root && (depth == 0 || rng.gen_bool(0.35)) {
        return if rng.gen_bool(0.6) {
            Term::hole()
        } else {
            random_ground(rng, 0, CONTEXT_SIG)
        };
    }
    let (name, arity) = *[("g", 1), ("h", 2)].choose(rng).unwrap();
    let args = (0..arity)
        .map(|_| context_term(rng, depth.saturating_sub(1), false))
        .collect();
    Term::app(name, args)
}

pub fn random_t_kind<R: Rng>(rng: &mut R) -> TKind {
    if rng.gen_bool(0.5) {
        TKind::IsX
    } else {
        TKind::IsS
    }
}

/// Template parameters with the given context and exponent bounds.
pub fn random_shape<R: Rng>(rng: &mut R, c: Context, max_exp: u32) -> PairShape {
    let s_depth = rng.gen_range(0..=2);
    PairShape {
        f: Symbol::new("f"),
        c,
        s: random_ground(rng, s_depth, CONTEXT_SIG),
        t_kind: random_t_kind(rng),
        n1: rng.gen_range(0..=max_exp),
        n2: rng.gen_range(0..=max_exp),
        n3: rng.gen_range(0..=max_exp),
    }
}

/// `c` with every hole replaced by `w`, written out independently of the
/// library's context code.
pub fn fill(c: &Term, w: &Term) -> Term {
    if c.is_hole() {
        return w.clone();
    }
    match c {
        Term::Var(_) => c.clone(),
        Term::App(sym, args) => {
            Term::apply_symbol(sym.clone(), args.iter().map(|a| fill(a, w)).collect())
        }
    }
}

pub fn tower(c: &Term, n: u32, w: &Term) -> Term {
    (0..n).fold(w.clone(), |acc, _| fill(c, &acc))
}

/// The two template rules, built directly from the definition with the
/// given variable names.
pub fn template_rules(
    f: &str,
    c: &Term,
    s: &Term,
    t_kind: TKind,
    (n1, n2, n3): (u32, u32, u32),
    (x1, y1, x2): (&str, &str, &str),
) -> (Rule, Rule) {
    let bin = |a: Term, b: Term| Term::app(f, vec![a, b]);
    let (x, y) = (Term::var(x1), Term::var(y1));
    let r1 = Rule::new(bin(x.clone(), fill(c, &y)), bin(tower(c, n1, &x), y));
    let x = Term::var(x2);
    let t = match t_kind {
        TKind::IsX => x.clone(),
        TKind::IsS => s.clone(),
    };
    let r2 = Rule::new(
        bin(x.clone(), s.clone()),
        bin(tower(c, n2, &t), tower(c, n3, &x)),
    );
    (r1, r2)
}

/// Replaces the symbol at the `k`-th application node (pre-order, modulo
/// the node count) by another symbol of the same arity from `sig`.
pub fn mutate_symbol<R: Rng>(rng: &mut R, t: &Term, sig: Sig) -> Term {
    let mut apps = 0;
    count_apps(t, &mut apps);
    if apps == 0 {
        return t.clone();
    }
    let target = rng.gen_range(0..apps);
    let mut seen = 0;
    replace_nth(rng, t, target, &mut seen, sig)
}

fn count_apps(t: &Term, n: &mut usize) {
    if let Term::App(_, args) = t {
        *n += 1;
        args.iter().for_each(|a| count_apps(a, n));
    }
}

fn replace_nth<R: Rng>(rng: &mut R, t: &Term, target: usize, seen: &mut usize, sig: Sig) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(sym, args) => {
            let here = *seen;
            *seen += 1;
            let new_args: Vec<Term> = args
                .iter()
                .map(|a| replace_nth(rng, a, target, seen, sig))
                .collect();
            let symbol = if here == target {
                let options: Vec<_> = sig
                    .iter()
                    .filter(|(n, k)| *k == args.len() && *n != sym.name())
                    .map(|(n, _)| *n)
                    .collect();
                options
                    .choose(rng)
                    .map_or_else(|| sym.clone(), |n| Symbol::new(n))
            } else {
                sym.clone()
            };
            Term::apply_symbol(symbol, new_args)
        }
    }
}
