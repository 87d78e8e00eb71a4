//! Matching, most general unifiers with occurs check, and variant checks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::{Renaming, Rule, Substitution, Term, Var};

/// Why two terms have no unifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyFailure {
    #[error("symbol clash between {left} and {right}")]
    Clash { left: Term, right: Term },
    #[error("occurs check: {var} occurs in {term}")]
    OccursCheck { var: Var, term: Term },
}

impl UnifyFailure {
    pub fn is_clash(&self) -> bool {
        matches!(self, UnifyFailure::Clash { .. })
    }

    pub fn is_occurs_check(&self) -> bool {
        matches!(self, UnifyFailure::OccursCheck { .. })
    }
}

/// The result of [`mgu`]: an idempotent most general unifier or the reason
/// unification failed.
pub type UnifyOutcome = Result<Substitution, UnifyFailure>;

/// The substitution `θ` with `pattern θ = subject`, restricted to the
/// variables of `pattern`, if `subject` is an instance of `pattern`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut bindings: BTreeMap<Var, Term> = BTreeMap::new();
    if match_into(pattern, subject, &mut bindings) {
        Some(bindings.into_iter().collect())
    } else {
        None
    }
}

fn match_into(pattern: &Term, subject: &Term, bindings: &mut BTreeMap<Var, Term>) -> bool {
    let mut work = vec![(pattern, subject)];
    while let Some((p, s)) = work.pop() {
        match p {
            Term::Var(v) => match bindings.get(v) {
                Some(bound) if bound != s => return false,
                Some(_) => {}
                None => {
                    bindings.insert(v.clone(), s.clone());
                }
            },
            Term::App(f, pargs) => match s {
                Term::App(g, sargs) if f == g && pargs.len() == sargs.len() => {
                    work.extend(pargs.iter().zip(sargs.iter()));
                }
                _ => return false,
            },
        }
    }
    true
}

/// Most general unifier of `s` and `t`.
///
/// Works over a list of pending equations (decompose, eliminate, clash,
/// occurs check). The solved form is kept fully applied, so the answer is
/// idempotent. A variable-variable equation binds the left variable.
pub fn mgu(s: &Term, t: &Term) -> UnifyOutcome {
    let mut solved = Substitution::new();
    let mut work: Vec<(Term, Term)> = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = work.pop() {
        let a = solved.apply(&a);
        let b = solved.apply(&b);
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(x), _) => eliminate(&mut solved, x, &b)?,
            (_, Term::Var(y)) => eliminate(&mut solved, y, &a)?,
            (Term::App(f, fargs), Term::App(g, gargs)) => {
                if f != g || fargs.len() != gargs.len() {
                    return Err(UnifyFailure::Clash {
                        left: a.clone(),
                        right: b.clone(),
                    });
                }
                // reversed so the leftmost argument pair is solved first
                for (l, r) in fargs.iter().zip(gargs.iter()).rev() {
                    work.push((l.clone(), r.clone()));
                }
            }
        }
    }
    Ok(solved)
}

fn eliminate(solved: &mut Substitution, x: &Var, t: &Term) -> Result<(), UnifyFailure> {
    if t.occurs(x) {
        return Err(UnifyFailure::OccursCheck {
            var: x.clone(),
            term: t.clone(),
        });
    }
    *solved = solved.compose(&Substitution::singleton(x.clone(), t.clone()));
    Ok(())
}

/// Some renaming `γ` with `r = r′γ` (both sides at once), if `r` is a
/// variant of `r′`. The returned renaming is a permutation of the variables
/// it mentions.
pub fn variant_of(r: &Rule, r_prime: &Rule) -> Option<Renaming> {
    let mut pairs = BTreeMap::new();
    let mut used = BTreeMap::new();
    if rename_into(&r_prime.lhs, &r.lhs, &mut pairs, &mut used)
        && rename_into(&r_prime.rhs, &r.rhs, &mut pairs, &mut used)
    {
        Renaming::from_injective(&pairs)
    } else {
        None
    }
}

/// Some renaming `γ` with `a = bγ`, if the terms are equal modulo renaming.
pub fn variant_terms(a: &Term, b: &Term) -> Option<Renaming> {
    let mut pairs = BTreeMap::new();
    let mut used = BTreeMap::new();
    rename_into(b, a, &mut pairs, &mut used)
        .then(|| Renaming::from_injective(&pairs))
        .flatten()
}

/// Like matching, but every variable must map to a distinct variable.
fn rename_into(
    from: &Term,
    to: &Term,
    pairs: &mut BTreeMap<Var, Var>,
    used: &mut BTreeMap<Var, Var>,
) -> bool {
    let mut work = vec![(from, to)];
    while let Some((p, s)) = work.pop() {
        match (p, s) {
            (Term::Var(v), Term::Var(w)) => match (pairs.get(v), used.get(w)) {
                (Some(w2), _) if w2 != w => return false,
                (None, Some(_)) => return false,
                (Some(_), _) => {}
                (None, None) => {
                    pairs.insert(v.clone(), w.clone());
                    used.insert(w.clone(), v.clone());
                }
            },
            (Term::App(f, pargs), Term::App(g, sargs)) if f == g && pargs.len() == sargs.len() => {
                work.extend(pargs.iter().zip(sargs.iter()));
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn a(f: &str, args: Vec<Term>) -> Term {
        Term::app(f, args)
    }

    #[test]
    fn match_examples() {
        let fx = a("f", vec![v("x")]);
        let ffx = a("f", vec![fx.clone()]);
        assert_eq!(
            match_term(&fx, &ffx),
            Some(Substitution::singleton(Var::new("x"), fx.clone()))
        );
        let linear = a("g", vec![v("x"), v("y")]);
        assert_eq!(match_term(&linear, &linear), Some(Substitution::new()));
        let fxx = a("f", vec![v("x"), v("x")]);
        assert_eq!(
            match_term(&fxx, &a("f", vec![c("0"), a("s", vec![c("0")])])),
            None
        );
        assert_eq!(match_term(&fx, &v("x")), None);
    }

    #[test]
    fn mgu_example_from_narrowing_step() {
        let s = a("f", vec![a("g", vec![v("x"), v("x")])]);
        let u = a("f", vec![a("g", vec![v("x'"), c("0")])]);
        let theta = mgu(&s, &u).unwrap();
        let expected: Substitution = [(Var::new("x"), c("0")), (Var::new("x'"), c("0"))]
            .into_iter()
            .collect();
        assert_eq!(theta, expected);
    }

    #[test]
    fn mgu_trivial_cases() {
        assert_eq!(mgu(&v("x"), &v("x")), Ok(Substitution::new()));
        assert!(mgu(&v("x"), &a("f", vec![v("x")]))
            .unwrap_err()
            .is_occurs_check());
        assert!(mgu(&a("f", vec![v("x")]), &a("g", vec![v("y")]))
            .unwrap_err()
            .is_clash());
        assert!(mgu(&a("f", vec![v("x")]), &a("f", vec![v("x"), v("y")]))
            .unwrap_err()
            .is_clash());
    }

    #[test]
    fn mgu_is_idempotent_on_chains() {
        let s = a("h", vec![v("x"), v("y"), v("z")]);
        let t = a("h", vec![v("y"), v("z"), a("s", vec![c("0")])]);
        let theta = mgu(&s, &t).unwrap();
        assert!(theta.is_idempotent());
        assert_eq!(theta.apply(&s), theta.apply(&t));
        assert!(theta.apply(&s).is_ground());
    }

    #[test]
    fn variant_examples() {
        let r = Rule::new(a("f", vec![v("x")]), a("f", vec![v("x")]));
        let r2 = Rule::new(a("f", vec![v("y")]), a("f", vec![v("y")]));
        let gamma = variant_of(&r, &r2).unwrap();
        let expected: Substitution = [(Var::new("y"), v("x")), (Var::new("x"), v("y"))]
            .into_iter()
            .collect();
        assert_eq!(gamma.as_substitution(), &expected);
        assert_eq!(r2.rename(&gamma), r);

        let r3 = Rule::new(a("f", vec![v("x")]), a("f", vec![c("0")]));
        assert!(variant_of(&r, &r3).is_none());

        let ground = Rule::new(c("0"), a("s", vec![c("0")]));
        assert_eq!(variant_of(&ground, &ground), Some(Renaming::identity()));
    }

    #[test]
    fn variant_requires_injectivity() {
        let r = Rule::new(a("f", vec![v("x"), v("x")]), c("0"));
        let r2 = Rule::new(a("f", vec![v("x"), v("y")]), c("0"));
        assert!(variant_of(&r, &r2).is_none());
        assert!(variant_of(&r2, &r).is_none());
        assert!(variant_terms(&v("x"), &c("0")).is_none());
        assert!(variant_terms(&a("f", vec![v("x_1")]), &a("f", vec![v("x_9")])).is_some());
    }
}
