//! Algebraic invariants checked with generated inputs.

use std::collections::BTreeSet;

use nonterm::chain::{pi_closed_form_s_at, pi_eval_at, PiPair};
use nonterm::term::fresh_variant;
use nonterm::unify::{variant_of, variant_terms};
use nonterm::{
    detect, format_program, match_term, mgu, parse_program, BigUint, Context, FreshSupply, Program,
    ProgramFile, Rule, Substitution, TKind, Term, Var,
};
use proptest::prelude::*;

const VARS: &[&str] = &["x", "y", "z"];

fn term_strategy(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(VARS).prop_map(Term::var),
        Just(Term::constant("a")),
        Just(Term::constant("b")),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("h", vec![l, r])),
        ]
    })
}

fn ground_strategy(depth: u32) -> impl Strategy<Value = Term> {
    term_strategy(depth).prop_filter("ground", Term::is_ground)
}

fn subst_strategy() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(prop::option::of(term_strategy(2)), VARS.len()).prop_map(|images| {
        VARS.iter()
            .zip(images)
            .filter_map(|(v, t)| t.map(|t| (Var::new(v), t)))
            .collect()
    })
}

fn context_strategy() -> impl Strategy<Value = Context> {
    let leaf = prop_oneof![Just(Term::hole()), Just(Term::constant("a"))];
    let body = leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("h", vec![l, r])),
        ]
    });
    prop_oneof![
        body.clone().prop_map(|t| Term::app("g", vec![t])),
        (body.clone(), body).prop_map(|(l, r)| Term::app("h", vec![l, r])),
    ]
    .prop_filter_map("needs a hole", Context::new)
}

fn rule_strategy() -> impl Strategy<Value = Rule> {
    (term_strategy(3), term_strategy(3)).prop_map(|(l, r)| Rule::new(l, r))
}

proptest! {
    #[test]
    fn empty_substitution_is_identity(t in term_strategy(4)) {
        prop_assert_eq!(Substitution::new().apply(&t), t);
    }

    #[test]
    fn composition_applies_in_sequence(t in term_strategy(4), s in subst_strategy(), u in subst_strategy()) {
        prop_assert_eq!(s.compose(&u).apply(&t), u.apply(&s.apply(&t)));
    }

    #[test]
    fn context_powers_add(c in context_strategy(), m in 0u32..4, n in 0u32..4, w in ground_strategy(2)) {
        prop_assert_eq!(c.power(m).nest(&c.power(n)), c.power(m + n));
        prop_assert_eq!(c.power(m + n).plug(&w), c.tower(u64::from(m + n), &w));
    }

    #[test]
    fn fresh_variants_are_disjoint_variants(r in rule_strategy(), extra in term_strategy(3), start in 0u64..5) {
        let mut avoid: BTreeSet<Var> = extra.vars();
        avoid.extend(r.vars());
        let mut supply = FreshSupply::starting_at(start);
        let v = fresh_variant(&r, &avoid, &mut supply);
        prop_assert!(v.vars().is_disjoint(&avoid));
        prop_assert!(variant_of(&r, &v).is_some());
        prop_assert!(variant_of(&v, &r).is_some());
    }

    #[test]
    fn matching_recovers_instances(p in term_strategy(3), s in subst_strategy()) {
        let instance = s.apply(&p);
        let found = match_term(&p, &instance);
        prop_assert!(found.is_some());
        let found = found.unwrap();
        prop_assert_eq!(found.apply(&p), instance);
        prop_assert!(found.domain().all(|v| p.occurs(v)));
    }

    #[test]
    fn mgu_is_symmetric_up_to_renaming(s in term_strategy(3), t in term_strategy(3)) {
        match (mgu(&s, &t), mgu(&t, &s)) {
            (Ok(a), Ok(b)) => {
                prop_assert!(variant_terms(&a.apply(&s), &b.apply(&s)).is_some());
            }
            (Err(_), Err(_)) => {}
            (l, r) => prop_assert!(false, "one direction unifies: {:?} / {:?}", l, r),
        }
    }

    #[test]
    fn instances_unify_with_their_renamed_pattern(p in term_strategy(3), s in subst_strategy()) {
        let instance = s.apply(&p);
        let apart: Substitution =
            p.vars().into_iter().map(|v| { let w = Term::var(&format!("{}_r", v.name())); (v, w) }).collect();
        let pattern = apart.apply(&p);
        let theta = mgu(&pattern, &instance);
        prop_assert!(theta.is_ok(), "{} is an instance of {}", instance, pattern);
        let theta = theta.unwrap();
        prop_assert_eq!(theta.apply(&pattern), theta.apply(&instance));
        prop_assert!(theta.is_idempotent());
        // unifying with a more general term never specializes the instance
        prop_assert!(variant_terms(&theta.apply(&instance), &instance).is_some());
    }

    #[test]
    fn format_then_parse_is_a_fixed_point(rules in prop::collection::vec(rule_strategy(), 1..5)) {
        let file = ProgramFile::from_rules(rules.clone(), None);
        let text = format_program(&file);
        let parsed = parse_program(&text);
        prop_assert!(parsed.is_ok(), "{:?}\n{}", parsed, text);
        let parsed = parsed.unwrap();
        prop_assert_eq!(parsed.program(), Program::new(rules));
        prop_assert_eq!(format_program(&parsed), text);
    }

    #[test]
    fn detection_is_deterministic_and_sound(rules in prop::collection::vec(rule_strategy(), 1..5)) {
        let program = Program::new(rules);
        let first = detect(&program);
        prop_assert_eq!(&first, &detect(&program));
        for p in &first {
            prop_assert!(p.reconstructs());
        }
    }

    #[test]
    fn closed_form_matches_recursion(i in 0u32..6, n2 in 0u32..6, n3 in 0u32..6, n in 0usize..=12) {
        let i = BigUint::from(i);
        let rec: PiPair<BigUint> = pi_eval_at(TKind::IsS, n2, n3, &i, n).unwrap();
        let closed: PiPair<BigUint> = pi_closed_form_s_at(TKind::IsS, n2, n3, &i, n).unwrap();
        prop_assert_eq!(rec, closed);
    }

    #[test]
    fn machine_word_heights_agree_or_overflow(i in 0u32..40, n2 in 0u32..40, n3 in 0u32..40, n in 0usize..=16) {
        let big: PiPair<BigUint> = pi_eval_at(TKind::IsX, n2, n3, &BigUint::from(i), n).unwrap();
        if let Ok(small) = pi_eval_at::<u64>(TKind::IsX, n2, n3, &u64::from(i), n) {
            prop_assert_eq!(BigUint::from(small.pi), big.pi);
            prop_assert_eq!(BigUint::from(small.pi_prime), big.pi_prime);
        } else {
            prop_assert!(big.pi_prime > BigUint::from(u64::MAX) || big.pi > BigUint::from(u64::MAX));
        }
    }
}
