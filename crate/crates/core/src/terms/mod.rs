//! Many-sorted first-order terms: sorts, symbols, positions, substitutions,
//! matching, unification and rule variants.

mod position;
mod rule;
mod subst;
mod term;
mod unify;

pub use position::Position;
pub use rule::{is_left_linear_system, is_linear_system, Rule};
pub use subst::Substitution;
pub use term::{FunSym, Sort, SymbolKind, Term, TermError, Var};
pub use unify::{are_variants, match_term, unify, unify_all};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::Op;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn int() -> Sort {
        Sort::int()
    }

    fn v(n: &str) -> Term {
        Term::var(n, int())
    }

    fn sym(name: &str, arity: usize) -> Arc<FunSym> {
        FunSym::term(name, vec![int(); arity], int())
    }

    fn pos(p: &[usize]) -> Position {
        Position::new(p.to_vec())
    }

    #[test]
    fn positions_of_variable() {
        let x = v("x");
        assert_eq!(x.positions(), vec![Position::root()]);
        assert_eq!(x.variable_positions(), vec![Position::root()]);
        assert!(x.function_positions().is_empty());
    }

    #[test]
    fn positions_of_max() {
        let t = Term::app_unchecked(sym("max", 2), vec![v("x"), v("y")]);
        assert_eq!(t.positions(), vec![pos(&[]), pos(&[1]), pos(&[2])]);
        assert_eq!(t.function_positions(), vec![pos(&[])]);
        assert_eq!(t.variable_positions(), vec![pos(&[1]), pos(&[2])]);
    }

    #[test]
    fn positions_nested() {
        let f = Term::app_unchecked(sym("f", 2), vec![v("x"), v("y")]);
        let t = Term::app_unchecked(sym("h", 1), vec![f]);
        assert_eq!(t.positions(), vec![pos(&[]), pos(&[1]), pos(&[1, 1]), pos(&[1, 2])]);
    }

    #[test]
    fn subterm_and_replace() {
        let sum = Term::op(Op::Add, vec![Term::int(1), Term::int(2)]);
        let t = Term::app_unchecked(sym("max", 2), vec![sum.clone(), Term::int(4)]);
        assert_eq!(t.subterm(&pos(&[1])).unwrap(), &sum);
        assert!(matches!(t.subterm(&pos(&[3])), Err(TermError::InvalidPosition { .. })));
        assert!(matches!(t.subterm(&pos(&[1, 1, 1])), Err(TermError::InvalidPosition { .. })));

        let u = v("u");
        assert_eq!(t.replace(&Position::root(), u.clone()).unwrap(), u);

        let f = Term::app_unchecked(sym("f", 2), vec![v("x"), v("y")]);
        let h = Term::app_unchecked(sym("h", 1), vec![f]);
        let g = Term::app_unchecked(sym("g", 2), vec![v("y"), Term::int(2)]);
        let replaced = h.replace(&pos(&[1]), g).unwrap();
        assert_eq!(replaced.to_string(), "h(g(y, 2))");

        let err = h.replace(&pos(&[1]), Term::tt());
        assert!(matches!(err, Err(TermError::SortMismatch { .. })));
    }

    #[test]
    fn app_checks_sorts_and_arity() {
        let f = sym("f", 1);
        assert!(matches!(Term::app(f.clone(), vec![]), Err(TermError::Arity { .. })));
        assert!(matches!(Term::app(f.clone(), vec![Term::tt()]), Err(TermError::SortMismatch { .. })));
        assert!(Term::app(f, vec![Term::int(1)]).is_ok());
    }

    #[test]
    fn apply_substitution() {
        let t = Term::app_unchecked(sym("max", 2), vec![v("x"), v("y")]);
        assert_eq!(Substitution::new().apply(&t), t);
        let sigma: Substitution =
            [(Var::new("x", int()), Term::int(4)), (Var::new("y", int()), Term::int(3))].into_iter().collect();
        assert_eq!(sigma.apply(&t).to_string(), "max(4, 3)");

        let fxx = Term::app_unchecked(sym("f", 2), vec![v("x"), v("x")]);
        let rename: Substitution = [(Var::new("x", int()), v("z"))].into_iter().collect();
        assert_eq!(rename.apply(&fxx).to_string(), "f(z, z)");
    }

    #[test]
    fn identity_bindings_are_dropped() {
        let mut s = Substitution::new();
        s.insert(Var::new("x", int()), v("x"));
        assert!(s.is_empty());
    }

    fn max_rules() -> Vec<Rule> {
        let max = |a, b| Term::app_unchecked(sym("max", 2), vec![a, b]);
        vec![
            Rule::new(max(v("x"), v("y")), v("x"), Term::op(Op::Ge, vec![v("x"), v("y")])),
            Rule::new(max(v("x"), v("y")), v("y"), Term::op(Op::Ge, vec![v("y"), v("x")])),
            Rule::unconstrained(max(v("x"), v("y")), max(v("y"), v("x"))),
        ]
    }

    #[test]
    fn rename_apart_is_fresh_variant() {
        let rule = &max_rules()[0];
        let avoid = rule.vars();
        let renamed = rule.rename_apart(&avoid);
        assert!(renamed.vars().is_disjoint(&avoid));
        assert!(renamed.is_variant_of(rule));
        assert!(rule.is_variant_of(&renamed));
        assert_eq!(renamed.vars().len(), 2);

        let renamed = rule.rename_apart(&Default::default());
        assert!(renamed.is_variant_of(rule));
    }

    #[test]
    fn rename_apart_constraint_only_variable() {
        // f(x) -> z [x = z * z]
        let rule = Rule::new(
            Term::app_unchecked(sym("f", 1), vec![v("x")]),
            v("z"),
            Term::eq(v("x"), Term::op(Op::Mul, vec![v("z"), v("z")])),
        );
        let avoid = [Var::new("x", int())].into_iter().collect();
        let renamed = rule.rename_apart(&avoid);
        assert!(renamed.is_variant_of(&rule));
        assert!(!renamed.vars().contains(&Var::new("x", int())));
        let rhs = renamed.rhs.as_var().unwrap().clone();
        assert!(renamed.constraint.vars().contains(&rhs));
    }

    #[test]
    fn variants() {
        let rules = max_rules();
        assert!(!rules[0].is_variant_of(&rules[1]));
        assert!(!rules[0].is_variant_of(&rules[2]));
        // f(x) -> g(y) and f(x') -> g(y')
        let f = sym("f", 1);
        let g = sym("g", 1);
        let r1 = Rule::unconstrained(Term::app_unchecked(f.clone(), vec![v("x")]), Term::app_unchecked(g.clone(), vec![v("y")]));
        let r2 = Rule::unconstrained(Term::app_unchecked(f.clone(), vec![v("x'")]), Term::app_unchecked(g.clone(), vec![v("y'")]));
        assert!(r1.is_variant_of(&r2));
        // renaming must be injective
        let r3 = Rule::unconstrained(Term::app_unchecked(f, vec![v("x")]), Term::app_unchecked(g, vec![v("x")]));
        assert!(!r1.is_variant_of(&r3));
        assert!(!r3.is_variant_of(&r1));
    }

    #[test]
    fn linearity() {
        let fxx = Term::app_unchecked(sym("f", 2), vec![v("x"), v("x")]);
        assert!(!fxx.is_linear());
        assert!(is_linear_system(&max_rules()));
        assert!(is_left_linear_system(&max_rules()));
        let dup = Rule::unconstrained(Term::app_unchecked(sym("f", 1), vec![v("x")]), fxx);
        assert!(dup.is_left_linear());
        assert!(!dup.is_linear());
    }

    #[test]
    fn lvar_and_evar() {
        // f(x) -> g(y) has y as extra variable
        let r = Rule::unconstrained(
            Term::app_unchecked(sym("f", 1), vec![v("x")]),
            Term::app_unchecked(sym("g", 1), vec![v("y")]),
        );
        let y = Var::new("y", int());
        assert!(r.lvar().contains(&y));
        assert!(r.evar().contains(&y));
        // g(y) -> a [y = y] has no extra variable
        let r = Rule::new(
            Term::app_unchecked(sym("g", 1), vec![v("y")]),
            Term::constant(&sym("a", 0)),
            Term::eq(v("y"), v("y")),
        );
        assert!(r.evar().is_empty());
        assert_eq!(r.lvar().len(), 1);
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-2i64..3).prop_map(Term::int),
            prop::sample::select(vec!["x", "y", "z"]).prop_map(|n| Term::var(n, Sort::int())),
        ];
        leaf.prop_recursive(3, 20, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app_unchecked(sym("h", 1), vec![t])),
                (inner.clone(), inner).prop_map(|(s, t)| Term::app_unchecked(sym("f", 2), vec![s, t])),
            ]
        })
    }

    fn arb_subst() -> impl Strategy<Value = Substitution> {
        proptest::collection::vec(arb_term(), 3).prop_map(|ts| {
            ["x", "y", "z"].iter().map(|n| Var::new(n, Sort::int())).zip(ts).collect()
        })
    }

    proptest! {
        #[test]
        fn replace_with_own_subterm_is_identity(t in arb_term(), pick in any::<prop::sample::Index>()) {
            let ps = t.positions();
            let p = pick.get(&ps);
            let sub = t.subterm(p).unwrap().clone();
            prop_assert_eq!(t.replace(p, sub).unwrap(), t);
        }

        #[test]
        fn apply_distributes_over_replace(s in arb_term(), u in arb_term(), sigma in arb_subst(),
                                          pick in any::<prop::sample::Index>()) {
            let ps = s.function_positions();
            prop_assume!(!ps.is_empty());
            let p = pick.get(&ps);
            let lhs = sigma.apply(&s.replace(p, u.clone()).unwrap());
            let rhs = sigma.apply(&s).replace(p, sigma.apply(&u)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn variant_is_an_equivalence(a in arb_term(), b in arb_term()) {
            let r1 = Rule::unconstrained(Term::app_unchecked(sym("k", 1), vec![a.clone()]), b.clone());
            let r2 = r1.rename_apart(&r1.vars());
            let r3 = r2.rename_apart(&r2.vars());
            prop_assert!(r1.is_variant_of(&r1));
            prop_assert!(r1.is_variant_of(&r2) && r2.is_variant_of(&r1));
            prop_assert!(r2.is_variant_of(&r3) && r1.is_variant_of(&r3));
            let other = Rule::unconstrained(Term::app_unchecked(sym("k", 1), vec![b]), a);
            prop_assert_eq!(r1.is_variant_of(&other), other.is_variant_of(&r1));
        }
    }
}
