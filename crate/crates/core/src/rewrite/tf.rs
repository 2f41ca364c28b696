use crate::frontend::Lctrs;
use crate::terms::{Rule, Term, Var};

/// Replaces every value in `t` by a fresh variable. Returns the abstracted
/// term and the conjunction of the equations binding the new variables.
pub fn tf_term(t: &Term) -> (Term, Term) {
    let mut bindings = Vec::new();
    let abstracted = abstract_values(t, &mut bindings);
    (abstracted, Term::conj(bindings))
}

fn abstract_values(t: &Term, bindings: &mut Vec<Term>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Val(v) => {
            let z = Term::Var(Var::fresh_named("z", v.sort()));
            bindings.push(Term::eq(z.clone(), t.clone()));
            z
        }
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| abstract_values(a, bindings)).collect()),
    }
}

/// The rule with values in its left-hand side abstracted; the right-hand
/// side is kept and the bindings are conjoined to the constraint.
pub fn tf_rule(rule: &Rule) -> Rule {
    let (lhs, psi) = tf_term(&rule.lhs);
    Rule::new(lhs, rule.rhs.clone(), Term::and(rule.constraint.clone(), psi))
}

pub fn tf_rules(rules: &[Rule]) -> Vec<Rule> {
    rules.iter().map(tf_rule).collect()
}

pub fn tf_system(sys: &Lctrs) -> Lctrs {
    Lctrs { rules: tf_rules(&sys.rules), ..sys.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{are_variants, FunSym, Sort};

    #[test]
    fn abstracts_each_value_once() {
        let int = Sort::int();
        let f = FunSym::term("f", vec![int.clone(), int.clone()], int.clone());
        let g = FunSym::term("g", vec![int.clone()], int.clone());
        let t = Term::app_unchecked(f, vec![Term::int(1), Term::app_unchecked(g, vec![Term::int(2)])]);
        let (u, psi) = tf_term(&t);
        let vars = u.vars_ordered();
        assert_eq!(vars.len(), 2);
        assert_ne!(vars[0], vars[1]);
        let (z1, z2) = (Term::Var(vars[0].clone()), Term::Var(vars[1].clone()));
        assert_eq!(psi, Term::and(Term::eq(z1, Term::int(1)), Term::eq(z2, Term::int(2))));
    }

    #[test]
    fn variables_are_untouched() {
        let x = Term::var("x", Sort::int());
        assert_eq!(tf_term(&x), (x, Term::tt()));
    }

    #[test]
    fn value_free_rule_is_unchanged() {
        let sys = crate::frontend::load("RULES max(x, y) -> x [x >= y];").unwrap();
        assert_eq!(tf_system(&sys).rules, sys.rules);
    }

    #[test]
    fn both_values_of_a_ground_lhs() {
        let sys = crate::frontend::load("RULES g(1, 1) -> g(1, 0) + 1;").unwrap();
        let rule = tf_rule(&sys.rules[0]);
        let expected = crate::frontend::load("RULES g(a, b) -> g(1, 0) + 1 [a = 1 /\\ b = 1];").unwrap();
        let e = &expected.rules[0];
        assert!(are_variants(&[&rule.lhs, &rule.rhs, &rule.constraint], &[&e.lhs, &e.rhs, &e.constraint]));
    }
}
