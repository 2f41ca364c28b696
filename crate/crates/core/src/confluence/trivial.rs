use std::collections::BTreeSet;

use crate::rewrite::ConstrainedEquation;
use crate::smt::{SmtError, SmtResult, Solver};
use crate::terms::{Term, Var};
use crate::theory::{eval_ground, Value};

/// The formula that must follow from the constraint for `s ≈ t` to be
/// trivial: subterm pairs that can only become equal through value
/// instantiation turn into equations, mismatching symbols into `false`.
pub fn triviality_formula(s: &Term, t: &Term, phi_vars: &BTreeSet<Var>) -> Term {
    if s == t {
        return Term::tt();
    }
    let restricted = |u: &Term| u.is_value() || u.as_var().is_some_and(|x| phi_vars.contains(x));
    if restricted(s) && restricted(t) {
        if s.is_value() && t.is_value() {
            return Term::ff();
        }
        return Term::eq(s.clone(), t.clone());
    }
    match (s, t) {
        (Term::App(f, ss), Term::App(g, ts)) if f == g => {
            let mut parts = Vec::with_capacity(ss.len());
            for (a, b) in ss.iter().zip(ts) {
                let part = triviality_formula(a, b, phi_vars);
                if part == Term::ff() {
                    return part;
                }
                parts.push(part);
            }
            Term::conj(parts)
        }
        _ => Term::ff(),
    }
}

pub fn equation_formula(eq: &ConstrainedEquation) -> Term {
    triviality_formula(&eq.left, &eq.right, &eq.constraint.vars())
}

fn ground_truth(t: &Term) -> Option<bool> {
    match eval_ground(t) {
        Ok(Value::Bool(b)) => Some(b),
        _ => None,
    }
}

/// Decides triviality of several equations with at most one solver call.
/// Returns the triviality formula of each trivial equation. An unknown
/// solver answer counts as not trivial.
pub fn trivial_many(eqs: &[&ConstrainedEquation], solver: &Solver) -> Result<Vec<Option<Term>>, SmtError> {
    enum Plan {
        Done(bool),
        Ask(usize),
    }
    let mut queries = Vec::new();
    let mut plans = Vec::with_capacity(eqs.len());
    let mut formulas = Vec::with_capacity(eqs.len());
    for eq in eqs {
        let t = equation_formula(eq);
        let phi = &eq.constraint;
        let plan = if t == Term::tt() {
            Plan::Done(true)
        } else if let Some(b) = ground_truth(phi) {
            // a ground constraint is true or false outright
            Plan::Done(!b || ground_truth(&t) == Some(true))
        } else if t != Term::ff() && t.conjuncts().iter().all(|c| phi.conjuncts().contains(c)) {
            Plan::Done(true)
        } else {
            queries.push(Term::and(phi.clone(), Term::not(t.clone())));
            Plan::Ask(queries.len() - 1)
        };
        plans.push(plan);
        formulas.push(t);
    }
    let answers = solver.check_sat_all(&queries)?;
    Ok(plans
        .into_iter()
        .zip(formulas)
        .map(|(plan, t)| {
            let trivial = match plan {
                Plan::Done(b) => b,
                Plan::Ask(i) => answers[i] == SmtResult::Unsat,
            };
            trivial.then_some(t)
        })
        .collect())
}

/// Whether `s ≈ t [φ]` is trivial, i.e. `φ ⇒ T(s, t, φ)` is valid.
pub fn is_trivial(eq: &ConstrainedEquation, solver: &Solver) -> Result<bool, SmtError> {
    Ok(trivial_many(&[eq], solver)?[0].is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smt::SolverConfig;
    use crate::terms::Sort;
    use crate::theory::Op;

    fn v(n: &str) -> Term {
        Term::var(n, Sort::int())
    }

    fn solver() -> Solver {
        Solver::new(SolverConfig::default())
    }

    #[test]
    fn formula_cases() {
        let (x, y) = (v("x"), v("y"));
        let phi = Term::and(Term::op(Op::Ge, vec![x.clone(), y.clone()]), Term::op(Op::Ge, vec![y.clone(), x.clone()]));
        assert_eq!(triviality_formula(&x, &x, &phi.vars()), Term::tt());
        assert_eq!(triviality_formula(&x, &y, &phi.vars()), Term::eq(x.clone(), y.clone()));
        assert_eq!(triviality_formula(&x, &y, &BTreeSet::new()), Term::ff());
        assert_eq!(triviality_formula(&Term::int(1), &Term::int(2), &BTreeSet::new()), Term::ff());
    }

    #[test]
    fn antisymmetric_bounds_are_trivial() {
        let (x, y) = (v("x"), v("y"));
        let phi = Term::and(Term::op(Op::Ge, vec![x.clone(), y.clone()]), Term::op(Op::Ge, vec![y.clone(), x.clone()]));
        assert!(is_trivial(&ConstrainedEquation::new(x.clone(), y.clone(), phi), &solver()).unwrap());
        let phi = Term::op(Op::Ge, vec![x.clone(), y.clone()]);
        assert!(!is_trivial(&ConstrainedEquation::new(x, y, phi), &solver()).unwrap());
    }

    #[test]
    fn unsatisfiable_constraint_makes_anything_trivial() {
        let x = v("x");
        let phi = Term::and(Term::op(Op::Gt, vec![x.clone(), Term::int(0)]), Term::op(Op::Lt, vec![x.clone(), Term::int(0)]));
        assert!(is_trivial(&ConstrainedEquation::new(Term::int(1), Term::int(2), phi), &solver()).unwrap());
        assert!(!is_trivial(&ConstrainedEquation::new(Term::int(1), Term::int(2), Term::tt()), &solver()).unwrap());
        assert!(is_trivial(&ConstrainedEquation::new(Term::int(1), Term::int(2), Term::ff()), &solver()).unwrap());
    }

    #[test]
    fn dummy_equations_do_not_equate_distinct_variables() {
        let (y, y2) = (v("y"), v("y'"));
        let phi = Term::and(Term::eq(y.clone(), y.clone()), Term::eq(y2.clone(), y2.clone()));
        assert!(!is_trivial(&ConstrainedEquation::new(y, y2, phi), &solver()).unwrap());
    }
}
