use std::collections::BTreeSet;

use super::StepKind;
use crate::terms::{match_term, Position, Rule, Substitution, Term, Var};
use crate::theory::{eval_ground, Value};

/// One step on an unconstrained term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnconstrainedStep {
    pub position: Position,
    pub kind: StepKind,
    pub subst: Substitution,
    pub result: Term,
}

/// Whether `sigma` respects `rule`: every logical variable is mapped to a
/// value and the instantiated constraint evaluates to true.
pub fn respects(sigma: &Substitution, rule: &Rule) -> bool {
    rule.lvar().iter().all(|x| sigma.image(x).is_value())
        && matches!(eval_ground(&sigma.apply(&rule.constraint)), Ok(Value::Bool(true)))
}

fn is_true(t: &Term) -> bool {
    matches!(eval_ground(t), Ok(Value::Bool(true)))
}

/// If `c` is `x = e` or `e = x` with `x` not in `e`, returns `e`.
pub(crate) fn definition_of<'a>(c: &'a Term, x: &Var) -> Option<&'a Term> {
    let Term::App(f, args) = c else { return None };
    if f.op() != Some(crate::theory::Op::Eq) {
        return None;
    }
    let (a, b) = (&args[0], &args[1]);
    if a.as_var() == Some(x) && !b.contains_var(x) {
        Some(b)
    } else if b.as_var() == Some(x) && !a.contains_var(x) {
        Some(a)
    } else {
        None
    }
}

/// Instantiations of the rule variables that matching leaves open: by a
/// defining equation in the constraint when there is one, otherwise by
/// each value from `pool` of the right sort.
fn close_unconstrained(rule: &Rule, sigma: Substitution, pool: &[Value]) -> Vec<Substitution> {
    let mut bound: BTreeSet<Var> = rule.lhs.vars();
    let mut open: Vec<Var> = rule.rhs.vars_ordered();
    open.extend(rule.constraint.vars_ordered());
    let mut seen = BTreeSet::new();
    open.retain(|x| !bound.contains(x) && seen.insert(x.clone()));
    let mut sigma = sigma;
    let conjuncts = rule.constraint.conjuncts();
    loop {
        let mut progress = false;
        open.retain(|x| {
            for c in &conjuncts {
                if let Some(e) = definition_of(c, x) {
                    if e.vars().iter().all(|y| bound.contains(y)) {
                        if let Ok(v) = eval_ground(&sigma.apply(e)) {
                            sigma.insert(x.clone(), Term::Val(v));
                            bound.insert(x.clone());
                            progress = true;
                            return false;
                        }
                    }
                }
            }
            true
        });
        if !progress {
            break;
        }
    }
    let mut out = vec![sigma];
    for x in open {
        let cands: Vec<Term> = pool.iter().filter(|v| v.sort() == *x.sort()).map(|v| Term::Val(v.clone())).collect();
        out = out
            .into_iter()
            .flat_map(|s| {
                let x = x.clone();
                cands.iter().map(move |c| {
                    let mut s = s.clone();
                    s.insert(x.clone(), c.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn push_values(t: &Term, pool: &mut Vec<Value>) {
    for v in t.values() {
        if !pool.contains(&v) {
            pool.push(v);
        }
    }
}

/// All one-step successors of `t` by rule and calculation steps. Logical
/// variables that matching does not fix range over the values occurring in
/// `t` and in the rule.
pub fn rewrite_one(t: &Term, rules: &[Rule]) -> Vec<UnconstrainedStep> {
    let mut out = Vec::new();
    for p in t.function_positions() {
        let sub = t.at(&p).expect("own position");
        let Term::App(f, args) = sub else { continue };
        if f.is_theory() {
            if args.iter().all(Term::is_value) {
                if let Ok(v) = eval_ground(sub) {
                    out.push(UnconstrainedStep {
                        position: p.clone(),
                        kind: StepKind::Calc(f.clone()),
                        subst: Substitution::new(),
                        result: t.replace_unchecked(p.indices(), Term::Val(v)),
                    });
                }
            }
            continue;
        }
        for (i, rule) in rules.iter().enumerate() {
            let Some(sigma) = match_term(&rule.lhs, sub) else { continue };
            let mut pool = t.values();
            push_values(&rule.lhs, &mut pool);
            push_values(&rule.rhs, &mut pool);
            push_values(&rule.constraint, &mut pool);
            for s in close_unconstrained(rule, sigma, &pool) {
                if respects(&s, rule) {
                    out.push(UnconstrainedStep {
                        position: p.clone(),
                        kind: StepKind::Rule(i),
                        result: t.replace_unchecked(p.indices(), s.apply(&rule.rhs)),
                        subst: s,
                    });
                }
            }
        }
    }
    out
}

/// Checks a proposed step on an unconstrained term and returns its result
/// when the step is legal.
pub fn check_step(t: &Term, position: &Position, kind: &StepKind, subst: &Substitution, rules: &[Rule]) -> Option<Term> {
    let sub = t.at(position)?;
    let replacement = match kind {
        StepKind::Calc(f) => {
            let Term::App(g, args) = sub else { return None };
            if g != f || !args.iter().all(Term::is_value) {
                return None;
            }
            Term::Val(eval_ground(sub).ok()?)
        }
        StepKind::Rule(i) => {
            let rule = rules.get(*i)?;
            if subst.apply(&rule.lhs) != *sub || !rule.lvar().iter().all(|x| subst.image(x).is_value()) {
                return None;
            }
            if !is_true(&subst.apply(&rule.constraint)) {
                return None;
            }
            subst.apply(&rule.rhs)
        }
    };
    Some(t.replace_unchecked(position.indices(), replacement))
}
