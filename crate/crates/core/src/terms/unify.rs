use std::collections::BTreeMap;

use super::{Substitution, Term, Var};

/// Most general unifier of `s` and `t`, idempotent, with the occurs check.
/// Variable–variable pairs bind the left variable to the right one.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(vec![(s.clone(), t.clone())])
}

/// Simultaneous unification of a list of equations.
pub fn unify_all(mut pending: Vec<(Term, Term)>) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    pending.reverse();
    while let Some((a, b)) = pending.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if x.sort().clone() != t.sort() || t.contains_var(&x) {
                    return None;
                }
                let single: Substitution = [(x.clone(), t.clone())].into_iter().collect();
                sigma = sigma.then(&single);
            }
            (Term::App(f, fs), Term::App(g, gs)) => {
                if f != g {
                    return None;
                }
                // keep left-to-right processing order
                pending.extend(fs.into_iter().zip(gs).rev());
            }
            _ => return None,
        }
    }
    Some(sigma)
}

/// A substitution `σ` with `pattern σ = subject` and domain within the
/// variables of `pattern`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut map = BTreeMap::new();
    if match_into(pattern, subject, &mut map) {
        Some(map.into_iter().collect())
    } else {
        None
    }
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, map: &mut BTreeMap<Var, Term>) -> bool {
    match (pattern, subject) {
        (Term::Var(x), t) => {
            if x.sort().clone() != t.sort() {
                return false;
            }
            match map.get(x) {
                Some(bound) => bound == t,
                None => {
                    map.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        (Term::Val(v), Term::Val(w)) => v == w,
        (Term::App(f, fs), Term::App(g, gs)) => {
            f == g && fs.iter().zip(gs).all(|(p, s)| match_into(p, s, map))
        }
        _ => false,
    }
}

/// Whether a bijective variable renaming maps each term of `a` to the
/// corresponding term of `b`.
pub fn are_variants(a: &[&Term], b: &[&Term]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    a.iter().zip(b).all(|(s, t)| variant_into(s, t, &mut fwd, &mut bwd))
}

fn variant_into(s: &Term, t: &Term, fwd: &mut BTreeMap<Var, Var>, bwd: &mut BTreeMap<Var, Var>) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => {
            if x.sort() != y.sort() {
                return false;
            }
            match (fwd.get(x), bwd.get(y)) {
                (None, None) => {
                    fwd.insert(x.clone(), y.clone());
                    bwd.insert(y.clone(), x.clone());
                    true
                }
                (Some(y2), Some(x2)) => y2 == y && x2 == x,
                _ => false,
            }
        }
        (Term::Val(v), Term::Val(w)) => v == w,
        (Term::App(f, fs), Term::App(g, gs)) => {
            f == g && fs.iter().zip(gs).all(|(a, b)| variant_into(a, b, fwd, bwd))
        }
        _ => false,
    }
}
