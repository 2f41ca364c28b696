use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::frontend::Lctrs;
use crate::rewrite::ConstrainedEquation;
use crate::smt::{SmtError, SmtResult, Solver};
use crate::terms::{unify, FunSym, Position, Rule, Substitution, Term};
use crate::theory::{calc_rule, eval_ground, Value};

/// Which rule takes part in an overlap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RuleRef {
    /// Index into the system's rules.
    User(usize),
    Calc(Arc<FunSym>),
}

impl fmt::Display for RuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleRef::User(i) => write!(f, "rule {}", i + 1),
            RuleRef::Calc(g) => write!(f, "calc {}", g.name()),
        }
    }
}

impl fmt::Debug for RuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The first rule's left-hand side unifies with the subterm of the second
/// rule's left-hand side at `position`.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub rule1: Rule,
    pub rule2: Rule,
    pub ref1: RuleRef,
    pub ref2: RuleRef,
    pub position: Position,
    pub mgu: Substitution,
}

#[derive(Clone, Debug)]
pub struct CriticalPair {
    pub equation: ConstrainedEquation,
    /// The conjunction of `x = x` over the extra variables of both rules,
    /// instantiated; `true` when they have none or it was left out.
    pub psi: Term,
    pub overlay: bool,
    pub overlap: Overlap,
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  ({}/{} at {})", self.equation, self.overlap.ref1, self.overlap.ref2, self.overlap.position)
    }
}

fn theory_symbols(t: &Term, out: &mut BTreeSet<Arc<FunSym>>) {
    if let Term::App(f, args) = t {
        if f.is_theory() {
            out.insert(f.clone());
        }
        args.iter().for_each(|a| theory_symbols(a, out));
    }
}

/// The rules that take part in overlaps: the system's rules followed by
/// the calculation rules of theory symbols that occur in some left-hand
/// side. Calculation rules of other symbols cannot overlap a user rule.
pub fn overlap_rules(sys: &Lctrs) -> Vec<(RuleRef, Rule)> {
    let mut out: Vec<(RuleRef, Rule)> =
        sys.rules.iter().enumerate().map(|(i, r)| (RuleRef::User(i), r.clone())).collect();
    let mut syms = BTreeSet::new();
    for r in &sys.rules {
        theory_symbols(&r.lhs, &mut syms);
    }
    for f in syms {
        let rule = calc_rule(&f).expect("theory symbol");
        out.push((RuleRef::Calc(f), rule));
    }
    out
}

fn maps_into_values_or_vars(sigma: &Substitution, rule: &Rule) -> bool {
    rule.lvar().iter().all(|x| {
        let t = sigma.image(x);
        t.is_value() || t.is_var()
    })
}

/// All overlaps of the system, both orientations of root overlaps
/// included. Overlaps whose combined constraint the solver proves
/// unsatisfiable are dropped; unknown answers keep them.
pub fn compute_overlaps(sys: &Lctrs, solver: &Solver) -> Result<Vec<Overlap>, SmtError> {
    let rules = overlap_rules(sys);
    let mut found = Vec::new();
    for (ref1, r1) in &rules {
        for (ref2, r2) in &rules {
            let rho1 = r1.rename_apart(&BTreeSet::new());
            let rho2 = r2.rename_apart(&rho1.vars());
            let Some(root1) = rho1.lhs.root() else { continue };
            for p in rho2.lhs.function_positions() {
                let sub = rho2.lhs.at(&p).expect("own position");
                if sub.root() != Some(root1) {
                    continue;
                }
                if p.is_root() && r1.is_variant_of(r2) && !rho1.has_rhs_only_vars() {
                    continue;
                }
                let Some(mgu) = unify(&rho1.lhs, sub) else { continue };
                if !maps_into_values_or_vars(&mgu, &rho1) || !maps_into_values_or_vars(&mgu, &rho2) {
                    continue;
                }
                found.push(Overlap {
                    rule1: rho1.clone(),
                    rule2: rho2.clone(),
                    ref1: ref1.clone(),
                    ref2: ref2.clone(),
                    position: p,
                    mgu,
                });
            }
        }
    }

    let constraint = |o: &Overlap| o.mgu.apply(&Term::and(o.rule1.constraint.clone(), o.rule2.constraint.clone()));
    let mut queries = Vec::new();
    let mut asked = Vec::new();
    for o in &found {
        let phi = constraint(o);
        match eval_ground(&phi) {
            Ok(Value::Bool(b)) => asked.push(Err(b)),
            _ => {
                queries.push(phi);
                asked.push(Ok(queries.len() - 1));
            }
        }
    }
    let answers = solver.check_sat_all(&queries)?;
    Ok(found
        .into_iter()
        .zip(asked)
        .filter(|(_, a)| match a {
            Err(b) => *b,
            Ok(i) => answers[*i] != SmtResult::Unsat,
        })
        .map(|(o, _)| o)
        .collect())
}

/// The critical pair of an overlap. Without `include_psi` the dummy
/// equations for extra variables are left out, which is unsound and only
/// meant for experiments.
pub fn critical_pair(o: &Overlap, include_psi: bool) -> CriticalPair {
    let sigma = &o.mgu;
    let mut evars = o.rule1.evar();
    evars.extend(o.rule2.evar());
    let psi = if include_psi {
        sigma.apply(&Term::conj(evars.into_iter().map(|x| Term::eq(Term::Var(x.clone()), Term::Var(x)))))
    } else {
        Term::tt()
    };
    let left = sigma.apply(&o.rule2.lhs).replace_unchecked(o.position.indices(), sigma.apply(&o.rule1.rhs));
    let right = sigma.apply(&o.rule2.rhs);
    let constraint = Term::conj([sigma.apply(&o.rule1.constraint), sigma.apply(&o.rule2.constraint), psi.clone()]);
    let equation = ConstrainedEquation::new(left, right, constraint);
    let names = equation.readable_renaming();
    let psi = psi.map_vars(&mut |x| names.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone())));
    CriticalPair {
        equation: equation.rename(&names),
        psi,
        overlay: o.position.is_root(),
        overlap: o.clone(),
    }
}

/// Critical pairs of all overlaps. Overlays are kept in both
/// orientations; inner critical pairs equal up to renaming are kept once.
pub fn critical_pairs(sys: &Lctrs, solver: &Solver, include_psi: bool) -> Result<Vec<CriticalPair>, SmtError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for o in compute_overlaps(sys, solver)? {
        let cp = critical_pair(&o, include_psi);
        if !cp.overlay && !seen.insert(cp.equation.canonical_key()) {
            continue;
        }
        out.push(cp);
    }
    Ok(out)
}
