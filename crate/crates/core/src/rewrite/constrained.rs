use std::collections::BTreeSet;

use super::tf::tf_rules;
use super::unconstrained::definition_of;
use super::{ConstrainedEquation, ConstrainedTerm, Redex, Side, StepKind, StepRecord, Successors};
use crate::smt::{SmtError, SmtResult, Solver};
use crate::terms::{match_term, Rule, Substitution, Term, Var};
use crate::theory::{eval_ground, Value};

/// Candidates tried per unconstrained extra variable.
pub const DEFAULT_EVAR_CAP: usize = 8;

/// Rewrites constrained terms and equations with the value-abstracted
/// rules of a system. Rule indices in step records refer to the rules
/// passed to [`Rewriter::new`].
pub struct Rewriter<'s> {
    rules: Vec<Rule>,
    solver: &'s Solver,
    evar_cap: usize,
}

/// A redex whose side condition may still need the solver.
struct Pending {
    redex: Redex,
    /// `None` when already known to hold; otherwise `(premise, conclusion)`.
    obligation: Option<(Term, Term)>,
}

pub(crate) fn is_true(t: &Term) -> bool {
    matches!(eval_ground(t), Ok(Value::Bool(true)))
}

/// Decides `premise ⇒ conclusion` syntactically when easy. `None` means
/// the solver must be asked.
pub(crate) fn implied_syntactically(premise: &[&Term], conclusion: &Term) -> Option<bool> {
    if conclusion.is_ground() {
        return Some(is_true(conclusion));
    }
    for c in conclusion.conjuncts() {
        let easy = premise.contains(&c)
            || matches!(c, Term::App(f, args) if f.op() == Some(crate::theory::Op::Eq) && args[0] == args[1])
            || (c.is_ground() && is_true(c));
        if !easy {
            if c.is_ground() {
                return Some(false);
            }
            return None;
        }
    }
    Some(true)
}

impl<'s> Rewriter<'s> {
    pub fn new(rules: &[Rule], solver: &'s Solver) -> Rewriter<'s> {
        Rewriter { rules: tf_rules(rules), solver, evar_cap: DEFAULT_EVAR_CAP }
    }

    pub fn with_evar_cap(mut self, cap: usize) -> Rewriter<'s> {
        self.evar_cap = cap;
        self
    }

    /// The value-abstracted rules actually used for matching.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn solver(&self) -> &'s Solver {
        self.solver
    }

    /// Bindings for rule variables that matching leaves open. A defining
    /// equation `x = e` in the constraint fixes `x`: to the value of `e`
    /// when ground, to `e` when it is a constraint variable, and otherwise
    /// to a fresh variable whose definition joins the constraint. Any other
    /// open variable tries the constraint variables and then the values of
    /// `pool` of its sort.
    fn close(&self, rule: &Rule, sigma: Substitution, phi_vars: &BTreeSet<Var>, pool: &[Value]) -> Vec<(Substitution, Vec<Term>)> {
        let mut bound: BTreeSet<Var> = rule.lhs.vars();
        let mut open: Vec<Var> = rule.rhs.vars_ordered();
        open.extend(rule.constraint.vars_ordered());
        let mut seen = BTreeSet::new();
        open.retain(|x| !bound.contains(x) && seen.insert(x.clone()));

        let mut sigma = sigma;
        let mut ext: Vec<Term> = Vec::new();
        let mut known = phi_vars.clone();
        let conjuncts = rule.constraint.conjuncts();
        loop {
            let mut progress = false;
            open.retain(|x| {
                let Some(e) =
                    conjuncts.iter().filter_map(|c| definition_of(c, x)).find(|e| e.vars().is_subset(&bound))
                else {
                    return true;
                };
                let e = sigma.apply(e);
                let image = if e.is_ground() {
                    match eval_ground(&e) {
                        Ok(v) => Term::Val(v),
                        Err(_) => return true,
                    }
                } else if e.as_var().is_some_and(|y| known.contains(y)) {
                    e
                } else {
                    let fresh = x.fresh();
                    ext.push(Term::eq(Term::Var(fresh.clone()), e));
                    known.insert(fresh.clone());
                    Term::Var(fresh)
                };
                sigma.insert(x.clone(), image);
                bound.insert(x.clone());
                progress = true;
                false
            });
            if !progress {
                break;
            }
        }

        let mut out = vec![(sigma, ext)];
        for x in open {
            let mut cands: Vec<Term> =
                known.iter().filter(|y| y.sort() == x.sort()).map(|y| Term::Var(y.clone())).collect();
            cands.extend(pool.iter().filter(|v| v.sort() == *x.sort()).map(|v| Term::Val(v.clone())));
            cands.truncate(self.evar_cap);
            let fallback = cands.is_empty();
            out = out
                .into_iter()
                .flat_map(|(s, e)| {
                    if fallback {
                        // a fresh variable restricted to values by a dummy equation
                        let fresh = Term::Var(x.fresh());
                        let mut s = s;
                        let mut e = e;
                        e.push(Term::eq(fresh.clone(), fresh.clone()));
                        s.insert(x.clone(), fresh);
                        return vec![(s, e)];
                    }
                    cands
                        .iter()
                        .map(|c| {
                            let mut s = s.clone();
                            s.insert(x.clone(), c.clone());
                            (s, e.clone())
                        })
                        .collect()
                })
                .collect();
        }
        out
    }

    /// Redexes of `term` under `phi` before their side conditions are
    /// settled. `pool` supplies values for extra variables.
    fn candidates(&self, term: &Term, phi: &Term, pool: &[Value]) -> Vec<Pending> {
        let phi_vars = phi.vars();
        let in_val_or_phi = |t: &Term| t.is_value() || t.as_var().is_some_and(|x| phi_vars.contains(x));
        let premise_base = phi.conjuncts();
        let mut out = Vec::new();
        for p in term.function_positions() {
            let sub = term.at(&p).expect("own position");
            let Term::App(f, args) = sub else { continue };
            if f.is_theory() {
                if args.iter().all(in_val_or_phi) {
                    let z = Term::Var(Var::fresh_named("z", f.sort().clone()));
                    out.push(Pending {
                        redex: Redex {
                            position: p.clone(),
                            kind: StepKind::Calc(f.clone()),
                            subst: Substitution::new(),
                            extension: vec![Term::eq(z.clone(), sub.clone())],
                            replacement: z,
                        },
                        obligation: None,
                    });
                }
                continue;
            }
            for (i, rule) in self.rules.iter().enumerate() {
                if rule.lhs.root() != Some(f) {
                    continue;
                }
                let Some(sigma) = match_term(&rule.lhs, sub) else { continue };
                let lhs_vars = rule.lhs.vars();
                if !rule.lvar().iter().filter(|x| lhs_vars.contains(x)).all(|x| in_val_or_phi(&sigma.image(x))) {
                    continue;
                }
                for (s, ext) in self.close(rule, sigma, &phi_vars, pool) {
                    let psi = s.apply(&rule.constraint);
                    let mut premise = premise_base.clone();
                    premise.extend(ext.iter());
                    let obligation = match implied_syntactically(&premise, &psi) {
                        Some(true) => None,
                        Some(false) => continue,
                        None => Some((Term::conj(std::iter::once(phi.clone()).chain(ext.iter().cloned())), psi)),
                    };
                    out.push(Pending {
                        redex: Redex {
                            position: p.clone(),
                            kind: StepKind::Rule(i),
                            replacement: s.apply(&rule.rhs),
                            subst: s,
                            extension: ext,
                        },
                        obligation,
                    });
                }
            }
        }
        out
    }

    /// Settles the side conditions of many candidate lists with one solver
    /// call. Unknown answers drop the candidate.
    fn settle(&self, lists: Vec<Vec<Pending>>) -> Result<Vec<Vec<Redex>>, SmtError> {
        let mut queries = Vec::new();
        for list in &lists {
            for c in list {
                if let Some((premise, conclusion)) = &c.obligation {
                    queries.push(Term::and(premise.clone(), Term::not(conclusion.clone())));
                }
            }
        }
        let answers = self.solver.check_sat_all(&queries)?;
        let mut answers = answers.into_iter();
        Ok(lists
            .into_iter()
            .map(|list| {
                list.into_iter()
                    .filter_map(|c| {
                        let keep = match c.obligation {
                            None => true,
                            Some(_) => answers.next() == Some(SmtResult::Unsat),
                        };
                        keep.then_some(c.redex)
                    })
                    .collect()
            })
            .collect())
    }

    /// All redexes of `term` under `phi` whose side conditions hold.
    pub fn redexes(&self, term: &Term, phi: &Term, pool: &[Value]) -> Result<Vec<Redex>, SmtError> {
        Ok(self.settle(vec![self.candidates(term, phi, pool)])?.pop().unwrap_or_default())
    }

    /// One-step successors of several equations, each on the given side,
    /// with a single solver call. Constraints are not checked for
    /// satisfiability.
    pub fn steps_many(&self, jobs: &[(&ConstrainedEquation, Side)]) -> Result<Vec<Vec<StepRecord<ConstrainedEquation>>>, SmtError> {
        let lists = jobs
            .iter()
            .map(|(eq, side)| self.candidates(eq.side(*side), &eq.constraint, &eq.values()))
            .collect();
        let settled = self.settle(lists)?;
        Ok(jobs
            .iter()
            .zip(settled)
            .map(|((eq, side), redexes)| {
                redexes
                    .into_iter()
                    .map(|redex| {
                        let (term, constraint) = apply_redex(eq.side(*side), &eq.constraint, &redex);
                        StepRecord { side: Some(*side), result: eq.with_side(*side, term, constraint), redex }
                    })
                    .collect()
            })
            .collect())
    }

    /// One-step successors of an equation on one side.
    pub fn steps(&self, eq: &ConstrainedEquation, side: Side) -> Result<Vec<StepRecord<ConstrainedEquation>>, SmtError> {
        Ok(self.steps_many(&[(eq, side)])?.pop().unwrap_or_default())
    }

    fn unsatisfiable(&self, phi: &Term) -> Result<bool, SmtError> {
        if *phi == Term::tt() {
            return Ok(false);
        }
        if phi.is_ground() {
            return Ok(!is_true(phi));
        }
        Ok(self.solver.check_sat(phi)? == SmtResult::Unsat)
    }

    /// One-step successors of a constrained term. An unsatisfiable
    /// constraint yields no steps.
    pub fn crewrite_one(&self, ct: &ConstrainedTerm) -> Result<Successors<ConstrainedTerm>, SmtError> {
        if self.unsatisfiable(&ct.constraint)? {
            return Ok(Successors { steps: Vec::new(), unsatisfiable: true });
        }
        let redexes = self.redexes(&ct.term, &ct.constraint, &ct.term.values())?;
        let steps = redexes
            .into_iter()
            .map(|redex| {
                let (term, constraint) = apply_redex(&ct.term, &ct.constraint, &redex);
                StepRecord { side: None, result: ConstrainedTerm::new(term, constraint), redex }
            })
            .collect();
        Ok(Successors { steps, unsatisfiable: false })
    }

    /// One-step successors of an equation on one side. An unsatisfiable
    /// constraint yields no steps.
    pub fn crewrite_side(&self, eq: &ConstrainedEquation, side: Side) -> Result<Successors<ConstrainedEquation>, SmtError> {
        if self.unsatisfiable(&eq.constraint)? {
            return Ok(Successors { steps: Vec::new(), unsatisfiable: true });
        }
        Ok(Successors { steps: self.steps(eq, side)?, unsatisfiable: false })
    }
}

/// Contracts a redex: the new term and the extended constraint.
pub(crate) fn apply_redex(term: &Term, phi: &Term, redex: &Redex) -> (Term, Term) {
    let t = term.replace_unchecked(redex.position.indices(), redex.replacement.clone());
    (t, Term::conj(std::iter::once(phi.clone()).chain(redex.extension.iter().cloned())))
}
