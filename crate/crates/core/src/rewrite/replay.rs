use std::collections::BTreeSet;

use thiserror::Error;

use super::constrained::implied_syntactically;
use super::{ConstrainedEquation, ParallelStep, Redex, Rewriter, Side, StepKind, StepRecord};
use crate::smt::{SmtError, Validity};
use crate::terms::{Position, Term, Var};
use crate::theory::Op;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("no subterm at position {0}")]
    Position(Position),
    #[error("{kind} does not match at {position}")]
    NoMatch { kind: StepKind, position: Position },
    #[error("logical variable {var} is instantiated by {image}")]
    NotLogical { var: Var, image: Term },
    #[error("constraint does not imply {0}")]
    NotImplied(Term),
    #[error("{0} does not define a fresh variable")]
    BadExtension(Term),
    #[error("redexes at {0} and {1} are not parallel")]
    NotParallel(Position, Position),
    #[error("replay gives {found}, recorded {expected}")]
    Mismatch { expected: String, found: String },
    #[error(transparent)]
    Smt(#[from] SmtError),
}

impl Rewriter<'_> {
    /// Re-checks a contraction on `term` under `phi` from scratch and
    /// returns the new term and constraint.
    pub fn replay_redex(&self, term: &Term, phi: &Term, redex: &Redex) -> Result<(Term, Term), ReplayError> {
        let p = &redex.position;
        let sub = term.at(p).ok_or_else(|| ReplayError::Position(p.clone()))?;
        let no_match = || ReplayError::NoMatch { kind: redex.kind.clone(), position: p.clone() };

        let mut taken: BTreeSet<Var> = term.vars();
        taken.extend(phi.vars());
        for e in &redex.extension {
            let bad = || ReplayError::BadExtension(e.clone());
            let Term::App(f, args) = e else { return Err(bad()) };
            let x = args.first().and_then(Term::as_var).ok_or_else(bad)?;
            if f.op() != Some(Op::Eq) || !taken.insert(x.clone()) {
                return Err(bad());
            }
        }
        let extended = Term::conj(std::iter::once(phi.clone()).chain(redex.extension.iter().cloned()));
        let phi_vars = phi.vars();
        let ext_vars = extended.vars();

        match &redex.kind {
            StepKind::Calc(f) => {
                let Term::App(g, args) = sub else { return Err(no_match()) };
                let ok_arg = |a: &Term| a.is_value() || a.as_var().is_some_and(|x| phi_vars.contains(x));
                if g != f || !args.iter().all(ok_arg) {
                    return Err(no_match());
                }
                let expected = vec![Term::eq(redex.replacement.clone(), sub.clone())];
                if redex.extension != expected || !redex.replacement.is_var() {
                    return Err(ReplayError::BadExtension(Term::conj(redex.extension.iter().cloned())));
                }
            }
            StepKind::Rule(i) => {
                let rule = self.rules().get(*i).ok_or_else(no_match)?;
                if redex.subst.apply(&rule.lhs) != *sub {
                    return Err(no_match());
                }
                for x in rule.lvar() {
                    let image = redex.subst.image(&x);
                    if !(image.is_value() || image.as_var().is_some_and(|y| ext_vars.contains(y))) {
                        return Err(ReplayError::NotLogical { var: x, image });
                    }
                }
                let psi = redex.subst.apply(&rule.constraint);
                let premise = extended.conjuncts();
                let holds = match implied_syntactically(&premise, &psi) {
                    Some(b) => b,
                    None => self.solver().is_valid(&Term::implies(extended.clone(), psi.clone()))? == Validity::Valid,
                };
                if !holds {
                    return Err(ReplayError::NotImplied(psi));
                }
                let rhs = redex.subst.apply(&rule.rhs);
                if rhs != redex.replacement {
                    return Err(ReplayError::Mismatch { expected: redex.replacement.to_string(), found: rhs.to_string() });
                }
            }
        }
        Ok((term.replace_unchecked(p.indices(), redex.replacement.clone()), extended))
    }

    /// Replays a recorded step from `eq` and checks the recorded result.
    pub fn replay_step(
        &self,
        eq: &ConstrainedEquation,
        step: &StepRecord<ConstrainedEquation>,
    ) -> Result<ConstrainedEquation, ReplayError> {
        let side = step.side.unwrap_or(Side::Left);
        let (t, phi) = self.replay_redex(eq.side(side), &eq.constraint, &step.redex)?;
        let out = eq.with_side(side, t, phi);
        check_same(&step.result, &out)?;
        Ok(out)
    }

    /// Replays a parallel step as a left-to-right sequence of single steps.
    pub fn replay_parallel(&self, eq: &ConstrainedEquation, step: &ParallelStep) -> Result<ConstrainedEquation, ReplayError> {
        for (i, a) in step.redexes.iter().enumerate() {
            for b in &step.redexes[i + 1..] {
                if !a.position.is_parallel_to(&b.position) {
                    return Err(ReplayError::NotParallel(a.position.clone(), b.position.clone()));
                }
            }
        }
        let mut cur = eq.clone();
        for r in &step.redexes {
            let (t, phi) = self.replay_redex(cur.side(step.side), &cur.constraint, r)?;
            cur = cur.with_side(step.side, t, phi);
        }
        check_same(&step.result, &cur)?;
        Ok(cur)
    }
}

fn check_same(expected: &ConstrainedEquation, found: &ConstrainedEquation) -> Result<(), ReplayError> {
    if expected.canonical_key() != found.canonical_key() {
        return Err(ReplayError::Mismatch { expected: expected.to_string(), found: found.to_string() });
    }
    Ok(())
}
