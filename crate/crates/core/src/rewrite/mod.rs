//! Rewriting: unconstrained rule and calculation steps on terms, the value
//! abstraction of left-hand sides, and (parallel) rewriting of constrained
//! terms and equations.

mod constrained;
mod parallel;
mod replay;
mod tf;
mod unconstrained;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::terms::{FunSym, Position, Substitution, Term, Var};
use crate::theory::Value;

pub use constrained::{Rewriter, DEFAULT_EVAR_CAP};
pub use parallel::{ParallelStep, ParallelSteps, DEFAULT_MAX_REDEXES, DEFAULT_PARALLEL_BUDGET};
pub use replay::ReplayError;
pub use tf::{tf_rule, tf_rules, tf_system, tf_term};
pub use unconstrained::{check_step, respects, rewrite_one, UnconstrainedStep};

/// A term together with a constraint on its logical variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstrainedTerm {
    pub term: Term,
    pub constraint: Term,
}

impl ConstrainedTerm {
    pub fn new(term: Term, constraint: Term) -> ConstrainedTerm {
        ConstrainedTerm { term, constraint }
    }
}

impl fmt::Display for ConstrainedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.term, self.constraint)
    }
}

impl fmt::Debug for ConstrainedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One side of a constrained equation. Positions in the left side are
/// prefixed by 1, in the right side by 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// `left ≈ right [constraint]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstrainedEquation {
    pub left: Term,
    pub right: Term,
    pub constraint: Term,
}

impl ConstrainedEquation {
    pub fn new(left: Term, right: Term, constraint: Term) -> ConstrainedEquation {
        ConstrainedEquation { left, right, constraint }
    }

    pub fn side(&self, side: Side) -> &Term {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Replaces one side and the constraint.
    pub fn with_side(&self, side: Side, term: Term, constraint: Term) -> ConstrainedEquation {
        let mut out = self.clone();
        match side {
            Side::Left => out.left = term,
            Side::Right => out.right = term,
        }
        out.constraint = constraint;
        out
    }

    pub fn swap(&self) -> ConstrainedEquation {
        ConstrainedEquation::new(self.right.clone(), self.left.clone(), self.constraint.clone())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.left.vars();
        out.extend(self.right.vars());
        out.extend(self.constraint.vars());
        out
    }

    /// Values occurring in either side.
    pub fn values(&self) -> Vec<Value> {
        let mut out = self.left.values();
        for v in self.right.values() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    fn vars_in_order(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        let mut push = |x: &Var| {
            if !out.contains(x) {
                out.push(x.clone());
            }
        };
        self.left.visit_vars(&mut push);
        self.right.visit_vars(&mut push);
        self.constraint.visit_vars(&mut push);
        out
    }

    /// Applies a variable renaming; unmapped variables stay.
    pub fn rename(&self, map: &BTreeMap<Var, Term>) -> ConstrainedEquation {
        let mut f = |x: &Var| map.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()));
        ConstrainedEquation::new(self.left.map_vars(&mut f), self.right.map_vars(&mut f), self.constraint.map_vars(&mut f))
    }

    /// Renames all variables, in order of first occurrence, to their base
    /// name followed by as few primes as keep them distinct.
    pub fn with_readable_names(&self) -> ConstrainedEquation {
        self.rename(&self.readable_renaming())
    }

    /// The renaming behind [`ConstrainedEquation::with_readable_names`].
    pub fn readable_renaming(&self) -> BTreeMap<Var, Term> {
        let mut used: BTreeSet<String> = BTreeSet::new();
        let mut map = BTreeMap::new();
        for x in self.vars_in_order() {
            let mut name = x.name().trim_end_matches('\'').to_string();
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            map.insert(x.clone(), Term::Var(Var::new(&name, x.sort().clone())));
        }
        map
    }

    /// A key identifying the equation up to variable renaming and the order
    /// and multiplicity of constraint conjuncts.
    pub fn canonical_key(&self) -> String {
        let mut map = BTreeMap::new();
        for (i, x) in self.vars_in_order().into_iter().enumerate() {
            map.insert(x.clone(), Term::Var(Var::new(&format!("_{i}"), x.sort().clone())));
        }
        let renamed = self.rename(&map);
        let conjuncts: BTreeSet<String> = renamed.constraint.conjuncts().iter().map(|c| c.to_string()).collect();
        let parts: Vec<String> = conjuncts.into_iter().collect();
        format!("{} ≈ {} [{}]", renamed.left, renamed.right, parts.join(" /\\ "))
    }
}

impl fmt::Display for ConstrainedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {} [{}]", self.left, self.right, self.constraint)
    }
}

impl fmt::Debug for ConstrainedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// What a step applies: a rule (by index into the system's rules) or the
/// calculation rule of a theory symbol.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum StepKind {
    Rule(usize),
    Calc(Arc<FunSym>),
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Rule(i) => write!(f, "rule {}", i + 1),
            StepKind::Calc(g) => write!(f, "calc {}", g.name()),
        }
    }
}

impl fmt::Debug for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A contracted redex inside one term: where, with what, the matching
/// substitution, the conjuncts added to the constraint (definitions of
/// fresh variables) and the term put in place of the redex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Redex {
    pub position: Position,
    pub kind: StepKind,
    pub subst: Substitution,
    pub extension: Vec<Term>,
    pub replacement: Term,
}

impl fmt::Debug for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {} / {}", self.position, self.kind, self.subst)?;
        if !self.extension.is_empty() {
            let ext: Vec<String> = self.extension.iter().map(Term::to_string).collect();
            write!(f, " / {}", ext.join(", "))?;
        }
        Ok(())
    }
}

/// A single constrained step with its result.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StepRecord<R> {
    /// The rewritten side for equations; `None` for constrained terms.
    pub side: Option<Side>,
    pub redex: Redex,
    pub result: R,
}

impl<R> StepRecord<R> {
    /// The position in the whole object, with the side prefix for
    /// equations.
    pub fn position(&self) -> Position {
        match self.side {
            Some(s) => self.redex.position.prepend(s.index()),
            None => self.redex.position.clone(),
        }
    }
}

impl<R: fmt::Display> fmt::Debug for StepRecord<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {} / {} => {}", self.position(), self.redex.kind, self.redex.subst, self.result)
    }
}

/// Steps out of a constrained object. When its constraint is
/// unsatisfiable there are none and `unsatisfiable` is set.
#[derive(Clone)]
pub struct Successors<R> {
    pub steps: Vec<StepRecord<R>>,
    pub unsatisfiable: bool,
}
