use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{are_variants, Term, Var};

/// A constrained rewrite rule `lhs -> rhs [constraint]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub constraint: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term, constraint: Term) -> Rule {
        Rule { lhs, rhs, constraint }
    }

    pub fn unconstrained(lhs: Term, rhs: Term) -> Rule {
        Rule::new(lhs, rhs, Term::tt())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.lhs.vars();
        out.extend(self.rhs.vars());
        out.extend(self.constraint.vars());
        out
    }

    /// Logical variables: `Var(φ) ∪ (Var(r) \ Var(ℓ))`.
    pub fn lvar(&self) -> BTreeSet<Var> {
        let lhs = self.lhs.vars();
        let mut out = self.constraint.vars();
        out.extend(self.rhs.vars().into_iter().filter(|x| !lhs.contains(x)));
        out
    }

    /// Extra variables: `Var(r) \ (Var(ℓ) ∪ Var(φ))`.
    pub fn evar(&self) -> BTreeSet<Var> {
        let lhs = self.lhs.vars();
        let phi = self.constraint.vars();
        self.rhs.vars().into_iter().filter(|x| !lhs.contains(x) && !phi.contains(x)).collect()
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    pub fn is_linear(&self) -> bool {
        self.lhs.is_linear() && self.rhs.is_linear()
    }

    /// Whether the right-hand side introduces variables absent from the left.
    pub fn has_rhs_only_vars(&self) -> bool {
        let lhs = self.lhs.vars();
        self.rhs.vars().iter().any(|x| !lhs.contains(x))
    }

    /// A variant whose variables are all fresh and distinct from `avoid`.
    pub fn rename_apart(&self, avoid: &BTreeSet<Var>) -> Rule {
        let mut map: BTreeMap<Var, Term> = BTreeMap::new();
        for x in self.vars() {
            let mut y = x.fresh();
            while avoid.contains(&y) {
                y = x.fresh();
            }
            map.insert(x, Term::Var(y));
        }
        let mut rename = |x: &Var| map[x].clone();
        Rule {
            lhs: self.lhs.map_vars(&mut rename),
            rhs: self.rhs.map_vars(&mut rename),
            constraint: self.constraint.map_vars(&mut rename),
        }
    }

    /// Whether one variable renaming maps lhs, rhs and constraint of `self`
    /// onto those of `other` simultaneously.
    pub fn is_variant_of(&self, other: &Rule) -> bool {
        are_variants(
            &[&self.lhs, &self.rhs, &self.constraint],
            &[&other.lhs, &other.rhs, &other.constraint],
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)?;
        if self.constraint != Term::tt() {
            write!(f, " [{}]", self.constraint)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn is_left_linear_system(rules: &[Rule]) -> bool {
    rules.iter().all(Rule::is_left_linear)
}

pub fn is_linear_system(rules: &[Rule]) -> bool {
    rules.iter().all(Rule::is_linear)
}
