use std::collections::BTreeMap;
use std::fmt;

use super::{Term, Var};

/// A finite, sort-preserving map from variables to terms. Identity bindings
/// are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution(BTreeMap::new())
    }

    /// Adds `x ↦ t`. Panics on a sort mismatch.
    pub fn insert(&mut self, x: Var, t: Term) {
        assert_eq!(x.sort().clone(), t.sort(), "ill-sorted binding {x} ↦ {t}");
        if t.as_var() == Some(&x) {
            self.0.remove(&x);
        } else {
            self.0.insert(x, t);
        }
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    /// `σ(x)`, which is `x` itself outside the domain.
    pub fn image(&self, x: &Var) -> Term {
        self.0.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.0.contains_key(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |x| self.image(x))
    }

    /// `self` followed by `other`: `t(self.then(other)) = (t self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, t) in &self.0 {
            out.insert(x.clone(), other.apply(t));
        }
        for (x, t) in &other.0 {
            if !self.0.contains_key(x) {
                out.insert(x.clone(), t.clone());
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.0.values().all(|t| self.0.keys().all(|x| !t.contains_var(x)))
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
