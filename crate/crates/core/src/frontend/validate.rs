use std::fmt;

use super::Lctrs;
use crate::smt::{SmtResult, Solver};
use crate::terms::{Sort, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Index of the offending rule.
    pub rule: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn error(rule: usize, message: String) -> Diagnostic {
        Diagnostic { severity: Severity::Error, rule: Some(rule), message }
    }

    fn warning(rule: usize, message: String) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, rule: Some(rule), message }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => f.write_str("error: ")?,
            Severity::Warning => f.write_str("warning: ")?,
        }
        if let Some(i) = self.rule {
            write!(f, "rule {}: ", i + 1)?;
        }
        f.write_str(&self.message)
    }
}

/// Checks the well-formedness conditions on rules. With a solver, rules
/// whose constraint is unsatisfiable are reported as warnings.
pub fn validate(sys: &Lctrs, solver: Option<&Solver>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, rule) in sys.rules.iter().enumerate() {
        match &rule.lhs {
            Term::App(f, _) if f.is_theory() => {
                out.push(Diagnostic::error(i, format!("theory root in lhs: {}", rule.lhs)));
            }
            Term::App(..) => {}
            Term::Var(_) => out.push(Diagnostic::error(i, format!("lhs is a variable: {}", rule.lhs))),
            Term::Val(_) => out.push(Diagnostic::error(i, format!("lhs is a value: {}", rule.lhs))),
        }
        if rule.lhs.sort() != rule.rhs.sort() {
            out.push(Diagnostic::error(
                i,
                format!("lhs has sort {} but rhs has sort {}", rule.lhs.sort(), rule.rhs.sort()),
            ));
        }
        if rule.constraint.sort() != Sort::boolean() {
            out.push(Diagnostic::error(i, format!("constraint has sort {}", rule.constraint.sort())));
        } else if !rule.constraint.is_logical() {
            out.push(Diagnostic::error(i, format!("constraint is not a logical term: {}", rule.constraint)));
        }
        for x in rule.lvar() {
            if !x.sort().is_theory() {
                out.push(Diagnostic::error(i, format!("logical variable {x} has non-theory sort {}", x.sort())));
            }
        }
        let mut visible = rule.lhs.vars();
        visible.extend(rule.rhs.vars());
        let foreign: Vec<String> =
            rule.constraint.vars().into_iter().filter(|x| !visible.contains(x)).map(|x| x.to_string()).collect();
        if !foreign.is_empty() {
            out.push(Diagnostic::warning(
                i,
                format!("constraint variables {} occur in neither side", foreign.join(", ")),
            ));
        }
    }
    if let Some(solver) = solver {
        let checked: Vec<(usize, Term)> = sys
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.constraint != Term::tt() && r.constraint.sort() == Sort::boolean() && r.constraint.is_logical())
            .map(|(i, r)| (i, r.constraint.clone()))
            .collect();
        let phis: Vec<Term> = checked.iter().map(|(_, c)| c.clone()).collect();
        if let Ok(results) = solver.check_sat_all(&phis) {
            for ((i, c), r) in checked.iter().zip(results) {
                if r == SmtResult::Unsat {
                    out.push(Diagnostic::warning(*i, format!("unsatisfiable constraint {c}: the rule never applies")));
                }
            }
        }
    }
    out
}
