//! The textual system format: parsing, sort inference, validation and
//! printing.
//!
//! ```text
//! THEORY Ints;
//! LOGIC QF_LIA;
//! SIGNATURE
//!   max : Int Int -> Int;
//! RULES
//!   max(x, y) -> x [x >= y];
//!   max(x, y) -> y [y >= x];
//!   max(x, y) -> max(y, x);
//! ```

mod infer;
mod lexer;
mod parser;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::terms::{FunSym, Rule, Sort, Term, Var};
use crate::theory::Theory;

pub use infer::infer_sorts;
pub use parser::{parse, RawBinOp, RawDecl, RawLit, RawRule, RawSystem, RawTerm};
pub use validate::{validate, Diagnostic, Severity};

/// A 1-based line and column in the input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {loc}: {message}")]
pub struct ParseError {
    pub loc: Loc,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("sort conflict for {what}: {first} at {first_loc} but {second} at {second_loc}")]
    Conflict { what: String, first: Sort, first_loc: Loc, second: Sort, second_loc: Loc },
    #[error("arity conflict at {loc}: `{symbol}` takes {expected} arguments, found {found}")]
    Arity { symbol: String, loc: Loc, expected: usize, found: usize },
    #[error("{loc}: {message}")]
    Invalid { loc: Loc, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// The term symbols of a system, by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, Arc<FunSym>>,
}

impl Signature {
    pub fn from_symbols<I: IntoIterator<Item = Arc<FunSym>>>(symbols: I) -> Signature {
        Signature { symbols: symbols.into_iter().map(|f| (f.name().to_string(), f)).collect() }
    }

    pub fn get(&self, name: &str) -> Option<&Arc<FunSym>> {
        self.symbols.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<FunSym>> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A logically constrained term rewrite system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lctrs {
    pub theory: Theory,
    pub signature: Signature,
    pub rules: Vec<Rule>,
    /// Solver named in the file, if any.
    pub solver: Option<String>,
    pub default_sort: Option<Sort>,
}

fn collect_symbols(t: &Term, out: &mut BTreeSet<Arc<FunSym>>) {
    if let Term::App(f, args) = t {
        if !f.is_theory() {
            out.insert(f.clone());
        }
        args.iter().for_each(|a| collect_symbols(a, out));
    }
}

impl Lctrs {
    /// A system over the given rules; the signature is read off the rules.
    pub fn new(theory: Theory, rules: Vec<Rule>) -> Lctrs {
        let mut syms = BTreeSet::new();
        for r in &rules {
            collect_symbols(&r.lhs, &mut syms);
            collect_symbols(&r.rhs, &mut syms);
        }
        Lctrs { theory, signature: Signature::from_symbols(syms), rules, solver: None, default_sort: None }
    }

    pub fn is_left_linear(&self) -> bool {
        crate::terms::is_left_linear_system(&self.rules)
    }

    pub fn is_linear(&self) -> bool {
        crate::terms::is_linear_system(&self.rules)
    }
}

/// Parses and sort-checks a system file.
pub fn load(text: &str) -> Result<Lctrs, FrontendError> {
    Ok(infer_sorts(&parse(text)?)?)
}

impl FromStr for Lctrs {
    type Err = FrontendError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        load(s)
    }
}

/// Variables introduced during analysis carry an index; print them with a
/// plain suffix so the output parses again.
fn printable(t: &Term) -> Term {
    t.map_vars(&mut |x| {
        if x.index() == 0 {
            Term::Var(x.clone())
        } else {
            Term::Var(Var::new(&format!("{}_{}", x.name(), x.index()), x.sort().clone()))
        }
    })
}

impl fmt::Display for Lctrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "THEORY {};", self.theory.kind)?;
        writeln!(f, "LOGIC {};", self.theory.logic)?;
        if let Some(s) = &self.solver {
            writeln!(f, "SOLVER {s};")?;
        }
        if let Some(s) = &self.default_sort {
            writeln!(f, "DEFAULT-SORT {s};")?;
        }
        writeln!(f, "SIGNATURE")?;
        for sym in self.signature.iter() {
            write!(f, "  {} :", sym.name())?;
            for s in sym.arg_sorts() {
                write!(f, " {s}")?;
            }
            writeln!(f, " -> {};", sym.sort())?;
        }
        writeln!(f, "RULES")?;
        for r in &self.rules {
            let r = Rule::new(printable(&r.lhs), printable(&r.rhs), printable(&r.constraint));
            writeln!(f, "  {r};")?;
        }
        Ok(())
    }
}
