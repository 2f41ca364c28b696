use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use thiserror::Error;

use super::Position;
use crate::theory::{op_symbol, Op, Value};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Sort {
        Sort(Arc::from(name))
    }

    pub fn int() -> Sort {
        Sort::new("Int")
    }

    pub fn boolean() -> Sort {
        Sort::new("Bool")
    }

    pub fn real() -> Sort {
        Sort::new("Real")
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Sorts interpreted by the theory (they have values).
    pub fn is_theory(&self) -> bool {
        matches!(&*self.0, "Int" | "Bool" | "Real")
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

static FRESH_COUNTER: AtomicU32 = AtomicU32::new(1);

/// A sorted variable. Variables read from input carry index 0; fresh
/// variables reuse a base name with a unique positive index taken from a
/// process-wide monotone counter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    index: u32,
    sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var { name: Arc::from(name), index: 0, sort }
    }

    pub fn with_index(name: &str, index: u32, sort: Sort) -> Var {
        Var { name: Arc::from(name), index, sort }
    }

    /// A variable that has never been handed out before.
    pub fn fresh_named(base: &str, sort: Sort) -> Var {
        let index = FRESH_COUNTER.fetch_add(1, Ordering::Relaxed);
        Var { name: Arc::from(base), index, sort }
    }

    /// A fresh variable with the same base name and sort.
    pub fn fresh(&self) -> Var {
        Var::fresh_named(&self.name, self.sort.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.index > 0 {
            for d in self.index.to_string().bytes() {
                write!(f, "{}", SUBSCRIPTS[(d - b'0') as usize])?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    /// A symbol of `F_terms` that is not a theory symbol.
    Term,
    Theory(Op),
}

/// A function symbol with its sort declaration. Value symbols are not
/// represented here; see [`Term::Val`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunSym {
    name: Arc<str>,
    args: Vec<Sort>,
    sort: Sort,
    kind: SymbolKind,
}

impl FunSym {
    pub fn new(name: &str, args: Vec<Sort>, sort: Sort, kind: SymbolKind) -> FunSym {
        FunSym { name: Arc::from(name), args, sort, kind }
    }

    /// A term symbol.
    pub fn term(name: &str, args: Vec<Sort>, sort: Sort) -> Arc<FunSym> {
        Arc::new(FunSym::new(name, args, sort, SymbolKind::Term))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arg_sorts(&self) -> &[Sort] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn op(&self) -> Option<Op> {
        match self.kind {
            SymbolKind::Theory(op) => Some(op),
            SymbolKind::Term => None,
        }
    }

    pub fn is_theory(&self) -> bool {
        matches!(self.kind, SymbolKind::Theory(_))
    }
}

impl fmt::Debug for FunSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.name)?;
        for s in &self.args {
            write!(f, " {s}")?;
        }
        write!(f, " -> {}", self.sort)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {position} is not a position of {term}")]
    InvalidPosition { position: Position, term: String },
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("{symbol} expects {expected} arguments, got {found}")]
    Arity { symbol: String, expected: usize, found: usize },
}

/// A well-sorted first-order term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Val(Value),
    App(Arc<FunSym>, Vec<Term>),
}

impl Term {
    /// Builds an application, checking arity and argument sorts.
    pub fn app(f: Arc<FunSym>, args: Vec<Term>) -> Result<Term, TermError> {
        if f.arity() != args.len() {
            return Err(TermError::Arity {
                symbol: f.name().to_string(),
                expected: f.arity(),
                found: args.len(),
            });
        }
        for (expected, arg) in f.arg_sorts().iter().zip(&args) {
            let found = arg.sort();
            if *expected != found {
                return Err(TermError::SortMismatch { expected: expected.clone(), found });
            }
        }
        Ok(Term::App(f, args))
    }

    pub fn app_unchecked(f: Arc<FunSym>, args: Vec<Term>) -> Term {
        debug_assert_eq!(f.arity(), args.len());
        Term::App(f, args)
    }

    pub fn constant(f: &Arc<FunSym>) -> Term {
        Term::App(f.clone(), Vec::new())
    }

    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn int(n: i64) -> Term {
        Term::Val(Value::int(n))
    }

    pub fn tt() -> Term {
        Term::Val(Value::Bool(true))
    }

    pub fn ff() -> Term {
        Term::Val(Value::Bool(false))
    }

    /// Applies a theory operator; the operand sort is taken from the first
    /// argument.
    pub fn op(op: Op, args: Vec<Term>) -> Term {
        let operand = args.first().map(Term::sort).unwrap_or_else(Sort::boolean);
        Term::App(op_symbol(op, &operand), args)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::op(Op::Eq, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        Term::op(Op::Not, vec![a])
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::op(Op::Implies, vec![a, b])
    }

    /// Conjunction that drops `true` conjuncts and collapses on `false`.
    pub fn and(a: Term, b: Term) -> Term {
        Term::conj([a, b])
    }

    pub fn conj<I: IntoIterator<Item = Term>>(parts: I) -> Term {
        let mut acc: Option<Term> = None;
        for part in parts {
            if part == Term::ff() {
                return Term::ff();
            }
            // nested conjunctions are flattened into one left-leaning chain
            for p in part.conjuncts() {
                if *p == Term::ff() {
                    return Term::ff();
                }
                acc = Some(match acc {
                    None => p.clone(),
                    Some(a) => Term::op(Op::And, vec![a, p.clone()]),
                });
            }
        }
        acc.unwrap_or_else(Term::tt)
    }

    /// The top-level conjuncts of a formula (`true` yields none).
    pub fn conjuncts(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            match t {
                Term::App(f, args) if f.op() == Some(Op::And) => {
                    go(&args[0], out);
                    go(&args[1], out);
                }
                t if *t == Term::tt() => {}
                t => out.push(t),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(x) => x.sort().clone(),
            Term::Val(v) => v.sort(),
            Term::App(f, _) => f.sort().clone(),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Term::Val(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Val(_))
    }

    pub fn root(&self) -> Option<&Arc<FunSym>> {
        match self {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |x| {
            out.insert(x.clone());
        });
        out
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars_ordered(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        self.visit_vars(&mut |x| {
            if !out.contains(x) {
                out.push(x.clone());
            }
        });
        out
    }

    pub fn visit_vars<F: FnMut(&Var)>(&self, f: &mut F) {
        match self {
            Term::Var(x) => f(x),
            Term::Val(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Val(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Val(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Built only from theory symbols, values and variables.
    pub fn is_logical(&self) -> bool {
        match self {
            Term::Var(_) | Term::Val(_) => true,
            Term::App(f, args) => f.is_theory() && args.iter().all(Term::is_logical),
        }
    }

    /// Every variable occurs at most once.
    pub fn is_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut linear = true;
        self.visit_vars(&mut |x| {
            if !seen.insert(x.clone()) {
                linear = false;
            }
        });
        linear
    }

    /// Values occurring in the term, in order of first occurrence.
    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<Value>) {
            match t {
                Term::Var(_) => {}
                Term::Val(v) => {
                    if !out.contains(v) {
                        out.push(v.clone())
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| go(a, out)),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) if !args.is_empty() => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// All positions in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Position::root(), &mut out, &|_| true);
        out
    }

    /// Positions of function symbols and values.
    pub fn function_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Position::root(), &mut out, &|t| !t.is_var());
        out
    }

    pub fn variable_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Position::root(), &mut out, &Term::is_var);
        out
    }

    fn collect_positions(&self, here: &mut Position, out: &mut Vec<Position>, keep: &dyn Fn(&Term) -> bool) {
        if keep(self) {
            out.push(here.clone());
        }
        for (i, a) in self.args().iter().enumerate() {
            here.push(i + 1);
            a.collect_positions(here, out, keep);
            here.pop();
        }
    }

    /// The subterm at `p`, if `p` is a position of the term.
    pub fn at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.indices() {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn subterm(&self, p: &Position) -> Result<&Term, TermError> {
        self.at(p).ok_or_else(|| TermError::InvalidPosition { position: p.clone(), term: self.to_string() })
    }

    /// `self[t]_p`, checking that `t` has the sort of the replaced subterm.
    pub fn replace(&self, p: &Position, t: Term) -> Result<Term, TermError> {
        let old = self.subterm(p)?;
        let (expected, found) = (old.sort(), t.sort());
        if expected != found {
            return Err(TermError::SortMismatch { expected, found });
        }
        Ok(self.replace_unchecked(p.indices(), t))
    }

    pub(crate) fn replace_unchecked(&self, path: &[usize], t: Term) -> Term {
        match path.split_first() {
            None => t,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i - 1] = args[i - 1].replace_unchecked(rest, t);
                    Term::App(f.clone(), args)
                }
                _ => unreachable!("replace below a leaf"),
            },
        }
    }

    /// Renames variables through `f`, which must preserve sorts.
    pub fn map_vars<F: FnMut(&Var) -> Term>(&self, f: &mut F) -> Term {
        match self {
            Term::Var(x) => f(x),
            Term::Val(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::App(f, args) if !args.is_empty() => match f.op() {
                Some(Op::Implies) => 1,
                Some(Op::Or) => 2,
                Some(Op::And) => 3,
                Some(Op::Le | Op::Ge | Op::Lt | Op::Gt | Op::Eq) => 4,
                Some(Op::Add | Op::Sub) => 5,
                Some(Op::Mul) => 6,
                Some(Op::Neg) => 7,
                _ => 8,
            },
            Term::Val(v) if v.is_negative() => 7,
            _ => 8,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

/// Terms print in the concrete syntax of the system file format.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Val(v) => write!(f, "{v}"),
            Term::App(g, args) => {
                let level = self.precedence();
                match (g.op(), args.as_slice()) {
                    (Some(Op::Neg), [a]) => {
                        f.write_str("-")?;
                        write_operand(f, a, a.precedence() < 8)
                    }
                    (Some(op), [a, b]) if op != Op::Not => {
                        let (lp, rp) = match op {
                            Op::Implies => (a.precedence() <= level, b.precedence() < level),
                            Op::Le | Op::Ge | Op::Lt | Op::Gt | Op::Eq => {
                                (a.precedence() <= level, b.precedence() <= level)
                            }
                            _ => (a.precedence() < level, b.precedence() <= level),
                        };
                        write_operand(f, a, lp)?;
                        write!(f, " {} ", op.surface_name())?;
                        write_operand(f, b, rp)
                    }
                    (_, []) => f.write_str(g.name()),
                    (_, args) => {
                        write!(f, "{}(", g.name())?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{a}")?;
                        }
                        f.write_str(")")
                    }
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
