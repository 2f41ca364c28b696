//! Built-in theories: integer, real and boolean values, the supported
//! theory operators, evaluation of ground logical terms and the schematic
//! calculation rules.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::terms::{FunSym, Rule, Sort, SymbolKind, Term, Var};

/// A theory operator. Every operator is instantiated at an operand sort to
/// obtain a concrete symbol, see [`op_symbol`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Neg,
    Add,
    Sub,
    Mul,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
}

impl Op {
    pub const ALL: [Op; 13] = [
        Op::Not,
        Op::And,
        Op::Or,
        Op::Implies,
        Op::Neg,
        Op::Add,
        Op::Sub,
        Op::Mul,
        Op::Le,
        Op::Ge,
        Op::Lt,
        Op::Gt,
        Op::Eq,
    ];

    pub fn arity(self) -> usize {
        match self {
            Op::Not | Op::Neg => 1,
            _ => 2,
        }
    }

    /// Concrete syntax used by the system file format.
    pub fn surface_name(self) -> &'static str {
        match self {
            Op::Not => "not",
            Op::And => "/\\",
            Op::Or => "\\/",
            Op::Implies => "=>",
            Op::Neg | Op::Sub => "-",
            Op::Add => "+",
            Op::Mul => "*",
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::Lt => "<",
            Op::Gt => ">",
            Op::Eq => "=",
        }
    }

    pub fn smt_name(self) -> &'static str {
        match self {
            Op::Not => "not",
            Op::And => "and",
            Op::Or => "or",
            Op::Implies => "=>",
            Op::Neg | Op::Sub => "-",
            Op::Add => "+",
            Op::Mul => "*",
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::Lt => "<",
            Op::Gt => ">",
            Op::Eq => "=",
        }
    }

    /// Result sort for the given operand sort.
    pub fn result_sort(self, operand: &Sort) -> Sort {
        match self {
            Op::Neg | Op::Add | Op::Sub | Op::Mul => operand.clone(),
            _ => Sort::boolean(),
        }
    }

    /// Whether the operator accepts operands of the given sort.
    pub fn accepts(self, operand: &Sort) -> bool {
        match self {
            Op::Not | Op::And | Op::Or | Op::Implies => *operand == Sort::boolean(),
            Op::Neg | Op::Add | Op::Sub | Op::Mul | Op::Le | Op::Ge | Op::Lt | Op::Gt => {
                *operand == Sort::int() || *operand == Sort::real()
            }
            Op::Eq => operand.is_theory(),
        }
    }
}

/// The symbol for `op` at operand sort `operand`.
pub fn op_symbol(op: Op, operand: &Sort) -> Arc<FunSym> {
    Arc::new(FunSym::new(
        op.surface_name(),
        vec![operand.clone(); op.arity()],
        op.result_sort(operand),
        SymbolKind::Theory(op),
    ))
}

/// A value symbol together with the carrier element it denotes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::boolean(),
            Value::Int(_) => Sort::int(),
            Value::Real(_) => Sort::real(),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    /// Whether the value denotes a negative number.
    pub fn is_negative(&self) -> bool {
        match self {
            Value::Bool(_) => false,
            Value::Int(n) => n.is_negative(),
            Value::Real(q) => q.is_negative(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Real(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Value::Real(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed literal `{0}`")]
pub struct LiteralError(pub String);

/// Parses a literal: a decimal integer with an optional leading `-`,
/// `true`/`false`, or a rational `a/b`.
pub fn value_of(literal: &str) -> Result<Value, LiteralError> {
    let err = || LiteralError(literal.to_string());
    match literal {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if let Some((num, den)) = literal.split_once('/') {
        if !is_int(num) || den.is_empty() || !den.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let num = BigInt::from_str(num).map_err(|_| err())?;
        let den = BigInt::from_str(den).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Value::Real(BigRational::new(num, den)));
    }
    if is_int(literal) {
        return BigInt::from_str(literal).map(Value::Int).map_err(|_| err());
    }
    Err(err())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("term contains the variable {0}")]
    NonGround(String),
    #[error("term contains the non-theory symbol {0}")]
    NonTheorySymbol(String),
    #[error("ill-sorted application of {0}")]
    IllSorted(String),
}

/// Evaluates a ground logical term to its unique value.
pub fn eval_ground(t: &Term) -> Result<Value, EvalError> {
    match t {
        Term::Var(x) => Err(EvalError::NonGround(x.to_string())),
        Term::Val(v) => Ok(v.clone()),
        Term::App(f, args) => {
            let SymbolKind::Theory(op) = f.kind() else {
                return Err(EvalError::NonTheorySymbol(f.name().to_string()));
            };
            let vals = args.iter().map(eval_ground).collect::<Result<Vec<_>, _>>()?;
            apply_op(op, &vals).ok_or_else(|| EvalError::IllSorted(f.name().to_string()))
        }
    }
}

/// Applies an operator to values; `None` on ill-sorted input.
pub fn apply_op(op: Op, args: &[Value]) -> Option<Value> {
    use Value::*;
    if args.len() != op.arity() {
        return None;
    }
    let v = match (op, args) {
        (Op::Not, [Bool(a)]) => Bool(!a),
        (Op::And, [Bool(a), Bool(b)]) => Bool(*a && *b),
        (Op::Or, [Bool(a), Bool(b)]) => Bool(*a || *b),
        (Op::Implies, [Bool(a), Bool(b)]) => Bool(!*a || *b),
        (Op::Neg, [Int(a)]) => Int(-a),
        (Op::Neg, [Real(a)]) => Real(-a),
        (Op::Add, [Int(a), Int(b)]) => Int(a + b),
        (Op::Add, [Real(a), Real(b)]) => Real(a + b),
        (Op::Sub, [Int(a), Int(b)]) => Int(a - b),
        (Op::Sub, [Real(a), Real(b)]) => Real(a - b),
        (Op::Mul, [Int(a), Int(b)]) => Int(a * b),
        (Op::Mul, [Real(a), Real(b)]) => Real(a * b),
        (Op::Le, [Int(a), Int(b)]) => Bool(a <= b),
        (Op::Le, [Real(a), Real(b)]) => Bool(a <= b),
        (Op::Ge, [Int(a), Int(b)]) => Bool(a >= b),
        (Op::Ge, [Real(a), Real(b)]) => Bool(a >= b),
        (Op::Lt, [Int(a), Int(b)]) => Bool(a < b),
        (Op::Lt, [Real(a), Real(b)]) => Bool(a < b),
        (Op::Gt, [Int(a), Int(b)]) => Bool(a > b),
        (Op::Gt, [Real(a), Real(b)]) => Bool(a > b),
        (Op::Eq, [a, b]) if a.sort() == b.sort() => Bool(a == b),
        _ => return None,
    };
    Some(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not a theory symbol")]
pub struct NotATheorySymbol(pub String);

/// The calculation rule `f(x1,..,xn) -> y [y = f(x1,..,xn)]` for a theory
/// symbol `f`, with fresh variables.
pub fn calc_rule(f: &Arc<FunSym>) -> Result<Rule, NotATheorySymbol> {
    if !matches!(f.kind(), SymbolKind::Theory(_)) {
        return Err(NotATheorySymbol(f.name().to_string()));
    }
    let args: Vec<Term> = f
        .arg_sorts()
        .iter()
        .enumerate()
        .map(|(i, s)| Term::Var(Var::fresh_named(&format!("x{}", i + 1), s.clone())))
        .collect();
    let y = Term::Var(Var::fresh_named("y", f.sort().clone()));
    let lhs = Term::app_unchecked(f.clone(), args);
    let constraint = Term::eq(y.clone(), lhs.clone());
    Ok(Rule::new(lhs, y, constraint))
}

/// The theory a system is interpreted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TheoryKind {
    Ints,
    Reals,
}

impl TheoryKind {
    /// The numeric sort of the theory; numeric literals take this sort.
    pub fn numeric_sort(self) -> Sort {
        match self {
            TheoryKind::Ints => Sort::int(),
            TheoryKind::Reals => Sort::real(),
        }
    }

    /// Converts an integer literal into a value of the numeric sort.
    pub fn numeral(self, n: BigInt) -> Value {
        match self {
            TheoryKind::Ints => Value::Int(n),
            TheoryKind::Reals => Value::Real(BigRational::new(n, BigInt::one())),
        }
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoryKind::Ints => "Ints",
            TheoryKind::Reals => "Reals",
        })
    }
}

impl FromStr for TheoryKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Ints" | "Int" | "Integers" => Ok(TheoryKind::Ints),
            "Reals" | "Real" => Ok(TheoryKind::Reals),
            _ => Err(format!("unknown theory `{s}`")),
        }
    }
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    QF_LIA,
    QF_NIA,
    QF_LRA,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::QF_LIA => "QF_LIA",
            Logic::QF_NIA => "QF_NIA",
            Logic::QF_LRA => "QF_LRA",
        })
    }
}

impl FromStr for Logic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "QF_LIA" => Ok(Logic::QF_LIA),
            "QF_NIA" => Ok(Logic::QF_NIA),
            "QF_LRA" => Ok(Logic::QF_LRA),
            _ => Err(format!("unsupported logic `{s}`")),
        }
    }
}

/// Theory binding of a system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Theory {
    pub kind: TheoryKind,
    pub logic: Logic,
}

impl Theory {
    pub fn new(kind: TheoryKind, logic: Logic) -> Theory {
        Theory { kind, logic }
    }

    pub fn ints() -> Theory {
        Theory::new(TheoryKind::Ints, Logic::QF_LIA)
    }

    /// All theory symbols available in this theory.
    pub fn symbols(&self) -> Vec<Arc<FunSym>> {
        let num = self.kind.numeric_sort();
        let mut out = Vec::new();
        for op in Op::ALL {
            match op {
                Op::Not | Op::And | Op::Or | Op::Implies => out.push(op_symbol(op, &Sort::boolean())),
                Op::Eq => {
                    out.push(op_symbol(op, &num));
                    out.push(op_symbol(op, &Sort::boolean()));
                }
                _ => out.push(op_symbol(op, &num)),
            }
        }
        out
    }
}

impl Default for Theory {
    fn default() -> Self {
        Theory::ints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Term {
        Term::Val(Value::int(n))
    }

    #[test]
    fn eval_addition() {
        let t = Term::op(Op::Add, vec![int(1), int(2)]);
        assert_eq!(eval_ground(&t), Ok(Value::int(3)));
    }

    #[test]
    fn eval_boolean_table() {
        let t = Term::op(Op::And, vec![Term::tt(), Term::ff()]);
        assert_eq!(eval_ground(&t), Ok(Value::Bool(false)));
        let t = Term::op(Op::Implies, vec![Term::ff(), Term::ff()]);
        assert_eq!(eval_ground(&t), Ok(Value::Bool(true)));
    }

    #[test]
    fn eval_unary_minus() {
        let t = Term::op(Op::Neg, vec![int(5)]);
        assert_eq!(eval_ground(&t), Ok(Value::int(-5)));
    }

    #[test]
    fn eval_is_arbitrary_precision() {
        let big = Term::Val(Value::Int(BigInt::from(i64::MAX)));
        let t = Term::op(Op::Mul, vec![big.clone(), big]);
        let expected = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
        assert_eq!(eval_ground(&t), Ok(Value::Int(expected)));
    }

    #[test]
    fn eval_rejects_variables_and_term_symbols() {
        let x = Term::Var(Var::new("x", Sort::int()));
        let t = Term::op(Op::Add, vec![x, int(1)]);
        assert!(matches!(eval_ground(&t), Err(EvalError::NonGround(_))));
        let f = Arc::new(FunSym::new("f", vec![], Sort::int(), SymbolKind::Term));
        let t = Term::op(Op::Add, vec![Term::app_unchecked(f, vec![]), int(1)]);
        assert!(matches!(eval_ground(&t), Err(EvalError::NonTheorySymbol(_))));
    }

    #[test]
    fn rationals_are_exact() {
        let a = Term::Val(value_of("1/3").unwrap());
        let t = Term::op(Op::Add, vec![a.clone(), a.clone()]);
        let t = Term::op(Op::Add, vec![t, a]);
        assert_eq!(eval_ground(&t).unwrap().to_string(), "1");
    }

    #[test]
    fn literal_grammar() {
        assert_eq!(value_of("-7"), Ok(Value::int(-7)));
        assert_eq!(value_of("true"), Ok(Value::Bool(true)));
        assert_eq!(value_of("6/4").unwrap().to_string(), "3/2");
        assert!(value_of("1/0").is_err());
        assert!(value_of("--1").is_err());
        assert!(value_of("x").is_err());
        assert!(value_of("").is_err());
    }

    #[test]
    fn calc_rule_schema() {
        let plus = op_symbol(Op::Add, &Sort::int());
        let rule = calc_rule(&plus).unwrap();
        assert_eq!(rule.lhs.function_positions(), vec![crate::terms::Position::root()]);
        assert!(rule.is_left_linear());
        let lvar = rule.lvar();
        assert_eq!(lvar.len(), 3);
        let y = rule.rhs.as_var().unwrap();
        assert!(lvar.contains(y));
        assert!(rule.constraint.vars().contains(y));

        let not = op_symbol(Op::Not, &Sort::boolean());
        let rule = calc_rule(&not).unwrap();
        assert_eq!(rule.lhs.args().len(), 1);
        assert_eq!(rule.rhs.sort(), Sort::boolean());

        let ge = op_symbol(Op::Ge, &Sort::int());
        let rule = calc_rule(&ge).unwrap();
        assert_eq!(rule.rhs.sort(), Sort::boolean());
        assert_eq!(rule.lhs.args()[0].sort(), Sort::int());
    }

    #[test]
    fn calc_rule_rejects_term_symbols() {
        let f = Arc::new(FunSym::new("max", vec![Sort::int(); 2], Sort::int(), SymbolKind::Term));
        assert!(calc_rule(&f).is_err());
    }
}
