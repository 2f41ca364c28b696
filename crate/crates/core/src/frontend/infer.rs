use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::Arc;

use super::parser::{RawBinOp, RawLit, RawRule, RawSystem, RawTerm};
use super::{Lctrs, Loc, Signature, SortError};
use crate::terms::{FunSym, Rule, Sort, Term, Var};
use crate::theory::{op_symbol, value_of, Logic, Op, Theory, TheoryKind, Value};

/// Union-find over sort variables; each class may be fixed to a sort,
/// remembering where that happened.
#[derive(Default)]
struct Sorts {
    parent: Vec<usize>,
    fixed: Vec<Option<(Sort, Loc)>>,
}

impl Sorts {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.fixed.push(None);
        self.parent.len() - 1
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn fix(&mut self, a: usize, sort: &Sort, loc: Loc, what: &str) -> Result<(), SortError> {
        let r = self.find(a);
        match &self.fixed[r] {
            Some((s, first_loc)) if s != sort => Err(SortError::Conflict {
                what: what.to_string(),
                first: s.clone(),
                first_loc: *first_loc,
                second: sort.clone(),
                second_loc: loc,
            }),
            Some(_) => Ok(()),
            None => {
                self.fixed[r] = Some((sort.clone(), loc));
                Ok(())
            }
        }
    }

    fn union(&mut self, a: usize, b: usize, what: &str) -> Result<(), SortError> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        match (self.fixed[ra].clone(), self.fixed[rb].clone()) {
            (Some((sa, la)), Some((sb, lb))) if sa != sb => {
                let ((first, first_loc), (second, second_loc)) =
                    if la <= lb { ((sa, la), (sb, lb)) } else { ((sb, lb), (sa, la)) };
                return Err(SortError::Conflict { what: what.to_string(), first, first_loc, second, second_loc });
            }
            (None, Some(f)) => self.fixed[ra] = Some(f),
            _ => {}
        }
        self.parent[rb] = ra;
        Ok(())
    }

    fn resolved(&mut self, a: usize, default: &Sort) -> Sort {
        let r = self.find(a);
        self.fixed[r].as_ref().map(|(s, _)| s.clone()).unwrap_or_else(|| default.clone())
    }
}

struct Inferred {
    args: Vec<usize>,
    result: usize,
    loc: Loc,
}

struct Ctx<'a> {
    kind: TheoryKind,
    sorts: Sorts,
    declared: &'a BTreeMap<String, (Arc<FunSym>, Loc)>,
    inferred: BTreeMap<String, Inferred>,
    /// Variable names with the first place they were used.
    var_names: BTreeMap<String, Loc>,
    /// Sort variable of each raw node, keyed by node address.
    node: HashMap<usize, usize>,
    /// Sort variables of operands of `=` with their location.
    equalities: Vec<(usize, Loc)>,
    nonlinear: bool,
}

fn key(t: &RawTerm) -> usize {
    t as *const RawTerm as usize
}

fn describe(t: &RawTerm) -> String {
    match t {
        RawTerm::Ident { name, .. } | RawTerm::Call { name, .. } => format!("`{name}`"),
        RawTerm::Lit { lit: RawLit::Int(n), .. } => format!("`{n}`"),
        RawTerm::Lit { lit: RawLit::Rat(r), .. } => format!("`{r}`"),
        RawTerm::Lit { lit: RawLit::Bool(b), .. } => format!("`{b}`"),
        RawTerm::Neg { .. } => "operand of unary `-`".into(),
        RawTerm::Not { .. } => "`not(..)`".into(),
        RawTerm::Binary { op: RawBinOp::Neq, .. } => "`!=`".into(),
        RawTerm::Binary { op: RawBinOp::Op(op), .. } => format!("`{}`", op.surface_name()),
    }
}

fn is_numeral(t: &RawTerm) -> bool {
    match t {
        RawTerm::Lit { .. } => true,
        RawTerm::Neg { arg, .. } => is_numeral(arg),
        _ => false,
    }
}

impl Ctx<'_> {
    fn walk(&mut self, t: &RawTerm, vars: &mut HashMap<String, usize>) -> Result<usize, SortError> {
        let me = self.sorts.fresh();
        self.node.insert(key(t), me);
        let num = self.kind.numeric_sort();
        let boolean = Sort::boolean();
        match t {
            RawTerm::Ident { name, loc } => {
                if let Some((f, _)) = self.declared.get(name) {
                    if f.arity() != 0 {
                        return Err(SortError::Arity { symbol: name.clone(), loc: *loc, expected: f.arity(), found: 0 });
                    }
                    self.sorts.fix(me, f.sort(), *loc, &describe(t))?;
                } else {
                    if let Some(inf) = self.inferred.get(name) {
                        return Err(SortError::Invalid {
                            loc: *loc,
                            message: format!("`{name}` is used as a variable here and as a function symbol at {}", inf.loc),
                        });
                    }
                    self.var_names.entry(name.clone()).or_insert(*loc);
                    let v = *vars.entry(name.clone()).or_insert_with(|| self.sorts.fresh());
                    self.sorts.union(v, me, &describe(t))?;
                }
            }
            RawTerm::Lit { lit, loc } => {
                let sort = match lit {
                    RawLit::Int(_) => num,
                    RawLit::Bool(_) => boolean,
                    RawLit::Rat(r) if self.kind == TheoryKind::Reals => {
                        value_of(r).map_err(|e| SortError::Invalid { loc: *loc, message: e.to_string() })?;
                        Sort::real()
                    }
                    RawLit::Rat(r) => {
                        return Err(SortError::Invalid {
                            loc: *loc,
                            message: format!("rational literal `{r}` requires THEORY Reals"),
                        })
                    }
                };
                self.sorts.fix(me, &sort, *loc, &describe(t))?;
            }
            RawTerm::Call { name, args, loc } => {
                let tys = args.iter().map(|a| self.walk(a, vars)).collect::<Result<Vec<_>, _>>()?;
                if let Some((f, _)) = self.declared.get(name) {
                    if f.arity() != args.len() {
                        return Err(SortError::Arity {
                            symbol: name.clone(),
                            loc: *loc,
                            expected: f.arity(),
                            found: args.len(),
                        });
                    }
                    for ((ty, a), s) in tys.iter().zip(args).zip(f.arg_sorts()) {
                        self.sorts.fix(*ty, s, a.loc(), &describe(a))?;
                    }
                    self.sorts.fix(me, f.sort(), *loc, &describe(t))?;
                } else {
                    if let Some(first) = self.var_names.get(name) {
                        return Err(SortError::Invalid {
                            loc: *loc,
                            message: format!("`{name}` is used as a function symbol here and as a variable at {first}"),
                        });
                    }
                    if !self.inferred.contains_key(name) {
                        let args = (0..tys.len()).map(|_| self.sorts.fresh()).collect();
                        let result = self.sorts.fresh();
                        self.inferred.insert(name.clone(), Inferred { args, result, loc: *loc });
                    }
                    let inf = &self.inferred[name];
                    if inf.args.len() != tys.len() {
                        return Err(SortError::Arity {
                            symbol: name.clone(),
                            loc: *loc,
                            expected: inf.args.len(),
                            found: tys.len(),
                        });
                    }
                    let (sig_args, sig_result) = (inf.args.clone(), inf.result);
                    for ((ty, a), s) in tys.iter().zip(args).zip(sig_args) {
                        self.sorts.union(s, *ty, &describe(a))?;
                    }
                    self.sorts.union(sig_result, me, &describe(t))?;
                }
            }
            RawTerm::Neg { arg, loc } => {
                let a = self.walk(arg, vars)?;
                self.sorts.fix(a, &num, arg.loc(), &describe(arg))?;
                self.sorts.fix(me, &num, *loc, &describe(t))?;
            }
            RawTerm::Not { arg, loc } => {
                let a = self.walk(arg, vars)?;
                self.sorts.fix(a, &boolean, arg.loc(), &describe(arg))?;
                self.sorts.fix(me, &boolean, *loc, &describe(t))?;
            }
            RawTerm::Binary { op, lhs, rhs, loc } => {
                let l = self.walk(lhs, vars)?;
                let r = self.walk(rhs, vars)?;
                let (operand, result) = match op {
                    RawBinOp::Neq | RawBinOp::Op(Op::Eq) => (None, boolean),
                    RawBinOp::Op(Op::And | Op::Or | Op::Implies) => (Some(boolean.clone()), boolean),
                    RawBinOp::Op(Op::Add | Op::Sub | Op::Mul) => (Some(num.clone()), num),
                    RawBinOp::Op(_) => (Some(num), boolean),
                };
                if *op == RawBinOp::Op(Op::Mul) && !is_numeral(lhs) && !is_numeral(rhs) {
                    self.nonlinear = true;
                }
                match operand {
                    Some(s) => {
                        self.sorts.fix(l, &s, lhs.loc(), &describe(lhs))?;
                        self.sorts.fix(r, &s, rhs.loc(), &describe(rhs))?;
                    }
                    None => {
                        self.sorts.union(l, r, &describe(rhs))?;
                        self.equalities.push((l, *loc));
                    }
                }
                self.sorts.fix(me, &result, *loc, &describe(t))?;
            }
        }
        Ok(me)
    }

    fn rule(&mut self, rule: &RawRule) -> Result<(), SortError> {
        let mut vars = HashMap::new();
        let l = self.walk(&rule.lhs, &mut vars)?;
        let r = self.walk(&rule.rhs, &mut vars)?;
        self.sorts.union(l, r, "right-hand side")?;
        if let Some(c) = &rule.constraint {
            let ty = self.walk(c, &mut vars)?;
            self.sorts.fix(ty, &Sort::boolean(), c.loc(), "constraint")?;
        }
        Ok(())
    }
}

struct Builder<'a> {
    ctx: Ctx<'a>,
    default: Sort,
    symbols: BTreeMap<String, Arc<FunSym>>,
}

impl Builder<'_> {
    fn sort_of(&mut self, t: &RawTerm) -> Sort {
        let id = self.ctx.node[&key(t)];
        self.ctx.sorts.resolved(id, &self.default)
    }

    fn build(&mut self, t: &RawTerm) -> Term {
        match t {
            RawTerm::Ident { name, .. } => match self.symbols.get(name) {
                Some(f) => Term::constant(f),
                None => {
                    let sort = self.sort_of(t);
                    Term::Var(Var::new(name, sort))
                }
            },
            RawTerm::Lit { lit, .. } => Term::Val(match lit {
                RawLit::Int(n) => self.ctx.kind.numeral(n.clone()),
                RawLit::Bool(b) => Value::Bool(*b),
                RawLit::Rat(r) => value_of(r).expect("checked during inference"),
            }),
            RawTerm::Call { name, args, .. } => {
                let args = args.iter().map(|a| self.build(a)).collect();
                Term::app_unchecked(self.symbols[name].clone(), args)
            }
            RawTerm::Neg { arg, .. } => {
                let a = self.build(arg);
                Term::App(op_symbol(Op::Neg, &a.sort()), vec![a])
            }
            RawTerm::Not { arg, .. } => Term::not(self.build(arg)),
            RawTerm::Binary { op, lhs, rhs, .. } => {
                let (l, r) = (self.build(lhs), self.build(rhs));
                match op {
                    RawBinOp::Op(op) => Term::op(*op, vec![l, r]),
                    RawBinOp::Neq => Term::not(Term::eq(l, r)),
                }
            }
        }
    }
}

const RESERVED_NAMES: &[&str] = &["true", "false", "not"];

pub fn infer_sorts(raw: &RawSystem) -> Result<Lctrs, SortError> {
    let kind = match &raw.theory {
        Some((name, loc)) => {
            TheoryKind::from_str(name).map_err(|message| SortError::Invalid { loc: *loc, message })?
        }
        None => TheoryKind::Ints,
    };
    let logic = match &raw.logic {
        Some((name, loc)) => Some(Logic::from_str(name).map_err(|message| SortError::Invalid { loc: *loc, message })?),
        None => None,
    };
    let default = match &raw.default_sort {
        Some((name, _)) => Sort::new(name),
        None => kind.numeric_sort(),
    };

    let mut declared = BTreeMap::new();
    for d in &raw.declarations {
        if RESERVED_NAMES.contains(&d.name.as_str()) {
            return Err(SortError::Invalid { loc: d.loc, message: format!("`{}` cannot be declared", d.name) });
        }
        if let Some((_, first)) = declared.get(&d.name) {
            return Err(SortError::Invalid {
                loc: d.loc,
                message: format!("`{}` is already declared at {first}", d.name),
            });
        }
        let args = d.args.iter().map(|s| Sort::new(s)).collect();
        declared.insert(d.name.clone(), (FunSym::term(&d.name, args, Sort::new(&d.sort)), d.loc));
    }

    let mut ctx = Ctx {
        kind,
        sorts: Sorts::default(),
        declared: &declared,
        inferred: BTreeMap::new(),
        var_names: BTreeMap::new(),
        node: HashMap::new(),
        equalities: Vec::new(),
        nonlinear: false,
    };
    for rule in &raw.rules {
        ctx.rule(rule)?;
    }
    for (ty, loc) in ctx.equalities.clone() {
        let sort = ctx.sorts.resolved(ty, &default);
        if !sort.is_theory() {
            return Err(SortError::Invalid { loc, message: format!("`=` compares terms of non-theory sort {sort}") });
        }
    }

    let mut symbols: BTreeMap<String, Arc<FunSym>> =
        declared.iter().map(|(n, (f, _))| (n.clone(), f.clone())).collect();
    let inferred: Vec<(String, Vec<usize>, usize)> =
        ctx.inferred.iter().map(|(n, i)| (n.clone(), i.args.clone(), i.result)).collect();
    for (name, args, result) in inferred {
        let args = args.into_iter().map(|a| ctx.sorts.resolved(a, &default)).collect();
        let result = ctx.sorts.resolved(result, &default);
        symbols.insert(name.clone(), FunSym::term(&name, args, result));
    }

    let logic = logic.unwrap_or(match kind {
        TheoryKind::Reals => Logic::QF_LRA,
        TheoryKind::Ints if ctx.nonlinear => Logic::QF_NIA,
        TheoryKind::Ints => Logic::QF_LIA,
    });

    let mut b = Builder { ctx, default: default.clone(), symbols };
    let rules = raw
        .rules
        .iter()
        .map(|r| {
            let lhs = b.build(&r.lhs);
            let rhs = b.build(&r.rhs);
            let constraint = r.constraint.as_ref().map(|c| b.build(c)).unwrap_or_else(Term::tt);
            Rule::new(lhs, rhs, constraint)
        })
        .collect();

    Ok(Lctrs {
        theory: Theory::new(kind, logic),
        signature: Signature::from_symbols(b.symbols.into_values()),
        rules,
        solver: raw.solver.clone(),
        default_sort: raw.default_sort.as_ref().map(|(s, _)| Sort::new(s)),
    })
}
