use num_bigint::BigInt;

use super::lexer::{tokenize, Tok};
use super::{Loc, ParseError};
use crate::theory::Op;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawLit {
    Int(BigInt),
    Rat(String),
    Bool(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawBinOp {
    Op(Op),
    Neq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Ident { name: String, loc: Loc },
    Lit { lit: RawLit, loc: Loc },
    Call { name: String, args: Vec<RawTerm>, loc: Loc },
    Neg { arg: Box<RawTerm>, loc: Loc },
    Not { arg: Box<RawTerm>, loc: Loc },
    Binary { op: RawBinOp, lhs: Box<RawTerm>, rhs: Box<RawTerm>, loc: Loc },
}

impl RawTerm {
    pub fn loc(&self) -> Loc {
        match self {
            RawTerm::Ident { loc, .. }
            | RawTerm::Lit { loc, .. }
            | RawTerm::Call { loc, .. }
            | RawTerm::Neg { loc, .. }
            | RawTerm::Not { loc, .. }
            | RawTerm::Binary { loc, .. } => *loc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDecl {
    pub name: String,
    pub args: Vec<String>,
    pub sort: String,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRule {
    pub lhs: RawTerm,
    pub rhs: RawTerm,
    pub constraint: Option<RawTerm>,
    pub loc: Loc,
}

/// A system file as written, before sort inference.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawSystem {
    pub theory: Option<(String, Loc)>,
    pub logic: Option<(String, Loc)>,
    pub solver: Option<String>,
    pub default_sort: Option<(String, Loc)>,
    pub declarations: Vec<RawDecl>,
    pub rules: Vec<RawRule>,
}

struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
}

const KEYWORDS: &[&str] = &["THEORY", "LOGIC", "SOLVER", "DEFAULT-SORT", "SIGNATURE", "RULES"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { loc: self.loc(), message: format!("expected {expected}, found {}", self.peek()) })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Loc, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.error(&t.to_string())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Loc), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let loc = self.bump().1;
                Ok((s, loc))
            }
            _ => self.error(what),
        }
    }

    fn file(&mut self) -> Result<RawSystem, ParseError> {
        let mut sys = RawSystem::default();
        loop {
            let header = match self.peek() {
                Tok::Ident(s) if ["THEORY", "LOGIC", "SOLVER", "DEFAULT-SORT"].contains(&s.as_str()) => s.clone(),
                _ => break,
            };
            self.bump();
            let value = self.ident(&format!("a value for {header}"))?;
            self.eat(&Tok::Semi);
            match header.as_str() {
                "THEORY" => sys.theory = Some(value),
                "LOGIC" => sys.logic = Some(value),
                "SOLVER" => sys.solver = Some(value.0),
                _ => sys.default_sort = Some(value),
            }
        }
        if self.is_keyword("SIGNATURE") {
            self.bump();
            while !self.is_keyword("RULES") && *self.peek() != Tok::Eof {
                sys.declarations.push(self.decl()?);
            }
        }
        if !self.is_keyword("RULES") {
            return self.error("`RULES`");
        }
        self.bump();
        while *self.peek() != Tok::Eof {
            sys.rules.push(self.rule()?);
        }
        if sys.rules.is_empty() {
            return Err(ParseError { loc: self.loc(), message: "the system has no rules".into() });
        }
        Ok(sys)
    }

    fn decl(&mut self) -> Result<RawDecl, ParseError> {
        let (name, loc) = self.ident("a symbol name")?;
        self.expect(Tok::Colon)?;
        let mut sorts = Vec::new();
        loop {
            match self.peek() {
                Tok::Ident(_) => sorts.push(self.ident("a sort")?.0),
                Tok::Star if !sorts.is_empty() => {
                    self.bump();
                }
                Tok::Arrow => {
                    self.bump();
                    let (sort, _) = self.ident("a result sort")?;
                    self.expect(Tok::Semi)?;
                    return Ok(RawDecl { name, args: sorts, sort, loc });
                }
                Tok::Semi if sorts.len() == 1 => {
                    self.bump();
                    return Ok(RawDecl { name, args: Vec::new(), sort: sorts.pop().unwrap(), loc });
                }
                _ => return self.error("a sort, `->` or `;`"),
            }
        }
    }

    fn rule(&mut self) -> Result<RawRule, ParseError> {
        let loc = self.loc();
        let lhs = self.term(0)?;
        self.expect(Tok::Arrow)?;
        let rhs = self.term(0)?;
        let constraint = if self.eat(&Tok::LBracket) {
            let c = self.term(0)?;
            self.expect(Tok::RBracket)?;
            Some(c)
        } else {
            None
        };
        if !self.eat(&Tok::Semi) && *self.peek() != Tok::Eof {
            return self.error("`;`");
        }
        Ok(RawRule { lhs, rhs, constraint, loc })
    }

    fn infix(tok: &Tok) -> Option<(u8, bool, RawBinOp)> {
        use RawBinOp::Op as O;
        Some(match tok {
            Tok::Implies => (1, true, O(Op::Implies)),
            Tok::Or => (2, false, O(Op::Or)),
            Tok::And => (3, false, O(Op::And)),
            Tok::Le => (4, false, O(Op::Le)),
            Tok::Ge => (4, false, O(Op::Ge)),
            Tok::Lt => (4, false, O(Op::Lt)),
            Tok::Gt => (4, false, O(Op::Gt)),
            Tok::Eq => (4, false, O(Op::Eq)),
            Tok::Neq => (4, false, RawBinOp::Neq),
            Tok::Plus => (5, false, O(Op::Add)),
            Tok::Minus => (5, false, O(Op::Sub)),
            Tok::Star => (6, false, O(Op::Mul)),
            _ => return None,
        })
    }

    /// Precedence climbing over the infix operators.
    fn term(&mut self, min: u8) -> Result<RawTerm, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((prec, right, op)) = Parser::infix(self.peek()) {
            if prec < min {
                break;
            }
            let loc = self.bump().1;
            let rhs = self.term(if right { prec } else { prec + 1 })?;
            lhs = RawTerm::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), loc };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<RawTerm, ParseError> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Ok(RawTerm::Lit { lit: RawLit::Int(-n), loc })
                    }
                    Tok::Rat(r) => {
                        self.bump();
                        Ok(RawTerm::Lit { lit: RawLit::Rat(format!("-{r}")), loc })
                    }
                    _ => {
                        let arg = self.term(7)?;
                        Ok(RawTerm::Neg { arg: Box::new(arg), loc })
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.term(0)?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(RawTerm::Lit { lit: RawLit::Int(n), loc })
            }
            Tok::Rat(r) => {
                self.bump();
                Ok(RawTerm::Lit { lit: RawLit::Rat(r), loc })
            }
            Tok::Ident(_) => {
                let (name, loc) = self.ident("a term")?;
                match name.as_str() {
                    "true" => return Ok(RawTerm::Lit { lit: RawLit::Bool(true), loc }),
                    "false" => return Ok(RawTerm::Lit { lit: RawLit::Bool(false), loc }),
                    _ => {}
                }
                if *self.peek() != Tok::LParen {
                    if name == "not" {
                        return self.error("`(` after `not`");
                    }
                    return Ok(RawTerm::Ident { name, loc });
                }
                self.bump();
                let mut args = vec![self.term(0)?];
                while self.eat(&Tok::Comma) {
                    args.push(self.term(0)?);
                }
                self.expect(Tok::RParen)?;
                if name == "not" {
                    if args.len() != 1 {
                        return Err(ParseError { loc, message: "`not` takes one argument".into() });
                    }
                    return Ok(RawTerm::Not { arg: Box::new(args.pop().unwrap()), loc });
                }
                Ok(RawTerm::Call { name, args, loc })
            }
            _ => self.error("a term"),
        }
    }
}

/// Parses a system file.
pub fn parse(text: &str) -> Result<RawSystem, ParseError> {
    let toks = tokenize(text)?;
    Parser { toks, pos: 0 }.file()
}
