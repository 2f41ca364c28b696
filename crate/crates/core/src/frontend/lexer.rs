use std::fmt;

use num_bigint::BigInt;

use super::{Loc, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    /// A rational literal `a/b`, kept verbatim.
    Rat(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    LBracket,
    RBracket,
    Arrow,
    Plus,
    Minus,
    Star,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
    Neq,
    And,
    Or,
    Implies,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Rat(s) => return write!(f, "`{s}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Implies => "=>",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, Loc)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let mut word: String = chars[start..i].iter().collect();
            if word == "DEFAULT" && chars[i..].starts_with(&['-', 'S', 'O', 'R', 'T']) {
                i += 5;
                word.push_str("-SORT");
            }
            col += i - start;
            out.push((Tok::Ident(word), loc));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: String = chars[start..i].iter().collect();
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Rat(chars[start..i].iter().collect()), loc));
            } else {
                col += i - start;
                out.push((Tok::Int(num.parse().expect("digits")), loc));
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok2 = match two.as_str() {
            "->" => Some(Tok::Arrow),
            "<=" => Some(Tok::Le),
            ">=" => Some(Tok::Ge),
            "!=" => Some(Tok::Neq),
            "/\\" => Some(Tok::And),
            "\\/" => Some(Tok::Or),
            "=>" => Some(Tok::Implies),
            _ => None,
        };
        if let Some(t) = tok2 {
            out.push((t, loc));
            advance(2, &mut i, &mut col);
            continue;
        }
        let tok1 = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '=' => Tok::Eq,
            _ => return Err(ParseError { loc, message: format!("unexpected character `{c}`") }),
        };
        out.push((tok1, loc));
        advance(1, &mut i, &mut col);
    }
    out.push((Tok::Eof, Loc { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            toks("x->y /\\ 3/4 >= -2 # comment\n!= x'"),
            vec![
                Tok::Ident("x".into()),
                Tok::Arrow,
                Tok::Ident("y".into()),
                Tok::And,
                Tok::Rat("3/4".into()),
                Tok::Ge,
                Tok::Minus,
                Tok::Int(2.into()),
                Tok::Neq,
                Tok::Ident("x'".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn default_sort_keyword() {
        assert_eq!(toks("DEFAULT-SORT Int"), vec![Tok::Ident("DEFAULT-SORT".into()), Tok::Ident("Int".into()), Tok::Eof]);
    }

    #[test]
    fn locations() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!(t[1].1, Loc { line: 2, col: 3 });
        let err = tokenize("a $").unwrap_err();
        assert_eq!(err.loc, Loc { line: 1, col: 3 });
    }
}
