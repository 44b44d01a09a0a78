//! Signature-aware lexer and recursive-descent parser for terms and inequalities.
//!
//! Grammar:
//! ```text
//! ineq    := term "<=" term
//! term    := meet { "\/" meet }
//! meet    := infix { "/\" infix }
//! infix   := primary [ CONN primary ]        (binary connectives only)
//! primary := "(" term ")" | CONN "(" term { "," term } ")" | CONN "(" ")"
//!          | "top" | "bot" | ident | "#" ident | "@" ident
//! ```

use std::sync::Arc;

use thiserror::Error;

use super::signature::{Connective, Signature};
use super::term::{Inequality, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("connective `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Meet,
    Join,
    Leq,
    Conn(Arc<Connective>),
    Ident(String),
    Nominal(String),
    Conominal(String),
    End,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn ident_len(s: &str) -> usize {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return 0,
    }
    1 + chars.take_while(|&c| is_ident_char(c)).count()
}

fn lex(text: &str, sig: &Signature) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let fixed = [
            ("(", Tok::LParen),
            (")", Tok::RParen),
            (",", Tok::Comma),
            ("/\\", Tok::Meet),
            ("\\/", Tok::Join),
            ("<=", Tok::Leq),
        ];
        // Longest connective name that is a prefix and does not cut an identifier.
        let conn = sig
            .connectives()
            .filter(|k| {
                rest.starts_with(k.name.as_str()) && {
                    let last = k.name.chars().last().unwrap();
                    let next = rest[k.name.len()..].chars().next();
                    !(is_ident_char(last) && next.map(is_ident_char).unwrap_or(false))
                }
            })
            .max_by_key(|k| k.name.len());
        let ilen = ident_len(rest);
        let flen = fixed.iter().find(|(s, _)| rest.starts_with(s)).map(|(s, _)| s.len()).unwrap_or(0);
        if let Some(k) = conn {
            if k.name.len() >= ilen && k.name.len() >= flen {
                out.push((pos, Tok::Conn(k.clone())));
                pos += k.name.len();
                continue;
            }
        }
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push((pos, t.clone()));
            pos += s.len();
            continue;
        }
        if ilen > 0 {
            out.push((pos, Tok::Ident(rest[..ilen].to_string())));
            pos += ilen;
            continue;
        }
        if c == '#' || c == '@' {
            let n = ident_len(&rest[1..]);
            if n == 0 {
                return Err(ParseError::Syntax { pos, msg: format!("expected name after `{}`", c) });
            }
            let name = rest[1..1 + n].to_string();
            out.push((pos, if c == '#' { Tok::Nominal(name) } else { Tok::Conominal(name) }));
            pos += 1 + n;
            continue;
        }
        let word: String = rest.chars().take_while(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect();
        if rest[word.len()..].trim_start().starts_with('(') {
            return Err(ParseError::UnknownConnective(word));
        }
        return Err(ParseError::Syntax { pos, msg: format!("unexpected `{}`", word) });
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(&format!("expected {}", what))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.meet()?;
        while *self.peek() == Tok::Join {
            self.next();
            t = Term::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<Term, ParseError> {
        let mut t = self.infix()?;
        while *self.peek() == Tok::Meet {
            self.next();
            t = Term::meet(t, self.infix()?);
        }
        Ok(t)
    }

    fn infix(&mut self) -> Result<Term, ParseError> {
        let left = self.primary()?;
        if let Tok::Conn(c) = self.peek().clone() {
            if c.arity() != 2 {
                return self.err(&format!("`{}` cannot be used infix", c.name));
            }
            self.next();
            let right = self.primary()?;
            return Ok(Term::Apply(c, vec![left, right]));
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(n) if n == "top" => Ok(Term::Top),
            Tok::Ident(n) if n == "bot" => Ok(Term::Bottom),
            Tok::Ident(n) => {
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::UnknownConnective(n));
                }
                Ok(Term::Var(n))
            }
            Tok::Nominal(n) => Ok(Term::Nominal(n)),
            Tok::Conominal(n) => Ok(Term::Conominal(n)),
            Tok::Conn(c) => {
                if *self.peek() != Tok::LParen {
                    if c.arity() == 0 {
                        return Ok(Term::Apply(c, Vec::new()));
                    }
                    return self.err(&format!("expected `(` after `{}`", c.name));
                }
                self.next();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        args.push(self.term()?);
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                if args.len() != c.arity() {
                    return Err(ParseError::ArityMismatch {
                        name: c.name.clone(),
                        expected: c.arity(),
                        found: args.len(),
                    });
                }
                Ok(Term::Apply(c, args))
            }
            Tok::End => self.err("unexpected end of input"),
            _ => {
                self.i -= 1;
                self.err("expected a term")
            }
        }
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text, sig)?, i: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(t)
}

pub fn parse_inequality(text: &str, sig: &Signature) -> Result<Inequality, ParseError> {
    let mut p = Parser { toks: lex(text, sig)?, i: 0 };
    let lhs = p.term()?;
    p.expect(Tok::Leq, "`<=`")?;
    let rhs = p.term()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(Inequality::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::signature::{ConnectiveDecl, Family};

    fn sig() -> Signature {
        Signature::new(vec![
            ConnectiveDecl::new("->", Family::GNormal, "d1"),
            ConnectiveDecl::new("f", Family::FNormal, "11"),
            ConnectiveDecl::new("dia", Family::FNormal, "1"),
        ])
        .unwrap()
        .expand()
    }

    #[test]
    fn infix_arrow() {
        let s = sig();
        let t = parse_term("p ->( q -> r )", &s).unwrap();
        let arrow = s.get("->").unwrap();
        let expected = Term::apply(
            arrow,
            vec![Term::var("p"), Term::apply(arrow, vec![Term::var("q"), Term::var("r")])],
        );
        assert_eq!(t, expected);
        assert_eq!(parse_term("->(p, ->(q, r))", &s).unwrap(), expected);
    }

    #[test]
    fn nominals_and_constants() {
        let s = sig();
        assert_eq!(parse_term("#j1", &s).unwrap(), Term::nominal("j1"));
        assert_eq!(parse_term("@m1", &s).unwrap(), Term::conominal("m1"));
        assert_eq!(
            parse_term("top \\/ bot /\\ p", &s).unwrap(),
            Term::join(Term::Top, Term::meet(Term::Bottom, Term::var("p")))
        );
    }

    #[test]
    fn arity_and_unknown() {
        let s = sig();
        assert!(matches!(parse_term("f(p)", &s), Err(ParseError::ArityMismatch { expected: 2, found: 1, .. })));
        assert_eq!(parse_term("zz(p)", &s), Err(ParseError::UnknownConnective("zz".into())));
        assert!(matches!(parse_term("p /\\", &s), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn residual_names_lex() {
        let s = sig();
        let t = parse_term("f#1(p, q) \\/ ->b2(#j, #h)", &s).unwrap();
        assert_eq!(t.to_string(), "f#1(p, q) \\/ #j ->b2 #h");
        assert_eq!(parse_term(&t.to_string(), &s).unwrap(), t);
        // `->` followed by a variable named b2 needs whitespace.
        let u = parse_term("p -> b2x", &s).unwrap();
        assert_eq!(u.subterm(&[1]), Some(&Term::var("b2x")));
    }

    #[test]
    fn inequality() {
        let s = sig();
        let i = parse_inequality("p->(q->r) <= (p->q)->(p->r)", &s).unwrap();
        assert_eq!(i.to_string(), "p -> (q -> r) <= (p -> q) -> (p -> r)");
        assert_eq!(parse_inequality(&i.to_string(), &s).unwrap(), i);
    }
}
