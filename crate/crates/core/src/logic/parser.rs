//! Recursive-descent parser for the concrete formula syntax.
//!
//! Precedence from tightest: unary operators, `&`, `|`, `->` (right
//! associative).

use thiserror::Error;

use super::ast::Formula;
use crate::cset::is_reserved;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    At,
    Hash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Always,
    Eventually,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::End => "end of input".into(),
            t => format!(
                "`{}`",
                match t {
                    Tok::At => "@",
                    Tok::Hash => "#",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Comma => ",",
                    Tok::Bang => "!",
                    Tok::Amp => "&",
                    Tok::Pipe => "|",
                    Tok::Arrow => "->",
                    Tok::Always => "[]",
                    Tok::Eventually => "<>",
                    Tok::Ident(_) | Tok::End => unreachable!(),
                }
            ),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |next: u8| bytes.get(i + 1) == Some(&next);
        let tok = match c {
            b'@' => Tok::At,
            b'#' => Tok::Hash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b']' => Tok::RBracket,
            b'[' if two(b']') => {
                i += 1;
                Tok::Always
            }
            b'[' => Tok::LBracket,
            b'<' if two(b'>') => {
                i += 1;
                Tok::Eventually
            }
            b'-' if two(b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character `{}`", ch),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected {}, found {}", what, t.describe())),
        }
    }

    /// Comma-separated agent names up to (not including) `close`.
    fn agent_list(&mut self, close: Tok, allow_empty: bool) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == close && allow_empty {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.ident("agent name")?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(out);
                }
                t => return self.error(format!("expected `,` or {}, found {}", close.describe(), t.describe())),
            }
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Ident(kw) if kw == "X" => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Ident(kw) if matches!(kw.as_str(), "K" | "Khat") => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let agent = self.ident("agent name")?;
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(if kw == "K" {
                    Formula::k(&agent, body)
                } else {
                    Formula::khat(&agent, body)
                })
            }
            Tok::Ident(kw) if matches!(kw.as_str(), "C" | "D" | "Dhat") => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let agents = self.agent_list(Tok::RBracket, false)?;
                let body = Box::new(self.unary()?);
                Ok(match kw.as_str() {
                    "C" => Formula::C(agents, body),
                    "D" => Formula::D(agents, body),
                    _ => Formula::Dhat(agents, body),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Hash => {
                self.bump();
                let name = self.ident("predicate name")?;
                self.expect(Tok::LParen)?;
                let agents = self.agent_list(Tok::RParen, true)?;
                Ok(Formula::Pred { name, agents })
            }
            Tok::Ident(kw) => match kw.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "dead" | "alive" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let agents = self.agent_list(Tok::RParen, false)?;
                    Ok(if kw == "dead" {
                        Formula::dead_set(&agents)
                    } else {
                        Formula::alive_set(&agents)
                    })
                }
                _ => {
                    let name = self.ident("formula")?;
                    if *self.peek() == Tok::At {
                        self.bump();
                        let agent = self.ident("agent name")?;
                        Ok(Formula::Atom { agent, name })
                    } else {
                        Ok(Formula::AtomAny(name))
                    }
                }
            },
            t => self.error(format!("expected a formula, found {}", t.describe())),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knowledge_of_an_atom() {
        assert_eq!(
            parse("K[a] (in1@b)").unwrap(),
            Formula::k("a", Formula::atom("b", "in1"))
        );
    }

    #[test]
    fn consensus_shape() {
        let f = parse("<> (C[a,b,c] (x0) & C[a,b,c] (x1))").unwrap();
        let c = |x: &str| Formula::c(&["a", "b", "c"], Formula::AtomAny(x.into()));
        assert_eq!(f, Formula::eventually(Formula::and(c("x0"), c("x1"))));
    }

    #[test]
    fn implication_of_negations() {
        let nk = Formula::not(Formula::k("a", Formula::atom("a", "p")));
        assert_eq!(
            parse("!K[a] p@a -> X !K[a] p@a").unwrap(),
            Formula::implies(nk.clone(), Formula::next(nk))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let p = || Formula::AtomAny("p".into());
        let q = || Formula::AtomAny("q".into());
        let r = || Formula::AtomAny("r".into());
        assert_eq!(parse("p | q & r").unwrap(), Formula::or(p(), Formula::and(q(), r())));
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p(), Formula::implies(q(), r()))
        );
        assert_eq!(parse("!p & q").unwrap(), Formula::and(Formula::not(p()), q()));
    }

    #[test]
    fn derived_operators_expand() {
        assert_eq!(parse("dead(a)").unwrap(), Formula::k("a", Formula::False));
        assert_eq!(parse("alive(a)").unwrap(), Formula::khat("a", Formula::True));
        assert_eq!(parse("alive(a,b)").unwrap(), Formula::dhat(&["a", "b"], Formula::True));
        assert_eq!(
            parse("dead(a,b)").unwrap(),
            Formula::and(Formula::dead("a"), Formula::dead("b"))
        );
        assert_eq!(
            parse("#agree()").unwrap(),
            Formula::Pred {
                name: "agree".into(),
                agents: vec![]
            }
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("K[a] (p@a").unwrap_err();
        assert_eq!(e.position, 9);
        let e = parse("p & $").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse("K p").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse("C[] p").is_err());
        assert!(parse("p q").is_err());
        assert!(parse("X@a").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "K[a] (in1@b)",
            "<> (C[a,b,c] (x0) & C[a,b,c] (x1))",
            "!K[a] p@a -> X !K[a] p@a",
            "[] (p -> q) -> [] p -> [] q",
            "Dhat[a,b] true | dead(c) & #agree(a,b)",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{}", f);
        }
    }
}
