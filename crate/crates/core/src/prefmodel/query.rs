//! Parser for argument expressions and conditional queries.
//!
//! ```text
//! query := "T(" expr ")" "=>" expr theta number
//!        | expr "=>" expr theta number
//! expr  := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "!" unary | "(" expr ")" | name
//! theta := ">=" | "<=" | ">" | "<"
//! ```

use crate::arggraph::ArgExpr;
use crate::error::{Error, Result};
use crate::fuzzy::Degree;
use crate::kb::Theta;
use crate::scalar::Scalar;

use super::ConditionalQuery;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Number(f64),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Arrow,
    Theta(Theta),
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: &str| Error::Parse {
        offset,
        message: message.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            '>' | '<' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                if eq {
                    i += 1;
                }
                Tok::Theta(match (c, eq) {
                    ('>', true) => Theta::Ge,
                    ('>', false) => Theta::Gt,
                    ('<', true) => Theta::Le,
                    _ => Theta::Lt,
                })
            }
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || matches!(bytes[i], b'.' | b'e' | b'E' | b'-' | b'+'))
                {
                    // a sign only belongs to the number right after an exponent marker
                    if matches!(bytes[i], b'-' | b'+') && !matches!(bytes[i - 1], b'e' | b'E') {
                        break;
                    }
                    i += 1;
                }
                let text = &input[start..i];
                let n = text
                    .parse()
                    .map_err(|_| err(start, &format!("bad number `{text}`")))?;
                out.push((start, Tok::Number(n)));
                continue;
            }
            c if c.is_alphanumeric() || c == '_' => {
                while i < bytes.len() {
                    let ch = input[i..].chars().next().expect("in bounds");
                    if !(ch.is_alphanumeric() || ch == '_' || ch == '-' && i > start) {
                        break;
                    }
                    i += ch.len_utf8();
                }
                out.push((start, Tok::Name(input[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = input[i..].chars().next().expect("in bounds");
                return Err(err(start, &format!("unexpected character `{ch}`")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(input)?,
            pos: 0,
            end: input.len(),
        })
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<X>(&self, message: impl Into<String>) -> Result<X> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<ArgExpr<String>> {
        let mut e = self.and()?;
        while self.eat(&Tok::Or) {
            e = ArgExpr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<ArgExpr<String>> {
        let mut e = self.unary()?;
        while self.eat(&Tok::And) {
            e = ArgExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<ArgExpr<String>> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(ArgExpr::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Name(n)) => {
                if n == "T" && self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::LParen) {
                    return self.fail("typicality is only allowed around the whole antecedent");
                }
                self.pos += 1;
                Ok(ArgExpr::Arg(n))
            }
            _ => self.fail("expected an argument name, `!` or `(`"),
        }
    }

    fn done(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }
}

/// Parses an argument expression such as `hot & !rain`.
pub fn parse_arg_expr(input: &str) -> Result<ArgExpr<String>> {
    let mut p = Parser::new(input)?;
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

/// Parses `T(<expr>) => <expr> <theta> <n>` (or the same without `T(...)`).
pub fn parse_query<T: Scalar>(input: &str) -> Result<ConditionalQuery<T>> {
    let mut p = Parser::new(input)?;
    let typicality = matches!(p.peek(), Some(Tok::Name(n)) if n == "T")
        && p.toks.get(1).map(|t| &t.1) == Some(&Tok::LParen);
    let antecedent = if typicality {
        p.pos = 2;
        let e = p.expr()?;
        p.expect(&Tok::RParen, "`)` closing the typicality operator")?;
        e
    } else {
        p.expr()?
    };
    p.expect(&Tok::Arrow, "`=>`")?;
    let consequent = p.expr()?;
    let theta = match p.peek() {
        Some(Tok::Theta(t)) => *t,
        _ => return p.fail("expected one of >=, <=, >, <"),
    };
    p.pos += 1;
    let at = p.offset();
    let n = match p.peek() {
        Some(Tok::Number(n)) => *n,
        _ => return p.fail("expected a threshold"),
    };
    p.pos += 1;
    p.done()?;
    let threshold = Degree::new(T::lit(n)).map_err(|_| Error::Parse {
        offset: at,
        message: format!("threshold {n} outside [0, 1]"),
    })?;
    Ok(ConditionalQuery {
        antecedent,
        typicality,
        consequent,
        theta,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(s: &str) -> ArgExpr<String> {
        ArgExpr::named(s)
    }

    #[test]
    fn typicality_query() {
        let q: ConditionalQuery<f64> = parse_query("T(A1) => A2 > 0.7").unwrap();
        assert!(q.typicality);
        assert_eq!(q.antecedent, name("A1"));
        assert_eq!(q.consequent, name("A2"));
        assert_eq!(q.theta, Theta::Gt);
        assert_eq!(q.threshold.value(), 0.7);
    }

    #[test]
    fn precedence_and_parentheses() {
        let e = parse_arg_expr("a | b & !c").unwrap();
        assert_eq!(
            e,
            ArgExpr::or(name("a"), ArgExpr::and(name("b"), ArgExpr::not(name("c"))))
        );
        let e = parse_arg_expr("(a | b) & c").unwrap();
        assert_eq!(
            e,
            ArgExpr::and(ArgExpr::or(name("a"), name("b")), name("c"))
        );
        assert_eq!(e.to_string(), "((a | b) & c)");
    }

    #[test]
    fn plain_inclusion_and_boolean_sides() {
        let q: ConditionalQuery<f64> = parse_query("hot & rain => !jogging <= 1e-1").unwrap();
        assert!(!q.typicality);
        assert_eq!(q.antecedent, ArgExpr::and(name("hot"), name("rain")));
        assert_eq!(q.theta, Theta::Le);
        assert_eq!(q.threshold.value(), 0.1);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_query::<f64>("T(a) => b > 1.5").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 12, .. }), "{e}");
        let e = parse_query::<f64>("T(a) => T(b) >= 0.5").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 8, .. }), "{e}");
        let e = parse_query::<f64>("T(a => b > 0.5").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 4, .. }), "{e}");
        assert!(parse_arg_expr("a &").is_err());
        assert!(parse_arg_expr("a b").is_err());
        assert!(parse_arg_expr("a $ b").is_err());
    }
}
