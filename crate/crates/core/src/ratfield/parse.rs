//! Precedence-climbing parser for rational expressions in `x1..x8`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Poly, RatFunc, MAXV};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Op(char),
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[start..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| Error::Parse(t.clone()))?));
        } else if c == 'x' {
            i += 1;
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[start..i].iter().collect();
            let k: usize = t.parse().map_err(|_| Error::Parse(format!("bad variable x{t}")))?;
            if k == 0 || k > MAXV {
                return Err(Error::Parse(format!("variable x{k} out of range")));
            }
            out.push(Tok::Var(k - 1));
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self, min_prec: u8) -> Result<RatFunc> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op(c)) => *c,
                _ => break,
            };
            let prec = match op {
                '+' | '-' => 1,
                '*' | '/' => 2,
                _ => 3,
            };
            if prec < min_prec {
                break;
            }
            self.next();
            if op == '^' {
                let e = self.exponent()?;
                lhs = lhs.pow(e)?;
                continue;
            }
            let rhs = self.expr(prec + 1)?;
            lhs = match op {
                '+' => lhs.checked_add(&rhs),
                '-' => lhs.checked_sub(&rhs),
                '*' => lhs.checked_mul(&rhs),
                _ => lhs.checked_div(&rhs)?,
            };
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<i32> {
        let mut sign = 1;
        let mut parens = false;
        if self.peek() == Some(&Tok::LParen) {
            parens = true;
            self.next();
        }
        if self.peek() == Some(&Tok::Op('-')) {
            sign = -1;
            self.next();
        }
        let e = match self.next() {
            Some(Tok::Num(k)) => i32::try_from(k).map_err(|_| Error::Parse("exponent too large".into()))?,
            t => return Err(Error::Parse(format!("expected exponent, got {t:?}"))),
        };
        if parens && self.next() != Some(Tok::RParen) {
            return Err(Error::Parse("unbalanced parentheses in exponent".into()));
        }
        Ok(sign * e)
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.next();
            return Ok(self.expr(2)?.neg());
        }
        if self.peek() == Some(&Tok::Op('+')) {
            self.next();
            return self.expr(2);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.next() {
            Some(Tok::Num(k)) => Ok(RatFunc::constant(BigRational::from_integer(k))),
            Some(Tok::Var(v)) => Ok(RatFunc::from_poly(Poly::var(v))),
            Some(Tok::LParen) => {
                let e = self.expr(1)?;
                if self.next() != Some(Tok::RParen) {
                    return Err(Error::Parse("unbalanced parentheses".into()));
                }
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

pub fn parse(s: &str) -> Result<RatFunc> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let r = p.expr(1)?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse("1 + 2*3").unwrap(), RatFunc::from_int(7));
        assert_eq!(parse("-2^2").unwrap(), RatFunc::from_int(-4));
        assert_eq!(parse("2^-1").unwrap().to_string(), "1/2");
        assert_eq!(parse("(x1)^(-1)").unwrap(), parse("1/x1").unwrap());
        assert_eq!(parse("x1 - x2 - x3").unwrap(), parse("x1 - (x2 + x3)").unwrap());
        assert!(parse("x1 +").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("x9").is_err());
    }
}
