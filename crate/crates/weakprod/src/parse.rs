//! Minimal expression grammar for polynomial literals on the command line:
//! `+`, `-`, `*` (or juxtaposition), integer powers `^k`, variables `z` or
//! `z1..zd`, parentheses, and complex literals like `2`, `0.5i`, `1+2i`.

use crate::error::{Error, Result};
use crate::space::Poly;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Imag(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str, d: usize) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' | '\u{00b7}' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number literal '{text}'")))?;
                if i < chars.len() && chars[i] == 'i' {
                    i += 1;
                    tokens.push(Token::Imag(v));
                } else {
                    tokens.push(Token::Number(v));
                }
            }
            'i' => {
                tokens.push(Token::Imag(1.0));
                i += 1;
            }
            'z' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let idx = if i > start {
                    let text: String = chars[start..i].iter().collect();
                    let k: usize = text
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad variable index '{text}'")))?;
                    if k == 0 || k > d {
                        return Err(Error::Parse(format!(
                            "variable z{k} out of range for {d} variable(s)"
                        )));
                    }
                    k - 1
                } else {
                    0
                };
                tokens.push(Token::Var(idx));
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    d: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        self.pos += t.is_some() as usize;
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                self.term()?.scale(C64::new(-1.0, 0.0))
            }
            Some(Token::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = acc.mul(&self.power()?);
                }
                // juxtaposition: "2z", "z1 z2", ")(" etc.
                Some(Token::Number(_) | Token::Imag(_) | Token::Var(_) | Token::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let k = match self.bump() {
                Some(&Token::Number(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
                    v as u32
                }
                other => {
                    return Err(Error::Parse(format!(
                        "exponent must be a nonnegative integer, got {other:?}"
                    )))
                }
            };
            let mut acc = Poly::one(self.d);
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.bump() {
            Some(&Token::Number(v)) => Ok(Poly::constant(self.d, C64::new(v, 0.0))),
            Some(&Token::Imag(v)) => Ok(Poly::constant(self.d, C64::new(0.0, v))),
            Some(&Token::Var(i)) => Ok(Poly::variable(self.d, i)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            Some(Token::Minus) => Ok(self.atom()?.scale(C64::new(-1.0, 0.0))),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a polynomial literal in `d` variables.
pub fn parse_poly(input: &str, d: usize) -> Result<Poly> {
    if d == 0 {
        return Err(Error::Parse("need at least one variable".into()));
    }
    let tokens = tokenize(input, d)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        d,
    };
    let p = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            parser.pos
        )));
    }
    Ok(p)
}
