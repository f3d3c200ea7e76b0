use num_complex::Complex64;

use super::{Expr, Func, J};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    expected: "a decimal number".into(),
                })?;
                out.push(Token {
                    tok: Tok::Num(v),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    expected: "a number, identifier, operator or parenthesis".into(),
                })
            }
        };
        i += 1;
        out.push(Token { tok, offset: start });
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    // An exponent is only consumed when digits follow it.
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut k = i + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        if k < bytes.len() && bytes[k].is_ascii_digit() {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            i = k;
        }
    }
    i
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.peek();
        if t.tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: t.offset,
                expected: what.into(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = fold_add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = fold_sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = fold_mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = fold_div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(fold_neg(self.unary()?))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let offset = self.peek().offset;
        let exponent = self.unary()?;
        let n = integer_exponent(&exponent).ok_or(Error::NonIntegerExponent { offset })?;
        Ok(fold_pow(base, n))
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::real(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "j" => Ok(Expr::Const(J)),
                "pi" => Ok(Expr::real(std::f64::consts::PI)),
                _ => {
                    if let Some(func) = Func::from_name(&name) {
                        self.expect(Tok::LParen, "'(' after function name")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::call(func, arg))
                    } else if self.peek().tok == Tok::LParen {
                        Err(Error::UnknownFunction {
                            name,
                            offset: t.offset,
                        })
                    } else {
                        Err(Error::Syntax {
                            offset: t.offset,
                            expected: "`z`, `j`, `pi`, a number or a function call".into(),
                        })
                    }
                }
            },
            _ => Err(Error::Syntax {
                offset: t.offset,
                expected: "an expression".into(),
            }),
        }
    }
}

fn integer_exponent(e: &Expr) -> Option<i32> {
    let c = e.as_const()?;
    if c.im != 0.0 || c.re.fract() != 0.0 || c.re.abs() > i32::MAX as f64 {
        return None;
    }
    Some(c.re as i32)
}

// Parse-time folding touches constant operands only; nodes with a variable
// operand are kept exactly as written.

fn fold_add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn fold_sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn fold_mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn fold_div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != Complex64::new(0.0, 0.0) => Expr::Const(x / y),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn fold_neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Neg(Box::new(e)),
    }
}

fn fold_pow(a: Expr, n: i32) -> Expr {
    match a {
        Expr::Const(c) if n >= 0 || c != Complex64::new(0.0, 0.0) => Expr::Const(c.powi(n)),
        e => Expr::Pow(Box::new(e), n),
    }
}

/// Parses an expression in the variable `z`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(Error::Syntax {
            offset: t.offset,
            expected: "an operator or end of input".into(),
        });
    }
    Ok(e)
}
