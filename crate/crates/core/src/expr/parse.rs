//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'x'<index> | func '(' expr ')'
//!         | 'bump' '(' expr ';' number ',' number ')' | '(' expr ')'
//! func   := 'exp' | 'sin' | 'cos' | 'atan' | 'sqrt' | 'flatexp'
//! ```
//!
//! Whitespace is ignored between tokens. Variables are one-based (`x1..xN`).

use super::SmoothExpr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
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
    Semi,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let (tok, pos) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, pos));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b';' => Some(Tok::Semi),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let word = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok((Tok::Ident(word), start));
        }
        Err(Error::Syntax {
            pos: start,
            msg: format!("unexpected character `{}`", c as char),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize)> {
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(Error::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        let value = text.parse::<f64>().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("malformed number `{text}`"),
        })?;
        Ok((Tok::Num(value), start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    dim: usize,
}

/// Parse `text` into an expression over `R^dim`.
pub fn parse_expr(text: &str, dim: usize) -> Result<SmoothExpr> {
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        at: 0,
        dim,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(p.unexpected(&t.clone())),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump_tok(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, t: &Tok) -> Error {
        let msg = match t {
            Tok::End => "unexpected end of input".to_string(),
            other => format!("unexpected token {other:?}"),
        };
        Error::Syntax {
            pos: self.pos(),
            msg,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump_tok();
            Ok(())
        } else {
            Err(Error::Syntax {
                pos: self.pos(),
                msg: format!("expected {want:?}, found {:?}", self.peek()),
            })
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump_tok();
                    lhs = &lhs + &self.term()?;
                }
                Tok::Minus => {
                    self.bump_tok();
                    lhs = &lhs - &self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<SmoothExpr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump_tok();
                    lhs = &lhs * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump_tok();
                    lhs = &lhs / &self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<SmoothExpr> {
        match self.peek() {
            Tok::Minus => {
                self.bump_tok();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump_tok();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<SmoothExpr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump_tok();
        let pos = self.pos();
        let exponent = self.signed_number()?;
        if exponent.fract() != 0.0 || exponent.abs() > i32::MAX as f64 {
            return Err(Error::Syntax {
                pos,
                msg: format!("exponent must be an integer, found {exponent}"),
            });
        }
        Ok(base.powi(exponent as i32))
    }

    fn signed_number(&mut self) -> Result<f64> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump_tok();
                -1.0
            }
            Tok::Plus => {
                self.bump_tok();
                1.0
            }
            _ => 1.0,
        };
        match self.bump_tok() {
            Tok::Num(v) => Ok(sign * v),
            t => {
                self.at -= 1;
                Err(Error::Syntax {
                    pos: self.pos(),
                    msg: format!("expected a number, found {t:?}"),
                })
            }
        }
    }

    fn atom(&mut self) -> Result<SmoothExpr> {
        let pos = self.pos();
        match self.bump_tok() {
            Tok::Num(v) => Ok(SmoothExpr::constant(self.dim, v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(&name, pos),
            Tok::End => {
                self.at = self.toks.len() - 1;
                Err(self.unexpected(&Tok::End))
            }
            t => {
                self.at -= 1;
                Err(self.unexpected(&t))
            }
        }
    }

    fn identifier(&mut self, name: &str, pos: usize) -> Result<SmoothExpr> {
        if let Some(index) = name.strip_prefix('x').filter(|s| !s.is_empty()) {
            if index.bytes().all(|b| b.is_ascii_digit()) {
                let i: usize = index.parse().map_err(|_| Error::VariableOutOfRange {
                    index: usize::MAX,
                    dim: self.dim,
                })?;
                if i == 0 || i > self.dim {
                    return Err(Error::VariableOutOfRange {
                        index: i,
                        dim: self.dim,
                    });
                }
                return Ok(SmoothExpr::var(self.dim, i - 1));
            }
        }
        let func: fn(&SmoothExpr) -> SmoothExpr = match name {
            "exp" => SmoothExpr::exp,
            "sin" => SmoothExpr::sin,
            "cos" => SmoothExpr::cos,
            "atan" => SmoothExpr::atan,
            "sqrt" => SmoothExpr::sqrt,
            "flatexp" => SmoothExpr::flat_exp,
            "bump" => return self.bump_call(pos),
            _ => {
                return Err(Error::UnknownIdentifier {
                    name: name.to_string(),
                    pos,
                })
            }
        };
        self.expect(Tok::LParen)?;
        let arg = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(func(&arg))
    }

    fn bump_call(&mut self, pos: usize) -> Result<SmoothExpr> {
        self.expect(Tok::LParen)?;
        let arg = self.expr()?;
        self.expect(Tok::Semi)?;
        let a = self.signed_number()?;
        self.expect(Tok::Comma)?;
        let b = self.signed_number()?;
        self.expect(Tok::RParen)?;
        arg.bump(a, b).map_err(|_| Error::Syntax {
            pos,
            msg: format!("bump parameters must satisfy 0 <= a < b, got a={a}, b={b}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_membership() {
        assert!(parse_expr("x1^2 + x2^2 - 1", 2).is_ok());
        assert!(parse_expr("  exp( - x1 )*sin(x2)/ (3.5e-1 + cos(x1)) ", 2).is_ok());
        assert!(parse_expr("bump(x1; 1, 2)", 1).is_ok());
        assert!(parse_expr("flatexp(x1) * atan(x1) + sqrt(x1^2 + 1)", 1).is_ok());
        assert!(parse_expr("x1^-2", 1).is_ok());
    }

    #[test]
    fn variable_out_of_range() {
        assert_eq!(
            parse_expr("x3", 2).unwrap_err(),
            Error::VariableOutOfRange { index: 3, dim: 2 }
        );
        assert!(matches!(
            parse_expr("x0", 2),
            Err(Error::VariableOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse_expr("1 + tan(x1)", 1).unwrap_err(),
            Error::UnknownIdentifier {
                name: "tan".into(),
                pos: 4
            }
        );
        assert!(matches!(
            parse_expr("y1", 1),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(matches!(
            parse_expr("x1 + ", 1),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            parse_expr("x1 ) ", 1),
            Err(Error::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_expr("x1 ^ 1.5", 1),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            parse_expr("bump(x1; 2, 1)", 1),
            Err(Error::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_expr("x1 # 2", 1),
            Err(Error::Syntax { pos: 3, .. })
        ));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-x1^2 + 2*3 - 8/4/2", 1).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0 + 6.0 - 1.0);
        let e = parse_expr("(1 - x1)*(x1 + 2)", 1).unwrap();
        assert_eq!(e.eval(&[0.5]).unwrap(), 0.5 * 2.5);
    }
}
