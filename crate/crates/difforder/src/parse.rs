//! Input syntax for planar systems.
//!
//! A system is two assignments, separated by newlines or semicolons:
//!
//! ```text
//! # the oscillator with cubic damping
//! x1' = x2 - x1^3/3 + x1
//! x2' = -x1
//! ```
//!
//! Expressions use `+ - * / ^` with parentheses; exponents are nonnegative
//! integer literals and `#` starts a line comment.  Arithmetic is exact:
//! division is rational-function division, so `(x1^2 - x2^2)/(x1 - x2)` is
//! accepted and equals `x1 + x2`, while a right-hand side that does not
//! reduce to a polynomial is rejected.  Errors carry a line and column.

use std::fmt;

use num::BigInt;

use crate::poly::{Poly2, Var};
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::vectorfield::VectorField;

/// A syntax or semantic error with its position (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
    /// Newline or semicolon.
    Sep,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '\n' | ';' => {
                bump(&mut chars);
                out.push(Spanned {
                    tok: Tok::Sep,
                    line: tline,
                    col: tcol,
                });
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let n: BigInt = digits.parse().expect("digit run");
                out.push(Spanned {
                    tok: Tok::Num(n),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    line: tline,
                    col: tcol,
                });
            }
            _ => {
                let tok = match bump(&mut chars) {
                    '\'' => Tok::Prime,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '=' => Tok::Equals,
                    other => return err(tline, tcol, format!("unexpected character '{other}'")),
                };
                out.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Spanned, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(t) if t.tok == *want => Ok(t),
            Some(t) => err(t.line, t.col, format!("expected {what}")),
            None => err(line, col, format!("expected {what}, found end of input")),
        }
    }

    fn expression(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Plus => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.factor()?;
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Star => {
                    self.next();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    let (line, col) = self.here();
                    self.next();
                    let d = self.factor()?;
                    if d.is_zero() {
                        return err(line, col, "division by zero");
                    }
                    acc = &acc / &d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc, ParseError> {
        if let Some(t) = self.peek() {
            if t.tok == Tok::Minus {
                self.next();
                let inner = self.factor()?;
                return Ok(-&inner);
            }
            if t.tok == Tok::Plus {
                self.next();
                return self.factor();
            }
        }
        let base = self.atom()?;
        if let Some(t) = self.peek() {
            if t.tok == Tok::Caret {
                self.next();
                let (line, col) = self.here();
                match self.next() {
                    Some(Spanned {
                        tok: Tok::Num(n), ..
                    }) => {
                        let e: i64 = match TryInto::<i64>::try_into(n) {
                            Ok(e) if e >= 0 => e,
                            _ => return err(line, col, "exponent out of range"),
                        };
                        return base.powi(e).map_err(|_| ParseError {
                            line,
                            col,
                            message: "zero raised to this power is undefined".to_string(),
                        });
                    }
                    _ => return err(line, col, "expected a nonnegative integer exponent"),
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Spanned {
                tok: Tok::Num(n), ..
            }) => Ok(RatFunc::from_rat(Rat::from_integer(n))),
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                col,
            }) => match name.as_str() {
                "x1" => Ok(RatFunc::var(Var::X1)),
                "x2" => Ok(RatFunc::var(Var::X2)),
                _ => err(line, col, format!("unknown name '{name}'")),
            },
            Some(Spanned {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.expression()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(t) => err(t.line, t.col, "expected a number, variable or '('"),
            None => err(line, col, "expected an expression, found end of input"),
        }
    }
}

fn parse_single(input: &str) -> Result<RatFunc, ParseError> {
    let toks = tokenize(input)?;
    let toks: Vec<Spanned> = toks.into_iter().filter(|t| t.tok != Tok::Sep).collect();
    let mut p = Parser { toks, pos: 0 };
    let e = p.expression()?;
    if let Some(t) = p.peek() {
        return err(t.line, t.col, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses one rational-function expression.
pub fn parse_ratfunc(input: &str) -> Result<RatFunc, ParseError> {
    parse_single(input)
}

/// Parses one expression that must reduce to a polynomial.
pub fn parse_poly(input: &str) -> Result<Poly2, ParseError> {
    let e = parse_single(input)?;
    match e.to_poly() {
        Some(p) => Ok(p),
        None => err(1, 1, "expression does not reduce to a polynomial"),
    }
}

/// Parses a two-line system `x1' = ...` / `x2' = ...` (in either order).
pub fn parse_system(input: &str) -> Result<VectorField, ParseError> {
    let toks = tokenize(input)?;
    let mut p = Parser { toks, pos: 0 };
    let mut x1: Option<(Poly2, usize, usize)> = None;
    let mut x2: Option<(Poly2, usize, usize)> = None;

    loop {
        while let Some(t) = p.peek() {
            if t.tok == Tok::Sep {
                p.next();
            } else {
                break;
            }
        }
        if p.peek().is_none() {
            break;
        }
        let (line, col) = p.here();
        let name = match p.next() {
            Some(Spanned {
                tok: Tok::Ident(name),
                ..
            }) => name,
            _ => return err(line, col, "expected an assignment to x1' or x2'"),
        };
        let slot = match name.as_str() {
            "x1" => 1,
            "x2" => 2,
            _ => return err(line, col, format!("unknown component '{name}'")),
        };
        p.expect(&Tok::Prime, "''' after the component name")?;
        p.expect(&Tok::Equals, "'='")?;
        let e = p.expression()?;
        if let Some(t) = p.peek() {
            if t.tok != Tok::Sep {
                return err(t.line, t.col, "unexpected trailing input");
            }
        }
        let Some(poly) = e.to_poly() else {
            return err(
                line,
                col,
                format!("right-hand side of {name}' does not reduce to a polynomial"),
            );
        };
        let dest = if slot == 1 { &mut x1 } else { &mut x2 };
        if dest.is_some() {
            return err(line, col, format!("{name}' is assigned twice"));
        }
        *dest = Some((poly, line, col));
    }

    let (p1, l1, c1) = match x1 {
        Some(v) => v,
        None => return err(1, 1, "missing assignment to x1'"),
    };
    let (p2, _, _) = match x2 {
        Some(v) => v,
        None => return err(1, 1, "missing assignment to x2'"),
    };
    match VectorField::new(p1, p2) {
        Ok(f) => Ok(f),
        Err(_) => err(l1, c1, "x1' must be nonzero"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sample_poly;
    use crate::rat::{rat, rat_i};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x1() -> Poly2 {
        Poly2::var(Var::X1)
    }

    fn x2() -> Poly2 {
        Poly2::var(Var::X2)
    }

    #[test]
    fn oscillator_input_parses_with_comment() {
        let field = parse_system(
            "# the oscillator with cubic damping\n\
             x1' = x2 - x1^3/3 + x1\n\
             x2' = -x1\n",
        )
        .unwrap();
        let cubic = (&(&x1() * &x1()) * &x1()).scale(&rat(-1, 3));
        assert_eq!(*field.x1(), &(&x2() + &cubic) + &x1());
        assert_eq!(*field.x2(), x1().scale(&rat_i(-1)));
    }

    #[test]
    fn statements_split_on_semicolons_in_either_order() {
        let field = parse_system("x2' = x1*x2 + 1; x1' = x1").unwrap();
        assert_eq!(*field.x1(), x1());
        assert_eq!(*field.x2(), &(&x1() * &x2()) + &Poly2::one());
    }

    #[test]
    fn exact_cancellation_is_polynomial() {
        let field = parse_system("x1' = (x1^2 - x2^2)/(x1 - x2)\nx2' = 1").unwrap();
        assert_eq!(*field.x1(), &x1() + &x2());
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let p = sample_poly(&mut rng, 4, 8);
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p, "{p}");
            let q = loop {
                let q = sample_poly(&mut rng, 3, 8);
                if !q.is_zero() {
                    break q;
                }
            };
            let f = RatFunc::new(p, q).unwrap();
            assert_eq!(parse_ratfunc(&f.to_string()).unwrap(), f, "{f}");
        }
    }

    #[test]
    fn errors_carry_the_offending_position() {
        // The newline right after the dangling '+' is the offending token.
        let e = parse_system("x1' = x2 +\nx2' = 1").unwrap_err();
        assert_eq!((e.line, e.col), (1, 11));

        let e = parse_system("x1' = 1/x2\nx2' = 1").unwrap_err();
        assert!(e.message.contains("polynomial"), "{e}");
        assert_eq!(e.line, 1);

        let e = parse_system("x1' = 0\nx2' = x1").unwrap_err();
        assert!(e.message.contains("nonzero"), "{e}");

        let e = parse_system("x1' = 1\nx2' = x3").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        assert!(e.message.contains("x3"), "{e}");

        let e = parse_system("x1' = 1\nx1' = 2\nx2' = 1").unwrap_err();
        assert!(e.message.contains("twice"), "{e}");

        let e = parse_system("x1' = 1").unwrap_err();
        assert!(e.message.contains("x2"), "{e}");

        let e = parse_system("x1' = 1 % 2\nx2' = 1").unwrap_err();
        assert!(e.message.contains('%'), "{e}");

        let e = parse_ratfunc("x1/(x2 - x2)").unwrap_err();
        assert!(e.message.contains("division by zero"), "{e}");
    }

    #[test]
    fn powers_of_parenthesized_expressions_work() {
        let p = parse_poly("(x1 + x2)^3 - x1^3 - x2^3").unwrap();
        // 3 x1^2 x2 + 3 x1 x2^2.
        let expected = &(&(&x1() * &x1()) * &x2()).scale(&rat_i(3))
            + &(&(&x1() * &x2()) * &x2()).scale(&rat_i(3));
        assert_eq!(p, expected);
        let f = parse_ratfunc("(x1/x2)^2").unwrap();
        assert_eq!(f, RatFunc::new(&x1() * &x1(), &x2() * &x2()).unwrap());
    }
}
