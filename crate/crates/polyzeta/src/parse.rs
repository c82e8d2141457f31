//! Recursive-descent parser for the core polynomial grammar.
//!
//! ```text
//! expr     := ('+'|'-')? term (('+'|'-') term)*
//! term     := coef ('*'? monomial)? | monomial
//! monomial := var ('^' uint)? ('*' var ('^' uint)?)*
//! var      := 'x' uint
//! coef     := rational | rational '*'? 'i' | 'i'
//!           | '(' rational ('+'|'-') rational '*'? 'i' ')'
//! rational := int ('/' uint)?
//! ```
//!
//! Variables are `x1..xn` with `n` given explicitly. Syntax errors carry the
//! byte position where parsing failed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::gauss::GaussianRational;
use crate::poly::{ExponentVector, LaurentPolynomial};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} exceeds dimension {n} at position {pos}")]
    VariableOutOfRange { pos: usize, index: usize, n: usize },
    #[error("malformed rational at position {pos}: {msg}")]
    MalformedRational { pos: usize, msg: String },
}

/// Parses `text` as a polynomial in `x1..xn`, combining like terms.
pub fn parse(text: &str, n: usize) -> Result<LaurentPolynomial, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        n,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentPolynomial, ParseError> {
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        let mut acc = LaurentPolynomial::zero(self.n);
        loop {
            let term = self.term()?;
            acc = if sign >= 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPolynomial, ParseError> {
        match self.peek() {
            Some(b'x') => {
                let exp = self.monomial()?;
                Ok(LaurentPolynomial::monomial(exp, GaussianRational::one()))
            }
            Some(c) if c.is_ascii_digit() || c == b'(' || c == b'i' => {
                let coef = self.coef()?;
                // optional '*' followed by a monomial
                let save = self.pos;
                let star = self.eat(b'*');
                if self.peek() == Some(b'x') {
                    let exp = self.monomial()?;
                    Ok(LaurentPolynomial::monomial(exp, coef))
                } else {
                    if star {
                        self.pos = save;
                        return Err(self.syntax("expected variable after '*'"));
                    }
                    Ok(LaurentPolynomial::monomial(
                        ExponentVector::zero(self.n),
                        coef,
                    ))
                }
            }
            _ => Err(self.syntax("expected coefficient or variable")),
        }
    }

    fn monomial(&mut self) -> Result<ExponentVector, ParseError> {
        let mut exp = vec![0i64; self.n];
        loop {
            let (idx, k) = self.var_power()?;
            exp[idx - 1] += k;
            // '*' continues the monomial only when followed by a variable
            let save = self.pos;
            if self.eat(b'*') {
                if self.peek() == Some(b'x') {
                    continue;
                }
                self.pos = save;
            }
            break;
        }
        Ok(ExponentVector(exp))
    }

    fn var_power(&mut self) -> Result<(usize, i64), ParseError> {
        if !self.eat(b'x') {
            return Err(self.syntax("expected variable"));
        }
        let pos = self.pos;
        let idx = self.uint()? as usize;
        if idx == 0 || idx > self.n {
            return Err(ParseError::VariableOutOfRange {
                pos,
                index: idx,
                n: self.n,
            });
        }
        let k = if self.eat(b'^') {
            self.uint()? as i64
        } else {
            1
        };
        Ok((idx, k))
    }

    fn coef(&mut self) -> Result<GaussianRational, ParseError> {
        match self.peek() {
            Some(b'i') => {
                self.pos += 1;
                Ok(GaussianRational::i())
            }
            Some(b'(') => {
                self.pos += 1;
                let re_neg = self.eat(b'-');
                let mut re = self.rational()?;
                if re_neg {
                    re = -re;
                }
                let sign = match self.peek() {
                    Some(b'+') => 1,
                    Some(b'-') => -1,
                    _ => return Err(self.syntax("expected '+' or '-' in complex coefficient")),
                };
                self.pos += 1;
                let mut im = if self.peek() == Some(b'i') {
                    BigRational::one()
                } else {
                    let r = self.rational()?;
                    self.eat(b'*');
                    r
                };
                if !self.eat(b'i') {
                    return Err(self.syntax("expected 'i' in complex coefficient"));
                }
                if sign < 0 {
                    im = -im;
                }
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(GaussianRational::new(re, im))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational()?;
                // rational '*'? 'i'
                let save = self.pos;
                let star = self.eat(b'*');
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    Ok(GaussianRational::new(BigRational::from_integer(0.into()), r))
                } else {
                    if star {
                        self.pos = save;
                    }
                    Ok(GaussianRational::from_rational(r))
                }
            }
            _ => Err(self.syntax("expected coefficient")),
        }
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let num = self.uint()?;
        if self.eat(b'/') {
            let pos = self.pos;
            let den = self.uint()?;
            if den == 0 {
                return Err(ParseError::MalformedRational {
                    pos,
                    msg: "zero denominator".to_string(),
                });
            }
            Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Ok(BigRational::from_integer(BigInt::from(num)))
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::Syntax {
                pos: start,
                msg: "expected number".to_string(),
            });
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<u64>().map_err(|_| ParseError::MalformedRational {
            pos: start,
            msg: "number too large".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ExponentVector;

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn direct_reading() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        assert_eq!(f.support(), vec![ev(&[0, 3]), ev(&[2, 0])]);
        assert_eq!(f.coefficient(&ev(&[2, 0])), GaussianRational::from_int(1));
    }

    #[test]
    fn cancellation_gives_zero() {
        let f = parse("x1 - x1", 1).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn rational_and_imaginary_coefficients() {
        let f = parse("3/2*x1*x2^2 + i*x1", 2).unwrap();
        assert_eq!(f.coefficient(&ev(&[1, 2])), GaussianRational::from_ratio(3, 2));
        assert_eq!(f.coefficient(&ev(&[1, 0])), GaussianRational::i());
    }

    #[test]
    fn complex_parenthesized_coefficient() {
        let f = parse("(1/2-3*i)*x1 + (2+i)", 1).unwrap();
        assert_eq!(
            f.coefficient(&ev(&[1])),
            GaussianRational::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::from_integer((-3).into())
            )
        );
        assert_eq!(
            f.coefficient(&ev(&[0])),
            GaussianRational::new(
                BigRational::from_integer(2.into()),
                BigRational::one()
            )
        );
    }

    #[test]
    fn error_positions() {
        match parse("x1 + @", 1) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("x3", 2) {
            Err(ParseError::VariableOutOfRange { index, n, .. }) => {
                assert_eq!((index, n), (3, 2));
            }
            other => panic!("expected out-of-range error, got {other:?}"),
        }
        assert!(parse("1/0*x1", 1).is_err());
    }

    #[test]
    fn implicit_multiplication_and_signs() {
        let f = parse("-2x1 + 3 x2", 2).unwrap();
        assert_eq!(f.coefficient(&ev(&[1, 0])), GaussianRational::from_int(-2));
        assert_eq!(f.coefficient(&ev(&[0, 1])), GaussianRational::from_int(3));
    }

    #[test]
    fn repeated_variable_in_monomial() {
        let f = parse("x1*x1^2", 1).unwrap();
        assert_eq!(f.support(), vec![ev(&[3])]);
    }
}
