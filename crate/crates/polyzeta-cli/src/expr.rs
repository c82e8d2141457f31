//! Front-end expression parser: the core grammar plus parenthesized
//! subexpressions and powers of sums, expanded into a plain polynomial
//! before anything else runs. `(x1+x2)^2` becomes `x1^2 + 2*x1*x2 + x2^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use polyzeta::gauss::GaussianRational;
use polyzeta::poly::LaurentPolynomial;

pub fn parse_expression(text: &str, n: usize) -> Result<LaurentPolynomial, String> {
    let mut p = ExprParser {
        bytes: text.as_bytes(),
        pos: 0,
        n,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(format!("syntax error at position {}: trailing input", p.pos));
    }
    Ok(poly)
}

struct ExprParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> ExprParser<'a> {
    fn err(&self, msg: &str) -> String {
        format!("syntax error at position {}: {}", self.pos, msg)
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

    fn expr(&mut self) -> Result<LaurentPolynomial, String> {
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
            let t = self.term()?;
            acc = if sign >= 0 { acc.add(&t) } else { acc.sub(&t) };
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

    fn term(&mut self) -> Result<LaurentPolynomial, String> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(c) if c == b'(' || c == b'x' || c == b'i' || c.is_ascii_digit() => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPolynomial, String> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.uint()?;
            if k > 64 {
                return Err(self.err("exponent too large"));
            }
            Ok(base.pow(k as u32))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<LaurentPolynomial, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(self.err("expected ')'"))
                }
            }
            Some(b'x') => {
                self.pos += 1;
                let pos = self.pos;
                let idx = self.uint()? as usize;
                if idx == 0 || idx > self.n {
                    return Err(format!(
                        "variable x{} exceeds dimension {} at position {}",
                        idx, self.n, pos
                    ));
                }
                Ok(LaurentPolynomial::variable(self.n, idx))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(LaurentPolynomial::constant(self.n, GaussianRational::i()))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let value = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let pos = self.pos;
                    let den = self.uint()?;
                    if den == 0 {
                        return Err(format!("malformed rational at position {pos}: zero denominator"));
                    }
                    BigRational::new(BigInt::from(num), BigInt::from(den))
                } else {
                    BigRational::from_integer(BigInt::from(num))
                };
                Ok(LaurentPolynomial::constant(
                    self.n,
                    GaussianRational::from_rational(value),
                ))
            }
            _ => Err(self.err("expected '(', variable, number or 'i'")),
        }
    }

    fn uint(&mut self) -> Result<u64, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("syntax error at position {start}: expected number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("number too large at position {start}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyzeta::parse::parse;

    #[test]
    fn expands_parenthesized_powers() {
        let f = parse_expression("(x1+x2)^2", 2).unwrap();
        assert_eq!(f, parse("x1^2 + 2*x1*x2 + x2^2", 2).unwrap());
    }

    #[test]
    fn core_grammar_still_parses() {
        for text in ["x1^2 + x2^3", "3/2*x1*x2^2 + i*x1", "x1 - x1"] {
            assert_eq!(
                parse_expression(text, 2).unwrap(),
                parse(text, 2).unwrap()
            );
        }
    }

    #[test]
    fn nested_expressions() {
        let f = parse_expression("(x1 + (x1+x2)^2)*x2 - x1*x2", 2).unwrap();
        assert_eq!(
            f,
            parse("x1^2*x2 + 2*x1*x2^2 + x2^3", 2).unwrap()
        );
    }

    #[test]
    fn reports_positions() {
        assert!(parse_expression("(x1+x2", 2).is_err());
        assert!(parse_expression("x3", 2).is_err());
        assert!(parse_expression("x1 + @", 2).is_err());
    }
}
