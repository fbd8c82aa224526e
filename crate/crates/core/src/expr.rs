//! Parser for rational-function expressions such as `t(t-1)(t-3)`,
//! `(t^2+1)/(t+2)` or `(a+1)t+3` over a finite field.
//!
//! Integers are read in the prime field, `a` is the root of the field's
//! modulus (non-prime fields only). Juxtaposition multiplies.

use crate::error::{Error, Result};
use crate::ffpoly::{FiniteField, Poly, RatFn};

struct Parser<'s> {
    s: &'s [u8],
    i: usize,
    var: u8,
    f: &'s FiniteField,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

impl<'s> Parser<'s> {
    fn peek(&mut self) -> Option<u8> {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<RatFn> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                self.term()?.neg(self.f)
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = acc.add(&self.term()?, self.f);
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = acc.sub(&self.term()?, self.f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = acc.mul(&self.power()?, self.f);
                }
                Some(b'/') => {
                    self.i += 1;
                    let d = self.power()?;
                    if d.is_zero() {
                        return err("division by zero");
                    }
                    acc = acc.div(&d, self.f)?;
                }
                Some(c) if c == b'(' || c == self.var || c == b'a' || c.is_ascii_digit() => {
                    acc = acc.mul(&self.power()?, self.f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RatFn> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let neg = if self.peek() == Some(b'-') {
                self.i += 1;
                true
            } else {
                false
            };
            let e = self.integer()? as i64;
            if neg && base.is_zero() {
                return err("negative power of zero");
            }
            return base.pow(if neg { -e } else { e }, self.f);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        self.peek();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return err(format!("expected integer at offset {start}"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse::<u64>()
            .or_else(|_| err("integer too large"))
    }

    fn atom(&mut self) -> Result<RatFn> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return err("unbalanced parenthesis");
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c == self.var => {
                self.i += 1;
                Ok(RatFn::poly(Poly::x()))
            }
            Some(b'a') => {
                if self.f.degree() == 1 {
                    return err("`a` is only defined over non-prime fields");
                }
                self.i += 1;
                Ok(RatFn::constant(self.f.generator_a()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFn::constant((n % self.f.characteristic() as u64) as u32))
            }
            Some(c) => err(format!("unexpected character `{}`", c as char)),
            None => err("unexpected end of input"),
        }
    }
}

/// Parse a rational function in the variable `var` over `f`.
pub fn parse_ratfn(s: &str, f: &FiniteField, var: char) -> Result<RatFn> {
    let mut p = Parser { s: s.as_bytes(), i: 0, var: var as u8, f };
    let out = p.expr()?;
    if p.peek().is_some() {
        return err(format!("trailing input at offset {}", p.i));
    }
    Ok(out)
}

/// Parse a polynomial; rejects proper fractions.
pub fn parse_poly(s: &str, f: &FiniteField, var: char) -> Result<Poly> {
    let r = parse_ratfn(s, f, var)?;
    if !r.den().is_one() {
        return err(format!("`{s}` is not a polynomial"));
    }
    Ok(r.num().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_powers() {
        let f = FiniteField::new(7).unwrap();
        let g = parse_poly("t(t-1)(t-3)", &f, 't').unwrap();
        assert_eq!(g.coeffs(), &[0, 3, 3, 1]);
        let g = parse_poly("-3t^2 + 2", &f, 't').unwrap();
        assert_eq!(g.coeffs(), &[2, 0, 4]);
        let r = parse_ratfn("(t^2-1)/(t+1)", &f, 't').unwrap();
        assert_eq!(r.num().coeffs(), &[6, 1]);
        let r = parse_ratfn("t^-2", &f, 't').unwrap();
        assert_eq!(r.den().coeffs(), &[0, 0, 1]);
    }

    #[test]
    fn round_trip_formatting() {
        let f = FiniteField::new(9).unwrap();
        let g = Poly::new(vec![5, 3, 1]);
        let s = f.fmt_poly(&g, "t");
        assert_eq!(parse_poly(&s, &f, 't').unwrap(), g);
    }

    #[test]
    fn rejects_garbage() {
        let f = FiniteField::new(7).unwrap();
        assert!(parse_poly("t+", &f, 't').is_err());
        assert!(parse_poly("(t", &f, 't').is_err());
        assert!(parse_poly("a", &f, 't').is_err());
        assert!(parse_poly("1/t", &f, 't').is_err());
        assert!(parse_ratfn("1/0", &f, 't').is_err());
    }
}
