//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite list of terms `w^e * c` with strictly
//! decreasing exponents and positive coefficients. The empty list is `0`.
//! Exponents are themselves ordinals, so every ordinal below epsilon-zero
//! has exactly one representation, and comparison is lexicographic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// One Cantor-normal-form summand `w^exponent * coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("exponents must be strictly decreasing (term {index})")]
    NotDescending { index: usize },
    #[error("coefficient of term {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from(1u64)
    }

    /// `w`
    pub fn omega() -> Self {
        omega_pow(&Self::one())
    }

    /// Builds an ordinal from terms, checking the canonical-form invariants.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, OrdinalError> {
        for (index, term) in terms.iter().enumerate() {
            if term.coefficient.is_zero() {
                return Err(OrdinalError::ZeroCoefficient { index });
            }
            if index > 0 && terms[index - 1].exponent <= term.exponent {
                return Err(OrdinalError::NotDescending { index });
            }
        }
        Ok(Ordinal { terms })
    }

    /// `w^e * c` as a single term (zero if `c == 0`).
    pub fn monomial(exponent: Ordinal, coefficient: impl Into<BigUint>) -> Self {
        let coefficient = coefficient.into();
        if coefficient.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term { exponent, coefficient }],
        }
    }

    /// `w^(n-1)*digits[0] + ... + w*digits[n-2] + digits[n-1]`: finite exponents
    /// given most-significant first.
    pub fn from_digits(digits: &[u64]) -> Self {
        let n = digits.len();
        let terms = digits
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| Term {
                exponent: Ordinal::from((n - 1 - i) as u64),
                coefficient: BigUint::from(c),
            })
            .collect();
        Ordinal { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The value as a machine integer, if the ordinal is finite and fits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// Leading exponent; `None` for zero.
    pub fn degree(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::monomial(Ordinal::zero(), n)
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Ordinal::monomial(Ordinal::zero(), n)
    }
}

/// Total order on canonical forms.
pub fn ord_compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    for (x, y) in a.terms.iter().zip(&b.terms) {
        match ord_compare(&x.exponent, &y.exponent) {
            Ordering::Equal => {}
            other => return other,
        }
        match x.coefficient.cmp(&y.coefficient) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.terms.len().cmp(&b.terms.len())
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        ord_compare(self, other)
    }
}

pub fn ord_add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let Some(lead) = b.terms.first() else {
        return a.clone();
    };
    let mut terms: Vec<Term> = Vec::with_capacity(a.terms.len() + b.terms.len());
    let mut rest = b.terms.iter();
    for t in &a.terms {
        match t.exponent.cmp(&lead.exponent) {
            Ordering::Greater => terms.push(t.clone()),
            Ordering::Equal => {
                terms.push(Term {
                    exponent: t.exponent.clone(),
                    coefficient: &t.coefficient + &lead.coefficient,
                });
                rest.next();
                break;
            }
            Ordering::Less => break,
        }
    }
    terms.extend(rest.cloned());
    Ordinal { terms }
}

pub fn ord_mul(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let Some(a_lead) = a.terms.first() else {
        return Ordinal::zero();
    };
    // a * (w^e1 c1 + w^e2 c2 + ...) = a*w^e1*c1 + a*w^e2*c2 + ...
    let mut acc = Ordinal::zero();
    for t in &b.terms {
        let part = if t.exponent.is_zero() {
            let mut terms = a.terms.clone();
            terms[0].coefficient = &a_lead.coefficient * &t.coefficient;
            Ordinal { terms }
        } else {
            Ordinal::monomial(ord_add(&a_lead.exponent, &t.exponent), t.coefficient.clone())
        };
        acc = ord_add(&acc, &part);
    }
    acc
}

/// `w^a`
pub fn omega_pow(a: &Ordinal) -> Ordinal {
    Ordinal::monomial(a.clone(), 1u64)
}

impl std::ops::Add for &Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: &Ordinal) -> Ordinal {
        ord_add(self, rhs)
    }
}

impl std::ops::Mul for &Ordinal {
    type Output = Ordinal;
    fn mul(self, rhs: &Ordinal) -> Ordinal {
        ord_mul(self, rhs)
    }
}

// Printing: `w^w*2 + w*3 + 1`. Exponents that are a plain natural number or
// exactly `w` are written bare, anything else is braced.
impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent != Ordinal::one() {
                if t.exponent.is_finite() || t.exponent == Ordinal::omega() {
                    write!(f, "^{}", t.exponent)?;
                } else {
                    write!(f, "^{{{}}}", t.exponent)?;
                }
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let value = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(value)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> OrdinalError {
        OrdinalError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // Non-canonical input such as `1 + w` is accepted and normalised by
    // ordinal addition.
    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = ord_add(&acc, &t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        let base = self.atom()?;
        if self.eat(b'*') {
            let n = self.nat()?;
            return Ok(ord_mul(&base, &Ordinal::from(n)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'w') => {
                self.pos += 1;
                if self.eat(b'^') {
                    let e = self.exponent()?;
                    Ok(omega_pow(&e))
                } else {
                    Ok(Ordinal::omega())
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::from(self.nat()?)),
            _ => Err(self.error("expected `w` or a natural number")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.eat(b'{') {
            let e = self.sum()?;
            if !self.eat(b'}') {
                return Err(self.error("expected `}`"));
            }
            return Ok(e);
        }
        self.atom()
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(ord_compare(&o("w^w"), &o("w*3 + 2")), Ordering::Greater);
        assert_eq!(ord_compare(&Ordinal::zero(), &Ordinal::zero()), Ordering::Equal);
        assert_eq!(ord_compare(&o("w^{w+1}"), &o("w^w*5")), Ordering::Greater);
    }

    #[test]
    fn add_examples() {
        let w = Ordinal::omega();
        let one = Ordinal::one();
        assert_eq!(&w + &one, o("w + 1"));
        assert_eq!(&one + &w, w);
        let w1 = o("w + 1");
        assert_eq!(&w1 + &w1, o("w*2 + 1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&o("w+1") * &o("2"), o("w*2 + 1"));
        assert_eq!(&o("w^w + 7") * &Ordinal::zero(), Ordinal::zero());
        assert_eq!(&o("2") * &Ordinal::omega(), Ordinal::omega());
        assert_eq!(&o("w + 1") * &o("w"), o("w^2"));
        assert_eq!(&o("w + 1") * &o("w + 1"), o("w^2 + w + 1"));
    }

    #[test]
    fn omega_pow_examples() {
        assert_eq!(omega_pow(&Ordinal::zero()), Ordinal::one());
        assert_eq!(omega_pow(&Ordinal::one()), Ordinal::omega());
        assert_eq!(omega_pow(&Ordinal::omega()).to_string(), "w^w");
    }

    #[test]
    fn printing() {
        assert_eq!(o("w^w*2 + w*3 + 1").to_string(), "w^w*2 + w*3 + 1");
        assert_eq!(o("w^{w+1}").to_string(), "w^{w + 1}");
        assert_eq!(o("w^{w^w}").to_string(), "w^{w^w}");
        assert_eq!(o("w^2*3").to_string(), "w^2*3");
        assert_eq!(o("0").to_string(), "0");
        assert_eq!(o("3 + w^2").to_string(), "w^2");
    }

    #[test]
    fn rejects_bad_input() {
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("w + + 1".parse::<Ordinal>().is_err());
        assert!("w^{w".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
    }

    #[test]
    fn from_terms_checks_invariants() {
        let t = |e: u64, c: u64| Term {
            exponent: Ordinal::from(e),
            coefficient: BigUint::from(c),
        };
        assert!(Ordinal::from_terms(vec![t(2, 1), t(1, 3)]).is_ok());
        assert_eq!(
            Ordinal::from_terms(vec![t(1, 1), t(1, 3)]),
            Err(OrdinalError::NotDescending { index: 1 })
        );
        assert_eq!(
            Ordinal::from_terms(vec![t(1, 0)]),
            Err(OrdinalError::ZeroCoefficient { index: 0 })
        );
    }

    #[test]
    fn big_coefficients() {
        let big = o("w*18446744073709551615");
        let sum = &big + &big;
        assert_eq!(sum.to_string(), "w*36893488147419103230");
    }
}
