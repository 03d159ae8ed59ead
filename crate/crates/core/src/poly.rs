//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`RationalPoly`] lives in `Q[x1, ..., x_nvars]`. Terms are kept in a
//! `BTreeMap` keyed by exponent vector, so iteration order (and therefore
//! every printed form) is deterministic.
//!
//! Text form:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := coeff ('*' factor)* | factor ('*' factor)*
//! factor := var ('^' uint)?
//! var    := 'x' uint
//! coeff  := int ('/' uint)?
//! ```
//!
//! Whitespace is ignored and a leading sign on the first term is accepted.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponent vector of a monomial in the base variables.
pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl RationalPoly {
    pub fn zero(nvars: usize) -> Self {
        RationalPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(Rational::one(), nvars)
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Self::constant(int(c), nvars)
    }

    /// The variable `x_{index+1}` (zero-based index).
    pub fn var(index: usize, nvars: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(int(1), e)
    }

    pub fn monomial(c: Rational, exponents: Exponents) -> Self {
        let mut p = Self::zero(exponents.len());
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponents, Rational)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// The constant coefficient, if the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.constant_term())
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Adds `c * x^e` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &RationalPoly) {
        self.check_dim(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &RationalPoly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> RationalPoly {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        RationalPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul_ref(&self, other: &RationalPoly) -> RationalPoly {
        self.check_dim(other);
        let mut out = Self::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        // fast paths for constants
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> RationalPoly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Partial derivative with respect to `x_{index+1}`.
    pub fn derivative(&self, index: usize) -> RationalPoly {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let d = e[index];
            if d == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[index] -= 1;
            out.add_term(e2, c * int(d as i64));
        }
        out
    }

    /// Substitutes `x_i -> images[i]` for every variable.
    pub fn compose(&self, images: &[RationalPoly]) -> RationalPoly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = RationalPoly::constant(c.clone(), target);
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    t = t.mul_ref(&images[i].pow(d));
                }
            }
            out.add_assign_ref(&t);
        }
        out
    }

    fn check_dim(&self, other: &RationalPoly) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomials live in different rings"
        );
    }

    pub fn parse(text: &str, nvars: usize) -> Result<RationalPoly> {
        Parser::new(text, nvars).parse()
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &int(-1));
        out
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&int(-1))
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(e: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &d) in e.iter().enumerate() {
        match d {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, d)),
        }
    }
    parts.join("*")
}

impl fmt::Display for RationalPoly {
    /// Terms are printed by descending total degree, then descending exponent
    /// vector.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly({self})")
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    nvars: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize) -> Self {
        Parser {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            nvars,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i)
            .unwrap_or_else(|| self._src.len())
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digit string"))
    }

    fn small_uint(&mut self) -> Result<usize> {
        let at = self.offset();
        let v = self.uint()?;
        usize::try_from(v).map_err(|_| Error::Syntax {
            position: at,
            message: "integer too large".into(),
        })
    }

    fn parse(mut self) -> Result<RationalPoly> {
        if self.chars.is_empty() {
            return self.err("empty expression");
        }
        let mut out = RationalPoly::zero(self.nvars);
        let mut sign = int(1);
        match self.peek() {
            Some('-') => {
                sign = int(-1);
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        loop {
            let (e, c) = self.term()?;
            out.add_term(e, c * &sign);
            match self.peek() {
                None => break,
                Some('+') => sign = int(1),
                Some('-') => sign = int(-1),
                Some(c) => return self.err(format!("unexpected '{c}'")),
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponents, Rational)> {
        let mut exps = vec![0u32; self.nvars];
        let mut coeff = int(1);
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut den = BigInt::one();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let at = self.offset();
                    den = self.uint()?;
                    if den.is_zero() {
                        return Err(Error::Syntax {
                            position: at,
                            message: "zero denominator".into(),
                        });
                    }
                }
                coeff = Rational::new(num, den);
            }
            Some('x') => self.factor(&mut exps)?,
            Some(c) => return self.err(format!("unexpected '{c}'")),
            None => return self.err("unexpected end of input"),
        }
        while self.peek() == Some('*') {
            self.pos += 1;
            if self.peek() != Some('x') {
                return self.err("expected variable after '*'");
            }
            self.factor(&mut exps)?;
        }
        Ok((exps, coeff))
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<()> {
        // caller guarantees the current char is 'x'
        self.pos += 1;
        let index = self.small_uint()?;
        if index == 0 || index > self.nvars {
            return Err(Error::VariableOutOfRange {
                index,
                nvars: self.nvars,
            });
        }
        let mut power = 1u32;
        if self.peek() == Some('^') {
            self.pos += 1;
            let at = self.offset();
            power = u32::try_from(self.small_uint()?).map_err(|_| Error::Syntax {
                position: at,
                message: "exponent too large".into(),
            })?;
        }
        exps[index - 1] += power;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_mixed_terms() {
        let p = RationalPoly::parse("3/2*x1^2*x2 - x2", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coefficient(&[2, 1]), rat(3, 2));
        assert_eq!(p.coefficient(&[0, 1]), int(-1));
    }

    #[test]
    fn zero_is_empty() {
        assert!(RationalPoly::parse("0", 2).unwrap().is_zero());
        assert!(RationalPoly::parse("x1 - x1", 2).unwrap().is_zero());
    }

    #[test]
    fn out_of_range_variable() {
        assert_eq!(
            RationalPoly::parse("x3", 2),
            Err(Error::VariableOutOfRange { index: 3, nvars: 2 })
        );
        assert!(matches!(
            RationalPoly::parse("x0", 2),
            Err(Error::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match RationalPoly::parse("x1 + * x2", 2) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(RationalPoly::parse("", 2).is_err());
        assert!(RationalPoly::parse("1/0", 2).is_err());
        assert!(RationalPoly::parse("x1*3", 2).is_err());
    }

    #[test]
    fn formats_canonically() {
        let p = RationalPoly::parse("-x2 + 3/2 * x2 * x1^2", 2).unwrap();
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x2");
        assert_eq!(RationalPoly::parse("-1/2", 2).unwrap().to_string(), "-1/2");
        assert_eq!(RationalPoly::zero(2).to_string(), "0");
    }

    #[test]
    fn derivative_and_compose() {
        let p = RationalPoly::parse("x1^3*x2 + 2*x2", 2).unwrap();
        assert_eq!(p.derivative(0).to_string(), "3*x1^2*x2");
        let shifted = p.compose(&[
            RationalPoly::parse("x1 + 1", 2).unwrap(),
            RationalPoly::var(1, 2),
        ]);
        assert_eq!(shifted.to_string(), "x1^3*x2 + 3*x1^2*x2 + 3*x1*x2 + 3*x2");
    }

    fn arb_poly() -> impl Strategy<Value = RationalPoly> {
        proptest::collection::vec(((0u32..4, 0u32..4), -9i64..10, 1i64..5), 0..6).prop_map(|ts| {
            RationalPoly::from_terms(2, ts.into_iter().map(|((a, b), n, d)| (vec![a, b], rat(n, d))))
        })
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(p in arb_poly()) {
            let back = RationalPoly::parse(&p.to_string(), 2).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }
    }
}
