//! Canonical representation of elements of the Weyl-form algebra.
//!
//! An element is a finite sum of terms `c(x) * h^m * y^mu * dx^nu` where
//! `y^mu` is a commuting monomial in the fiber generators (it stands for the
//! symmetrized product of the corresponding derivations) and `dx^nu` is an
//! ordered exterior monomial. Every element is therefore already in its
//! unique h-series form; there is no separate normalization step.
//!
//! Each element carries a `validity`: it is exact modulo terms of W-degree
//! greater than `validity`, where the W-degree of a term is `|mu| + 2m`.
//! No stored term ever exceeds the validity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{int, Rational, RationalPoly};

/// Exponents of a commuting monomial in `y_1 .. y_{2n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FiberMonomial(Vec<u32>);

impl FiberMonomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        FiberMonomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        FiberMonomial(vec![0; dim])
    }

    pub fn var(index: usize, dim: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = 1;
        FiberMonomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &FiberMonomial) -> FiberMonomial {
        FiberMonomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `d/dy_index` of the monomial: `(multiplicity, remaining monomial)`.
    pub fn derivative(&self, index: usize) -> Option<(u32, FiberMonomial)> {
        let d = self.0[index];
        if d == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[index] -= 1;
        Some((d, FiberMonomial(e)))
    }
}

/// A basis monomial `dx_{i1} ^ ... ^ dx_{iq}` with `i1 < ... < iq`, stored as
/// a bit mask over zero-based indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FormMonomial(u32);

/// Upper bound on `2n`, imposed by the bit-mask representation of forms.
pub const MAX_DIM: usize = 32;

impl FormMonomial {
    pub const EMPTY: FormMonomial = FormMonomial(0);

    pub fn single(index: usize) -> Self {
        assert!(index < MAX_DIM);
        FormMonomial(1 << index)
    }

    /// Builds the monomial `dx_{i1} ^ dx_{i2} ^ ...` for indices in any order,
    /// returning the sign of the sorting permutation, or `None` when an index
    /// repeats.
    pub fn from_indices(indices: &[usize]) -> Option<(i32, FormMonomial)> {
        let mut acc = (1, FormMonomial::EMPTY);
        for &i in indices {
            let (s, m) = acc.1.wedge(FormMonomial::single(i))?;
            acc = (acc.0 * s, m);
        }
        Some(acc)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|&i| self.contains(i)).collect()
    }

    /// `self ^ other` in canonical order: the Koszul sign and the merged
    /// monomial, or `None` if they share an index.
    pub fn wedge(self, other: FormMonomial) -> Option<(i32, FormMonomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count inversions: pairs (i in self, j in other) with i > j
        let mut inversions = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            inversions += (self.0 >> j).count_ones();
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, FormMonomial(self.0 | other.0)))
    }

    /// Removes `dx_index` from the left: returns `(sign, rest)` with
    /// `self = sign * dx_index ^ rest`.
    pub fn remove(self, index: usize) -> Option<(i32, FormMonomial)> {
        if !self.contains(index) {
            return None;
        }
        let before = (self.0 & ((1u32 << index) - 1)).count_ones();
        let sign = if before.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, FormMonomial(self.0 & !(1 << index))))
    }
}

/// Index of a term: h-power, fiber monomial, form monomial. The derived
/// ordering is lexicographic in that order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermKey {
    pub h: u32,
    pub fiber: FiberMonomial,
    pub form: FormMonomial,
}

impl TermKey {
    pub fn new(h: u32, fiber: FiberMonomial, form: FormMonomial) -> Self {
        TermKey { h, fiber, form }
    }

    pub fn fiber_degree(&self) -> u32 {
        self.fiber.degree()
    }

    pub fn form_degree(&self) -> u32 {
        self.form.degree()
    }

    pub fn w_degree(&self) -> i32 {
        (self.fiber.degree() + 2 * self.h) as i32
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylFormElement {
    dim: usize,
    validity: i32,
    terms: BTreeMap<TermKey, RationalPoly>,
}

impl WeylFormElement {
    pub fn zero(dim: usize, validity: i32) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        WeylFormElement {
            dim,
            validity,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: RationalPoly, validity: i32) -> Self {
        let dim = p.nvars();
        let mut e = Self::zero(dim, validity);
        e.add_term(
            TermKey::new(0, FiberMonomial::one(dim), FormMonomial::EMPTY),
            p,
        );
        e
    }

    pub fn from_rational(c: Rational, dim: usize, validity: i32) -> Self {
        Self::from_poly(RationalPoly::constant(c, dim), validity)
    }

    pub fn single(key: TermKey, coeff: RationalPoly, validity: i32) -> Self {
        let mut e = Self::zero(coeff.nvars(), validity);
        e.add_term(key, coeff);
        e
    }

    /// The fiber generator `y_{index+1}`.
    pub fn y(index: usize, dim: usize, validity: i32) -> Self {
        Self::single(
            TermKey::new(0, FiberMonomial::var(index, dim), FormMonomial::EMPTY),
            RationalPoly::one(dim),
            validity,
        )
    }

    /// The one-form `dx_{index+1}`.
    pub fn dx(index: usize, dim: usize, validity: i32) -> Self {
        Self::single(
            TermKey::new(0, FiberMonomial::one(dim), FormMonomial::single(index)),
            RationalPoly::one(dim),
            validity,
        )
    }

    /// `h^power`.
    pub fn h_power(power: u32, dim: usize, validity: i32) -> Self {
        Self::single(
            TermKey::new(power, FiberMonomial::one(dim), FormMonomial::EMPTY),
            RationalPoly::one(dim),
            validity,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn validity(&self) -> i32 {
        self.validity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &RationalPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &TermKey) -> RationalPoly {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| RationalPoly::zero(self.dim))
    }

    /// Accumulates `coeff` at `key`. Terms beyond the validity are discarded
    /// and cancelled terms are removed.
    pub fn add_term(&mut self, key: TermKey, coeff: RationalPoly) {
        if coeff.is_zero() || key.w_degree() > self.validity {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&coeff);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Adds `s * coeff` at `key`.
    pub fn add_term_scaled(&mut self, key: TermKey, coeff: &RationalPoly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        self.add_term(key, coeff.scale(s));
    }

    /// Lowers the validity to `min(validity, v)`, dropping terms above it.
    pub fn truncate(&self, v: i32) -> Self {
        let validity = self.validity.min(v);
        WeylFormElement {
            dim: self.dim,
            validity,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.w_degree() <= validity)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Overrides the validity. Raising it is only sound when the caller knows
    /// the element is exact (e.g. a polynomial with no hidden tail).
    pub fn with_validity(mut self, v: i32) -> Self {
        self.validity = v;
        self.terms.retain(|k, _| k.w_degree() <= v);
        self
    }

    pub fn min_stored_degree(&self) -> Option<i32> {
        self.terms.keys().map(TermKey::w_degree).min()
    }

    pub fn max_stored_degree(&self) -> Option<i32> {
        self.terms.keys().map(TermKey::w_degree).max()
    }

    /// A lower bound for the W-degree of every term of the exact element,
    /// including the unknown tail above the validity.
    pub fn degree_lower_bound(&self) -> i32 {
        let tail = self.validity.saturating_add(1);
        self.min_stored_degree().map_or(tail, |d| d.min(tail)).max(0)
    }

    pub fn max_form_degree(&self) -> u32 {
        self.terms.keys().map(TermKey::form_degree).max().unwrap_or(0)
    }

    pub fn check_dim(&self, other: &WeylFormElement) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &WeylFormElement) -> Result<WeylFormElement> {
        self.check_dim(other)?;
        Ok(self.combine(other, &int(1)))
    }

    pub fn checked_sub(&self, other: &WeylFormElement) -> Result<WeylFormElement> {
        self.check_dim(other)?;
        Ok(self.combine(other, &int(-1)))
    }

    fn combine(&self, other: &WeylFormElement, s: &Rational) -> WeylFormElement {
        let mut out = self.truncate(other.validity);
        for (k, c) in &other.terms {
            out.add_term_scaled(k.clone(), c, s);
        }
        out
    }

    /// Multiplies every coefficient by the base polynomial `p`.
    pub fn scale(&self, p: &RationalPoly) -> WeylFormElement {
        let mut out = Self::zero(self.dim, self.validity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.mul_ref(p));
        }
        out
    }

    pub fn scale_rational(&self, s: &Rational) -> WeylFormElement {
        let mut out = Self::zero(self.dim, self.validity);
        for (k, c) in &self.terms {
            out.add_term_scaled(k.clone(), c, s);
        }
        out
    }

    /// Right exterior multiplication `self ^ form`.
    pub fn wedge_form(&self, form: FormMonomial) -> WeylFormElement {
        let mut out = Self::zero(self.dim, self.validity);
        for (k, c) in &self.terms {
            if let Some((s, merged)) = k.form.wedge(form) {
                out.add_term_scaled(TermKey::new(k.h, k.fiber.clone(), merged), c, &int(s as i64));
            }
        }
        out
    }

    /// Left exterior multiplication `form ^ self`.
    pub fn wedge_form_left(&self, form: FormMonomial) -> WeylFormElement {
        let mut out = Self::zero(self.dim, self.validity);
        for (k, c) in &self.terms {
            if let Some((s, merged)) = form.wedge(k.form) {
                out.add_term_scaled(TermKey::new(k.h, k.fiber.clone(), merged), c, &int(s as i64));
            }
        }
        out
    }

    /// The sub-sum of terms with fiber degree `p`, form degree `q`, h-power `m`.
    pub fn grade_component(&self, p: u32, q: u32, m: u32) -> WeylFormElement {
        self.filter(|k| k.fiber_degree() == p && k.form_degree() == q && k.h == m)
    }

    /// Every nonzero `(p, q, m)` component.
    pub fn components(&self) -> BTreeMap<(u32, u32, u32), WeylFormElement> {
        let mut out: BTreeMap<(u32, u32, u32), WeylFormElement> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry((k.fiber_degree(), k.form_degree(), k.h))
                .or_insert_with(|| Self::zero(self.dim, self.validity))
                .add_term(k.clone(), c.clone());
        }
        out
    }

    /// Homogeneous W-degree `w` part.
    pub fn w_component(&self, w: i32) -> WeylFormElement {
        self.filter(|k| k.w_degree() == w)
    }

    pub fn form_component(&self, q: u32) -> WeylFormElement {
        self.filter(|k| k.form_degree() == q)
    }

    pub fn filter(&self, keep: impl Fn(&TermKey) -> bool) -> WeylFormElement {
        WeylFormElement {
            dim: self.dim,
            validity: self.validity,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a per-term map producing weighted output terms.
    pub(crate) fn map_terms<F>(&self, validity: i32, mut f: F) -> WeylFormElement
    where
        F: FnMut(&TermKey, &RationalPoly, &mut WeylFormElement),
    {
        let mut out = Self::zero(self.dim, validity);
        for (k, c) in &self.terms {
            f(k, c, &mut out);
        }
        out
    }

    /// Equality of the parts both sides know: compares terms up to the lower
    /// of the two validities.
    pub fn agrees_with(&self, other: &WeylFormElement) -> bool {
        let v = self.validity.min(other.validity);
        self.dim == other.dim && self.truncate(v).terms == other.truncate(v).terms
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(k, c)| TermRecord {
                h: k.h,
                y: k.fiber.exponents().to_vec(),
                dx: k.form.indices().into_iter().map(|i| i + 1).collect(),
                coeff: c.to_string(),
            })
            .collect()
    }

    /// Rebuilds an element from serialized records. `dx` lists may be in any
    /// order; the Koszul sign of sorting is applied.
    pub fn from_records(records: &[TermRecord], dim: usize, validity: i32) -> Result<Self> {
        let mut out = Self::zero(dim, validity);
        for r in records {
            if r.y.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: r.y.len(),
                    right: dim,
                });
            }
            if let Some(&bad) = r.dx.iter().find(|&&i| i == 0 || i > dim) {
                return Err(Error::VariableOutOfRange {
                    index: bad,
                    nvars: dim,
                });
            }
            let idx: Vec<usize> = r.dx.iter().map(|i| i - 1).collect();
            let Some((sign, form)) = FormMonomial::from_indices(&idx) else {
                continue;
            };
            let coeff = RationalPoly::parse(&r.coeff, dim)?;
            out.add_term_scaled(
                TermKey::new(r.h, FiberMonomial::new(r.y.clone()), form),
                &coeff,
                &int(sign as i64),
            );
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }
}

/// Serialized form of one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub h: u32,
    pub y: Vec<u32>,
    pub dx: Vec<usize>,
    pub coeff: String,
}

impl Add for &WeylFormElement {
    type Output = WeylFormElement;
    fn add(self, rhs: &WeylFormElement) -> WeylFormElement {
        self.checked_add(rhs).expect("dimension mismatch in add")
    }
}

impl Sub for &WeylFormElement {
    type Output = WeylFormElement;
    fn sub(self, rhs: &WeylFormElement) -> WeylFormElement {
        self.checked_sub(rhs).expect("dimension mismatch in sub")
    }
}

impl Neg for &WeylFormElement {
    type Output = WeylFormElement;
    fn neg(self) -> WeylFormElement {
        self.scale_rational(&int(-1))
    }
}

impl fmt::Display for WeylFormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if k.h == 1 {
                factors.push("h".to_string());
            } else if k.h > 1 {
                factors.push(format!("h^{}", k.h));
            }
            for (i, &d) in k.fiber.exponents().iter().enumerate() {
                match d {
                    0 => {}
                    1 => factors.push(format!("y{}", i + 1)),
                    _ => factors.push(format!("y{}^{}", i + 1, d)),
                }
            }
            let form: Vec<String> = k.form.indices().iter().map(|i| format!("dx{}", i + 1)).collect();
            if !form.is_empty() {
                factors.push(form.join("^"));
            }
            // a single negative monomial coefficient is written as a subtraction
            let negative = c.num_terms() == 1 && c.terms().all(|(_, v)| v.is_negative());
            let c = if negative { -c } else { c.clone() };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let coeff = if c.num_terms() > 1 {
                format!("({c})")
            } else {
                c.to_string()
            };
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if c.as_constant().is_some_and(|v| v.is_one()) {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeylFormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; valid<={}]", self, self.validity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    const V: i32 = 8;

    fn y(i: usize) -> WeylFormElement {
        WeylFormElement::y(i, 2, V)
    }

    fn dx(i: usize) -> WeylFormElement {
        WeylFormElement::dx(i, 2, V)
    }

    #[test]
    fn wedge_examples() {
        // (y1 dx1) ^ dx2 = y1 dx1^dx2
        let e = y(0).wedge_form(FormMonomial::single(0));
        let got = e.wedge_form(FormMonomial::single(1));
        let key = TermKey::new(0, FiberMonomial::var(0, 2), FormMonomial(0b11));
        assert_eq!(got, WeylFormElement::single(key, RationalPoly::one(2), V));
        // repeated index kills the term
        assert!(e.wedge_form(FormMonomial::single(0)).is_zero());
        // dx2 ^ dx1 = -dx1^dx2
        let swapped = dx(1).wedge_form(FormMonomial::single(0));
        let key = TermKey::new(0, FiberMonomial::one(2), FormMonomial(0b11));
        assert_eq!(swapped.coefficient(&key), RationalPoly::from_int(-1, 2));
    }

    #[test]
    fn grade_component_selects() {
        let e = &y(0).wedge_form(FormMonomial::single(0)) + &WeylFormElement::h_power(1, 2, V);
        assert_eq!(e.grade_component(1, 1, 0), y(0).wedge_form(FormMonomial::single(0)));
        assert!(WeylFormElement::zero(2, V).grade_component(1, 1, 0).is_zero());
        let yy = WeylFormElement::single(
            TermKey::new(0, FiberMonomial::new(vec![1, 1]), FormMonomial::EMPTY),
            RationalPoly::one(2),
            V,
        );
        let e2 = &yy + &WeylFormElement::h_power(1, 2, V);
        assert_eq!(e2.grade_component(0, 0, 1), WeylFormElement::h_power(1, 2, V));
    }

    #[test]
    fn validity_is_min_and_truncates() {
        let a = WeylFormElement::h_power(2, 2, 5);
        let b = WeylFormElement::y(0, 2, 3);
        let s = &a + &b;
        assert_eq!(s.validity(), 3);
        assert_eq!(s, b);
        assert!(WeylFormElement::h_power(3, 2, 5).is_zero());
    }

    #[test]
    fn records_round_trip_with_sign() {
        let r = vec![TermRecord {
            h: 1,
            y: vec![2, 0],
            dx: vec![2, 1],
            coeff: "x1 + 1/2".into(),
        }];
        let e = WeylFormElement::from_records(&r, 2, V).unwrap();
        let rec = e.to_records();
        assert_eq!(rec[0].dx, vec![1, 2]);
        assert_eq!(rec[0].coeff, "-x1 - 1/2");
        assert_eq!(WeylFormElement::from_records(&rec, 2, V).unwrap(), e);
        assert_eq!(
            e.to_json(),
            r#"[{"h":1,"y":[2,0],"dx":[1,2],"coeff":"-x1 - 1/2"}]"#
        );
    }

    #[test]
    fn form_remove_sign() {
        let f = FormMonomial(0b111);
        assert_eq!(f.remove(1), Some((-1, FormMonomial(0b101))));
        assert_eq!(f.remove(0), Some((1, FormMonomial(0b110))));
        assert_eq!(FormMonomial(0b1).remove(1), None);
    }

    #[test]
    fn form_wedge_associative_over_all_subsets() {
        for a in 0u32..16 {
            for b in 0u32..16 {
                for c in 0u32..16 {
                    let (a, b, c) = (FormMonomial(a), FormMonomial(b), FormMonomial(c));
                    let left = a.wedge(b).and_then(|(s1, ab)| ab.wedge(c).map(|(s2, m)| (s1 * s2, m)));
                    let right = b.wedge(c).and_then(|(s1, bc)| a.wedge(bc).map(|(s2, m)| (s1 * s2, m)));
                    assert_eq!(left, right);
                }
            }
        }
    }

    fn arb_element() -> impl Strategy<Value = WeylFormElement> {
        proptest::collection::vec(
            (0u32..3, 0u32..3, 0u32..3, 0u32..4, -5i64..6, 0u32..3),
            0..6,
        )
        .prop_map(|ts| {
            let mut e = WeylFormElement::zero(2, V);
            for (h, a, b, form, c, xd) in ts {
                let coeff = RationalPoly::monomial(rat(c, 1), vec![xd, 0]);
                e.add_term(TermKey::new(h, FiberMonomial::new(vec![a, b]), FormMonomial(form)), coeff);
            }
            e
        })
    }

    proptest! {
        #[test]
        fn linear_structure(a in arb_element(), b in arb_element(), c in arb_element()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            let p = RationalPoly::parse("x1 + 2", 2).unwrap();
            prop_assert_eq!((&a + &b).scale(&p), &a.scale(&p) + &b.scale(&p));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn components_partition(a in arb_element()) {
            let mut sum = WeylFormElement::zero(2, V);
            for ((p, q, m), comp) in a.components() {
                prop_assert_eq!(comp.grade_component(p, q, m), comp.clone());
                sum = &sum + &comp;
            }
            prop_assert_eq!(sum, a.clone());
            for (k, _) in a.terms() {
                prop_assert!(k.w_degree() <= a.validity());
            }
        }
    }
}
