//! Brute-force reference implementations used to cross-check the engine.
//!
//! Nothing here calls into [`crate::product`]. Elements of the enveloping
//! algebra are sums of words `y_{i1} ⋯ y_{ik}` with central polynomial
//! coefficients and powers of `h`; words are normal-ordered by repeatedly
//! rewriting `y_b y_a = y_a y_b + h ω_{ba}` for `b > a`.

use std::collections::{BTreeMap, HashMap};

use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{int, rat, RationalPoly};
use crate::series::HSeries;

/// Longest word accepted as input to the oracle operations.
pub const MAX_WORD_LENGTH: usize = 6;

type Word = Vec<usize>;

/// A finite sum of `c · h^m · word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSum {
    dim: usize,
    terms: BTreeMap<(u32, Word), RationalPoly>,
}

impl WordSum {
    pub fn zero(dim: usize) -> Self {
        WordSum {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(coeff: RationalPoly, h: u32, letters: Vec<usize>) -> Self {
        let mut w = Self::zero(coeff.nvars());
        w.add_term(h, letters, coeff);
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Vec<usize>), &RationalPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, h: u32, word: Word, coeff: RationalPoly) {
        if coeff.is_zero() {
            return;
        }
        let key = (h, word);
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &WordSum) -> WordSum {
        let mut out = self.clone();
        for ((h, w), c) in &other.terms {
            out.add_term(*h, w.clone(), c.clone());
        }
        out
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(|(_, w)| w.windows(2).all(|p| p[0] <= p[1]))
    }

    fn max_length(&self) -> usize {
        self.terms.keys().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

struct Straightener<'a> {
    omega: &'a PolyMatrix,
    memo: HashMap<Word, Vec<(u32, Word, RationalPoly)>>,
}

impl Straightener<'_> {
    fn normal_form(&mut self, word: &[usize]) -> Vec<(u32, Word, RationalPoly)> {
        if let Some(hit) = self.memo.get(word) {
            return hit.clone();
        }
        let nvars = self.omega.nvars();
        let result = match word.windows(2).position(|p| p[0] > p[1]) {
            None => vec![(0, word.to_vec(), RationalPoly::one(nvars))],
            Some(i) => {
                let (b, a) = (word[i], word[i + 1]);
                let mut swapped = word.to_vec();
                swapped.swap(i, i + 1);
                let mut out = self.normal_form(&swapped);
                let w_ba = self.omega.get(b, a).clone();
                if !w_ba.is_zero() {
                    let shorter: Word = word[..i].iter().chain(&word[i + 2..]).copied().collect();
                    for (h, w, c) in self.normal_form(&shorter) {
                        out.push((h + 1, w, c.mul_ref(&w_ba)));
                    }
                }
                out
            }
        };
        self.memo.insert(word.to_vec(), result.clone());
        result
    }
}

/// Rewrites every word into ascending order.
pub fn straighten(omega: &PolyMatrix, w: &WordSum) -> WordSum {
    let mut st = Straightener {
        omega,
        memo: HashMap::new(),
    };
    let mut out = WordSum::zero(w.dim);
    for ((h, word), c) in &w.terms {
        for (dh, nw, nc) in st.normal_form(word) {
            out.add_term(h + dh, nw, c.mul_ref(&nc));
        }
    }
    out
}

fn guard(w: &WordSum) -> Result<()> {
    if w.max_length() > MAX_WORD_LENGTH {
        return Err(Error::GuardExceeded(format!(
            "word of length {} exceeds {}",
            w.max_length(),
            MAX_WORD_LENGTH
        )));
    }
    Ok(())
}

/// Product in the enveloping algebra: concatenate, then straighten.
pub fn pbw_product(omega: &PolyMatrix, a: &WordSum, b: &WordSum) -> Result<WordSum> {
    guard(a)?;
    guard(b)?;
    let mut raw = WordSum::zero(a.dim);
    for ((ha, wa), ca) in &a.terms {
        for ((hb, wb), cb) in &b.terms {
            let word: Word = wa.iter().chain(wb).copied().collect();
            raw.add_term(ha + hb, word, ca.mul_ref(cb));
        }
    }
    Ok(straighten(omega, &raw))
}

fn distinct_permutations(letters: &mut Vec<usize>, prefix: &mut Word, out: &mut Vec<Word>) {
    if letters.is_empty() {
        out.push(prefix.clone());
        return;
    }
    let mut seen = Vec::new();
    for i in 0..letters.len() {
        let l = letters[i];
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        letters.remove(i);
        prefix.push(l);
        distinct_permutations(letters, prefix, out);
        prefix.pop();
        letters.insert(i, l);
    }
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// `(1/m!) Σ_σ y_{σ(1)} ⋯ y_{σ(m)}` for the monomial `coeff · h^h · y^μ`,
/// normal-ordered.
pub fn symmetrize(omega: &PolyMatrix, coeff: &RationalPoly, h: u32, mono: &FiberMonomial) -> Result<WordSum> {
    let m = mono.degree();
    if m as usize > MAX_WORD_LENGTH {
        return Err(Error::GuardExceeded(format!(
            "fiber degree {m} exceeds {MAX_WORD_LENGTH}"
        )));
    }
    let mut letters: Vec<usize> = Vec::new();
    for (i, &e) in mono.exponents().iter().enumerate() {
        letters.extend(std::iter::repeat_n(i, e as usize));
    }
    let mut perms = Vec::new();
    distinct_permutations(&mut letters, &mut Vec::new(), &mut perms);
    // each distinct arrangement stands for Π μ_i! permutations
    let stab: i64 = mono.exponents().iter().map(|&e| factorial(e)).product();
    let weight = rat(stab, factorial(m));
    let mut raw = WordSum::zero(omega.nvars());
    for p in perms {
        raw.add_term(h, p, coeff.scale(&weight));
    }
    Ok(straighten(omega, &raw))
}

/// Symmetrizes every term of a form-free element.
pub fn symmetrize_element(omega: &PolyMatrix, e: &WeylFormElement) -> Result<WordSum> {
    let mut out = WordSum::zero(e.dim());
    for (k, c) in e.terms() {
        if k.form_degree() != 0 {
            return Err(Error::WrongDegree("the oracle handles form-free elements only".into()));
        }
        out = out.add(&symmetrize(omega, c, k.h, &k.fiber)?);
    }
    Ok(out)
}

/// Inverse of symmetrization: peels off the lowest `h`-power as a
/// symmetric element, subtracts its symmetrization and repeats.
pub fn project(omega: &PolyMatrix, w: &WordSum, validity: i32) -> Result<WeylFormElement> {
    let mut rest = straighten(omega, w);
    let mut out = WeylFormElement::zero(w.dim, validity);
    while let Some(m0) = rest.terms.keys().map(|(h, _)| *h).min() {
        let layer: Vec<(Word, RationalPoly)> = rest
            .terms
            .iter()
            .filter(|((h, _), _)| *h == m0)
            .map(|((_, word), c)| (word.clone(), c.clone()))
            .collect();
        for (word, c) in layer {
            let mut exps = vec![0u32; w.dim];
            for &l in &word {
                exps[l] += 1;
            }
            let mono = FiberMonomial::new(exps);
            out.add_term(TermKey::new(m0, mono.clone(), FormMonomial::EMPTY), c.clone());
            let sym = symmetrize(omega, &c, m0, &mono)?;
            for ((h, sw), sc) in sym.terms {
                rest.add_term(h, sw, -&sc);
            }
        }
        debug_assert!(rest.terms.keys().all(|(h, _)| *h > m0));
    }
    Ok(out)
}

/// Closed-form Moyal product for a constant Poisson matrix:
/// `Σ_k (h/2)^k / k! Σ P^{a1 b1} ⋯ P^{ak bk} ∂_{a1..ak} u ∂_{b1..bk} v`.
pub fn moyal_flat(poisson: &PolyMatrix, u: &RationalPoly, v: &RationalPoly, order: u32) -> Result<HSeries> {
    if !poisson.is_constant() {
        return Err(Error::NonConstantPoisson);
    }
    let dim = poisson.size();
    let nvars = u.nvars();
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        let mut acc = RationalPoly::zero(nvars);
        let pairs = (dim * dim).pow(k);
        for mut code in 0..pairs {
            let mut du = u.clone();
            let mut dv = v.clone();
            let mut weight = int(1);
            for _ in 0..k {
                let (a, b) = ((code % (dim * dim)) / dim, code % dim);
                code /= dim * dim;
                weight *= poisson.get(a, b).constant_term();
                du = du.derivative(a);
                dv = dv.derivative(b);
            }
            if weight != int(0) {
                acc.add_assign_ref(&du.mul_ref(&dv).scale(&weight));
            }
        }
        let norm = rat(1, (1i64 << k) * factorial(k));
        coeffs.push(acc.scale(&norm));
    }
    Ok(HSeries::from_coeffs(nvars, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::SymplecticStructure;

    fn omega1() -> PolyMatrix {
        SymplecticStructure::standard(1).omega().clone()
    }

    fn one() -> RationalPoly {
        RationalPoly::one(2)
    }

    #[test]
    fn single_rewrite() {
        let w = straighten(&omega1(), &WordSum::word(one(), 0, vec![1, 0]));
        let mut want = WordSum::word(one(), 0, vec![0, 1]);
        want.add_term(1, vec![], RationalPoly::from_int(-1, 2));
        assert_eq!(w, want);
        let sorted = WordSum::word(one(), 0, vec![0, 0]);
        assert_eq!(straighten(&omega1(), &sorted), sorted);
    }

    #[test]
    fn central_coefficients_pass_through() {
        let f = RationalPoly::parse("x1", 2).unwrap();
        let g = RationalPoly::parse("x2^2", 2).unwrap();
        let got = pbw_product(
            &omega1(),
            &WordSum::word(f.clone(), 0, vec![0]),
            &WordSum::word(g.clone(), 0, vec![1]),
        )
        .unwrap();
        assert_eq!(got, WordSum::word(&f * &g, 0, vec![0, 1]));
    }

    #[test]
    fn symmetrized_y1_y2() {
        let w = omega1();
        let s = symmetrize(&w, &one(), 0, &FiberMonomial::new(vec![1, 1])).unwrap();
        let mut want = WordSum::word(one(), 0, vec![0, 1]);
        want.add_term(1, vec![], RationalPoly::constant(rat(-1, 2), 2));
        assert_eq!(s, want);
        let sq = symmetrize(&w, &one(), 0, &FiberMonomial::new(vec![2, 0])).unwrap();
        assert_eq!(sq, WordSum::word(one(), 0, vec![0, 0]));
        // y1 ∘ y2 in symmetric form is y1 y2 + h/2
        let y1 = WordSum::word(one(), 0, vec![0]);
        let y2 = WordSum::word(one(), 0, vec![1]);
        let p = project(&w, &pbw_product(&w, &y1, &y2).unwrap(), 6).unwrap();
        let mut want = WeylFormElement::zero(2, 6);
        want.add_term(TermKey::new(0, FiberMonomial::new(vec![1, 1]), FormMonomial::EMPTY), one());
        want.add_term(TermKey::new(1, FiberMonomial::one(2), FormMonomial::EMPTY), RationalPoly::constant(rat(1, 2), 2));
        assert_eq!(p, want);
    }

    #[test]
    fn project_inverts_symmetrize() {
        for st in [SymplecticStructure::standard(1), SymplecticStructure::standard(2)] {
            let dim = st.dim();
            let w = st.omega();
            let mut exps = vec![0u32; dim];
            loop {
                let mono = FiberMonomial::new(exps.clone());
                if mono.degree() <= 4 {
                    let s = symmetrize(w, &RationalPoly::one(dim), 0, &mono).unwrap();
                    let p = project(w, &s, 8).unwrap();
                    assert_eq!(p.num_terms(), 1);
                    assert_eq!(p.coefficient(&TermKey::new(0, mono, FormMonomial::EMPTY)), RationalPoly::one(dim));
                }
                let mut i = 0;
                while i < dim && exps[i] == 4 {
                    exps[i] = 0;
                    i += 1;
                }
                if i == dim {
                    break;
                }
                exps[i] += 1;
            }
        }
    }

    #[test]
    fn guard_rejects_long_words() {
        let long = WordSum::word(one(), 0, vec![0; 7]);
        assert!(matches!(pbw_product(&omega1(), &long, &long), Err(Error::GuardExceeded(_))));
        assert!(symmetrize(&omega1(), &one(), 0, &FiberMonomial::new(vec![4, 3])).is_err());
    }

    #[test]
    fn moyal_examples() {
        let p = SymplecticStructure::standard(1).poisson().clone();
        let x1 = RationalPoly::parse("x1", 2).unwrap();
        let x2 = RationalPoly::parse("x2", 2).unwrap();
        let s = moyal_flat(&p, &x1, &x2, 2).unwrap();
        assert_eq!(s.coeffs(), &[&x1 * &x2, RationalPoly::constant(rat(1, 2), 2), RationalPoly::zero(2)]);
        let u = RationalPoly::parse("x1^2*x2 + x2^3", 2).unwrap();
        let uu = moyal_flat(&p, &u, &u, 3).unwrap();
        assert!(uu.coeff(1).is_zero() && uu.coeff(3).is_zero());
        let c = RationalPoly::from_int(3, 2);
        assert_eq!(moyal_flat(&p, &c, &u, 3).unwrap(), HSeries::from_poly(u.scale(&int(3)), 3));
        let sheared = crate::fixtures::sheared_poisson();
        let z = RationalPoly::zero(4);
        assert_eq!(moyal_flat(&sheared, &z, &z, 1), Err(Error::NonConstantPoisson));
    }
}
