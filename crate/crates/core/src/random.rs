//! Seeded pseudo-random polynomials and elements for property checks.

use rand::Rng;

use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::poly::{rat, RationalPoly};

/// Shape of a random element.
#[derive(Clone, Copy, Debug)]
pub struct ElementShape {
    pub validity: i32,
    pub terms: usize,
    pub coeff_degree: u32,
    pub coeff_terms: usize,
    pub max_form_degree: u32,
}

impl ElementShape {
    pub fn new(validity: i32) -> Self {
        ElementShape {
            validity,
            terms: 6,
            coeff_degree: 3,
            coeff_terms: 3,
            max_form_degree: u32::MAX,
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R) -> crate::poly::Rational {
    let num = rng.gen_range(-5i64..=5);
    let num = if num == 0 { 1 } else { num };
    let den = rng.gen_range(1i64..=3);
    rat(num, den)
}

fn random_exponents<R: Rng>(rng: &mut R, nvars: usize, degree: u32) -> Vec<u32> {
    let mut e = vec![0u32; nvars];
    for _ in 0..degree {
        e[rng.gen_range(0..nvars)] += 1;
    }
    e
}

/// A polynomial with up to `terms` monomials of total degree at most `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32, terms: usize) -> RationalPoly {
    let mut p = RationalPoly::zero(nvars);
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_degree);
        p.add_term(random_exponents(rng, nvars, d), random_rational(rng));
    }
    p
}

/// A polynomial all of whose monomials have total degree exactly `degree`.
pub fn random_homogeneous_poly<R: Rng>(rng: &mut R, nvars: usize, degree: u32, terms: usize) -> RationalPoly {
    let mut p = RationalPoly::zero(nvars);
    while p.is_zero() {
        for _ in 0..terms {
            p.add_term(random_exponents(rng, nvars, degree), random_rational(rng));
        }
    }
    p
}

/// A random element of `W ⊗ Ω` with every stored term inside the validity.
pub fn random_element<R: Rng>(rng: &mut R, dim: usize, shape: ElementShape) -> WeylFormElement {
    let mut e = WeylFormElement::zero(dim, shape.validity);
    let max_q = shape.max_form_degree.min(dim as u32);
    for _ in 0..shape.terms {
        let w = rng.gen_range(0..=shape.validity.max(0)) as u32;
        let m = rng.gen_range(0..=w / 2);
        let p = w - 2 * m;
        let fiber = FiberMonomial::new(random_exponents(rng, dim, p));
        let mut form = FormMonomial::EMPTY;
        let q = rng.gen_range(0..=max_q);
        while form.degree() < q {
            if let Some((_, f)) = form.wedge(FormMonomial::single(rng.gen_range(0..dim))) {
                form = f;
            }
        }
        let coeff = random_poly(rng, dim, shape.coeff_degree, shape.coeff_terms);
        e.add_term(TermKey::new(m, fiber, form), coeff);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_shape_and_seed() {
        let shape = ElementShape::new(6);
        let a = random_element(&mut ChaCha8Rng::seed_from_u64(7), 4, shape);
        let b = random_element(&mut ChaCha8Rng::seed_from_u64(7), 4, shape);
        assert_eq!(a, b);
        for (k, c) in a.terms() {
            assert!(k.w_degree() <= 6);
            assert!(c.total_degree().unwrap() <= 3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_homogeneous_poly(&mut rng, 2, 2, 3);
        assert!(h.terms().all(|(e, _)| e.iter().sum::<u32>() == 2));
    }
}
