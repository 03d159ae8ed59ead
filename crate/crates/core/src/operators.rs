//! Graded operators on the Weyl-form algebra, in coordinates.
//!
//! New `dx` factors are always placed on the left of the existing form
//! monomial (`δ(u ⊗ ν) = δ(u) ν`, `∇(x ⊗ ν) = (∇x) ν + x dν`) and then
//! brought to canonical order with the Koszul sign. With this convention
//! `δ` and `∇` are left graded derivations of weight 1.
//!
//! Validity bookkeeping: `δ` lowers W-degree by one and so lowers the
//! validity by one; `δ*` and `δ̃` raise W-degree by one and raise it by one;
//! `∇` and the projections keep it.

use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::poly::{int, rat, RationalPoly};
use crate::structure::{SymplecticConnection, SymplecticStructure};

/// `δ(s(y) ⊗ ν) = Σ_b ∂s/∂y_b · ♭(∂_b) ∧ ν`.
pub fn delta(structure: &SymplecticStructure, e: &WeylFormElement) -> WeylFormElement {
    let dim = e.dim();
    let flat = structure.flat_matrix();
    e.map_terms(e.validity() - 1, |k, c, out| {
        for b in 0..dim {
            let Some((mult, rest)) = k.fiber.derivative(b) else {
                continue;
            };
            for j in 0..dim {
                let fj = flat.get(b, j);
                if fj.is_zero() {
                    continue;
                }
                if let Some((sign, form)) = FormMonomial::single(j).wedge(k.form) {
                    let coeff = c.mul_ref(fj).scale(&int(sign as i64 * mult as i64));
                    out.add_term(TermKey::new(k.h, rest.clone(), form), coeff);
                }
            }
        }
    })
}

/// `δ*(u ⊗ s ⊗ dx_{i1}..dx_{iq}) = Σ_t (-1)^{t-1} u ♯(dx_{it}) s ⊗ dx_{i1}..(omit it)..dx_{iq}`.
pub fn delta_star(structure: &SymplecticStructure, e: &WeylFormElement) -> WeylFormElement {
    let dim = e.dim();
    e.map_terms(e.validity() + 1, |k, c, out| {
        delta_star_term(structure, dim, k, c, &int(1), out);
    })
}

fn delta_star_term(
    structure: &SymplecticStructure,
    dim: usize,
    k: &TermKey,
    c: &RationalPoly,
    scale: &crate::poly::Rational,
    out: &mut WeylFormElement,
) {
    let sharp = structure.sharp_matrix();
    for i in k.form.indices() {
        let (sign, rest) = k.form.remove(i).expect("index present");
        for l in 0..dim {
            let s = sharp.get(i, l);
            if s.is_zero() {
                continue;
            }
            let fiber = k.fiber.mul(&FiberMonomial::var(l, dim));
            let coeff = c.mul_ref(s).scale(&(scale * int(sign as i64)));
            out.add_term(TermKey::new(k.h, fiber, rest), coeff);
        }
    }
}

/// `δ̃ = δ* / (p + q)` on each `(p, q, m)` component, zero on `(0, 0, m)`.
pub fn delta_tilde(structure: &SymplecticStructure, e: &WeylFormElement) -> WeylFormElement {
    let dim = e.dim();
    e.map_terms(e.validity() + 1, |k, c, out| {
        let weight = k.fiber_degree() + k.form_degree();
        if weight == 0 {
            return;
        }
        delta_star_term(structure, dim, k, c, &rat(1, weight as i64), out);
    })
}

/// `τ`: the part with no fiber and no form factors, every h-power.
pub fn tau(e: &WeylFormElement) -> WeylFormElement {
    e.filter(|k| k.fiber_degree() == 0 && k.form_degree() == 0)
}

/// `T = τ ⊗ id`: the part with no fiber factors.
pub fn big_t(e: &WeylFormElement) -> WeylFormElement {
    e.filter(|k| k.fiber_degree() == 0)
}

/// The augmentation: the coefficient of `h^0 y^0 dx^0`.
pub fn epsilon(e: &WeylFormElement) -> RationalPoly {
    let dim = e.dim();
    e.coefficient(&TermKey::new(0, FiberMonomial::one(dim), FormMonomial::EMPTY))
}

/// The exterior derivative acting on base coefficients only.
pub fn exterior_derivative(e: &WeylFormElement) -> WeylFormElement {
    let dim = e.dim();
    e.map_terms(e.validity(), |k, c, out| {
        coefficient_derivative_term(dim, k, c, out);
    })
}

fn coefficient_derivative_term(dim: usize, k: &TermKey, c: &RationalPoly, out: &mut WeylFormElement) {
    for a in 0..dim {
        let da = c.derivative(a);
        if da.is_zero() {
            continue;
        }
        if let Some((sign, form)) = FormMonomial::single(a).wedge(k.form) {
            out.add_term_scaled(TermKey::new(k.h, k.fiber.clone(), form), &da, &int(sign as i64));
        }
    }
}

/// `∇e = Σ_a dx_a ∧ [∂e/∂x_a + Σ_{b,c} Γ^c_{ab} y_c ∂e/∂y_b]`.
pub fn nabla(conn: &SymplecticConnection, e: &WeylFormElement) -> WeylFormElement {
    let dim = e.dim();
    e.map_terms(e.validity(), |k, c, out| {
        coefficient_derivative_term(dim, k, c, out);
        for b in 0..dim {
            let Some((mult, rest)) = k.fiber.derivative(b) else {
                continue;
            };
            for a in 0..dim {
                let Some((sign, form)) = FormMonomial::single(a).wedge(k.form) else {
                    continue;
                };
                for cc in 0..dim {
                    let g = conn.upper(cc, a, b);
                    if g.is_zero() {
                        continue;
                    }
                    let fiber = rest.mul(&FiberMonomial::var(cc, dim));
                    let coeff = c.mul_ref(g).scale(&int(sign as i64 * mult as i64));
                    out.add_term(TermKey::new(k.h, fiber, form), coeff);
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::FormMonomial as F;
    use crate::structure::zero_christoffel;

    const V: i32 = 8;

    fn s1() -> SymplecticStructure {
        SymplecticStructure::standard(1)
    }

    fn y(i: usize) -> WeylFormElement {
        WeylFormElement::y(i, 2, V)
    }

    fn dx(i: usize) -> WeylFormElement {
        WeylFormElement::dx(i, 2, V)
    }

    fn mono(exps: &[u32], h: u32, form: u32) -> WeylFormElement {
        let mut f = F::EMPTY;
        for i in 0..2 {
            if form & (1 << i) != 0 {
                f = f.wedge(F::single(i)).unwrap().1;
            }
        }
        WeylFormElement::single(TermKey::new(h, FiberMonomial::new(exps.to_vec()), f), RationalPoly::one(2), V)
    }

    fn poly(s: &str) -> RationalPoly {
        RationalPoly::parse(s, 2).unwrap()
    }

    #[test]
    fn delta_examples() {
        let s = s1();
        assert!(delta(&s, &y(1)).agrees_with(&dx(0)));
        assert!(delta(&s, &WeylFormElement::from_poly(poly("x1^2"), V)).is_zero());
        assert!(delta(&s, &dx(0)).is_zero());
        // δ(y1 y2) = -y2 dx2 + y1 dx1
        let got = delta(&s, &mono(&[1, 1], 0, 0));
        let want = &mono(&[1, 0], 0, 0b01) - &mono(&[0, 1], 0, 0b10);
        assert!(got.agrees_with(&want));
    }

    #[test]
    fn delta_star_examples() {
        let s = s1();
        assert!(delta_star(&s, &dx(0)).agrees_with(&y(1)));
        // δ*(dx1 dx2) = y2 dx2 + y1 dx1
        let got = delta_star(&s, &mono(&[0, 0], 0, 0b11));
        let want = &mono(&[0, 1], 0, 0b10) + &mono(&[1, 0], 0, 0b01);
        assert!(got.agrees_with(&want));
        assert!(delta_star(&s, &delta_star(&s, &mono(&[0, 0], 0, 0b11))).is_zero());
        assert!(delta_star(&s, &WeylFormElement::from_poly(poly("x1*x2"), V)).is_zero());
    }

    #[test]
    fn delta_tilde_examples() {
        let s = s1();
        assert!(delta_tilde(&s, &dx(0)).agrees_with(&y(1)));
        let h3x = WeylFormElement::from_poly(poly("x1^2"), V)
            .scale(&RationalPoly::one(2));
        let h3x = &mono(&[0, 0], 3, 0).scale(&poly("x1^2")) + &h3x.filter(|_| false);
        assert!(delta_tilde(&s, &h3x).is_zero());
        let got = delta_tilde(&s, &mono(&[1, 0], 0, 0b01));
        assert!(got.agrees_with(&mono(&[1, 1], 0, 0).scale_rational(&rat(1, 2))));
    }

    #[test]
    fn fundamental_formula_worked_case() {
        let s = s1();
        let e = mono(&[1, 0], 0, 0b01);
        let dd = delta_tilde(&s, &delta(&s, &e));
        let want_dd = (&mono(&[0, 1], 0, 0b10) + &mono(&[1, 0], 0, 0b01)).scale_rational(&rat(1, 2));
        assert!(dd.agrees_with(&want_dd));
        let dt = delta(&s, &delta_tilde(&s, &e));
        let want_dt = (&mono(&[1, 0], 0, 0b01) - &mono(&[0, 1], 0, 0b10)).scale_rational(&rat(1, 2));
        assert!(dt.agrees_with(&want_dt));
        assert!((&(&dd + &dt) + &tau(&e)).agrees_with(&e));
    }

    #[test]
    fn euler_on_y1y2() {
        let s = s1();
        let e = mono(&[1, 1], 0, 0);
        let got = &delta(&s, &delta_star(&s, &e)) + &delta_star(&s, &delta(&s, &e));
        assert!(got.agrees_with(&e.scale_rational(&int(2))));
    }

    #[test]
    fn projections() {
        let s = s1();
        let e = &(&mono(&[1, 0], 0, 0b01) + &mono(&[0, 0], 1, 0b10))
            + &WeylFormElement::from_poly(poly("x1"), V);
        assert_agrees!(big_t(&(&mono(&[1, 0], 0, 0b01) + &mono(&[0, 0], 1, 0b10))), mono(&[0, 0], 1, 0b10));
        let e2 = &(&WeylFormElement::from_poly(poly("x1"), V) + &y(0)) + &mono(&[0, 0], 1, 0);
        assert_eq!(epsilon(&e2), poly("x1"));
        for f in [tau, big_t] {
            assert_agrees!(f(&f(&e)), f(&e));
        }
        let y1y2 = crate::product::weyl_product(s.omega(), &y(0), &y(1)).unwrap();
        assert_agrees!(tau(&y1y2), mono(&[0, 0], 1, 0).scale_rational(&rat(1, 2)));
    }

    #[test]
    fn nabla_examples() {
        let s = s1();
        let flat = SymplecticConnection::trivial(&s).unwrap();
        let x1y1 = y(0).scale(&poly("x1"));
        assert_agrees!(nabla(&flat, &x1y1), mono(&[1, 0], 0, 0b01));
        let f = WeylFormElement::from_poly(poly("x1^2*x2"), V);
        let df = &mono(&[0, 0], 0, 0b01).scale(&poly("2*x1*x2")) + &mono(&[0, 0], 0, 0b10).scale(&poly("x1^2"));
        assert_agrees!(nabla(&flat, &f), df);

        let mut g = zero_christoffel(2);
        g[0][0][0] = RationalPoly::one(2);
        let conn = SymplecticConnection::validate(&s, &g).unwrap();
        // ∇y1 = Σ Γ^c_{a1} y_c dx_a = Γ^2_{11} y2 dx1 = -y2 dx1
        assert_agrees!(nabla(&conn, &y(0)), -&mono(&[0, 1], 0, 0b01));
        assert!(nabla(&conn, &y(1)).is_zero());
    }
}
