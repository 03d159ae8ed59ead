//! The associative product on the h-series representation.
//!
//! Fiber parts multiply through the Moyal-type expansion
//!
//! ```text
//! a ∘ b = Σ_k (h/2)^k / k! Σ ω_{a1 b1}..ω_{ak bk} ∂^k_{y_a..} a · ∂^k_{y_b..} b
//! ```
//!
//! base coefficients multiply commutatively and form parts are wedged. Every
//! k-term of a pair of terms has the same W-degree (fiber degree `2k` is
//! traded for `h^k`), so pairs whose combined W-degree exceeds the result's
//! validity are skipped outright.


use crate::element::{FiberMonomial, TermKey, WeylFormElement};
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{int, rat, RationalPoly};

/// Validity of a product: the hidden tail of one factor meets at least the
/// lowest degree of the other.
pub fn product_validity(a: &WeylFormElement, b: &WeylFormElement) -> i32 {
    let left = a.validity().saturating_add(b.degree_lower_bound());
    let right = b.validity().saturating_add(a.degree_lower_bound());
    left.min(right)
}

struct Pair {
    a: usize,
    b: usize,
    weight: RationalPoly,
}

fn omega_pairs(omega: &PolyMatrix) -> Vec<Pair> {
    let n = omega.size();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let w = omega.get(a, b);
            if a != b && !w.is_zero() {
                out.push(Pair {
                    a,
                    b,
                    weight: w.clone(),
                });
            }
        }
    }
    out
}

/// Emits every k-term of `y^alpha ∘ y^beta` as
/// `(k, coefficient polynomial, resulting fiber monomial)`.
fn moyal_expand(
    pairs: &[Pair],
    nvars: usize,
    alpha: &FiberMonomial,
    beta: &FiberMonomial,
    emit: &mut dyn FnMut(u32, RationalPoly, FiberMonomial),
) {
    struct State<'a> {
        pairs: &'a [Pair],
        alpha: Vec<u32>,
        beta: Vec<u32>,
    }

    fn go(
        st: &mut State<'_>,
        j: usize,
        k: u32,
        factor: RationalPoly,
        emit: &mut dyn FnMut(u32, RationalPoly, FiberMonomial),
    ) {
        if j == st.pairs.len() {
            let fiber = FiberMonomial::new(st.alpha.iter().zip(&st.beta).map(|(x, y)| x + y).collect());
            let half_k = rat(1, 1i64 << k);
            emit(k, factor.scale(&half_k), fiber);
            return;
        }
        let (a, b) = (st.pairs[j].a, st.pairs[j].b);
        go(st, j + 1, k, factor.clone(), emit);
        let (sa, sb) = (st.alpha[a], st.beta[b]);
        let mut f = factor;
        let mut c = 0u32;
        while st.alpha[a] > 0 && st.beta[b] > 0 {
            // consume one more ∂_{y_a} ⊗ ∂_{y_b}: falling factorials and 1/c!
            let mult = int((st.alpha[a] as i64) * (st.beta[b] as i64));
            c += 1;
            f = f.mul_ref(&st.pairs[j].weight).scale(&(mult / int(c as i64)));
            st.alpha[a] -= 1;
            st.beta[b] -= 1;
            go(st, j + 1, k + c, f.clone(), emit);
        }
        st.alpha[a] = sa;
        st.beta[b] = sb;
    }

    let mut st = State {
        pairs,
        alpha: alpha.exponents().to_vec(),
        beta: beta.exponents().to_vec(),
    };
    go(&mut st, 0, 0, RationalPoly::one(nvars), emit);
}

fn check_omega(omega: &PolyMatrix, e: &WeylFormElement) -> Result<()> {
    if omega.size() != e.dim() {
        return Err(Error::DimensionMismatch {
            left: omega.size(),
            right: e.dim(),
        });
    }
    Ok(())
}

/// The Weyl-form product `a ∘ b` with respect to the form matrix `omega`.
pub fn weyl_product(omega: &PolyMatrix, a: &WeylFormElement, b: &WeylFormElement) -> Result<WeylFormElement> {
    a.check_dim(b)?;
    check_omega(omega, a)?;
    let validity = product_validity(a, b);
    let dim = a.dim();
    let pairs = omega_pairs(omega);
    let mut out = WeylFormElement::zero(dim, validity);
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            if ka.w_degree() + kb.w_degree() > validity {
                continue;
            }
            let Some((sign, form)) = ka.form.wedge(kb.form) else {
                continue;
            };
            let mut base = ca.mul_ref(cb);
            if sign < 0 {
                base = -&base;
            }
            moyal_expand(&pairs, dim, &ka.fiber, &kb.fiber, &mut |k, factor, fiber| {
                out.add_term(TermKey::new(ka.h + kb.h + k, fiber, form), base.mul_ref(&factor));
            });
        }
    }
    Ok(out)
}

/// Splits an element into its even and odd form-degree parts.
pub fn parity_split(e: &WeylFormElement) -> (WeylFormElement, WeylFormElement) {
    (
        e.filter(|k| k.form_degree() % 2 == 0),
        e.filter(|k| k.form_degree() % 2 == 1),
    )
}

/// `[a, b] = ab - (-1)^{q(a) q(b)} ba`, extended bilinearly over the form
/// parities. The result must lie in `h·(W⊗Ω)`; an h-free term is reported as
/// an error since it can only come from a faulty product.
pub fn graded_commutator(
    omega: &PolyMatrix,
    a: &WeylFormElement,
    b: &WeylFormElement,
) -> Result<WeylFormElement> {
    a.check_dim(b)?;
    let (a0, a1) = parity_split(a);
    let (b0, b1) = parity_split(b);
    let mut out = WeylFormElement::zero(a.dim(), product_validity(a, b));
    for (x, px) in [(&a0, 0), (&a1, 1)] {
        for (y, py) in [(&b0, 0), (&b1, 1)] {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let xy = weyl_product(omega, x, y)?;
            let yx = weyl_product(omega, y, x)?;
            let part = if px * py == 1 { &xy + &yx } else { &xy - &yx };
            out = &out + &part;
        }
    }
    if let Some((k, c)) = out.terms().find(|(k, _)| k.h == 0) {
        let single = WeylFormElement::single(k.clone(), c.clone(), out.validity());
        return Err(Error::CommutatorNotInHIdeal(single.to_string()));
    }
    Ok(out)
}

/// Division by h. Lowers the validity by 2, the W-degree of h.
pub fn div_h(e: &WeylFormElement) -> Result<WeylFormElement> {
    let mut out = WeylFormElement::zero(e.dim(), e.validity() - 2);
    for (k, c) in e.terms() {
        if k.h == 0 {
            let single = WeylFormElement::single(k.clone(), c.clone(), e.validity());
            return Err(Error::NotDivisible(single.to_string()));
        }
        out.add_term(TermKey::new(k.h - 1, k.fiber.clone(), k.form), c.clone());
    }
    Ok(out)
}

/// The inner derivation `(1/h)[gamma, e]`.
pub fn ad_over_h(omega: &PolyMatrix, gamma: &WeylFormElement, e: &WeylFormElement) -> Result<WeylFormElement> {
    div_h(&graded_commutator(omega, gamma, e)?)
}

/// `(1/h) g^2` for an element of odd form degree, computed as
/// `(1/2)·(1/h)[g, g]` so h-divisibility is structural.
pub fn odd_square_over_h(omega: &PolyMatrix, g: &WeylFormElement) -> Result<WeylFormElement> {
    Ok(div_h(&graded_commutator(omega, g, g)?)?.scale_rational(&rat(1, 2)))
}

/// The bracket `{f, g}_ω` on the symmetric algebra: the h-free part of
/// `(1/h)[f, g]` for h-free inputs.
pub fn poisson_bracket_s(omega: &PolyMatrix, f: &WeylFormElement, g: &WeylFormElement) -> Result<WeylFormElement> {
    for e in [f, g] {
        if let Some((k, _)) = e.terms().find(|(k, _)| k.h > 0) {
            return Err(Error::WrongDegree(format!(
                "bracket on S expects h-free input, found h^{}",
                k.h
            )));
        }
    }
    Ok(ad_over_h(omega, f, g)?.filter(|k| k.h == 0))
}
