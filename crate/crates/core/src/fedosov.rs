//! Curvature, the correction series `γ`, the Fedosov connection
//! `D = ∇ − δ + (1/h) ad γ`, flat sections and the star product.
//!
//! Every homogeneous piece of `γ` and of a flat section depends only on
//! strictly lower pieces, so both are built degree by degree and each
//! delivered piece is exact. `γ` is carried one W-degree beyond the
//! nominal truncation `N` so that flat sections and the flatness
//! certificate are exact through degree `N`.

use std::collections::HashMap;

use crate::checks::CheckOutcome;
use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::error::{Error, Result};
use crate::operators::{big_t, delta, delta_tilde, exterior_derivative, nabla, tau};
use crate::poly::{int, RationalPoly};
use crate::product::{ad_over_h, div_h, graded_commutator, odd_square_over_h, weyl_product};
use crate::series::HSeries;
use crate::structure::{SymplecticConnection, SymplecticStructure};

fn y(b: usize, dim: usize, validity: i32) -> WeylFormElement {
    WeylFormElement::y(b, dim, validity)
}

fn outcome(name: impl Into<String>, residue: &WeylFormElement) -> CheckOutcome {
    CheckOutcome::from_residue(name, residue)
}

/// `R = −½ Σ_i ham(x_i) ∘ ∇²(y_i)`, reduced to its `(p, q, m) = (2, 2, 0)`
/// part and returned with the requested validity (`R` is homogeneous of
/// W-degree 2, so any validity is exact). Certified before returning.
pub fn curvature(
    structure: &SymplecticStructure,
    conn: &SymplecticConnection,
    validity: i32,
) -> Result<WeylFormElement> {
    let dim = structure.dim();
    let work = 4;
    let mut sum = WeylFormElement::zero(dim, work);
    for i in 0..dim {
        let ham = structure.ham(&RationalPoly::var(i, dim), work);
        let nn = nabla(conn, &nabla(conn, &y(i, dim, work)));
        sum = &sum + &weyl_product(structure.omega(), &ham, &nn)?;
    }
    let r = sum
        .grade_component(2, 2, 0)
        .scale_rational(&crate::poly::rat(-1, 2))
        .with_validity(validity.max(2));
    let failures: Vec<String> = certify_curvature(structure, conn, &r)?
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if !failures.is_empty() {
        return Err(Error::Certification(failures.join("; ")));
    }
    Ok(r.truncate(validity))
}

/// `(1/h)[R, y_b] = ∇²(y_b)` for every `b`, `δR = 0` and `∇R = d T(R)`.
pub fn certify_curvature(
    structure: &SymplecticStructure,
    conn: &SymplecticConnection,
    r: &WeylFormElement,
) -> Result<Vec<CheckOutcome>> {
    let dim = structure.dim();
    let v = 6;
    let r6 = r.clone().with_validity(v);
    let mut out = Vec::new();
    for b in 0..dim {
        let yb = y(b, dim, v);
        let lhs = ad_over_h(structure.omega(), &r6, &yb)?;
        let rhs = nabla(conn, &nabla(conn, &yb));
        out.push(outcome(format!("(1/h)[R, y{}] = nabla^2 y{}", b + 1, b + 1), &(&lhs - &rhs)));
    }
    out.push(outcome("delta R = 0", &delta(structure, &r6)));
    let dtr = exterior_derivative(&big_t(&r6));
    out.push(outcome("nabla R = d T(R)", &(&nabla(conn, &r6) - &dtr)));
    Ok(out)
}

/// Homogeneous pieces `γ_t`, `t = 3..=n`, of the correction series:
/// `γ_3 = δ̃R`, `γ_t = δ̃[(1/h) Σ_{p+q=t+1} γ_p γ_q] + δ̃∇γ_{t−1}`.
/// Entry `t` of the result is `γ_t`; entries below 3 are zero.
pub fn gamma_pieces(
    structure: &SymplecticStructure,
    conn: &SymplecticConnection,
    r: &WeylFormElement,
    n: u32,
) -> Result<Vec<WeylFormElement>> {
    let dim = structure.dim();
    let v = n as i32;
    let omega = structure.omega();
    let mut pieces = vec![WeylFormElement::zero(dim, v); 3];
    if n < 3 {
        pieces.truncate(n as usize + 1);
        return Ok(pieces);
    }
    let r = r.clone().with_validity(v.max(2));
    pieces.push(delta_tilde(structure, &r).truncate(v));
    for t in 4..=n as usize {
        let mut quad = WeylFormElement::zero(dim, v);
        for p in 3..=t.div_ceil(2) {
            let q = t + 1 - p;
            if q < 3 {
                continue;
            }
            let term = if p == q {
                odd_square_over_h(omega, &pieces[p])?
            } else {
                ad_over_h(omega, &pieces[p], &pieces[q])?
            };
            quad = &quad + &term.truncate(v);
        }
        let next = &delta_tilde(structure, &quad) + &delta_tilde(structure, &nabla(conn, &pieces[t - 1]));
        let next = next.truncate(v);
        debug_assert!(next.terms().all(|(k, _)| k.w_degree() == t as i32 && k.form_degree() == 1));
        pieces.push(next);
    }
    Ok(pieces)
}

/// `γ = Σ_{3 ≤ t ≤ n} γ_t`, valid through W-degree `n`.
pub fn gamma_recursion(
    structure: &SymplecticStructure,
    conn: &SymplecticConnection,
    r: &WeylFormElement,
    n: u32,
) -> Result<WeylFormElement> {
    let pieces = gamma_pieces(structure, conn, r, n)?;
    let mut gamma = WeylFormElement::zero(structure.dim(), n as i32);
    for p in &pieces {
        gamma = &gamma + p;
    }
    Ok(gamma)
}

/// Everything needed to evaluate `D` and solve for flat sections through
/// W-degree `N`.
#[derive(Clone, Debug)]
pub struct FedosovData {
    structure: SymplecticStructure,
    connection: SymplecticConnection,
    curvature: WeylFormElement,
    gamma_pieces: Vec<WeylFormElement>,
    gamma: WeylFormElement,
    truncation: u32,
}

impl FedosovData {
    /// Builds and certifies the data for truncation `N ≥ 3`.
    pub fn new(structure: SymplecticStructure, connection: SymplecticConnection, truncation: u32) -> Result<Self> {
        if truncation < 3 {
            return Err(Error::GuardExceeded(format!("truncation {truncation} is below 3")));
        }
        let n1 = truncation + 1;
        let curvature = curvature(&structure, &connection, n1 as i32)?;
        let gamma_pieces = gamma_pieces(&structure, &connection, &curvature, n1)?;
        let mut gamma = WeylFormElement::zero(structure.dim(), n1 as i32);
        for p in &gamma_pieces {
            gamma = &gamma + p;
        }
        let data = FedosovData {
            structure,
            connection,
            curvature,
            gamma_pieces,
            gamma,
            truncation,
        };
        let failures: Vec<String> = data
            .certificate()?
            .into_iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        if !failures.is_empty() {
            return Err(Error::Certification(failures.join("; ")));
        }
        Ok(data)
    }

    pub fn structure(&self) -> &SymplecticStructure {
        &self.structure
    }

    pub fn connection(&self) -> &SymplecticConnection {
        &self.connection
    }

    pub fn curvature(&self) -> &WeylFormElement {
        &self.curvature
    }

    /// `γ`, valid through W-degree `N + 1`.
    pub fn gamma(&self) -> &WeylFormElement {
        &self.gamma
    }

    /// `γ_t` for `t ≤ N + 1`.
    pub fn gamma_piece(&self, t: usize) -> &WeylFormElement {
        &self.gamma_pieces[t]
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// `β = δγ + T(R) − R − ∇γ − (1/h)γ²`, valid through W-degree `N`.
    pub fn flatness_residual(&self) -> Result<WeylFormElement> {
        let s = &self.structure;
        let g = &self.gamma;
        let r = &self.curvature;
        let sq = odd_square_over_h(s.omega(), g)?;
        let beta = &(&(&(&delta(s, g) + &big_t(r)) - r) - &nabla(&self.connection, g)) - &sq;
        Ok(beta.truncate(self.truncation as i32))
    }

    /// Curvature identities, `δ̃γ = 0`, the vanishing-theorem hypotheses
    /// `δ̃β = 0`, `τβ = 0`, and finally `β = 0` through degree `N`.
    pub fn certificate(&self) -> Result<Vec<CheckOutcome>> {
        let s = &self.structure;
        let mut out = certify_curvature(s, &self.connection, &self.curvature)?;
        out.push(outcome("delta~ gamma = 0", &delta_tilde(s, &self.gamma)));
        let beta = self.flatness_residual()?;
        out.push(outcome("delta~ beta = 0", &delta_tilde(s, &beta)));
        out.push(outcome("tau beta = 0", &tau(&beta)));
        out.push(outcome(format!("beta = 0 up to degree {}", self.truncation), &beta));
        Ok(out)
    }

    /// `D(e) = ∇e − δe + (1/h)[γ, e]`.
    pub fn fedosov_d(&self, e: &WeylFormElement) -> Result<WeylFormElement> {
        let s = &self.structure;
        let ad = ad_over_h(s.omega(), &self.gamma, e)?;
        Ok(&(&nabla(&self.connection, e) - &delta(s, e)) + &ad)
    }

    fn check_base(&self, u: &WeylFormElement) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: self.dim(),
            });
        }
        if let Some((k, _)) = u.terms().find(|(k, _)| k.fiber_degree() > 0 || k.form_degree() > 0) {
            return Err(Error::WrongDegree(format!(
                "flat sections start from A[[h]], found fiber degree {} form degree {}",
                k.fiber_degree(),
                k.form_degree()
            )));
        }
        Ok(())
    }

    fn check_truncation(&self, n: u32) -> Result<()> {
        if n > self.truncation {
            return Err(Error::GuardExceeded(format!(
                "requested W-degree {n} exceeds the data truncation {}",
                self.truncation
            )));
        }
        Ok(())
    }

    /// `(∇ + (1/h) ad γ)` applied to the pieces of `b`, collected at
    /// W-degree `w − 1`, then `δ̃`.
    fn increment(&self, pieces: &[WeylFormElement], w: usize, v: i32) -> Result<WeylFormElement> {
        let s = &self.structure;
        let mut acc = nabla(&self.connection, &pieces[w - 1]);
        for t in 3..=(w + 1).min(self.gamma_pieces.len() - 1) {
            let j = w + 1 - t;
            if pieces[j].is_zero() || self.gamma_pieces[t].is_zero() {
                continue;
            }
            let ad = ad_over_h(s.omega(), &self.gamma_pieces[t], &pieces[j])?;
            acc = &acc + &ad.truncate(v);
        }
        Ok(delta_tilde(s, &acc).truncate(v))
    }

    /// The unique `b` with `D(b) = 0` and `τ(b) = u`, through W-degree `n`.
    pub fn flat_section(&self, u: &WeylFormElement, n: u32) -> Result<FlatSection> {
        self.check_base(u)?;
        self.check_truncation(n)?;
        let v = n as i32;
        let u = u.truncate(v);
        let mut pieces: Vec<WeylFormElement> = Vec::with_capacity(n as usize + 1);
        for w in 0..=n as usize {
            let mut piece = u.w_component(w as i32).with_validity(v);
            if w > 0 {
                piece = &piece + &self.increment(&pieces, w, v)?;
            }
            pieces.push(piece);
        }
        let mut b = WeylFormElement::zero(self.dim(), v);
        for p in &pieces {
            b = &b + p;
        }
        let section = FlatSection { u, b, truncation: n };
        self.verify_flat_section(&section)?;
        Ok(section)
    }

    /// Literal fixed-point iteration `b ← u + δ̃(∇ + (1/h) ad γ)(b)` from
    /// `b = u`; each round fixes at least one more W-degree.
    pub fn flat_section_by_iteration(&self, u: &WeylFormElement, n: u32) -> Result<FlatSection> {
        self.check_base(u)?;
        self.check_truncation(n)?;
        let v = n as i32;
        let u = u.truncate(v);
        let mut b = u.clone();
        for _ in 0..=n + 1 {
            let next = self.fixed_point_map(&u, &b)?;
            if next == b {
                return Ok(FlatSection { u, b, truncation: n });
            }
            b = next;
        }
        Err(Error::NonTermination(n as usize + 2))
    }

    fn fixed_point_map(&self, u: &WeylFormElement, b: &WeylFormElement) -> Result<WeylFormElement> {
        let s = &self.structure;
        let v = u.validity();
        let inner = &nabla(&self.connection, b) + &ad_over_h(s.omega(), &self.gamma, b)?;
        Ok((u + &delta_tilde(s, &inner)).truncate(v))
    }

    fn verify_flat_section(&self, f: &FlatSection) -> Result<()> {
        if !tau(&f.b).agrees_with(&f.u) {
            return Err(Error::Certification("tau(b) differs from u".into()));
        }
        let fixed = self.fixed_point_map(&f.u, &f.b)?;
        if !fixed.agrees_with(&f.b) {
            return Err(Error::Certification(format!(
                "flat section is not a fixed point: residue {}",
                &fixed - &f.b
            )));
        }
        let db = self.fedosov_d(&f.b)?;
        if !db.is_zero() {
            return Err(Error::Certification(format!("D(b) = {db}")));
        }
        Ok(())
    }
}

/// A flat section `b` over `u ∈ A[[h]]`, valid through W-degree `truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSection {
    pub u: WeylFormElement,
    pub b: WeylFormElement,
    pub truncation: u32,
}

/// Star products `u ⋆ v = τ(b_u ∘ b_v)` through `h^order`, with flat
/// sections of monomials cached and combined linearly.
pub struct StarProduct<'a> {
    data: &'a FedosovData,
    order: u32,
    truncation: u32,
    cache: HashMap<Vec<u32>, WeylFormElement>,
}

impl<'a> StarProduct<'a> {
    /// Uses the internal truncation `N = 2K + 2`.
    pub fn new(data: &'a FedosovData, order: u32) -> Result<Self> {
        Self::with_truncation(data, order, 2 * order + 2)
    }

    pub fn with_truncation(data: &'a FedosovData, order: u32, truncation: u32) -> Result<Self> {
        if truncation < 2 * order {
            return Err(Error::GuardExceeded(format!(
                "truncation {truncation} cannot deliver h^{order}"
            )));
        }
        data.check_truncation(truncation)?;
        Ok(StarProduct {
            data,
            order,
            truncation,
            cache: HashMap::new(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Flat section of a polynomial, assembled from cached monomial sections.
    pub fn section(&mut self, u: &RationalPoly) -> Result<WeylFormElement> {
        let dim = self.data.dim();
        if u.nvars() != dim {
            return Err(Error::DimensionMismatch {
                left: u.nvars(),
                right: dim,
            });
        }
        let v = self.truncation as i32;
        let mut b = WeylFormElement::zero(dim, v);
        for (exps, c) in u.terms() {
            if !self.cache.contains_key(exps) {
                let mono = WeylFormElement::from_poly(RationalPoly::monomial(int(1), exps.clone()), v);
                let f = self.data.flat_section(&mono, self.truncation)?;
                self.cache.insert(exps.clone(), f.b);
            }
            b = &b + &self.cache[exps].scale_rational(c);
        }
        Ok(b)
    }

    pub fn star(&mut self, u: &RationalPoly, v: &RationalPoly) -> Result<HSeries> {
        let bu = self.section(u)?;
        let bv = self.section(v)?;
        let prod = weyl_product(self.data.structure.omega(), &bu, &bv)?;
        HSeries::from_element(&tau(&prod), self.order)
    }

    /// `h`-bilinear extension to series, truncated at `h^order`.
    pub fn star_series(&mut self, a: &HSeries, b: &HSeries) -> Result<HSeries> {
        a.bilinear(b, |x, y| self.star(x, y))
    }
}

/// `u ⋆ v` through `h^order` with internal truncation `2·order + 2`.
pub fn star_product(data: &FedosovData, u: &RationalPoly, v: &RationalPoly, order: u32) -> Result<HSeries> {
    StarProduct::new(data, order)?.star(u, v)
}

/// `μ_t(u, v)` for `t = 0..=order`.
pub fn deformation_coefficients(
    data: &FedosovData,
    u: &RationalPoly,
    v: &RationalPoly,
    order: u32,
) -> Result<Vec<RationalPoly>> {
    Ok(star_product(data, u, v, order)?.coeffs().to_vec())
}

/// `μ_t(u, v) − (−1)^t μ_t(v, u)` for `t = 0..=order`.
pub fn parity_defects(star: &mut StarProduct<'_>, u: &RationalPoly, v: &RationalPoly) -> Result<Vec<RationalPoly>> {
    let uv = star.star(u, v)?;
    let vu = star.star(v, u)?;
    Ok((0..=star.order())
        .map(|t| {
            if t % 2 == 0 {
                uv.coeff(t) - vu.coeff(t)
            } else {
                uv.coeff(t) + vu.coeff(t)
            }
        })
        .collect())
}

/// `(1/h)[b, b']` read through `ε`; for flat sections this is `{ε b, ε b'}`.
pub fn bracket_of_sections(
    structure: &SymplecticStructure,
    b: &WeylFormElement,
    b2: &WeylFormElement,
) -> Result<RationalPoly> {
    let c = div_h(&graded_commutator(structure.omega(), b, b2)?)?;
    Ok(c.coefficient(&TermKey::new(0, FiberMonomial::one(b.dim()), FormMonomial::EMPTY)))
}
