//! Symplectic data over a polynomial ring `Q[x1..x2n]`.
//!
//! The Poisson matrix `P` gives `{x_i, x_j} = P^{ij}`. Derivations are written
//! in the fiber basis `y_j ↔ ∂_j`, one-forms in the basis `dx_j`.
//!
//! * `♯(dx_j) = ham(x_j) = Σ_k P^{jk} y_k`
//! * `♭` is the inverse of `♯`: `♭(y_k) = Σ_j (P⁻¹)_{kj} dx_j`
//! * `ω(∂_a, ∂_b) = ⟨∂_a, ♭(∂_b)⟩ = (P⁻¹)_{ba}`
//!
//! The form matrix is derived from the pairing and then checked against
//! `ω(ham x_i, ham x_j) = {x_i, x_j}` before the structure is accepted.

use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{rat, RationalPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticStructure {
    n: usize,
    poisson: PolyMatrix,
    omega: PolyMatrix,
    /// Row `j`: coefficients of `♯(dx_j)` in the `y` basis.
    sharp: PolyMatrix,
    /// Row `k`: coefficients of `♭(y_k)` in the `dx` basis.
    flat: PolyMatrix,
}

impl SymplecticStructure {
    /// The standard structure `{x_i, x_{n+i}} = 1` on `2n` variables.
    pub fn standard(n: usize) -> Self {
        let dim = 2 * n;
        let mut p = PolyMatrix::zeros(dim, dim);
        for i in 0..n {
            p.set(i, n + i, RationalPoly::from_int(1, dim));
            p.set(n + i, i, RationalPoly::from_int(-1, dim));
        }
        Self::validate(p).expect("standard structure is symplectic")
    }

    pub fn validate(poisson: PolyMatrix) -> Result<Self> {
        let dim = poisson.size();
        if dim == 0 || dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        if poisson.nvars() != dim {
            return Err(Error::DimensionMismatch {
                left: poisson.nvars(),
                right: dim,
            });
        }
        for i in 0..dim {
            for j in i..dim {
                if !(poisson.get(i, j) + poisson.get(j, i)).is_zero() {
                    return Err(Error::NotAntisymmetric { row: i + 1, col: j + 1 });
                }
            }
        }
        check_jacobi(&poisson)?;
        let inverse = poisson
            .polynomial_inverse()
            .map_err(|det| Error::NoPolynomialInverse {
                determinant: det.to_string(),
            })?;
        let sharp = poisson.clone();
        let flat = inverse.clone();
        // ω_{ab} = ⟨∂_a, ♭(∂_b)⟩ = (P⁻¹)_{ba}
        let omega = inverse.transpose();
        let s = SymplecticStructure {
            n: dim / 2,
            poisson,
            omega,
            sharp,
            flat,
        };
        s.check_consistency()?;
        Ok(s)
    }

    fn check_consistency(&self) -> Result<()> {
        let dim = self.dim();
        let id = PolyMatrix::identity(dim, dim);
        if self.sharp.mul(&self.flat) != id || self.flat.mul(&self.sharp) != id {
            return Err(Error::Inconsistent("sharp and flat are not mutually inverse".into()));
        }
        for i in 0..dim {
            for j in 0..dim {
                let hi = self.ham(&RationalPoly::var(i, dim), 1);
                let hj = self.ham(&RationalPoly::var(j, dim), 1);
                let w = self.omega_pairing(&hi, &hj)?;
                if &w != self.poisson.get(i, j) {
                    return Err(Error::Inconsistent(format!(
                        "omega(ham x{}, ham x{}) = {} but {{x{}, x{}}} = {}",
                        i + 1,
                        j + 1,
                        w,
                        i + 1,
                        j + 1,
                        self.poisson.get(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn poisson(&self) -> &PolyMatrix {
        &self.poisson
    }

    pub fn omega(&self) -> &PolyMatrix {
        &self.omega
    }

    pub fn sharp_matrix(&self) -> &PolyMatrix {
        &self.sharp
    }

    pub fn flat_matrix(&self) -> &PolyMatrix {
        &self.flat
    }

    /// `{f, g} = Σ P^{ij} ∂_i f ∂_j g`.
    pub fn poisson_bracket(&self, f: &RationalPoly, g: &RationalPoly) -> RationalPoly {
        let dim = self.dim();
        let mut acc = RationalPoly::zero(dim);
        for i in 0..dim {
            let fi = f.derivative(i);
            if fi.is_zero() {
                continue;
            }
            for j in 0..dim {
                let p = self.poisson.get(i, j);
                if p.is_zero() {
                    continue;
                }
                acc.add_assign_ref(&fi.mul_ref(p).mul_ref(&g.derivative(j)));
            }
        }
        acc
    }

    /// `ham f = Σ_j (Σ_i P^{ij} ∂_i f) y_j`.
    pub fn ham(&self, f: &RationalPoly, validity: i32) -> WeylFormElement {
        let dim = self.dim();
        let mut out = WeylFormElement::zero(dim, validity);
        for i in 0..dim {
            let fi = f.derivative(i);
            if fi.is_zero() {
                continue;
            }
            for j in 0..dim {
                out.add_term(y_key(j, dim), fi.mul_ref(self.poisson.get(i, j)));
            }
        }
        out
    }

    /// Applies a fiber-linear element, read as a derivation, to `g`.
    pub fn apply_derivation(&self, x: &WeylFormElement, g: &RationalPoly) -> Result<RationalPoly> {
        let mut acc = RationalPoly::zero(self.dim());
        for (k, c) in x.terms() {
            let j = linear_index(k).ok_or_else(|| {
                Error::WrongDegree("derivation must be fiber-linear with no h or forms".into())
            })?;
            acc.add_assign_ref(&c.mul_ref(&g.derivative(j)));
        }
        Ok(acc)
    }

    /// `ω(X, Y)` for fiber-linear `X`, `Y`.
    pub fn omega_pairing(&self, x: &WeylFormElement, y: &WeylFormElement) -> Result<RationalPoly> {
        let mut acc = RationalPoly::zero(self.dim());
        for (kx, cx) in x.terms() {
            let a = linear_index(kx).ok_or_else(|| Error::WrongDegree("omega expects fiber-linear input".into()))?;
            for (ky, cy) in y.terms() {
                let b = linear_index(ky)
                    .ok_or_else(|| Error::WrongDegree("omega expects fiber-linear input".into()))?;
                acc.add_assign_ref(&cx.mul_ref(cy).mul_ref(self.omega.get(a, b)));
            }
        }
        Ok(acc)
    }

    /// `♯` on one-forms (terms with no fiber part and form degree 1).
    pub fn sharp(&self, nu: &WeylFormElement) -> Result<WeylFormElement> {
        let dim = self.dim();
        let mut out = WeylFormElement::zero(dim, nu.validity() + 1);
        for (k, c) in nu.terms() {
            if k.fiber_degree() != 0 || k.form_degree() != 1 {
                return Err(Error::WrongDegree(format!(
                    "sharp expects a one-form, found fiber degree {} and form degree {}",
                    k.fiber_degree(),
                    k.form_degree()
                )));
            }
            let j = k.form.indices()[0];
            for l in 0..dim {
                let key = TermKey::new(k.h, FiberMonomial::var(l, dim), FormMonomial::EMPTY);
                out.add_term(key, c.mul_ref(self.sharp.get(j, l)));
            }
        }
        Ok(out)
    }

    /// `♭` on fiber-linear elements.
    pub fn flat(&self, x: &WeylFormElement) -> Result<WeylFormElement> {
        let dim = self.dim();
        let mut out = WeylFormElement::zero(dim, x.validity() - 1);
        for (k, c) in x.terms() {
            if k.fiber_degree() != 1 || k.form_degree() != 0 {
                return Err(Error::WrongDegree(format!(
                    "flat expects a fiber-linear element, found fiber degree {} and form degree {}",
                    k.fiber_degree(),
                    k.form_degree()
                )));
            }
            let b = k.fiber.exponents().iter().position(|&e| e == 1).expect("linear");
            for j in 0..dim {
                let key = TermKey::new(k.h, FiberMonomial::one(dim), FormMonomial::single(j));
                out.add_term(key, c.mul_ref(self.flat.get(b, j)));
            }
        }
        Ok(out)
    }
}

fn y_key(j: usize, dim: usize) -> TermKey {
    TermKey::new(0, FiberMonomial::var(j, dim), FormMonomial::EMPTY)
}

fn linear_index(k: &TermKey) -> Option<usize> {
    if k.h != 0 || k.form_degree() != 0 || k.fiber_degree() != 1 {
        return None;
    }
    k.fiber.exponents().iter().position(|&e| e == 1)
}

fn check_jacobi(p: &PolyMatrix) -> Result<()> {
    let dim = p.size();
    let term = |i: usize, j: usize, k: usize| -> RationalPoly {
        let mut acc = RationalPoly::zero(dim);
        for l in 0..dim {
            acc.add_assign_ref(&p.get(i, l).mul_ref(&p.get(j, k).derivative(l)));
        }
        acc
    };
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                let r = &(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j);
                if !r.is_zero() {
                    return Err(Error::Jacobi(i + 1, j + 1, k + 1, r.to_string()));
                }
            }
        }
    }
    Ok(())
}

/// A torsion-free connection parallel to ω, in coordinates.
///
/// `lower[a][b][c] = ω(∇_{∂a} ∂b, ∂c) = Σ_d Γ^d_{ab} ω_{dc}` and
/// `upper[d][a][b] = Γ^d_{ab}` with `∇_{∂a} ∂b = Σ_d Γ^d_{ab} ∂_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticConnection {
    dim: usize,
    lower: Vec<Vec<Vec<RationalPoly>>>,
    upper: Vec<Vec<Vec<RationalPoly>>>,
}

pub type Christoffel = Vec<Vec<Vec<RationalPoly>>>;

pub fn zero_christoffel(dim: usize) -> Christoffel {
    vec![vec![vec![RationalPoly::zero(dim); dim]; dim]; dim]
}

impl SymplecticConnection {
    /// The connection with vanishing symmetric part.
    pub fn trivial(structure: &SymplecticStructure) -> Result<Self> {
        Self::validate(structure, &zero_christoffel(structure.dim()))
    }

    /// Builds and checks a connection from the totally symmetric array `sym`.
    ///
    /// For constant ω the lower Christoffel symbols are exactly `sym`. In
    /// general a torsion-free parallel connection has
    /// `Γ_{abc} - Γ_{acb} = ∂_a ω_{bc}`, so the ω-determined part
    /// `(∂_a ω_{bc} + ∂_b ω_{ac}) / 3` is added to `sym`.
    pub fn validate(structure: &SymplecticStructure, sym: &Christoffel) -> Result<Self> {
        let dim = structure.dim();
        if sym.len() != dim || sym.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
            return Err(Error::DimensionMismatch {
                left: sym.len(),
                right: dim,
            });
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = &sym[a][b][c];
                    if v != &sym[b][a][c] || v != &sym[a][c][b] {
                        return Err(Error::NotSymmetric(a + 1, b + 1, c + 1));
                    }
                }
            }
        }
        let omega = structure.omega();
        let third = rat(1, 3);
        let mut lower = sym.clone();
        for (a, plane) in lower.iter_mut().enumerate() {
            for (b, row) in plane.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    let w = &omega.get(b, c).derivative(a) + &omega.get(a, c).derivative(b);
                    entry.add_scaled(&w, &third);
                }
            }
        }
        let omega_inv = omega
            .polynomial_inverse()
            .map_err(|det| Error::NoPolynomialInverse {
                determinant: det.to_string(),
            })?;
        // Γ^d_{ab} = Σ_c Γ_{abc} (ω⁻¹)_{cd}
        let mut upper = zero_christoffel(dim);
        for (d, plane) in upper.iter_mut().enumerate() {
            for (a, row) in plane.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    for c in 0..dim {
                        entry.add_assign_ref(&lower[a][b][c].mul_ref(omega_inv.get(c, d)));
                    }
                }
            }
        }
        let conn = SymplecticConnection { dim, lower, upper };
        conn.check(structure)?;
        Ok(conn)
    }

    /// Torsion-free and parallel identities, checked symbolically.
    pub fn check(&self, structure: &SymplecticStructure) -> Result<()> {
        let dim = self.dim;
        let omega = structure.omega();
        for c in 0..dim {
            for a in 0..dim {
                for b in a + 1..dim {
                    let r = &self.upper[c][a][b] - &self.upper[c][b][a];
                    if !r.is_zero() {
                        return Err(Error::Torsion(a + 1, b + 1, r.to_string()));
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let mut rhs = RationalPoly::zero(dim);
                    for d in 0..dim {
                        rhs.add_assign_ref(&self.upper[d][a][b].mul_ref(omega.get(d, c)));
                        rhs.add_assign_ref(&self.upper[d][a][c].mul_ref(omega.get(b, d)));
                    }
                    let r = &omega.get(b, c).derivative(a) - &rhs;
                    if !r.is_zero() {
                        return Err(Error::NotParallel(a + 1, b + 1, c + 1, r.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ_{abc}` (zero-based).
    pub fn lower(&self, a: usize, b: usize, c: usize) -> &RationalPoly {
        &self.lower[a][b][c]
    }

    /// `Γ^c_{ab}` (zero-based).
    pub fn upper(&self, c: usize, a: usize, b: usize) -> &RationalPoly {
        &self.upper[c][a][b]
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().flatten().flatten().all(RationalPoly::is_zero)
    }
}
