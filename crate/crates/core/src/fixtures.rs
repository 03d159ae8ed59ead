//! Ready-made structures and connections used by examples and checks.

use crate::matrix::PolyMatrix;
use crate::poly::RationalPoly;
use crate::structure::{zero_christoffel, SymplecticConnection, SymplecticStructure};

/// Standard constant structure in dimension `2n` with the trivial connection.
pub fn flat_standard(n: usize) -> (SymplecticStructure, SymplecticConnection) {
    let s = SymplecticStructure::standard(n);
    let c = SymplecticConnection::trivial(&s).expect("constant structure");
    (s, c)
}

/// Standard `n = 1` structure with `Γ_111 = 1` and all other lower symbols zero.
pub fn gamma_111() -> (SymplecticStructure, SymplecticConnection) {
    let s = SymplecticStructure::standard(1);
    let mut g = zero_christoffel(2);
    g[0][0][0] = RationalPoly::one(2);
    let c = SymplecticConnection::validate(&s, &g).expect("valid connection");
    (s, c)
}

/// Poisson matrix of the standard structure in four variables pulled back
/// along `x2 -> x2 + x3^2`.
pub fn sheared_poisson() -> PolyMatrix {
    let rows = [
        ["0", "1", "0", "0"],
        ["-1", "0", "0", "2*x3"],
        ["0", "0", "0", "1"],
        ["0", "-2*x3", "-1", "0"],
    ];
    PolyMatrix::new(
        rows.iter()
            .map(|r| r.iter().map(|s| RationalPoly::parse(s, 4).unwrap()).collect())
            .collect(),
        4,
    )
}

/// The sheared structure with its torsion-free parallel connection whose
/// totally symmetric part vanishes.
pub fn sheared() -> (SymplecticStructure, SymplecticConnection) {
    let s = SymplecticStructure::validate(sheared_poisson()).expect("valid structure");
    let c = SymplecticConnection::validate(&s, &zero_christoffel(4)).expect("valid connection");
    (s, c)
}

/// Standard `n = 1` structure with `Γ_111 = Γ_222 = 1`: constant
/// Christoffel symbols with nonzero curvature.
pub fn curved() -> (SymplecticStructure, SymplecticConnection) {
    let s = SymplecticStructure::standard(1);
    let mut g = zero_christoffel(2);
    g[0][0][0] = RationalPoly::one(2);
    g[1][1][1] = RationalPoly::one(2);
    let c = SymplecticConnection::validate(&s, &g).expect("valid connection");
    (s, c)
}
