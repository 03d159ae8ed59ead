//! Exact symbolic Fedosov quantization on polynomial symplectic structures.
//!
//! Elements of the Weyl-form algebra are finite sums `c(x) h^m y^μ dx^ν`
//! with exact rational polynomial coefficients, each tagged with the
//! W-degree through which it is known exactly.

#[cfg(test)]
macro_rules! assert_agrees {
    ($a:expr, $b:expr) => {{
        let (a, b) = (&$a, &$b);
        assert!(a.agrees_with(b), "{:?}\n  !=\n{:?}", a, b);
    }};
}

pub mod checks;
pub mod element;
pub mod error;
pub mod fedosov;
pub mod fixtures;
pub mod matrix;
pub mod operators;
pub mod oracle;
pub mod poly;
pub mod problem;
pub mod product;
pub mod random;
pub mod series;
pub mod structure;

pub use element::{FiberMonomial, FormMonomial, TermKey, TermRecord, WeylFormElement};
pub use fedosov::{FedosovData, FlatSection, StarProduct};
pub use error::{Error, Result};
pub use matrix::PolyMatrix;
pub use poly::{int, rat, Rational, RationalPoly};
pub use series::HSeries;
pub use structure::{Christoffel, SymplecticConnection, SymplecticStructure};
