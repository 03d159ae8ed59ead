//! Truncated power series in `h` with polynomial coefficients.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::element::WeylFormElement;
use crate::error::{Error, Result};
use crate::poly::RationalPoly;

/// `Σ_{t ≤ order} h^t c_t`, exact modulo `h^{order+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSeries {
    nvars: usize,
    coeffs: Vec<RationalPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub h: u32,
    pub coeff: String,
}

impl HSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        HSeries {
            nvars,
            coeffs: vec![RationalPoly::zero(nvars); order as usize + 1],
        }
    }

    pub fn from_poly(p: RationalPoly, order: u32) -> Self {
        let mut s = Self::zero(p.nvars(), order);
        s.coeffs[0] = p;
        s
    }

    pub fn from_coeffs(nvars: usize, coeffs: Vec<RationalPoly>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the h^0 slot");
        HSeries { nvars, coeffs }
    }

    /// Reads the fiber-free, form-free part of `e` through `h^order`.
    /// Fails if the element is not known that far.
    pub fn from_element(e: &WeylFormElement, order: u32) -> Result<Self> {
        if e.validity() < 2 * order as i32 {
            return Err(Error::GuardExceeded(format!(
                "element valid through W-degree {} cannot deliver h^{}",
                e.validity(),
                order
            )));
        }
        let mut s = Self::zero(e.dim(), order);
        for (k, c) in e.terms() {
            if k.fiber_degree() == 0 && k.form_degree() == 0 && k.h <= order {
                s.coeffs[k.h as usize].add_assign_ref(c);
            }
        }
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeff(&self, t: u32) -> &RationalPoly {
        &self.coeffs[t as usize]
    }

    pub fn coeffs(&self) -> &[RationalPoly] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, t: u32, p: RationalPoly) {
        self.coeffs[t as usize] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RationalPoly::is_zero)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let keep = (order.min(self.order()) + 1) as usize;
        HSeries {
            nvars: self.nvars,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&RationalPoly, &RationalPoly) -> RationalPoly) -> Self {
        let order = self.order().min(other.order());
        HSeries {
            nvars: self.nvars,
            coeffs: (0..=order as usize).map(|t| f(&self.coeffs[t], &other.coeffs[t])).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// Extends a bilinear operation on polynomials `h`-bilinearly to series.
    pub fn bilinear(
        &self,
        other: &Self,
        mut op: impl FnMut(&RationalPoly, &RationalPoly) -> Result<HSeries>,
    ) -> Result<Self> {
        let order = self.order().min(other.order());
        let mut out = Self::zero(self.nvars, order);
        for i in 0..=order {
            for j in 0..=order - i {
                let (a, b) = (self.coeff(i), other.coeff(j));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let prod = op(a, b)?;
                for t in 0..=(order - i - j).min(prod.order()) {
                    out.coeffs[(i + j + t) as usize].add_assign_ref(prod.coeff(t));
                }
            }
        }
        Ok(out)
    }

    /// Nonzero coefficients as `{h, coeff}` records.
    pub fn to_records(&self) -> Vec<SeriesRecord> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| SeriesRecord {
                h: t as u32,
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }
}

impl fmt::Display for HSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| match t {
                0 => c.to_string(),
                1 => format!("({c})*h"),
                _ => format!("({c})*h^{t}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0 + O(h^{})", self.order() + 1)
        } else {
            write!(f, "{} + O(h^{})", parts.join(" + "), self.order() + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RationalPoly {
        RationalPoly::parse(s, 2).unwrap()
    }

    #[test]
    fn records_skip_zero_coefficients() {
        let s = HSeries::from_coeffs(2, vec![p("x1*x2"), p("1/2"), p("0")]);
        assert_eq!(s.to_json(), r#"[{"h":0,"coeff":"x1*x2"},{"h":1,"coeff":"1/2"}]"#);
        assert_eq!(s.to_string(), "x1*x2 + (1/2)*h + O(h^3)");
        assert_eq!(HSeries::zero(2, 1).to_json(), "[]");
    }

    #[test]
    fn bilinear_extension_truncates() {
        let a = HSeries::from_coeffs(2, vec![p("x1"), p("1")]);
        let b = HSeries::from_coeffs(2, vec![p("x2"), p("0")]);
        let prod = a
            .bilinear(&b, |u, v| Ok(HSeries::from_coeffs(2, vec![u * v, p("1")])))
            .unwrap();
        assert_eq!(prod.coeffs(), &[p("x1*x2"), p("x2 + 1")]);
    }
}
