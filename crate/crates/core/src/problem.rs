//! Problem files: a Poisson matrix, optional Christoffel data and a
//! truncation order, as JSON.
//!
//! ```json
//! {"dimension": 2, "poisson": [["0","1"],["-1","0"]],
//!  "christoffel": {"1,1,1": "1"}, "truncation": 8}
//! ```
//!
//! Christoffel keys are 1-based lower indices naming an unordered triple.
//! A value applies to every permutation; when several permutations of the
//! same triple are given their values are averaged. Both situations are
//! recorded in [`Problem::notes`].

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::element::MAX_DIM;
use crate::error::{Error, Result};
use crate::fedosov::FedosovData;
use crate::matrix::PolyMatrix;
use crate::poly::{int, RationalPoly};
use crate::structure::{zero_christoffel, Christoffel, SymplecticConnection, SymplecticStructure};

pub const DEFAULT_TRUNCATION: u32 = 6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dimension: usize,
    poisson: Vec<Vec<String>>,
    #[serde(default)]
    christoffel: BTreeMap<String, String>,
    #[serde(default)]
    truncation: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub dimension: usize,
    pub poisson: PolyMatrix,
    pub christoffel: Christoffel,
    pub truncation: u32,
    pub notes: Vec<String>,
}

fn parse_key(key: &str, dim: usize) -> Result<[usize; 3]> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    let bad = || Error::Problem(format!("christoffel key {key:?} must be three indices in 1..{dim}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut idx = [0usize; 3];
    for (slot, p) in idx.iter_mut().zip(&parts) {
        let i: usize = p.parse().map_err(|_| bad())?;
        if i == 0 || i > dim {
            return Err(bad());
        }
        *slot = i - 1;
    }
    Ok(idx)
}

fn fmt_key(k: &[usize; 3]) -> String {
    format!("{},{},{}", k[0] + 1, k[1] + 1, k[2] + 1)
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Problem(e.to_string()))?;
        let dim = raw.dimension;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Problem(format!("dimension must be in 1..{MAX_DIM}")));
        }
        if raw.poisson.len() != dim || raw.poisson.iter().any(|r| r.len() != dim) {
            return Err(Error::Problem(format!("poisson must be a {dim}x{dim} matrix")));
        }
        let mut rows = Vec::with_capacity(dim);
        for (i, r) in raw.poisson.iter().enumerate() {
            let mut row = Vec::with_capacity(dim);
            for (j, s) in r.iter().enumerate() {
                let p = RationalPoly::parse(s, dim)
                    .map_err(|e| Error::Problem(format!("poisson[{}][{}]: {e}", i + 1, j + 1)))?;
                row.push(p);
            }
            rows.push(row);
        }
        let poisson = PolyMatrix::new(rows, dim);

        let mut notes = Vec::new();
        let mut groups: BTreeMap<[usize; 3], Vec<RationalPoly>> = BTreeMap::new();
        for (key, value) in &raw.christoffel {
            let idx = parse_key(key, dim)?;
            let poly = RationalPoly::parse(value, dim)
                .map_err(|e| Error::Problem(format!("christoffel {key:?}: {e}")))?;
            let mut canon = idx;
            canon.sort_unstable();
            if canon != idx {
                notes.push(format!("christoffel key {} read as {}", fmt_key(&idx), fmt_key(&canon)));
            }
            groups.entry(canon).or_default().push(poly);
        }
        let mut christoffel = zero_christoffel(dim);
        for (k, values) in groups {
            let mut sum = RationalPoly::zero(dim);
            for v in &values {
                sum.add_assign_ref(v);
            }
            if values.iter().any(|v| v != &values[0]) {
                notes.push(format!("christoffel values for {} disagree; averaged", fmt_key(&k)));
            }
            let avg = sum.scale(&(int(1) / int(values.len() as i64)));
            for [a, b, c] in permutations(k) {
                christoffel[a][b][c] = avg.clone();
            }
        }
        Ok(Problem {
            dimension: dim,
            poisson,
            christoffel,
            truncation: raw.truncation.unwrap_or(DEFAULT_TRUNCATION),
            notes,
        })
    }

    pub fn structure(&self) -> Result<SymplecticStructure> {
        SymplecticStructure::validate(self.poisson.clone())
    }

    pub fn connection(&self, structure: &SymplecticStructure) -> Result<SymplecticConnection> {
        SymplecticConnection::validate(structure, &self.christoffel)
    }

    /// Structure, connection and certified Fedosov data at truncation `n`.
    pub fn fedosov(&self, n: u32) -> Result<FedosovData> {
        let s = self.structure()?;
        let c = self.connection(&s)?;
        FedosovData::new(s, c, n)
    }
}

fn permutations([a, b, c]: [usize; 3]) -> [[usize; 3]; 6] {
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_the_flat_problem() {
        let p = Problem::parse(r#"{"dimension": 2, "poisson": [["0","1"],["-1","0"]]}"#).unwrap();
        assert_eq!(p.truncation, DEFAULT_TRUNCATION);
        assert!(p.notes.is_empty());
        let s = p.structure().unwrap();
        assert!(p.connection(&s).unwrap().is_zero());
    }

    #[test]
    fn symmetrizes_christoffel_keys() {
        let p = Problem::parse(
            r#"{"dimension": 2, "poisson": [["0","1"],["-1","0"]],
                "christoffel": {"2,1,1": "x1", "1,1,2": "3*x1", "2, 2, 2": "1"}, "truncation": 4}"#,
        )
        .unwrap();
        let two_x1 = RationalPoly::parse("2*x1", 2).unwrap();
        assert_eq!(p.christoffel[0][1][0], two_x1);
        assert_eq!(p.christoffel[1][0][0], two_x1);
        assert_eq!(p.christoffel[1][1][1], RationalPoly::one(2));
        assert_eq!(
            p.notes,
            vec!["christoffel key 2,1,1 read as 1,1,2", "christoffel values for 1,1,2 disagree; averaged"]
        );
        assert_eq!(p.truncation, 4);
    }

    #[test]
    fn rejects_malformed_files() {
        for text in [
            r#"{"dimension": 3, "poisson": []}"#,
            r#"{"dimension": 2, "poisson": [["0","1"]]}"#,
            r#"{"dimension": 2, "poisson": [["0","1"],["-1","0"]], "christoffel": {"1,3,1": "1"}}"#,
            r#"{"dimension": 2, "poisson": [["0","x3"],["-1","0"]]}"#,
            r#"{"dimension": 2, "poisson": [["0","1"],["-1","0"]], "extra": 1}"#,
            "not json",
        ] {
            assert!(Problem::parse(text).is_err(), "{text}");
        }
    }
}
