//! Square matrices with polynomial entries.

use num_traits::Zero;

use crate::poly::{int, RationalPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    nvars: usize,
    rows: Vec<Vec<RationalPoly>>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<RationalPoly>>, nvars: usize) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
        PolyMatrix { nvars, rows }
    }

    pub fn zeros(size: usize, nvars: usize) -> Self {
        PolyMatrix {
            nvars,
            rows: vec![vec![RationalPoly::zero(nvars); size]; size],
        }
    }

    pub fn identity(size: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(size, nvars);
        for i in 0..size {
            m.rows[i][i] = RationalPoly::one(nvars);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalPoly {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: RationalPoly) {
        self.rows[i][j] = p;
    }

    pub fn rows(&self) -> &[Vec<RationalPoly>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let mut t = Self::zeros(n, self.nvars);
        for i in 0..n {
            for j in 0..n {
                t.rows[j][i] = self.rows[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        let n = self.size();
        let mut out = Self::zeros(n, self.nvars);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RationalPoly::zero(self.nvars);
                for k in 0..n {
                    acc.add_assign_ref(&self.rows[i][k].mul_ref(&other.rows[k][j]));
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            nvars: self.nvars,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|p| -p).collect())
                .collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.rows.iter().flatten().all(RationalPoly::is_constant)
    }

    /// Determinant by cofactor expansion; intended for the small sizes used here.
    pub fn determinant(&self) -> RationalPoly {
        let idx: Vec<usize> = (0..self.size()).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> RationalPoly {
        match rows.len() {
            0 => RationalPoly::one(self.nvars),
            1 => self.rows[rows[0]][cols[0]].clone(),
            _ => {
                let r = rows[0];
                let sub_rows = &rows[1..];
                let mut acc = RationalPoly::zero(self.nvars);
                for (k, &c) in cols.iter().enumerate() {
                    let entry = &self.rows[r][c];
                    if entry.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = entry.mul_ref(&self.minor_det(sub_rows, &sub_cols));
                    if k % 2 == 0 {
                        acc.add_assign_ref(&term);
                    } else {
                        acc = &acc - &term;
                    }
                }
                acc
            }
        }
    }

    /// Inverse over the polynomial ring: exists iff the determinant is a
    /// nonzero constant. Returns the determinant on failure.
    pub fn polynomial_inverse(&self) -> Result<PolyMatrix, RationalPoly> {
        let det = self.determinant();
        let c = match det.as_constant() {
            Some(c) if !c.is_zero() => c,
            _ => return Err(det),
        };
        let n = self.size();
        let inv_det = int(1) / c;
        let all: Vec<usize> = (0..n).collect();
        let mut out = Self::zeros(n, self.nvars);
        for i in 0..n {
            for j in 0..n {
                // inverse[i][j] = (-1)^{i+j} minor(j, i) / det
                let rows: Vec<usize> = all.iter().copied().filter(|&x| x != j).collect();
                let cols: Vec<usize> = all.iter().copied().filter(|&x| x != i).collect();
                let mut cof = self.minor_det(&rows, &cols).scale(&inv_det);
                if (i + j) % 2 == 1 {
                    cof = -&cof;
                }
                out.rows[i][j] = cof;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(rows: &[&[&str]], nvars: usize) -> PolyMatrix {
        PolyMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|s| RationalPoly::parse(s, nvars).unwrap()).collect())
                .collect(),
            nvars,
        )
    }

    #[test]
    fn inverse_of_unimodular() {
        let m = parse(
            &[
                &["0", "1", "0", "0"],
                &["-1", "0", "0", "2*x3"],
                &["0", "0", "0", "1"],
                &["0", "-2*x3", "-1", "0"],
            ],
            4,
        );
        let inv = m.polynomial_inverse().unwrap();
        assert_eq!(m.mul(&inv), PolyMatrix::identity(4, 4));
        assert_eq!(inv.mul(&m), PolyMatrix::identity(4, 4));
    }

    #[test]
    fn non_unit_determinant() {
        let m = parse(&[&["0", "x1"], &["-x1", "0"]], 2);
        let det = m.polynomial_inverse().unwrap_err();
        assert_eq!(det.to_string(), "x1^2");
    }
}
