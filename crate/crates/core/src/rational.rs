//! Exact rational scalars and small dense rational matrices.
//!
//! Rationals travel through JSON as `"p/q"` strings; integers may also be
//! written without a denominator on input.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 only fails on overflow of both parts; fall back to a
        // quotient of the leading digits.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Canonical `"p/q"` rendering with `q >= 1`.
pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_qvec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(QMatrix { rows: r, cols: c, data })
    }

    /// Elementary matrix `E_ij` (zero-based) scaled by `v`.
    pub fn unit(n: usize, i: usize, j: usize, v: Q) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = v;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        let c = self.cols;
        self.data.iter().enumerate().map(move |(k, v)| (k / c, k % c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, j, v) in self.entries() {
            t.data[j * self.rows + i] = v.clone();
        }
        t
    }

    pub fn scale(&self, s: &Q) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn try_mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols || !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        Ok(&self.try_mul(other)? - &other.try_mul(self)?)
    }

    pub fn is_skew(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self.get(i, j) != &-self.get(j, i).clone() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact determinant by Gaussian elimination with nonzero pivoting.
    pub fn determinant(&self) -> Result<Q> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Ok(Q::zero());
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let pivot = a[col * n + col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pivot;
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = rhs` exactly; `None` when singular or inconsistent.
    pub fn solve(&self, rhs: &[Q]) -> Result<Option<Vec<Q>>> {
        if !self.is_square() || rhs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: rhs.len(),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut b = rhs.to_vec();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Ok(None);
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                b.swap(p, col);
            }
            let pivot = a[col * n + col].clone();
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pivot;
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
        Ok(Some((0..n).map(|i| &b[i] / &a[i * n + i]).collect()))
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }

    /// Row-major `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }

    pub fn max_abs(&self) -> Q {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.try_mul(rhs).expect("matrix shapes must agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2/4").unwrap(), qf(1, 2));
        assert_eq!(parse_rational(" -3 ").unwrap(), q(-3));
        assert_eq!(format_rational(&q(2)), "2/1");
        assert_eq!(format_rational(&qf(-6, 4)), "-3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn determinant_small() {
        let m = QMatrix::from_rows(vec![vec![q(0), q(2)], vec![q(3), q(1)]]).unwrap();
        assert_eq!(m.determinant().unwrap(), q(-6));
        let s = QMatrix::from_rows(vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(0), q(1), q(1)],
        ])
        .unwrap();
        assert_eq!(s.determinant().unwrap(), q(0));
        assert_eq!(QMatrix::identity(4).determinant().unwrap(), q(1));
    }

    #[test]
    fn commutator_of_units() {
        let e12 = QMatrix::unit(3, 0, 1, q(1));
        let e23 = QMatrix::unit(3, 1, 2, q(1));
        let c = e12.commutator(&e23).unwrap();
        assert_eq!(c, QMatrix::unit(3, 0, 2, q(1)));
    }
}
