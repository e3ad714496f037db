//! Scalar algebra and dense matrix arithmetic.
//!
//! Two semirings are supported: the Boolean semiring `({0,1}, or, and)` and the
//! real numbers with ordinary addition and multiplication. Scalars are stored as
//! `f64` in both cases; in Boolean mode every stored value is exactly `0.0` or
//! `1.0` and the operations are the logical ones.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiringKind {
    Boolean,
    Real,
}

impl SemiringKind {
    pub fn zero(self) -> f64 {
        0.0
    }

    pub fn one(self) -> f64 {
        1.0
    }

    #[inline]
    pub fn add(self, a: f64, b: f64) -> f64 {
        match self {
            SemiringKind::Boolean => bool_to_scalar(a != 0.0 || b != 0.0),
            SemiringKind::Real => a + b,
        }
    }

    #[inline]
    pub fn mul(self, a: f64, b: f64) -> f64 {
        match self {
            SemiringKind::Boolean => bool_to_scalar(a != 0.0 && b != 0.0),
            SemiringKind::Real => a * b,
        }
    }

    /// Checks that `value` is a legal scalar of this semiring.
    pub fn check(self, value: f64) -> Result<()> {
        match self {
            SemiringKind::Boolean if value != 0.0 && value != 1.0 => Err(Error::Parameter(
                format!("boolean scalar must be 0 or 1, got {value}"),
            )),
            SemiringKind::Real if !value.is_finite() => Err(Error::Parameter(format!(
                "real scalar must be finite, got {value}"
            ))),
            _ => Ok(()),
        }
    }

    /// Sum of a sequence of scalars in this semiring.
    pub fn sum(self, values: impl IntoIterator<Item = f64>) -> f64 {
        values
            .into_iter()
            .fold(self.zero(), |acc, v| self.add(acc, v))
    }
}

fn bool_to_scalar(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Dense row-major matrix over a [`SemiringKind`].
#[derive(Clone, PartialEq)]
pub struct Matrix {
    semiring: SemiringKind,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(semiring: SemiringKind, rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for &v in &data {
            semiring.check(v)?;
        }
        Ok(Matrix {
            semiring,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from a list of rows, all of which must share one length.
    pub fn from_rows(semiring: SemiringKind, rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "ragged rows: expected length {cols}, found {}",
                bad.len()
            )));
        }
        Matrix::new(semiring, rows.len(), cols, rows.concat())
    }

    pub fn zeros(semiring: SemiringKind, rows: usize, cols: usize) -> Result<Self> {
        Matrix::new(semiring, rows, cols, vec![semiring.zero(); rows * cols])
    }

    pub fn identity(semiring: SemiringKind, n: usize) -> Result<Self> {
        let mut m = Matrix::zeros(semiring, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = semiring.one();
        }
        Ok(m)
    }

    pub fn semiring(&self) -> SemiringKind {
        self.semiring
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Replaces one row. Values are checked against the semiring.
    pub fn set_row(&mut self, row: usize, values: &[f64]) -> Result<()> {
        if row >= self.rows {
            return Err(Error::Parameter(format!(
                "row index {row} out of range for {} rows",
                self.rows
            )));
        }
        if values.len() != self.cols {
            return Err(Error::Shape(format!(
                "row of length {} does not fit {} columns",
                values.len(),
                self.cols
            )));
        }
        for &v in values {
            self.semiring.check(v)?;
        }
        self.data[row * self.cols..(row + 1) * self.cols].copy_from_slice(values);
        Ok(())
    }

    /// Exchanges row `row` of `self` with row `row` of `other`.
    pub(crate) fn swap_row_with(&mut self, other: &mut Matrix, row: usize) {
        debug_assert_eq!(self.cols, other.cols);
        let range = row * self.cols..(row + 1) * self.cols;
        self.data[range.clone()].swap_with_slice(&mut other.data[range]);
    }

    fn same_semiring(&self, other: &Matrix) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(Error::SemiringMismatch {
                left: self.semiring,
                right: other.semiring,
            });
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_semiring(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let k = self.semiring;
        let mut data = vec![k.zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cell = &mut data[i * other.cols + j];
                    *cell = k.add(*cell, k.mul(a, other.get(l, j)));
                }
            }
        }
        Ok(Matrix {
            semiring: k,
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_semiring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let k = self.semiring;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| k.add(a, b))
            .collect();
        Ok(Matrix {
            semiring: k,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!(
                "row vector of length {} cannot multiply {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let k = self.semiring;
        let mut out = vec![k.zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (j, cell) in out.iter_mut().enumerate() {
                *cell = k.add(*cell, k.mul(vi, self.get(i, j)));
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{:?}>{:?}", self.semiring, self.to_rows())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.data.chunks(self.cols).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>10.6}")).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Computes the scalar `row · m · col` in the semiring of `m`.
pub fn bilinear_form(row: &[f64], m: &Matrix, col: &[f64]) -> Result<f64> {
    if m.cols() != col.len() {
        return Err(Error::Shape(format!(
            "column vector of length {} does not match {} columns",
            col.len(),
            m.cols()
        )));
    }
    let left = m.left_mul(row)?;
    Ok(dot(m.semiring(), &left, col))
}

/// Semiring inner product of two equal-length slices.
pub(crate) fn dot(k: SemiringKind, a: &[f64], b: &[f64]) -> f64 {
    k.sum(a.iter().zip(b).map(|(&x, &y)| k.mul(x, y)))
}

/// Hölder norm `(Σ|xᵢ|^α)^(1/α)`; `alpha = f64::INFINITY` gives the max norm.
pub fn hoelder_norm(v: &[f64], alpha: f64) -> Result<f64> {
    check_exponent(alpha)?;
    if alpha.is_infinite() {
        return Ok(v.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    }
    if alpha == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    // Scale by the largest magnitude so large exponents do not overflow.
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / scale).powf(alpha)).sum();
    Ok(scale * sum.powf(alpha.recip()))
}

pub fn check_exponent(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::Parameter(format!(
            "Hölder exponent must be >= 1 or infinite, got {alpha}"
        )));
    }
    Ok(())
}
