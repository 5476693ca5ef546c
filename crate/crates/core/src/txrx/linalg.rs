use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::scalar::Scalar;

/// Small dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Panics if rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[_]>::to_vec)
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                    acc + self[(i, j)] * v[j]
                })
            })
            .collect()
    }

    /// Gauss-Jordan inverse with partial pivoting. `None` if a pivot vanishes.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| {
                a[(x, col)]
                    .norm()
                    .partial_cmp(&a[(y, col)].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if !(a[(pivot, col)].norm() > T::zero()) {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for j in 0..n {
                    let aj = a[(col, j)];
                    let ij = inv[(col, j)];
                    a[(i, j)] = a[(i, j)] - f * aj;
                    inv[(i, j)] = inv[(i, j)] - f * ij;
                }
            }
        }
        Some(inv)
    }

    /// 2-norm condition number `σ_max / σ_min`, evaluated in `f64`.
    /// Infinite for rank-deficient or wide matrices.
    pub fn condition_number(&self) -> f64 {
        if self.rows < self.cols || self.cols == 0 {
            return f64::INFINITY;
        }
        let m = DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let z = self[(i, j)];
            Complex::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            )
        });
        let sv = m.singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn inverse_round_trip() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(2.0, 0.0), c(0.5, -0.5)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
            vec![c(-1.0, 2.0), c(0.3, 0.0), c(0.0, 0.0)],
        ]);
        let inv = m.inverse().unwrap();
        let id = &m * &inv;
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!((id[(i, j)] - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ]);
        assert!(m.inverse().is_none() || m.condition_number() > 1e15);
        assert!(m.condition_number() > 1e15);
    }

    #[test]
    fn condition_number_of_diagonal() {
        let m = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.5)],
        ]);
        assert!((m.condition_number() - 4.0).abs() < 1e-12);
        assert!((CMatrix::<f64>::identity(3).condition_number() - 1.0).abs() < 1e-12);
    }
}
