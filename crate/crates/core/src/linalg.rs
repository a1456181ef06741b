//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is a thin newtype over a nalgebra `DMatrix<Complex64>`
//! exposing exactly the operations the quantum layer needs: products,
//! adjoints, traces, Hermitian eigendecomposition and a few entrywise
//! deviation measures used by validity checks.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(
            n,
            n,
            |r, c| if r == c { C64::new(diag[r], 0.0) } else { ZERO },
        )
    }

    /// The rank-one operator |v><v|.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Bounds-checked entry access.
    pub fn get(&self, row: usize, col: usize) -> Option<C64> {
        self.0.get((row, col)).copied()
    }

    pub fn row_major_entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    /// Matrix product, checking conformability.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    /// U A U^dag.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.cols(), other.rows());
        debug_assert_eq!(self.rows(), other.cols());
        let mut acc = ZERO;
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                acc += self.0[(r, c)] * other.0[(c, r)];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A_ab - conj(A_ba)|.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A^dag) / 2.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Eigendecomposition of the Hermitian part, eigenvalues ascending.
    /// Columns of the returned matrix are the matching eigenvectors.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let n = self.rows();
        let vectors = Self::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::NAN)
    }

    /// Principal square root of a Hermitian PSD matrix. Eigenvalues at or
    /// below 64·ε·max(1, λ_max) map to zero.
    pub fn psd_sqrt(&self) -> Self {
        let (values, _) = self.hermitian_eigen();
        let top = values.last().copied().unwrap_or(0.0).abs();
        let floor = 64.0 * f64::EPSILON * top.max(1.0);
        self.psd_function(|x| if x <= floor { 0.0 } else { x.sqrt() })
    }

    /// Applies `f` to the eigenvalues of the Hermitian part.
    pub fn psd_function(&self, f: impl Fn(f64) -> f64) -> Self {
        let (values, vectors) = self.hermitian_eigen();
        let n = self.rows();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in values.iter().enumerate() {
            let weight = f(lambda);
            let col = vectors.0.column(k);
            out += col * col.adjoint() * C64::new(weight, 0.0);
        }
        Self(out)
    }

    pub fn determinant(&self) -> C64 {
        self.0.clone().determinant()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Panics on non-conformable shapes; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Sum of a non-empty list of equally shaped matrices.
pub fn sum_matrices<'a>(
    mut items: impl Iterator<Item = &'a ComplexMatrix>,
) -> Option<ComplexMatrix> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, m| &acc + m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_row_major(
            2,
            3,
            &[
                C64::new(1.0, 2.0),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.0),
                C64::new(-2.0, 0.5),
                C64::new(1.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_is_exact_left_unit() {
        let a = sample();
        let prod = ComplexMatrix::identity(2).matmul(&a).unwrap();
        assert_eq!(prod, a);
    }

    #[test]
    fn get_is_bounds_checked() {
        let a = sample();
        assert_eq!(a.get(1, 2), Some(ZERO));
        assert_eq!(a.get(2, 0), None);
        assert_eq!(a.get(0, 3), None);
    }

    #[test]
    fn row_major_round_trip() {
        let a = sample();
        let again = ComplexMatrix::from_row_major(2, 3, &a.row_major_entries()).unwrap();
        assert_eq!(a, again);
        assert!(ComplexMatrix::from_row_major(2, 2, &a.row_major_entries()).is_err());
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = sample();
        assert!(a.matmul(&a).is_err());
        assert!(a.matmul(&a.adjoint()).is_ok());
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = sample();
        let b = a.adjoint();
        let direct = (&a * &b).trace();
        assert!((a.trace_product(&b) - direct).norm() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let h = ComplexMatrix::from_row_major(
            2,
            2,
            &[
                ONE,
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        let (values, vectors) = h.hermitian_eigen();
        assert!(values[0] <= values[1]);
        let diag = ComplexMatrix::from_real_diagonal(&values);
        let back = diag.conjugate_by(&vectors);
        assert!(back.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let h = ComplexMatrix::from_row_major(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.5, 0.5),
                C64::new(0.5, -0.5),
                ONE,
            ],
        )
        .unwrap();
        let s = h.psd_sqrt();
        assert!((&s * &s).max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn psd_sqrt_clamps_tiny_negative_eigenvalues() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, -1e-13]);
        let s = h.psd_sqrt();
        assert_eq!(s.get(1, 1).unwrap(), ZERO);
    }
}
