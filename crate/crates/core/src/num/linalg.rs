//! Thin dense complex-matrix layer over nalgebra: solves, least squares,
//! inversion and a condition-number estimate for frame diagnostics.

use super::NumError;
use crate::C64;
use nalgebra::DMatrix;

/// Dense complex matrix used for period systems, chart/fiber frames and
/// least-squares fits.
#[derive(Debug, Clone)]
pub struct CMatrix {
    inner: DMatrix<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = DMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        CMatrix { inner: m }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.inner[(i, j)] = v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.inner[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Solve the square system `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, NumError> {
        assert_eq!(self.rows(), self.cols());
        assert_eq!(b.len(), self.rows());
        let rhs = nalgebra::DVector::from_column_slice(b);
        let lu = self.inner.clone().lu();
        lu.solve(&rhs)
            .map(|x| x.iter().copied().collect())
            .ok_or(NumError::SingularSystem)
    }

    pub fn inverse(&self) -> Result<CMatrix, NumError> {
        self.inner
            .clone()
            .try_inverse()
            .map(|inner| CMatrix { inner })
            .ok_or(NumError::SingularSystem)
    }

    pub fn det(&self) -> C64 {
        self.inner.clone().lu().determinant()
    }

    /// Least squares solution of the (possibly tall) system `A x ~ b`,
    /// returning `(x, residual_norm)`.
    pub fn lstsq(&self, b: &[C64]) -> Result<(Vec<C64>, f64), NumError> {
        assert_eq!(b.len(), self.rows());
        // normal equations are adequate at the sizes and conditioning here,
        // with a small Tikhonov floor to survive rank deficiency
        let at = self.inner.adjoint();
        let mut ata = &at * &self.inner;
        let scale = ata.diagonal().iter().map(|d| d.norm()).fold(0.0, f64::max);
        for i in 0..ata.nrows() {
            ata[(i, i)] += C64::new(scale * 1e-14, 0.0);
        }
        let rhs = &at * nalgebra::DVector::from_column_slice(b);
        let x = ata.lu().solve(&rhs).ok_or(NumError::SingularSystem)?;
        let resid = &self.inner * &x - nalgebra::DVector::from_column_slice(b);
        Ok((x.iter().copied().collect(), resid.norm()))
    }

    /// 1-norm condition estimate `||A||_1 ||A^{-1}||_1`.
    pub fn cond_1(&self) -> f64 {
        let norm1 = |m: &DMatrix<C64>| -> f64 {
            (0..m.ncols())
                .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        match self.inner.clone().try_inverse() {
            Some(inv) => norm1(&self.inner) * norm1(&inv),
            None => f64::INFINITY,
        }
    }
}
