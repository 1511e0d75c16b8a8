//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Cholesky factor of a symmetric positive-definite matrix, with one retry
/// after adding `1e-12 · trace / k` to the diagonal.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    /// Whether the ridge was needed.
    pub ridged: bool,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("{}×{} matrix is not square", m.nrows(), m.ncols())));
        }
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Ok(Self { chol, ridged: false });
        }
        let k = m.nrows().max(1) as f64;
        let ridge = 1e-12 * m.trace().abs() / k;
        let mut r = m.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += ridge;
        }
        Cholesky::new(r)
            .map(|chol| Self { chol, ridged: true })
            .ok_or_else(|| Error::Singular("covariance matrix is not positive definite even after ridge".into()))
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    /// `L^{-1} b` for the lower factor `L` (`M = L L'`); whitens the columns of `b`.
    pub fn whiten(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = b.clone();
        self.chol.l_dirty().solve_lower_triangular_mut(&mut out);
        out
    }

    /// `v' M^{-1} v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        let l = self.chol.l_dirty();
        // forward substitution on the lower factor; ||L^{-1} v||^2
        let n = v.len();
        let mut y = vec![0.0; n];
        let mut acc = 0.0;
        for i in 0..n {
            let mut s = v[i];
            for j in 0..i {
                s -= l[(i, j)] * y[j];
            }
            y[i] = s / l[(i, i)];
            acc += y[i] * y[i];
        }
        acc
    }
}

/// Least-squares coefficients of `y` on `x` (columns of `y` treated
/// separately). Fails when `x` is numerically rank deficient.
pub fn ols(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != y.nrows() {
        return Err(Error::Dimension(format!("ols: x has {} rows, y has {}", x.nrows(), y.nrows())));
    }
    if x.nrows() < x.ncols() {
        return Err(Error::Singular(format!("ols: {} rows for {} regressors", x.nrows(), x.ncols())));
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * (x.nrows().max(x.ncols()) as f64) * f64::EPSILON * 16.0;
    if svd.singular_values.iter().any(|&s| s <= tol) {
        return Err(Error::Singular("regressor matrix is rank deficient".into()));
    }
    svd.solve(y, tol).map_err(|e| Error::Singular(e.to_string()))
}

/// Column means of a matrix.
pub fn column_means(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows().max(1) as f64;
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n))
}

/// Subtract column means.
pub fn demean(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mu = column_means(m);
    let mut out = m.clone();
    for (j, mut c) in out.column_iter_mut().enumerate() {
        c.add_scalar_mut(-mu[j]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_form_matches_explicit_inverse() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let v = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let f = SpdFactor::new(&m).unwrap();
        let direct = (v.transpose() * m.clone().try_inverse().unwrap() * &v)[(0, 0)];
        assert!((f.quad_form(&v) - direct).abs() < 1e-12);
        assert!(!f.ridged);
    }

    #[test]
    fn ridge_rescues_semidefinite_once() {
        // rank one: ridge makes it definite
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let f = SpdFactor::new(&m).unwrap();
        assert!(f.ridged);
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(SpdFactor::new(&neg).is_err());
    }

    #[test]
    fn ols_recovers_exact_fit() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DMatrix::from_column_slice(4, 1, &[1.0, 3.0, 5.0, 7.0]);
        let b = ols(&x, &y).unwrap();
        assert!((b[(0, 0)] - 1.0).abs() < 1e-12 && (b[(1, 0)] - 2.0).abs() < 1e-12);
        let bad = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(ols(&bad, &DMatrix::zeros(3, 1)).is_err());
    }
}
