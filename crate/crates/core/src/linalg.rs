//! Small dense kernels shared by the solvers.

use nalgebra::{DMatrix, DVector};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Squared Euclidean distance, summed in feature order.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Solves `a x = b` for symmetric positive semi-definite `a` through the
/// pseudo-inverse.
pub(crate) fn pinv_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let tol = svd.singular_values.max() * (a.nrows().max(1) as f64) * f64::EPSILON;
    svd.solve(&rhs, tol)
        .map(|x| x.iter().copied().collect())
        .unwrap_or_else(|_| vec![0.0; b.len()])
}

/// Lower-triangular Cholesky factor that grows one row at a time.
#[derive(Debug, Clone, Default)]
pub(crate) struct GrowingCholesky {
    /// Row `i` holds `L[i][0..=i]`.
    rows: Vec<Vec<f64>>,
}

impl GrowingCholesky {
    /// Appends a variable with cross products `cross` against the existing
    /// ones and squared norm `diag`. Returns `false` (leaving the factor
    /// unchanged) when the new variable is numerically dependent.
    pub(crate) fn push(&mut self, cross: &[f64], diag: f64, rel_tol: f64) -> bool {
        debug_assert_eq!(cross.len(), self.rows.len());
        let mut l = Vec::with_capacity(cross.len() + 1);
        for (i, row) in self.rows.iter().enumerate() {
            let s = cross[i] - dot(&row[..i], &l[..i]);
            l.push(s / row[i]);
        }
        let d2 = diag - dot(&l, &l);
        if !(d2 > rel_tol * diag) {
            return false;
        }
        l.push(d2.sqrt());
        self.rows.push(l);
        true
    }

    /// Solves `L Lᵀ x = b`.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.rows.len();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let row = &self.rows[i];
            z[i] = (b[i] - dot(&row[..i], &z[..i])) / row[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.rows[k][i] * x[k];
            }
            x[i] = s / self.rows[i][i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // A = [[4, 2, 0], [2, 5, 1], [0, 1, 3]]
        let mut c = GrowingCholesky::default();
        assert!(c.push(&[], 4.0, 1e-12));
        assert!(c.push(&[2.0], 5.0, 1e-12));
        assert!(c.push(&[0.0, 1.0], 3.0, 1e-12));
        let x = c.solve(&[6.0, 8.0, 4.0]);
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_dependent_column() {
        // second variable duplicates the first
        let mut c = GrowingCholesky::default();
        assert!(c.push(&[], 2.0, 1e-10));
        assert!(!c.push(&[2.0], 2.0, 1e-10));
        assert_eq!(c.rows.len(), 1);
    }

    #[test]
    fn pinv_handles_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let x = pinv_solve(&a, &[2.0, 2.0]);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}
