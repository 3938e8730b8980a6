//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// `exp(-i · t · H)` for hermitian `H`.
pub fn expm_minus_i(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let (values, v) = hermitian_eigen(h.clone());
    let phases = DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| Complex64::from_polar(1.0, -t * l)),
    );
    let mut scaled = v.clone();
    for (c, ph) in phases.iter().enumerate() {
        scaled.column_mut(c).iter_mut().for_each(|x| *x *= *ph);
    }
    scaled * v.adjoint()
}

/// Minimum-norm least-squares solver for a real matrix, factorised once.
///
/// Singular values below `rcond · σ_max` are treated as zero.
#[derive(Clone, Debug)]
pub struct Pseudoinverse {
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    inv_sigma: Vec<f64>,
    rank: usize,
}

impl Pseudoinverse {
    pub fn new(m: &DMatrix<f64>, rcond: f64) -> Self {
        if m.is_empty() {
            return Self {
                u: DMatrix::zeros(m.nrows(), 0),
                v_t: DMatrix::zeros(0, m.ncols()),
                inv_sigma: Vec::new(),
                rank: 0,
            };
        }
        let svd = SVD::new(m.clone(), true, true);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cutoff = rcond * sigma_max;
        let inv_sigma: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|&s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 })
            .collect();
        let rank = inv_sigma.iter().filter(|&&s| s != 0.0).count();
        Self {
            u: svd.u.expect("requested U"),
            v_t: svd.v_t.expect("requested V^T"),
            inv_sigma,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn apply(&self, b: &[f64]) -> Vec<f64> {
        let b = DVector::from_column_slice(b);
        let mut coeffs = self.u.transpose() * b;
        for (c, s) in coeffs.iter_mut().zip(&self.inv_sigma) {
            *c *= s;
        }
        (self.v_t.transpose() * coeffs).iter().copied().collect()
    }
}

/// Euclidean norm of `m·x − b`.
pub fn residual_norm(m: &DMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    let r = m * DVector::from_column_slice(x) - DVector::from_column_slice(b);
    r.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_diagonal_system() {
        let s = DMatrix::from_diagonal_element(3, 3, 2.0);
        let p = Pseudoinverse::new(&s, 1e-8);
        let a = p.apply(&[0.0, 2.0, 0.0]);
        assert!((a[0]).abs() < 1e-15 && (a[1] - 1.0).abs() < 1e-15 && a[2].abs() < 1e-15);
        assert_eq!(p.apply(&[0.0; 3]), vec![0.0; 3]);
    }

    #[test]
    fn pinv_drops_null_space() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = Pseudoinverse::new(&s, 1e-8);
        assert_eq!(p.rank(), 1);
        let a = p.apply(&[2.0, 2.0]);
        assert!((a[0] - 1.0).abs() < 1e-12 && (a[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expm_of_pauli_x() {
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let u = expm_minus_i(&x, 0.3);
        assert!((u[(0, 0)] - Complex64::new(0.3f64.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(1, 0)] - Complex64::new(0.0, -0.3f64.sin())).norm() < 1e-14);
    }
}
