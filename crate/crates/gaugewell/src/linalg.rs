//! Dense complex linear algebra shared by the quantum modules.
//!
//! nalgebra supplies the Hermitian eigendecomposition and LU solves; this
//! module wraps them in the few operations the propagators need: phase
//! exponentials exp(−iγH) of Hermitian matrices, and an operator-norm
//! estimate by power iteration on M†M.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest |entry| of a matrix.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |M − M†| over entries; zero for an exactly Hermitian matrix.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// max |M†M − 1| over entries; zero for an exactly unitary matrix.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// Eigendecomposition H = V diag(λ) V† of a Hermitian matrix.
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: CMatrix) -> Self {
        let eig = nalgebra::SymmetricEigen::new(h);
        Self { values: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    /// exp(−iγH) v without forming the exponential matrix.
    pub fn phase_apply(&self, gamma: f64, v: &CVector) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::new(0.0, -gamma * lambda).exp();
        }
        &self.vectors * coeffs
    }

    /// The full matrix exp(−iγH).
    pub fn phase_matrix(&self, gamma: f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let phase = Complex64::new(0.0, -gamma * self.values[k]).exp();
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }
}

/// exp(−iγH) for Hermitian H, via eigendecomposition.
pub fn hermitian_phase_exp(h: &CMatrix, gamma: f64) -> CMatrix {
    HermitianEigen::new(h.clone()).phase_matrix(gamma)
}

/// Operator (spectral) norm estimated by power iteration on M†M.
///
/// Deterministic start vector, fixed iteration count; adequate for the
/// well-separated spectra this crate compares.
pub fn operator_norm(m: &CMatrix, iterations: usize) -> f64 {
    let n = m.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = CVector::from_fn(n, |j, _| {
        Complex64::new(1.0 + 0.3 * ((j + 1) as f64).sin(), 0.1 * ((2 * j + 1) as f64).cos())
    });
    let nv = v.norm();
    v /= Complex64::new(nv, 0.0);
    for _ in 0..iterations {
        let w = m.adjoint() * (m * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(nw, 0.0);
    }
    (m * &v).norm()
}

/// Euclidean norm of the difference of two vectors.
pub fn vector_distance(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian_test_matrix(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    m[(i, j)] = Complex64::new((i * i) as f64 + 1.0, 0.0);
                } else {
                    let re = 1.0 / (1.0 + (i as f64 - j as f64).abs());
                    let im = 0.2 * (i as f64 - j as f64);
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
        }
        m
    }

    #[test]
    fn phase_exponential_is_unitary_and_correct_for_diagonal() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]));
        let u = hermitian_phase_exp(&d, 0.5);
        for (k, &lambda) in [1.0, 4.0].iter().enumerate() {
            let expect = Complex64::new(0.0, -0.5 * lambda).exp();
            assert!((u[(k, k)] - expect).norm() < 1e-14);
        }
        assert!(unitarity_defect(&u) < 1e-13);
    }

    #[test]
    fn phase_apply_matches_phase_matrix() {
        let h = hermitian_test_matrix(12);
        assert!(hermiticity_defect(&h) < 1e-15);
        let eig = HermitianEigen::new(h.clone());
        let v = CVector::from_fn(12, |j, _| Complex64::new((j as f64).cos(), (j as f64).sin()));
        let a = eig.phase_apply(0.37, &v);
        let b = eig.phase_matrix(0.37) * &v;
        assert!((a - b).norm() < 1e-11);
        assert!(unitarity_defect(&eig.phase_matrix(0.37)) < 1e-12);
    }

    #[test]
    fn operator_norm_matches_known_values() {
        // diagonal matrix: norm is the largest |entry|
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(-3.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]));
        assert!((operator_norm(&d, 100) - 3.0).abs() < 1e-10);

        // rank-one uv†: norm ‖u‖‖v‖
        let u = CVector::from_vec(vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)]);
        let v = CVector::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, -1.0)]);
        let m = &u * v.adjoint();
        assert!((operator_norm(&m, 100) - u.norm() * v.norm()).abs() < 1e-10);
    }
}
