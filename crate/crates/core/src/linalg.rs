//! Small dense Hermitian helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
/// Columns of the returned matrix are the matching unit eigenvectors.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = symmetrize(m);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `(M + Mᴴ)/2`.
pub fn symmetrize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `max |M − Mᴴ|` entrywise.
pub fn hermitian_residual(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the orthogonal complement of `v`, taken from
/// the Householder reflector mapping `v` onto a multiple of `e₁`.
pub fn complement_basis(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = v.len();
    let norm = v.norm();
    assert!(norm > 0.0, "complement of the zero vector");
    let unit = v / Complex64::new(norm, 0.0);
    let phase = if unit[0].norm() > 0.0 {
        unit[0] / unit[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut u = unit.clone();
    u[0] += phase;
    let uu = u.norm_squared();
    // H = I − 2uuᴴ/(uᴴu); H e_j for j ≥ 1 spans v^⊥
    DMatrix::from_fn(n, n - 1, |r, c| {
        let j = c + 1;
        let delta = if r == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - 2.0 * u[r] * u[j].conj() / uu
    })
}

/// `Qᴴ M Q`.
pub fn restrict(m: &DMatrix<Complex64>, q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    q.adjoint() * m * q
}
