//! Dense complex linear algebra shared by every module.
//!
//! Everything is built on `nalgebra::DMatrix<Complex64>`. Hermitian
//! eigendecompositions come from nalgebra's symmetric eigensolver (which
//! handles complex Hermitian input); exponentials of (anti-)Hermitian
//! matrices go through that eigendecomposition so the result is unitary to
//! working precision.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = real(v);
    }
    m
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Re Tr(X†Y)`, the real part of the Hilbert–Schmidt product.
pub fn real_inner(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `Im Tr(X†Y)`.
pub fn imag_inner(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).im).sum()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn antihermitian_part(m: &CMat) -> CMat {
    (m - m.adjoint()).scale(0.5)
}

/// `‖M − M†‖_F`
pub fn hermitian_residual(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖A + A†‖_F`
pub fn antihermitian_residual(m: &CMat) -> f64 {
    (m + m.adjoint()).norm()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch {
            expected: (m.nrows(), m.nrows()),
            found: m.shape(),
        });
    }
    Ok(m.nrows())
}

pub fn check_shape(m: &CMat, expected: (usize, usize)) -> Result<()> {
    if m.shape() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            found: m.shape(),
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// decreasing order. Column `j` of the returned matrix is the eigenvector of
/// eigenvalue `j`. Only the Hermitian part of `m` is used.
pub fn eigh_descending(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in decreasing order.
pub fn eigvalsh_descending(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Applies a real scalar function to a Hermitian matrix through its
/// eigendecomposition: `V f(Λ) V†`.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let (values, vectors) = eigh_descending(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for j in 0..n {
        let fj = f(values[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vectors.adjoint()
}

/// Square root of a positive-semidefinite Hermitian matrix; eigenvalues
/// below zero (round-off) are clipped.
pub fn psd_sqrt(m: &CMat) -> CMat {
    hermitian_function(m, |x| real(x.max(0.0).sqrt()))
}

/// `exp(−i·h·tau)` for Hermitian `h`; unitary by construction.
pub fn unitary_from_hermitian(h: &CMat, tau: f64) -> CMat {
    hermitian_function(h, |lambda| Complex64::from_polar(1.0, -lambda * tau))
}

/// Matrix exponential of an anti-Hermitian matrix.
///
/// Computed as `V diag(e^{−iλ}) V†` from the eigendecomposition `iA = VΛV†`
/// of the Hermitian matrix `iA`, so the output is unitary to working
/// precision. The anti-Hermiticity check is relative to `max(1, ‖A‖_F)`.
pub fn expm_antihermitian(a: &CMat, tol_herm: f64) -> Result<CMat> {
    check_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let residual = antihermitian_residual(a);
    if residual > tol_herm * a.norm().max(1.0) {
        return Err(Error::NotAntiHermitian { residual });
    }
    Ok(unitary_from_hermitian(&(a * I), 1.0))
}

/// `‖U†U − 1‖_F`
pub fn unitarity_residual(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

/// Principal logarithm of a unitary matrix, returned as the Hermitian
/// generator `K` with `U = exp(iK)` and spectrum of `K` in `(−π, π]`.
pub fn unitary_log_generator(u: &CMat) -> CMat {
    let n = u.nrows();
    let schur = nalgebra::Schur::new(u.clone());
    let (q, t) = schur.unpack();
    let mut d = CMat::zeros(n, n);
    for j in 0..n {
        let mut angle = t[(j, j)].arg();
        if angle <= -std::f64::consts::PI {
            angle += 2.0 * std::f64::consts::PI;
        }
        d[(j, j)] = real(angle);
    }
    hermitian_part(&(&q * d * q.adjoint()))
}

/// Unitary polar factor `W V†` of `M = W Σ V†`. Rank-deficient inputs get an
/// arbitrary completion from the SVD, which is still unitary.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}
