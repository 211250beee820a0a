//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default relative tolerance for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Draw a circularly-symmetric complex Gaussian sample with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// `log2 det(A)` for a Hermitian positive-definite matrix.
///
/// Cholesky first; if the factorization breaks down the eigenvalues are used,
/// and a non-positive spectrum is reported as a numerical error.
pub fn log2_det_hpd(a: &CMatrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    if let Some(chol) = a.clone().cholesky() {
        let l = chol.l_dirty();
        let diag_ok = (0..a.nrows()).all(|i| {
            let d = l[(i, i)];
            d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re
        });
        if diag_ok {
            let ln: f64 = (0..a.nrows()).map(|i| l[(i, i)].re.ln()).sum();
            return Ok(2.0 * ln / std::f64::consts::LN_2);
        }
    }
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min <= 0.0 || !min.is_finite() {
        return Err(Error::Numerical {
            message: format!("matrix of order {} is not positive definite", a.nrows()),
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(eig.iter().map(|l| l.log2()).sum())
}

/// `log2 det(I + C C^H)` from the singular values of the factor `C`, which
/// stays accurate when `C C^H` has a large dynamic range.
pub fn log2_det_identity_plus_gram(c: &CMatrix) -> Result<f64> {
    let sv = singular_values(c);
    if sv.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical {
            message: format!("non-finite singular value in a {}x{} factor", c.nrows(), c.ncols()),
            min_eigenvalue: f64::NAN,
            max_eigenvalue: f64::NAN,
        });
    }
    Ok(sv.iter().map(|s| (s * s).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// `rows x cols` matrix with orthonormal columns, drawn isotropically.
pub fn random_orthonormal_frame<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows, "frame needs cols <= rows");
    let g = CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng));
    let q = g.qr().q();
    q.columns(0, cols).into_owned()
}

/// Vertical stack of `copies` identity blocks of order `m`.
pub fn identity_stack(m: usize, copies: usize) -> CMatrix {
    CMatrix::from_fn(m * copies, m, |i, j| {
        if i % m == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Largest entrywise deviation of `A^H A` from the identity.
pub fn orthonormality_defect(a: &CMatrix) -> f64 {
    let gram = a.adjoint() * a;
    let n = gram.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn trace_re(a: &CMatrix) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)].re).sum()
}
