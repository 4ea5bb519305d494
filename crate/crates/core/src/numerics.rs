//! Dense complex matrix kernel.
//!
//! Hermitian eigendecomposition, fractional powers of positive matrices,
//! matrix exponentials, trace norms and channel vectorization. All
//! operations are pure; matrices are `faer` dense matrices over `Complex64`.
//!
//! Vectorization convention: `vec(X) = (X ⊗ 1)|Ω⟩` with `|Ω⟩ = Σ_j |j,j⟩`,
//! i.e. row-major flattening, so that the map `f ↦ A f B` has superoperator
//! matrix `A ⊗ Bᵀ` and a Kraus channel `f ↦ Σ_k E_k f E_k†` becomes
//! `Σ_k E_k ⊗ conj(E_k)`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use thiserror::Error;

pub type C64 = num_complex::Complex<f64>;
pub type CMat = Mat<C64>;

/// Relative hermiticity tolerance used by default throughout the crate.
pub const HERM_TOL: f64 = 1e-10;
/// Absolute eigenvalue floor below which a state is treated as rank deficient.
pub const EPS_RANK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("decomposition failed to converge")]
    DecompositionFailed,
}

pub fn identity(d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn zeros(r: usize, c: usize) -> CMat {
    Mat::zeros(r, c)
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn conj_mat(a: &CMat) -> CMat {
    a.conjugate().to_owned()
}

pub fn transpose(a: &CMat) -> CMat {
    a.transpose().to_owned()
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Hilbert-Schmidt inner product tr(A† B).
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}

pub fn herm_part(a: &CMat) -> CMat {
    let ad = dagger(a);
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + ad[(i, j)]) * 0.5)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn all_finite(a: &CMat) -> bool {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return false;
            }
        }
    }
    true
}

/// Hermiticity residual max|A - A†| relative to max|A|.
pub fn herm_residual(a: &CMat) -> f64 {
    let dev = a - dagger(a);
    let scale = max_abs(a);
    if scale == 0.0 {
        0.0
    } else {
        max_abs(&dev) / scale
    }
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.nrows() == a.ncols() && herm_residual(a) <= tol
}

/// `vec(X) = (X ⊗ 1)|Ω⟩`: row-major flattening of `X` into a d²-component
/// column.
pub fn vec_op(x: &CMat) -> CMat {
    let d = x.nrows();
    Mat::from_fn(d * d, 1, |k, _| x[(k / d, k % d)])
}

/// Inverse of [`vec_op`].
pub fn devec(v: &CMat, d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| v[(i * d + j, 0)])
}

/// Superoperator matrix of `f ↦ A f B` in the `vec` convention.
pub fn sandwich_superop(a: &CMat, b: &CMat) -> CMat {
    kron(a, &transpose(b))
}

/// Superoperator of a Kraus channel `f ↦ Σ_k E_k f E_k†`, i.e.
/// `Ŝ = Σ_k E_k ⊗ conj(E_k)`.
pub fn vectorize_channel(kraus: &[CMat]) -> Result<CMat, NumericsError> {
    let d = kraus
        .first()
        .map(|k| k.nrows())
        .ok_or(NumericsError::DimensionMismatch {
            expected: 1,
            got: 0,
        })?;
    let mut s = zeros(d * d, d * d);
    for e in kraus {
        if e.nrows() != d || e.ncols() != d {
            return Err(NumericsError::DimensionMismatch {
                expected: d,
                got: e.nrows(),
            });
        }
        s += kron(e, &conj_mat(e));
    }
    Ok(s)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl HermitianEigensystem {
    /// `V f(Λ) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMat {
        let v = &self.eigenvectors;
        let d = v.nrows();
        let scaled = Mat::from_fn(d, d, |i, j| v[(i, j)] * f(self.eigenvalues[j]));
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMat {
        self.apply_fn(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub fn eig_hermitian(a: &CMat, tol: f64) -> Result<HermitianEigensystem, NumericsError> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if !all_finite(a) {
        return Err(NumericsError::NonFinite);
    }
    let residual = herm_residual(a);
    if residual > tol {
        return Err(NumericsError::NotHermitian { residual, tol });
    }
    let h = herm_part(a);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| NumericsError::DecompositionFailed)?;
    let d = a.nrows();
    let eigenvalues: Vec<f64> = (0..d).map(|i| evd.S().column_vector()[i].re).collect();
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors: evd.U().to_owned(),
    })
}

/// Eigenvalues of a general (not necessarily Hermitian) square matrix,
/// in unspecified order.
pub fn complex_eigenvalues(a: &CMat) -> Result<Vec<C64>, NumericsError> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if !all_finite(a) {
        return Err(NumericsError::NonFinite);
    }
    a.eigenvalues().map_err(|_| NumericsError::DecompositionFailed)
}

/// `A^s = V Λ^s V†` for positive-definite Hermitian `A`.
pub fn psd_power(a: &CMat, s: f64, eps_rank: f64) -> Result<CMat, NumericsError> {
    let eig = eig_hermitian(a, HERM_TOL)?;
    let min_eig = eig.min_eigenvalue();
    if min_eig <= eps_rank {
        return Err(NumericsError::NotPositiveDefinite { min_eig });
    }
    Ok(eig.apply_fn(|x| x.powf(s)))
}

/// Singular values, nonincreasing.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>, NumericsError> {
    a.singular_values()
        .map_err(|_| NumericsError::DecompositionFailed)
}

/// Sum of singular values (Schatten 1-norm).
pub fn trace_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    // Hermitian inputs take the cheaper eigenvalue path.
    if a.nrows() == a.ncols() && is_hermitian(a, HERM_TOL) {
        if let Ok(eig) = eig_hermitian(a, HERM_TOL) {
            return eig.eigenvalues.iter().map(|x| x.abs()).sum();
        }
    }
    singular_values(a)
        .map(|s| s.iter().sum())
        .unwrap_or(f64::NAN)
}

/// Largest singular value (operator norm).
pub fn op_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    if a.nrows() == a.ncols() && is_hermitian(a, HERM_TOL) {
        if let Ok(eig) = eig_hermitian(a, HERM_TOL) {
            return eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
        }
    }
    singular_values(a)
        .map(|s| s.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN)
}

/// Matrix sign `V sgn(Λ) V†` of a Hermitian matrix.
pub fn sign_hermitian(a: &CMat) -> Result<CMat, NumericsError> {
    let eig = eig_hermitian(a, HERM_TOL)?;
    Ok(eig.apply_fn(|x| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    }))
}

/// Matrix exponential. Hermitian inputs use the eigendecomposition path,
/// everything else scaling-and-squaring with a degree-13 Padé approximant.
pub fn matrix_exp(a: &CMat) -> Result<CMat, NumericsError> {
    if !all_finite(a) {
        return Err(NumericsError::NonFinite);
    }
    if a.nrows() != a.ncols() {
        return Err(NumericsError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if is_hermitian(a, 1e-12) {
        let eig = eig_hermitian(a, 1e-12)?;
        return Ok(eig.apply_fn(f64::exp));
    }
    Ok(expm_pade(a))
}

fn norm_l1_mat(a: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let mut col = 0.0;
        for i in 0..a.nrows() {
            col += a[(i, j)].norm();
        }
        best = best.max(col);
    }
    best
}

/// Higham's scaling-and-squaring expm with the [13/13] Padé approximant.
fn expm_pade(a: &CMat) -> CMat {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;
    let d = a.nrows();
    let norm = norm_l1_mat(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = scale(a, C64::new(0.5f64.powi(s), 0.0));
    let id = identity(d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = scale(&a6, C64::new(B[13], 0.0))
        + scale(&a4, C64::new(B[11], 0.0))
        + scale(&a2, C64::new(B[9], 0.0));
    let u = &a
        * &(&a6 * &u_inner
            + scale(&a6, C64::new(B[7], 0.0))
            + scale(&a4, C64::new(B[5], 0.0))
            + scale(&a2, C64::new(B[3], 0.0))
            + scale(&id, C64::new(B[1], 0.0)));
    let v_inner = scale(&a6, C64::new(B[12], 0.0))
        + scale(&a4, C64::new(B[10], 0.0))
        + scale(&a2, C64::new(B[8], 0.0));
    let v = &a6 * &v_inner
        + scale(&a6, C64::new(B[6], 0.0))
        + scale(&a4, C64::new(B[4], 0.0))
        + scale(&a2, C64::new(B[2], 0.0))
        + scale(&id, C64::new(B[0], 0.0));
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs.partial_piv_lu().solve(&rhs);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Pauli matrices (d=2), handy for tests and the qubit model.
pub fn pauli(k: usize) -> CMat {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => identity(2),
        1 => Mat::from_fn(2, 2, |r, c| if r != c { one } else { z }),
        2 => Mat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => z,
        }),
        3 => Mat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => one,
            (1, 1) => -one,
            _ => z,
        }),
        _ => panic!("pauli index out of range"),
    }
}

pub fn from_real_diag(diag: &[f64]) -> CMat {
    let d = diag.len();
    Mat::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(diag[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
