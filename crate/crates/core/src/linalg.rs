//! Dense complex matrices and the spectral primitives built on them.
//!
//! Everything here works on small square matrices (the 6×6 qubit⊗qutrit
//! space and its 2×2 / 3×3 factors). Storage is row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below
/// this fraction of the full Frobenius norm.
const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// A dense square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix { dim, entries }
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(LinalgError::BadLength {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite);
        }
        Ok(ComplexMatrix { dim, entries })
    }

    /// Real row-major entries; a convenience for writing down literal operators.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        Self::from_row_major(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// The projector |ψ⟩⟨ψ| onto an (unnormalised) vector.
    pub fn outer(psi: &[Complex64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.entries[i * n + k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += aik * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    /// Kronecker product; block (i, j) of the result is `self[(i, j)] * other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let m = other.dim;
        Self::from_fn(self.dim * m, |r, c| {
            self[(r / m, c / m)] * other[(r % m, c % m)]
        })
    }

    /// Computes `self · x · self†`.
    pub fn sandwich(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.matmul(x)?.matmul(&self.dagger())
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest |a_ij − conj(a_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> ComplexMatrix {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Sum of |a_ij| over i ≠ j.
    pub fn offdiagonal_l1(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self[(i, j)].norm();
                }
            }
        }
        s
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>+.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Real eigenvalues of a Hermitian matrix, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    source_dim: usize,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Sum of eigenvalues strictly below `-cutoff`.
    pub fn negative_sum(&self, cutoff: f64) -> f64 {
        self.eigenvalues.iter().filter(|&&x| x < -cutoff).sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).sum()
    }
}

/// Eigenvalues of a Hermitian matrix.
///
/// `H = X + iY` is embedded as the real symmetric `[[X, −Y], [Y, X]]`, whose
/// spectrum is that of `H` with every eigenvalue doubled. Cyclic Jacobi
/// rotations diagonalise the embedding; the doubled spectrum is then
/// collapsed by pairing neighbours after sorting.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: f64) -> Result<Spectrum, LinalgError> {
    let deviation = a.hermiticity_deviation();
    if deviation > tol {
        return Err(LinalgError::NotHermitian { deviation, tol });
    }
    let h = a.hermitian_part();
    let n = h.dim();
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    let mut doubled = jacobi_symmetric_eigenvalues(&mut s, m)?;
    doubled.sort_by(f64::total_cmp);
    let eigenvalues = doubled
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect();
    Ok(Spectrum {
        eigenvalues,
        source_dim: n,
    })
}

/// Cyclic Jacobi on a row-major real symmetric matrix (destroyed in place).
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    let total = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let threshold = JACOBI_REL_TOL * total;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(a) <= threshold {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the (p, q) plane rotation.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    if off_norm(a) <= threshold {
        Ok((0..n).map(|i| a[i * n + i]).collect())
    } else {
        Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS))
    }
}

/// Partial transpose over a `dim_b`-level second factor:
/// `(ρ^{T_B})_{mμ,nν} = ρ_{mν,nμ}`.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let expected = dim_a * dim_b;
    if rho.dim() != expected {
        return Err(LinalgError::WrongDimension {
            expected,
            got: rho.dim(),
        });
    }
    Ok(ComplexMatrix::from_fn(expected, |r, c| {
        let (m, mu) = (r / dim_b, r % dim_b);
        let (n, nu) = (c / dim_b, c % dim_b);
        rho[(m * dim_b + nu, n * dim_b + mu)]
    }))
}

/// Partial transpose of a 6×6 qubit⊗qutrit operator over the qutrit.
pub fn partial_transpose_b(rho: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    partial_transpose(rho, 2, 3)
}

/// ‖A‖₁ for Hermitian A: the sum of |eigenvalues|.
pub fn trace_norm(a: &ComplexMatrix, tol: f64) -> Result<f64, LinalgError> {
    Ok(hermitian_eigenvalues(a, tol)?.abs_sum())
}
