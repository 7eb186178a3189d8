//! Dense complex matrix kernel.
//!
//! Everything downstream works with [`CMatrix`]: a row-major dense matrix of
//! `Complex<f64>`. The kernel provides tensor products, partial traces,
//! Hermitian spectral calculus (including support-aware pseudo-inversion)
//! and the tilde operation.
//!
//! Conventions fixed repo-wide:
//!
//! * Composite indices on a tensor product `G⊗H` are `(g, h) → g·dim(H) + h`.
//! * The conjugation `J` is entrywise complex conjugation in the standard
//!   basis, so the tilde operation `B̃ = JB†J` is the plain transpose.
//! * Vectorization `|M⟩` stacks rows: component `(i, j)` of the vector is
//!   `M[i, j]`, which gives the identity `(A⊗B)|M⟩ = |A M Bᵀ⟩`.
//! * Eigenvalues are sorted descending.

use crate::{Error, Result, EPS_SUPPORT, TOL_HERM, TOL_PSD};
use num_complex::Complex;
use std::fmt;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex<f64>;

/// Which tensor factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the first factor (trace out the second).
    First,
    /// Keep the second factor (trace out the first).
    Second,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_entries(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadEntryCount {
                rows,
                cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    /// Diagonal square matrix from real entries.
    pub fn diag_real(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Column vector from complex entries.
    pub fn col_vector(v: &[C64]) -> Self {
        Self::from_raw(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> CMatrix {
        CMatrix::from_raw(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermiticity deviation `‖m − m†‖_F`.
    pub fn herm_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.herm_deviation() <= tol
    }

    /// Hermitian part `(m + m†)/2`.
    pub fn hermitize(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `Tr(self† · other)`, the Hilbert–Schmidt inner product.
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Reads a square submatrix at the given diagonal offset.
    pub fn block(&self, offset: usize, size: usize) -> CMatrix {
        CMatrix::from_fn(size, size, |i, j| self[(offset + i, offset + j)])
    }

    /// Writes `block` at the given diagonal offset.
    pub fn set_block(&mut self, offset: usize, block: &CMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(offset + i, offset + j)] = block[(i, j)];
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// descending, with the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// Largest `|λ|`.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Number of eigenvalues above the relative support cutoff.
    pub fn numerical_rank(&self) -> usize {
        let cut = EPS_SUPPORT * self.spectral_radius();
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }

    /// Rebuilds `V diag(f(λ)) V†`, sending eigenvalues at or below
    /// `EPS_SUPPORT · max|λ|` to exactly zero.
    pub fn apply_on_support(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let cut = EPS_SUPPORT * self.spectral_radius();
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            if lam <= cut {
                continue;
            }
            let flam = f(lam);
            if flam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * flam;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Kronecker product with the fixed index convention `(g,h) → g·dim(H)+h`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace of a square matrix on `G⊗H` with `dims = (dim G, dim H)`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Keep) -> Result<CMatrix> {
    let (da, db) = dims;
    let d = da * db;
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: m.rows(),
            context: "partial_trace input",
        });
    }
    match keep {
        Keep::First => {
            let mut out = CMatrix::zeros(da, da);
            for a in 0..da {
                for a2 in 0..da {
                    let mut s = C64::new(0.0, 0.0);
                    for b in 0..db {
                        s += m[(a * db + b, a2 * db + b)];
                    }
                    out[(a, a2)] = s;
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = CMatrix::zeros(db, db);
            for b in 0..db {
                for b2 in 0..db {
                    let mut s = C64::new(0.0, 0.0);
                    for a in 0..da {
                        s += m[(a * db + b, a * db + b2)];
                    }
                    out[(b, b2)] = s;
                }
            }
            Ok(out)
        }
    }
}

/// The tilde operation `B̃ = JB†J`. With standard-basis conjugation this is
/// the plain transpose.
pub fn tilde(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "tilde requires a square matrix");
    m.transpose()
}

/// Row-stacking vectorization `|M⟩`: component `(i,j)` is `M[i,j]`.
pub fn vectorize(m: &CMatrix) -> CMatrix {
    CMatrix::from_raw(m.rows() * m.cols(), 1, m.entries().to_vec())
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations. Rejects inputs
/// whose Hermiticity deviation exceeds `TOL_HERM · ‖m‖`; the decomposition
/// itself runs on the Hermitian part.
pub fn herm_eig(m: &CMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimMismatch {
            expected: m.rows(),
            got: m.cols(),
            context: "herm_eig input must be square",
        });
    }
    let dev = m.herm_deviation();
    let tol = TOL_HERM * m.norm_fro().max(f64::MIN_POSITIVE);
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol,
        });
    }
    let n = m.rows();
    let mut a = m.hermitize();
    let mut v = CMatrix::identity(n);
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let stop = 1e-15 * scale;

    let max_sweeps = 64;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Unitary 2×2 rotation zeroing a[p][q]: with β = arg(a_pq),
                // the real Schur rotation for [[a_pp, |a_pq|], [|a_pq|, a_qq]].
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column update A ← A·U with U[p,p]=c, U[q,p]=s·conj(phase),
                // U[p,q]=−s·phase, U[q,q]=c.
                let sp = phase * s;
                let spc = phase.conj() * s;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * spc;
                    a[(i, q)] = aiq * c - aip * sp;
                }
                // Row update A ← U†·A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * sp;
                    a[(q, j)] = aqj * c - apj * spc;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // Accumulate V ← V·U.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * spc;
                    v[(i, q)] = viq * c - vip * sp;
                }
            }
        }
    }
    if !converged {
        // One final check: the sweep loop above tests before rotating, so
        // recheck the off-diagonal mass reached by the last sweep.
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() > 1e-10 * scale {
            return Err(Error::EigenFailed);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn psd_spectrum(m: &CMatrix) -> Result<Spectrum> {
    let spec = herm_eig(m)?;
    let floor = -TOL_PSD * spec.spectral_radius().max(f64::MIN_POSITIVE);
    if let Some(&min) = spec
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).expect("finite"))
    {
        if min < floor {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    Ok(spec)
}

/// Applies a scalar function to a Hermitian PSD matrix on its support.
///
/// Eigenvalues at or below `EPS_SUPPORT · λ_max` are treated as exactly zero
/// and `f` is never evaluated there, which realizes the conventions
/// `0·ln 0 = 0`, `pinv(0) = 0`, and `ln_supp(0) = 0`. Eigenvalues below
/// `−TOL_PSD · λ_max` reject the input.
pub fn spectral_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    Ok(psd_spectrum(m)?.apply_on_support(f))
}

/// Orthoprojector onto the support (eigenvalues above the relative cutoff)
/// of a Hermitian PSD matrix.
pub fn support_projector(m: &CMatrix) -> Result<CMatrix> {
    spectral_fn(m, |_| 1.0)
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix.
pub fn pseudo_inverse(m: &CMatrix) -> Result<CMatrix> {
    spectral_fn(m, |x| 1.0 / x)
}

/// PSD square root on the support.
pub fn sqrtm(m: &CMatrix) -> Result<CMatrix> {
    spectral_fn(m, f64::sqrt)
}

/// `x ↦ x ln x` extended by `η(0) = 0`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
