//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] is a row-major dense matrix of `Complex64`. Decompositions
//! (SVD, Hermitian eigendecomposition, QR) are delegated to `nalgebra`; every
//! other routine in the crate goes through the helpers here.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest dimension for which `operator_norm` uses a full SVD.
pub const SVD_NORM_MAX_DIM: usize = 64;

/// Eigenvalues of a PSD input may dip this far below zero before rejection.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

/// Deterministic seed for every random draw in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Derives an independent child seed for stream `index`.
    pub fn split(self, index: u64) -> Seed {
        Seed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_mul(0xD1B5_4A32_D192_ED03)),
        ))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Wire form: shape plus row-major `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        ComplexMatrix::new(r.rows, r.cols, r.entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.data,
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "empty matrix shape {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape {rows}x{cols}");
        Self::from_raw(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![ONE; n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&d| C64::new(d, 0.0)).collect::<Vec<_>>())
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

    /// Builds from rows of real parts only.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_raw(1, 1, vec![z])
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z.conj()).collect(),
        )
    }

    pub fn scale(&self, z: C64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|&x| x * z).collect(),
        )
    }

    pub fn scale_real(&self, r: f64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|&x| x * r).collect(),
        )
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise maximum modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_raw(self.rows, rhs.cols, out))
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `self^* x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![ZERO; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.data[i * self.cols + j].conj() * xi;
            }
        }
        out
    }

    /// Copies the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Block-diagonal direct sum of the given matrices.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Operator-norm distance of `self^* self` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = &self.adjoint() * self;
        operator_norm(&(&g - &Self::identity(self.rows)))
    }

    /// Residual of `self self^*` against the identity.
    pub fn co_unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self * &self.adjoint();
        operator_norm(&(&g - &Self::identity(self.rows)))
    }

    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Singular value decomposition `a = u diag(s) v^*` with `s` sorted
/// in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn left_vector(&self, k: usize) -> Vec<C64> {
        (0..self.u.rows()).map(|i| self.u[(i, k)]).collect()
    }

    pub fn right_vector(&self, k: usize) -> Vec<C64> {
        (0..self.v.rows()).map(|i| self.v[(i, k)]).collect()
    }
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let dec = a.to_nalgebra().svd(true, true);
    let u = dec.u.expect("svd computed with u");
    let v_t = dec.v_t.expect("svd computed with v_t");
    let s = dec.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    let k = s.len();
    let u_sorted = ComplexMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])]);
    // columns of v are the conjugated rows of v_t
    let v_sorted = ComplexMatrix::from_fn(v_t.ncols(), k, |i, j| v_t[(order[j], i)].conj());
    Svd {
        u: u_sorted,
        singular_values: order.iter().map(|&j| s[j]).collect(),
        v: v_sorted,
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value. Uses a full SVD up to [`SVD_NORM_MAX_DIM`] and
/// power iteration on `a^* a` beyond.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows().max(a.cols()) <= SVD_NORM_MAX_DIM {
        singular_values(a)[0]
    } else {
        power_norm(a).unwrap_or_else(|| singular_values(a)[0])
    }
}

fn normalize(x: &mut [C64]) -> f64 {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Power iteration on `a^* a`; `None` if it fails to settle.
fn power_norm(a: &ComplexMatrix) -> Option<f64> {
    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 20_000;
    let n = a.cols();
    // fixed, generic start vector so results are reproducible
    let mut x: Vec<C64> = (0..n)
        .map(|k| {
            let t = (k as f64 + 1.0) * 0.618_033_988_749_895;
            C64::new(1.0 + 0.5 * t.sin(), 0.25 * t.cos())
        })
        .collect();
    normalize(&mut x);
    let mut prev = 0.0_f64;
    let mut settled = 0;
    for _ in 0..MAX_ITERS {
        let y = a.mul_vec(&x);
        let lambda = y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut z = a.adjoint_mul_vec(&y);
        if normalize(&mut z) == 0.0 {
            return Some(0.0);
        }
        x = z;
        if (lambda - prev).abs() <= TOL * lambda {
            settled += 1;
            if settled >= 3 {
                let y = a.mul_vec(&x);
                return Some(y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
            }
        } else {
            settled = 0;
        }
        prev = lambda;
    }
    None
}

/// Kronecker product, `(a ⊗ b)[(i,k),(j,l)] = a[i,j] b[k,l]`.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    accumulate_kronecker(&mut out, a, b);
    out
}

/// `out += a ⊗ b`
pub(crate) fn accumulate_kronecker(out: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    debug_assert_eq!((out.rows(), out.cols()), (ar * br, ac * bc));
    let width = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * width + j * bc;
                for l in 0..bc {
                    out.data[row + l] += x * b[(k, l)];
                }
            }
        }
    }
}

/// Standard complex Gaussian matrix, `E|z|^2 = 1` per entry.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary drawn from an explicit RNG.
pub fn haar_unitary_from(n: usize, rng: &mut impl rand::Rng) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::Dimension("haar_unitary requires n >= 1".into()));
    }
    let z = ginibre(n, n, rng);
    let qr = z.to_nalgebra().qr();
    let q = qr.q();
    let r = qr.r();
    // rescale column j of q by the phase of r_jj so that R has a positive diagonal
    let phases: Vec<C64> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                ONE
            }
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]))
}

/// Haar-distributed `n x n` unitary.
pub fn haar_unitary(n: usize, seed: Seed) -> Result<ComplexMatrix> {
    haar_unitary_from(n, &mut seed.rng())
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.max_abs().max(1.0);
    let residual = a.hermitian_residual();
    if residual > PSD_CLAMP_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    let sym = ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    });
    let eig = sym.to_nalgebra().symmetric_eigen();
    let vals = eig.eigenvalues;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
    let vecs = ComplexMatrix::from_fn(a.rows(), a.rows(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((order.iter().map(|&j| vals[j]).collect(), vecs))
}

/// Applies `f` to the spectrum of a Hermitian matrix.
fn hermitian_function(vals: &[f64], vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = vals.len();
    let fv: Vec<f64> = vals.iter().map(|&x| f(x)).collect();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vecs[(i, k)] * vecs[(j, k)].conj() * fv[k])
            .sum()
    })
}

/// Positive square root of a Hermitian PSD matrix via its spectral
/// decomposition. Eigenvalues in `[-1e-10, 0)` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigen(a)?;
    let min = vals.first().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(hermitian_function(&vals, &vecs, |x| x.max(0.0).sqrt()))
}

/// Unitary factor `w v^*` of the polar decomposition `a = (w v^*)(v Σ v^*)`.
pub fn polar_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let d = svd(a);
    &d.u * &d.v.adjoint()
}

/// Nearest contraction in operator norm: singular values clipped to `[0, 1]`.
pub fn clip_to_ball(a: &ComplexMatrix) -> ComplexMatrix {
    let d = svd(a);
    if d.singular_values[0] <= 1.0 {
        return a.clone();
    }
    let clipped: Vec<C64> = d
        .singular_values
        .iter()
        .map(|&s| C64::new(s.min(1.0), 0.0))
        .collect();
    let us = &d.u * &ComplexMatrix::from_diag(&clipped);
    &us * &d.v.adjoint()
}

/// Standard inner product `<x, y> = Σ x_i conj(y_i)`, linear in the first slot.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        ginibre(rows, cols, &mut Seed(seed).rng())
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            ComplexMatrix::new(0, 0, vec![]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::Dimension(_))
        ));
        let bad = vec![ONE, C64::new(f64::NAN, 0.0), ONE, ONE];
        assert!(matches!(
            ComplexMatrix::new(2, 2, bad),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn operator_norm_small_cases() {
        assert_abs_diff_eq!(
            operator_norm(&ComplexMatrix::identity(3)),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            operator_norm(&ComplexMatrix::from_real_diag(&[2.0, -1.0])),
            2.0,
            epsilon = 1e-14
        );
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert_abs_diff_eq!(operator_norm(&nil), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn two_by_two_norm_matches_closed_form() {
        // for 2x2, s_max^2 = (F + sqrt(F^2 - 4|det|^2)) / 2 with F the squared Frobenius norm
        for seed in 0..20 {
            let a = random_matrix(2, 2, seed);
            let f = a.frobenius_norm().powi(2);
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).norm_sqr();
            let expected = ((f + (f * f - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt();
            let got = operator_norm(&a);
            assert!(
                (got - expected).abs() <= 1e-10 * expected,
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn power_iteration_agrees_with_svd_above_cutoff() {
        for seed in 0..3 {
            let a = random_matrix(80, 80, 100 + seed);
            let exact = singular_values(&a)[0];
            let got = operator_norm(&a);
            assert!((got - exact).abs() <= 1e-10 * exact, "{got} vs {exact}");
        }
        let u = haar_unitary(70, Seed(5)).unwrap();
        assert!((operator_norm(&u) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let a = random_matrix(5, 3, 9);
        let d = svd(&a);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let s = ComplexMatrix::from_real_diag(&d.singular_values);
        let rebuilt = &(&d.u * &s) * &d.v.adjoint();
        assert!(rebuilt.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn kronecker_identities_and_swap() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(kronecker(&i2, &i3), ComplexMatrix::identity(6));
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let k = kronecker(&x, &i2);
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(k, expected);
    }

    #[test]
    fn kronecker_norm_is_multiplicative() {
        for seed in 0..20 {
            let a = random_matrix(3, 2, 2 * seed);
            let b = random_matrix(2, 4, 2 * seed + 1);
            let lhs = operator_norm(&kronecker(&a, &b));
            let rhs = operator_norm(&a) * operator_norm(&b);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
        }
    }

    #[test]
    fn kronecker_is_associative() {
        let a = random_matrix(2, 2, 1);
        let b = random_matrix(2, 3, 2);
        let c = random_matrix(3, 1, 3);
        let left = kronecker(&kronecker(&a, &b), &c);
        let right = kronecker(&a, &kronecker(&b, &c));
        assert!(left.max_abs_diff(&right) <= 1e-15);
    }

    #[test]
    fn haar_unitary_basic() {
        assert!(matches!(haar_unitary(0, Seed(1)), Err(Error::Dimension(_))));
        let u1 = haar_unitary(1, Seed(3)).unwrap();
        assert_abs_diff_eq!(u1[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        let u4 = haar_unitary(4, Seed(42)).unwrap();
        assert!(u4.unitarity_residual() <= 1e-12);
        assert_eq!(u4, haar_unitary(4, Seed(42)).unwrap());
    }

    #[test]
    fn haar_unitarity_up_to_64() {
        for n in [2, 7, 16, 33, 64] {
            let u = haar_unitary(n, Seed(n as u64)).unwrap();
            assert!(
                u.unitarity_residual() <= 1e-12,
                "n={n}: {}",
                u.unitarity_residual()
            );
        }
    }

    #[test]
    fn haar_second_moment_of_trace() {
        // E|tr u|^2 = 1 under Haar measure on U(n)
        let mut rng = Seed(2024).rng();
        let samples = 2000;
        let mean: f64 = (0..samples)
            .map(|_| haar_unitary_from(6, &mut rng).unwrap().trace().norm_sqr())
            .sum::<f64>()
            / samples as f64;
        assert!((mean - 1.0).abs() <= 0.1, "mean |tr u|^2 = {mean}");
    }

    #[test]
    fn norm_is_unitarily_invariant() {
        for seed in 0..10 {
            let a = random_matrix(5, 5, seed);
            let u = haar_unitary(5, Seed(1000 + seed)).unwrap();
            let v = haar_unitary(5, Seed(2000 + seed)).unwrap();
            let lhs = operator_norm(&(&(&u * &a) * &v));
            assert!((lhs - operator_norm(&a)).abs() <= 1e-9);
        }
    }

    #[test]
    fn psd_sqrt_cases() {
        let i = ComplexMatrix::identity(3);
        assert!(psd_sqrt(&i).unwrap().max_abs_diff(&i) < 1e-14);
        let d = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(d.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        for seed in 0..10 {
            let g = random_matrix(4, 4, 50 + seed);
            let a = &g * &g.adjoint();
            let b = psd_sqrt(&a).unwrap();
            assert!(b.hermitian_residual() < 1e-12);
            assert!(operator_norm(&(&(&b * &b) - &a)) <= 1e-9);
        }
    }

    #[test]
    fn psd_sqrt_errors() {
        let non_herm = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(
            psd_sqrt(&non_herm),
            Err(Error::NotHermitian { .. })
        ));
        let neg = ComplexMatrix::from_real_diag(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
        // slightly negative within tolerance is clamped
        let almost = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        let r = psd_sqrt(&almost).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
    }

    #[test]
    fn polar_and_clip() {
        let a = random_matrix(4, 4, 77);
        let w = polar_unitary(&a);
        assert!(w.unitarity_residual() < 1e-12);
        let c = clip_to_ball(&a.scale_real(3.0));
        assert!(operator_norm(&c) <= 1.0 + 1e-12);
    }
}
