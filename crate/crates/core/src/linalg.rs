//! Dense complex matrices.
//!
//! Qubit 0 is always the leftmost tensor factor, so a basis index over `n`
//! qubits reads as a big-endian bit string.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used for Hermiticity and small negative eigenvalues.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative cutoff for the support of a PSD matrix.
pub const SUPPORT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Projector `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, s: Complex64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut err: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                err = err.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() < HERMITIAN_TOL
    }

    /// `(M + M^dagger) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Conjugation `U self U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a fallible product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Kronecker product of column vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

fn check_square_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let total: usize = dims.iter().product();
    if total != m.rows {
        return Err(Error::Dimension(format!(
            "subsystem dims {dims:?} multiply to {total}, matrix has dimension {}",
            m.rows
        )));
    }
    Ok(())
}

/// Mixed-radix digits of `index` for the given subsystem dims (leftmost factor first).
fn split_index(mut index: usize, dims: &[usize], digits: &mut [usize]) {
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Trace out every subsystem not listed in `keep`.
///
/// The kept subsystems appear in the output in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_square_dims(m, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut digits = vec![0; dims.len()];
    let mut kd = vec![0; kept.len()];
    let mut ed = vec![0; traced.len()];

    // Precompute full index for (kept index, env index).
    let mut full = vec![0usize; out_dim * env_dim];
    for k in 0..out_dim {
        split_index(k, &kept_dims, &mut kd);
        for e in 0..env_dim {
            split_index(e, &traced_dims, &mut ed);
            for (slot, &sub) in kept.iter().enumerate() {
                digits[sub] = kd[slot];
            }
            for (slot, &sub) in traced.iter().enumerate() {
                digits[sub] = ed[slot];
            }
            full[k * env_dim + e] = join_index(&digits, dims);
        }
    }
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += m[(full[r * env_dim + e], full[c * env_dim + e])];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on one factor of a bipartite matrix with dims `[d1, d2]`.
pub fn partial_transpose(m: &ComplexMatrix, dims: [usize; 2], subsystem: usize) -> Result<ComplexMatrix> {
    check_square_dims(m, &dims)?;
    if subsystem > 1 {
        return Err(Error::Dimension(format!(
            "bipartite partial transpose takes subsystem 0 or 1, got {subsystem}"
        )));
    }
    let [d1, d2] = dims;
    let mut out = ComplexMatrix::zeros(m.rows, m.cols);
    for a in 0..d1 {
        for b in 0..d2 {
            for a2 in 0..d1 {
                for b2 in 0..d2 {
                    let (r, c) = if subsystem == 0 {
                        (a2 * d2 + b, a * d2 + b2)
                    } else {
                        (a * d2 + b2, a2 * d2 + b)
                    };
                    out[(a * d2 + b, a2 * d2 + b2)] = m[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

/// Reorder qubits: output qubit `q` is input qubit `perm[q]`.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let n = perm.len();
    if !m.is_square() || m.rows() != 1 << n {
        return Err(Error::Dimension(format!(
            "permutation of {n} qubits applied to a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
        }
    }
    let source = |idx: usize| -> usize {
        (0..n).fold(0, |acc, q| {
            let bit = (idx >> (n - 1 - q)) & 1;
            acc | (bit << (n - 1 - perm[q]))
        })
    };
    let map: Vec<usize> = (0..m.rows()).map(source).collect();
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(map[r], map[c])]))
}

/// Embed an operator acting on `targets` (in that order) into an `n`-qubit
/// space, with the identity elsewhere.
pub fn embed(op: &ComplexMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    let k = targets.len();
    if !op.is_square() || op.rows() != 1 << k {
        return Err(Error::Dimension(format!(
            "{}x{} operator does not act on {k} qubits",
            op.rows(),
            op.cols()
        )));
    }
    if targets.iter().any(|&t| t >= n) {
        return Err(Error::Dimension(format!(
            "targets {targets:?} out of range for {n} qubits"
        )));
    }
    let target_mask: usize = targets.iter().map(|&t| 1usize << (n - 1 - t)).sum();
    let local = |idx: usize| -> usize {
        targets
            .iter()
            .fold(0, |acc, &t| (acc << 1) | ((idx >> (n - 1 - t)) & 1))
    };
    let dim = 1usize << n;
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        if (r & !target_mask) != (c & !target_mask) {
            ZERO
        } else {
            op[(local(r), local(c))]
        }
    }))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `V f(Λ) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .filter(|&k| mapped[k] != 0.0)
                .map(|k| v[(r, k)] * v[(c, k)].conj() * mapped[k])
                .sum()
        })
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized before solving so roundoff asymmetry below
/// [`HERMITIAN_TOL`] does not leak into the spectrum.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let herr = m.hermiticity_error();
    if herr >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(herr));
    }
    let eig = m.symmetrized().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let vectors = ComplexMatrix::from_fn(m.rows, m.rows, |r, c| vecs[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let herr = m.hermiticity_error();
    if herr >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(herr));
    }
    let mut values: Vec<f64> = m
        .symmetrized()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Pseudo-inverse square root of a PSD matrix.
///
/// Eigenvalues above `support_tol * λ_max` map to `λ^{-1/2}`; the rest
/// (the kernel) map to zero.
pub fn psd_inv_sqrt(m: &ComplexMatrix, support_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigs(m)?;
    if eig.min() < -HERMITIAN_TOL {
        return Err(Error::NegativeEigenvalue(eig.min()));
    }
    let cutoff = support_tol * eig.max().max(0.0);
    Ok(eig.reconstruct_with(|x| if x > cutoff { x.sqrt().recip() } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)])
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn random_matrix(seed: &[f64], n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |r, col| {
            let k = 2 * (r * n + col);
            c(seed[k % seed.len()], seed[(k + 1) % seed.len()])
        })
    }

    fn random_hermitian(seed: &[f64], n: usize) -> ComplexMatrix {
        let a = random_matrix(seed, n);
        &a + &a.adjoint()
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        let d = kron(
            &ComplexMatrix::diagonal(&[1.0, 2.0]),
            &ComplexMatrix::diagonal(&[3.0, 4.0]),
        );
        assert_eq!(d, ComplexMatrix::diagonal(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_sigma_x_maps_bell_zero_to_bell_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi0 = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let op = kron(&sigma_x(), &ComplexMatrix::identity(2));
        let out = op.apply(&psi0).unwrap();
        let psi1 = [ZERO, c(s, 0.0), c(s, 0.0), ZERO];
        for (a, b) in out.iter().zip(&psi1) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let marginal = partial_trace(&bell(), &[2, 2], &[0]).unwrap();
        assert!(marginal.max_abs_diff(&half) < 1e-15);

        let rho = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let tau = ComplexMatrix::from_vec(2, 2, vec![c(0.4, 0.0), c(0.2, -0.1), c(0.2, 0.1), c(0.6, 0.0)]).unwrap();
        let prod = kron(&rho, &tau);
        assert!(partial_trace(&prod, &[2, 2], &[1]).unwrap().max_abs_diff(&tau) < 1e-15);

        let all = partial_trace(&prod, &[2, 2], &[]).unwrap();
        assert_eq!((all.rows(), all.cols()), (1, 1));
        assert!((all[(0, 0)] - prod.trace()).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(4), &[2, 3], &[0]),
            Err(Error::Dimension(_))
        ));
        assert!(partial_trace(&ComplexMatrix::identity(4), &[2, 2], &[2]).is_err());
    }

    #[test]
    fn partial_transpose_bell_spectrum() {
        let pt = partial_transpose(&bell(), [2, 2], 0).unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let sep = kron(
            &ComplexMatrix::diagonal(&[0.3, 0.7]),
            &ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
        );
        for sub in 0..2 {
            let ev = hermitian_eigenvalues(&partial_transpose(&sep, [2, 2], sub).unwrap()).unwrap();
            assert!(ev[0] >= -1e-12);
        }
    }

    #[test]
    fn partial_transpose_on_either_side_agrees_up_to_full_transpose() {
        let seed = [0.3, -0.2, 0.9, 0.1, -0.5, 0.7, 0.4, -0.8, 0.6, 0.2, -0.1];
        let m = random_matrix(&seed, 6);
        let t0 = partial_transpose(&m, [2, 3], 0).unwrap();
        let t1 = partial_transpose(&m, [2, 3], 1).unwrap();
        assert!(t0.transpose().max_abs_diff(&t1) < 1e-15);
    }

    #[test]
    fn embedding_matches_kron_and_permutation() {
        let x = sigma_x();
        let z = ComplexMatrix::diagonal(&[1.0, -1.0]);
        let id = ComplexMatrix::identity(2);
        let xz = kron(&x, &z);
        // Operator on qubits (2, 0) of three: z on qubit 0, x on qubit 2.
        let embedded = embed(&xz, &[2, 0], 3).unwrap();
        assert_eq!(embedded, kron_all([&z, &id, &x]));
        let swapped = permute_qubits(&kron_all([&x, &z, &id]), &[1, 2, 0]).unwrap();
        assert_eq!(swapped, kron_all([&z, &id, &x]));
        assert!(permute_qubits(&xz, &[0, 0]).is_err());
    }

    #[test]
    fn eigs_examples() {
        let ev = hermitian_eigs(&ComplexMatrix::diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(ev.values, vec![1.0, 3.0]);
        let ev = hermitian_eigenvalues(&sigma_x()).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigs_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigs(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn inv_sqrt_examples() {
        let m = psd_inv_sqrt(&ComplexMatrix::diagonal(&[4.0, 0.0]), 1e-12).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.0])) < 1e-15);
        let m = psd_inv_sqrt(&ComplexMatrix::identity(4), SUPPORT_TOL).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let m = psd_inv_sqrt(&ComplexMatrix::diagonal(&[9.0, 4.0]), SUPPORT_TOL).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diagonal(&[1.0 / 3.0, 0.5])) < 1e-15);
        assert!(matches!(
            psd_inv_sqrt(&ComplexMatrix::diagonal(&[1.0, -0.1]), SUPPORT_TOL),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0..1.0f64, 2 * n * n)
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in entries(2), b in entries(2), cc in entries(3)) {
            let (a, b, cc) = (random_matrix(&a, 2), random_matrix(&b, 2), random_matrix(&cc, 3));
            let left = kron(&kron(&a, &b), &cc);
            let right = kron(&a, &kron(&b, &cc));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }

        #[test]
        fn partial_trace_of_product(a in entries(2), b in entries(3)) {
            let (a, b) = (random_matrix(&a, 2), random_matrix(&b, 3));
            let reduced = partial_trace(&kron(&a, &b), &[2, 3], &[0]).unwrap();
            prop_assert!(reduced.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        }

        #[test]
        fn partial_transpose_is_involution(a in entries(4), sub in 0usize..2) {
            let m = random_matrix(&a, 4);
            let twice = partial_transpose(&partial_transpose(&m, [2, 2], sub).unwrap(), [2, 2], sub).unwrap();
            prop_assert_eq!(twice, m);
        }

        #[test]
        fn eigendecomposition_reconstructs(a in entries(5)) {
            let m = random_hermitian(&a, 5);
            let eig = hermitian_eigs(&m).unwrap();
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(eig.reconstruct_with(|x| x).max_abs_diff(&m) < 1e-10);
            let gram = &eig.vectors.adjoint() * &eig.vectors;
            prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-10);
        }

        #[test]
        fn inv_sqrt_sandwich_is_support_projector(a in entries(3), rank in 1usize..4) {
            // Rank-deficient PSD matrix: G G^dagger with G of shape 4 x rank.
            let g = ComplexMatrix::from_fn(4, rank, |r, col| {
                let k = 2 * (r * rank + col);
                c(a[k % a.len()], a[(k + 1) % a.len()])
            });
            let m = &g * &g.adjoint();
            let s = psd_inv_sqrt(&m, SUPPORT_TOL).unwrap();
            let proj = &(&s * &m) * &s;
            let eig = hermitian_eigs(&m).unwrap();
            let cutoff = SUPPORT_TOL * eig.max();
            let support = eig.reconstruct_with(|x| if x > cutoff { 1.0 } else { 0.0 });
            prop_assert!(proj.max_abs_diff(&support) < 1e-9);
        }
    }
}
