//! Dense complex matrices, labeled tensor-product dimensions, partial traces
//! and a cyclic Jacobi eigensolver for Hermitian matrices.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

// Supplies libm-backed math when no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = num_complex::Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `e^{iθ}`
pub fn phase(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes,
    /// length mismatches and non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {rows}x{cols} must be positive"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be positive");
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![ONE; n])
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.entries[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Square matrix from nested rows. Panics on ragged input; meant for
    /// literals in code and tests.
    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(N, N, entries).expect("literal matrix")
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self::new(v.len(), 1, v.to_vec()).expect("column vector")
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Sum of the diagonal. Panics for non-square matrices.
    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Matrix product, or a dimension error when the inner sizes differ.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                let row = &rhs.entries[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `A X A†`
    pub fn conjugate_by(&self, x: &Self) -> Result<Self> {
        self.try_mul(x)?.try_mul(&self.adjoint())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in max_abs_diff"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m - m†|` over entries; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_defect() <= tolerance
    }

    /// `max |U†U - I|` over entries; infinite for non-square input.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .try_mul(self)
            .expect("square")
            .max_abs_diff(&Self::identity(self.rows))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on inner-dimension mismatch; use [`ComplexMatrix::try_mul`] for
/// untrusted shapes.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a.get(ai, aj);
            if x == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out.set(ai * b.rows + bi, aj * b.cols + bj, x * b.get(bi, bj));
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Ordered list of labeled subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionSpec {
    parts: Vec<(String, usize)>,
}

impl DimensionSpec {
    pub fn new(parts: Vec<(String, usize)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidDimensions("no subsystems".into()));
        }
        for (i, (label, dim)) in parts.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidDimensions("empty label".into()));
            }
            if *dim < 2 {
                return Err(Error::InvalidDimensions(format!(
                    "subsystem `{label}` has dimension {dim} < 2"
                )));
            }
            if parts[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidDimensions(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { parts })
    }

    pub fn from_pairs(parts: &[(&str, usize)]) -> Result<Self> {
        Self::new(parts.iter().map(|(l, d)| (l.to_string(), *d)).collect())
    }

    /// Single-factor space.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::from_pairs(&[(label, dim)])
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|(l, _)| l.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.parts[self.index_of(label)?].1)
    }

    /// Concatenation `self ⊗ other`; labels must stay unique.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Self::new(parts)
    }

    /// Subspec holding the given factor positions, in spec order.
    fn select(&self, positions: &[bool]) -> Self {
        Self {
            parts: self
                .parts
                .iter()
                .zip(positions)
                .filter(|(_, &k)| k)
                .map(|(p, _)| p.clone())
                .collect(),
        }
    }

    /// Resolves a label set to a membership mask, rejecting unknown labels.
    fn mask(&self, labels: &[&str]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.parts.len()];
        for l in labels {
            mask[self.index_of(l)?] = true;
        }
        Ok(mask)
    }

    /// Row-major strides of each factor.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.parts.len()];
        for i in (0..self.parts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.parts[i + 1].1;
        }
        strides
    }

    /// Offsets into the full index space contributed by every joint value of
    /// the masked factors, enumerated in row-major order of those factors.
    fn offsets(&self, mask: &[bool]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for (i, (_, dim)) in self.parts.iter().enumerate() {
            if !mask[i] {
                continue;
            }
            offsets = offsets
                .iter()
                .flat_map(|&o| {
                    let stride = strides[i];
                    (0..*dim).map(move |d| o + d * stride)
                })
                .collect();
        }
        offsets
    }
}

/// Partial trace keeping the labeled factors, returned with their spec.
pub fn partial_trace_with_dims(
    m: &ComplexMatrix,
    dims: &DimensionSpec,
    keep: &[&str],
) -> Result<(ComplexMatrix, DimensionSpec)> {
    let n = dims.total();
    if !m.is_square() || m.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix over a space of dimension {n}",
            m.rows(),
            m.cols()
        )));
    }
    let mask = dims.mask(keep)?;
    let kept = mask.iter().filter(|&&k| k).count();
    if kept == 0 {
        return Err(Error::InvalidKeepSet("keep set is empty".into()));
    }
    if kept == dims.len() {
        return Err(Error::InvalidKeepSet("keep set covers every subsystem".into()));
    }
    let traced: Vec<bool> = mask.iter().map(|k| !k).collect();
    let keep_off = dims.offsets(&mask);
    let trace_off = dims.offsets(&traced);
    let dk = keep_off.len();
    let out = ComplexMatrix::from_fn(dk, dk, |i, j| {
        trace_off
            .iter()
            .map(|&r| m.get(keep_off[i] + r, keep_off[j] + r))
            .sum()
    });
    Ok((out, dims.select(&mask)))
}

/// Partial trace over every factor not named in `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &DimensionSpec, keep: &[&str]) -> Result<ComplexMatrix> {
    partial_trace_with_dims(m, dims, keep).map(|(r, _)| r)
}

/// Lifts an operator on one factor to the full space: `I ⊗ … ⊗ op ⊗ … ⊗ I`.
/// The operator may change that factor's dimension.
pub fn embed(op: &ComplexMatrix, dims: &DimensionSpec, label: &str) -> Result<ComplexMatrix> {
    let pos = dims.index_of(label)?;
    let dim = dims.parts()[pos].1;
    if op.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator with {} columns acting on `{label}` of dimension {dim}",
            op.cols()
        )));
    }
    let left: usize = dims.parts()[..pos].iter().map(|(_, d)| d).product();
    let right: usize = dims.parts()[pos + 1..].iter().map(|(_, d)| d).product();
    let mut out = op.clone();
    if left > 1 {
        out = kron(&ComplexMatrix::identity(left), &out);
    }
    if right > 1 {
        out = kron(&out, &ComplexMatrix::identity(right));
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Σ f(λ) |v⟩⟨v|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| C64::new(f(l), 0.0)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors.get(i, j) * fv[j]);
        &scaled * &self.vectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|i| self.vectors.get(i, k)).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi diagonalization.
///
/// Input is checked against [`tol::HERMITIAN`] and symmetrized as
/// `(m + m†)/2` before iterating.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let defect = m.hermiticity_defect();
    if !(defect <= tol::HERMITIAN) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol::JACOBI * a.frobenius_norm().max(1.0);

    let off_mass = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_mass(&a) >= threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let b = a.get(p, q);
                let abs_b = b.norm();
                if abs_b == 0.0 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let delta = a.get(q, q).re;
                // Phase e^{-iφ} on column q makes the pivot real, then a real
                // rotation annihilates it.
                let ph = b.conj() / abs_b;
                let tau = (delta - alpha) / (2.0 * abs_b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = [[c, s], [-s·ph, c·ph]] acting on (p, q).
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = ph * (-s);
                let g_qq = ph * c;

                // a ← a G
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * g_pp + akq * g_qp);
                    a.set(k, q, akp * g_pq + akq * g_qq);
                }
                // a ← G† a
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, g_pp.conj() * apk + g_qp.conj() * aqk);
                    a.set(q, k, g_pq.conj() * apk + g_qq.conj() * aqk);
                }
                a.set(p, q, ZERO);
                a.set(q, p, ZERO);
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                a.set(p, p, C64::new(app, 0.0));
                a.set(q, q, C64::new(aqq, 0.0));
                // v ← v G
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * g_pp + vkq * g_qp);
                    v.set(k, q, vkp * g_pq + vkq * g_qq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v.get(i, order[k]));
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Principal square root of a PSD matrix; eigenvalues in `[-tol::PSD, 0)`
/// are clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    if let Some(&min) = eig.values.first() {
        if min < -tol::PSD {
            return Err(Error::InvalidArgument(format!(
                "square root of a matrix with eigenvalue {min}"
            )));
        }
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Inverse principal square root of a positive definite matrix.
pub fn inverse_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min <= tol::VANISHING {
        return Err(Error::InvalidArgument(format!(
            "inverse square root of a matrix with eigenvalue {min}"
        )));
    }
    Ok(eig.map_spectrum(|l| 1.0 / l.sqrt()))
}

/// Largest entrywise deviation between `a` and `e^{iθ} b`, minimized over
/// the global phase θ.
///
/// The optimal phase aligns `⟨b|a⟩` with the real axis; when that overlap
/// vanishes no phase helps and the plain difference is reported.
pub fn deviation_up_to_phase(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in deviation_up_to_phase");
    let overlap: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let ph = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * ph).norm())
        .fold(0.0, f64::max)
}
