//! Pure states and density operators over labeled tensor factors, plus the
//! concrete states of the photon, shifter and spin scenarios.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::FRAC_1_SQRT_2;

// Supplies libm-backed math when no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{
    embed, hermitian_eigen, kron_vec, partial_trace_with_dims, phase, ComplexMatrix,
    DimensionSpec, C64, ONE, ZERO,
};
use crate::tol;

pub const PHOTON1: &str = "photon1";
pub const PHOTON2: &str = "photon2";
pub const SHIFTER: &str = "shifter";
pub const SPIN1: &str = "spin1";
pub const SPIN2: &str = "spin2";
pub const POSITION2: &str = "position2";

/// Basis indices. Path kets reuse the same two slots before and after the
/// interferometer: `a`/`h` and `a'`/`c'` are index 0.
pub mod basis {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const H: usize = 0;
    pub const G: usize = 1;
    pub const C_PRIME: usize = 0;
    pub const D_PRIME: usize = 1;
    pub const U: usize = 0;
    pub const V: usize = 1;
    pub const UP: usize = 0;
    pub const DOWN: usize = 1;
    /// Downward-deflected path `⇓`.
    pub const PATH_DOWN: usize = 0;
    /// Upward-deflected path `⇑`.
    pub const PATH_UP: usize = 1;
}

/// Normalized state vector over a [`DimensionSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: DimensionSpec,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: DimensionSpec, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(dims: DimensionSpec, amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if !(n > tol::VANISHING) {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(dims, amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn basis_state(dims: DimensionSpec, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; dims.total()];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::InvalidArgument(format!("basis index {index} out of range")))? = ONE;
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &DimensionSpec {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.dims.tensor(&other.dims)?,
            kron_vec(&self.amplitudes, &other.amplitudes),
        )
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("states over different spaces".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn to_density(&self) -> DensityOperator {
        pure_to_density(self)
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian, positive, unit-trace operator over a [`DimensionSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dims: DimensionSpec,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(dims: DimensionSpec, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix over a space of dimension {}",
                matrix.rows(),
                matrix.cols(),
                dims.total()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERMITIAN {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::NORMALIZATION || tr.im.abs() > tol::NORMALIZATION {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigen(&matrix)?.values[0];
        if min < -tol::PSD {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
        Ok(Self { dims, matrix })
    }

    pub fn maximally_mixed(dims: DimensionSpec) -> Self {
        let n = dims.total();
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims,
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.matrix.rows(), first.matrix.cols());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch("mixing states over different spaces".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        Self::new(first.dims.clone(), acc)
    }

    pub fn dims(&self) -> &DimensionSpec {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).expect("validated Hermitian").values
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.spectrum().iter().filter(|&&l| l > threshold).count()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<Self> {
        reduced_state(self, keep)
    }

    /// Largest entrywise difference between the two matrices.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("comparing states over different spaces".into()));
        }
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }
}

/// `|s⟩⟨s|`
pub fn pure_to_density(s: &PureState) -> DensityOperator {
    DensityOperator {
        dims: s.dims.clone(),
        matrix: ComplexMatrix::outer(&s.amplitudes, &s.amplitudes),
    }
}

/// Marginal on the labeled factors.
pub fn reduced_state(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let (m, dims) = partial_trace_with_dims(&rho.matrix, &rho.dims, keep)?;
    DensityOperator::new(dims, m)
}

/// `pᵢ = Tr(Pᵢ ρ)` for a complete orthogonal projector set over the full space.
pub fn measurement_probabilities(rho: &DensityOperator, projectors: &[ComplexMatrix]) -> Result<Vec<f64>> {
    validate_projectors(projectors, rho.matrix.rows())?;
    let probs: Vec<f64> = projectors
        .iter()
        .map(|p| (p * &rho.matrix).trace().re)
        .collect();
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    Ok(probs)
}

/// [`measurement_probabilities`] for projectors acting on one factor.
pub fn measurement_probabilities_on(
    rho: &DensityOperator,
    label: &str,
    projectors: &[ComplexMatrix],
) -> Result<Vec<f64>> {
    let lifted = projectors
        .iter()
        .map(|p| embed(p, &rho.dims, label))
        .collect::<Result<Vec<_>>>()?;
    measurement_probabilities(rho, &lifted)
}

/// Checks that the projectors are Hermitian idempotents on a space of
/// dimension `dim`, mutually orthogonal and summing to the identity.
pub fn validate_projectors(projectors: &[ComplexMatrix], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidProjectors("empty projector set".into()));
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if !p.is_square() || p.rows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "projector {i} is {}x{}, expected {dim}x{dim}",
                p.rows(),
                p.cols()
            )));
        }
        if p.hermiticity_defect() > tol::COMPLETENESS {
            return Err(Error::InvalidProjectors(format!("projector {i} is not Hermitian")));
        }
        if (p * p).max_abs_diff(p) > tol::COMPLETENESS {
            return Err(Error::InvalidProjectors(format!("projector {i} is not idempotent")));
        }
        for (j, q) in projectors[..i].iter().enumerate() {
            if (p * q).max_abs() > tol::COMPLETENESS {
                return Err(Error::InvalidProjectors(format!(
                    "projectors {j} and {i} are not orthogonal"
                )));
            }
        }
        sum = &sum + p;
    }
    let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if residual > tol::COMPLETENESS {
        return Err(Error::InvalidProjectors(format!(
            "projectors sum to identity only within {residual:e}"
        )));
    }
    Ok(())
}

/// `σ·d` for a real direction `d` (not normalized here).
pub fn sigma_dot(d: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = d;
    ComplexMatrix::from_rows([
        [C64::new(z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// Eigenprojectors of `σ·d` for a unit direction, ordered as outcomes `[+1, -1]`.
pub fn spin_projectors(d: [f64; 3]) -> [ComplexMatrix; 2] {
    let s = sigma_dot(d);
    let id = ComplexMatrix::identity(2);
    [(&id + &s).scale_real(0.5), (&id - &s).scale_real(0.5)]
}

/// In-plane direction `(cos γ, sin γ, 0)`.
pub fn planar_direction(gamma: f64) -> [f64; 3] {
    [gamma.cos(), gamma.sin(), 0.0]
}

/// `(|↑↓⟩ - |↓↑⟩)/√2` over `spin1 ⊗ spin2`.
pub fn singlet() -> PureState {
    let dims = DimensionSpec::from_pairs(&[(SPIN1, 2), (SPIN2, 2)]).expect("static dims");
    let r = FRAC_1_SQRT_2;
    PureState::new(dims, vec![ZERO, C64::new(r, 0.0), C64::new(-r, 0.0), ZERO]).expect("normalized")
}

/// Two-photon source state `(|a⟩|a'⟩ + |b⟩|b'⟩)/√2` over `photon1 ⊗ photon2`.
pub fn greenberger_initial() -> PureState {
    let dims = DimensionSpec::from_pairs(&[(PHOTON1, 2), (PHOTON2, 2)]).expect("static dims");
    let r = FRAC_1_SQRT_2;
    PureState::new(dims, vec![C64::new(r, 0.0), ZERO, ZERO, C64::new(r, 0.0)]).expect("normalized")
}

/// Index into `photon1 ⊗ photon2 ⊗ shifter`.
pub fn photon_shifter_index(p1: usize, p2: usize, shifter: usize) -> usize {
    p1 * 4 + p2 * 2 + shifter
}

pub fn photon_shifter_dims() -> DimensionSpec {
    DimensionSpec::from_pairs(&[(PHOTON1, 2), (PHOTON2, 2), (SHIFTER, 2)]).expect("static dims")
}

/// Photon-shifter state just before the detectors:
///
/// `½[(−e^{iα}|h d'⟩ + e^{−iα}|g c'⟩) e^{iβ}|u⟩ + (e^{iα}|g c'⟩ − e^{−iα}|h d'⟩) e^{−iβ}|v⟩]`
pub fn greenberger_predetector(alpha: f64, beta: f64) -> PureState {
    use basis::*;
    let mut amps = vec![ZERO; 8];
    amps[photon_shifter_index(H, D_PRIME, U)] = -phase(alpha + beta) * 0.5;
    amps[photon_shifter_index(G, C_PRIME, U)] = phase(beta - alpha) * 0.5;
    amps[photon_shifter_index(G, C_PRIME, V)] = phase(alpha - beta) * 0.5;
    amps[photon_shifter_index(H, D_PRIME, V)] = -phase(-alpha - beta) * 0.5;
    PureState::new(photon_shifter_dims(), amps).expect("normalized")
}

/// Shifter inserted, `|A⟩ = (|u⟩ + |v⟩)/√2`, in the `{u, v}` basis.
pub fn shifter_inserted() -> [C64; 2] {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    [r, r]
}

/// Shifter removed, `|B⟩ = (|u⟩ − |v⟩)/√2`, in the `{u, v}` basis.
pub fn shifter_removed() -> [C64; 2] {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    [r, -r]
}
