//! Kraus-form local operations, channel validation and Choi-matrix
//! complete-positivity tests.
//!
//! A deterministic operation on party `Y` of a bipartite state acts as
//! `ρ ↦ Σᵢ (I ⊗ Aᵢ) ρ (I ⊗ Aᵢ)†` with `Σᵢ Aᵢ†Aᵢ = I`. A probabilistic one
//! only satisfies `Σᵢ Aᵢ†Aᵢ ≤ I`; it succeeds with probability
//! `p = Σᵢ Tr(Aᵢ†Aᵢ ρ)` and the result is renormalized by `1/p`.
//!
//! The phase-shifter map `T|u⟩ = |u⟩, T|v⟩ = e^{iγ}|u⟩` is kept as a raw
//! operator ([`GreenbergerMap`]). Wrapping it as a deterministic channel is
//! allowed, and [`validate_channel`] then reports it as not trace preserving.

use alloc::format;
use alloc::vec::Vec;

use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{
    embed, hermitian_eigen, hermitian_eigenvalues, kron, phase, psd_sqrt, ComplexMatrix,
    DimensionSpec, ONE, ZERO,
};
use crate::state::DensityOperator;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Deterministic,
    Probabilistic,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Deterministic => "deterministic",
            Self::Probabilistic => "probabilistic",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A linear map on matrices, `X ↦ Λ(X)`.
pub trait LinearMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn apply_to(&self, x: &ComplexMatrix) -> ComplexMatrix;
}

/// Sequence of Kraus operators tagged with how they are meant to be used.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    input_dim: usize,
    output_dim: usize,
    operators: Vec<ComplexMatrix>,
    kind: ChannelKind,
}

impl KrausChannel {
    /// Builds a channel and enforces the completeness condition of `kind`.
    pub fn new(kind: ChannelKind, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_raw(kind, operators)?;
        let report = validate_channel(&ch);
        if !report.is_valid_for(kind) {
            return Err(Error::InvalidChannel(format!(
                "{kind} channel fails its completeness condition (residual {:e}, largest effect eigenvalue {})",
                report.completeness_residual, report.max_effect_eigenvalue
            )));
        }
        Ok(ch)
    }

    /// Builds a channel checking only operator shapes. Used for maps read
    /// from files that are meant to be classified rather than applied.
    pub fn from_raw(kind: ChannelKind, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (output_dim, input_dim) = (first.rows(), first.cols());
        if let Some((i, op)) = operators
            .iter()
            .enumerate()
            .find(|(_, op)| (op.rows(), op.cols()) != (output_dim, input_dim))
        {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {i} is {}x{}, expected {output_dim}x{input_dim}",
                op.rows(),
                op.cols()
            )));
        }
        Ok(Self {
            input_dim,
            output_dim,
            operators,
            kind,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_raw(ChannelKind::Deterministic, alloc::vec![ComplexMatrix::identity(dim)])
            .expect("identity channel")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(ChannelKind::Deterministic, alloc::vec![u])
    }

    /// Non-selective projective measurement with the given projectors.
    pub fn measurement(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(p) = projectors.first() {
            crate::state::validate_projectors(&projectors, p.rows())?;
        }
        Self::new(ChannelKind::Deterministic, projectors)
    }

    /// The probabilistic channel that keeps only Kraus operator `index`.
    pub fn outcome(&self, index: usize) -> Result<Self> {
        let op = self
            .operators
            .get(index)
            .ok_or(Error::OutcomeOutOfRange {
                index,
                count: self.operators.len(),
            })?;
        Self::from_raw(ChannelKind::Probabilistic, alloc::vec![op.clone()])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// `Σᵢ Aᵢ†Aᵢ`
    pub fn effect_sum(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.input_dim, self.input_dim), |acc, a| {
                &acc + &(&a.adjoint() * a)
            })
    }
}

impl LinearMap for KrausChannel {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.output_dim
    }

    fn apply_to(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.output_dim, self.output_dim), |acc, a| {
                &acc + &a.conjugate_by(x).expect("operator shape")
            })
    }
}

/// Matrix transpose on a `dim`-dimensional space; positive but not
/// completely positive.
#[derive(Clone, Copy, Debug)]
pub struct TransposeMap(pub usize);

impl LinearMap for TransposeMap {
    fn input_dim(&self) -> usize {
        self.0
    }

    fn output_dim(&self) -> usize {
        self.0
    }

    fn apply_to(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.transpose()
    }
}

/// Linear map given by a closure.
pub struct FnMap<F> {
    pub input_dim: usize,
    pub output_dim: usize,
    pub f: F,
}

impl<F: Fn(&ComplexMatrix) -> ComplexMatrix> LinearMap for FnMap<F> {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.output_dim
    }

    fn apply_to(&self, x: &ComplexMatrix) -> ComplexMatrix {
        (self.f)(x)
    }
}

/// `C = Σ_{jk} E_{jk} ⊗ Λ(E_{jk})` over the input matrix units.
pub fn choi_matrix(map: &impl LinearMap) -> ComplexMatrix {
    let d = map.input_dim();
    let out = map.output_dim();
    let mut choi = ComplexMatrix::zeros(d * out, d * out);
    for j in 0..d {
        for k in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit.set(j, k, ONE);
            let image = map.apply_to(&unit);
            choi = &choi + &kron(&unit, &image);
        }
    }
    choi
}

/// Complete positivity via Choi positivity: returns the verdict and the
/// smallest Choi eigenvalue.
pub fn is_completely_positive(map: &impl LinearMap) -> Result<(bool, f64)> {
    let min = hermitian_eigenvalues(&choi_matrix(map))?[0];
    Ok((min >= -tol::PSD, min))
}

/// Diagnostics for a Kraus channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelReport {
    pub trace_preserving: bool,
    pub sub_normalized: bool,
    pub completely_positive: bool,
    pub min_choi_eigenvalue: f64,
    /// `max |Σ Aᵢ†Aᵢ − I|` entrywise.
    pub completeness_residual: f64,
    /// Largest eigenvalue of `Σ Aᵢ†Aᵢ`.
    pub max_effect_eigenvalue: f64,
    /// Sorted eigenvalues of `Σ Aᵢ†Aᵢ`.
    pub effect_spectrum: Vec<f64>,
}

impl ChannelReport {
    /// Whether the channel satisfies the constraints of the given kind.
    pub fn is_valid_for(&self, kind: ChannelKind) -> bool {
        self.completely_positive
            && match kind {
                ChannelKind::Deterministic => self.trace_preserving,
                ChannelKind::Probabilistic => self.sub_normalized,
            }
    }
}

pub fn validate_channel(ch: &KrausChannel) -> ChannelReport {
    let effect = ch.effect_sum();
    let completeness_residual = effect.max_abs_diff(&ComplexMatrix::identity(ch.input_dim));
    // Σ A†A is Hermitian by construction
    let effect_spectrum = hermitian_eigenvalues(&effect).expect("Hermitian effect sum");
    let max_effect_eigenvalue = *effect_spectrum.last().expect("nonempty");
    let (completely_positive, min_choi_eigenvalue) =
        is_completely_positive(ch).expect("Kraus Choi matrix is Hermitian");
    ChannelReport {
        trace_preserving: completeness_residual <= tol::COMPLETENESS,
        sub_normalized: max_effect_eigenvalue <= 1.0 + tol::COMPLETENESS,
        completely_positive,
        min_choi_eigenvalue,
        completeness_residual,
        max_effect_eigenvalue,
        effect_spectrum,
    }
}

fn check_kind(ch: &KrausChannel, expected: ChannelKind) -> Result<()> {
    if ch.kind != expected {
        return Err(Error::KindMismatch {
            expected: expected.as_str(),
            found: ch.kind.as_str(),
        });
    }
    Ok(())
}

/// Unnormalized `Σᵢ (I ⊗ Aᵢ) ρ (I ⊗ Aᵢ)†` with the operators on `party`, and
/// the dimension spec of the result.
fn local_kraus_sum(
    ch: &KrausChannel,
    rho: &DensityOperator,
    party: &str,
) -> Result<(ComplexMatrix, DimensionSpec)> {
    let dims = rho.dims();
    let pos = dims.index_of(party)?;
    let dim = dims.parts()[pos].1;
    if dim != ch.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {} on `{party}` of dimension {dim}",
            ch.input_dim
        )));
    }
    let mut parts = dims.parts().to_vec();
    parts[pos].1 = ch.output_dim;
    let out_dims = DimensionSpec::new(parts)?;
    let n = out_dims.total();
    let mut acc = ComplexMatrix::zeros(n, n);
    for a in &ch.operators {
        let lifted = embed(a, dims, party)?;
        acc = &acc + &lifted.conjugate_by(rho.matrix())?;
    }
    Ok((acc, out_dims))
}

/// Applies a deterministic channel to one party, identity elsewhere.
pub fn apply_deterministic(ch: &KrausChannel, rho: &DensityOperator, party: &str) -> Result<DensityOperator> {
    check_kind(ch, ChannelKind::Deterministic)?;
    let report = validate_channel(ch);
    if !report.trace_preserving {
        return Err(Error::InvalidChannel(format!(
            "deterministic channel is not trace preserving (residual {:e})",
            report.completeness_residual
        )));
    }
    let (m, dims) = local_kraus_sum(ch, rho, party)?;
    DensityOperator::new(dims, m)
}

/// Applies a probabilistic channel to one party and conditions on success.
/// Returns the renormalized state and the success probability.
pub fn apply_selective(ch: &KrausChannel, rho: &DensityOperator, party: &str) -> Result<(DensityOperator, f64)> {
    check_kind(ch, ChannelKind::Probabilistic)?;
    let report = validate_channel(ch);
    if !report.sub_normalized {
        return Err(Error::InvalidChannel(format!(
            "probabilistic channel exceeds the identity (largest effect eigenvalue {})",
            report.max_effect_eigenvalue
        )));
    }
    let (m, dims) = local_kraus_sum(ch, rho, party)?;
    let p = m.trace().re;
    if !(p > tol::VANISHING) {
        return Err(Error::VanishingProbability(p));
    }
    Ok((DensityOperator::new(dims, m.scale_real(1.0 / p))?, p))
}

/// The nonunitary shifter map `T|u⟩ = |u⟩, T|v⟩ = e^{iγ}|u⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenbergerMap {
    pub gamma: f64,
    pub matrix: ComplexMatrix,
}

impl GreenbergerMap {
    /// Single-operator deterministic channel built from `T` without the
    /// completeness check. It always fails [`validate_channel`].
    pub fn as_raw_channel(&self) -> KrausChannel {
        KrausChannel::from_raw(ChannelKind::Deterministic, alloc::vec![self.matrix.clone()])
            .expect("2x2 operator")
    }

    /// `T/√2`, the largest multiple of `T` that is a contraction.
    pub fn scaled_kraus(&self) -> ComplexMatrix {
        self.matrix.scale_real(core::f64::consts::FRAC_1_SQRT_2)
    }
}

pub fn greenberger_t(gamma: f64) -> GreenbergerMap {
    GreenbergerMap {
        gamma,
        matrix: ComplexMatrix::from_rows([[ONE, phase(gamma)], [ZERO, ZERO]]),
    }
}

/// Completes a contraction `k` to the deterministic channel `{k, B}` with
/// `B = √(I − k†k)`.
pub fn complete_to_deterministic(k: &ComplexMatrix) -> Result<KrausChannel> {
    if !k.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "completion needs a square operator, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let n = k.rows();
    let effect = &k.adjoint() * k;
    let eig = hermitian_eigen(&effect)?;
    let max = *eig.values.last().expect("nonempty");
    if max > 1.0 + tol::COMPLETENESS {
        return Err(Error::NotContraction(max));
    }
    let b = psd_sqrt(&(&ComplexMatrix::identity(n) - &effect))?;
    Ok(KrausChannel {
        input_dim: n,
        output_dim: n,
        operators: alloc::vec![k.clone(), b],
        kind: ChannelKind::Deterministic,
    })
}

/// `N(ρ) = TρT†/Tr(TρT†)`
pub fn normalized_image(t: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let image = t.conjugate_by(rho)?;
    let tr = image.trace().re;
    if !(tr > tol::VANISHING) {
        return Err(Error::Annihilated(tr));
    }
    Ok(image.scale_real(1.0 / tr))
}

/// Convexity defect of the normalized rule `N`:
/// `max |N(wρ₁ + (1−w)ρ₂) − wN(ρ₁) − (1−w)N(ρ₂)|`.
pub fn linearity_test(
    t: &ComplexMatrix,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    w: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!("weight {w} outside [0, 1]")));
    }
    if rho1.dims() != rho2.dims() {
        return Err(Error::DimensionMismatch("linearity test on states over different spaces".into()));
    }
    let mix = &rho1.matrix().scale_real(w) + &rho2.matrix().scale_real(1.0 - w);
    let n_mix = normalized_image(t, &mix)?;
    let n1 = normalized_image(t, rho1.matrix())?;
    let n2 = normalized_image(t, rho2.matrix())?;
    let combined = &n1.scale_real(w) + &n2.scale_real(1.0 - w);
    Ok(n_mix.max_abs_diff(&combined))
}

/// `Σ pᵢ ρᵢ` reassembled from selective outcomes, as a plain matrix.
pub fn recombine(outcomes: &[(DensityOperator, f64)]) -> Option<ComplexMatrix> {
    let first = outcomes.first()?;
    Some(outcomes.iter().skip(1).fold(
        first.0.matrix().scale_real(first.1),
        |acc, (rho, p)| &acc + &rho.matrix().scale_real(*p),
    ))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::linalg::C64;
    use crate::state::{singlet, spin_projectors, PureState, SPIN1, SPIN2};
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit() -> DimensionSpec {
        DimensionSpec::single("q", 2).unwrap()
    }

    fn pure(v: [C64; 2]) -> DensityOperator {
        PureState::normalized(qubit(), v.to_vec()).unwrap().to_density()
    }

    fn pauli() -> [ComplexMatrix; 4] {
        [
            ComplexMatrix::identity(2),
            ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
            ComplexMatrix::from_rows([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]),
            ComplexMatrix::diag_real(&[1.0, -1.0]),
        ]
    }

    #[test]
    fn t_maps_basis_states_as_required() {
        for k in 0..8 {
            let gamma = k as f64 * 0.9;
            let t = greenberger_t(gamma).matrix;
            let tu = t.apply(&[ONE, ZERO]).unwrap();
            let tv = t.apply(&[ZERO, ONE]).unwrap();
            assert!((tu[0] - ONE).norm() < 1e-12 && tu[1].norm() < 1e-12);
            assert!((tv[0] - phase(gamma)).norm() < 1e-12 && tv[1].norm() < 1e-12);
        }
        assert_eq!(
            greenberger_t(0.0).matrix,
            ComplexMatrix::from_rows([[ONE, ONE], [ZERO, ZERO]])
        );
        let r = FRAC_1_SQRT_2;
        let img = greenberger_t(1.1).matrix.apply(&[c(r, 0.0), c(r, 0.0)]).unwrap();
        assert!((img[0] - (ONE + phase(1.1)) * r).norm() < 1e-15);
        assert_eq!(img[1], ZERO);
    }

    #[test]
    fn identity_channel_report() {
        let r = validate_channel(&KrausChannel::identity(2));
        assert!(r.trace_preserving && r.completely_positive && r.sub_normalized);
    }

    #[test]
    fn raw_t_is_not_trace_preserving_but_is_cp() {
        let r = validate_channel(&greenberger_t(0.3).as_raw_channel());
        assert!(!r.trace_preserving);
        assert!(r.completely_positive);
        assert!(!r.sub_normalized);
        assert!(r.effect_spectrum[0].abs() < 1e-9 && (r.effect_spectrum[1] - 2.0).abs() < 1e-9);
        assert!(KrausChannel::new(ChannelKind::Deterministic, alloc::vec![greenberger_t(0.3).matrix]).is_err());
    }

    #[test]
    fn completion_of_scaled_t() {
        for k in 0..8 {
            let gamma = k as f64 * PI / 4.0;
            let g = greenberger_t(gamma);
            let ch = complete_to_deterministic(&g.scaled_kraus()).unwrap();
            assert!(validate_channel(&ch).trace_preserving);
            // B is the projector onto (|u⟩ − e^{−iγ}|v⟩)/√2
            let w = [c(FRAC_1_SQRT_2, 0.0), -phase(-gamma) * FRAC_1_SQRT_2];
            let expected = ComplexMatrix::outer(&w, &w);
            assert!(ch.operators()[1].max_abs_diff(&expected) < 1e-10, "γ={gamma}");
        }
    }

    #[test]
    fn completion_edge_cases() {
        let ch = complete_to_deterministic(&ComplexMatrix::identity(2)).unwrap();
        assert!(ch.operators()[1].max_abs() < 1e-12);
        let p = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let ch = complete_to_deterministic(&p).unwrap();
        assert!(ch.operators()[1].max_abs_diff(&ComplexMatrix::diag_real(&[0.0, 1.0])) < 1e-12);
        assert!(matches!(
            complete_to_deterministic(&greenberger_t(0.0).matrix),
            Err(Error::NotContraction(_))
        ));
    }

    #[test]
    fn choi_examples() {
        let id = choi_matrix(&KrausChannel::identity(2));
        let r = FRAC_1_SQRT_2;
        let phi = [c(r, 0.0), ZERO, ZERO, c(r, 0.0)];
        assert!(id.max_abs_diff(&ComplexMatrix::outer(&phi, &phi).scale_real(2.0)) < 1e-15);

        let depolarize = FnMap {
            input_dim: 2,
            output_dim: 2,
            f: |x: &ComplexMatrix| ComplexMatrix::identity(2).scale(x.trace() * 0.5),
        };
        let c1 = choi_matrix(&depolarize);
        assert!(c1.max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.5)) < 1e-15);
        let kraus = KrausChannel::new(
            ChannelKind::Deterministic,
            pauli().iter().map(|p| p.scale_real(0.5)).collect(),
        )
        .unwrap();
        assert!(choi_matrix(&kraus).max_abs_diff(&c1) < 1e-15);

        let (cp, min) = is_completely_positive(&greenberger_t(0.7).as_raw_channel()).unwrap();
        assert!(cp && min >= -1e-9);
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        let (cp, min) = is_completely_positive(&TransposeMap(2)).unwrap();
        assert!(!cp);
        assert!((min + 1.0).abs() < 1e-12);
        let (cp, _) = is_completely_positive(&KrausChannel::identity(2)).unwrap();
        assert!(cp);
    }

    #[test]
    fn choi_trace_equals_input_dim_for_trace_preserving_maps() {
        let ch = complete_to_deterministic(&greenberger_t(0.4).scaled_kraus()).unwrap();
        assert!((choi_matrix(&ch).trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_on_particle_two_preserves_particle_one() {
        let u = ComplexMatrix::from_rows([
            [c(0.6, 0.0), c(0.0, 0.8)],
            [c(0.0, 0.8), c(0.6, 0.0)],
        ]);
        let ch = KrausChannel::unitary(u).unwrap();
        let rho = singlet().to_density();
        let out = apply_deterministic(&ch, &rho, SPIN2).unwrap();
        let red = out.reduced(&[SPIN1]).unwrap();
        assert!(red.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn identity_channel_leaves_state_unchanged() {
        let rho = singlet().to_density();
        let out = apply_deterministic(&KrausChannel::identity(2), &rho, SPIN1).unwrap();
        assert!(out.distance(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn selective_projection_on_singlet() {
        let rho = singlet().to_density();
        let down = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let ch = KrausChannel::from_raw(ChannelKind::Probabilistic, alloc::vec![down]).unwrap();
        let (post, p) = apply_selective(&ch, &rho, SPIN2).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // |↑⟩⟨↑| ⊗ |↓⟩⟨↓| is index 1 of (spin1, spin2)
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(1, 1, ONE);
        assert!(post.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn selective_outcomes_recombine_to_nonselective() {
        let rho = singlet().to_density();
        let meas = KrausChannel::measurement(spin_projectors([0.0, 0.6, 0.8]).to_vec()).unwrap();
        let outcomes: Vec<_> = (0..2)
            .map(|i| apply_selective(&meas.outcome(i).unwrap(), &rho, SPIN2).unwrap())
            .collect();
        let mixed = recombine(&outcomes).unwrap();
        let nonselective = apply_deterministic(&meas, &rho, SPIN2).unwrap();
        assert!(mixed.max_abs_diff(nonselective.matrix()) < 1e-10);
    }

    #[test]
    fn kind_and_probability_errors() {
        let rho = singlet().to_density();
        assert!(matches!(
            apply_selective(&KrausChannel::identity(2), &rho, SPIN2),
            Err(Error::KindMismatch { .. })
        ));
        let up = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let ch = KrausChannel::from_raw(ChannelKind::Probabilistic, alloc::vec![up.clone()]).unwrap();
        assert!(matches!(apply_deterministic(&ch, &rho, SPIN2), Err(Error::KindMismatch { .. })));
        // |↑↑⟩ has no weight in the singlet
        let both_up = DensityOperator::new(
            rho.dims().clone(),
            ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]),
        )
        .unwrap();
        let down = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let ch = KrausChannel::from_raw(ChannelKind::Probabilistic, alloc::vec![down]).unwrap();
        assert!(matches!(
            apply_selective(&ch, &both_up, SPIN2),
            Err(Error::VanishingProbability(_))
        ));
        assert!(matches!(
            apply_deterministic(&KrausChannel::identity(3), &rho, SPIN2),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            apply_deterministic(&greenberger_t(0.0).as_raw_channel(), &rho, SPIN2),
            Err(Error::InvalidChannel(_))
        ));
    }

    #[test]
    fn dephasing_on_shifter_keeps_photon_statistics() {
        use crate::state::{greenberger_predetector, PHOTON1, PHOTON2, SHIFTER};
        let rho = greenberger_predetector(0.4, 1.3).to_density();
        let ch = KrausChannel::measurement(alloc::vec![
            ComplexMatrix::diag_real(&[1.0, 0.0]),
            ComplexMatrix::diag_real(&[0.0, 1.0]),
        ])
        .unwrap();
        let out = apply_deterministic(&ch, &rho, SHIFTER).unwrap();
        let before = rho.reduced(&[PHOTON1, PHOTON2]).unwrap();
        let after = out.reduced(&[PHOTON1, PHOTON2]).unwrap();
        // brute force: diagonal photon-pair probabilities summed by hand
        for idx in 0..4 {
            let manual: f64 = (0..2).map(|s| out.matrix().get(idx * 2 + s, idx * 2 + s).re).sum();
            assert!((after.matrix().get(idx, idx).re - manual).abs() < 1e-14);
            assert!((before.matrix().get(idx, idx).re - manual).abs() < 1e-12);
        }
        assert!(before.distance(&after).unwrap() < 1e-12);
    }

    /// Brute-force oracle: the normalized rule on explicit 2x2 matrices,
    /// written out entry by entry without the library helpers.
    fn brute_defect(t: [[C64; 2]; 2], r1: [[C64; 2]; 2], r2: [[C64; 2]; 2], w: f64) -> f64 {
        let norm = |r: [[C64; 2]; 2]| -> [[C64; 2]; 2] {
            let mut img = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            img[i][j] += t[i][k] * r[k][l] * t[j][l].conj();
                        }
                    }
                }
            }
            let tr = img[0][0] + img[1][1];
            img.map(|row| row.map(|z| z / tr))
        };
        let mut mix = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                mix[i][j] = r1[i][j] * w + r2[i][j] * (1.0 - w);
            }
        }
        let (nm, n1, n2) = (norm(mix), norm(r1), norm(r2));
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((nm[i][j] - n1[i][j] * w - n2[i][j] * (1.0 - w)).norm());
            }
        }
        worst
    }

    #[test]
    fn single_qubit_witnesses_of_t_are_degenerate() {
        // T(0) has rank one, so every admissible qubit input normalizes to |u⟩⟨u|.
        let t = [[ONE, ONE], [ZERO, ZERO]];
        let uu = [[ONE, ZERO], [ZERO, ZERO]];
        let vv = [[ZERO, ZERO], [ZERO, ONE]];
        let ww = [[c(0.5, 0.0), c(0.0, -0.5)], [c(0.0, 0.5), c(0.5, 0.0)]];
        assert_eq!(brute_defect(t, uu, vv, 0.5), 0.0);
        assert!(brute_defect(t, uu, ww, 0.5) < 1e-15);

        let tm = greenberger_t(0.0).matrix;
        let d1 = linearity_test(&tm, &pure([ONE, ZERO]), &pure([ZERO, ONE]), 0.5).unwrap();
        let d2 = linearity_test(&tm, &pure([ONE, ZERO]), &pure([ONE, c(0.0, 1.0)]), 0.5).unwrap();
        assert!(d1 < 1e-15 && d2 < 1e-15);
    }

    #[test]
    fn unitary_rule_is_linear() {
        let u = ComplexMatrix::from_rows([[c(0.6, 0.0), c(0.0, 0.8)], [c(0.0, 0.8), c(0.6, 0.0)]]);
        for w in [0.1, 0.5, 0.9] {
            let d = linearity_test(&u, &pure([ONE, c(0.3, 0.2)]), &pure([c(0.1, 0.0), ONE]), w).unwrap();
            assert!(d <= 1e-10);
        }
    }

    #[test]
    fn shifter_rule_is_nonlinear_once_paired_with_a_record() {
        // ρ₁ = |0⟩⟨0| ⊗ |u⟩⟨u| and ρ₂ = |1⟩⟨1| ⊗ |+⟩⟨+| with |+⟩ = (|u⟩+|v⟩)/√2;
        // Tr of the T-images are 1 and 2, so N(mix) = diag(1/3, 2/3) on the
        // record while the mixture of images is diag(1/2, 1/2): defect 1/6.
        let t = kron(&ComplexMatrix::identity(2), &greenberger_t(0.0).matrix);
        let dims = DimensionSpec::from_pairs(&[("record", 2), ("shifter", 2)]).unwrap();
        let r = FRAC_1_SQRT_2;
        let rho1 = PureState::new(dims.clone(), alloc::vec![ONE, ZERO, ZERO, ZERO]).unwrap().to_density();
        let rho2 = PureState::new(dims, alloc::vec![ZERO, ZERO, c(r, 0.0), c(r, 0.0)]).unwrap().to_density();
        let d = linearity_test(&t, &rho1, &rho2, 0.5).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-12, "{d}");
        // endpoint continuity
        let d0 = linearity_test(&t, &rho1, &rho2, 1e-9).unwrap();
        assert!(d0 < 1e-8);
    }

    #[test]
    fn annihilated_input_is_an_error() {
        let t = greenberger_t(0.0).matrix;
        let minus = pure([ONE, -ONE]);
        assert!(matches!(
            linearity_test(&t, &minus, &pure([ONE, ZERO]), 0.5),
            Err(Error::Annihilated(_))
        ));
    }
}
