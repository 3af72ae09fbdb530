//! Marginal-invariance checks.
//!
//! Any deterministic local operation on `Y` leaves the reduced state of `X`
//! untouched. A transformation that changes the `X` marginal therefore has no
//! deterministic completely positive realization on `Y` alone.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::PI;

// Supplies libm-backed math when no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{apply_deterministic, apply_selective, ChannelKind, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{inverse_sqrt, kron_vec, phase, ComplexMatrix, DimensionSpec, C64, ZERO};
use crate::state::{DensityOperator, PureState};
use crate::tol;

/// A claimed transformation of a bipartite pure state, first factor `X`,
/// second factor `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetTransform {
    pub input: PureState,
    pub output: PureState,
}

impl TargetTransform {
    pub fn new(input: PureState, output: PureState) -> Result<Self> {
        if input.dims() != output.dims() {
            return Err(Error::DimensionMismatch(
                "input and output states live on different spaces".into(),
            ));
        }
        if input.dims().len() != 2 {
            return Err(Error::InvalidDimensions(format!(
                "target transform needs a bipartite space, got {} factors",
                input.dims().len()
            )));
        }
        Ok(Self { input, output })
    }

    /// `a₁|φ₁⟩|χ₁⟩ + a₂|φ₂⟩|χ₂⟩ ↦ e^{iη}[a₁|φ₁⟩ + e^{iγ}a₂|φ₂⟩]|χ₂⟩` on two
    /// qubits `X`, `Y` with computational bases for `φ` and `χ`.
    pub fn schmidt(a1: C64, a2: C64, eta: f64, gamma: f64) -> Result<Self> {
        let dims = DimensionSpec::from_pairs(&[("X", 2), ("Y", 2)])?;
        let input = PureState::new(dims.clone(), alloc::vec![a1, ZERO, ZERO, a2])?;
        let x = [a1 * phase(eta), a2 * phase(eta + gamma)];
        let output = PureState::new(dims, kron_vec(&x, &[ZERO, C64::new(1.0, 0.0)]))?;
        Self::new(input, output)
    }

    fn x_label(&self) -> String {
        self.input.dims().parts()[0].0.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    /// Max-abs entry distance between the input and output `X` marginals.
    pub marginal_distance: f64,
    pub achievable_deterministically: bool,
    pub note: String,
}

/// Compares the `X` marginals of the two ends of a target transform.
pub fn marginal_obstruction(t: &TargetTransform) -> Result<ObstructionReport> {
    if t.input.dims() != t.output.dims() {
        return Err(Error::DimensionMismatch("input and output spaces differ".into()));
    }
    let x = t.x_label();
    let before = t.input.to_density().reduced(&[&x])?;
    let after = t.output.to_density().reduced(&[&x])?;
    let marginal_distance = before.distance(&after)?;
    let achievable = marginal_distance <= tol::MARGINAL;
    let note = if achievable {
        format!("`{x}` marginal unchanged; a local operation on the other party is not excluded")
    } else {
        format!(
            "`{x}` marginal moves by {marginal_distance:.6} (purity {:.6} -> {:.6}); \
             no completely positive trace-preserving map on the other party does this",
            before.purity(),
            after.purity()
        )
    };
    Ok(ObstructionReport {
        marginal_distance,
        achievable_deterministically: achievable,
        note,
    })
}

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard normal sample (Box–Muller).
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Random pure state with Gaussian amplitudes.
pub fn random_pure_state(rng: &mut impl Rng, dims: &DimensionSpec) -> Result<PureState> {
    let amps = (0..dims.total()).map(|_| gaussian_complex(rng)).collect();
    PureState::normalized(dims.clone(), amps)
}

/// Random deterministic channel on a `dim`-dimensional space with 1–4 Kraus
/// operators. Gaussian operators `Gᵢ` are made complete as
/// `Aᵢ = Gᵢ S^{−1/2}` with `S = Σ Gᵢ†Gᵢ`.
pub fn random_channel(rng: &mut impl Rng, dim: usize) -> Result<KrausChannel> {
    let rank = rng.gen_range(1..=4);
    let raw: Vec<ComplexMatrix> = (0..rank)
        .map(|_| ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng)))
        .collect();
    let s = raw
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, g| &acc + &(&g.adjoint() * g));
    let s_inv_sqrt = inverse_sqrt(&s)?;
    KrausChannel::new(
        ChannelKind::Deterministic,
        raw.iter().map(|g| g * &s_inv_sqrt).collect(),
    )
}

fn bipartite(dims: &DimensionSpec) -> Result<(String, String)> {
    if dims.len() != 2 {
        return Err(Error::InvalidDimensions(format!(
            "fuzzing needs a bipartite space, got {} factors",
            dims.len()
        )));
    }
    Ok((dims.parts()[0].0.clone(), dims.parts()[1].0.clone()))
}

/// Marginal distance on `X` for one state and one channel on `Y`.
pub fn marginal_shift(rho: &DensityOperator, ch: &KrausChannel, x: &str, y: &str) -> Result<f64> {
    let after = apply_deterministic(ch, rho, y)?;
    rho.reduced(&[x])?.distance(&after.reduced(&[x])?)
}

/// Worst `X`-marginal shift over `trials` random bipartite pure states and
/// random deterministic channels on `Y` (the second factor).
pub fn fuzz_no_signaling(seed: u64, trials: usize, dims: &DimensionSpec) -> Result<f64> {
    fuzz_no_signaling_with(seed, trials, dims, random_channel)
}

/// [`fuzz_no_signaling`] with a caller-supplied channel generator. Trial `k`
/// draws from `trial_rng(seed, k)`, so the result does not depend on the
/// order in which trials are evaluated.
pub fn fuzz_no_signaling_with(
    seed: u64,
    trials: usize,
    dims: &DimensionSpec,
    mut channel: impl FnMut(&mut ChaCha8Rng, usize) -> Result<KrausChannel>,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let (x, y) = bipartite(dims)?;
    let dy = dims.parts()[1].1;
    let mut worst = 0.0f64;
    for trial in 0..trials as u64 {
        let mut rng = trial_rng(seed, trial);
        let rho = random_pure_state(&mut rng, dims)?.to_density();
        let ch = channel(&mut rng, dy)?;
        worst = worst.max(marginal_shift(&rho, &ch, &x, &y)?);
    }
    Ok(worst)
}

/// Runs every outcome of `measurement` selectively on `party` and returns
/// `(pᵢ, conditional marginal on keep)` for each outcome with nonzero weight.
pub fn conditional_marginals(
    rho: &DensityOperator,
    measurement: &KrausChannel,
    party: &str,
    keep: &[&str],
) -> Result<Vec<(f64, DensityOperator)>> {
    let mut out = Vec::new();
    for i in 0..measurement.operators().len() {
        match apply_selective(&measurement.outcome(i)?, rho, party) {
            Ok((post, p)) => out.push((p, post.reduced(keep)?)),
            Err(Error::VanishingProbability(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Distance between the pre-measurement marginal on `keep` and the
/// probability-weighted mixture of conditional marginals.
pub fn selective_reconciliation(
    rho: &DensityOperator,
    measurement: &KrausChannel,
    party: &str,
    keep: &[&str],
) -> Result<f64> {
    let before = rho.reduced(keep)?;
    let parts = conditional_marginals(rho, measurement, party, keep)?;
    let mixed = parts
        .iter()
        .fold(ComplexMatrix::zeros(before.matrix().rows(), before.matrix().cols()), |acc, (p, m)| {
            &acc + &m.matrix().scale_real(*p)
        });
    Ok(mixed.max_abs_diff(before.matrix()))
}
