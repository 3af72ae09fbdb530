//! Path-mode linear optics for single photons coupled to a two-state phase
//! shifter.
//!
//! Each photon is a factor whose basis states are its path modes. A
//! beam splitter transmits without phase and reflects with a factor `i`.
//! The shifter factor uses the `{u, v}` basis; the inserted and removed
//! configurations are `|A⟩ = (|u⟩+|v⟩)/√2` and `|B⟩ = (|u⟩−|v⟩)/√2`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{embed, phase, ComplexMatrix, DimensionSpec, C64, ONE, ZERO};
use crate::state::{
    greenberger_initial, shifter_inserted, PureState, PHOTON1, PHOTON2, SHIFTER,
};
use crate::tol;

/// 50:50 splitter `(1/√2)[[1, i], [i, 1]]` on an ordered mode pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamSplitter {
    pub matrix: ComplexMatrix,
}

pub fn beam_splitter() -> BeamSplitter {
    let t = C64::new(FRAC_1_SQRT_2, 0.0);
    let r = C64::new(0.0, FRAC_1_SQRT_2);
    BeamSplitter {
        matrix: ComplexMatrix::from_rows([[t, r], [r, t]]),
    }
}

/// `diag(1, e^{iφ})` on a mode pair, or `e^{iφ}` on a single mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePlate {
    pub phase: f64,
}

impl PhasePlate {
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&[ONE, phase(self.phase)])
    }
}

/// Shifter Hamiltonian with eigenstates `|u⟩`, `|v⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShifterHamiltonian {
    /// Radians of phase accrued per unit time.
    pub energy_split: f64,
    pub time: f64,
}

impl ShifterHamiltonian {
    /// `diag(e^{iβ}, e^{−iβ})` in the `{u, v}` basis with `β` from
    /// [`shifter_phases`].
    pub fn evolution(&self) -> ComplexMatrix {
        shifter_evolution(shifter_phases(self))
    }
}

/// Accumulated phase `energy_split × time`.
pub fn shifter_phases(h: &ShifterHamiltonian) -> f64 {
    h.energy_split * h.time
}

pub fn shifter_evolution(beta: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[phase(beta), phase(-beta)])
}

/// Mode `index` of the photon factor `factor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRef {
    pub factor: String,
    pub index: usize,
}

impl ModeRef {
    pub fn new(factor: &str, index: usize) -> Self {
        Self {
            factor: factor.to_string(),
            index,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Beam splitter on an ordered pair of modes of one photon.
    BeamSplitter { modes: (ModeRef, ModeRef) },
    /// `e^{iφ}` on one mode.
    Phase { mode: ModeRef, phase: f64 },
    /// `e^{iφ}` on a photon mode when the shifter is in `|A⟩`; identity when
    /// it is in `|B⟩`.
    CondPhase { mode: ModeRef, shifter: String, phase: f64 },
    /// Free evolution of the shifter under its Hamiltonian.
    ShifterEvolution { shifter: String, phase: f64 },
    /// Arbitrary operator on one factor; must be unitary.
    Unitary { factor: String, matrix: ComplexMatrix },
}

impl Element {
    pub fn beam_splitter(factor: &str) -> Self {
        Self::BeamSplitter {
            modes: (ModeRef::new(factor, 0), ModeRef::new(factor, 1)),
        }
    }

    /// Full-space operator of this element.
    pub fn operator(&self, dims: &DimensionSpec) -> Result<ComplexMatrix> {
        match self {
            Self::BeamSplitter { modes: (m1, m2) } => {
                if m1.factor != m2.factor {
                    return Err(Error::InvalidArgument(format!(
                        "beam splitter couples modes of different photons `{}` and `{}`",
                        m1.factor, m2.factor
                    )));
                }
                if m1.index == m2.index {
                    return Err(Error::InvalidArgument("beam splitter on a single mode".into()));
                }
                let d = mode_dim(dims, m1)?;
                mode_dim(dims, m2)?;
                let bs = beam_splitter().matrix;
                let mut local = ComplexMatrix::identity(d);
                let idx = [m1.index, m2.index];
                for (a, &i) in idx.iter().enumerate() {
                    for (b, &j) in idx.iter().enumerate() {
                        local.set(i, j, bs.get(a, b));
                    }
                }
                embed(&local, dims, &m1.factor)
            }
            Self::Phase { mode, phase: phi } => {
                let d = mode_dim(dims, mode)?;
                let mut local = ComplexMatrix::identity(d);
                local.set(mode.index, mode.index, phase(*phi));
                embed(&local, dims, &mode.factor)
            }
            Self::CondPhase {
                mode,
                shifter,
                phase: phi,
            } => {
                if mode.factor == *shifter {
                    return Err(Error::InvalidArgument(
                        "conditional phase needs distinct photon and shifter factors".into(),
                    ));
                }
                let d = mode_dim(dims, mode)?;
                if dims.dim_of(shifter)? != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "shifter `{shifter}` must be two-dimensional"
                    )));
                }
                let mut p_mode = ComplexMatrix::zeros(d, d);
                p_mode.set(mode.index, mode.index, ONE);
                let a = shifter_inserted();
                let p_a = ComplexMatrix::outer(&a, &a);
                let both = &embed(&p_mode, dims, &mode.factor)? * &embed(&p_a, dims, shifter)?;
                let n = dims.total();
                Ok(&ComplexMatrix::identity(n) - &both.scale(ONE - phase(*phi)))
            }
            Self::ShifterEvolution { shifter, phase } => {
                if dims.dim_of(shifter)? != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "shifter `{shifter}` must be two-dimensional"
                    )));
                }
                embed(&shifter_evolution(*phase), dims, shifter)
            }
            Self::Unitary { factor, matrix } => {
                let defect = matrix.unitarity_defect();
                if !(defect <= tol::NORMALIZATION) {
                    return Err(Error::NonUnitary(format!(
                        "operator on `{factor}` has |U†U − I| = {defect:e}"
                    )));
                }
                embed(matrix, dims, factor)
            }
        }
    }
}

fn mode_dim(dims: &DimensionSpec, mode: &ModeRef) -> Result<usize> {
    let d = dims.dim_of(&mode.factor)?;
    if mode.index >= d {
        return Err(Error::DimensionMismatch(format!(
            "mode {} of `{}` which has {d} modes",
            mode.index, mode.factor
        )));
    }
    Ok(d)
}

/// Ordered sequence of optical elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpticalNetwork {
    pub elements: Vec<Element>,
}

impl OpticalNetwork {
    pub fn new(elements: Vec<Element>) -> Self {
        Self { elements }
    }

    /// Product of all element operators, last element leftmost.
    pub fn operator(&self, dims: &DimensionSpec) -> Result<ComplexMatrix> {
        self.elements
            .iter()
            .try_fold(ComplexMatrix::identity(dims.total()), |acc, e| {
                Ok(&e.operator(dims)? * &acc)
            })
    }
}

/// Applies every element in order.
pub fn propagate_network(net: &OpticalNetwork, s: &PureState) -> Result<PureState> {
    let mut amps = s.amplitudes().to_vec();
    for e in &net.elements {
        amps = e.operator(s.dims())?.apply(&amps)?;
    }
    PureState::new(s.dims().clone(), amps)
}

/// Source pair `(|a a'⟩ + |b b'⟩)/√2` with the shifter inserted, `|A⟩`.
pub fn reference_input() -> PureState {
    let shifter = PureState::new(
        DimensionSpec::single(SHIFTER, 2).expect("static dims"),
        shifter_inserted().to_vec(),
    )
    .expect("normalized");
    greenberger_initial().tensor(&shifter).expect("distinct labels")
}

/// Interferometer reproducing the pre-detector photon-shifter state.
///
/// The shifter evolves by `α` before the photons arrive. Photon 1 crosses a
/// splitter and then the shifter on its `b` output. Photon 2 crosses its own
/// splitter. The shifter then evolves by `β`. Output modes `0, 1` are read
/// as `h, g` for photon 1 and `c', d'` for photon 2.
pub fn reference_network(alpha: f64, beta: f64) -> OpticalNetwork {
    OpticalNetwork::new(vec![
        Element::ShifterEvolution {
            shifter: SHIFTER.into(),
            phase: alpha,
        },
        Element::beam_splitter(PHOTON1),
        Element::CondPhase {
            mode: ModeRef::new(PHOTON1, 1),
            shifter: SHIFTER.into(),
            phase: PI,
        },
        Element::beam_splitter(PHOTON2),
        Element::ShifterEvolution {
            shifter: SHIFTER.into(),
            phase: beta,
        },
    ])
}

/// Amplitudes of a single photon after one splitter, for the input mode.
pub fn split_single_photon(input_mode: usize) -> Result<[C64; 2]> {
    let mut v = [ZERO; 2];
    *v.get_mut(input_mode)
        .ok_or_else(|| Error::InvalidArgument(format!("mode {input_mode} of a two-mode photon")))? = ONE;
    let out = beam_splitter().matrix.apply(&v)?;
    Ok([out[0], out[1]])
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::linalg::deviation_up_to_phase;
    use crate::state::{greenberger_predetector, shifter_removed};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn beam_splitter_convention() {
        let bs = beam_splitter().matrix;
        assert!(bs.unitarity_defect() < 1e-15);
        let out = split_single_photon(0).unwrap();
        assert!((out[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((out[1] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        for z in bs.entries() {
            assert!((z.norm_sqr() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn two_splitters_give_i_times_swap() {
        let bs = beam_splitter().matrix;
        let twice = &bs * &bs;
        let expected = ComplexMatrix::from_rows([[ZERO, c(0.0, 1.0)], [c(0.0, 1.0), ZERO]]);
        assert!(twice.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn shifter_phase_accrual() {
        let h = ShifterHamiltonian { energy_split: 0.0, time: 5.0 };
        assert_eq!(shifter_phases(&h), 0.0);
        let h = ShifterHamiltonian { energy_split: PI, time: 1.0 };
        assert_eq!(shifter_phases(&h), PI);
        let beta = 0.37;
        let h = ShifterHamiltonian { energy_split: beta, time: 1.0 };
        let r = FRAC_1_SQRT_2;
        let out = h.evolution().apply(&[c(r, 0.0), c(r, 0.0)]).unwrap();
        assert!((out[0] - phase(beta) * r).norm() < 1e-15);
        assert!((out[1] - phase(-beta) * r).norm() < 1e-15);
        assert!(PhasePlate { phase: 1.0 }.matrix().unitarity_defect() < 1e-15);
    }

    #[test]
    fn empty_network_is_identity() {
        let s = reference_input();
        let out = propagate_network(&OpticalNetwork::default(), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn single_photon_through_splitter() {
        let dims = DimensionSpec::single(PHOTON1, 2).unwrap();
        let s = PureState::basis_state(dims, 0).unwrap();
        let net = OpticalNetwork::new(vec![Element::beam_splitter(PHOTON1)]);
        let out = propagate_network(&net, &s).unwrap();
        assert!((out.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn conditional_phase_acts_only_with_shifter_inserted() {
        let dims = DimensionSpec::from_pairs(&[(PHOTON1, 2), (SHIFTER, 2)]).unwrap();
        let cond = Element::CondPhase {
            mode: ModeRef::new(PHOTON1, 1),
            shifter: SHIFTER.into(),
            phase: PI,
        };
        let op = cond.operator(&dims).unwrap();
        assert!(op.unitarity_defect() < 1e-12);
        let a = shifter_inserted();
        let b = shifter_removed();
        for (shifter, sign) in [(a, -1.0), (b, 1.0)] {
            // photon in mode 1
            let input = crate::linalg::kron_vec(&[ZERO, ONE], &shifter);
            let out = op.apply(&input).unwrap();
            for (o, i) in out.iter().zip(&input) {
                assert!((o - i * sign).norm() < 1e-12);
            }
            // photon in mode 0 is untouched
            let input = crate::linalg::kron_vec(&[ONE, ZERO], &shifter);
            let out = op.apply(&input).unwrap();
            for (o, i) in out.iter().zip(&input) {
                assert!((o - i).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reference_network_reproduces_predetector_state() {
        for i in 0..8 {
            for j in 0..8 {
                let alpha = -PI + i as f64 * PI / 4.0 + 0.1;
                let beta = j as f64 * PI / 4.0 - 0.3;
                let out = propagate_network(&reference_network(alpha, beta), &reference_input()).unwrap();
                let target = greenberger_predetector(alpha, beta);
                let dev = deviation_up_to_phase(out.amplitudes(), target.amplitudes());
                assert!(dev < 1e-10, "α={alpha} β={beta}: {dev}");
            }
        }
    }

    #[test]
    fn propagation_is_linear_and_norm_preserving() {
        let net = reference_network(0.3, 0.8);
        let dims = reference_input().dims().clone();
        let x = PureState::basis_state(dims.clone(), 1).unwrap();
        let y = PureState::basis_state(dims.clone(), 6).unwrap();
        let (p, q) = (c(0.6, 0.0), c(0.0, 0.8));
        let sup: Vec<C64> = x.amplitudes().iter().zip(y.amplitudes()).map(|(a, b)| a * p + b * q).collect();
        let sup = PureState::new(dims, sup).unwrap();
        let ox = propagate_network(&net, &x).unwrap();
        let oy = propagate_network(&net, &y).unwrap();
        let osup = propagate_network(&net, &sup).unwrap();
        for k in 0..8 {
            let lin = ox.amplitudes()[k] * p + oy.amplitudes()[k] * q;
            assert!((osup.amplitudes()[k] - lin).norm() < 1e-10);
        }
    }

    #[test]
    fn invalid_elements_are_rejected() {
        let s = reference_input();
        let bad = OpticalNetwork::new(vec![Element::Unitary {
            factor: PHOTON1.into(),
            matrix: ComplexMatrix::diag_real(&[1.0, 0.5]),
        }]);
        assert!(matches!(propagate_network(&bad, &s), Err(Error::NonUnitary(_))));
        let bad = OpticalNetwork::new(vec![Element::Phase {
            mode: ModeRef::new(PHOTON1, 2),
            phase: 1.0,
        }]);
        assert!(matches!(propagate_network(&bad, &s), Err(Error::DimensionMismatch(_))));
        let bad = OpticalNetwork::new(vec![Element::beam_splitter("photon9")]);
        assert!(matches!(propagate_network(&bad, &s), Err(Error::UnknownLabel(_))));
        let bad = OpticalNetwork::new(vec![Element::BeamSplitter {
            modes: (ModeRef::new(PHOTON1, 0), ModeRef::new(PHOTON2, 0)),
        }]);
        assert!(propagate_network(&bad, &s).is_err());
    }
}
