//! JSON file formats for matrices, states, channels and optical networks.

use nosignal_core::optics::ModeRef;
use nosignal_core::{
    ChannelKind, ComplexMatrix, DimensionSpec, Element, KrausChannel, OpticalNetwork, PureState, C64,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] nosignal_core::Error),
    #[error("{0}")]
    Schema(String),
}

type Result<T> = std::result::Result<T, FormatError>;

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError::Schema(msg.into()))
}

/// `{"rows": n, "cols": m, "entries": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: pairs(m.entries()),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = FormatError;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        Ok(ComplexMatrix::new(m.rows, m.cols, complexes(&m.entries))?)
    }
}

/// `{"dims": [["label", d], ...], "amplitudes": [[re, im], ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<(String, usize)>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        Self {
            dims: s.dims().parts().to_vec(),
            amplitudes: pairs(s.amplitudes()),
        }
    }
}

impl TryFrom<&StateJson> for PureState {
    type Error = FormatError;

    fn try_from(s: &StateJson) -> Result<Self> {
        let dims = DimensionSpec::new(s.dims.clone())?;
        Ok(PureState::new(dims, complexes(&s.amplitudes))?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Deterministic,
    Probabilistic,
}

impl From<ChannelKind> for KindJson {
    fn from(k: ChannelKind) -> Self {
        match k {
            ChannelKind::Deterministic => Self::Deterministic,
            ChannelKind::Probabilistic => Self::Probabilistic,
        }
    }
}

impl From<KindJson> for ChannelKind {
    fn from(k: KindJson) -> Self {
        match k {
            KindJson::Deterministic => Self::Deterministic,
            KindJson::Probabilistic => Self::Probabilistic,
        }
    }
}

/// `{"kind": ..., "input_dim": n, "output_dim": m, "operators": [matrix, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub kind: KindJson,
    pub input_dim: usize,
    pub output_dim: usize,
    pub operators: Vec<MatrixJson>,
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        Self {
            kind: ch.kind().into(),
            input_dim: ch.input_dim(),
            output_dim: ch.output_dim(),
            operators: ch.operators().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl ChannelJson {
    /// Builds the channel without checking completeness, so that invalid
    /// files can still be classified.
    pub fn to_raw_channel(&self) -> Result<KrausChannel> {
        let ops = self
            .operators
            .iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        let ch = KrausChannel::from_raw(self.kind.into(), ops)?;
        if ch.input_dim() != self.input_dim || ch.output_dim() != self.output_dim {
            return schema(format!(
                "declared {}->{} but operators are {}->{}",
                self.input_dim,
                self.output_dim,
                ch.input_dim(),
                ch.output_dim()
            ));
        }
        Ok(ch)
    }

    /// Builds the channel and enforces the condition of its kind.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let raw = self.to_raw_channel()?;
        Ok(KrausChannel::new(raw.kind(), raw.operators().to_vec())?)
    }
}

/// One network element. Modes are `"factor:index"` strings for photon modes
/// and bare labels for the shifter or a whole factor:
///
/// | element      | modes                     | extra    |
/// |--------------|---------------------------|----------|
/// | `bs`         | `["photon1:0", "photon1:1"]` |       |
/// | `phase`      | `["photon1:1"]`           | `phase`  |
/// | `cond_phase` | `["photon1:1", "shifter"]`| `phase`  |
/// | `shifter`    | `["shifter"]`             | `phase`  |
/// | `unitary`    | `["photon2"]`             | `matrix` |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub element: String,
    pub modes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

pub type NetworkJson = Vec<ElementJson>;

fn parse_mode(s: &str) -> Result<ModeRef> {
    let Some((factor, index)) = s.rsplit_once(':') else {
        return schema(format!("mode `{s}` is not of the form factor:index"));
    };
    match index.parse() {
        Ok(i) if !factor.is_empty() => Ok(ModeRef::new(factor, i)),
        _ => schema(format!("mode `{s}` is not of the form factor:index")),
    }
}

fn mode_string(m: &ModeRef) -> String {
    format!("{}:{}", m.factor, m.index)
}

impl ElementJson {
    fn arity(&self, n: usize) -> Result<()> {
        if self.modes.len() != n {
            return schema(format!(
                "`{}` takes {n} mode(s), got {}",
                self.element,
                self.modes.len()
            ));
        }
        Ok(())
    }

    fn need_phase(&self) -> Result<f64> {
        match self.phase {
            Some(p) if p.is_finite() => Ok(p),
            Some(_) => schema(format!("`{}` phase is not finite", self.element)),
            None => schema(format!("`{}` needs a phase", self.element)),
        }
    }

    fn no_extras(&self, phase: bool, matrix: bool) -> Result<()> {
        if (!phase && self.phase.is_some()) || (!matrix && self.matrix.is_some()) {
            return schema(format!("unexpected field on `{}`", self.element));
        }
        Ok(())
    }

    pub fn to_element(&self) -> Result<Element> {
        match self.element.as_str() {
            "bs" => {
                self.arity(2)?;
                self.no_extras(false, false)?;
                Ok(Element::BeamSplitter {
                    modes: (parse_mode(&self.modes[0])?, parse_mode(&self.modes[1])?),
                })
            }
            "phase" => {
                self.arity(1)?;
                self.no_extras(true, false)?;
                Ok(Element::Phase {
                    mode: parse_mode(&self.modes[0])?,
                    phase: self.need_phase()?,
                })
            }
            "cond_phase" => {
                self.arity(2)?;
                self.no_extras(true, false)?;
                Ok(Element::CondPhase {
                    mode: parse_mode(&self.modes[0])?,
                    shifter: self.modes[1].clone(),
                    phase: self.need_phase()?,
                })
            }
            "shifter" => {
                self.arity(1)?;
                self.no_extras(true, false)?;
                Ok(Element::ShifterEvolution {
                    shifter: self.modes[0].clone(),
                    phase: self.need_phase()?,
                })
            }
            "unitary" => {
                self.arity(1)?;
                self.no_extras(false, true)?;
                let Some(m) = &self.matrix else {
                    return schema("`unitary` needs a matrix");
                };
                Ok(Element::Unitary {
                    factor: self.modes[0].clone(),
                    matrix: m.try_into()?,
                })
            }
            other => schema(format!("unknown element `{other}`")),
        }
    }
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        let (element, modes, phase, matrix) = match e {
            Element::BeamSplitter { modes: (a, b) } => ("bs", vec![mode_string(a), mode_string(b)], None, None),
            Element::Phase { mode, phase } => ("phase", vec![mode_string(mode)], Some(*phase), None),
            Element::CondPhase { mode, shifter, phase } => {
                ("cond_phase", vec![mode_string(mode), shifter.clone()], Some(*phase), None)
            }
            Element::ShifterEvolution { shifter, phase } => ("shifter", vec![shifter.clone()], Some(*phase), None),
            Element::Unitary { factor, matrix } => ("unitary", vec![factor.clone()], None, Some(matrix.into())),
        };
        Self {
            element: element.to_string(),
            modes,
            phase,
            matrix,
        }
    }
}

pub fn network_to_json(net: &OpticalNetwork) -> NetworkJson {
    net.elements.iter().map(ElementJson::from).collect()
}

pub fn network_from_json(net: &[ElementJson]) -> Result<OpticalNetwork> {
    Ok(OpticalNetwork::new(
        net.iter().map(ElementJson::to_element).collect::<Result<_>>()?,
    ))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    (&serde_json::from_str::<MatrixJson>(text)?).try_into()
}

pub fn parse_state(text: &str) -> Result<PureState> {
    (&serde_json::from_str::<StateJson>(text)?).try_into()
}

pub fn parse_channel_raw(text: &str) -> Result<KrausChannel> {
    serde_json::from_str::<ChannelJson>(text)?.to_raw_channel()
}

pub fn parse_network(text: &str) -> Result<OpticalNetwork> {
    network_from_json(&serde_json::from_str::<NetworkJson>(text)?)
}
