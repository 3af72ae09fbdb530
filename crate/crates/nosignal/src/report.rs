//! Report documents and their JSON and table renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nosignal_core::{ChannelReport, ComplexMatrix, ScenarioReport};
use serde::Serialize;

use crate::format::{KindJson, MatrixJson};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioDoc {
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub probabilities: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub marginals: BTreeMap<String, MatrixJson>,
    pub verdicts: BTreeMap<String, bool>,
    pub pass: bool,
}

impl From<&ScenarioReport> for ScenarioDoc {
    fn from(r: &ScenarioReport) -> Self {
        Self {
            scenario: r.name.clone(),
            params: r.params.clone(),
            probabilities: r.probabilities.clone(),
            metrics: r.metrics.clone(),
            marginals: r
                .marginals
                .iter()
                .map(|(k, rho)| (k.clone(), MatrixJson::from(rho.matrix())))
                .collect(),
            verdicts: r.verdicts.clone(),
            pass: r.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzParams {
    pub seed: u64,
    pub trials: usize,
    pub dims: String,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzDoc {
    pub scenario: &'static str,
    pub params: FuzzParams,
    pub worst_distance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyParams {
    pub input: String,
    pub kind: KindJson,
    pub input_dim: usize,
    pub output_dim: usize,
    pub operators: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyDoc {
    pub scenario: &'static str,
    pub params: ClassifyParams,
    pub trace_preserving: bool,
    pub sub_normalized: bool,
    pub completely_positive: bool,
    pub min_choi_eigenvalue: f64,
    pub completeness_residual: f64,
    pub max_effect_eigenvalue: f64,
    pub effect_spectrum: Vec<f64>,
    /// Whether the channel meets the condition of its declared kind.
    pub pass: bool,
}

impl ClassifyDoc {
    pub fn new(params: ClassifyParams, r: &ChannelReport) -> Self {
        Self {
            scenario: "classify",
            pass: r.is_valid_for(params.kind.into()),
            params,
            trace_preserving: r.trace_preserving,
            sub_normalized: r.sub_normalized,
            completely_positive: r.completely_positive,
            min_choi_eigenvalue: r.min_choi_eigenvalue,
            completeness_residual: r.completeness_residual,
            max_effect_eigenvalue: r.max_effect_eigenvalue,
            effect_spectrum: r.effect_spectrum.clone(),
        }
    }
}

/// Pretty JSON with a trailing newline. Maps are ordered, so equal documents
/// give equal bytes.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report documents always serialize");
    s.push('\n');
    s
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Rounds to the printed precision so that tiny negatives print as zero.
fn tidy(x: f64) -> f64 {
    (x * 1e4).round() / 1e4 + 0.0
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<String> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    format!("{:+.4}{:+.4}i", tidy(z.re), tidy(z.im))
                })
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect()
}

/// Two aligned columns: section, then `key=value`.
fn render(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (section, entry) in rows {
        let _ = writeln!(out, "{section:<width$}  {entry}");
    }
    out
}

pub fn scenario_table(doc: &ScenarioDoc) -> String {
    let mut rows = vec![("scenario".to_string(), doc.scenario.clone())];
    rows.extend(doc.params.iter().map(|(k, v)| ("param".into(), format!("{k}={v}"))));
    rows.extend(
        doc.probabilities
            .iter()
            .map(|(k, v)| ("probability".into(), format!("{k}={v:.4}"))),
    );
    rows.extend(doc.metrics.iter().map(|(k, v)| ("metric".into(), format!("{k}={}", sci(*v)))));
    for (k, m) in &doc.marginals {
        let m = ComplexMatrix::try_from(m).expect("rendered from a valid matrix");
        for (i, line) in matrix_rows(&m).into_iter().enumerate() {
            let label = if i == 0 { format!("{k}=") } else { " ".repeat(k.len() + 1) };
            rows.push(("marginal".into(), format!("{label}{line}")));
        }
    }
    rows.extend(
        doc.verdicts
            .iter()
            .map(|(k, v)| ("verdict".into(), format!("{k}={}", verdict(*v)))),
    );
    rows.push(("result".into(), verdict(doc.pass).into()));
    render(&rows)
}

pub fn fuzz_table(doc: &FuzzDoc) -> String {
    let p = &doc.params;
    render(&[
        ("scenario".into(), doc.scenario.into()),
        ("param".into(), format!("seed={}", p.seed)),
        ("param".into(), format!("trials={}", p.trials)),
        ("param".into(), format!("dims={}", p.dims)),
        ("param".into(), format!("tolerance={}", sci(p.tolerance))),
        ("metric".into(), format!("worst_distance={}", sci(doc.worst_distance))),
        ("result".into(), verdict(doc.pass).into()),
    ])
}

pub fn classify_table(doc: &ClassifyDoc) -> String {
    let p = &doc.params;
    let spectrum = doc
        .effect_spectrum
        .iter()
        .map(|x| format!("{x:.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    render(&[
        ("scenario".into(), doc.scenario.into()),
        ("param".into(), format!("input={}", p.input)),
        ("param".into(), format!("kind={}", serde_json::to_value(p.kind).unwrap().as_str().unwrap())),
        ("param".into(), format!("dims={}->{}", p.input_dim, p.output_dim)),
        ("param".into(), format!("operators={}", p.operators)),
        ("property".into(), format!("trace_preserving={}", doc.trace_preserving)),
        ("property".into(), format!("sub_normalized={}", doc.sub_normalized)),
        ("property".into(), format!("completely_positive={}", doc.completely_positive)),
        ("metric".into(), format!("min_choi_eigenvalue={}", sci(doc.min_choi_eigenvalue))),
        ("metric".into(), format!("completeness_residual={}", sci(doc.completeness_residual))),
        ("metric".into(), format!("effect_spectrum=[{spectrum}]")),
        ("result".into(), verdict(doc.pass).into()),
    ])
}
