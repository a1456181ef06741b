//! JSON exchange formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are
//! `{"rows": n, "cols": m, "entries": [[re, im], ...]}` in row-major order.
//! Every top-level document carries a `"kind"` tag; unknown keys (such as
//! an embedded run manifest) are ignored on input.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::dualtrack::{Circuit, CircuitStep, FinalMeasurement, InitialState, TrackReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::quantum::{DensityMatrix, HilbertDim, Povm, Unitary};
use crate::search::{SearchResult, SearchStatus};
use crate::sic::{orbit, Fiducial, SicStructure};
use crate::urgleichung::{mic_duals, CondProbMatrix, MicStructure, ProbVector};

pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ComplexPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub unitary: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FinalMeasurementDoc {
    Sic(SicTag),
    Povm(Box<Document>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SicTag {
    Sic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusDoc {
    Found,
    NotFound,
}

/// Any file the toolkit reads or writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Density {
        dim: usize,
        matrix: MatrixDoc,
    },
    Unitary {
        dim: usize,
        matrix: MatrixDoc,
    },
    Povm {
        dim: usize,
        effects: Vec<MatrixDoc>,
    },
    Fiducial {
        dim: usize,
        vector: Vec<ComplexPair>,
    },
    Sic {
        dim: usize,
        fiducial: Option<Vec<ComplexPair>>,
        projectors: Vec<MatrixDoc>,
        residual: f64,
    },
    Probs {
        dim: usize,
        entries: Vec<f64>,
    },
    CondProbMatrix {
        dim: usize,
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
    },
    Mic {
        dim: usize,
        effects: Vec<MatrixDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duals: Option<Vec<MatrixDoc>>,
    },
    Circuit {
        dim: usize,
        initial: Box<Document>,
        steps: Vec<StepDoc>,
        final_measurement: FinalMeasurementDoc,
    },
    SearchResult {
        dim: usize,
        status: StatusDoc,
        fiducial: Option<Vec<ComplexPair>>,
        residual: f64,
        frame_potential_gap: f64,
        restarts_used: usize,
        iterations_used: usize,
        seed: u64,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Density { .. } => "density",
            Document::Unitary { .. } => "unitary",
            Document::Povm { .. } => "povm",
            Document::Fiducial { .. } => "fiducial",
            Document::Sic { .. } => "sic",
            Document::Probs { .. } => "probs",
            Document::CondProbMatrix { .. } => "cond_prob_matrix",
            Document::Mic { .. } => "mic",
            Document::Circuit { .. } => "circuit",
            Document::SearchResult { .. } => "search_result",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Document::Density { dim, .. }
            | Document::Unitary { dim, .. }
            | Document::Povm { dim, .. }
            | Document::Fiducial { dim, .. }
            | Document::Sic { dim, .. }
            | Document::Probs { dim, .. }
            | Document::CondProbMatrix { dim, .. }
            | Document::Mic { dim, .. }
            | Document::Circuit { dim, .. }
            | Document::SearchResult { dim, .. } => *dim,
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

fn unpair(p: &ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vector_doc(v: &[C64]) -> Vec<ComplexPair> {
    v.iter().copied().map(pair).collect()
}

pub fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    MatrixDoc {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.row_major_entries().into_iter().map(pair).collect(),
    }
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<ComplexMatrix> {
    let entries: Vec<C64> = doc.entries.iter().map(unpair).collect();
    if entries
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Schema("matrix entries must be finite".into()));
    }
    ComplexMatrix::from_row_major(doc.rows, doc.cols, &entries)
        .map_err(|e| Error::Schema(e.to_string()))
}

fn declared_dim(dim: usize) -> Result<HilbertDim> {
    HilbertDim::new(dim).map_err(|e| Error::Schema(e.to_string()))
}

fn square_of(dim: HilbertDim, doc: &MatrixDoc) -> Result<ComplexMatrix> {
    let m = matrix_from_doc(doc)?;
    dim.ensure_square_matrix(&m)?;
    Ok(m)
}

fn wrong_kind(expected: &str, doc: &Document) -> Error {
    Error::Schema(format!(
        "expected a {expected} document, found {}",
        doc.kind()
    ))
}

pub fn density_doc(rho: &DensityMatrix) -> Document {
    Document::Density {
        dim: rho.dim().get(),
        matrix: matrix_doc(rho.matrix()),
    }
}

pub fn density_from_doc(doc: &Document, tol: f64) -> Result<DensityMatrix> {
    match doc {
        Document::Density { dim, matrix } => {
            let dim = declared_dim(*dim)?;
            DensityMatrix::validate(square_of(dim, matrix)?, tol)
        }
        other => Err(wrong_kind("density", other)),
    }
}

pub fn unitary_doc(u: &Unitary) -> Document {
    Document::Unitary {
        dim: u.dim().get(),
        matrix: matrix_doc(u.matrix()),
    }
}

pub fn unitary_from_doc(doc: &Document, tol: f64) -> Result<Unitary> {
    match doc {
        Document::Unitary { dim, matrix } => {
            let dim = declared_dim(*dim)?;
            Unitary::new(square_of(dim, matrix)?, tol)
        }
        other => Err(wrong_kind("unitary", other)),
    }
}

pub fn povm_doc(povm: &Povm) -> Document {
    Document::Povm {
        dim: povm.dim().get(),
        effects: povm.effects().iter().map(matrix_doc).collect(),
    }
}

pub fn povm_from_doc(doc: &Document, tol: f64) -> Result<Povm> {
    match doc {
        Document::Povm { dim, effects } => {
            let dim = declared_dim(*dim)?;
            let effects = effects
                .iter()
                .map(|e| square_of(dim, e))
                .collect::<Result<Vec<_>>>()?;
            Povm::new(effects, tol)
        }
        other => Err(wrong_kind("povm", other)),
    }
}

pub fn fiducial_doc(f: &Fiducial) -> Document {
    Document::Fiducial {
        dim: f.dim().get(),
        vector: vector_doc(f.vector()),
    }
}

fn fiducial_from_pairs(dim: HilbertDim, pairs: &[ComplexPair]) -> Result<Fiducial> {
    if pairs.len() != dim.get() {
        return Err(Error::DimensionMismatch {
            expected: dim.get(),
            found: pairs.len(),
        });
    }
    Fiducial::new(pairs.iter().map(unpair).collect())
}

pub fn fiducial_from_doc(doc: &Document) -> Result<Fiducial> {
    match doc {
        Document::Fiducial { dim, vector } => fiducial_from_pairs(declared_dim(*dim)?, vector),
        Document::SearchResult {
            dim,
            fiducial: Some(vector),
            ..
        } => fiducial_from_pairs(declared_dim(*dim)?, vector),
        other => Err(wrong_kind("fiducial", other)),
    }
}

pub fn sic_doc(sic: &SicStructure) -> Document {
    Document::Sic {
        dim: sic.dim().get(),
        fiducial: sic.fiducial().map(|f| vector_doc(f.vector())),
        projectors: sic.projectors().iter().map(matrix_doc).collect(),
        residual: sic.residual(),
    }
}

/// Rebuilds a SIC structure and re-verifies it; the stored residual is not trusted.
///
/// Fiducial and search-result documents are expanded into their orbit.
/// Certification is left to the caller.
pub fn sic_from_doc(doc: &Document) -> Result<SicStructure> {
    match doc {
        Document::Sic {
            dim, projectors, ..
        } => {
            let dim = declared_dim(*dim)?;
            let projectors = projectors
                .iter()
                .map(|p| square_of(dim, p))
                .collect::<Result<Vec<_>>>()?;
            SicStructure::from_projectors(projectors, dim)
        }
        Document::Fiducial { .. } | Document::SearchResult { .. } => {
            Ok(orbit(&fiducial_from_doc(doc)?))
        }
        other => Err(wrong_kind("sic", other)),
    }
}

pub fn probs_doc(p: &ProbVector) -> Document {
    Document::Probs {
        dim: p.dim().get(),
        entries: p.entries().to_vec(),
    }
}

pub fn probs_from_doc(doc: &Document) -> Result<ProbVector> {
    match doc {
        Document::Probs { dim, entries } => ProbVector::new(declared_dim(*dim)?, entries.clone()),
        other => Err(wrong_kind("probs", other)),
    }
}

pub fn cond_prob_doc(r: &CondProbMatrix) -> Document {
    Document::CondProbMatrix {
        dim: r.dim().get(),
        rows: r.rows(),
        cols: r.cols(),
        entries: r.entries().to_vec(),
    }
}

pub fn mic_doc(mic: &MicStructure) -> Document {
    Document::Mic {
        dim: mic.dim().get(),
        effects: mic.effects().iter().map(matrix_doc).collect(),
        duals: Some(mic.duals().iter().map(matrix_doc).collect()),
    }
}

/// Duals are always recomputed from the effects.
pub fn mic_from_doc(doc: &Document) -> Result<MicStructure> {
    match doc {
        Document::Mic { dim, effects, .. } => {
            let dim = declared_dim(*dim)?;
            let effects = effects
                .iter()
                .map(|e| square_of(dim, e))
                .collect::<Result<Vec<_>>>()?;
            mic_duals(&effects, dim)
        }
        other => Err(wrong_kind("mic", other)),
    }
}

pub fn circuit_doc(circuit: &Circuit) -> Document {
    let initial = match circuit.initial() {
        InitialState::Density(rho) => density_doc(rho),
        InitialState::Probs(p) => probs_doc(p),
    };
    let final_measurement = match circuit.final_measurement() {
        FinalMeasurement::Sic => FinalMeasurementDoc::Sic(SicTag::Sic),
        FinalMeasurement::Povm(povm) => FinalMeasurementDoc::Povm(Box::new(povm_doc(povm))),
    };
    Document::Circuit {
        dim: circuit.dim().get(),
        initial: Box::new(initial),
        steps: circuit
            .steps()
            .iter()
            .map(|s| StepDoc {
                unitary: matrix_doc(s.unitary.matrix()),
                label: s.label.clone(),
            })
            .collect(),
        final_measurement,
    }
}

pub fn circuit_from_doc(doc: &Document, tol: f64) -> Result<Circuit> {
    let Document::Circuit {
        dim,
        initial,
        steps,
        final_measurement,
    } = doc
    else {
        return Err(wrong_kind("circuit", doc));
    };
    let dim = declared_dim(*dim)?;
    let initial = match initial.as_ref() {
        d @ Document::Density { .. } => InitialState::Density(density_from_doc(d, tol)?),
        d @ Document::Probs { .. } => InitialState::Probs(probs_from_doc(d)?),
        other => {
            return Err(Error::Schema(format!(
                "circuit initial must be density or probs, found {}",
                other.kind()
            )))
        }
    };
    dim.ensure_same(initial.dim())?;
    let steps = steps
        .iter()
        .map(|s| {
            Ok(CircuitStep {
                unitary: Unitary::new(square_of(dim, &s.unitary)?, tol)?,
                label: s.label.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let final_measurement = match final_measurement {
        FinalMeasurementDoc::Sic(_) => FinalMeasurement::Sic,
        FinalMeasurementDoc::Povm(d) => FinalMeasurement::Povm(povm_from_doc(d, tol)?),
    };
    Circuit::new(initial, steps, final_measurement)
}

pub fn search_result_doc(result: &SearchResult) -> Document {
    Document::SearchResult {
        dim: result.dim.get(),
        status: match result.status {
            SearchStatus::Found => StatusDoc::Found,
            SearchStatus::NotFound => StatusDoc::NotFound,
        },
        fiducial: result.fiducial.as_ref().map(|f| vector_doc(f.vector())),
        residual: result.residual,
        frame_potential_gap: result.frame_potential_gap,
        restarts_used: result.restarts_used,
        iterations_used: result.iterations_used,
        seed: result.seed,
    }
}

/// A float rendered in scientific notation with 17 significant digits.
pub fn scientific(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
pub struct TrackReportDoc {
    kind: &'static str,
    dim: usize,
    amplitude_outcome: Vec<f64>,
    probability_outcome: Vec<f64>,
    max_abs_deviation: Box<RawValue>,
    per_step_deviations: Vec<Box<RawValue>>,
    probability_purities: Vec<f64>,
}

pub fn track_report_doc(dim: HilbertDim, report: &TrackReport) -> TrackReportDoc {
    TrackReportDoc {
        kind: "track_report",
        dim: dim.get(),
        amplitude_outcome: report.amplitude_outcome.entries().to_vec(),
        probability_outcome: report.probability_outcome.entries().to_vec(),
        max_abs_deviation: scientific(report.max_abs_deviation),
        per_step_deviations: report
            .per_step_deviations
            .iter()
            .copied()
            .map(scientific)
            .collect(),
        probability_purities: report.probability_purities.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random_density, random_povm, random_unitary, VALIDITY_TOL};
    use crate::sic::builtin_sic;
    use proptest::prelude::*;

    fn dim(d: usize) -> HilbertDim {
        HilbertDim::new(d).unwrap()
    }

    #[test]
    fn matrix_schema_shape() {
        let m = ComplexMatrix::from_row_major(1, 2, &[C64::new(1.0, -2.0), C64::new(0.5, 0.0)])
            .unwrap();
        let json = serde_json::to_string(&matrix_doc(&m)).unwrap();
        assert_eq!(
            json,
            r#"{"rows":1,"cols":2,"entries":[[1.0,-2.0],[0.5,0.0]]}"#
        );
    }

    #[test]
    fn density_document_round_trip() {
        let rho = random_density(dim(3), 2);
        let text = to_json_pretty(&density_doc(&rho));
        assert!(text.contains(r#""kind": "density""#));
        let back = density_from_doc(&parse_document(&text).unwrap(), VALIDITY_TOL).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn unknown_keys_are_ignored() {
        let text = r#"{"kind":"probs","dim":2,"entries":[0.25,0.25,0.25,0.25],"manifest":{"x":1}}"#;
        let p = probs_from_doc(&parse_document(text).unwrap()).unwrap();
        assert_eq!(p.entries(), &[0.25; 4]);
    }

    #[test]
    fn truncated_and_mistyped_inputs_fail() {
        assert!(matches!(
            parse_document(r#"{"kind":"sic","dim":2,"#),
            Err(Error::Schema(_))
        ));
        let probs =
            parse_document(r#"{"kind":"probs","dim":2,"entries":[0.25,0.25,0.25,0.25]}"#).unwrap();
        assert!(matches!(
            density_from_doc(&probs, VALIDITY_TOL),
            Err(Error::Schema(_))
        ));
        let bad_shape =
            r#"{"kind":"density","dim":2,"matrix":{"rows":2,"cols":2,"entries":[[1,0]]}}"#;
        assert!(density_from_doc(&parse_document(bad_shape).unwrap(), VALIDITY_TOL).is_err());
    }

    #[test]
    fn sic_document_is_reverified() {
        let sic = builtin_sic(dim(2)).unwrap();
        let mut doc = sic_doc(&sic);
        if let Document::Sic { residual, .. } = &mut doc {
            *residual = 0.5;
        }
        let back = sic_from_doc(&parse_document(&to_json_pretty(&doc)).unwrap()).unwrap();
        assert!(back.residual() <= 1e-12);
        assert!(back.fiducial().is_none());
    }

    #[test]
    fn circuit_document_round_trip() {
        let steps = vec![CircuitStep {
            unitary: random_unitary(dim(2), 1),
            label: Some("t1".into()),
        }];
        let circuit = Circuit::new(
            InitialState::Density(random_density(dim(2), 1)),
            steps,
            FinalMeasurement::Povm(random_povm(dim(2), 3, 1)),
        )
        .unwrap();
        let text = to_json_pretty(&circuit_doc(&circuit));
        let back = circuit_from_doc(&parse_document(&text).unwrap(), VALIDITY_TOL).unwrap();
        assert_eq!(back, circuit);

        let sic_final = Circuit::new(
            InitialState::Probs(ProbVector::uniform(dim(2))),
            vec![],
            FinalMeasurement::Sic,
        )
        .unwrap();
        let text = to_json_pretty(&circuit_doc(&sic_final));
        assert!(text.contains(r#""final_measurement": "sic""#));
        assert_eq!(
            circuit_from_doc(&parse_document(&text).unwrap(), VALIDITY_TOL).unwrap(),
            sic_final
        );
    }

    #[test]
    fn deviations_use_seventeen_digits() {
        assert_eq!(scientific(1.0 / 3.0).get(), "3.3333333333333331e-1");
        assert_eq!(scientific(0.0).get(), "0.0000000000000000e0");
    }

    proptest! {
        #[test]
        fn matrix_doc_round_trips(entries in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..30), cols in 1usize..6) {
            let rows = entries.len() / cols;
            prop_assume!(rows > 0);
            let values: Vec<C64> = entries[..rows * cols].iter().map(|(re, im)| C64::new(*re, *im)).collect();
            let m = ComplexMatrix::from_row_major(rows, cols, &values).unwrap();
            let text = serde_json::to_string(&matrix_doc(&m)).unwrap();
            let doc: MatrixDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(matrix_from_doc(&doc).unwrap(), m);
        }
    }
}
