//! Unitary evolution carried out twice: on density matrices, and on SIC
//! probability vectors alone.
//!
//! In probability space a unitary step is the affine map
//! Q_j = (d+1) Σ_i p_i r(j,i) − 1/d, where r(j,i) = tr(E_j Π_i) and the
//! E_j are the SIC effects rotated by the inverse of the step unitary.
//! Measuring the rotated SIC E_j = U†Π_jU/d on ρ is the same as measuring
//! the SIC itself on UρU†, so Q is the SIC representation of the evolved
//! state.

use crate::error::{Error, Result};
use crate::quantum::{born_direct, DensityMatrix, HilbertDim, OutcomeDistribution, Povm, Unitary};
use crate::sic::SicStructure;
use crate::urgleichung::{
    born_urgleichung, cond_prob_matrix, probs_to_state, state_to_probs, ProbVector,
};

/// E_j = U Π_j U† / d.
pub fn rotate_sic(u: &Unitary, sic: &SicStructure) -> Result<Povm> {
    u.dim().ensure_same(sic.dim())?;
    sic.ensure_certified()?;
    let effects = sic
        .effects()
        .iter()
        .map(|o| o.conjugate_by(u.matrix()).hermitian_part())
        .collect();
    Ok(Povm::from_trusted(u.dim(), effects))
}

/// Conditional probabilities for one step. Rows are outcomes of the SIC
/// rotated by U†, and the resulting affine map sends the image of ρ to
/// the image of UρU†.
fn step_conditionals(
    u: &Unitary,
    sic: &SicStructure,
) -> Result<crate::urgleichung::CondProbMatrix> {
    cond_prob_matrix(&rotate_sic(&u.adjoint(), sic)?, sic)
}

/// Q_j = (d+1) Σ_i p_i r(j,i) − 1/d.
pub fn evolve_probs(p: &ProbVector, u: &Unitary, sic: &SicStructure) -> Result<ProbVector> {
    p.dim().ensure_same(u.dim())?;
    let r = step_conditionals(u, sic)?;
    let d = p.dim().as_f64();
    let entries = (0..r.rows())
        .map(|j| {
            (d + 1.0)
                * r.row(j)
                    .iter()
                    .zip(p.entries())
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                - 1.0 / d
        })
        .collect();
    Ok(ProbVector::from_computed(p.dim(), entries))
}

/// ρ′ = U ρ U†.
pub fn evolve_state(rho: &DensityMatrix, u: &Unitary) -> Result<DensityMatrix> {
    rho.dim().ensure_same(u.dim())?;
    let evolved = rho.matrix().conjugate_by(u.matrix()).hermitian_part();
    Ok(DensityMatrix::from_trusted(rho.dim(), evolved))
}

/// The affine map p ↦ M p + offset·1 of one unitary step.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMap {
    dim: HilbertDim,
    /// Row-major d² × d².
    matrix: Vec<f64>,
    offset: f64,
}

impl TransferMap {
    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.matrix[j * self.dim.squared() + i]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn apply(&self, p: &ProbVector) -> Result<ProbVector> {
        self.dim.ensure_same(p.dim())?;
        let n = self.dim.squared();
        let entries = (0..n)
            .map(|j| {
                let row = &self.matrix[j * n..(j + 1) * n];
                row.iter().zip(p.entries()).map(|(m, x)| m * x).sum::<f64>() + self.offset
            })
            .collect();
        Ok(ProbVector::from_computed(self.dim, entries))
    }

    /// `self` applied after `first`.
    ///
    /// Every row of a transfer matrix sums to d + 1, so the composed offset
    /// stays uniform: M₂(M₁p + c₁1) + c₂1 = M₂M₁p + ((d+1)c₁ + c₂)1.
    pub fn after(&self, first: &TransferMap) -> Result<TransferMap> {
        self.dim.ensure_same(first.dim)?;
        let n = self.dim.squared();
        let mut matrix = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let a = self.matrix[j * n + k];
                for i in 0..n {
                    matrix[j * n + i] += a * first.matrix[k * n + i];
                }
            }
        }
        let d = self.dim.as_f64();
        Ok(TransferMap {
            dim: self.dim,
            matrix,
            offset: (d + 1.0) * first.offset + self.offset,
        })
    }

    /// Largest difference between the images of the simplex vertices under
    /// the two maps. Vertices span the hyperplane Σp = 1, so this compares
    /// the maps on every probability vector.
    pub fn deviation_on_simplex(&self, other: &TransferMap) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a + self.offset - b - other.offset).abs())
            .fold(0.0, f64::max)
    }
}

/// M_ji = (d+1) r(j,i), offset −1/d.
pub fn transfer_matrix(u: &Unitary, sic: &SicStructure) -> Result<TransferMap> {
    let r = step_conditionals(u, sic)?;
    let d = u.dim().as_f64();
    Ok(TransferMap {
        dim: u.dim(),
        matrix: r.entries().iter().map(|x| (d + 1.0) * x).collect(),
        offset: -1.0 / d,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitStep {
    pub unitary: Unitary,
    /// Free-form tag, e.g. the time t of U(t).
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Density(DensityMatrix),
    Probs(ProbVector),
}

impl InitialState {
    pub fn dim(&self) -> HilbertDim {
        match self {
            InitialState::Density(rho) => rho.dim(),
            InitialState::Probs(p) => p.dim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FinalMeasurement {
    Povm(Povm),
    /// Read out the SIC probability vector itself.
    Sic,
}

/// A flat sequence of unitaries followed by one measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    dim: HilbertDim,
    initial: InitialState,
    steps: Vec<CircuitStep>,
    final_measurement: FinalMeasurement,
}

impl Circuit {
    pub fn new(
        initial: InitialState,
        steps: Vec<CircuitStep>,
        final_measurement: FinalMeasurement,
    ) -> Result<Self> {
        let dim = initial.dim();
        for (k, step) in steps.iter().enumerate() {
            if step.unitary.dim() != dim {
                return Err(Error::InvalidCircuit(format!(
                    "step {k} acts on dimension {} but the initial state has dimension {dim}",
                    step.unitary.dim()
                )));
            }
        }
        if let FinalMeasurement::Povm(povm) = &final_measurement {
            if povm.dim() != dim {
                return Err(Error::InvalidCircuit(format!(
                    "final measurement acts on dimension {} but the initial state has dimension {dim}",
                    povm.dim()
                )));
            }
        }
        Ok(Self {
            dim,
            initial,
            steps,
            final_measurement,
        })
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn steps(&self) -> &[CircuitStep] {
        &self.steps
    }

    pub fn final_measurement(&self) -> &FinalMeasurement {
        &self.final_measurement
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackReport {
    pub amplitude_outcome: OutcomeDistribution,
    pub probability_outcome: OutcomeDistribution,
    pub max_abs_deviation: f64,
    /// Gap between the probability track and the SIC image of the amplitude
    /// track after each step.
    pub per_step_deviations: Vec<f64>,
    /// d(d+1)Σp² − 1 on the probability track: the initial value, then one per step.
    pub probability_purities: Vec<f64>,
}

fn initial_density(circuit: &Circuit, sic: &SicStructure) -> Result<DensityMatrix> {
    match &circuit.initial {
        InitialState::Density(rho) => Ok(rho.clone()),
        InitialState::Probs(p) => probs_to_state(p, sic),
    }
}

fn initial_probs(circuit: &Circuit, sic: &SicStructure) -> Result<ProbVector> {
    match &circuit.initial {
        InitialState::Density(rho) => state_to_probs(rho, sic),
        InitialState::Probs(p) => {
            // must lie in the state space even though this track never forms ρ
            probs_to_state(p, sic)?;
            Ok(p.clone())
        }
    }
}

/// Conventional track: ρ ← UρU† per step, then the Born rule.
pub fn run_amplitude(circuit: &Circuit, sic: &SicStructure) -> Result<OutcomeDistribution> {
    circuit.dim.ensure_same(sic.dim())?;
    let mut rho = initial_density(circuit, sic)?;
    for step in &circuit.steps {
        rho = evolve_state(&rho, &step.unitary)?;
    }
    match &circuit.final_measurement {
        FinalMeasurement::Povm(povm) => born_direct(&rho, povm),
        FinalMeasurement::Sic => Ok(state_to_probs(&rho, sic)?.to_distribution()),
    }
}

/// Probability track: the affine step map per unitary, then the Born rule
/// in probabilities. No density matrix is formed.
pub fn run_probability(circuit: &Circuit, sic: &SicStructure) -> Result<OutcomeDistribution> {
    circuit.dim.ensure_same(sic.dim())?;
    let mut p = initial_probs(circuit, sic)?;
    for step in &circuit.steps {
        p = evolve_probs(&p, &step.unitary, sic)?;
    }
    finish_probability(circuit, &p, sic)
}

fn finish_probability(
    circuit: &Circuit,
    p: &ProbVector,
    sic: &SicStructure,
) -> Result<OutcomeDistribution> {
    match &circuit.final_measurement {
        FinalMeasurement::Povm(povm) => {
            born_urgleichung(p, &cond_prob_matrix(povm, sic)?, circuit.dim)
        }
        FinalMeasurement::Sic => Ok(p.to_distribution()),
    }
}

/// Runs both tracks and compares them after every step and at the end.
pub fn run_dual(circuit: &Circuit, sic: &SicStructure) -> Result<TrackReport> {
    circuit.dim.ensure_same(sic.dim())?;
    sic.ensure_certified()?;
    let mut rho = initial_density(circuit, sic)?;
    let mut p = initial_probs(circuit, sic)?;
    let mut per_step_deviations = Vec::with_capacity(circuit.steps.len());
    let mut probability_purities = vec![p.purity()];
    for step in &circuit.steps {
        rho = evolve_state(&rho, &step.unitary)?;
        p = evolve_probs(&p, &step.unitary, sic)?;
        per_step_deviations.push(state_to_probs(&rho, sic)?.max_abs_deviation(&p));
        probability_purities.push(p.purity());
    }
    let amplitude_outcome = match &circuit.final_measurement {
        FinalMeasurement::Povm(povm) => born_direct(&rho, povm)?,
        FinalMeasurement::Sic => state_to_probs(&rho, sic)?.to_distribution(),
    };
    let probability_outcome = finish_probability(circuit, &p, sic)?;
    Ok(TrackReport {
        max_abs_deviation: amplitude_outcome.max_abs_deviation(&probability_outcome),
        amplitude_outcome,
        probability_outcome,
        per_step_deviations,
        probability_purities,
    })
}
