//! Quantum states and the Born rule expressed purely in probabilities.
//!
//! A state ρ is represented by the outcome probabilities of a SIC
//! measurement, p_i = tr(ρ Π_i)/d, and recovered as
//! ρ = Σ_i [(d+1) p_i − 1/d] Π_i. Any other measurement {E_j} is then
//! predicted from p and the conditional probabilities r(j,i) = tr(E_j Π_i)
//! alone:
//!
//! Q(E_j) = Σ_i [(d+1) p_i − 1/d] r(j,i).
//!
//! The same machinery generalizes to any minimal informationally complete
//! POVM through its dual frame ([`MicStructure`]).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{sum_matrices, ComplexMatrix};
use crate::quantum::{
    DensityMatrix, HilbertDim, OutcomeDistribution, Povm, COMPARISON_TOL, VALIDITY_TOL,
};
use crate::sic::{scaled_determinant, SicStructure, INDEPENDENCE_THRESHOLD};

/// Lowest entry accepted in a probability vector.
const ENTRY_FLOOR: f64 = -1e-12;

/// Probabilities for the d² outcomes of an informationally complete measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    dim: HilbertDim,
    entries: Vec<f64>,
}

impl ProbVector {
    /// Checks length d², entries in [−1e-12, 1] and unit sum within 1e-10.
    pub fn new(dim: HilbertDim, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim.squared() {
            return Err(Error::WrongCount {
                expected: dim.squared(),
                found: entries.len(),
            });
        }
        if let Some((i, p)) = entries
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < ENTRY_FLOOR || **p > 1.0)
        {
            return Err(Error::InvalidProbabilities(format!(
                "entry {i} = {p} lies outside [0, 1]"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn uniform(dim: HilbertDim) -> Self {
        let n = dim.squared();
        Self {
            dim,
            entries: vec![1.0 / n as f64; n],
        }
    }

    pub(crate) fn from_computed(dim: HilbertDim, entries: Vec<f64>) -> Self {
        Self { dim, entries }
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.entries.iter().map(|p| p * p).sum()
    }

    /// d(d+1) Σ p_i² − 1, which equals tr(ρ²) for the represented state.
    pub fn purity(&self) -> f64 {
        let d = self.dim.as_f64();
        d * (d + 1.0) * self.sum_of_squares() - 1.0
    }

    /// Convex combination `weight`·self + (1 − `weight`)·other.
    pub fn mix(&self, other: &ProbVector, weight: f64) -> Result<ProbVector> {
        self.dim.ensure_same(other.dim)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| weight * a + (1.0 - weight) * b)
            .collect();
        Ok(Self::from_computed(self.dim, entries))
    }

    pub fn max_abs_deviation(&self, other: &ProbVector) -> f64 {
        crate::quantum::max_abs_diff(&self.entries, &other.entries)
    }

    pub fn to_distribution(&self) -> OutcomeDistribution {
        OutcomeDistribution::from_raw(self.entries.clone())
    }
}

/// Conditional probabilities r(j, i) = tr(E_j Π_i): rows are measurement
/// outcomes j, columns SIC outcomes i.
#[derive(Clone, Debug, PartialEq)]
pub struct CondProbMatrix {
    dim: HilbertDim,
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CondProbMatrix {
    pub fn new(dim: HilbertDim, rows: usize, entries: Vec<f64>) -> Result<Self> {
        let cols = dim.squared();
        if rows == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries do not form a {rows}x{cols} conditional probability matrix",
                entries.len()
            )));
        }
        Ok(Self {
            dim,
            rows,
            cols,
            entries,
        })
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.cols + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[j * self.cols..(j + 1) * self.cols]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|i| (0..self.rows).map(|j| self.get(j, i)).sum())
            .collect()
    }

    fn check_against(&self, p: &ProbVector) -> Result<()> {
        if p.entries.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "probability vector has {} entries but the matrix has {} columns",
                p.entries.len(),
                self.cols
            )));
        }
        Ok(())
    }
}

/// p_i = tr(ρ Π_i)/d.
pub fn state_to_probs(rho: &DensityMatrix, sic: &SicStructure) -> Result<ProbVector> {
    rho.dim().ensure_same(sic.dim())?;
    sic.ensure_certified()?;
    let entries = sic
        .effects()
        .iter()
        .map(|o| rho.matrix().trace_product(o).re)
        .collect();
    Ok(ProbVector::from_computed(rho.dim(), entries))
}

/// Σ_i c_i Π_i, made exactly Hermitian and checked for positivity at 1e-9.
fn reconstruct(
    dim: HilbertDim,
    coefficients: impl Iterator<Item = f64>,
    basis: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    let d = dim.get();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (c, op) in coefficients.zip(basis) {
        rho = &rho + &op.scale(c);
    }
    let rho = rho.hermitian_part();
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < -COMPARISON_TOL {
        return Err(Error::NotAQuantumState { min_eigenvalue });
    }
    DensityMatrix::validate(rho, COMPARISON_TOL).map_err(|e| match e {
        Error::NotPositive { deviation } => Error::NotAQuantumState {
            min_eigenvalue: -deviation,
        },
        other => other,
    })
}

/// ρ = Σ_i [(d+1) p_i − 1/d] Π_i. Vectors outside the image of the state
/// space are reported as [`Error::NotAQuantumState`], never repaired.
pub fn probs_to_state(p: &ProbVector, sic: &SicStructure) -> Result<DensityMatrix> {
    p.dim.ensure_same(sic.dim())?;
    sic.ensure_certified()?;
    let d = p.dim.as_f64();
    reconstruct(
        p.dim,
        p.entries.iter().map(|pi| (d + 1.0) * pi - 1.0 / d),
        sic.projectors(),
    )
}

/// r(j, i) = tr(E_j Π_i).
pub fn cond_prob_matrix(povm: &Povm, sic: &SicStructure) -> Result<CondProbMatrix> {
    povm.dim().ensure_same(sic.dim())?;
    sic.ensure_certified()?;
    let mut entries = Vec::with_capacity(povm.len() * sic.projectors().len());
    for e in povm.effects() {
        for pi in sic.projectors() {
            entries.push(e.trace_product(pi).re);
        }
    }
    CondProbMatrix::new(povm.dim(), povm.len(), entries)
}

/// Q(E_j) = Σ_i [(d+1) p_i − 1/d] r(j, i), computed without forming ρ.
pub fn born_urgleichung(
    p: &ProbVector,
    r: &CondProbMatrix,
    dim: HilbertDim,
) -> Result<OutcomeDistribution> {
    dim.ensure_same(p.dim)?;
    dim.ensure_same(r.dim)?;
    r.check_against(p)?;
    let d = dim.as_f64();
    let weights: Vec<f64> = p
        .entries
        .iter()
        .map(|pi| (d + 1.0) * pi - 1.0 / d)
        .collect();
    let raw = (0..r.rows)
        .map(|j| r.row(j).iter().zip(&weights).map(|(rji, w)| rji * w).sum())
        .collect();
    Ok(OutcomeDistribution::from_raw(raw))
}

/// Classical law of total probability Q_cl(j) = Σ_i p_i r(j, i).
pub fn classical_ltp(p: &ProbVector, r: &CondProbMatrix) -> Result<OutcomeDistribution> {
    p.dim.ensure_same(r.dim)?;
    r.check_against(p)?;
    let raw = (0..r.rows)
        .map(|j| {
            r.row(j)
                .iter()
                .zip(&p.entries)
                .map(|(rji, pi)| rji * pi)
                .sum()
        })
        .collect();
    Ok(OutcomeDistribution::from_raw(raw))
}

/// max_j |Q(E_j) − Q_cl(j)|: how far the quantum rule departs from the classical one.
pub fn ltp_deviation(p: &ProbVector, r: &CondProbMatrix, dim: HilbertDim) -> Result<f64> {
    let quantum = born_urgleichung(p, r, dim)?;
    let classical = classical_ltp(p, r)?;
    Ok(quantum.max_abs_deviation(&classical))
}

/// A minimal informationally complete POVM with its dual frame.
///
/// The duals satisfy tr(dual_k · effect_i) = δ_ki, so any state is
/// recovered from its outcome probabilities as ρ = Σ_i p_i dual_i.
#[derive(Clone, Debug, PartialEq)]
pub struct MicStructure {
    dim: HilbertDim,
    effects: Vec<ComplexMatrix>,
    duals: Vec<ComplexMatrix>,
    gram_determinant: f64,
    duality_residual: f64,
}

impl MicStructure {
    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn duals(&self) -> &[ComplexMatrix] {
        &self.duals
    }

    /// Determinant of the Gram matrix scaled to unit diagonal.
    pub fn gram_determinant(&self) -> f64 {
        self.gram_determinant
    }

    /// max_{k,i} |tr(dual_k effect_i) − δ_ki|.
    pub fn duality_residual(&self) -> f64 {
        self.duality_residual
    }
}

/// Computes the dual frame of d² POVM effects by solving against the Gram
/// matrix G_ki = tr(effect_k effect_i), one right-hand side per dual.
pub fn mic_duals(effects: &[ComplexMatrix], dim: HilbertDim) -> Result<MicStructure> {
    let n = dim.squared();
    if effects.len() != n {
        return Err(Error::WrongCount {
            expected: n,
            found: effects.len(),
        });
    }
    let povm = Povm::new(effects.to_vec(), VALIDITY_TOL)?;
    povm.dim().ensure_same(dim)?;

    let gram = DMatrix::from_fn(n, n, |k, i| effects[k].trace_product(&effects[i]).re);
    let determinant = scaled_determinant(&gram);
    if !(determinant.abs() > INDEPENDENCE_THRESHOLD) {
        return Err(Error::NotInformationallyComplete { determinant });
    }
    let lu = gram.clone().lu();
    let mut duals = Vec::with_capacity(n);
    for k in 0..n {
        let mut unit = nalgebra::DVector::<f64>::zeros(n);
        unit[k] = 1.0;
        let coefficients = lu
            .solve(&unit)
            .ok_or(Error::NotInformationallyComplete { determinant })?;
        let dual = sum_matrices(
            effects
                .iter()
                .zip(coefficients.iter())
                .map(|(e, c)| e.scale(*c))
                .collect::<Vec<_>>()
                .iter(),
        )
        .expect("d² >= 4");
        duals.push(dual.hermitian_part());
    }

    let mut duality_residual: f64 = 0.0;
    for (k, dual) in duals.iter().enumerate() {
        for (i, e) in effects.iter().enumerate() {
            let target = if k == i { 1.0 } else { 0.0 };
            duality_residual = duality_residual.max((dual.trace_product(e).re - target).abs());
        }
    }
    if duality_residual > COMPARISON_TOL {
        return Err(Error::NotInformationallyComplete { determinant });
    }

    Ok(MicStructure {
        dim,
        effects: effects.to_vec(),
        duals,
        gram_determinant: determinant,
        duality_residual,
    })
}

/// p_i = tr(ρ effect_i).
pub fn state_to_probs_mic(rho: &DensityMatrix, mic: &MicStructure) -> Result<ProbVector> {
    rho.dim().ensure_same(mic.dim)?;
    let entries = mic
        .effects
        .iter()
        .map(|e| rho.matrix().trace_product(e).re)
        .collect();
    Ok(ProbVector::from_computed(mic.dim, entries))
}

/// ρ = Σ_i p_i dual_i, with positivity checked as in [`probs_to_state`].
pub fn probs_to_state_mic(p: &ProbVector, mic: &MicStructure) -> Result<DensityMatrix> {
    p.dim.ensure_same(mic.dim)?;
    reconstruct(p.dim, p.entries.iter().copied(), &mic.duals)
}

/// Perturbs the SIC effects toward I/d and renormalizes them to a POVM:
/// E_i = (1 − t_i) O_i + t_i I/d², then E_i ← S^{-1/2} E_i S^{-1/2} with S = Σ E_i.
///
/// `strengths` holds one mixing weight per effect; distinct weights keep
/// the set informationally complete while breaking the SIC symmetry.
pub fn perturbed_sic_mic(sic: &SicStructure, strengths: &[f64]) -> Result<Vec<ComplexMatrix>> {
    let dim = sic.dim();
    let d = dim.get();
    if strengths.len() != dim.squared() {
        return Err(Error::WrongCount {
            expected: dim.squared(),
            found: strengths.len(),
        });
    }
    let floor = ComplexMatrix::identity(d).scale(1.0 / (d * d) as f64);
    let raw: Vec<ComplexMatrix> = sic
        .effects()
        .iter()
        .zip(strengths)
        .map(|(o, &t)| &o.scale(1.0 - t) + &floor.scale(t))
        .collect();
    let total = sum_matrices(raw.iter()).expect("d² >= 4");
    let inv_root = total.psd_function(|x| 1.0 / x.sqrt());
    Ok(raw
        .iter()
        .map(|e| (&(&inv_root * e) * &inv_root).hermitian_part())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_direct, random_density, random_povm, random_pure_state};
    use crate::sic::builtin_sic;

    fn dim(d: usize) -> HilbertDim {
        HilbertDim::new(d).unwrap()
    }

    fn sic_povm(sic: &SicStructure) -> Povm {
        Povm::new(sic.effects().to_vec(), VALIDITY_TOL).unwrap()
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let sic = builtin_sic(dim(3)).unwrap();
        let p = state_to_probs(&DensityMatrix::maximally_mixed(dim(3)), &sic).unwrap();
        for &pi in p.entries() {
            assert!((pi - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sic_projector_state() {
        let d = 3.0;
        let sic = builtin_sic(dim(3)).unwrap();
        let rho = DensityMatrix::validate(sic.projectors()[4].clone(), VALIDITY_TOL).unwrap();
        let p = state_to_probs(&rho, &sic).unwrap();
        for (i, &pi) in p.entries().iter().enumerate() {
            let expected = if i == 4 {
                1.0 / d
            } else {
                1.0 / (d * (d + 1.0))
            };
            assert!((pi - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_reconstructs_maximally_mixed() {
        let sic = builtin_sic(dim(2)).unwrap();
        let rho = probs_to_state(&ProbVector::uniform(dim(2)), &sic).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(dim(2)).matrix())
                < 1e-12
        );
    }

    #[test]
    fn deterministic_vector_is_not_a_state() {
        // 3Π_1 − I has eigenvalues 2 and −1.
        let sic = builtin_sic(dim(2)).unwrap();
        let p = ProbVector::new(dim(2), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        match probs_to_state(&p, &sic) {
            Err(Error::NotAQuantumState { min_eigenvalue }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-10)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn prob_vector_validation() {
        assert!(matches!(
            ProbVector::new(dim(2), vec![0.5, 0.5]),
            Err(Error::WrongCount { .. })
        ));
        assert!(ProbVector::new(dim(2), vec![0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(ProbVector::new(dim(2), vec![0.5, 0.5, 0.1, 0.0]).is_err());
    }

    #[test]
    fn uncertified_sic_rejected() {
        use crate::linalg::{C64, ZERO};
        use crate::sic::{orbit, Fiducial};
        let bad = orbit(&Fiducial::new(vec![C64::new(1.0, 0.0), ZERO]).unwrap());
        let rho = DensityMatrix::maximally_mixed(dim(2));
        assert!(matches!(
            state_to_probs(&rho, &bad),
            Err(Error::UncertifiedSic { .. })
        ));
    }

    #[test]
    fn single_outcome_povm_gives_ones() {
        let sic = builtin_sic(dim(2)).unwrap();
        let povm = Povm::new(vec![ComplexMatrix::identity(2)], VALIDITY_TOL).unwrap();
        let r = cond_prob_matrix(&povm, &sic).unwrap();
        assert_eq!(r.rows(), 1);
        for &x in r.entries() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sic_self_measurement_overlaps() {
        let sic = builtin_sic(dim(3)).unwrap();
        let r = cond_prob_matrix(&sic_povm(&sic), &sic).unwrap();
        let d = 3.0;
        for j in 0..9 {
            for i in 0..9 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let expected = (d * delta + 1.0) / (d * (d + 1.0));
                assert!((r.get(j, i) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn urgleichung_matches_born_direct() {
        for d in 2..=3 {
            let sic = builtin_sic(dim(d)).unwrap();
            for seed in 0..10 {
                let rho = random_density(dim(d), seed);
                let povm = random_povm(dim(d), 2 + seed as usize % 5, seed);
                let p = state_to_probs(&rho, &sic).unwrap();
                let r = cond_prob_matrix(&povm, &sic).unwrap();
                let q = born_urgleichung(&p, &r, dim(d)).unwrap();
                let direct = born_direct(&rho, &povm).unwrap();
                assert!(q.max_abs_deviation(&direct) <= 1e-10);
            }
        }
    }

    #[test]
    fn ltp_contrast_on_qubit_sic_projector() {
        let sic = builtin_sic(dim(2)).unwrap();
        let rho = DensityMatrix::validate(sic.projectors()[0].clone(), VALIDITY_TOL).unwrap();
        let p = state_to_probs(&rho, &sic).unwrap();
        let r = cond_prob_matrix(&sic_povm(&sic), &sic).unwrap();
        let quantum = born_urgleichung(&p, &r, dim(2)).unwrap();
        let classical = classical_ltp(&p, &r).unwrap();
        assert!((quantum.raw()[0] - 0.5).abs() < 1e-12);
        assert!((classical.raw()[0] - 1.0 / 3.0).abs() < 1e-12);
        let dev = ltp_deviation(&p, &r, dim(2)).unwrap();
        assert!((dev - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ltp_coincides_on_maximally_mixed() {
        let sic = builtin_sic(dim(3)).unwrap();
        let r = cond_prob_matrix(&sic_povm(&sic), &sic).unwrap();
        let dev = ltp_deviation(&ProbVector::uniform(dim(3)), &r, dim(3)).unwrap();
        assert!(dev <= 1e-12);
    }

    #[test]
    fn ltp_separates_random_pure_states() {
        let sic = builtin_sic(dim(3)).unwrap();
        let r = cond_prob_matrix(&sic_povm(&sic), &sic).unwrap();
        for seed in 0..50 {
            let p = state_to_probs(&random_pure_state(dim(3), seed), &sic).unwrap();
            assert!(ltp_deviation(&p, &r, dim(3)).unwrap() > 1e-3);
        }
    }

    #[test]
    fn shape_mismatch_reported() {
        let sic2 = builtin_sic(dim(2)).unwrap();
        let r = cond_prob_matrix(&Povm::computational(dim(2)), &sic2).unwrap();
        let p3 = ProbVector::uniform(dim(3));
        assert!(born_urgleichung(&p3, &r, dim(3)).is_err());
        assert!(classical_ltp(&p3, &r).is_err());
    }

    #[test]
    fn sic_duals_match_reconstruction_coefficients() {
        for d in 2..=3 {
            let sic = builtin_sic(dim(d)).unwrap();
            let mic = mic_duals(sic.effects(), dim(d)).unwrap();
            let df = d as f64;
            for (dual, o) in mic.duals().iter().zip(sic.effects()) {
                let expected = &o.scale(df * (df + 1.0)) - &ComplexMatrix::identity(d);
                assert!(dual.max_abs_diff(&expected) < 1e-10);
            }
            assert!(mic.duality_residual() <= 1e-9);
        }
    }

    #[test]
    fn duplicated_effect_not_informationally_complete() {
        let sic = builtin_sic(dim(2)).unwrap();
        let mut effects = sic.effects().to_vec();
        // keep Σ = I: replace effects 2 and 3 by two copies of their average
        let avg = (&effects[2] + &effects[3]).scale(0.5);
        effects[2] = avg.clone();
        effects[3] = avg;
        assert!(matches!(
            mic_duals(&effects, dim(2)),
            Err(Error::NotInformationallyComplete { .. })
        ));
    }

    #[test]
    fn perturbed_mic_round_trips() {
        let sic = builtin_sic(dim(2)).unwrap();
        let effects = perturbed_sic_mic(&sic, &[0.05, 0.1, 0.15, 0.2]).unwrap();
        let mic = mic_duals(&effects, dim(2)).unwrap();
        assert!(mic.duality_residual() <= 1e-9);
        let rho = random_density(dim(2), 5);
        let p = state_to_probs_mic(&rho, &mic).unwrap();
        let back = probs_to_state_mic(&p, &mic).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-10);
    }

    #[test]
    fn mic_uniform_and_sic_consistency() {
        let sic = builtin_sic(dim(2)).unwrap();
        let mic = mic_duals(sic.effects(), dim(2)).unwrap();
        let rho = probs_to_state_mic(&ProbVector::uniform(dim(2)), &mic).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(dim(2)).matrix())
                < 1e-12
        );
        let bad = ProbVector::new(dim(2), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            probs_to_state_mic(&bad, &mic),
            Err(Error::NotAQuantumState { .. })
        ));
    }
}
