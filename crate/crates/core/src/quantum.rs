//! States, unitaries and POVMs in the conventional amplitude picture.
//!
//! Everything in the probability representation is checked against the
//! objects and rules defined here: [`born_direct`] is the reference Born
//! rule and [`luders_update`] the post-measurement update.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{sum_matrices, ComplexMatrix, C64};

/// Tolerance for objects built by construction (orbits, rotations).
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for validity checks on states, unitaries and POVMs.
pub const VALIDITY_TOL: f64 = 1e-10;
/// Tolerance for comparing two independently computed tracks.
pub const COMPARISON_TOL: f64 = 1e-9;

/// Probabilities at or below this are treated as impossible outcomes.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Dimension of the Hilbert space, at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HilbertDim(usize);

impl HilbertDim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// d², the number of outcomes of a minimal informationally complete measurement.
    pub fn squared(self) -> usize {
        self.0 * self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn ensure_same(self, other: HilbertDim) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.0,
                found: other.0,
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_square_matrix(self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() != self.0 {
            return Err(Error::DimensionMismatch {
                expected: self.0,
                found: m.rows(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for HilbertDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn dim_of_square(m: &ComplexMatrix) -> Result<HilbertDim> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    HilbertDim::new(m.rows())
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: HilbertDim,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity, in that order.
    pub fn validate(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let dim = dim_of_square(&matrix)?;
        let herm = matrix.hermitian_deviation();
        if herm > tol {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let trace_dev = (matrix.trace() - C64::new(1.0, 0.0)).norm();
        if trace_dev > tol {
            return Err(Error::NotUnitTrace {
                deviation: trace_dev,
            });
        }
        let min_eig = matrix.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::NotPositive {
                deviation: -min_eig,
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn maximally_mixed(dim: HilbertDim) -> Self {
        let d = dim.get();
        Self {
            dim,
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// |psi><psi| for a vector normalized on the way in.
    pub fn pure(vector: &[C64]) -> Result<Self> {
        let dim = HilbertDim::new(vector.len())?;
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        let unit: Vec<C64> = vector.iter().map(|z| z / norm).collect();
        Ok(Self {
            dim,
            matrix: ComplexMatrix::outer(&unit),
        })
    }

    pub(crate) fn from_trusted(dim: HilbertDim, matrix: ComplexMatrix) -> Self {
        Self { dim, matrix }
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    dim: HilbertDim,
    matrix: ComplexMatrix,
}

impl Unitary {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let dim = dim_of_square(&matrix)?;
        let deviation = unitarity_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: HilbertDim) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim.get()),
        }
    }

    pub(crate) fn from_trusted(dim: HilbertDim, matrix: ComplexMatrix) -> Self {
        Self { dim, matrix }
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self` applied after `first`, i.e. the product self * first.
    pub fn after(&self, first: &Unitary) -> Result<Self> {
        self.dim.ensure_same(first.dim)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

/// max entry of |U U^dag - I|.
pub fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m * &m.adjoint()).max_abs_diff(&ComplexMatrix::identity(m.rows()))
}

/// A positive-operator-valued measure. Outcome labels are list indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: HilbertDim,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = effects.first().ok_or(Error::EmptyPovm)?;
        let dim = dim_of_square(first)?;
        for (index, effect) in effects.iter().enumerate() {
            check_effect(dim, effect, tol)
                .map_err(|reason| Error::InvalidEffect { index, reason })?;
        }
        let total = sum_matrices(effects.iter()).expect("non-empty");
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(dim.get()));
        if deviation > tol {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self { dim, effects })
    }

    pub(crate) fn from_trusted(dim: HilbertDim, effects: Vec<ComplexMatrix>) -> Self {
        Self { dim, effects }
    }

    /// Measurement in the orthonormal basis given by the columns of `basis`.
    pub fn projective(basis: &Unitary) -> Self {
        let d = basis.dim.get();
        let effects = (0..d)
            .map(|k| {
                let col: Vec<C64> = (0..d).map(|r| basis.matrix.get(r, k).unwrap()).collect();
                ComplexMatrix::outer(&col)
            })
            .collect();
        Self {
            dim: basis.dim,
            effects,
        }
    }

    pub fn computational(dim: HilbertDim) -> Self {
        Self::projective(&Unitary::identity(dim))
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

fn check_effect(dim: HilbertDim, effect: &ComplexMatrix, tol: f64) -> Result<(), String> {
    dim.ensure_square_matrix(effect)
        .map_err(|e| e.to_string())?;
    let herm = effect.hermitian_deviation();
    if herm > tol {
        return Err(format!("not Hermitian (deviation {herm:.3e})"));
    }
    let min_eig = effect.min_eigenvalue();
    if min_eig < -tol {
        return Err(format!("not positive (eigenvalue {min_eig:.3e})"));
    }
    Ok(())
}

/// Outcome probabilities of a measurement.
///
/// `entries` are clamped to [0, 1]; `raw` keeps the values as computed so
/// that identities can be checked before clamping hides rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<f64>,
    raw: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let entries = raw.iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Self { entries, raw }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Largest amount any raw entry was moved by clamping.
    pub fn clamp_deviation(&self) -> f64 {
        self.raw
            .iter()
            .zip(&self.entries)
            .map(|(r, e)| (r - e).abs())
            .fold(0.0, f64::max)
    }

    pub fn raw_sum(&self) -> f64 {
        self.raw.iter().sum()
    }

    /// Entrywise max |a - b| over raw values; infinite if lengths differ.
    pub fn max_abs_deviation(&self, other: &OutcomeDistribution) -> f64 {
        max_abs_diff(&self.raw, &other.raw)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Q(E_j) = tr(rho E_j).
pub fn born_direct(rho: &DensityMatrix, povm: &Povm) -> Result<OutcomeDistribution> {
    rho.dim.ensure_same(povm.dim)?;
    let raw = povm
        .effects
        .iter()
        .map(|e| rho.matrix.trace_product(e).re)
        .collect();
    Ok(OutcomeDistribution::from_raw(raw))
}

/// Lüders update sqrt(E) rho sqrt(E) / tr(rho E).
///
/// `effect` must be Hermitian with 0 <= E <= I. For a rank-one projector
/// the result is that projector whatever `rho` was.
pub fn luders_update(rho: &DensityMatrix, effect: &ComplexMatrix) -> Result<DensityMatrix> {
    rho.dim.ensure_square_matrix(effect)?;
    check_effect(rho.dim, effect, VALIDITY_TOL)
        .map_err(|reason| Error::InvalidEffect { index: 0, reason })?;
    let complement = &ComplexMatrix::identity(rho.dim.get()) - effect;
    let min_complement = complement.min_eigenvalue();
    if min_complement < -VALIDITY_TOL {
        return Err(Error::InvalidEffect {
            index: 0,
            reason: format!("exceeds the identity (I - E has eigenvalue {min_complement:.3e})"),
        });
    }
    let probability = rho.matrix.trace_product(effect).re;
    if probability <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { probability });
    }
    let root = effect.psd_sqrt();
    let updated = (&(&root * &rho.matrix) * &root)
        .scale(1.0 / probability)
        .hermitian_part();
    DensityMatrix::validate(updated, COMPARISON_TOL)
}

#[derive(Clone, Copy)]
enum Stream {
    Density = 1,
    Unitary = 2,
    Povm = 3,
    Pure = 4,
    Fiducial = 5,
}

fn seeded(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = gaussian_vector(rng, rows * cols);
    ComplexMatrix::from_row_major(rows, cols, &entries).expect("sized")
}

/// A·A†/tr(A·A†) with A a seeded standard complex Gaussian matrix.
pub fn random_density(dim: HilbertDim, seed: u64) -> DensityMatrix {
    let mut rng = seeded(seed, Stream::Density);
    let a = gaussian_matrix(&mut rng, dim.get(), dim.get());
    let aa = &a * &a.adjoint();
    let trace = aa.trace().re;
    DensityMatrix::from_trusted(dim, aa.scale(1.0 / trace).hermitian_part())
}

/// Haar-random unitary: QR of a Gaussian matrix with R's diagonal made real positive.
pub fn random_unitary(dim: HilbertDim, seed: u64) -> Unitary {
    let mut rng = seeded(seed, Stream::Unitary);
    let z = gaussian_matrix(&mut rng, dim.get(), dim.get());
    let qr = z.as_nalgebra().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let d = dim.get();
    let u = ComplexMatrix::from_fn(d, d, |row, col| {
        let diag = r[(col, col)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q[(row, col)] * phase
    });
    Unitary::from_trusted(dim, u)
}

/// Random pure state from a seeded Gaussian vector.
pub fn random_pure_state(dim: HilbertDim, seed: u64) -> DensityMatrix {
    let mut rng = seeded(seed, Stream::Pure);
    let v = gaussian_vector(&mut rng, dim.get());
    DensityMatrix::pure(&v).expect("gaussian vector is nonzero")
}

/// Random `outcomes`-element POVM: E_j = S^{-1/2} A_j S^{-1/2} with
/// A_j = G_j G_j† and S = Σ A_j.
pub fn random_povm(dim: HilbertDim, outcomes: usize, seed: u64) -> Povm {
    assert!(outcomes >= 1, "a POVM needs at least one outcome");
    let mut rng = seeded(seed, Stream::Povm);
    let d = dim.get();
    let positives: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = gaussian_matrix(&mut rng, d, d);
            &g * &g.adjoint()
        })
        .collect();
    let total = sum_matrices(positives.iter()).expect("non-empty");
    let inv_root = total.psd_function(|x| 1.0 / x.sqrt());
    let effects = positives
        .iter()
        .map(|a| (&(&inv_root * a) * &inv_root).hermitian_part())
        .collect();
    Povm::from_trusted(dim, effects)
}

pub(crate) fn random_unit_vector(dim: HilbertDim, seed: u64) -> Vec<C64> {
    let mut rng = seeded(seed, Stream::Fiducial);
    let v = gaussian_vector(&mut rng, dim.get());
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}
