//! Weyl–Heisenberg orbits and SIC verification.
//!
//! A SIC in dimension d is a set of d² rank-one projectors Π_k with
//! tr(Π_k Π_l) = (d δ_kl + 1)/(d + 1); the effects Π_k/d then sum to the
//! identity. Candidate sets are generated as orbits of a fiducial vector
//! under the displacement operators D_{a,b} = τ^{ab} X^a Z^b.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{sum_matrices, ComplexMatrix, C64, ZERO};
use crate::quantum::{random_unit_vector, HilbertDim, Unitary, CONSTRUCTION_TOL};

/// Residual at or below which a projector set counts as a SIC.
pub const CERTIFICATION_THRESHOLD: f64 = 1e-8;
/// Maximum allowed deviation of Σ Π_i/d from the identity for certification.
pub const POVM_THRESHOLD: f64 = 1e-9;
/// Scaled Gram determinant below which projectors are treated as dependent.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-12;

/// Modulus below which a component is skipped when fixing the global phase.
const GAUGE_CUTOFF: f64 = 1e-9;

/// Unit vector whose Weyl–Heisenberg orbit generates a candidate SIC.
///
/// The global phase is fixed so that the first component with modulus
/// above 1e-9 is real and nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiducial {
    dim: HilbertDim,
    vector: Vec<C64>,
}

impl Fiducial {
    /// Accepts a vector that is already unit norm within 1e-12 and fixes its gauge.
    pub fn new(vector: Vec<C64>) -> Result<Self> {
        let dim = HilbertDim::new(vector.len())?;
        let norm_sqr: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > CONSTRUCTION_TOL || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self {
            dim,
            vector: gauge_fixed(vector),
        })
    }

    /// Normalizes and gauge-fixes any nonzero vector.
    pub fn normalized(vector: Vec<C64>) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Self::new(vector.into_iter().map(|z| z / norm).collect())
    }

    /// A uniformly random unit vector, reproducible from `seed`.
    pub fn random(dim: HilbertDim, seed: u64) -> Self {
        Self::normalized(random_unit_vector(dim, seed)).expect("gaussian vectors are nonzero")
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }
}

fn gauge_fixed(mut vector: Vec<C64>) -> Vec<C64> {
    if let Some(lead) = vector.iter().find(|z| z.norm() > GAUGE_CUTOFF).copied() {
        let phase = lead.conj() / lead.norm();
        for z in &mut vector {
            *z *= phase;
        }
    }
    vector
}

/// ω = exp(2πi/d).
fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

/// τ^{ab} with τ = −exp(iπ/d), reduced so the exponent stays small.
fn tau_power(d: usize, a: usize, b: usize) -> C64 {
    // τ^{2d} = 1
    let angle = PI * (1.0 + 1.0 / d as f64);
    let exponent = (a * b) % (2 * d);
    C64::from_polar(1.0, angle * exponent as f64)
}

/// (D_{a,b} ψ)_k = τ^{ab} ω^{b(k−a)} ψ_{k−a}.
pub fn displace(a: usize, b: usize, psi: &[C64]) -> Vec<C64> {
    let d = psi.len();
    let w = omega(d);
    let t = tau_power(d, a, b);
    (0..d)
        .map(|k| {
            let src = (k + d - a % d) % d;
            t * w.powu(((b * src) % d) as u32) * psi[src]
        })
        .collect()
}

/// (D_{a,b}† ψ)_k = conj(τ^{ab}) ω^{−bk} ψ_{k+a}.
pub fn displace_adjoint(a: usize, b: usize, psi: &[C64]) -> Vec<C64> {
    let d = psi.len();
    let w = omega(d).conj();
    let t = tau_power(d, a, b).conj();
    (0..d)
        .map(|k| t * w.powu(((b * k) % d) as u32) * psi[(k + a) % d])
        .collect()
}

/// The d² displacement operators, row-major in (a, b), starting with D_{0,0} = I.
pub fn wh_displacements(dim: HilbertDim) -> Vec<Unitary> {
    let d = dim.get();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let columns: Vec<Vec<C64>> = (0..d)
                .map(|j| {
                    let mut basis = vec![ZERO; d];
                    basis[j] = C64::new(1.0, 0.0);
                    displace(a, b, &basis)
                })
                .collect();
            let m = ComplexMatrix::from_fn(d, d, |r, c| columns[c][r]);
            out.push(Unitary::from_trusted(dim, m));
        }
    }
    out
}

/// Projectors of a candidate SIC together with their verification data.
///
/// Built either as the orbit of a fiducial ([`orbit`]) or from a
/// hand-supplied projector list ([`SicStructure::from_projectors`]).
/// Orbits are returned even when far from a SIC; use
/// [`SicStructure::certified`] before feeding one into the probability
/// representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SicStructure {
    dim: HilbertDim,
    fiducial: Option<Fiducial>,
    projectors: Vec<ComplexMatrix>,
    effects: Vec<ComplexMatrix>,
    report: SicReport,
}

impl SicStructure {
    pub fn from_projectors(projectors: Vec<ComplexMatrix>, dim: HilbertDim) -> Result<Self> {
        let report = verify_sic(&projectors, dim)?;
        Ok(Self::assemble(dim, None, projectors, report))
    }

    fn assemble(
        dim: HilbertDim,
        fiducial: Option<Fiducial>,
        projectors: Vec<ComplexMatrix>,
        report: SicReport,
    ) -> Self {
        let scale = 1.0 / dim.as_f64();
        let effects = projectors.iter().map(|p| p.scale(scale)).collect();
        Self {
            dim,
            fiducial,
            projectors,
            effects,
            report,
        }
    }

    pub fn dim(&self) -> HilbertDim {
        self.dim
    }

    pub fn fiducial(&self) -> Option<&Fiducial> {
        self.fiducial.as_ref()
    }

    /// The rank-one projectors Π_i.
    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// The measurement effects O_i = Π_i / d.
    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn residual(&self) -> f64 {
        self.report.residual
    }

    pub fn report(&self) -> &SicReport {
        &self.report
    }

    pub fn is_certified(&self) -> bool {
        self.report.is_certified()
    }

    pub fn certified(self) -> Result<Self> {
        if !self.is_certified() {
            return Err(Error::UncertifiedSic {
                residual: self.report.residual.max(self.report.povm_deviation),
            });
        }
        Ok(self)
    }

    pub(crate) fn ensure_certified(&self) -> Result<()> {
        if !self.is_certified() {
            return Err(Error::UncertifiedSic {
                residual: self.report.residual.max(self.report.povm_deviation),
            });
        }
        Ok(())
    }
}

/// Outcome of checking a projector set against the SIC conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct SicReport {
    /// max over k, l of |tr(Π_k Π_l) − (d δ_kl + 1)/(d + 1)|.
    pub residual: f64,
    /// The (k, l) pair attaining `residual`, first in row-major order on ties.
    pub worst_pair: (usize, usize),
    /// max entry of |Σ Π_i / d − I|.
    pub povm_deviation: f64,
    /// Determinant of the overlap Gram matrix scaled to unit diagonal.
    pub gram_determinant: f64,
}

impl SicReport {
    pub fn is_certified(&self) -> bool {
        self.residual <= CERTIFICATION_THRESHOLD
            && self.povm_deviation <= POVM_THRESHOLD
            && self.gram_determinant.abs() > INDEPENDENCE_THRESHOLD
    }
}

/// Checks the overlap and identity-resolution conditions of a SIC.
pub fn verify_sic(projectors: &[ComplexMatrix], dim: HilbertDim) -> Result<SicReport> {
    let d = dim.get();
    let n = dim.squared();
    if projectors.len() != n {
        return Err(Error::WrongCount {
            expected: n,
            found: projectors.len(),
        });
    }
    for p in projectors {
        dim.ensure_square_matrix(p)?;
    }
    let df = d as f64;
    let diagonal_target = 1.0;
    let off_target = 1.0 / (df + 1.0);

    let mut gram = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut residual = -1.0;
    let mut worst_pair = (0, 0);
    for k in 0..n {
        for l in 0..n {
            let overlap = projectors[k].trace_product(&projectors[l]).re;
            gram[(k, l)] = overlap;
            let target = if k == l { diagonal_target } else { off_target };
            let dev = (overlap - target).abs();
            if dev > residual || dev.is_nan() {
                residual = dev;
                worst_pair = (k, l);
            }
        }
    }

    let total = sum_matrices(projectors.iter())
        .expect("d² >= 4")
        .scale(1.0 / df);
    let povm_deviation = total.max_abs_diff(&ComplexMatrix::identity(d));

    Ok(SicReport {
        residual,
        worst_pair,
        povm_deviation,
        gram_determinant: scaled_determinant(&gram),
    })
}

/// Determinant of D^{-1/2} G D^{-1/2}, D = diag(G); zero if any diagonal entry vanishes.
pub(crate) fn scaled_determinant(gram: &nalgebra::DMatrix<f64>) -> f64 {
    let n = gram.nrows();
    let diag: Vec<f64> = (0..n).map(|i| gram[(i, i)]).collect();
    if diag.iter().any(|&g| g <= 0.0 || !g.is_finite()) {
        return 0.0;
    }
    let scaled = nalgebra::DMatrix::from_fn(n, n, |r, c| gram[(r, c)] / (diag[r] * diag[c]).sqrt());
    scaled.determinant()
}

/// Weyl–Heisenberg orbit Π_{a,b} = D_{a,b}|ψ⟩⟨ψ|D_{a,b}†, verified but not certified.
pub fn orbit(fiducial: &Fiducial) -> SicStructure {
    let d = fiducial.dim.get();
    let mut projectors = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            projectors.push(ComplexMatrix::outer(&displace(a, b, &fiducial.vector)));
        }
    }
    let report = verify_sic(&projectors, fiducial.dim).expect("orbit has d² projectors of size d");
    SicStructure::assemble(fiducial.dim, Some(fiducial.clone()), projectors, report)
}

/// Built-in fiducials for d = 2 and d = 3.
pub fn builtin_fiducial(dim: HilbertDim) -> Result<Fiducial> {
    match dim.get() {
        2 => {
            let s3 = 3f64.sqrt();
            let a = ((1.0 + 1.0 / s3) / 2.0).sqrt();
            let b = ((1.0 - 1.0 / s3) / 2.0).sqrt();
            Fiducial::new(vec![C64::new(a, 0.0), C64::from_polar(b, PI / 4.0)])
        }
        3 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            Fiducial::new(vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0)])
        }
        d => Err(Error::NoBuiltinForDimension(d)),
    }
}

/// Certified SIC from the built-in fiducial.
pub fn builtin_sic(dim: HilbertDim) -> Result<SicStructure> {
    orbit(&builtin_fiducial(dim)?).certified()
}

/// ⟨ψ|D_{a,b}|ψ⟩ for every (a, b), row-major.
pub fn wh_overlaps(psi: &[C64]) -> Vec<C64> {
    let d = psi.len();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let shifted = displace(a, b, psi);
            out.push(psi.iter().zip(&shifted).map(|(x, y)| x.conj() * y).sum());
        }
    }
    out
}

/// d²(d²−1)/(d+1)², the minimum of the frame potential over unit vectors.
pub fn frame_potential_minimum(dim: HilbertDim) -> f64 {
    let d = dim.as_f64();
    d * d * (d * d - 1.0) / ((d + 1.0) * (d + 1.0))
}

/// Σ over ordered pairs k ≠ l of |⟨ψ_k|ψ_l⟩|⁴ across the orbit.
///
/// By covariance this is d² Σ_{(a,b)≠(0,0)} |⟨ψ|D_{a,b}|ψ⟩|⁴.
pub fn frame_potential(fiducial: &Fiducial) -> f64 {
    frame_potential_of(&fiducial.vector)
}

/// The frame potential formula applied to any vector, normalized or not.
pub fn frame_potential_of(psi: &[C64]) -> f64 {
    let d = psi.len() as f64;
    let sum: f64 = wh_overlaps(psi)
        .iter()
        .skip(1)
        .map(|c| c.norm_sqr().powi(2))
        .sum();
    d * d * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_unit_vector;

    fn dim(d: usize) -> HilbertDim {
        HilbertDim::new(d).unwrap()
    }

    fn pauli(name: char) -> ComplexMatrix {
        let (o, z, i) = (C64::new(1.0, 0.0), ZERO, C64::new(0.0, 1.0));
        let e = match name {
            'I' => [o, z, z, o],
            'X' => [z, o, o, z],
            'Y' => [z, -i, i, z],
            'Z' => [o, z, z, -o],
            _ => unreachable!(),
        };
        ComplexMatrix::from_row_major(2, 2, &e).unwrap()
    }

    /// |tr(A† B)| = 2 for 2x2 unitaries equal up to phase.
    fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
        (a.adjoint().trace_product(b).norm() - a.rows() as f64).abs() < 1e-12
    }

    #[test]
    fn qubit_displacements_are_paulis() {
        let ds = wh_displacements(dim(2));
        let expected = ['I', 'Z', 'X', 'Y'];
        for (u, name) in ds.iter().zip(expected) {
            assert!(equal_up_to_phase(u.matrix(), &pauli(name)), "{name}");
        }
        assert_eq!(ds[0].matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn displacements_are_unitary() {
        for d in 2..=6 {
            for u in wh_displacements(dim(d)) {
                assert!(u.deviation() <= 1e-12);
            }
        }
    }

    #[test]
    fn nontrivial_displacements_are_traceless() {
        for (k, u) in wh_displacements(dim(3)).iter().enumerate().skip(1) {
            assert!(u.matrix().trace().norm() < 1e-12, "D_{k}");
        }
    }

    #[test]
    fn displace_adjoint_inverts_displace() {
        let psi = random_unit_vector(dim(5), 1);
        for a in 0..5 {
            for b in 0..5 {
                let back = displace_adjoint(a, b, &displace(a, b, &psi));
                let err = back
                    .iter()
                    .zip(&psi)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-14);
            }
        }
    }

    #[test]
    fn displace_matches_matrix_form() {
        let psi = random_unit_vector(dim(4), 2);
        let ds = wh_displacements(dim(4));
        for a in 0..4 {
            for b in 0..4 {
                let via_matrix = ds[a * 4 + b].matrix().apply(&psi);
                let direct = displace(a, b, &psi);
                let err = via_matrix
                    .iter()
                    .zip(&direct)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-14);
            }
        }
    }

    #[test]
    fn orbit_projectors_are_rank_one_idempotents() {
        let f = Fiducial::new(random_unit_vector(dim(4), 9)).unwrap();
        let sic = orbit(&f);
        for p in sic.projectors() {
            assert!(p.hermitian_deviation() < 1e-12);
            assert!((p * p).max_abs_diff(p) < 1e-12);
            assert!((p.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn builtins_certify() {
        for d in [2, 3] {
            let sic = orbit(&builtin_fiducial(dim(d)).unwrap());
            assert!(sic.residual() <= 1e-12, "d={d} residual {}", sic.residual());
            assert!(sic.is_certified());
        }
    }

    #[test]
    fn builtin_missing_dimension() {
        assert_eq!(
            builtin_fiducial(dim(7)),
            Err(Error::NoBuiltinForDimension(7))
        );
    }

    #[test]
    fn basis_vector_orbit_is_not_a_sic() {
        let f = Fiducial::new(vec![C64::new(1.0, 0.0), ZERO]).unwrap();
        let sic = orbit(&f);
        assert!((sic.residual() - 2.0 / 3.0).abs() < 1e-12);
        let (k, l) = sic.report().worst_pair;
        assert_ne!(k, l);
        assert!(!sic.is_certified());
        assert!(matches!(sic.certified(), Err(Error::UncertifiedSic { .. })));
    }

    #[test]
    fn verify_rejects_wrong_count_and_size() {
        let sic = builtin_sic(dim(2)).unwrap();
        let short = sic.projectors()[..3].to_vec();
        assert!(matches!(
            verify_sic(&short, dim(2)),
            Err(Error::WrongCount {
                expected: 4,
                found: 3
            })
        ));
        let big = vec![ComplexMatrix::identity(3); 4];
        assert!(matches!(
            verify_sic(&big, dim(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn perturbed_projector_raises_residual() {
        let sic = builtin_sic(dim(3)).unwrap();
        let mut projectors = sic.projectors().to_vec();
        let mut entries = projectors[4].row_major_entries();
        entries[1] += C64::new(1e-4, 0.0);
        projectors[4] = ComplexMatrix::from_row_major(3, 3, &entries).unwrap();
        let report = verify_sic(&projectors, dim(3)).unwrap();
        assert!(
            report.residual >= 1e-5 && report.residual <= 1e-2,
            "{}",
            report.residual
        );
    }

    #[test]
    fn frame_potential_minima() {
        let f2 = builtin_fiducial(dim(2)).unwrap();
        assert!((frame_potential(&f2) - 4.0 / 3.0).abs() < 1e-10);
        let f3 = builtin_fiducial(dim(3)).unwrap();
        assert!((frame_potential(&f3) - 4.5).abs() < 1e-10);
        let basis = Fiducial::new(vec![C64::new(1.0, 0.0), ZERO]).unwrap();
        assert!(frame_potential(&basis) > 4.0 / 3.0);
        assert_eq!(frame_potential_minimum(dim(2)), 4.0 / 3.0);
        assert_eq!(frame_potential_minimum(dim(3)), 4.5);
    }

    #[test]
    fn gauge_is_fixed() {
        let v = vec![ZERO, C64::new(0.0, 0.6), C64::new(0.8, 0.0)];
        let f = Fiducial::new(v).unwrap();
        assert_eq!(f.vector()[1].im, 0.0);
        assert!(f.vector()[1].re > 0.0);
        assert!(matches!(
            Fiducial::new(vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }
}
