//! State objects: spectra, density operators, points of the purification
//! bundle, tangent vectors and gauge algebra elements.
//!
//! A density operator `ρ` of rank `k` on `C^n` has a spectrum
//! `σ = (p_1, …, p_k)`, the non-increasing list of its positive eigenvalues.
//! The bundle over the orbit of `ρ` consists of the `n×k` matrices `Ψ` with
//! `Ψ†Ψ = P(σ)`, where `P(σ)` is diagonal with `σ` on the diagonal; the
//! projection is `Ψ ↦ ΨΨ†` and the gauge group `U(σ)` (unitaries commuting
//! with `P(σ)`) acts on the right.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Matrix-norm thresholds used when validating inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub tol_trace: f64,
    pub tol_herm: f64,
    pub tol_psd: f64,
    pub tol_fiber: f64,
    pub tol_comm: f64,
    pub tol_degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_trace: 1e-10,
            tol_herm: 1e-10,
            tol_psd: 1e-10,
            tol_fiber: 1e-10,
            tol_comm: 1e-10,
            tol_degeneracy: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("tol_trace", self.tol_trace),
            ("tol_herm", self.tol_herm),
            ("tol_psd", self.tol_psd),
            ("tol_fiber", self.tol_fiber),
            ("tol_comm", self.tol_comm),
            ("tol_degeneracy", self.tol_degeneracy),
        ];
        for (name, value) in all {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Non-increasing list of positive eigenvalues grouped into multiplicity
/// blocks.
///
/// Adjacent eigenvalues whose gap is at most `tol_degeneracy` belong to the
/// same block, and every block stores the mean of its members so that `P(σ)`
/// is exactly scalar on each block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl Spectrum {
    /// Validates an explicit eigenvalue list (positive, non-increasing,
    /// summing to one) and forms the multiplicity blocks.
    pub fn new(values: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        tol.validate()?;
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty eigenvalue list".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalue {bad} is not strictly positive"
            )));
        }
        if let Some(w) = values
            .windows(2)
            .find(|w| w[1] > w[0] + tol.tol_degeneracy)
        {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalues must be non-increasing: {} then {}",
                w[0], w[1]
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol.tol_trace {
            return Err(Error::TraceNotOne { trace: sum });
        }
        Ok(Self::cluster(values, tol.tol_degeneracy))
    }

    fn cluster(values: Vec<f64>, tol_degeneracy: f64) -> Self {
        let mut multiplicities = Vec::new();
        let mut start = 0;
        for i in 1..=values.len() {
            if i == values.len() || (values[i - 1] - values[i]).abs() > tol_degeneracy {
                multiplicities.push(i - start);
                start = i;
            }
        }
        let mut averaged = Vec::with_capacity(values.len());
        let mut offset = 0;
        for &m in &multiplicities {
            let mean = values[offset..offset + m].iter().sum::<f64>() / m as f64;
            averaged.extend(std::iter::repeat_n(mean, m));
            offset += m;
        }
        Spectrum {
            values: averaged,
            multiplicities,
        }
    }

    /// `p_1, …, p_k` with repeats.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// The distinct eigenvalues, one per block, in decreasing order.
    pub fn distinct(&self) -> Vec<f64> {
        self.block_ranges().map(|r| self.values[r.start]).collect()
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum is never empty")
    }

    /// Index ranges of the multiplicity blocks `E_1, …, E_l`.
    pub fn block_ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.multiplicities.iter().scan(0usize, |start, &m| {
            let r = *start..*start + m;
            *start += m;
            Some(r)
        })
    }

    /// Block index of each of the `k` diagonal positions.
    pub fn block_labels(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .enumerate()
            .flat_map(|(j, &m)| std::iter::repeat_n(j, m))
            .collect()
    }

    /// `P(σ)`
    pub fn p_matrix(&self) -> CMat {
        linalg::diag_real(&self.values)
    }

    /// `P(σ)^{-1}`
    pub fn p_inverse(&self) -> CMat {
        let inv: Vec<f64> = self.values.iter().map(|p| 1.0 / p).collect();
        linalg::diag_real(&inv)
    }

    /// Keeps only the multiplicity-block diagonal part of a `k×k` matrix,
    /// `Σ_j E_j M E_j`.
    pub fn block_diagonal_part(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for r in self.block_ranges() {
            let len = r.len();
            out.view_mut((r.start, r.start), (len, len))
                .copy_from(&m.view((r.start, r.start), (len, len)));
        }
        out
    }

    /// Entrywise comparison of two spectra (same rank, values within `tol`).
    pub fn approx_eq(&self, other: &Spectrum, tol: f64) -> bool {
        self.rank() == other.rank()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Hermitian, positive-semidefinite, unit-trace `n×n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMat,
}

impl DensityOperator {
    /// Wraps a matrix already known to be a density operator (used for
    /// outputs of unitary propagation). The Hermitian part is stored.
    pub(crate) fn from_trusted(matrix: CMat) -> Self {
        DensityOperator {
            matrix: linalg::hermitian_part(&matrix),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// All eigenvalues (including zeros), decreasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh_descending(&self.matrix)
    }

    /// `UρU†`
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self::from_trusted(u * &self.matrix * u.adjoint())
    }
}

/// Checks that `m` is a density operator and returns its Hermitian
/// symmetrization `(M + M†)/2`.
pub fn validate_density(m: &CMat, tol: &Tolerances) -> Result<DensityOperator> {
    tol.validate()?;
    linalg::check_square(m)?;
    if !linalg::is_finite(m) {
        return Err(Error::NonFinite);
    }
    let residual = linalg::hermitian_residual(m);
    if residual > tol.tol_herm {
        return Err(Error::NotHermitian { residual });
    }
    let sym = linalg::hermitian_part(m);
    let eigenvalues = linalg::eigvalsh_descending(&sym);
    let min_eigenvalue = eigenvalues.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol.tol_psd {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let trace = linalg::trace(&sym).re;
    if (trace - 1.0).abs() > tol.tol_trace {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(DensityOperator { matrix: sym })
}

/// The spectrum of `ρ`: eigenvalues above `tol_psd`, decreasing, grouped
/// into multiplicity blocks with `tol_degeneracy`.
pub fn spectrum_of(rho: &DensityOperator, tol: &Tolerances) -> Spectrum {
    let positive: Vec<f64> = rho
        .eigenvalues()
        .into_iter()
        .filter(|&p| p > tol.tol_psd)
        .collect();
    Spectrum::cluster(positive, tol.tol_degeneracy)
}

/// An `n×k` matrix `Ψ` with `Ψ†Ψ = P(σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundlePoint {
    matrix: CMat,
    spectrum: Spectrum,
}

impl BundlePoint {
    pub fn new(matrix: CMat, spectrum: Spectrum, tol: &Tolerances) -> Result<Self> {
        let (n, k) = matrix.shape();
        if k != spectrum.rank() {
            return Err(Error::ShapeMismatch {
                expected: (n, spectrum.rank()),
                found: (n, k),
            });
        }
        if k > n {
            return Err(Error::RankExceedsDimension { rank: k, dim: n });
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let point = BundlePoint { matrix, spectrum };
        let residual = point.fiber_residual();
        if residual > tol.tol_fiber {
            return Err(Error::NotInFiber { residual });
        }
        Ok(point)
    }

    pub(crate) fn from_trusted(matrix: CMat, spectrum: Spectrum) -> Self {
        BundlePoint { matrix, spectrum }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.ncols()
    }

    /// `‖Ψ†Ψ − P(σ)‖_F`
    pub fn fiber_residual(&self) -> f64 {
        (self.matrix.adjoint() * &self.matrix - self.spectrum.p_matrix()).norm()
    }

    /// The bundle projection `π(Ψ) = ΨΨ†`.
    pub fn project(&self) -> DensityOperator {
        DensityOperator::from_trusted(&self.matrix * self.matrix.adjoint())
    }

    /// Right action `Ψ ↦ ΨU` of a gauge group element.
    pub fn gauge_transform(&self, u: &CMat, tol: &Tolerances) -> Result<Self> {
        check_gauge_unitary(u, &self.spectrum, tol)?;
        Ok(BundlePoint {
            matrix: &self.matrix * u,
            spectrum: self.spectrum.clone(),
        })
    }

    /// Left action `Ψ ↦ WΨ` of a unitary on the Hilbert space.
    pub fn left_multiply(&self, w: &CMat) -> Self {
        BundlePoint {
            matrix: w * &self.matrix,
            spectrum: self.spectrum.clone(),
        }
    }
}

/// Checks `U ∈ U(σ)`: unitary and commuting with `P(σ)`.
pub fn check_gauge_unitary(u: &CMat, spectrum: &Spectrum, tol: &Tolerances) -> Result<()> {
    let k = spectrum.rank();
    linalg::check_shape(u, (k, k))?;
    let unitarity = linalg::unitarity_residual(u);
    let p = spectrum.p_matrix();
    let commutator = linalg::commutator(u, &p).norm();
    if unitarity > tol.tol_fiber || commutator > tol.tol_comm {
        return Err(Error::NotGaugeElement {
            antihermitian: unitarity,
            commutator,
        });
    }
    Ok(())
}

/// A tangent vector `X` at a bundle point: `Ψ†X + X†Ψ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    matrix: CMat,
}

impl TangentVector {
    /// Checks tangency at `psi`, relative to `max(1, ‖X‖_F)`.
    pub fn new(psi: &BundlePoint, matrix: CMat, tol: &Tolerances) -> Result<Self> {
        linalg::check_shape(&matrix, psi.matrix().shape())?;
        let residual = tangency_residual(psi, &matrix);
        if residual > tol.tol_fiber * matrix.norm().max(1.0) {
            return Err(Error::NotInFiber { residual });
        }
        Ok(TangentVector { matrix })
    }

    pub fn from_matrix_unchecked(matrix: CMat) -> Self {
        TangentVector { matrix }
    }

    pub fn zero(psi: &BundlePoint) -> Self {
        TangentVector {
            matrix: CMat::zeros(psi.dim(), psi.rank()),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        TangentVector {
            matrix: self.matrix.scale(s),
        }
    }

    /// Multiplication by `i`, which maps tangents at `Ψ` to tangents at `Ψ`
    /// only in special cases; used for symplectic/metric compatibility checks.
    pub fn times_i(&self) -> Self {
        TangentVector {
            matrix: &self.matrix * linalg::I,
        }
    }
}

impl std::ops::Add for &TangentVector {
    type Output = TangentVector;
    fn add(self, rhs: &TangentVector) -> TangentVector {
        TangentVector {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, rhs: &TangentVector) -> TangentVector {
        TangentVector {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// `‖Ψ†X + X†Ψ‖_F`
pub fn tangency_residual(psi: &BundlePoint, x: &CMat) -> f64 {
    let m = psi.matrix().adjoint() * x;
    (&m + m.adjoint()).norm()
}

/// An element `ξ` of the gauge algebra `u(σ)`: anti-Hermitian and commuting
/// with `P(σ)`, i.e. block diagonal in the multiplicity blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    matrix: CMat,
}

impl GaugeElement {
    /// Both checks are relative to `max(1, ‖ξ‖_F)`.
    pub fn new(matrix: CMat, spectrum: &Spectrum, tol: &Tolerances) -> Result<Self> {
        let k = spectrum.rank();
        linalg::check_shape(&matrix, (k, k))?;
        let scale = matrix.norm().max(1.0);
        let antihermitian = linalg::antihermitian_residual(&matrix);
        let commutator = linalg::commutator(&matrix, &spectrum.p_matrix()).norm();
        if antihermitian > tol.tol_herm * scale || commutator > tol.tol_comm * scale {
            return Err(Error::NotGaugeElement {
                antihermitian,
                commutator,
            });
        }
        Ok(GaugeElement { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMat) -> Self {
        GaugeElement { matrix }
    }

    /// Orthogonal projection of an arbitrary `k×k` matrix onto `u(σ)`:
    /// anti-Hermitian part, then block-diagonal part.
    pub fn project(m: &CMat, spectrum: &Spectrum) -> Self {
        GaugeElement {
            matrix: spectrum.block_diagonal_part(&linalg::antihermitian_part(m)),
        }
    }

    pub fn zero(k: usize) -> Self {
        GaugeElement {
            matrix: CMat::zeros(k, k),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// `UξU†`
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        GaugeElement {
            matrix: u * &self.matrix * u.adjoint(),
        }
    }

    /// `exp(ξ)`, an element of `U(σ)`.
    pub fn exp(&self) -> CMat {
        linalg::unitary_from_hermitian(&(&self.matrix * linalg::I), 1.0)
    }
}

/// The purification `Ψ = V·diag(√p_1, …, √p_k)` whose columns are the
/// eigenvectors of `ρ` ordered like `σ`.
///
/// Within a degenerate block the eigenvector basis is whatever the
/// eigensolver returns; any other choice differs by an element of `U(σ)`,
/// and gauge-invariant quantities do not depend on it.
pub fn standard_purification(rho: &DensityOperator, tol: &Tolerances) -> BundlePoint {
    let spectrum = spectrum_of(rho, tol);
    let (_, vectors) = linalg::eigh_descending(rho.matrix());
    let k = spectrum.rank();
    let mut psi = vectors.columns(0, k).into_owned();
    for (j, p) in spectrum.values().iter().enumerate() {
        psi.column_mut(j).scale_mut(p.sqrt());
    }
    BundlePoint::from_trusted(psi, spectrum)
}

/// Projects an arbitrary `n×k` matrix onto the tangent space at `Ψ`:
/// `X = M − Ψ P(σ)^{-1} H` with `H = (Ψ†M + M†Ψ)/2`.
pub fn project_to_fiber_tangent(psi: &BundlePoint, m: &CMat) -> Result<TangentVector> {
    linalg::check_shape(m, psi.matrix().shape())?;
    let h = linalg::hermitian_part(&(psi.matrix().adjoint() * m));
    let correction = psi.matrix() * psi.spectrum().p_inverse() * h;
    Ok(TangentVector {
        matrix: m - correction,
    })
}

/// Matrix exponential of an anti-Hermitian matrix; see
/// [`linalg::expm_antihermitian`].
pub fn expm_antihermitian(a: &CMat, tol: &Tolerances) -> Result<CMat> {
    linalg::expm_antihermitian(a, tol.tol_herm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let rho = validate_density(&linalg::identity(2).scale(0.5), &tol()).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);
        let s = spectrum_of(&rho, &tol());
        assert_eq!(s.multiplicities(), &[2]);
    }

    #[test]
    fn pure_state_has_rank_one() {
        let rho = validate_density(&linalg::diag_real(&[1.0, 0.0]), &tol()).unwrap();
        let s = spectrum_of(&rho, &tol());
        assert_eq!(s.rank(), 1);
        assert_eq!(s.values(), &[1.0]);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = linalg::diag_real(&[0.6, 0.6, -0.2]);
        match validate_density(&m, &tol()) {
            Err(Error::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.2).abs() < 1e-12)
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_bad_trace_are_rejected() {
        let mut m = linalg::diag_real(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            validate_density(&m, &tol()),
            Err(Error::NotHermitian { .. })
        ));
        let m = linalg::diag_real(&[0.5, 0.6]);
        assert!(matches!(
            validate_density(&m, &tol()),
            Err(Error::TraceNotOne { .. })
        ));
        let m = CMat::zeros(2, 3);
        assert!(matches!(
            validate_density(&m, &tol()),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn validation_returns_hermitian_part() {
        let mut m = linalg::diag_real(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 1e-12);
        m[(1, 0)] = c(0.1, 0.0);
        let rho = validate_density(&m, &tol()).unwrap();
        assert_eq!(linalg::hermitian_residual(rho.matrix()), 0.0);
    }

    #[test]
    fn diagonal_spectrum() {
        let rho = validate_density(&linalg::diag_real(&[0.5, 0.3, 0.2]), &tol()).unwrap();
        let s = spectrum_of(&rho, &tol());
        assert_eq!(s.multiplicities(), &[1, 1, 1]);
        for (a, b) in s.values().iter().zip([0.5, 0.3, 0.2]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn full_degeneracy() {
        let rho = validate_density(&linalg::identity(3).scale(1.0 / 3.0), &tol()).unwrap();
        let s = spectrum_of(&rho, &tol());
        assert_eq!(s.multiplicities(), &[3]);
        assert!(s.values().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn spectrum_clustering_uses_threshold() {
        let t = tol();
        let s = Spectrum::new(vec![0.3, 0.3 - 5e-9, 0.2 + 5e-9, 0.2], &t).unwrap();
        assert_eq!(s.multiplicities(), &[2, 2]);
        assert_eq!(s.values()[0], s.values()[1]);
        let s = Spectrum::new(vec![0.3, 0.3 - 1e-6, 0.2 + 1e-6, 0.2], &t).unwrap();
        assert_eq!(s.multiplicities(), &[1, 1, 1, 1]);
        assert_eq!(s.distinct().len(), 4);
    }

    #[test]
    fn spectrum_rejects_bad_lists() {
        let t = tol();
        assert!(Spectrum::new(vec![], &t).is_err());
        assert!(Spectrum::new(vec![0.3, 0.7], &t).is_err());
        assert!(Spectrum::new(vec![1.2, -0.2], &t).is_err());
        assert!(matches!(
            Spectrum::new(vec![0.5, 0.4], &t),
            Err(Error::TraceNotOne { .. })
        ));
        let bad = Tolerances {
            tol_psd: 0.0,
            ..Tolerances::default()
        };
        assert!(matches!(
            Spectrum::new(vec![1.0], &bad),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn diagonal_purification() {
        let rho = validate_density(&linalg::diag_real(&[0.5, 0.5]), &tol()).unwrap();
        let psi = standard_purification(&rho, &tol());
        assert!(psi.fiber_residual() < 1e-15);
        assert!((psi.project().matrix() - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn pure_purification_is_the_state_vector() {
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let ket = CMat::from_column_slice(2, 1, &v);
        let rho = validate_density(&(&ket * ket.adjoint()), &tol()).unwrap();
        let psi = standard_purification(&rho, &tol());
        assert_eq!(psi.rank(), 1);
        let overlap = (ket.adjoint() * psi.matrix())[(0, 0)];
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bundle_point_rejects_off_fiber_and_excess_rank() {
        let t = tol();
        let s = Spectrum::new(vec![0.5, 0.5], &t).unwrap();
        assert!(matches!(
            BundlePoint::new(linalg::identity(2), s.clone(), &t),
            Err(Error::NotInFiber { .. })
        ));
        let s3 = Spectrum::new(vec![0.5, 0.3, 0.2], &t).unwrap();
        assert!(matches!(
            BundlePoint::new(CMat::zeros(2, 3), s3, &t),
            Err(Error::RankExceedsDimension { rank: 3, dim: 2 })
        ));
        assert!(BundlePoint::new(linalg::identity(2).scale(0.5f64.sqrt()), s, &t).is_ok());
    }

    #[test]
    fn vertical_vector_is_already_tangent() {
        let t = tol();
        let s = Spectrum::new(vec![0.7, 0.3], &t).unwrap();
        let psi = BundlePoint::new(linalg::diag_real(&[0.7f64.sqrt(), 0.3f64.sqrt()]), s, &t)
            .unwrap();
        let mut xi = CMat::zeros(2, 2);
        xi[(0, 0)] = c(0.0, 0.3);
        xi[(1, 1)] = c(0.0, -1.1);
        let m = psi.matrix() * &xi;
        let x = project_to_fiber_tangent(&psi, &m).unwrap();
        assert!((x.matrix() - &m).norm() < 1e-15);
    }

    #[test]
    fn radial_direction_is_removed_for_pure_states() {
        let t = tol();
        let s = Spectrum::new(vec![1.0], &t).unwrap();
        let psi = BundlePoint::new(CMat::from_column_slice(2, 1, &[c(0.6, 0.0), c(0.0, 0.8)]), s, &t)
            .unwrap();
        let x = project_to_fiber_tangent(&psi, psi.matrix()).unwrap();
        assert!(x.matrix().norm() < 1e-15);
    }

    #[test]
    fn gauge_element_checks() {
        let t = tol();
        let s = Spectrum::new(vec![0.6, 0.4], &t).unwrap();
        let mut off = CMat::zeros(2, 2);
        off[(0, 1)] = real(1.0);
        off[(1, 0)] = real(-1.0);
        assert!(GaugeElement::new(off.clone(), &s, &t).is_err());
        let degenerate = Spectrum::new(vec![0.5, 0.5], &t).unwrap();
        assert!(GaugeElement::new(off, &degenerate, &t).is_ok());
        assert!(GaugeElement::new(linalg::identity(2), &degenerate, &t).is_err());
    }
}
