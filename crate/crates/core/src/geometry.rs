//! Metric, symplectic form and mechanical connection on the purification
//! bundle `S(σ)`.
//!
//! The metric and symplectic form are `2ħ` times the real and imaginary
//! parts of the Hilbert–Schmidt product:
//!
//! ```text
//! G(X, Y) = ħ Tr(X†Y + Y†X)        Ω(X, Y) = −iħ Tr(X†Y − Y†X)
//! ```
//!
//! The mechanical connection is `A_Ψ = I_Ψ⁻¹ J_Ψ` where the moment of inertia
//! `I_Ψ ξ·η = G(Ψξ, Ψη)` and the moment map `J_Ψ(X)·ξ = G(X, Ψξ)` both take
//! values in the dual of the gauge algebra. The inertia does not depend on
//! `Ψ`, which gives the closed form
//!
//! ```text
//! A_Ψ(X) = Σ_j E_j Ψ†X E_j P(σ)⁻¹
//! ```
//!
//! with `E_j` the projector onto the `j`-th multiplicity block. Vertical and
//! horizontal parts of a tangent are `X⊥ = Ψ A_Ψ(X)` and `X‖ = X − X⊥`.
//!
//! The inertia is implemented as `G(Ψξ, Ψη) = ħ Tr((ξ†η + η†ξ)P(σ))`, keeping
//! `ħ` symbolic; the frequently quoted prefactor `1/2` is the `ħ = 1/2`
//! specialization, which is also the library default ([`DEFAULT_HBAR`]).
//! The connection itself is independent of `ħ`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{BundlePoint, GaugeElement, Spectrum, TangentVector, Tolerances};

pub const DEFAULT_HBAR: f64 = 0.5;

/// Smallest eigenvalue accepted by default; `P(σ)⁻¹` amplifies noise below it.
pub const DEFAULT_MIN_EIGENVALUE: f64 = 1e-8;

/// A linear functional on `u(σ)` represented by its Riesz matrix `R`,
/// acting as `ξ ↦ Re Tr(R†ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovectorOnGauge {
    riesz: CMat,
}

impl CovectorOnGauge {
    pub fn riesz(&self) -> &CMat {
        &self.riesz
    }

    pub fn pair(&self, xi: &GaugeElement) -> f64 {
        linalg::real_inner(&self.riesz, xi.matrix())
    }
}

#[derive(Clone, Debug)]
pub struct GeometryContext {
    hbar: f64,
    spectrum: Spectrum,
    tol: Tolerances,
}

impl GeometryContext {
    pub fn new(spectrum: Spectrum, hbar: f64) -> Result<Self> {
        Self::with_options(spectrum, hbar, DEFAULT_MIN_EIGENVALUE, Tolerances::default())
    }

    pub fn with_options(
        spectrum: Spectrum,
        hbar: f64,
        min_eigenvalue: f64,
        tol: Tolerances,
    ) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidConfig(format!("hbar must be positive, got {hbar}")));
        }
        tol.validate()?;
        if spectrum.min() < min_eigenvalue {
            return Err(Error::IllConditionedSpectrum {
                min_eigenvalue: spectrum.min(),
                floor: min_eigenvalue,
            });
        }
        Ok(GeometryContext {
            hbar,
            spectrum,
            tol,
        })
    }

    /// Same spectrum and tolerances with a different `ħ`.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::with_options(self.spectrum.clone(), hbar, 0.0, self.tol)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The block projectors `E_1, …, E_l`.
    pub fn block_projectors(&self) -> Vec<CMat> {
        let k = self.spectrum.rank();
        self.spectrum
            .block_ranges()
            .map(|r| {
                let mut e = CMat::zeros(k, k);
                for i in r {
                    e[(i, i)] = linalg::real(1.0);
                }
                e
            })
            .collect()
    }

    fn same_shape(&self, x: &CMat, y: &CMat) -> Result<()> {
        linalg::check_shape(y, x.shape())?;
        if x.ncols() != self.spectrum.rank() {
            return Err(Error::ShapeMismatch {
                expected: (x.nrows(), self.spectrum.rank()),
                found: x.shape(),
            });
        }
        Ok(())
    }

    fn check_point(&self, psi: &BundlePoint) -> Result<()> {
        if !psi
            .spectrum()
            .approx_eq(&self.spectrum, self.tol.tol_degeneracy)
        {
            return Err(Error::InvalidSpectrum(format!(
                "bundle point spectrum {:?} differs from context spectrum {:?}",
                psi.spectrum().values(),
                self.spectrum.values()
            )));
        }
        Ok(())
    }

    /// `G(X, Y) = ħ Tr(X†Y + Y†X)`
    pub fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_shape(x.matrix(), y.matrix())?;
        Ok(2.0 * self.hbar * linalg::real_inner(x.matrix(), y.matrix()))
    }

    /// `Ω(X, Y) = −iħ Tr(X†Y − Y†X)`
    pub fn symplectic(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_shape(x.matrix(), y.matrix())?;
        Ok(2.0 * self.hbar * linalg::imag_inner(x.matrix(), y.matrix()))
    }

    /// `I ξ·η = ħ Tr((ξ†η + η†ξ)P(σ))`, the same for every `Ψ` in the bundle.
    pub fn moment_of_inertia(&self, xi: &GaugeElement, eta: &GaugeElement) -> Result<f64> {
        let k = self.spectrum.rank();
        linalg::check_shape(xi.matrix(), (k, k))?;
        linalg::check_shape(eta.matrix(), (k, k))?;
        let eta_p = eta.matrix() * self.spectrum.p_matrix();
        Ok(2.0 * self.hbar * linalg::real_inner(xi.matrix(), &eta_p))
    }

    /// `I ξ` as a covector; its Riesz matrix is `2ħ ξ P(σ)`.
    pub fn inertia_covector(&self, xi: &GaugeElement) -> CovectorOnGauge {
        CovectorOnGauge {
            riesz: (xi.matrix() * self.spectrum.p_matrix()).scale(2.0 * self.hbar),
        }
    }

    /// `I⁻¹`: the gauge element whose inertia covector is `c`.
    pub fn inverse_inertia(&self, c: &CovectorOnGauge) -> GaugeElement {
        let xi = (c.riesz() * self.spectrum.p_inverse()).scale(0.5 / self.hbar);
        GaugeElement::project(&xi, &self.spectrum)
    }

    /// `J_Ψ(X)·ξ = G(X, Ψξ)`; the Riesz matrix is `2ħ` times the `u(σ)`
    /// part of `Ψ†X`.
    pub fn moment_map(&self, psi: &BundlePoint, x: &TangentVector) -> Result<CovectorOnGauge> {
        self.check_point(psi)?;
        self.same_shape(psi.matrix(), x.matrix())?;
        let projected = GaugeElement::project(&(psi.matrix().adjoint() * x.matrix()), &self.spectrum);
        Ok(CovectorOnGauge {
            riesz: projected.into_matrix().scale(2.0 * self.hbar),
        })
    }

    /// `Σ_j E_j Ψ†X E_j P(σ)⁻¹` without validating the input or the output.
    ///
    /// For a tangent `X` this is the connection form; for other matrices
    /// (finite-difference chords, say) it is still well defined and is what
    /// residual diagnostics use.
    pub fn connection_form_raw(&self, psi: &CMat, x: &CMat) -> CMat {
        self.spectrum.block_diagonal_part(&(psi.adjoint() * x)) * self.spectrum.p_inverse()
    }

    /// The mechanical connection form `A_Ψ(X)`.
    ///
    /// Fails with [`Error::NotGaugeElement`] when the result is not in
    /// `u(σ)`, which happens when `X` is not (numerically) tangent.
    pub fn connection_form(&self, psi: &BundlePoint, x: &TangentVector) -> Result<GaugeElement> {
        self.check_point(psi)?;
        self.same_shape(psi.matrix(), x.matrix())?;
        let a = self.connection_form_raw(psi.matrix(), x.matrix());
        let scale = x.matrix().norm().max(1.0) / self.spectrum.min();
        let antihermitian = linalg::antihermitian_residual(&a);
        if antihermitian > self.tol.tol_herm * scale {
            return Err(Error::NotGaugeElement {
                antihermitian,
                commutator: 0.0,
            });
        }
        Ok(GaugeElement::from_trusted(a))
    }

    /// `X⊥ = Ψ A_Ψ(X)`
    pub fn vertical_projection(&self, psi: &BundlePoint, x: &TangentVector) -> Result<TangentVector> {
        let a = self.connection_form(psi, x)?;
        Ok(infinitesimal_generator(psi, &a))
    }

    /// `X‖ = X − Ψ A_Ψ(X)`
    pub fn horizontal_projection(
        &self,
        psi: &BundlePoint,
        x: &TangentVector,
    ) -> Result<TangentVector> {
        let v = self.vertical_projection(psi, x)?;
        Ok(x - &v)
    }
}

/// The fundamental vector field `ξ ↦ Ψξ`.
pub fn infinitesimal_generator(psi: &BundlePoint, xi: &GaugeElement) -> TangentVector {
    TangentVector::from_matrix_unchecked(psi.matrix() * xi.matrix())
}
