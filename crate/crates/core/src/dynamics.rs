//! Unitary evolution, horizontal lifts and the operational geometric phase.
//!
//! A Hamiltonian path generates the von Neumann flow `iħρ̇ = [H, ρ]` and,
//! upstairs, the raw lift `Ψ(t) = U(t)Ψ0`. The horizontal lift extending
//! from `Ψ0` is `Ψ‖(t) = Ψ(t)V(t)` where `V(t) ∈ U(σ)` is the positive
//! time-ordered exponential of `−∫A_Ψ(Ψ̇) dt`.
//!
//! # Time ordering
//!
//! `V` is defined as the solution of
//!
//! ```text
//! V̇ = −A_Ψ(Ψ̇) V,    V(t0) = 1,
//! ```
//!
//! so factors belonging to later times multiply on the left. This ordering
//! is forced by horizontality. The connection transforms under a
//! time-dependent gauge change as
//!
//! ```text
//! A_{ΨV}(XV + ΨV̇) = V†A_Ψ(X)V + V†V̇ = V†(A_Ψ(X) + V̇V†)V,
//! ```
//!
//! using `A_{ΨV}(XV) = V†A_Ψ(X)V` and `A_{ΨV}(ΨV·V†V̇) = V†V̇`. With
//! `Ψ̇‖ = Ψ̇V + ΨV̇` the bracket vanishes exactly when `V̇V† = −A_Ψ(Ψ̇)`.
//!
//! # Integrator
//!
//! On each grid interval the raw lift moves under a constant Hamiltonian, so
//! `Ψ(t)†Ψ̇(t) = −(i/ħ)Ψ(t_i)†H_iΨ(t_i)` and the connection is constant
//! along the interval. The step `V(t_{i+1}) = exp(−A_iΔt_i)V(t_i)`, with
//! `A_i` sampled at the interval midpoint, is then exact; each factor is in
//! `U(σ)` by construction.
//!
//! Horizontality is diagnosed with the forward-difference residual
//! `‖A_{Ψ‖(t_i)}(Ψ‖(t_{i+1}) − Ψ‖(t_i))‖_F / Δt_i`, which is first order in
//! the step size for a horizontal curve.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryContext;
use crate::linalg::{self, CMat};
use crate::operator::{
    spectrum_of, standard_purification, BundlePoint, DensityOperator, GaugeElement, Spectrum,
    Tolerances,
};

/// Residuals below this are treated as exact zeros by the refinement probe.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

/// Phase is undefined when `|Tr(Ψ0†Ψ‖)|` falls below this.
pub const PHASE_MODULUS_FLOOR: f64 = 1e-12;

/// Strictly increasing time samples `t_0 < … < t_N`, `N ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid("at least two time samples are required".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite time sample".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid(times))
    }

    /// `steps` equal intervals on `[t0, t1]`.
    pub fn uniform(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be positive".into()));
        }
        if !(t1 > t0) {
            return Err(Error::InvalidGrid(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        let dt = (t1 - t0) / steps as f64;
        let mut times: Vec<f64> = (0..steps).map(|i| t0 + i as f64 * dt).collect();
        times.push(t1);
        Self::new(times)
    }

    /// Every interval split in two.
    pub fn bisected(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.0.len() - 1);
        for w in self.0.windows(2) {
            times.push(w[0]);
            times.push(0.5 * (w[0] + w[1]));
        }
        times.push(self.end());
        TimeGrid(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn start(&self) -> f64 {
        self.0[0]
    }

    pub fn end(&self) -> f64 {
        *self.0.last().expect("grid has at least two samples")
    }

    pub fn intervals(&self) -> usize {
        self.0.len() - 1
    }

    pub fn step(&self, i: usize) -> f64 {
        self.0[i + 1] - self.0[i]
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        0.5 * (self.0[i] + self.0[i + 1])
    }
}

/// A Hamiltonian that is constant, or piecewise constant on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianPath {
    Constant(CMat),
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        hamiltonians: Vec<CMat>,
    },
}

fn validated_hamiltonian(h: &CMat, tol: &Tolerances) -> Result<CMat> {
    linalg::check_square(h)?;
    if !linalg::is_finite(h) {
        return Err(Error::NonFinite);
    }
    let residual = linalg::hermitian_residual(h);
    if residual > tol.tol_herm * h.norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(linalg::hermitian_part(h))
}

impl HamiltonianPath {
    pub fn constant(h: &CMat, tol: &Tolerances) -> Result<Self> {
        Ok(HamiltonianPath::Constant(validated_hamiltonian(h, tol)?))
    }

    pub fn zero(n: usize) -> Self {
        HamiltonianPath::Constant(CMat::zeros(n, n))
    }

    pub fn piecewise(breakpoints: Vec<f64>, hamiltonians: &[CMat], tol: &Tolerances) -> Result<Self> {
        let grid = TimeGrid::new(breakpoints)?;
        if grid.intervals() != hamiltonians.len() {
            return Err(Error::InvalidGrid(format!(
                "{} breakpoints need {} Hamiltonians, got {}",
                grid.times().len(),
                grid.intervals(),
                hamiltonians.len()
            )));
        }
        let hams = hamiltonians
            .iter()
            .map(|h| validated_hamiltonian(h, tol))
            .collect::<Result<Vec<_>>>()?;
        let n = hams[0].nrows();
        if let Some(h) = hams.iter().find(|h| h.nrows() != n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                found: h.shape(),
            });
        }
        Ok(HamiltonianPath::PiecewiseConstant {
            breakpoints: grid.0,
            hamiltonians: hams,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            HamiltonianPath::Constant(h) => h.nrows(),
            HamiltonianPath::PiecewiseConstant { hamiltonians, .. } => hamiltonians[0].nrows(),
        }
    }

    /// The Hamiltonian in force at time `t` (the left-closed interval wins
    /// at a breakpoint, the last interval includes its right end).
    pub fn at(&self, t: f64) -> Result<&CMat> {
        match self {
            HamiltonianPath::Constant(h) => Ok(h),
            HamiltonianPath::PiecewiseConstant {
                breakpoints,
                hamiltonians,
            } => {
                let (first, last) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
                if t < first || t > last {
                    return Err(Error::InvalidGrid(format!(
                        "time {t} outside Hamiltonian support [{first}, {last}]"
                    )));
                }
                let idx = breakpoints.partition_point(|&b| b <= t).saturating_sub(1);
                Ok(&hamiltonians[idx.min(hamiltonians.len() - 1)])
            }
        }
    }

    /// Hamiltonian of each interval of `grid`. The grid must refine the
    /// path's breakpoints inside its span.
    pub fn on_grid(&self, grid: &TimeGrid) -> Result<Vec<&CMat>> {
        if let HamiltonianPath::PiecewiseConstant { breakpoints, .. } = self {
            let slack = 1e-12 * (grid.end() - grid.start()).abs().max(1.0);
            if grid.start() < breakpoints[0] - slack
                || grid.end() > breakpoints[breakpoints.len() - 1] + slack
            {
                return Err(Error::InvalidGrid(format!(
                    "grid [{}, {}] leaves the Hamiltonian support [{}, {}]",
                    grid.start(),
                    grid.end(),
                    breakpoints[0],
                    breakpoints[breakpoints.len() - 1]
                )));
            }
            for &b in breakpoints {
                let t = grid.times();
                let idx = t.partition_point(|&x| x <= b);
                if idx > 0 && idx < t.len() {
                    let (lo, hi) = (t[idx - 1], t[idx]);
                    if b - lo > slack && hi - b > slack {
                        return Err(Error::InvalidGrid(format!(
                            "Hamiltonian breakpoint {b} falls inside grid interval [{lo}, {hi}]"
                        )));
                    }
                }
            }
        }
        (0..grid.intervals())
            .map(|i| self.at(grid.midpoint(i).clamp(grid.start(), grid.end())))
            .collect()
    }

    /// `H(t) ↦ W H(t) W†`
    pub fn conjugated(&self, w: &CMat) -> Self {
        let conj = |h: &CMat| linalg::hermitian_part(&(w * h * w.adjoint()));
        match self {
            HamiltonianPath::Constant(h) => HamiltonianPath::Constant(conj(h)),
            HamiltonianPath::PiecewiseConstant {
                breakpoints,
                hamiltonians,
            } => HamiltonianPath::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                hamiltonians: hamiltonians.iter().map(conj).collect(),
            },
        }
    }

    /// `H(t) ↦ H(t) + c·1`
    pub fn shifted(&self, c: f64) -> Self {
        let shift = |h: &CMat| h + linalg::identity(h.nrows()).scale(c);
        match self {
            HamiltonianPath::Constant(h) => HamiltonianPath::Constant(shift(h)),
            HamiltonianPath::PiecewiseConstant {
                breakpoints,
                hamiltonians,
            } => HamiltonianPath::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                hamiltonians: hamiltonians.iter().map(shift).collect(),
            },
        }
    }

    /// `H(t) ↦ −H(t)` on the reversed time axis, mapping `[t0, t1]` onto
    /// itself. Used to run a path backwards.
    pub fn time_reversed(&self, t0: f64, t1: f64) -> Self {
        match self {
            HamiltonianPath::Constant(h) => HamiltonianPath::Constant(-h),
            HamiltonianPath::PiecewiseConstant {
                breakpoints,
                hamiltonians,
            } => HamiltonianPath::PiecewiseConstant {
                breakpoints: breakpoints.iter().rev().map(|b| t0 + t1 - b).collect(),
                hamiltonians: hamiltonians.iter().rev().map(|h| -h).collect(),
            },
        }
    }
}

/// `exp(−i H Δt/ħ)` for each interval, reusing the previous factor when the
/// Hamiltonian and step are unchanged.
fn step_unitaries(h: &[&CMat], grid: &TimeGrid, hbar: f64) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::with_capacity(h.len());
    for (i, hi) in h.iter().enumerate() {
        let dt = grid.step(i);
        if i > 0 && std::ptr::eq(h[i - 1], *hi) && grid.step(i - 1) == dt {
            let prev = out[i - 1].clone();
            out.push(prev);
        } else {
            out.push(linalg::unitary_from_hermitian(hi, dt / hbar));
        }
    }
    out
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidConfig(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// Solves `iħρ̇ = [H, ρ]` on `grid` by exact unitary conjugation. Inside a
/// constant piece every sample is one conjugation of the state at the start
/// of the piece, so round-off grows with the number of pieces rather than
/// the number of steps. The first entry is `ρ0`.
pub fn propagate_von_neumann(
    h: &HamiltonianPath,
    rho0: &DensityOperator,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<Vec<DensityOperator>> {
    check_hbar(hbar)?;
    if h.dim() != rho0.dim() {
        return Err(Error::ShapeMismatch {
            expected: (rho0.dim(), rho0.dim()),
            found: (h.dim(), h.dim()),
        });
    }
    let hams = h.on_grid(grid)?;
    let t = grid.times();
    let mut states = Vec::with_capacity(t.len());
    states.push(rho0.clone());
    let mut anchor = 0;
    for (i, hi) in hams.iter().enumerate() {
        if i > 0 && !std::ptr::eq(hams[i - 1], *hi) {
            anchor = i;
        }
        let u = linalg::unitary_from_hermitian(hi, (t[i + 1] - t[anchor]) / hbar);
        let next = states[anchor].conjugate_by(&u);
        states.push(next);
    }
    Ok(states)
}

/// A lift `Ψ(t)` of a state curve together with gauge factors `V(t)`; the
/// curve `Ψ(t)V(t)` is the horizontal lift once [`horizontalize`] has run.
#[derive(Clone, Debug)]
pub struct LiftedTrajectory {
    grid: TimeGrid,
    points: Vec<CMat>,
    gauge_factors: Vec<CMat>,
    generators: Vec<CMat>,
    spectrum: Spectrum,
    hbar: f64,
}

impl LiftedTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The raw lift `Ψ(t_i)`.
    pub fn point(&self, i: usize) -> BundlePoint {
        BundlePoint::from_trusted(self.points[i].clone(), self.spectrum.clone())
    }

    pub fn raw_points(&self) -> &[CMat] {
        &self.points
    }

    /// `V(t_i)`
    pub fn gauge_factor(&self, i: usize) -> &CMat {
        &self.gauge_factors[i]
    }

    pub fn gauge_factors(&self) -> &[CMat] {
        &self.gauge_factors
    }

    /// The Hamiltonian acting on interval `i`.
    pub fn generator(&self, i: usize) -> &CMat {
        &self.generators[i]
    }

    /// `Ψ‖(t_i) = Ψ(t_i)V(t_i)`
    pub fn horizontal_matrix(&self, i: usize) -> CMat {
        &self.points[i] * &self.gauge_factors[i]
    }

    pub fn horizontal_point(&self, i: usize) -> BundlePoint {
        BundlePoint::from_trusted(self.horizontal_matrix(i), self.spectrum.clone())
    }

    /// `π(Ψ(t_i))` for every sample.
    pub fn densities(&self) -> Vec<DensityOperator> {
        (0..self.len()).map(|i| self.point(i).project()).collect()
    }

    /// Raw lift and its velocity `−(i/ħ)HΨ` at the midpoint of interval `i`.
    pub fn midpoint_velocity(&self, i: usize) -> (BundlePoint, CMat) {
        let h = &self.generators[i];
        let half = linalg::unitary_from_hermitian(h, 0.5 * self.grid.step(i) / self.hbar);
        let psi_mid = half * &self.points[i];
        let velocity = (h * &psi_mid) * Complex64::new(0.0, -1.0 / self.hbar);
        (
            BundlePoint::from_trusted(psi_mid, self.spectrum.clone()),
            velocity,
        )
    }

    /// Forward-difference horizontality residual for each interval.
    pub fn horizontality_residuals(&self, ctx: &GeometryContext) -> Vec<f64> {
        self.residuals_with_stride(ctx, 1)
    }

    fn residuals_with_stride(&self, ctx: &GeometryContext, stride: usize) -> Vec<f64> {
        let horizontal: Vec<CMat> = (0..self.len()).map(|i| self.horizontal_matrix(i)).collect();
        let t = self.grid.times();
        (0..self.len().saturating_sub(stride))
            .step_by(stride)
            .map(|i| {
                let chord = &horizontal[i + stride] - &horizontal[i];
                ctx.connection_form_raw(&horizontal[i], &chord).norm() / (t[i + stride] - t[i])
            })
            .collect()
    }

    /// Largest `‖Ψ(t)†Ψ(t) − P(σ)‖` and `‖Ψ‖(t)†Ψ‖(t) − P(σ)‖` over the samples.
    pub fn max_fiber_residuals(&self) -> (f64, f64) {
        let p = self.spectrum.p_matrix();
        let mut raw: f64 = 0.0;
        let mut horizontal: f64 = 0.0;
        for i in 0..self.len() {
            raw = raw.max((self.points[i].adjoint() * &self.points[i] - &p).norm());
            let h = self.horizontal_matrix(i);
            horizontal = horizontal.max((h.adjoint() * &h - &p).norm());
        }
        (raw, horizontal)
    }

    /// Largest `‖V(t)†V(t) − 1‖`.
    pub fn max_gauge_unitarity_residual(&self) -> f64 {
        self.gauge_factors
            .iter()
            .map(linalg::unitarity_residual)
            .fold(0.0, f64::max)
    }
}

/// The raw lift `Ψ(t_{i+1}) = U_iΨ(t_i)` with `V ≡ 1`.
pub fn lift_unitary_curve(
    h: &HamiltonianPath,
    psi0: &BundlePoint,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<LiftedTrajectory> {
    check_hbar(hbar)?;
    if h.dim() != psi0.dim() {
        return Err(Error::ShapeMismatch {
            expected: (psi0.dim(), psi0.dim()),
            found: (h.dim(), h.dim()),
        });
    }
    let hams = h.on_grid(grid)?;
    let unitaries = step_unitaries(&hams, grid, hbar);
    let mut points = Vec::with_capacity(grid.times().len());
    points.push(psi0.matrix().clone());
    for u in &unitaries {
        let next = u * points.last().expect("nonempty");
        points.push(next);
    }
    let k = psi0.rank();
    Ok(LiftedTrajectory {
        grid: grid.clone(),
        gauge_factors: vec![linalg::identity(k); points.len()],
        points,
        generators: hams.into_iter().cloned().collect(),
        spectrum: psi0.spectrum().clone(),
        hbar,
    })
}

/// `exp(−A τ)` for `A ∈ u(σ)`, computed block by block so the result is
/// exactly block diagonal.
fn gauge_exp(a: &CMat, spectrum: &Spectrum, tau: f64) -> CMat {
    let k = spectrum.rank();
    let mut out = CMat::zeros(k, k);
    for r in spectrum.block_ranges() {
        let len = r.len();
        let block = a.view((r.start, r.start), (len, len)).into_owned();
        // A = −iK with K = iA Hermitian, so exp(−Aτ) = exp(iKτ).
        let k_block = block * linalg::I;
        let e = linalg::unitary_from_hermitian(&k_block, -tau);
        out.view_mut((r.start, r.start), (len, len)).copy_from(&e);
    }
    out
}

/// Fills the gauge factors so that `Ψ(t)V(t)` is horizontal.
///
/// Fails with [`Error::GridTooCoarse`] when the horizontality residual does
/// not shrink between the every-other-node grid and the full grid.
pub fn horizontalize(traj: &LiftedTrajectory, ctx: &GeometryContext) -> Result<LiftedTrajectory> {
    let mut out = traj.clone();
    let spectrum = ctx.spectrum();
    out.gauge_factors.clear();
    out.gauge_factors.push(linalg::identity(spectrum.rank()));
    for i in 0..traj.grid.intervals() {
        let (psi_mid, velocity) = traj.midpoint_velocity(i);
        let a = ctx.connection_form_raw(psi_mid.matrix(), &velocity);
        let a = GaugeElement::project(&a, spectrum).into_matrix();
        let step = gauge_exp(&a, spectrum, traj.grid.step(i));
        let next = step * out.gauge_factors.last().expect("nonempty");
        out.gauge_factors.push(next);
    }
    if traj.grid.intervals() >= 4 {
        let fine = max_of(&out.residuals_with_stride(ctx, 1));
        let coarse = max_of(&out.residuals_with_stride(ctx, 2));
        if fine > RESIDUAL_FLOOR && fine >= coarse {
            return Err(Error::GridTooCoarse { fine, coarse });
        }
    }
    Ok(out)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Runs the lift and the gauge correction on a uniform grid over
/// `[t0, t1]`. `psi0` defaults to the standard purification of `ρ0`.
pub fn horizontal_lift(
    h: &HamiltonianPath,
    rho0: &DensityOperator,
    psi0: Option<&BundlePoint>,
    t0: f64,
    t1: f64,
    steps: usize,
    ctx: &GeometryContext,
) -> Result<LiftedTrajectory> {
    let tol = ctx.tolerances();
    let start = match psi0 {
        Some(p) => {
            let residual = (p.project().matrix() - rho0.matrix()).norm();
            if residual > tol.tol_degeneracy.max(tol.tol_fiber) {
                return Err(Error::NotInFiber { residual });
            }
            p.clone()
        }
        None => standard_purification(rho0, tol),
    };
    let spectrum = spectrum_of(rho0, tol);
    if !spectrum.approx_eq(ctx.spectrum(), tol.tol_degeneracy)
        || spectrum.multiplicities() != ctx.spectrum().multiplicities()
    {
        return Err(Error::InvalidSpectrum(format!(
            "state spectrum {:?} does not match context spectrum {:?}",
            spectrum.values(),
            ctx.spectrum().values()
        )));
    }
    let grid = TimeGrid::uniform(t0, t1, steps)?;
    let raw = lift_unitary_curve(h, &start, &grid, ctx.hbar())?;
    horizontalize(&raw, ctx)
}

/// The holonomy overlap `Ψ0†Ψ‖(t1)`, a `k×k` matrix.
pub fn holonomy(
    h: &HamiltonianPath,
    rho0: &DensityOperator,
    psi0: Option<&BundlePoint>,
    t0: f64,
    t1: f64,
    steps: usize,
    ctx: &GeometryContext,
) -> Result<CMat> {
    if t1 == t0 {
        let start = match psi0 {
            Some(p) => p.clone(),
            None => standard_purification(rho0, ctx.tolerances()),
        };
        return Ok(start.matrix().adjoint() * start.matrix());
    }
    let traj = horizontal_lift(h, rho0, psi0, t0, t1, steps, ctx)?;
    Ok(holonomy_of(&traj))
}

/// `Ψ‖(t0)†Ψ‖(t_N)` for an already horizontalized trajectory.
pub fn holonomy_of(traj: &LiftedTrajectory) -> CMat {
    traj.horizontal_matrix(0).adjoint() * traj.horizontal_matrix(traj.len() - 1)
}

/// `arg` mapped into `(−π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// `γ = arg Tr(Ψ0†Ψ‖(t1))` from a holonomy matrix.
pub fn phase_of_holonomy(holonomy: &CMat) -> Result<f64> {
    let tr = linalg::trace(holonomy);
    if tr.norm() < PHASE_MODULUS_FLOOR {
        return Err(Error::PhaseUndefined { modulus: tr.norm() });
    }
    Ok(principal_arg(tr))
}

/// The operational geometric phase `arg Tr(Ψ0†Ψ‖(t1))` in `(−π, π]`.
///
/// Defined for open paths as well as cyclic ones.
pub fn operational_geometric_phase(
    h: &HamiltonianPath,
    rho0: &DensityOperator,
    psi0: Option<&BundlePoint>,
    t0: f64,
    t1: f64,
    steps: usize,
    ctx: &GeometryContext,
) -> Result<f64> {
    phase_of_holonomy(&holonomy(h, rho0, psi0, t0, t1, steps, ctx)?)
}
