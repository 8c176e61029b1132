//! Open-system annealing: a non-secular adiabatic Redfield-type master
//! equation with an Ohmic bath, and a finite-temperature GKSL equation with
//! collective lowering jumps.
//!
//! The Redfield dissipator is evaluated in the Schrödinger picture from the
//! instantaneous eigenbasis of `H(t)`:
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_{ω,ω'} Γ(ω') (A(ω') ρ A(ω)† - A(ω)† A(ω') ρ) + h.c.
//! ```
//!
//! Summing over `ω` first gives `Λ ρ A - A Λ ρ + h.c.` with
//! `Λ_ab = Γ(ε_b - ε_a) A_ab` in the eigenbasis, which is what the integrator
//! evaluates. The explicit double sum over [`BohrDecomposition`] components is
//! kept for verification and for the secular variant.

use log::{debug, warn};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonians::AnnealSchedule;
use crate::integrator::{integrate, uniform_grid, IntegratorOptions, IntegratorStats};
use crate::spin_algebra::{
    ground_space_projector, hermitian_deviation, hermitian_eigen, lowering_operator,
    magnetization_operator, parity_operator, Axis, CollectiveBasis, Operator, PureState,
    C64,
};

/// Relative clustering tolerance for Bohr frequencies.
pub const OMEGA_TOL_REL: f64 = 1e-9;
const TRACE_DRIFT_TOL: f64 = 1e-6;
const POSITIVITY_WARN: f64 = -1e-6;
const POSITIVITY_ABORT: f64 = -1e-4;

/// Branch structure of the bath correlation spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaMode {
    /// Ohmic density with Bose occupation, obeying `Γ(-ω) = e^{-ω/T} Γ(ω)`.
    Kms,
    /// The three-branch cut-off formula with the emission factor on both
    /// signs of `ω`.
    Literal,
}

impl GammaMode {
    pub fn name(&self) -> &'static str {
        match self {
            GammaMode::Kms => "kms",
            GammaMode::Literal => "literal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    pub eta: f64,
    pub t_env: f64,
    pub omega_c: f64,
    pub epsilon: f64,
    pub mode: GammaMode,
}

impl SpectralDensity {
    pub const DEFAULT_ETA: f64 = 0.1;
    pub const DEFAULT_OMEGA_C: f64 = 20.0;
    pub const DEFAULT_EPSILON: f64 = 1e-7;

    /// Validated density. `eta = 0` is accepted as the decoupled limit.
    pub fn new(eta: f64, t_env: f64, omega_c: f64, epsilon: f64, mode: GammaMode) -> Result<Self> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidValue {
                key: key.into(),
                reason: reason.into(),
            })
        };
        if !(eta >= 0.0) || !eta.is_finite() {
            return bad("eta", "must be non-negative and finite");
        }
        if !(t_env > 0.0) || !t_env.is_finite() {
            return bad("t_env", "must be positive and finite");
        }
        if !(omega_c > 0.0) {
            return bad("omega_c", "must be positive");
        }
        if !(epsilon > 0.0) {
            return bad("epsilon", "must be positive");
        }
        Ok(Self {
            eta,
            t_env,
            omega_c,
            epsilon,
            mode,
        })
    }

    /// Defaults `η = 0.1`, `ω_c = 20`, `ε = 1e-7` at the given temperature.
    pub fn with_defaults(t_env: f64, mode: GammaMode) -> Result<Self> {
        Self::new(
            Self::DEFAULT_ETA,
            t_env,
            Self::DEFAULT_OMEGA_C,
            Self::DEFAULT_EPSILON,
            mode,
        )
    }

    pub fn gamma(&self, omega: f64) -> f64 {
        gamma(omega, self)
    }
}

/// Bath spectrum `Γ(ω)`; `Γ(0) = η T_env` in both modes.
pub fn gamma(omega: f64, sd: &SpectralDensity) -> f64 {
    let SpectralDensity {
        eta,
        t_env,
        omega_c,
        epsilon,
        mode,
    } = *sd;
    if omega == 0.0 {
        return eta * t_env;
    }
    let w = omega.abs();
    let x = w / t_env;
    let cutoff = (-w / omega_c).exp();
    match mode {
        GammaMode::Literal => eta * w * cutoff * (1.0 / (x.exp_m1() + epsilon) + 1.0),
        // η ω e^{-|ω|/ω_c} / (1 - e^{-ω/T} + sign(ω) ε)
        GammaMode::Kms if omega > 0.0 => eta * w * cutoff / (epsilon - (-x).exp_m1()),
        GammaMode::Kms => eta * w * cutoff / (x.exp_m1() + epsilon),
    }
}

/// System side of the system–bath coupling.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    operator: Operator,
}

impl NoiseSpec {
    /// Coupling through `A`, which must be Hermitian and must not commute
    /// with the parity `K`.
    pub fn new(operator: Operator) -> Result<Self> {
        let spec = Self::allow_symmetric(operator)?;
        let k = parity_operator(spec.operator.basis());
        let comm = &(&spec.operator * &k) - &(&k * &spec.operator);
        if comm.norm_max() <= 1e-12 * spec.operator.norm_max().max(1.0) {
            return Err(Error::InvalidValue {
                key: "noise".into(),
                reason: "coupling operator commutes with the parity and cannot break the symmetry"
                    .into(),
            });
        }
        Ok(spec)
    }

    /// Coupling through `A` without the symmetry-breaking requirement.
    pub fn allow_symmetric(operator: Operator) -> Result<Self> {
        if !operator.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: operator.hermitian_deviation(),
            });
        }
        Ok(Self { operator })
    }

    /// `A = Σσ_y`.
    pub fn collective_y(basis: CollectiveBasis) -> Self {
        Self {
            operator: magnetization_operator(basis, Axis::Y),
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }
}

/// Density matrix on the collective basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: CollectiveBasis,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Checks Hermiticity (`1e-8`), unit trace (`1e-6`) and positivity
    /// (`-1e-6`).
    pub fn new(basis: CollectiveBasis, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > 1e-8 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let rho = Self { basis, matrix };
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_DRIFT_TOL {
            return Err(Error::InvalidValue {
                key: "rho".into(),
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let min = rho.min_eigenvalue();
        if min < POSITIVITY_WARN {
            return Err(Error::Positivity {
                t: f64::NAN,
                min_eigenvalue: min,
            });
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(basis: CollectiveBasis, matrix: DMatrix<C64>) -> Self {
        Self { basis, matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &PureState) -> Self {
        let v = state.amplitudes();
        Self {
            basis: state.basis(),
            matrix: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(basis: CollectiveBasis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            matrix: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    /// `e^{-H/T} / Z` for a fixed Hermitian `h`.
    pub fn gibbs(h: &Operator, t_env: f64) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: h.hermitian_deviation(),
            });
        }
        let (e, v) = hermitian_eigen(h.matrix());
        let w: Vec<f64> = e.iter().map(|x| (-(x - e[0]) / t_env).exp()).collect();
        let z: f64 = w.iter().sum();
        let d = e.len();
        let diag = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(w[r] / z, 0.0)
            } else {
                C64::default()
            }
        });
        Ok(Self {
            basis: h.basis(),
            matrix: &v * diag * v.adjoint(),
        })
    }

    pub fn basis(&self) -> CollectiveBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.matrix).0[0]
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// `Tr[O ρ]`.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        self.basis.check_same(&op.basis())?;
        Ok((op.matrix() * &self.matrix).trace())
    }

    /// Diagonal entry for Dicke level `m`.
    pub fn population_of_m(&self, m: f64) -> Option<f64> {
        self.basis.index_of(m).map(|i| self.matrix[(i, i)].re)
    }
}

/// `⟨gs|ρ|gs⟩` summed over the (possibly degenerate) ground space of `h`.
pub fn ground_population(rho: &DensityMatrix, h: &Operator) -> Result<f64> {
    rho.basis.check_same(&h.basis())?;
    let p = ground_space_projector(h)?;
    Ok((p * &rho.matrix).trace().re)
}

/// Bohr-frequency components `A(ω) = Σ_{ε'-ε=ω} Π_ε A Π_ε'`.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    pub frequencies: Vec<f64>,
    pub components: Vec<Operator>,
}

impl BohrDecomposition {
    /// `Σ_ω A(ω)`.
    pub fn sum(&self) -> DMatrix<C64> {
        let d = self.components[0].basis().dim();
        self.components
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, c| acc + c.matrix())
    }

    /// Index of the component at `-ω`.
    pub fn conjugate_index(&self, i: usize) -> Option<usize> {
        let w = -self.frequencies[i];
        self.frequencies.iter().position(|&x| x == w)
    }
}

/// Clusters `ε_b - ε_a` into Bohr frequencies.
///
/// Returns the sorted cluster representatives and, for every `(a, b)`, the
/// index of its cluster. Clusters are built on non-negative gaps and
/// mirrored, so the frequency set is exactly symmetric and the cluster
/// around zero is pinned to `0`.
fn bohr_clusters(eigenvalues: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>) {
    let d = eigenvalues.len();
    let mut gaps: Vec<f64> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let w = eigenvalues[b] - eigenvalues[a];
            if w >= 0.0 {
                gaps.push(w);
            }
        }
    }
    gaps.sort_by(f64::total_cmp);

    let mut reps: Vec<f64> = Vec::new();
    let mut start = 0;
    while start < gaps.len() {
        let mut end = start + 1;
        while end < gaps.len() && gaps[end] - gaps[end - 1] <= tol {
            end += 1;
        }
        let members = &gaps[start..end];
        if members[0] <= tol {
            reps.push(0.0);
        } else {
            reps.push(members.iter().sum::<f64>() / members.len() as f64);
        }
        start = end;
    }

    let mut freqs: Vec<f64> = reps.iter().rev().filter(|&&w| w > 0.0).map(|w| -w).collect();
    freqs.extend(reps.iter().copied());
    let nearest = |w: f64| -> usize {
        let target = if w.abs() <= tol { 0.0 } else { w };
        freqs
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - target).abs().total_cmp(&(y.1 - target).abs()))
            .map(|(i, _)| i)
            .unwrap()
    };
    let labels = (0..d * d)
        .map(|k| {
            let (a, b) = (k / d, k % d);
            nearest(eigenvalues[b] - eigenvalues[a])
        })
        .collect();
    (freqs, labels)
}

fn omega_tol(eigenvalues: &[f64]) -> f64 {
    let range = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
    OMEGA_TOL_REL * range.max(f64::MIN_POSITIVE)
}

/// Decomposes `a` at the Bohr frequencies of `h`, with the frequency
/// clustering tolerance `1e-9 × (spectral range)`.
pub fn bohr_decomposition(h: &Operator, a: &Operator) -> Result<BohrDecomposition> {
    h.basis().check_same(&a.basis())?;
    let (e, v) = hermitian_eigen(h.matrix());
    let tol = omega_tol(&e);
    let (freqs, labels) = bohr_clusters(&e, tol);
    let d = e.len();
    let a_eig = v.adjoint() * a.matrix() * &v;
    let components = (0..freqs.len())
        .map(|f| {
            let block = DMatrix::from_fn(d, d, |r, c| {
                if labels[r * d + c] == f {
                    a_eig[(r, c)]
                } else {
                    C64::default()
                }
            });
            Operator::from_matrix(h.basis(), &v * block * v.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BohrDecomposition {
        frequencies: freqs,
        components,
    })
}

/// Redfield-type bath model.
#[derive(Clone, Debug)]
pub struct RedfieldModel {
    pub noise: NoiseSpec,
    pub density: SpectralDensity,
    /// Keep only `ω = ω'` terms. Diagnostic only.
    pub secular: bool,
}

impl RedfieldModel {
    pub fn new(noise: NoiseSpec, density: SpectralDensity) -> Self {
        Self {
            noise,
            density,
            secular: false,
        }
    }

    /// Dissipative part of `dρ/dt` at fixed `h`.
    pub fn dissipator(&self, h: &Operator, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        h.basis().check_same(&self.noise.operator.basis())?;
        if self.secular {
            return self.dissipator_double_sum(h, rho, true);
        }
        Ok(self.dissipator_fast(h.matrix(), rho))
    }

    /// `-i[H, ρ]` plus the dissipator.
    pub fn rhs(&self, h: &Operator, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let mut out = self.dissipator(h, rho)?;
        out += von_neumann(h.matrix(), rho);
        Ok(out)
    }

    fn dissipator_fast(&self, h: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let a = self.noise.operator.matrix();
        let (e, v) = hermitian_eigen(h);
        let (freqs, labels) = bohr_clusters(&e, omega_tol(&e));
        let rates: Vec<f64> = freqs.iter().map(|&w| gamma(w, &self.density)).collect();
        let d = e.len();
        let a_eig = v.adjoint() * a * &v;
        let lambda_eig = DMatrix::from_fn(d, d, |r, c| a_eig[(r, c)] * rates[labels[r * d + c]]);
        let lambda = &v * lambda_eig * v.adjoint();
        let lr = &lambda * rho;
        let half = &lr * a - a * &lr;
        &half + half.adjoint()
    }

    /// The same dissipator from the explicit sum over frequency pairs.
    pub fn dissipator_double_sum(
        &self,
        h: &Operator,
        rho: &DMatrix<C64>,
        secular: bool,
    ) -> Result<DMatrix<C64>> {
        let bohr = bohr_decomposition(h, &self.noise.operator)?;
        let d = rho.nrows();
        let mut half = DMatrix::<C64>::zeros(d, d);
        for (i, ai) in bohr.components.iter().enumerate() {
            let ai_dag = ai.matrix().adjoint();
            for (j, aj) in bohr.components.iter().enumerate() {
                if secular && i != j {
                    continue;
                }
                let g = C64::new(gamma(bohr.frequencies[j], &self.density), 0.0);
                let term = aj.matrix() * rho * &ai_dag - &ai_dag * aj.matrix() * rho;
                half += term * g;
            }
        }
        Ok(&half + half.adjoint())
    }
}

/// Finite-temperature GKSL model with `L = J_-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GkslModel {
    pub eta: f64,
    pub t_env: f64,
    /// Include `-i[H, ρ]`. Disabling it leaves the bare dissipator, a
    /// diagnostic variant.
    pub coherent: bool,
}

impl GkslModel {
    pub fn new(eta: f64, t_env: f64) -> Result<Self> {
        SpectralDensity::new(eta, t_env, 1.0, 1.0, GammaMode::Kms)?;
        Ok(Self {
            eta,
            t_env,
            coherent: true,
        })
    }

    /// `N_b = 1 / (e^{1/T_env} - 1)`.
    pub fn occupation(&self) -> f64 {
        1.0 / (1.0 / self.t_env).exp_m1()
    }

    pub fn rhs(&self, h: &Operator, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let l = lowering_operator(h.basis());
        let nb = self.occupation();
        let mut out = lindblad(l.matrix(), rho) * C64::new(self.eta * (nb + 1.0), 0.0)
            + lindblad(&l.matrix().adjoint(), rho) * C64::new(self.eta * nb, 0.0);
        if self.coherent {
            out += von_neumann(h.matrix(), rho);
        }
        out
    }
}

fn von_neumann(h: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    (h * rho - rho * h) * C64::new(0.0, -1.0)
}

/// `D[X]ρ = XρX† - ½{X†X, ρ}`.
fn lindblad(x: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let xd = x.adjoint();
    let xdx = &xd * x;
    x * rho * &xd - (&xdx * rho + rho * &xdx) * C64::new(0.5, 0.0)
}

/// Sampled open-system trajectory.
#[derive(Clone, Debug)]
pub struct OpenTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// `Tr[H(t) ρ(t)]`.
    pub energy: Vec<f64>,
    /// Weight on the instantaneous ground space of `H(t)`.
    pub ground_population: Vec<f64>,
    /// `|Tr ρ - 1|`.
    pub trace_error: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    /// `Tr[K ρ]`.
    pub parity: Vec<C64>,
    /// Times at which the trace was rescaled.
    pub renormalizations: Vec<f64>,
    pub stats: IntegratorStats,
}

impl OpenTrajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has samples")
    }

    pub fn final_ground_population(&self) -> f64 {
        *self.ground_population.last().expect("trajectory has samples")
    }

    pub fn final_energy(&self) -> f64 {
        *self.energy.last().expect("trajectory has samples")
    }

    pub fn max_trace_error(&self) -> f64 {
        self.trace_error.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|r| r.hermitian_deviation())
            .fold(0.0, f64::max)
    }
}

/// `|ψ₀⟩⟨ψ₀|` for the ground of `H(0)`.
pub fn initial_ground_projector(schedule: &AnnealSchedule) -> Result<DensityMatrix> {
    Ok(DensityMatrix::pure(
        &crate::closed_dynamics::initial_ground_state(schedule)?,
    ))
}

/// Options with the open-system step cap `T / 10³` filled in.
fn open_options(opts: &IntegratorOptions, t_anneal: f64) -> IntegratorOptions {
    let mut o = *opts;
    o.initial_step.get_or_insert(t_anneal * 1e-4);
    o.max_step.get_or_insert(t_anneal * 1e-3);
    o
}

/// Integrates the Redfield-type equation along the schedule.
///
/// Positivity below `-1e-6` is logged; below `-1e-4` the run aborts.
pub fn evolve_adiabatic_me(
    schedule: &AnnealSchedule,
    rho0: &DensityMatrix,
    model: &RedfieldModel,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<OpenTrajectory> {
    schedule.basis().check_same(&model.noise.operator.basis())?;
    let ends = schedule.endpoints();
    let (h0, h1) = (ends.start().clone(), ends.end().clone());
    let t_anneal = schedule.t_anneal();
    let basis = schedule.basis();
    evolve_density(
        schedule,
        rho0,
        |t, rho| {
            let s = t / t_anneal;
            let h = h0.matrix() * C64::new(1.0 - s, 0.0) + h1.matrix() * C64::new(s, 0.0);
            if model.secular {
                let op = Operator::from_matrix(basis, h)?;
                model.rhs(&op, rho)
            } else {
                let mut out = model.dissipator_fast(&h, rho);
                out += von_neumann(&h, rho);
                Ok(out)
            }
        },
        opts,
        n_samples,
    )
}

/// Integrates the finite-temperature GKSL equation along the schedule.
pub fn evolve_gksl(
    schedule: &AnnealSchedule,
    rho0: &DensityMatrix,
    model: &GkslModel,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<OpenTrajectory> {
    let ends = schedule.endpoints();
    let (h0, h1) = (ends.start().clone(), ends.end().clone());
    let t_anneal = schedule.t_anneal();
    let l = lowering_operator(schedule.basis()).into_matrix();
    let ld = l.adjoint();
    let nb = model.occupation();
    let down = C64::new(model.eta * (nb + 1.0), 0.0);
    let up = C64::new(model.eta * nb, 0.0);
    evolve_density(
        schedule,
        rho0,
        |t, rho| {
            let mut out = lindblad(&l, rho) * down + lindblad(&ld, rho) * up;
            if model.coherent {
                let s = t / t_anneal;
                let h = h0.matrix() * C64::new(1.0 - s, 0.0) + h1.matrix() * C64::new(s, 0.0);
                out += von_neumann(&h, rho);
            }
            Ok(out)
        },
        opts,
        n_samples,
    )
}

fn evolve_density<F>(
    schedule: &AnnealSchedule,
    rho0: &DensityMatrix,
    mut deriv: F,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<OpenTrajectory>
where
    F: FnMut(f64, &DMatrix<C64>) -> Result<DMatrix<C64>>,
{
    let basis = schedule.basis();
    basis.check_same(&rho0.basis)?;
    let d = basis.dim();
    let t_anneal = schedule.t_anneal();
    let opts = open_options(opts, t_anneal);

    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let rho = DMatrix::from_column_slice(d, d, y);
        let out = deriv(t, &rho)?;
        dy.copy_from_slice(out.as_slice());
        Ok(())
    };

    let mut renormalizations = Vec::new();
    let mut worst = 0.0f64;
    let mut positivity_error = None;
    let project = |t: f64, y: &mut [C64]| {
        let mut m = DMatrix::from_column_slice(d, d, y);
        let tr = m.trace().re;
        let mut changed = false;
        if (tr - 1.0).abs() > TRACE_DRIFT_TOL {
            debug!("renormalizing trace at t = {t} (trace {tr})");
            renormalizations.push(t);
            m /= C64::new(tr, 0.0);
            y.copy_from_slice(m.as_slice());
            changed = true;
        }
        let min = hermitian_eigen(&m).0[0];
        if min < worst {
            worst = min;
        }
        if min < POSITIVITY_ABORT && positivity_error.is_none() {
            positivity_error = Some(Error::Positivity {
                t,
                min_eigenvalue: min,
            });
        }
        changed
    };

    let times = uniform_grid(t_anneal, n_samples);
    let y0: Vec<C64> = rho0.matrix.as_slice().to_vec();
    let result = integrate(rhs, project, 0.0, t_anneal, &y0, &times, &opts);
    if let Some(err) = positivity_error {
        return Err(err);
    }
    let (raw, stats) = result?;
    if worst < POSITIVITY_WARN {
        warn!("density matrix dipped to min eigenvalue {worst:e} during the run");
    }
    if !renormalizations.is_empty() {
        warn!(
            "trace renormalized {} times (first at t = {})",
            renormalizations.len(),
            renormalizations[0]
        );
    }

    let ends = schedule.endpoints();
    let k = parity_operator(basis);
    let mut traj = OpenTrajectory {
        times: times.clone(),
        states: Vec::with_capacity(raw.len()),
        energy: Vec::with_capacity(raw.len()),
        ground_population: Vec::with_capacity(raw.len()),
        trace_error: Vec::with_capacity(raw.len()),
        min_eigenvalue: Vec::with_capacity(raw.len()),
        parity: Vec::with_capacity(raw.len()),
        renormalizations,
        stats,
    };
    for (t, y) in times.iter().zip(raw) {
        let rho = DensityMatrix::from_raw(basis, DMatrix::from_vec(d, d, y));
        let h = ends.at(*t);
        traj.energy.push(rho.expectation(&h)?.re);
        traj.ground_population.push(ground_population(&rho, &h)?);
        traj.trace_error.push((rho.trace() - 1.0).abs());
        traj.min_eigenvalue.push(rho.min_eigenvalue());
        traj.parity.push(rho.expectation(&k)?);
        traj.states.push(rho);
    }
    Ok(traj)
}
