//! Closed-system annealing: the time-dependent Schrödinger equation on the
//! collective-spin sector, plus a brute-force `2^N`-dimensional oracle.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hamiltonians::AnnealSchedule;
use crate::integrator::{integrate, uniform_grid, IntegratorOptions, IntegratorStats};
use crate::spin_algebra::{
    ground_space_projector, lowest_eigenpair, parity_operator, Operator, PureState, C64,
};

const NORM_DRIFT_TOL: f64 = 1e-6;
/// Largest register the full Hilbert-space oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 4;

/// Observables sampled on a uniform time grid.
#[derive(Clone, Debug)]
pub struct ClosedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PureState>,
    /// `⟨ψ|H(t)|ψ⟩`.
    pub energy: Vec<f64>,
    /// `⟨ψ|K|ψ⟩`.
    pub parity: Vec<C64>,
    /// Weight of `ψ(t)` on the ground space of `H(t)`.
    pub fidelity_ground: Vec<f64>,
    /// Times at which the state was renormalized after drifting.
    pub renormalizations: Vec<f64>,
    pub stats: IntegratorStats,
}

impl ClosedTrajectory {
    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity_ground.last().unwrap()
    }

    pub fn final_energy(&self) -> f64 {
        *self.energy.last().unwrap()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_parity_drift(&self) -> f64 {
        let p0 = self.parity[0];
        self.parity.iter().map(|p| (p - p0).norm()).fold(0.0, f64::max)
    }
}

/// Ground state of `H(0)`, the default starting point of every run.
pub fn initial_ground_state(schedule: &AnnealSchedule) -> Result<PureState> {
    Ok(lowest_eigenpair(&schedule.initial_hamiltonian())?.1)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Integrates `dψ/dt = -i H(t) ψ` over `[0, T]`.
///
/// Observables are normalized expectations `⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩`; whenever the
/// norm drifts by more than `1e-6` after a step the state is rescaled and
/// the time recorded in [`ClosedTrajectory::renormalizations`].
pub fn evolve_closed(
    schedule: &AnnealSchedule,
    psi0: &PureState,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<ClosedTrajectory> {
    let ends = schedule.endpoints();
    evolve_interpolated(
        ends.start(),
        ends.end(),
        schedule.t_anneal(),
        psi0,
        opts,
        n_samples,
    )
}

/// Schrödinger evolution under `H(t) = (1 - t/T) start + (t/T) end`.
fn evolve_interpolated(
    start: &Operator,
    end: &Operator,
    t_anneal: f64,
    psi0: &PureState,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<ClosedTrajectory> {
    let basis = start.basis();
    basis.check_same(&psi0.basis())?;
    let h0 = start.matrix();
    let h1 = end.matrix();
    let dim = basis.dim();

    let mut opts = *opts;
    opts.initial_step.get_or_insert(t_anneal * 1e-4);

    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let s = t / t_anneal;
        for (r, d) in dy.iter_mut().enumerate() {
            let mut acc = C64::default();
            for c in 0..dim {
                acc += (h0[(r, c)] * (1.0 - s) + h1[(r, c)] * s) * y[c];
            }
            *d = C64::new(acc.im, -acc.re);
        }
        Ok(())
    };
    let mut renormalizations = Vec::new();
    let project = |t: f64, y: &mut [C64]| {
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_DRIFT_TOL {
            debug!("renormalizing state at t = {t} (norm {norm})");
            renormalizations.push(t);
            y.iter_mut().for_each(|z| *z /= norm);
            true
        } else {
            false
        }
    };

    let times = uniform_grid(t_anneal, n_samples);
    let y0: Vec<C64> = psi0.amplitudes().iter().copied().collect();
    let (raw, stats) = integrate(rhs, project, 0.0, t_anneal, &y0, &times, &opts)?;
    if !renormalizations.is_empty() {
        warn!(
            "state renormalized {} times (first at t = {})",
            renormalizations.len(),
            renormalizations[0]
        );
    }

    let k = parity_operator(basis);
    let mut traj = ClosedTrajectory {
        times: times.clone(),
        states: Vec::with_capacity(raw.len()),
        energy: Vec::with_capacity(raw.len()),
        parity: Vec::with_capacity(raw.len()),
        fidelity_ground: Vec::with_capacity(raw.len()),
        renormalizations,
        stats,
    };
    for (t, y) in times.iter().zip(raw) {
        let v = DVector::from_vec(y);
        let s = t / t_anneal;
        let h = &start.scaled(1.0 - s) + &end.scaled(s);
        let proj = ground_space_projector(&h)?;
        let nsq = v.norm_squared();
        traj.energy.push(v.dotc(&(h.matrix() * &v)).re / nsq);
        traj.parity.push(v.dotc(&(k.matrix() * &v)) / nsq);
        traj.fidelity_ground.push(v.dotc(&(&proj * &v)).re / nsq);
        traj.states.push(PureState::from_raw(basis, v));
    }
    Ok(traj)
}

/// Observables from the full `2^N` Hilbert-space oracle.
#[derive(Clone, Debug)]
pub struct OracleTrajectory {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub parity: Vec<C64>,
    /// `‖Π_sym ψ‖²`, the weight on the permutation-symmetric subspace.
    pub symmetric_weight: Vec<f64>,
    pub norm: Vec<f64>,
}

/// Evolves the same schedule with `Σσ` operators built qubit by qubit on
/// `C^(2^N)`, starting from the symmetric embedding of the ground of `H(0)`.
pub fn evolve_full_space_oracle(
    schedule: &AnnealSchedule,
    opts: &IntegratorOptions,
    n_samples: usize,
) -> Result<OracleTrajectory> {
    let n = schedule.basis().n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleTooLarge {
            max: ORACLE_MAX_QUBITS,
            got: n,
        });
    }
    let full = FullSpace::new(n);
    let nf = n as f64;
    let xx = &full.mx * &full.mx / C64::new(nf, 0.0);
    let zz = &full.mz * &full.mz / C64::new(nf, 0.0);
    let yy = &full.my * &full.my / C64::new(nf, 0.0);
    let h_start = &full.mx + &xx * C64::new(schedule.alpha(), 0.0);
    let h_end = match schedule.problem() {
        crate::hamiltonians::ProblemKind::IsingFc => zz,
        crate::hamiltonians::ProblemKind::XxzFc { delta } => &xx + &yy + &zz * C64::new(delta, 0.0),
    };

    let psi_dicke = initial_ground_state(schedule)?;
    let iso = full.symmetric_isometry();
    let psi0 = &iso * psi_dicke.amplitudes();
    let sym_proj = &iso * iso.adjoint();

    let t_anneal = schedule.t_anneal();
    let dim = full.dim;
    let mut opts = *opts;
    opts.initial_step.get_or_insert(t_anneal * 1e-4);
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let s = t / t_anneal;
        for (r, d) in dy.iter_mut().enumerate() {
            let mut acc = C64::default();
            for c in 0..dim {
                acc += (h_start[(r, c)] * (1.0 - s) + h_end[(r, c)] * s) * y[c];
            }
            *d = acc * C64::new(0.0, -1.0);
        }
        Ok(())
    };
    let times = uniform_grid(t_anneal, n_samples);
    let y0: Vec<C64> = psi0.iter().copied().collect();
    let (raw, _) = integrate(rhs, |_, _| false, 0.0, t_anneal, &y0, &times, &opts)?;

    let mut out = OracleTrajectory {
        times: times.clone(),
        energy: Vec::new(),
        parity: Vec::new(),
        symmetric_weight: Vec::new(),
        norm: Vec::new(),
    };
    for (t, y) in times.iter().zip(raw) {
        let v = DVector::from_vec(y);
        let s = t / t_anneal;
        let h = &h_start * C64::new(1.0 - s, 0.0) + &h_end * C64::new(s, 0.0);
        let nsq = v.norm_squared();
        out.energy.push(v.dotc(&(&h * &v)).re / nsq);
        out.parity.push(v.dotc(&(&full.parity * &v)) / nsq);
        out.symmetric_weight.push(v.dotc(&(&sym_proj * &v)).re / nsq);
        out.norm.push(v.norm());
    }
    Ok(out)
}

/// Pauli sums on `N` explicit qubits; bit `q` of an index is qubit `q`,
/// with `0 = ↑`.
struct FullSpace {
    n: usize,
    dim: usize,
    mx: DMatrix<C64>,
    my: DMatrix<C64>,
    mz: DMatrix<C64>,
    parity: DMatrix<C64>,
}

impl FullSpace {
    fn new(n: usize) -> Self {
        let dim = 1usize << n;
        let zero = C64::new(0.0, 0.0);
        let sx = DMatrix::from_row_slice(2, 2, &[zero, C64::new(1.0, 0.0), C64::new(1.0, 0.0), zero]);
        let sy = DMatrix::from_row_slice(2, 2, &[zero, C64::new(0.0, -1.0), C64::new(0.0, 1.0), zero]);
        let sz = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), zero, zero, C64::new(-1.0, 0.0)]);
        let site_sum = |p: &DMatrix<C64>| {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for q in 0..n {
                acc += embed(p, q, n);
            }
            acc
        };
        // exp(iπ/2 σ_x) = iσ_x on each qubit
        let mut parity = DMatrix::<C64>::identity(1, 1);
        for _ in 0..n {
            parity = parity.kronecker(&(&sx * C64::new(0.0, 1.0)));
        }
        Self {
            n,
            dim,
            mx: site_sum(&sx),
            my: site_sum(&sy),
            mz: site_sum(&sz),
            parity,
        }
    }

    /// Columns are `|S, m⟩` written as normalized sums over bit strings with
    /// `S - m` down spins.
    fn symmetric_isometry(&self) -> DMatrix<C64> {
        let mut iso = DMatrix::<C64>::zeros(self.dim, self.n + 1);
        for downs in 0..=self.n {
            let members: Vec<usize> = (0..self.dim)
                .filter(|b| b.count_ones() as usize == downs)
                .collect();
            let amp = 1.0 / (members.len() as f64).sqrt();
            for b in members {
                iso[(b, downs)] = C64::new(amp, 0.0);
            }
        }
        iso
    }
}

/// Single-qubit operator `p` acting on qubit `q` of `n`.
fn embed(p: &DMatrix<C64>, q: usize, n: usize) -> DMatrix<C64> {
    let mut acc = DMatrix::<C64>::identity(1, 1);
    // kronecker order: most significant qubit first
    for site in (0..n).rev() {
        let factor = if site == q {
            p.clone()
        } else {
            DMatrix::identity(2, 2)
        };
        acc = acc.kronecker(&factor);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::ProblemKind;
    use crate::spin_algebra::{magnetization_operator, max_abs, Axis, CollectiveBasis};

    fn sched(n: usize, t: f64, alpha: f64, problem: ProblemKind) -> AnnealSchedule {
        AnnealSchedule::new(CollectiveBasis::new(n).unwrap(), t, alpha, problem).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let b = CollectiveBasis::new(2).unwrap();
        let z = PureState::from_m(b, 0.0);
        let up = PureState::from_m(b, 1.0);
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&z, &up).unwrap().abs() < 1e-15);
        let mix = PureState::normalized(b, z.amplitudes() + up.amplitudes()).unwrap();
        assert!((fidelity(&z, &mix).unwrap() - 0.5).abs() < 1e-15);
        let other = PureState::from_m(CollectiveBasis::new(1).unwrap(), 0.5);
        assert!(fidelity(&z, &other).is_err());
    }

    #[test]
    fn adiabatic_success_without_xx() {
        let s = sched(2, 1000.0, 0.0, ProblemKind::IsingFc);
        let psi0 = initial_ground_state(&s).unwrap();
        let tr = evolve_closed(&s, &psi0, &IntegratorOptions::default(), 11).unwrap();
        assert!(tr.final_fidelity() > 0.99, "{}", tr.final_fidelity());
        assert!(tr.max_norm_drift() < 1e-6);
        assert!(tr.max_parity_drift() < 1e-6);
    }

    #[test]
    fn crossing_strands_state_on_excited_branch() {
        let s = sched(2, 1000.0, 100.0, ProblemKind::IsingFc);
        let psi0 = initial_ground_state(&s).unwrap();
        let tr = evolve_closed(&s, &psi0, &IntegratorOptions::default(), 11).unwrap();
        assert!(tr.final_fidelity() < 1e-6);
        assert!((tr.final_energy() - 2.0).abs() < 1e-6);
        assert!((tr.parity[10] - C64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn stationary_evolution_conserves_energy() {
        let s = sched(2, 100.0, 100.0, ProblemKind::IsingFc);
        let h = s.initial_hamiltonian();
        let psi0 = initial_ground_state(&s).unwrap();
        let tr = evolve_interpolated(&h, &h, 100.0, &psi0, &IntegratorOptions::default(), 51).unwrap();
        let e0 = tr.energy[0];
        for e in &tr.energy {
            assert!((e - e0).abs() < 1e-8, "{e} vs {e0}");
        }
        assert!(tr.max_norm_drift() < 1e-6);
    }

    #[test]
    fn frozen_superposition_conserves_energy() {
        let s = sched(2, 100.0, 100.0, ProblemKind::IsingFc);
        let h = s.initial_hamiltonian();
        let psi0 = PureState::normalized(
            s.basis(),
            DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(-0.64, 0.0)]),
        )
        .unwrap();
        let opts = IntegratorOptions::with_tolerances(1e-12, 1e-14);
        let tr = evolve_interpolated(&h, &h, 100.0, &psi0, &opts, 51).unwrap();
        let e0 = tr.energy[0];
        for e in &tr.energy {
            assert!((e - e0).abs() < 1e-8 * e0.abs(), "{e} vs {e0}");
        }
    }

    #[test]
    fn full_space_operators_match_dicke_projection() {
        for n in 1..=3 {
            let full = FullSpace::new(n);
            let iso = full.symmetric_isometry();
            let b = CollectiveBasis::new(n).unwrap();
            for (m, axis) in [(&full.mx, Axis::X), (&full.my, Axis::Y), (&full.mz, Axis::Z)] {
                let projected = iso.adjoint() * m * &iso;
                let dicke = magnetization_operator(b, axis);
                assert!(max_abs(&(projected - dicke.matrix())) < 1e-12);
            }
            let k = iso.adjoint() * &full.parity * &iso;
            assert!(max_abs(&(k - parity_operator(b).matrix())) < 1e-12);
        }
    }

    #[test]
    fn oracle_single_qubit_matches_dicke() {
        let s = sched(1, 20.0, 0.0, ProblemKind::IsingFc);
        let opts = IntegratorOptions::with_tolerances(1e-11, 1e-13);
        let o = evolve_full_space_oracle(&s, &opts, 21).unwrap();
        let d = evolve_closed(&s, &initial_ground_state(&s).unwrap(), &opts, 21).unwrap();
        for (a, b) in o.energy.iter().zip(&d.energy) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_rejects_large_registers() {
        let s = sched(5, 1.0, 0.0, ProblemKind::IsingFc);
        assert!(matches!(
            evolve_full_space_oracle(&s, &IntegratorOptions::default(), 2),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
