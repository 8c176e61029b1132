//! Driver, non-stoquastic, and problem Hamiltonians, and the linear
//! annealing schedule that interpolates between them.
//!
//! In the spin-`S` language `S_a = M_a / 2`, the schedule at `s = t/T` is
//! `H_D = B_x S_x + χ S_x²` and `H_P = D_0 S_z²` with
//! `B_x = 2(1-s)`, `χ = 4(1-s)α/N` and `D_0 = 4s/N` for the Ising problem.

use crate::error::{Error, Result};
use crate::spin_algebra::{magnetization_operator, Axis, CollectiveBasis, Operator};

pub const DEFAULT_DELTA: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProblemKind {
    /// `H_P = N (Σσ_z / N)²`.
    IsingFc,
    /// `H_P = N[(Σσ_x/N)² + (Σσ_y/N)² + Δ (Σσ_z/N)²]`.
    XxzFc { delta: f64 },
}

impl ProblemKind {
    pub fn xxz_default() -> Self {
        ProblemKind::XxzFc {
            delta: DEFAULT_DELTA,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::IsingFc => "ising",
            ProblemKind::XxzFc { .. } => "xxz",
        }
    }
}

/// Full parameterization of one annealing run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    basis: CollectiveBasis,
    t_anneal: f64,
    alpha: f64,
    problem: ProblemKind,
}

impl AnnealSchedule {
    pub fn new(
        basis: CollectiveBasis,
        t_anneal: f64,
        alpha: f64,
        problem: ProblemKind,
    ) -> Result<Self> {
        if !(t_anneal > 0.0 && t_anneal.is_finite()) {
            return Err(Error::InvalidValue {
                key: "t_anneal".into(),
                reason: format!("must be positive and finite, got {t_anneal}"),
            });
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidValue {
                key: "alpha".into(),
                reason: format!("must be non-negative and finite, got {alpha}"),
            });
        }
        if let ProblemKind::XxzFc { delta } = problem {
            if !delta.is_finite() {
                return Err(Error::InvalidValue {
                    key: "delta".into(),
                    reason: format!("must be finite, got {delta}"),
                });
            }
        }
        Ok(Self {
            basis,
            t_anneal,
            alpha,
            problem,
        })
    }

    pub fn basis(&self) -> CollectiveBasis {
        self.basis
    }

    pub fn t_anneal(&self) -> f64 {
        self.t_anneal
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn problem(&self) -> ProblemKind {
        self.problem
    }

    /// Same schedule with a different total time.
    pub fn with_t_anneal(&self, t_anneal: f64) -> Result<Self> {
        Self::new(self.basis, t_anneal, self.alpha, self.problem)
    }

    /// `H_D + α H_XX`, the Hamiltonian at `t = 0`.
    pub fn initial_hamiltonian(&self) -> Operator {
        let hd = driver_transverse(self.basis);
        &hd + &nonstoquastic_xx(self.basis).scaled(self.alpha)
    }

    pub fn problem_hamiltonian(&self) -> Operator {
        problem_hamiltonian(self.basis, self.problem)
    }

    /// Both schedule endpoints, built once for repeated evaluation.
    pub fn endpoints(&self) -> ScheduleEndpoints {
        ScheduleEndpoints {
            t_anneal: self.t_anneal,
            start: self.initial_hamiltonian(),
            end: self.problem_hamiltonian(),
        }
    }
}

/// Precomputed `H(0)` and `H(T)`; `H(t)` is their affine combination.
#[derive(Clone, Debug)]
pub struct ScheduleEndpoints {
    t_anneal: f64,
    start: Operator,
    end: Operator,
}

impl ScheduleEndpoints {
    pub fn start(&self) -> &Operator {
        &self.start
    }

    pub fn end(&self) -> &Operator {
        &self.end
    }

    /// `H(t)` without range checking; used inside integrators.
    pub fn at(&self, t: f64) -> Operator {
        let s = t / self.t_anneal;
        &self.start.scaled(1.0 - s) + &self.end.scaled(s)
    }

    pub fn at_fraction(&self, s: f64) -> Operator {
        &self.start.scaled(1.0 - s) + &self.end.scaled(s)
    }
}

/// `H_D = Σσ_x`.
pub fn driver_transverse(basis: CollectiveBasis) -> Operator {
    magnetization_operator(basis, Axis::X)
}

/// Anti-ferromagnetic `H_XX = N (Σσ_x / N)² = M_x² / N`.
pub fn nonstoquastic_xx(basis: CollectiveBasis) -> Operator {
    square_over_n(basis, Axis::X)
}

/// Fully connected Ising problem `M_z² / N`.
pub fn problem_ising(basis: CollectiveBasis) -> Operator {
    square_over_n(basis, Axis::Z)
}

/// Fully connected XXZ problem `(M_x² + M_y² + Δ M_z²) / N`.
pub fn problem_xxz(basis: CollectiveBasis, delta: f64) -> Operator {
    let xx = square_over_n(basis, Axis::X);
    let yy = square_over_n(basis, Axis::Y);
    let zz = square_over_n(basis, Axis::Z);
    &(&xx + &yy) + &zz.scaled(delta)
}

pub fn problem_hamiltonian(basis: CollectiveBasis, problem: ProblemKind) -> Operator {
    match problem {
        ProblemKind::IsingFc => problem_ising(basis),
        ProblemKind::XxzFc { delta } => problem_xxz(basis, delta),
    }
}

fn square_over_n(basis: CollectiveBasis, axis: Axis) -> Operator {
    let m = magnetization_operator(basis, axis);
    let sq = &m * &m;
    Operator::hermitian_from(basis, sq.into_matrix()).scaled(1.0 / basis.n_qubits() as f64)
}

/// `H(t) = (1 - t/T)(H_D + α H_XX) + (t/T) H_P`.
pub fn anneal_hamiltonian(schedule: &AnnealSchedule, t: f64) -> Result<Operator> {
    if !(0.0..=schedule.t_anneal).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            t_anneal: schedule.t_anneal,
        });
    }
    Ok(schedule.endpoints().at(t))
}

/// `∂_t H = (H_P - H_D - α H_XX) / T`, constant along the schedule.
pub fn schedule_derivative(schedule: &AnnealSchedule) -> Operator {
    let diff = &schedule.problem_hamiltonian() - &schedule.initial_hamiltonian();
    diff.scaled(1.0 / schedule.t_anneal)
}
