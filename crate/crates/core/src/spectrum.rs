//! Instantaneous spectra along the schedule with parity-sector labels.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{schedule_derivative, AnnealSchedule};
use crate::spin_algebra::{
    fix_phase, hermitian_eigen, parity_operator, Operator, PureState, C64, DEGENERACY_TOL,
};

const SECTOR_TOL: f64 = 1e-6;
const COMMUTATION_TOL: f64 = 1e-8;
/// Width in `s` below which a crossing bracket is considered resolved.
pub const CROSSING_RESOLUTION: f64 = 1e-6;

/// Eigenvalue of the parity `K` carried by a level.
///
/// Integer total spin only produces `Plus`/`Minus`; half-integer spin gives
/// `±i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Sector {
    pub fn value(&self) -> C64 {
        match self {
            Sector::Plus => C64::new(1.0, 0.0),
            Sector::Minus => C64::new(-1.0, 0.0),
            Sector::PlusI => C64::new(0.0, 1.0),
            Sector::MinusI => C64::new(0.0, -1.0),
        }
    }

    fn nearest(z: C64) -> (Sector, f64) {
        [Sector::Plus, Sector::Minus, Sector::PlusI, Sector::MinusI]
            .into_iter()
            .map(|s| (s, (z - s.value()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Plus => "1",
            Sector::Minus => "-1",
            Sector::PlusI => "i",
            Sector::MinusI => "-i",
        })
    }
}

/// Eigen-analysis of `H(s)` at one schedule point.
#[derive(Clone, Debug)]
pub struct SpectrumSnapshot {
    pub s: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<PureState>,
    pub sectors: Vec<Sector>,
}

impl SpectrumSnapshot {
    pub fn ground_sector(&self) -> Sector {
        self.sectors[0]
    }

    /// Gap `ε_j - ε_0`.
    pub fn gap(&self, level: usize) -> f64 {
        self.eigenvalues[level] - self.eigenvalues[0]
    }

    /// Eigenvectors as the columns of a unitary matrix.
    pub fn unitary(&self) -> DMatrix<C64> {
        let cols: Vec<DVector<C64>> = self
            .eigenvectors
            .iter()
            .map(|v| v.amplitudes().clone())
            .collect();
        DMatrix::from_columns(&cols)
    }
}

/// Simultaneous eigenbasis of `h` and the commuting parity `k`.
///
/// Levels degenerate within [`DEGENERACY_TOL`] are rotated to diagonalize `k`
/// inside the cluster, ordered by sector, and phased like
/// [`lowest_eigenpair`](crate::spin_algebra::lowest_eigenpair).
pub fn diagonalize(h: &Operator, k: &Operator) -> Result<SpectrumSnapshot> {
    diagonalize_at(h, k, f64::NAN)
}

fn diagonalize_at(h: &Operator, k: &Operator, s: f64) -> Result<SpectrumSnapshot> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    h.basis().check_same(&k.basis())?;
    let comm = h.matrix() * k.matrix() - k.matrix() * h.matrix();
    let comm_norm = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if comm_norm > COMMUTATION_TOL * h.norm_max().max(1.0) {
        return Err(Error::InvalidValue {
            key: "parity".into(),
            reason: format!("operator does not commute with H (‖[H,K]‖ = {comm_norm:e})"),
        });
    }

    let (values, vectors) = hermitian_eigen(h.matrix());
    let dim = values.len();
    let mut eigenvectors = Vec::with_capacity(dim);
    let mut sectors = Vec::with_capacity(dim);

    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && values[end] - values[end - 1] <= DEGENERACY_TOL {
            end += 1;
        }
        let block = vectors.columns(start, end - start).into_owned();
        let mut rotated: Vec<(Sector, DVector<C64>)> = if end - start == 1 {
            let v = block.column(0).into_owned();
            let kv = v.dotc(&(k.matrix() * &v));
            vec![(label(kv, start)?, v)]
        } else {
            rotate_cluster(&block, k, start)?
        };
        rotated.sort_by_key(|(sec, _)| *sec);
        for (sec, mut v) in rotated {
            fix_phase(&mut v);
            sectors.push(sec);
            eigenvectors.push(PureState::from_raw(h.basis(), v));
        }
        start = end;
    }

    Ok(SpectrumSnapshot {
        s,
        eigenvalues: values,
        eigenvectors,
        sectors,
    })
}

fn label(kv: C64, level: usize) -> Result<Sector> {
    let (sec, dist) = Sector::nearest(kv);
    if kv.norm() < 1.0 - SECTOR_TOL || dist > SECTOR_TOL {
        return Err(Error::AmbiguousSector {
            level,
            modulus: kv.norm(),
        });
    }
    Ok(sec)
}

/// Diagonalizes `V† K V` on a degenerate block. `K` is normal with spectrum
/// in `{±1, ±i}`, so the Hermitian combination `Re K + φ Im K` separates all
/// four values for irrational-looking `φ`.
fn rotate_cluster(
    block: &DMatrix<C64>,
    k: &Operator,
    first_level: usize,
) -> Result<Vec<(Sector, DVector<C64>)>> {
    let kc = block.adjoint() * k.matrix() * block;
    let re = (&kc + kc.adjoint()) * C64::new(0.5, 0.0);
    let im = (&kc - kc.adjoint()) * C64::new(0.0, -0.5);
    let probe = re + im * C64::new(0.577_215_664_9, 0.0);
    let (_, w) = hermitian_eigen(&probe);
    let mut out = Vec::with_capacity(block.ncols());
    for j in 0..block.ncols() {
        let v = block * w.column(j);
        let kv = v.dotc(&(k.matrix() * &v));
        out.push((label(kv, first_level + j)?, v));
    }
    Ok(out)
}

/// Snapshots on the uniform grid `s_i = i / (n_points - 1)`.
#[derive(Clone, Debug)]
pub struct SpectrumSweep {
    pub schedule: AnnealSchedule,
    pub snapshots: Vec<SpectrumSnapshot>,
}

pub fn snapshot_at(schedule: &AnnealSchedule, s: f64, k: &Operator) -> Result<SpectrumSnapshot> {
    let h = schedule.endpoints().at_fraction(s);
    diagonalize_at(&h, k, s)
}

pub fn sweep_spectrum(schedule: &AnnealSchedule, n_points: usize) -> Result<SpectrumSweep> {
    if n_points < 2 {
        return Err(Error::InvalidValue {
            key: "n_points".into(),
            reason: format!("need at least 2 grid points, got {n_points}"),
        });
    }
    let k = parity_operator(schedule.basis());
    let ends = schedule.endpoints();
    let last = (n_points - 1) as f64;
    let snapshots = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / last;
            diagonalize_at(&ends.at_fraction(s), &k, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep {
        schedule: *schedule,
        snapshots,
    })
}

/// Bracket `[s_lo, s_hi]` containing a change of the ground-level sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingInterval {
    pub s_lo: f64,
    pub s_hi: f64,
    pub sector_before: Sector,
    pub sector_after: Sector,
}

impl CrossingInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.s_lo + self.s_hi)
    }
}

/// Every grid-adjacent flip of the ground sector, bisected to
/// [`CROSSING_RESOLUTION`].
pub fn detect_ground_crossing(sweep: &SpectrumSweep) -> Result<Vec<CrossingInterval>> {
    let k = parity_operator(sweep.schedule.basis());
    let mut out = Vec::new();
    for pair in sweep.snapshots.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.ground_sector() == b.ground_sector() {
            continue;
        }
        let (mut lo, mut hi) = (a.s, b.s);
        let before = a.ground_sector();
        while hi - lo > CROSSING_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if snapshot_at(&sweep.schedule, mid, &k)?.ground_sector() == before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(CrossingInterval {
            s_lo: lo,
            s_hi: hi,
            sector_before: before,
            sector_after: b.ground_sector(),
        });
    }
    Ok(out)
}

/// Adiabatic-condition value `|⟨j|∂_t H|0⟩| / Δ_j²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdiabaticMetric {
    Finite(f64),
    /// `Δ_j` vanishes: the levels cross at this point.
    Crossing,
}

impl AdiabaticMetric {
    pub fn value(&self) -> Option<f64> {
        match self {
            AdiabaticMetric::Finite(v) => Some(*v),
            AdiabaticMetric::Crossing => None,
        }
    }
}

pub fn adiabatic_metric(schedule: &AnnealSchedule, t: f64, level: usize) -> Result<AdiabaticMetric> {
    let h = crate::hamiltonians::anneal_hamiltonian(schedule, t)?;
    let dim = schedule.basis().dim();
    if level == 0 || level >= dim {
        return Err(Error::InvalidValue {
            key: "level".into(),
            reason: format!("level index must be in 1..{dim}, got {level}"),
        });
    }
    let snap = diagonalize_at(&h, &parity_operator(schedule.basis()), t / schedule.t_anneal())?;
    let gap = snap.gap(level);
    if gap <= DEGENERACY_TOL {
        return Ok(AdiabaticMetric::Crossing);
    }
    let dh = schedule_derivative(schedule);
    let ground = snap.eigenvectors[0].amplitudes();
    let excited = snap.eigenvectors[level].amplitudes();
    let element = excited.dotc(&(dh.matrix() * ground));
    Ok(AdiabaticMetric::Finite(element.norm() / (gap * gap)))
}
