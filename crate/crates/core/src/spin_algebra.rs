//! Collective-spin operators on the maximum-spin (Dicke) sector of `N` qubits.
//!
//! States are indexed by `i = 0..=N`, with magnetic quantum number
//! `m = S - i` and `S = N/2`. Every operator here is written in terms of the
//! summed Pauli operators `M_a = Σ_i σ_i^a = 2 J_a`, never the spin-`S`
//! generators directly.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance on `‖M - M†‖_max`, scaled by `max(1, ‖M‖_max)`.
const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-9;

/// The `N + 1` dimensional permutation-symmetric sector of `N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CollectiveBasis {
    n_qubits: usize,
}

impl CollectiveBasis {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidValue {
                key: "n_qubits".into(),
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Total spin `S = N/2`.
    pub fn spin(&self) -> f64 {
        self.n_qubits as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m_of(&self, index: usize) -> f64 {
        self.spin() - index as f64
    }

    /// Basis index of magnetic quantum number `m`, if it lies on the ladder.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let i = self.spin() - m;
        let r = i.round();
        if (i - r).abs() > 1e-12 || r < 0.0 || r as usize >= self.dim() {
            None
        } else {
            Some(r as usize)
        }
    }

    pub fn has_integer_spin(&self) -> bool {
        self.n_qubits % 2 == 0
    }

    /// True when `S` is an odd integer, the case where the non-stoquastic
    /// driver puts the initial ground state in the wrong parity sector.
    pub fn has_odd_integer_spin(&self) -> bool {
        self.n_qubits % 4 == 2
    }

    pub(crate) fn check_same(&self, other: &CollectiveBasis) -> Result<()> {
        if self != other {
            Err(Error::BasisMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for CollectiveBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} (S={})", self.n_qubits, self.spin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense complex operator on a [`CollectiveBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    basis: CollectiveBasis,
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn from_matrix(basis: CollectiveBasis, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self::wrap(basis, matrix))
    }

    fn wrap(basis: CollectiveBasis, matrix: DMatrix<C64>) -> Self {
        let scale = max_abs(&matrix).max(1.0);
        let hermitian = hermitian_deviation(&matrix) < HERMITIAN_TOL * scale;
        Self {
            basis,
            matrix,
            hermitian,
        }
    }

    /// Wraps a matrix known to be Hermitian up to rounding, projecting out the
    /// anti-Hermitian residue.
    pub(crate) fn hermitian_from(basis: CollectiveBasis, matrix: DMatrix<C64>) -> Self {
        let sym = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        Self {
            basis,
            matrix: sym,
            hermitian: true,
        }
    }

    pub fn identity(basis: CollectiveBasis) -> Self {
        Self::hermitian_from(basis, DMatrix::identity(basis.dim(), basis.dim()))
    }

    pub fn zeros(basis: CollectiveBasis) -> Self {
        Self::hermitian_from(basis, DMatrix::zeros(basis.dim(), basis.dim()))
    }

    pub fn basis(&self) -> CollectiveBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `‖self - other‖_max`.
    pub fn distance(&self, other: &Operator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn adjoint(&self) -> Operator {
        Self::wrap(self.basis, self.matrix.adjoint())
    }

    pub fn scaled(&self, factor: f64) -> Operator {
        Self {
            basis: self.basis,
            matrix: &self.matrix * C64::new(factor, 0.0),
            hermitian: self.hermitian,
        }
    }

    pub fn scaled_complex(&self, factor: C64) -> Operator {
        Self::wrap(self.basis, &self.matrix * factor)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `self · v` for a raw amplitude vector.
    pub fn apply(&self, state: &PureState) -> Result<DVector<C64>> {
        self.basis.check_same(&state.basis)?;
        Ok(&self.matrix * &state.amplitudes)
    }
}

fn combine(a: &Operator, b: &Operator, matrix: DMatrix<C64>, keep_hermitian: bool) -> Operator {
    assert_eq!(a.basis, b.basis, "operator basis mismatch");
    if keep_hermitian && a.hermitian && b.hermitian {
        Operator {
            basis: a.basis,
            matrix,
            hermitian: true,
        }
    } else {
        Operator::wrap(a.basis, matrix)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        combine(self, rhs, &self.matrix + &rhs.matrix, true)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        combine(self, rhs, &self.matrix - &rhs.matrix, true)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        combine(self, rhs, &self.matrix * &rhs.matrix, false)
    }
}

/// Normalized pure state in the `|S, m⟩` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    basis: CollectiveBasis,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(basis: CollectiveBasis, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() >= NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(basis: CollectiveBasis, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(basis, amplitudes / C64::new(norm, 0.0))
    }

    pub(crate) fn from_raw(basis: CollectiveBasis, amplitudes: DVector<C64>) -> Self {
        Self { basis, amplitudes }
    }

    pub fn basis_state(basis: CollectiveBasis, index: usize) -> Self {
        let mut v = DVector::zeros(basis.dim());
        v[index] = C64::new(1.0, 0.0);
        Self {
            basis,
            amplitudes: v,
        }
    }

    /// `|S, m⟩`; panics if `m` is not on the ladder.
    pub fn from_m(basis: CollectiveBasis, m: f64) -> Self {
        let index = basis
            .index_of(m)
            .unwrap_or_else(|| panic!("m = {m} is not a level of {basis}"));
        Self::basis_state(basis, index)
    }

    pub fn basis(&self) -> CollectiveBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.basis.check_same(&other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// `M_a = Σ_i σ_i^a` restricted to the maximum-spin sector.
pub fn magnetization_operator(basis: CollectiveBasis, axis: Axis) -> Operator {
    let dim = basis.dim();
    let s = basis.spin();
    // J_+ |m⟩ = sqrt(S(S+1) - m(m+1)) |m+1⟩; |m+1⟩ sits one index lower.
    let mut raise = DMatrix::<C64>::zeros(dim, dim);
    for col in 1..dim {
        let m = basis.m_of(col);
        raise[(col - 1, col)] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let matrix = match axis {
        Axis::X => &raise + &lower,
        Axis::Y => (&raise - &lower) * C64::new(0.0, -1.0),
        Axis::Z => DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::new(2.0 * basis.m_of(r), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    };
    Operator::hermitian_from(basis, matrix)
}

/// `Σ_i σ_i^-`, the collective lowering operator `J_-`.
pub fn lowering_operator(basis: CollectiveBasis) -> Operator {
    let mx = magnetization_operator(basis, Axis::X);
    let my = magnetization_operator(basis, Axis::Y);
    (&mx - &my.scaled_complex(C64::new(0.0, 1.0))).scaled(0.5)
}

/// The conserved parity `K = exp(i π/2 Σ σ_x) = exp(i π J_x)`.
pub fn parity_operator(basis: CollectiveBasis) -> Operator {
    let mx = magnetization_operator(basis, Axis::X);
    let (values, vectors) = hermitian_eigen(mx.matrix());
    // Eigenvalues of M_x are the integers 2m; exp(iπm) = i^(2m).
    let phases: Vec<C64> = values
        .iter()
        .map(|&twice_m| match (twice_m.round() as i64).rem_euclid(4) {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        })
        .collect();
    let diag = DMatrix::from_diagonal(&DVector::from_vec(phases));
    let k = &vectors * diag * vectors.adjoint();
    if basis.has_integer_spin() {
        Operator::hermitian_from(basis, k)
    } else {
        Operator::wrap(basis, k)
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.basis.check_same(&b.basis)?;
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Ok(Operator::wrap(a.basis, m))
}

/// `⟨ψ|op|ψ⟩`.
pub fn expectation(op: &Operator, state: &PureState) -> Result<C64> {
    op.basis.check_same(&state.basis)?;
    Ok(state.amplitudes.dotc(&(&op.matrix * &state.amplitudes)))
}

/// Minimal eigenvalue and a deterministic normalized eigenvector.
///
/// Within a degenerate ground space the returned vector is the projection of
/// the basis state `|i⟩` with the largest projector weight (lowest `i` on ties),
/// then phased so its largest amplitude is real and positive.
pub fn lowest_eigenpair(op: &Operator) -> Result<(f64, PureState)> {
    if !op.hermitian {
        return Err(Error::NotHermitian {
            deviation: op.hermitian_deviation(),
        });
    }
    let (values, vectors) = hermitian_eigen(&op.matrix);
    let e0 = values[0];
    let cluster = values
        .iter()
        .take_while(|&&v| v - e0 <= DEGENERACY_TOL)
        .count();
    let mut v = if cluster == 1 {
        vectors.column(0).into_owned()
    } else {
        let sub = vectors.columns(0, cluster);
        let proj = &sub * sub.adjoint();
        let weights: Vec<f64> = (0..proj.nrows()).map(|i| proj[(i, i)].re).collect();
        let max = weights.iter().cloned().fold(f64::MIN, f64::max);
        let pick = weights.iter().position(|&w| w >= max - 1e-12).unwrap();
        let col = proj.column(pick).into_owned();
        let n = col.norm();
        col / C64::new(n, 0.0)
    };
    fix_phase(&mut v);
    Ok((e0, PureState::from_raw(op.basis, v)))
}

/// Projector onto the eigenspace of the lowest eigenvalue, with levels
/// within [`DEGENERACY_TOL`] counted as degenerate.
pub fn ground_space_projector(op: &Operator) -> Result<DMatrix<C64>> {
    if !op.hermitian {
        return Err(Error::NotHermitian {
            deviation: op.hermitian_deviation(),
        });
    }
    let (values, vectors) = hermitian_eigen(&op.matrix);
    let cluster = values
        .iter()
        .take_while(|&&v| v - values[0] <= DEGENERACY_TOL)
        .count();
    let sub = vectors.columns(0, cluster);
    Ok(&sub * sub.adjoint())
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Rotates the global phase so the largest-modulus amplitude (first on ties)
/// is real and positive.
pub(crate) fn fix_phase(v: &mut DVector<C64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let lead = v.iter().position(|z| z.norm() >= max - 1e-10).unwrap();
    let phase = v[lead].conj() / v[lead].norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}
