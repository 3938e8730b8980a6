//! Exact reference engines: dense diagonalisation, exact imaginary-time
//! evolution and ground-space fidelity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::linalg::hermitian_eigen;
use crate::pauli::{ObservableSum, DENSE_QUBIT_CAP};
use crate::statevector::StateVector;

/// Eigenvalues closer than this to the minimum count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// The lowest eigenspace of a Hamiltonian.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub basis: Vec<StateVector>,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.basis.len()
    }
}

fn check_cap(h: &ObservableSum) -> Result<()> {
    if h.n_qubits() > DENSE_QUBIT_CAP {
        return Err(QiteError::SizeCap {
            what: "exact diagonalisation",
            n: h.n_qubits(),
            max: DENSE_QUBIT_CAP,
        });
    }
    if !h.is_hermitian() {
        return Err(QiteError::NonHermitian);
    }
    Ok(())
}

/// Full spectrum, ascending.
pub fn spectrum(h: &ObservableSum) -> Result<Vec<f64>> {
    check_cap(h)?;
    Ok(hermitian_eigen(h.to_dense()?).0)
}

pub fn exact_ground(h: &ObservableSum) -> Result<GroundSpace> {
    check_cap(h)?;
    let n = h.n_qubits();
    let (values, vectors) = hermitian_eigen(h.to_dense()?);
    let energy = values[0];
    let basis = values
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v - energy <= DEGENERACY_TOL)
        .map(|(i, _)| StateVector::from_amplitudes(n, vectors.column(i).iter().copied().collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundSpace { energy, basis })
}

/// Ground space restricted to the computational-basis states accepted by `keep`.
///
/// Valid when the Hamiltonian conserves the selected subspace (particle
/// number, total spin projection and the like).
pub fn exact_ground_in_subspace<F>(h: &ObservableSum, keep: F) -> Result<GroundSpace>
where
    F: Fn(usize) -> bool,
{
    check_cap(h)?;
    let n = h.n_qubits();
    let indices: Vec<usize> = (0..1usize << n).filter(|&k| keep(k)).collect();
    if indices.is_empty() {
        return Err(QiteError::InvalidInput("empty subspace".into()));
    }
    let full = h.to_dense()?;
    let block = DMatrix::from_fn(indices.len(), indices.len(), |r, c| full[(indices[r], indices[c])]);
    let (values, vectors) = hermitian_eigen(block);
    let energy = values[0];
    let basis = values
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v - energy <= DEGENERACY_TOL)
        .map(|(i, _)| {
            let mut amps = vec![Complex64::default(); 1 << n];
            for (r, &k) in indices.iter().enumerate() {
                amps[k] = vectors[(r, i)];
            }
            StateVector::from_amplitudes(n, amps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundSpace { energy, basis })
}

/// Squared norm of the projection of `state` onto the ground space.
pub fn fidelity(state: &StateVector, gs: &GroundSpace) -> Result<f64> {
    let mut f = 0.0;
    for g in &gs.basis {
        f += g.inner(state)?.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Cached eigendecomposition for repeated exact imaginary-time evolution.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    n_qubits: usize,
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl ExactPropagator {
    pub fn new(h: &ObservableSum) -> Result<Self> {
        check_cap(h)?;
        let (values, vectors) = hermitian_eigen(h.to_dense()?);
        Ok(Self {
            n_qubits: h.n_qubits(),
            values,
            vectors,
        })
    }

    /// Normalised `exp(-τH)|ψ⟩`.
    pub fn evolve(&self, state: &StateVector, tau: f64) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        if tau < 0.0 {
            return Err(QiteError::InvalidInput(format!("negative imaginary time {tau}")));
        }
        if tau == 0.0 {
            return Ok(state.clone());
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        let shift = self.values[0];
        for (c, &l) in coeffs.iter_mut().zip(&self.values) {
            *c *= (-tau * (l - shift)).exp();
        }
        let out = &self.vectors * coeffs;
        if out.norm() < 1e-150 {
            return Err(QiteError::VanishingNorm);
        }
        StateVector::from_amplitudes(self.n_qubits, out.iter().copied().collect())
    }
}

pub fn exact_ite(state: &StateVector, h: &ObservableSum, tau: f64) -> Result<StateVector> {
    ExactPropagator::new(h)?.evolve(state, tau)
}
