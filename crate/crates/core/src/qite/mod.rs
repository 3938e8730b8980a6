//! The QITE inner step: linear-system assembly, pseudoinverse solve and
//! unitary-step emission.

mod ledger;
mod system;

pub use ledger::{LedgerKey, MeasurementLedger, Purpose};
pub use system::{
    build_system, equivalence_check, qite_step, solve, EquivalenceReport, QiteLinearSystem, SolverOptions,
    TermMoments, TermSolver,
};

use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::hamiltonians::OperatorPool;
use crate::pauli::{ObservableSum, PauliString};
use crate::step::Generator;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// `c = 1 − 2Δτ⟨h⟩`, `b_I = 2 Im⟨σ_I h⟩ / √c`.
    PauliOrder1,
    /// Adds the `Δτ²` terms of `e^{−2Δτh}` to `c` and `b`.
    #[default]
    PauliOrder2,
    /// Anti-hermitian generators; every measured operator is hermitian.
    AntiHermitianOrder2,
}

impl Formulation {
    pub fn is_second_order(self) -> bool {
        !matches!(self, Formulation::PauliOrder1)
    }

    pub fn uses_pauli_basis(self) -> bool {
        !matches!(self, Formulation::AntiHermitianOrder2)
    }
}

/// Generator basis for one partition term.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    /// Hermitian strings `σ_I` with real phase.
    Pauli(Vec<PauliString>),
    /// Labelled anti-hermitian operators `t_I`.
    AntiHermitian(Vec<(String, ObservableSum)>),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Pauli(v) => v.len(),
            Basis::AntiHermitian(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Basis::Pauli(v) => v.iter().map(|p| p.letters()).collect(),
            Basis::AntiHermitian(v) => v.iter().map(|(l, _)| l.clone()).collect(),
        }
    }

    pub fn generator(&self, i: usize) -> Generator {
        match self {
            Basis::Pauli(v) => Generator::Pauli(v[i]),
            Basis::AntiHermitian(v) => Generator::AntiHermitian {
                label: v[i].0.clone(),
                op: v[i].1.clone(),
            },
        }
    }

    pub fn from_pool(pool: &OperatorPool) -> Self {
        Basis::AntiHermitian(pool.elements.iter().map(|e| (e.label.clone(), e.op.clone())).collect())
    }

    /// `t_I = −iσ_I` for every string of a Pauli basis.
    pub fn anti_hermitian_from_paulis(strings: &[PauliString]) -> Self {
        Basis::AntiHermitian(
            strings
                .iter()
                .map(|p| (p.letters(), ObservableSum::from_pauli(*p).scale(Complex64::new(0.0, -1.0))))
                .collect(),
        )
    }

    /// Relabels qubits of every generator.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        Ok(match self {
            Basis::Pauli(v) => Basis::Pauli(v.iter().map(|p| p.permute_qubits(perm)).collect::<Result<_>>()?),
            Basis::AntiHermitian(v) => Basis::AntiHermitian(
                v.iter()
                    .map(|(l, op)| Ok((l.clone(), op.permute_qubits(perm)?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn n_qubits(&self) -> Option<usize> {
        match self {
            Basis::Pauli(v) => v.first().map(|p| p.n_qubits()),
            Basis::AntiHermitian(v) => v.first().map(|(_, op)| op.n_qubits()),
        }
    }

    fn check(&self, formulation: Formulation, n_qubits: usize) -> Result<()> {
        if self.is_empty() {
            return Err(QiteError::InvalidInput("empty generator basis".into()));
        }
        if self.n_qubits() != Some(n_qubits) {
            return Err(QiteError::DimensionMismatch {
                expected: n_qubits,
                found: self.n_qubits().unwrap_or(0),
            });
        }
        match (self, formulation.uses_pauli_basis()) {
            (Basis::Pauli(v), true) => {
                if let Some(p) = v.iter().find(|p| p.phase_exp() != 0) {
                    return Err(QiteError::InvalidGenerator(format!("{p} is not an unsigned string")));
                }
            }
            (Basis::AntiHermitian(v), false) => {
                if let Some((l, _)) = v.iter().find(|(_, op)| !op.is_antihermitian()) {
                    return Err(QiteError::InvalidGenerator(format!("{l} is not anti-hermitian")));
                }
            }
            _ => {
                return Err(QiteError::InvalidInput(format!(
                    "basis kind does not match formulation {formulation:?}"
                )))
            }
        }
        Ok(())
    }
}
