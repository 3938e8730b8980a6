//! Unitary steps: ordered products of generator exponentials.

use num_complex::Complex64;

use crate::error::Result;
use crate::pauli::{ObservableSum, PauliString};

/// Generator of one rotation factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// Hermitian Pauli string `σ`; the factor is `exp(-i·θ·σ)`.
    Pauli(PauliString),
    /// Anti-hermitian operator `t`; the factor is `exp(θ·t)`.
    AntiHermitian { label: String, op: ObservableSum },
}

impl Generator {
    /// Hermitian `G` with the factor written as `exp(-i·θ·G)`.
    pub fn hermitian_form(&self) -> ObservableSum {
        match self {
            Generator::Pauli(p) => ObservableSum::from_pauli(*p),
            Generator::AntiHermitian { op, .. } => op.scale(Complex64::new(0.0, 1.0)),
        }
    }

    /// Number of Pauli-string rotations needed to implement the factor.
    pub fn pauli_rotation_count(&self) -> usize {
        match self {
            Generator::Pauli(_) => 1,
            Generator::AntiHermitian { op, .. } => op.len(),
        }
    }

    pub fn support(&self) -> u64 {
        match self {
            Generator::Pauli(p) => p.support(),
            Generator::AntiHermitian { op, .. } => op.support(),
        }
    }

    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        Ok(match self {
            Generator::Pauli(p) => Generator::Pauli(p.permute_qubits(perm)?),
            Generator::AntiHermitian { label, op } => Generator::AntiHermitian {
                label: label.clone(),
                op: op.permute_qubits(perm)?,
            },
        })
    }

    pub fn label(&self) -> String {
        match self {
            Generator::Pauli(p) => p.letters(),
            Generator::AntiHermitian { label, .. } => label.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    pub generator: Generator,
    pub angle: f64,
}

/// How a [`UnitaryStep`] is applied to a state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ApplicationMode {
    /// Apply the stored rotations one after another in canonical order.
    #[default]
    RotationProduct,
    /// Exponentiate the summed generator densely on its support.
    ExactGenerator,
}

/// The unitary emitted by one QITE solve for one term and one step size.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryStep {
    pub term_index: usize,
    pub dt: f64,
    pub rotations: Vec<Rotation>,
    /// `‖S·a − b‖` of the solve that produced the step.
    pub residual: f64,
    /// Rotations removed because their angle fell below the drop threshold.
    pub dropped: usize,
}

impl UnitaryStep {
    pub fn identity(term_index: usize) -> Self {
        Self {
            term_index,
            dt: 0.0,
            rotations: Vec::new(),
            residual: 0.0,
            dropped: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn pauli_rotation_count(&self) -> usize {
        self.rotations
            .iter()
            .map(|r| r.generator.pauli_rotation_count())
            .sum()
    }

    /// `Σ θ_I · G_I` as a hermitian operator.
    pub fn total_generator(&self, n_qubits: usize) -> Result<ObservableSum> {
        let mut acc = ObservableSum::zero(n_qubits);
        for r in &self.rotations {
            acc = acc.try_add(&r.generator.hermitian_form().scale_real(r.angle))?;
        }
        Ok(acc)
    }

    pub fn support(&self) -> u64 {
        self.rotations.iter().fold(0, |m, r| m | r.generator.support())
    }
}
