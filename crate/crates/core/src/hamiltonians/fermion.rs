//! Fermionic operators and the Jordan–Wigner map.
//!
//! Spin orbitals are ordered `mode = 2·site + spin` with spin up = 0.

use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::pauli::{ObservableSum, Pauli, PauliString};

/// A product of creation/annihilation factors times a coefficient.
///
/// Factors act as written: the first factor is leftmost in the product.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOp {
    /// `(mode, dagger)` pairs; `dagger = true` is a creation operator.
    pub factors: Vec<(usize, bool)>,
    pub coeff: Complex64,
}

impl FermionOp {
    pub fn new(coeff: f64, factors: &[(usize, bool)]) -> Self {
        Self {
            factors: factors.to_vec(),
            coeff: Complex64::new(coeff, 0.0),
        }
    }

    /// `a†_p a_q`.
    pub fn hop(coeff: f64, p: usize, q: usize) -> Self {
        Self::new(coeff, &[(p, true), (q, false)])
    }

    pub fn number(p: usize) -> Self {
        Self::hop(1.0, p, p)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self.factors.iter().rev().map(|&(m, d)| (m, !d)).collect(),
            coeff: self.coeff.conj(),
        }
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.factors.iter().map(|&(m, _)| m).max()
    }
}

/// Jordan–Wigner images of `a_p` and `a†_p`, cached per register.
#[derive(Clone, Debug)]
pub struct JordanWigner {
    n_modes: usize,
    lowering: Vec<ObservableSum>,
    raising: Vec<ObservableSum>,
}

impl JordanWigner {
    pub fn new(n_modes: usize) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, 0.5);
        let mut lowering = Vec::with_capacity(n_modes);
        let mut raising = Vec::with_capacity(n_modes);
        for p in 0..n_modes {
            let string = |top: Pauli| {
                let mut ops: Vec<(usize, Pauli)> = (0..p).map(|q| (q, Pauli::Z)).collect();
                ops.push((p, top));
                PauliString::from_ops(n_modes, &ops).expect("mode inside register")
            };
            let x = string(Pauli::X);
            let y = string(Pauli::Y);
            lowering.push(ObservableSum::from_terms(n_modes, [(half, x), (half_i, y)]).expect("same register"));
            raising.push(ObservableSum::from_terms(n_modes, [(half, x), (-half_i, y)]).expect("same register"));
        }
        Self {
            n_modes,
            lowering,
            raising,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn map(&self, op: &FermionOp) -> Result<ObservableSum> {
        let mut acc = ObservableSum::identity(self.n_modes, 1.0).scale(op.coeff);
        for &(m, dagger) in &op.factors {
            if m >= self.n_modes {
                return Err(QiteError::IndexOutOfRange {
                    index: m,
                    limit: self.n_modes,
                });
            }
            let image = if dagger { &self.raising[m] } else { &self.lowering[m] };
            acc = acc.try_mul(image)?;
        }
        Ok(acc)
    }

    pub fn map_sum<'a, I>(&self, ops: I) -> Result<ObservableSum>
    where
        I: IntoIterator<Item = &'a FermionOp>,
    {
        let mut terms = Vec::new();
        for op in ops {
            let image = self.map(op)?;
            terms.extend(image.terms().iter().map(|&(p, c)| (c, p)));
        }
        ObservableSum::from_terms(self.n_modes, terms)
    }
}

pub fn jordan_wigner(op: &FermionOp, n_modes: usize) -> Result<ObservableSum> {
    JordanWigner::new(n_modes).map(op)
}

/// `Σ_p a†_p a_p` mapped to qubits.
pub fn number_operator(n_modes: usize) -> ObservableSum {
    let jw = JordanWigner::new(n_modes);
    let ops: Vec<FermionOp> = (0..n_modes).map(FermionOp::number).collect();
    jw.map_sum(&ops).expect("modes inside register")
}

/// Open-chain Hubbard model with unit hopping.
pub fn build_hubbard(n_sites: usize, u: f64) -> Result<ObservableSum> {
    if n_sites == 0 {
        return Err(QiteError::InvalidInput("Hubbard chain needs at least one site".into()));
    }
    let n_modes = 2 * n_sites;
    let mut ops = Vec::new();
    for i in 0..n_sites.saturating_sub(1) {
        for spin in 0..2 {
            let a = 2 * i + spin;
            let b = 2 * (i + 1) + spin;
            ops.push(FermionOp::hop(-1.0, a, b));
            ops.push(FermionOp::hop(-1.0, b, a));
        }
    }
    for i in 0..n_sites {
        let (up, down) = (2 * i, 2 * i + 1);
        ops.push(FermionOp::new(u, &[(up, true), (up, false), (down, true), (down, false)]));
    }
    JordanWigner::new(n_modes).map_sum(&ops)
}
