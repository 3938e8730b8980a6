//! Dense statevector register.
//!
//! Amplitude index bit `q` holds qubit `q`. Every public mutation keeps the
//! state normalised; rotations are unitary so no renormalisation is applied
//! after them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{QiteError, Result};
use crate::linalg::expm_minus_i;
use crate::pauli::{i_pow, ObservableSum, PauliString, DENSE_QUBIT_CAP};
use crate::step::{ApplicationMode, Generator, Rotation, UnitaryStep};

/// Largest register this engine will allocate.
pub const MAX_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n_qubits));
        assert!(index < 1 << n_qubits);
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Basis state from a bitstring with qubit 0 leftmost, e.g. `"0110"`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let n = bits.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(QiteError::InvalidInput(format!("bad bitstring {bits:?}")));
        }
        let mut index = 0usize;
        for (q, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => index |= 1 << q,
                _ => return Err(QiteError::InvalidInput(format!("bad bitstring {bits:?}"))),
            }
        }
        Ok(Self::basis_state(n, index))
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(QiteError::InvalidInput(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let mut s = Self { n_qubits, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Haar-like random state from i.i.d. Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(n_qubits, amps).expect("gaussian vector is nonzero")
    }

    /// Random state with real amplitudes.
    pub fn random_real<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
            .collect();
        Self::from_amplitudes(n_qubits, amps).expect("gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(QiteError::VanishingNorm);
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_dim(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// In-place `exp(-iθP)|ψ⟩ = cos θ|ψ⟩ − i sin θ P|ψ⟩` for a hermitian string `P`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        self.check_dim(p.n_qubits())?;
        if !p.is_hermitian() {
            return Err(QiteError::InvalidGenerator(format!(
                "{p} has a non-real phase"
            )));
        }
        if theta == 0.0 {
            return Ok(());
        }
        let (s, c) = theta.sin_cos();
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let base = p.phase_exp() as u32 + p.y_count();
        let factor = |k: usize| -> Complex64 {
            let e = base + 2 * ((z & k).count_ones() & 1);
            i_pow(e as u8)
        };
        let minus_is = Complex64::new(0.0, -s);
        if x == 0 {
            for (k, a) in self.amps.iter_mut().enumerate() {
                *a *= c + minus_is * factor(k);
            }
            return Ok(());
        }
        let high = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for k in 0..self.amps.len() {
            if k & high != 0 {
                continue;
            }
            let j = k ^ x;
            let ak = self.amps[k];
            let aj = self.amps[j];
            // P|j⟩ = f(j)|k⟩ and P|k⟩ = f(k)|j⟩
            self.amps[k] = c * ak + minus_is * factor(j) * aj;
            self.amps[j] = c * aj + minus_is * factor(k) * ak;
        }
        Ok(())
    }

    pub fn rotated(&self, p: &PauliString, theta: f64) -> Result<Self> {
        let mut out = self.clone();
        out.apply_pauli_rotation(p, theta)?;
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩` for any signed string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<Complex64> {
        self.check_dim(p.n_qubits())?;
        Ok(self.pauli_expectation_unchecked(p))
    }

    pub(crate) fn pauli_expectation_unchecked(&self, p: &PauliString) -> Complex64 {
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let mut even = Complex64::default();
        let mut odd = Complex64::default();
        for (k, a) in self.amps.iter().enumerate() {
            let t = self.amps[k ^ x].conj() * a;
            if (z & k).count_ones() & 1 == 0 {
                even += t;
            } else {
                odd += t;
            }
        }
        (even - odd) * i_pow(p.phase_exp().wrapping_add(p.y_count() as u8))
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, obs: &ObservableSum) -> Result<Complex64> {
        self.check_dim(obs.n_qubits())?;
        Ok(obs
            .terms()
            .iter()
            .map(|(p, c)| c * self.pauli_expectation_unchecked(p))
            .sum())
    }

    /// Real part of `⟨ψ|O|ψ⟩`, for hermitian observables.
    pub fn energy(&self, obs: &ObservableSum) -> Result<f64> {
        Ok(self.expectation(obs)?.re)
    }

    /// Unnormalised `O|ψ⟩`.
    pub fn apply_observable(&self, obs: &ObservableSum) -> Result<Vec<Complex64>> {
        self.check_dim(obs.n_qubits())?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (p, c) in obs.terms() {
            for (k, a) in self.amps.iter().enumerate() {
                let (to, e) = p.apply_to_basis(k as u64);
                out[to as usize] += c * i_pow(e) * a;
            }
        }
        Ok(out)
    }

    /// Applies a dense unitary acting on `qubits` (local bit `j` is `qubits[j]`).
    pub fn apply_dense_on(&mut self, qubits: &[usize], u: &DMatrix<Complex64>) -> Result<()> {
        let d = qubits.len();
        if u.nrows() != 1 << d || u.ncols() != 1 << d {
            return Err(QiteError::InvalidInput("unitary size does not match qubit list".into()));
        }
        let mut dmask = 0usize;
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(QiteError::IndexOutOfRange {
                    index: q,
                    limit: self.n_qubits,
                });
            }
            dmask |= 1 << q;
        }
        let offsets: Vec<usize> = (0..1usize << d)
            .map(|l| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (l >> j) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | 1 << q)
            })
            .collect();
        let mut local = vec![Complex64::default(); 1 << d];
        for base in 0..self.amps.len() {
            if base & dmask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::default();
                for (c, v) in local.iter().enumerate() {
                    acc += u[(r, c)] * v;
                }
                self.amps[base | off] = acc;
            }
        }
        Ok(())
    }

    /// `exp(-iθG)` for a hermitian operator, applied densely on its support.
    pub fn apply_hermitian_exponential(&mut self, g: &ObservableSum, theta: f64) -> Result<()> {
        self.check_dim(g.n_qubits())?;
        let support = g.support();
        let qubits: Vec<usize> = (0..self.n_qubits).filter(|q| (support >> q) & 1 == 1).collect();
        if qubits.len() > DENSE_QUBIT_CAP {
            return Err(QiteError::SizeCap {
                what: "exact generator exponential",
                n: qubits.len(),
                max: DENSE_QUBIT_CAP,
            });
        }
        if qubits.is_empty() {
            // Only an identity component: a global phase.
            let phase = Complex64::from_polar(1.0, -theta * g.coefficient(&PauliString::identity(self.n_qubits)).re);
            self.amps.iter_mut().for_each(|a| *a *= phase);
            return Ok(());
        }
        let local = compress(g, &qubits)?;
        let u = expm_minus_i(&local.to_dense()?, theta);
        self.apply_dense_on(&qubits, &u)
    }

    pub fn apply_rotation(&mut self, rot: &Rotation) -> Result<()> {
        match &rot.generator {
            Generator::Pauli(p) => self.apply_pauli_rotation(p, rot.angle),
            Generator::AntiHermitian { op, .. } => {
                let g = op.scale(Complex64::new(0.0, 1.0));
                let commuting = g.terms().iter().enumerate().all(|(i, (p, _))| {
                    g.terms()[i + 1..].iter().all(|(q, _)| p.commutes_with(q))
                });
                if commuting {
                    for (p, c) in g.terms() {
                        self.apply_pauli_rotation(p, rot.angle * c.re)?;
                    }
                    Ok(())
                } else {
                    self.apply_hermitian_exponential(&g, rot.angle)
                }
            }
        }
    }

    pub fn apply_unitary_step(&mut self, step: &UnitaryStep, mode: ApplicationMode) -> Result<()> {
        match mode {
            ApplicationMode::RotationProduct => {
                for r in &step.rotations {
                    self.apply_rotation(r)?;
                }
                Ok(())
            }
            ApplicationMode::ExactGenerator => {
                if step.is_empty() {
                    return Ok(());
                }
                let g = step.total_generator(self.n_qubits)?;
                self.apply_hermitian_exponential(&g, 1.0)
            }
        }
    }

    /// Applies a single-qubit gate given as a row-major 2×2 matrix.
    pub fn apply_single_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        if q >= self.n_qubits {
            return Err(QiteError::IndexOutOfRange {
                index: q,
                limit: self.n_qubits,
            });
        }
        let bit = 1usize << q;
        for k in 0..self.amps.len() {
            if k & bit != 0 {
                continue;
            }
            let a0 = self.amps[k];
            let a1 = self.amps[k | bit];
            self.amps[k] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[k | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        self.check_dim(perm.len())?;
        let mut seen = 0usize;
        for &t in perm {
            if t >= self.n_qubits || seen >> t & 1 == 1 {
                return Err(QiteError::InvalidInput(format!("{perm:?} is not a permutation")));
            }
            seen |= 1 << t;
        }
        let mut amps = vec![Complex64::default(); self.amps.len()];
        for (k, a) in self.amps.iter().enumerate() {
            let moved = perm
                .iter()
                .enumerate()
                .fold(0usize, |acc, (q, &t)| acc | (k >> q & 1) << t);
            amps[moved] = *a;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// Little-endian interleaved `re, im` doubles.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(n_qubits: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 16 << n_qubits {
            return Err(QiteError::InvalidInput("amplitude dump has the wrong length".into()));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Self::from_amplitudes(n_qubits, amps)
    }
}

/// Restricts an operator to the listed qubits (local bit `j` is `qubits[j]`).
fn compress(g: &ObservableSum, qubits: &[usize]) -> Result<ObservableSum> {
    let pick = |mask: u64| -> u64 {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | ((mask >> q) & 1) << j)
    };
    let terms = g
        .terms()
        .iter()
        .map(|(p, c)| PauliString::new(qubits.len(), pick(p.x_mask()), pick(p.z_mask()), 0).map(|q| (*c, q)))
        .collect::<Result<Vec<_>>>()?;
    ObservableSum::from_terms(qubits.len(), terms)
}
