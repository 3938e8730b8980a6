//! Signed Pauli strings in symplectic form and weighted sums of them.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit plus a global
//! factor `i^phase`. The bit pair `(x, z)` selects `I`, `X`, `Z` or `Y` on a
//! qubit, with `(1, 1)` meaning `Y` itself (not `XZ`). Qubit `q` corresponds
//! to bit `q` of a computational-basis index, and text labels put qubit 0
//! leftmost.
//!
//! [`ObservableSum`] keeps its terms with the phase folded into complex
//! coefficients, deduplicated and sorted by ascending `(z_mask, x_mask)`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QiteError, Result};

/// Largest register for which dense matrices are produced.
pub const DENSE_QUBIT_CAP: usize = 10;

/// Coefficients with magnitude below this are removed after combination.
pub const PRUNE_TOL: f64 = 1e-14;

/// Tolerance used when classifying coefficients as real or imaginary.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// `i^k` for `k` in `0..4`.
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A Pauli operator `i^phase · ⊗_q P_q` on `n_qubits` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!((1..=64).contains(&n_qubits), "register size must be in 1..=64");
        Self {
            n_qubits,
            x: 0,
            z: 0,
            phase: 0,
        }
    }

    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        if !(1..=64).contains(&n_qubits) {
            return Err(QiteError::InvalidInput(format!(
                "register size {n_qubits} outside 1..=64"
            )));
        }
        let m = low_mask(n_qubits);
        if x_mask & !m != 0 || z_mask & !m != 0 {
            return Err(QiteError::InvalidInput(format!(
                "masks {x_mask:#x}/{z_mask:#x} exceed {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits,
            x: x_mask,
            z: z_mask,
            phase: phase_exp & 3,
        })
    }

    pub(crate) fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        Self {
            n_qubits,
            x,
            z,
            phase: 0,
        }
    }

    /// Parses labels like `"XIZY"`, `"-iXZ"` or `"+Y"`; qubit 0 is the first letter.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut rest = label.trim();
        let mut phase = 0u8;
        if let Some(r) = rest.strip_prefix('-') {
            phase = 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            if !r.is_empty() && r.chars().all(|c| Pauli::from_char(c).is_some()) {
                phase = (phase + 1) & 3;
                rest = r;
            }
        }
        let n = rest.chars().count();
        if n == 0 || n > 64 {
            return Err(QiteError::InvalidInput(format!("bad Pauli label {label:?}")));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, c) in rest.chars().enumerate() {
            let p = Pauli::from_char(c)
                .ok_or_else(|| QiteError::InvalidInput(format!("bad Pauli label {label:?}")))?;
            let (xb, zb) = p.bits();
            x |= (xb as u64) << q;
            z |= (zb as u64) << q;
        }
        Self::new(n, x, z, phase)
    }

    /// Builds a string from `(qubit, Pauli)` factors.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(QiteError::IndexOutOfRange {
                    index: q,
                    limit: n_qubits,
                });
            }
            let single = Self::single(n_qubits, q, p);
            s = s.compose(&single);
        }
        Ok(s)
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        assert!(qubit < n_qubits);
        let (xb, zb) = p.bits();
        Self {
            n_qubits,
            x: (xb as u64) << qubit,
            z: (zb as u64) << qubit,
            phase: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// The global factor `i^phase_exp`.
    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase)
    }

    pub fn pauli_at(&self, q: usize) -> Pauli {
        Pauli::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Same string with the phase reset to `i^0`.
    pub fn unsigned(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    pub fn with_phase(&self, phase_exp: u8) -> Self {
        Self {
            phase: phase_exp & 3,
            ..*self
        }
    }

    /// Hermitian iff the global factor is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn adjoint(&self) -> Self {
        Self {
            phase: (4 - self.phase) & 3,
            ..*self
        }
    }

    /// Product without the size check; callers guarantee equal registers.
    #[inline]
    pub(crate) fn compose(&self, rhs: &Self) -> Self {
        let x = self.x ^ rhs.x;
        let z = self.z ^ rhs.z;
        let k = self.phase as u32
            + rhs.phase as u32
            + (self.x & self.z).count_ones()
            + (rhs.x & rhs.z).count_ones()
            + 2 * (self.z & rhs.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        Self {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: (k & 3) as u8,
        }
    }

    /// Exact signed product `self · rhs`.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(self.compose(rhs))
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, rhs: &Self) -> Result<bool> {
        self.check_same(rhs)?;
        Ok(self.commutes_with(rhs))
    }

    #[inline]
    pub(crate) fn commutes_with(&self, rhs: &Self) -> bool {
        ((self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones()) % 2 == 0
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.n_qubits != rhs.n_qubits {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: rhs.n_qubits,
            });
        }
        Ok(())
    }

    /// Action on a computational basis state: `P|k> = factor · |k'>`.
    /// Returns `(k', exponent)` with `factor = i^exponent`.
    #[inline]
    pub fn apply_to_basis(&self, k: u64) -> (u64, u8) {
        let sign = ((self.z & k).count_ones() & 1) as u32 * 2;
        let e = self.phase as u32 + (self.x & self.z).count_ones() + sign;
        (k ^ self.x, (e & 3) as u8)
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_qubits {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: perm.len(),
            });
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, &target) in perm.iter().enumerate() {
            if target >= self.n_qubits {
                return Err(QiteError::IndexOutOfRange {
                    index: target,
                    limit: self.n_qubits,
                });
            }
            x |= ((self.x >> q) & 1) << target;
            z |= ((self.z >> q) & 1) << target;
        }
        Ok(Self { x, z, ..*self })
    }

    /// Site inversion: qubit `q` maps to `n - 1 - q`.
    pub fn reversed(&self) -> Self {
        let n = self.n_qubits as u32;
        let shift = 64 - n;
        Self {
            x: self.x.reverse_bits() >> shift,
            z: self.z.reverse_bits() >> shift,
            ..*self
        }
    }

    /// Ordering key used for every canonical iteration order.
    pub fn canonical_key(&self) -> (u64, u64) {
        (self.z, self.x)
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }

    /// Letters only, qubit 0 leftmost.
    pub fn letters(&self) -> String {
        (0..self.n_qubits).map(|q| self.pauli_at(q).as_char()).collect()
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(QiteError::SizeCap {
                what: "dense export",
                n: self.n_qubits,
                max: DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim as u64 {
            let (to, e) = self.apply_to_basis(k);
            m[(to as usize, k as usize)] = i_pow(e);
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

/// Weighted sum of Pauli strings with phases folded into the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSum {
    n_qubits: usize,
    terms: Vec<(PauliString, Complex64)>,
}

impl ObservableSum {
    /// The zero operator.
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_parts(
            n_qubits,
            [(PauliString::identity(n_qubits), Complex64::new(coeff, 0.0))],
        )
    }

    pub fn from_pauli(p: PauliString) -> Self {
        Self::from_parts(p.n_qubits, [(p, Complex64::new(1.0, 0.0))])
    }

    /// Builds a sum from `(coefficient, string)` pairs, folding phases and merging duplicates.
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
        for (c, p) in terms {
            if p.n_qubits != n_qubits {
                return Err(QiteError::DimensionMismatch {
                    expected: n_qubits,
                    found: p.n_qubits,
                });
            }
            *acc.entry((p.x, p.z)).or_default() += c * p.phase();
        }
        Ok(Self::from_map(n_qubits, acc))
    }

    /// Real-coefficient convenience constructor over labels.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(c, l)| PauliString::from_label(l).map(|p| (Complex64::new(c, 0.0), p)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed
            .first()
            .map(|(_, p)| p.n_qubits)
            .ok_or_else(|| QiteError::InvalidInput("empty label list".into()))?;
        Self::from_terms(n, parsed)
    }

    fn from_parts<I>(n_qubits: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
        for (p, c) in terms {
            *acc.entry((p.x, p.z)).or_default() += c * p.phase();
        }
        Self::from_map(n_qubits, acc)
    }

    fn from_map(n_qubits: usize, acc: HashMap<(u64, u64), Complex64>) -> Self {
        let mut terms: Vec<(PauliString, Complex64)> = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOL)
            .map(|((x, z), c)| (PauliString::from_masks(n_qubits, x, z), c))
            .collect();
        terms.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        Self { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order; every string has phase exponent 0.
    pub fn terms(&self) -> &[(PauliString, Complex64)] {
        &self.terms
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.iter().map(|(p, _)| p)
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        let key = p.canonical_key();
        self.terms
            .binary_search_by(|(q, _)| q.canonical_key().cmp(&key))
            .map(|i| self.terms[i].1 / p.phase())
            .unwrap_or_default()
    }

    /// Union of the supports of all non-identity terms.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |m, (p, _)| m | p.support())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.n_qubits,
            self.terms.iter().chain(other.terms.iter()).copied(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_parts(self.n_qubits, self.terms.iter().map(|&(p, c)| (p, c * factor)))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn negate(&self) -> Self {
        self.scale_real(-1.0)
    }

    /// Fully expanded product `self · other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut acc: HashMap<(u64, u64), Complex64> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let r = p.compose(q);
                *acc.entry((r.x, r.z)).or_default() += a * b * r.phase();
            }
        }
        Ok(Self::from_map(self.n_qubits, acc))
    }

    pub fn square(&self) -> Self {
        self.try_mul(self).expect("same register")
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|&(p, c)| (p, c.conj())).collect(),
        }
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.check_same(b)?;
        let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
        for (p, x) in &a.terms {
            for (q, y) in &b.terms {
                if p.commutes_with(q) {
                    continue;
                }
                let r = p.compose(q);
                *acc.entry((r.x, r.z)).or_default() += 2.0 * x * y * r.phase();
            }
        }
        Ok(Self::from_map(a.n_qubits, acc))
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(a: &Self, b: &Self) -> Result<Self> {
        a.check_same(b)?;
        let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
        for (p, x) in &a.terms {
            for (q, y) in &b.terms {
                if !p.commutes_with(q) {
                    continue;
                }
                let r = p.compose(q);
                *acc.entry((r.x, r.z)).or_default() += 2.0 * x * y * r.phase();
            }
        }
        Ok(Self::from_map(a.n_qubits, acc))
    }

    /// True when the operators commute exactly.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(Self::commutator(self, other)?.is_empty())
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| c.im.abs() <= HERMITICITY_TOL * c.norm().max(1.0))
    }

    pub fn is_antihermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| c.re.abs() <= HERMITICITY_TOL * c.norm().max(1.0))
    }

    /// Coefficient-wise comparison.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.terms.iter().all(|(_, c)| c.norm() <= tol),
            Err(_) => false,
        }
    }

    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| p.permute_qubits(perm).map(|q| (q, *c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(self.n_qubits, terms))
    }

    pub fn reversed(&self) -> Self {
        Self::from_parts(self.n_qubits, self.terms.iter().map(|(p, c)| (p.reversed(), *c)))
    }

    /// Same operator embedded in a register of `n_qubits` (must not shrink the support).
    pub fn embed(&self, n_qubits: usize) -> Result<Self> {
        if n_qubits < self.n_qubits && self.support() >> n_qubits != 0 {
            return Err(QiteError::DimensionMismatch {
                expected: self.n_qubits,
                found: n_qubits,
            });
        }
        Ok(Self::from_parts(
            n_qubits,
            self.terms
                .iter()
                .map(|(p, c)| (PauliString::from_masks(n_qubits, p.x, p.z), *c)),
        ))
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(QiteError::SizeCap {
                what: "dense export",
                n: self.n_qubits,
                max: DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for k in 0..dim as u64 {
                let (to, e) = p.apply_to_basis(k);
                m[(to as usize, k as usize)] += c * i_pow(e);
            }
        }
        Ok(m)
    }
}

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:+}", c.re)
    } else if c.re == 0.0 {
        format!("{:+}i", c.im)
    } else {
        format!("({:+}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for ObservableSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "+0 * {}", "I".repeat(self.n_qubits));
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} * {}", fmt_coeff(*c), p.letters())?;
        }
        Ok(())
    }
}
