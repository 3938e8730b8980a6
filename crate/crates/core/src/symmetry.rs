//! Z2 stabilizer symmetries, coset basis reduction and site-inversion transport.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QiteError, Result};
use crate::hamiltonians::SymmetryLink;
use crate::pauli::{ObservableSum, PauliString, DENSE_QUBIT_CAP};
use crate::statevector::StateVector;
use crate::step::{Rotation, UnitaryStep};

/// Tolerance on `|⟨R⟩| = 1` before an inversion shortcut is trusted.
pub const INVERSION_TOL: f64 = 1e-10;

/// Commuting, independent Pauli symmetries with a chosen ±1 sector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymmetryGroup {
    pub generators: Vec<PauliString>,
    pub sector: Vec<i8>,
}

fn symplectic(p: &PauliString) -> u128 {
    p.x_mask() as u128 | (p.z_mask() as u128) << 64
}

/// Incremental GF(2) row echelon form over symplectic vectors.
#[derive(Default)]
struct Gf2Basis {
    rows: Vec<u128>,
}

impl Gf2Basis {
    fn reduce(&self, mut v: u128) -> u128 {
        for &r in &self.rows {
            let pivot = 127 - r.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current rows.
    fn insert(&mut self, v: u128) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        // Keep the rows fully reduced so `reduce` works in one pass.
        for i in 0..self.rows.len() {
            let pivot = 127 - self.rows[i].leading_zeros();
            for j in 0..self.rows.len() {
                if j != i && self.rows[j] >> pivot & 1 == 1 {
                    self.rows[j] ^= self.rows[i];
                }
            }
        }
        true
    }
}

/// All Pauli strings on `n` qubits commuting with every term of `h`, in canonical order.
pub fn commuting_strings(h: &ObservableSum) -> Result<Vec<PauliString>> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_CAP {
        return Err(QiteError::SizeCap {
            what: "symmetry enumeration",
            n,
            max: DENSE_QUBIT_CAP,
        });
    }
    let terms: Vec<PauliString> = h.strings().copied().collect();
    let dim = 1u64 << n;
    Ok((0..dim)
        .into_par_iter()
        .flat_map_iter(|z| {
            let terms = &terms;
            (0..dim).filter_map(move |x| {
                let s = PauliString::from_masks(n, x, z);
                terms.iter().all(|t| t.commutes_with(&s)).then_some(s)
            })
        })
        .collect())
}

/// Greedy maximal set of independent, mutually commuting symmetries of `h`.
pub fn find_z2_symmetries(h: &ObservableSum) -> Result<SymmetryGroup> {
    let mut basis = Gf2Basis::default();
    let mut generators: Vec<PauliString> = Vec::new();
    for s in commuting_strings(h)? {
        if s.is_identity() || !generators.iter().all(|g| g.commutes_with(&s)) {
            continue;
        }
        if basis.insert(symplectic(&s)) {
            generators.push(s);
        }
    }
    let sector = vec![1; generators.len()];
    Ok(SymmetryGroup { generators, sector })
}

impl SymmetryGroup {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// All `2^k` group elements, signed so that sector states have eigenvalue +1.
    pub fn group_elements(&self, n_qubits: usize) -> Vec<PauliString> {
        let mut out = vec![PauliString::identity(n_qubits)];
        for (g, &s) in self.generators.iter().zip(&self.sector) {
            let signed = if s < 0 { g.with_phase(g.phase_exp() + 2) } else { *g };
            let more: Vec<PauliString> = out.iter().map(|e| e.compose(&signed)).collect();
            out.extend(more);
        }
        out
    }

    /// Keeps the generators for which every state is an eigenstate with a
    /// common eigenvalue, recording that eigenvalue as the sector.
    pub fn adapted_to(&self, states: &[StateVector], tol: f64) -> Result<Self> {
        let mut generators = Vec::new();
        let mut sector = Vec::new();
        for g in &self.generators {
            let mut sign = None;
            let mut ok = !states.is_empty();
            for s in states {
                let v = s.pauli_expectation(g)?.re;
                let this = if v > 1.0 - tol {
                    1
                } else if v < -1.0 + tol {
                    -1
                } else {
                    ok = false;
                    break;
                };
                if *sign.get_or_insert(this) != this {
                    ok = false;
                    break;
                }
            }
            if ok {
                generators.push(*g);
                sector.push(sign.expect("at least one state"));
            }
        }
        Ok(Self { generators, sector })
    }

    /// Signed expectation of every generator (1 for states in the sector).
    pub fn sector_expectations(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.generators
            .iter()
            .zip(&self.sector)
            .map(|(g, &s)| Ok(s as f64 * state.pauli_expectation(g)?.re))
            .collect()
    }
}

/// Every string supported on `domain`, identity first, in canonical order.
pub fn domain_strings(domain: &[usize], n_qubits: usize) -> Vec<PauliString> {
    let d = domain.len();
    let spread = |local: u64| -> u64 {
        domain
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | (local >> j & 1) << q)
    };
    let mut out: Vec<PauliString> = (0..1u64 << d)
        .flat_map(|z| (0..1u64 << d).map(move |x| (x, z)))
        .map(|(x, z)| PauliString::from_masks(n_qubits, spread(x), spread(z)))
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    out
}

/// Cosets of the normalizer strings on `domain`, each sorted canonically.
///
/// Two strings share a coset when they differ by a stabilizer element and
/// both lie on the domain. The identity coset comes first.
pub fn domain_cosets(domain: &[usize], n_qubits: usize, group: &SymmetryGroup) -> Vec<Vec<PauliString>> {
    let candidates: Vec<PauliString> = domain_strings(domain, n_qubits)
        .into_iter()
        .filter(|s| group.generators.iter().all(|g| g.commutes_with(s)))
        .collect();
    let elements: Vec<PauliString> = group
        .group_elements(n_qubits)
        .iter()
        .map(|e| e.unsigned())
        .filter(|e| !e.is_identity())
        .collect();
    let index: HashMap<(u64, u64), usize> = candidates
        .iter()
        .enumerate()
        .map(|(i, s)| (s.canonical_key(), i))
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; candidates.len()];
    let mut cosets: Vec<Vec<PauliString>> = Vec::new();
    for i in 0..candidates.len() {
        if owner[i].is_some() {
            continue;
        }
        let c = cosets.len();
        owner[i] = Some(c);
        let mut members = vec![candidates[i]];
        for e in &elements {
            let moved = e.compose(&candidates[i]).unsigned();
            if let Some(&j) = index.get(&moved.canonical_key()) {
                if owner[j].is_none() {
                    owner[j] = Some(c);
                    members.push(candidates[j]);
                }
            }
        }
        members.sort_by(|a, b| a.canonical_cmp(b));
        cosets.push(members);
    }
    cosets
}

/// One canonical representative per non-identity coset of the normalizer
/// strings on `domain`.
pub fn reduce_basis(domain: &[usize], n_qubits: usize, group: &SymmetryGroup) -> Vec<PauliString> {
    domain_cosets(domain, n_qubits, group)
        .into_iter()
        .skip(1)
        .map(|c| c[0])
        .collect()
}

/// `⟨ψ|R|ψ⟩` for the site inversion `R`.
pub fn inversion_expectation(state: &StateVector) -> Result<Complex64> {
    let n = state.n_qubits();
    let perm: Vec<usize> = (0..n).rev().collect();
    state.inner(&state.permute_qubits(&perm)?)
}

/// Returns the `±1` eigenvalue of `R` on `state`, or an error if it is not definite.
pub fn inversion_eigenvalue(state: &StateVector) -> Result<f64> {
    let r = inversion_expectation(state)?;
    if (r.norm() - 1.0).abs() > INVERSION_TOL || r.im.abs() > INVERSION_TOL {
        return Err(QiteError::BrokenInversionSymmetry(r.re));
    }
    Ok(r.re.signum())
}

/// Moves every generator of `step` by the link's qubit permutation, keeping
/// angles and order.
pub fn transport_step(step: &UnitaryStep, target: usize, link: Option<&SymmetryLink>) -> Result<UnitaryStep> {
    let link = link.ok_or(QiteError::MissingSymmetryLink(target))?;
    let rotations = step
        .rotations
        .iter()
        .map(|r| {
            Ok(Rotation {
                generator: r.generator.permute_qubits(&link.permutation)?,
                angle: r.angle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitaryStep {
        term_index: target,
        rotations,
        ..step.clone()
    })
}

/// Site-inversion transport of a step on an `n_qubits` register.
pub fn transport_by_inversion(step: &UnitaryStep, n_qubits: usize) -> Result<UnitaryStep> {
    let link = SymmetryLink {
        source: step.term_index,
        permutation: (0..n_qubits).rev().collect(),
    };
    transport_step(step, step.term_index, Some(&link))
}
