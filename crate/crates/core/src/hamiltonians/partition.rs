//! Hamiltonian partitions with per-term qubit domains.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::pauli::{ObservableSum, PauliString};

/// Coefficient-wise tolerance for recombination and link detection.
pub const PARTITION_TOL: f64 = 1e-12;

/// `terms[target]` equals `terms[source]` with qubit `q` moved to `permutation[q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryLink {
    pub source: usize,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionSpec {
    /// The whole Hamiltonian as a single term.
    Trivial,
    /// Explicit groups of indices into the canonical term list of `h`.
    Groups(Vec<Vec<usize>>),
    /// Terms split by the parity of their lowest support qubit.
    EvenOdd,
    /// Inclusive qubit windows; a term is shared evenly by every window
    /// containing its support.
    Windows(Vec<(usize, usize)>),
    /// Greedy grouping that keeps as many pool generators as possible
    /// commuting with each group.
    GreedyCommuting {
        groups: usize,
        pool: Vec<ObservableSum>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianPartition {
    pub full: ObservableSum,
    pub terms: Vec<ObservableSum>,
    pub domains: Vec<Vec<usize>>,
    pub symmetry_links: BTreeMap<usize, SymmetryLink>,
}

impl HamiltonianPartition {
    /// Builds a partition from explicit terms and domains, checking invariants.
    pub fn from_parts(full: ObservableSum, terms: Vec<ObservableSum>, domains: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self {
            full,
            terms,
            domains,
            symmetry_links: BTreeMap::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.full.n_qubits()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if self.terms.len() != self.domains.len() {
            return Err(QiteError::InvalidPartition(format!(
                "{} terms but {} domains",
                self.terms.len(),
                self.domains.len()
            )));
        }
        let mut sum = ObservableSum::zero(n);
        for (m, (t, d)) in self.terms.iter().zip(&self.domains).enumerate() {
            if !t.is_hermitian() {
                return Err(QiteError::InvalidPartition(format!("term {m} is not hermitian")));
            }
            let mask = domain_mask(d, n)?;
            if t.support() & !mask != 0 {
                return Err(QiteError::InvalidPartition(format!(
                    "term {m} acts outside its domain {d:?}"
                )));
            }
            sum = sum.try_add(t)?;
        }
        if !sum.approx_eq(&self.full, PARTITION_TOL) {
            return Err(QiteError::InvalidPartition("terms do not sum to the Hamiltonian".into()));
        }
        for (&target, link) in &self.symmetry_links {
            let moved = self.terms[link.source].permute_qubits(&link.permutation)?;
            if !moved.approx_eq(&self.terms[target], PARTITION_TOL) {
                return Err(QiteError::InvalidPartition(format!(
                    "term {target} is not the image of term {}",
                    link.source
                )));
            }
        }
        Ok(())
    }

    /// Links every term that is the site inversion of an earlier, unlinked term
    /// with the mirrored domain.
    pub fn detect_inversion_links(&mut self) {
        let n = self.n_qubits();
        let perm: Vec<usize> = (0..n).rev().collect();
        self.symmetry_links.clear();
        for j in 0..self.terms.len() {
            let mirrored = self.terms[j].reversed();
            let mut dom: Vec<usize> = self.domains[j].iter().map(|&q| n - 1 - q).collect();
            dom.sort_unstable();
            let source = (0..j).find(|&i| {
                !self.symmetry_links.contains_key(&i)
                    && self.domains[i] == dom
                    && self.terms[i].approx_eq(&mirrored, PARTITION_TOL)
            });
            if let Some(source) = source {
                self.symmetry_links.insert(
                    j,
                    SymmetryLink {
                        source,
                        permutation: perm.clone(),
                    },
                );
            }
        }
    }
}

fn domain_mask(domain: &[usize], n: usize) -> Result<u64> {
    let mut mask = 0u64;
    for &q in domain {
        if q >= n {
            return Err(QiteError::IndexOutOfRange { index: q, limit: n });
        }
        mask |= 1 << q;
    }
    Ok(mask)
}

/// Smallest contiguous window holding `support`, widened to `size` qubits
/// (the odd leftover goes left) and shifted back inside the register.
pub fn window_domain(support: u64, n_qubits: usize, size: usize) -> Result<Vec<usize>> {
    let size = size.min(n_qubits);
    if support == 0 {
        return Ok((0..size).collect());
    }
    let lo = support.trailing_zeros() as usize;
    let hi = 63 - support.leading_zeros() as usize;
    let width = hi - lo + 1;
    if width > size {
        return Err(QiteError::InvalidPartition(format!(
            "domain size {size} is smaller than a term spanning qubits {lo}..={hi}"
        )));
    }
    let leftover = size - width;
    let left = leftover.div_ceil(2);
    let start = lo as isize - left as isize;
    let start = start.clamp(0, (n_qubits - size) as isize) as usize;
    Ok((start..start + size).collect())
}

fn group_sum(n: usize, parts: impl IntoIterator<Item = (Complex64, PauliString)>) -> Result<ObservableSum> {
    ObservableSum::from_terms(n, parts)
}

pub fn make_partition(h: &ObservableSum, spec: &PartitionSpec, domain_size: usize) -> Result<HamiltonianPartition> {
    if !h.is_hermitian() {
        return Err(QiteError::NonHermitian);
    }
    let n = h.n_qubits();
    let terms = h.terms();
    let groups: Vec<ObservableSum> = match spec {
        PartitionSpec::Trivial => vec![h.clone()],
        PartitionSpec::Groups(groups) => {
            let mut seen = vec![false; terms.len()];
            let mut out = Vec::with_capacity(groups.len());
            for g in groups {
                let mut parts = Vec::with_capacity(g.len());
                for &i in g {
                    if i >= terms.len() {
                        return Err(QiteError::InvalidPartition(format!(
                            "term index {i} out of range ({} terms)",
                            terms.len()
                        )));
                    }
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(QiteError::InvalidPartition(format!("term {i} assigned twice")));
                    }
                    parts.push((terms[i].1, terms[i].0));
                }
                out.push(group_sum(n, parts)?);
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(QiteError::InvalidPartition(format!("term {i} is not covered")));
            }
            out
        }
        PartitionSpec::EvenOdd => {
            let mut even = Vec::new();
            let mut odd = Vec::new();
            for &(p, c) in terms {
                let lo = if p.support() == 0 { 0 } else { p.support().trailing_zeros() };
                if lo % 2 == 0 { even.push((c, p)) } else { odd.push((c, p)) }
            }
            vec![group_sum(n, even)?, group_sum(n, odd)?]
        }
        PartitionSpec::Windows(windows) => {
            let masks = windows
                .iter()
                .map(|&(a, b)| {
                    if a > b || b >= n {
                        return Err(QiteError::InvalidPartition(format!("invalid window {a}..={b}")));
                    }
                    Ok((a..=b).fold(0u64, |m, q| m | 1 << q))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut parts = vec![Vec::new(); windows.len()];
            for &(p, c) in terms {
                let owners: Vec<usize> = if p.support() == 0 {
                    vec![0]
                } else {
                    (0..masks.len()).filter(|&w| p.support() & !masks[w] == 0).collect()
                };
                if owners.is_empty() {
                    return Err(QiteError::InvalidPartition(format!("term {p} fits in no window")));
                }
                let share = c / owners.len() as f64;
                for w in owners {
                    parts[w].push((share, p));
                }
            }
            parts.into_iter().map(|g| group_sum(n, g)).collect::<Result<Vec<_>>>()?
        }
        PartitionSpec::GreedyCommuting { groups, pool } => greedy_commuting(h, *groups, pool)?,
    };
    let domains = groups
        .iter()
        .map(|t| window_domain(t.support(), n, domain_size))
        .collect::<Result<Vec<_>>>()?;
    let mut partition = HamiltonianPartition {
        full: h.clone(),
        terms: groups,
        domains,
        symmetry_links: BTreeMap::new(),
    };
    partition.detect_inversion_links();
    partition.validate()?;
    Ok(partition)
}

fn greedy_commuting(h: &ObservableSum, n_groups: usize, pool: &[ObservableSum]) -> Result<Vec<ObservableSum>> {
    if n_groups == 0 {
        return Err(QiteError::InvalidPartition("greedy partition needs at least one group".into()));
    }
    let n = h.n_qubits();
    let mut order: Vec<usize> = (0..h.len()).collect();
    // Stable sort keeps canonical order among equal magnitudes.
    order.sort_by(|&a, &b| h.terms()[b].1.norm().total_cmp(&h.terms()[a].1.norm()));
    let commuting: Vec<Vec<bool>> = h
        .terms()
        .iter()
        .map(|&(p, _)| {
            let single = ObservableSum::from_pauli(p);
            pool.iter()
                .map(|t| t.commutes_with(&single))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut alive = vec![vec![true; pool.len()]; n_groups];
    let mut members: Vec<Vec<(Complex64, PauliString)>> = vec![Vec::new(); n_groups];
    for f in order {
        let mut best = 0;
        let mut best_score = None;
        for (g, a) in alive.iter().enumerate() {
            let score = a.iter().zip(&commuting[f]).filter(|(x, y)| **x && **y).count();
            if best_score.is_none_or(|s| score > s) {
                best = g;
                best_score = Some(score);
            }
        }
        for (a, c) in alive[best].iter_mut().zip(&commuting[f]) {
            *a &= *c;
        }
        let (p, c) = h.terms()[f];
        members[best].push((c, p));
    }
    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| group_sum(n, m))
        .collect()
}
