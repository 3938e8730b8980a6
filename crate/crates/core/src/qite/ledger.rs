//! Distinct-measurement bookkeeping.

use std::collections::HashSet;

use crate::pauli::PauliString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    LinearSystem,
    EnergyScan,
}

/// `(reference id, x mask, z mask)`; the sign of a string never makes it a
/// new measurement.
pub type LedgerKey = (u64, u64, u64);

#[derive(Clone, Debug, Default, PartialEq)]
struct Book {
    keyed: HashSet<LedgerKey>,
    unkeyed: HashSet<(u64, u64)>,
    /// Keys first recorded through a string with an imaginary phase.
    imaginary: HashSet<LedgerKey>,
}

impl Book {
    fn insert(&mut self, reference_id: u64, p: &PauliString) -> bool {
        let key = (reference_id, p.x_mask(), p.z_mask());
        if p.phase_exp() % 2 == 1 {
            self.imaginary.insert(key);
        }
        self.unkeyed.insert((p.x_mask(), p.z_mask()));
        self.keyed.insert(key)
    }

    fn merge(&mut self, other: &Book) {
        self.keyed.extend(other.keyed.iter().copied());
        self.unkeyed.extend(other.unkeyed.iter().copied());
        self.imaginary.extend(other.imaginary.iter().copied());
    }
}

/// Set of distinct `(reference state, Pauli string)` expectation values.
///
/// Identity strings are never recorded: their value is known.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementLedger {
    linear: Book,
    scan: Book,
}

impl MeasurementLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn book(&self, purpose: Purpose) -> &Book {
        match purpose {
            Purpose::LinearSystem => &self.linear,
            Purpose::EnergyScan => &self.scan,
        }
    }

    /// Returns `true` when the key is new.
    pub fn insert(&mut self, purpose: Purpose, reference_id: u64, p: &PauliString) -> bool {
        if p.is_identity() {
            return false;
        }
        match purpose {
            Purpose::LinearSystem => self.linear.insert(reference_id, p),
            Purpose::EnergyScan => self.scan.insert(reference_id, p),
        }
    }

    /// Distinct `(reference, string)` keys.
    pub fn count(&self, purpose: Purpose) -> usize {
        self.book(purpose).keyed.len()
    }

    /// Distinct strings regardless of the reference they were measured on.
    pub fn unkeyed_count(&self, purpose: Purpose) -> usize {
        self.book(purpose).unkeyed.len()
    }

    /// Keys that entered through a string with an `±i` phase.
    pub fn imaginary_phase_count(&self, purpose: Purpose) -> usize {
        self.book(purpose).imaginary.len()
    }

    pub fn contains(&self, purpose: Purpose, reference_id: u64, p: &PauliString) -> bool {
        self.book(purpose)
            .keyed
            .contains(&(reference_id, p.x_mask(), p.z_mask()))
    }

    /// Set union; the result does not depend on merge order.
    pub fn merge(&mut self, other: &MeasurementLedger) {
        self.linear.merge(&other.linear);
        self.scan.merge(&other.scan);
    }
}
