use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::linalg::{residual_norm, Pseudoinverse};
use crate::pauli::{ObservableSum, PauliString, HERMITICITY_TOL};
use crate::qite::ledger::{MeasurementLedger, Purpose};
use crate::qite::{Basis, Formulation};
use crate::statevector::StateVector;
use crate::step::{Rotation, UnitaryStep};

/// Pseudoinverse cutoff and rotation-drop threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub rcond: f64,
    pub drop_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rcond: 1e-8,
            drop_threshold: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QiteLinearSystem {
    pub s_matrix: DMatrix<f64>,
    pub b_vector: Vec<f64>,
    pub c_norm: f64,
    pub basis_labels: Vec<String>,
    pub formulation: Formulation,
    pub dt: f64,
}

/// Real linear combination of expectation values of table strings.
type LinComb = Vec<(usize, f64)>;

/// Distinct hermitian strings whose expectation values a term needs.
#[derive(Clone, Debug, Default)]
struct StringTable {
    strings: Vec<PauliString>,
    /// Whether the string enters some formula through an `±i` phase.
    imaginary: Vec<bool>,
    index: HashMap<(u64, u64), usize>,
}

impl StringTable {
    /// Registers the unsigned form of `p`.
    fn entry(&mut self, p: PauliString) -> usize {
        let key = (p.x_mask(), p.z_mask());
        let i = *self.index.entry(key).or_insert_with(|| {
            self.strings.push(p.unsigned());
            self.imaginary.push(false);
            self.strings.len() - 1
        });
        if p.phase_exp() % 2 == 1 {
            self.imaginary[i] = true;
        }
        i
    }

    /// Registers `weight · ⟨p⟩` for a signed string `p`; returns the table
    /// entry and the real weight multiplying its unsigned expectation value.
    fn add(&mut self, p: PauliString, weight: Complex64) -> Result<(usize, f64)> {
        let w = weight * p.phase();
        if w.im.abs() > HERMITICITY_TOL * w.norm().max(1.0) {
            return Err(QiteError::NonHermitian);
        }
        Ok((self.entry(p), w.re))
    }

    fn add_sum(&mut self, op: &ObservableSum, out: &mut LinComb) -> Result<()> {
        for &(p, c) in op.terms() {
            out.push(self.add(p, c)?);
        }
        Ok(())
    }
}

fn eval(lc: &LinComb, values: &[f64]) -> f64 {
    lc.iter().map(|&(i, w)| w * values[i]).sum()
}

/// Reference-independent expansion of every quantity in the linear system.
#[derive(Clone, Debug)]
struct SystemOperators {
    table: StringTable,
    s_upper: Vec<(usize, usize, LinComb)>,
    m1: Vec<LinComb>,
    m2: Vec<LinComb>,
    h: LinComb,
    h2: LinComb,
}

impl SystemOperators {
    fn build(term: &ObservableSum, basis: &Basis, formulation: Formulation) -> Result<Self> {
        let mut table = StringTable::default();
        let second = formulation.is_second_order();
        let h2_op = if second { Some(term.square()) } else { None };
        let k = basis.len();
        let mut s_upper = Vec::with_capacity(k * (k + 1) / 2);
        let mut m1 = vec![LinComb::new(); k];
        let mut m2 = vec![LinComb::new(); k];
        let mut h = LinComb::new();
        let mut h2 = LinComb::new();
        table.add_sum(term, &mut h)?;
        if let Some(op) = &h2_op {
            table.add_sum(op, &mut h2)?;
        }
        match basis {
            Basis::Pauli(sigmas) => {
                for (i, si) in sigmas.iter().enumerate() {
                    for (j, sj) in sigmas.iter().enumerate().skip(i) {
                        // Anticommuting pairs have a purely imaginary product.
                        if !si.commutes_with(sj) {
                            continue;
                        }
                        let entry = table.add(si.compose(sj), Complex64::new(2.0, 0.0))?;
                        s_upper.push((i, j, vec![entry]));
                    }
                    // 2 Im⟨σ_I P⟩ vanishes unless σ_I and P anticommute.
                    let im_part = |ops: &ObservableSum, table: &mut StringTable, out: &mut LinComb| {
                        for &(p, c) in ops.terms() {
                            if si.commutes_with(&p) {
                                continue;
                            }
                            let r = si.compose(&p);
                            out.push((table.entry(r), 2.0 * (c * r.phase()).im));
                        }
                    };
                    im_part(term, &mut table, &mut m1[i]);
                    if let Some(op) = &h2_op {
                        im_part(op, &mut table, &mut m2[i]);
                    }
                }
            }
            Basis::AntiHermitian(ts) => {
                for (i, (_, ti)) in ts.iter().enumerate() {
                    for (j, (_, tj)) in ts.iter().enumerate().skip(i) {
                        let anti = ObservableSum::anticommutator(ti, tj)?;
                        let mut lc = LinComb::new();
                        table.add_sum(&anti, &mut lc)?;
                        if !lc.is_empty() {
                            s_upper.push((i, j, lc));
                        }
                    }
                    table.add_sum(&ObservableSum::commutator(term, ti)?, &mut m1[i])?;
                    if let Some(op) = &h2_op {
                        table.add_sum(&ObservableSum::commutator(op, ti)?, &mut m2[i])?;
                    }
                }
            }
        }
        Ok(Self {
            table,
            s_upper,
            m1,
            m2,
            h,
            h2,
        })
    }
}

/// Reference-dependent expectation values of one term, reusable for every `Δτ`.
#[derive(Clone, Debug)]
pub struct TermMoments {
    pub formulation: Formulation,
    pub s_matrix: DMatrix<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub h_mean: f64,
    pub h2_mean: f64,
    pinv: Pseudoinverse,
}

impl TermMoments {
    pub fn c_norm(&self, dt: f64) -> f64 {
        let c = 1.0 - 2.0 * dt * self.h_mean;
        if self.formulation.is_second_order() {
            c + 2.0 * dt * dt * self.h2_mean
        } else {
            c
        }
    }

    pub fn b_vector(&self, dt: f64) -> Result<(Vec<f64>, f64)> {
        let c = self.c_norm(dt);
        if !(c > 0.0) || !c.is_finite() {
            return Err(QiteError::DegenerateNormalization { c });
        }
        let inv = 1.0 / c.sqrt();
        let b = if self.formulation.is_second_order() {
            self.m1
                .iter()
                .zip(&self.m2)
                .map(|(a, b)| (a - 0.5 * dt * b) * inv)
                .collect()
        } else {
            self.m1.iter().map(|a| a * inv).collect()
        };
        Ok((b, c))
    }

    pub fn rank(&self) -> usize {
        self.pinv.rank()
    }
}

/// Reusable per-term machinery: the operator expansion is computed once and
/// evaluated on every reference state.
#[derive(Clone, Debug)]
pub struct TermSolver {
    pub term_index: usize,
    pub term: ObservableSum,
    pub basis: Basis,
    pub formulation: Formulation,
    ops: SystemOperators,
}

impl TermSolver {
    pub fn new(term_index: usize, term: ObservableSum, basis: Basis, formulation: Formulation) -> Result<Self> {
        if !term.is_hermitian() {
            return Err(QiteError::InvalidInput(format!("term {term_index} is not hermitian")));
        }
        basis.check(formulation, term.n_qubits())?;
        let ops = SystemOperators::build(&term, &basis, formulation)?;
        Ok(Self {
            term_index,
            term,
            basis,
            formulation,
            ops,
        })
    }

    /// Number of distinct non-identity strings measured per reference.
    pub fn measurement_count(&self) -> usize {
        self.ops.table.strings.iter().filter(|p| !p.is_identity()).count()
    }

    /// The non-identity strings whose expectation values [`Self::measure`] needs.
    pub fn measured_strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.ops.table.strings.iter().filter(|p| !p.is_identity())
    }

    /// Emulated tomography on `state`; every string is recorded under
    /// `reference_id`.
    pub fn measure(
        &self,
        state: &StateVector,
        reference_id: u64,
        ledger: &mut MeasurementLedger,
        rcond: f64,
    ) -> Result<TermMoments> {
        if state.n_qubits() != self.term.n_qubits() {
            return Err(QiteError::DimensionMismatch {
                expected: self.term.n_qubits(),
                found: state.n_qubits(),
            });
        }
        let t = &self.ops.table;
        let values: Vec<f64> = t
            .strings
            .iter()
            .map(|p| state.pauli_expectation_unchecked(p).re)
            .collect();
        for (p, &imag) in t.strings.iter().zip(&t.imaginary) {
            let logged = if imag { p.with_phase(1) } else { *p };
            ledger.insert(Purpose::LinearSystem, reference_id, &logged);
        }
        let k = self.basis.len();
        let mut s = DMatrix::zeros(k, k);
        for (i, j, lc) in &self.ops.s_upper {
            let v = eval(lc, &values);
            s[(*i, *j)] = v;
            s[(*j, *i)] = v;
        }
        let m1: Vec<f64> = self.ops.m1.iter().map(|lc| eval(lc, &values)).collect();
        let m2: Vec<f64> = self.ops.m2.iter().map(|lc| eval(lc, &values)).collect();
        let pinv = Pseudoinverse::new(&s, rcond);
        Ok(TermMoments {
            formulation: self.formulation,
            s_matrix: s,
            m1,
            m2,
            h_mean: eval(&self.ops.h, &values),
            h2_mean: eval(&self.ops.h2, &values),
            pinv,
        })
    }

    pub fn system(&self, moments: &TermMoments, dt: f64) -> Result<QiteLinearSystem> {
        let (b, c) = moments.b_vector(dt)?;
        Ok(QiteLinearSystem {
            s_matrix: moments.s_matrix.clone(),
            b_vector: b,
            c_norm: c,
            basis_labels: self.basis.labels(),
            formulation: self.formulation,
            dt,
        })
    }

    /// Coefficient vector `a = S⁺ b` and the residual `‖S a − b‖`.
    pub fn coefficients(&self, moments: &TermMoments, dt: f64) -> Result<(Vec<f64>, f64)> {
        let (b, _) = moments.b_vector(dt)?;
        let a = moments.pinv.apply(&b);
        let residual = residual_norm(&moments.s_matrix, &a, &b);
        Ok((a, residual))
    }

    pub fn step(&self, moments: &TermMoments, dt: f64, drop_threshold: f64) -> Result<UnitaryStep> {
        let (a, residual) = self.coefficients(moments, dt)?;
        let mut rotations = Vec::new();
        let mut dropped = 0;
        for (i, ai) in a.iter().enumerate() {
            let angle = ai * dt;
            if angle.abs() < drop_threshold {
                if angle != 0.0 {
                    dropped += 1;
                }
                continue;
            }
            rotations.push(Rotation {
                generator: self.basis.generator(i),
                angle,
            });
        }
        Ok(UnitaryStep {
            term_index: self.term_index,
            dt,
            rotations,
            residual,
            dropped,
        })
    }
}

pub fn build_system(
    state: &StateVector,
    term: &ObservableSum,
    basis: &Basis,
    dt: f64,
    formulation: Formulation,
    ledger: &mut MeasurementLedger,
    reference_id: u64,
) -> Result<QiteLinearSystem> {
    let solver = TermSolver::new(0, term.clone(), basis.clone(), formulation)?;
    let moments = solver.measure(state, reference_id, ledger, SolverOptions::default().rcond)?;
    solver.system(&moments, dt)
}

/// Minimum-norm least-squares solution of `S a = b`.
pub fn solve(system: &QiteLinearSystem, rcond: f64) -> Vec<f64> {
    Pseudoinverse::new(&system.s_matrix, rcond).apply(&system.b_vector)
}

#[allow(clippy::too_many_arguments)]
pub fn qite_step(
    state: &StateVector,
    term: &ObservableSum,
    basis: &Basis,
    dt: f64,
    formulation: Formulation,
    opts: SolverOptions,
    ledger: &mut MeasurementLedger,
    reference_id: u64,
) -> Result<UnitaryStep> {
    let solver = TermSolver::new(0, term.clone(), basis.clone(), formulation)?;
    let moments = solver.measure(state, reference_id, ledger, opts.rcond)?;
    solver.step(&moments, dt, opts.drop_threshold)
}

/// Maximum deviations between the Pauli order-2 system and the anti-hermitian
/// system built from `t_I = −iσ_I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `max |S' + S|`.
    pub s_deviation: f64,
    /// `max |b' + b|`.
    pub b_deviation: f64,
    /// `max |a' − a|`.
    pub a_deviation: f64,
}

impl EquivalenceReport {
    pub fn max(&self) -> f64 {
        self.s_deviation.max(self.b_deviation).max(self.a_deviation)
    }
}

pub fn equivalence_check(
    state: &StateVector,
    term: &ObservableSum,
    basis: &[PauliString],
    dt: f64,
    rcond: f64,
) -> Result<EquivalenceReport> {
    let mut scratch = MeasurementLedger::new();
    let pauli = TermSolver::new(0, term.clone(), Basis::Pauli(basis.to_vec()), Formulation::PauliOrder2)?;
    let anti = TermSolver::new(
        0,
        term.clone(),
        Basis::anti_hermitian_from_paulis(basis),
        Formulation::AntiHermitianOrder2,
    )?;
    let mp = pauli.measure(state, 0, &mut scratch, rcond)?;
    let ma = anti.measure(state, 0, &mut scratch, rcond)?;
    let sp = pauli.system(&mp, dt)?;
    let sa = anti.system(&ma, dt)?;
    let s_deviation = (&sa.s_matrix + &sp.s_matrix).amax();
    let b_deviation = sa
        .b_vector
        .iter()
        .zip(&sp.b_vector)
        .map(|(x, y)| (x + y).abs())
        .fold(0.0, f64::max);
    let (ap, _) = pauli.coefficients(&mp, dt)?;
    let (aa, _) = anti.coefficients(&ma, dt)?;
    let a_deviation = ap.iter().zip(&aa).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        s_deviation,
        b_deviation,
        a_deviation,
    })
}
