//! Baseline QITE and multiple-time QITE drivers.

use std::cmp::Ordering;

use crate::error::{QiteError, Result};
use crate::hamiltonians::{HamiltonianPartition, OperatorPool, SymmetryLink};
use crate::oracles::{fidelity, GroundSpace};
use crate::pauli::ObservableSum;
use crate::qite::{Basis, Formulation, MeasurementLedger, Purpose, SolverOptions, TermMoments, TermSolver};
use crate::statevector::StateVector;
use crate::step::{ApplicationMode, UnitaryStep};
use crate::symmetry::{reduce_basis, transport_step, SymmetryGroup, INVERSION_TOL};

/// Energies closer than this are treated as tied in the scan.
pub const ENERGY_TIE_TOL: f64 = 1e-13;

/// Sorted, distinct imaginary-time step sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    /// `l` evenly spaced values on `(0, t_max]`, plus `0` if requested.
    pub fn uniform(l: usize, t_max: f64, include_zero: bool) -> Result<Self> {
        if l == 0 || !(t_max > 0.0) || !t_max.is_finite() {
            return Err(QiteError::InvalidInput(format!("bad grid: L = {l}, t_max = {t_max}")));
        }
        let mut values: Vec<f64> = (1..=l).map(|k| t_max * k as f64 / l as f64).collect();
        if include_zero {
            values.insert(0, 0.0);
        }
        Ok(Self { values })
    }

    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(QiteError::InvalidInput("empty time grid".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(QiteError::InvalidInput(format!("grid value {v} is not a finite dt ≥ 0")));
        }
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(QiteError::InvalidInput("grid values must be distinct".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn includes_zero(&self) -> bool {
        self.values[0] == 0.0
    }

    fn has_nonzero(&self) -> bool {
        self.values.iter().any(|&v| v > 0.0)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::uniform(12, 0.5, true).expect("valid default grid")
    }
}

/// Which partition term acts on the state first within a Trotter step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TermOrder {
    /// `… U₂ U₁ |Φ⟩`: term 1 is applied first.
    #[default]
    FirstTermInnermost,
    /// `U₁ U₂ … |Φ⟩`: the last term is applied first.
    LastTermInnermost,
}

impl TermOrder {
    pub fn sequence(self, m: usize) -> Vec<usize> {
        match self {
            TermOrder::FirstTermInnermost => (0..m).collect(),
            TermOrder::LastTermInnermost => (0..m).rev().collect(),
        }
    }
}

/// When symmetry-linked terms reuse the transported step of their source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinkPolicy {
    /// Every term is measured.
    Off,
    /// Only when the reference is an eigenstate of the link permutation.
    #[default]
    WhenDefinite,
    /// Always transport, even on references without the symmetry.
    Always,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DriverOptions {
    pub solver: SolverOptions,
    pub mode: ApplicationMode,
    pub order: TermOrder,
    pub links: LinkPolicy,
    /// Also solve transported terms directly and record the deviation.
    pub verify_links: bool,
}

/// A partition with one prepared [`TermSolver`] per term.
#[derive(Clone, Debug)]
pub struct Problem {
    pub partition: HamiltonianPartition,
    pub formulation: Formulation,
    pub solvers: Vec<TermSolver>,
    pub ground: Option<GroundSpace>,
    pub symmetry: SymmetryGroup,
}

impl Problem {
    pub fn new(partition: HamiltonianPartition, bases: Vec<Basis>, formulation: Formulation) -> Result<Self> {
        if bases.len() != partition.len() {
            return Err(QiteError::InvalidInput(format!(
                "{} bases for {} partition terms",
                bases.len(),
                partition.len()
            )));
        }
        let solvers = partition
            .terms
            .iter()
            .zip(bases)
            .enumerate()
            .map(|(m, (t, b))| TermSolver::new(m, t.clone(), b, formulation))
            .collect::<Result<_>>()?;
        Ok(Self {
            partition,
            formulation,
            solvers,
            ground: None,
            symmetry: SymmetryGroup::empty(),
        })
    }

    pub fn with_ground(mut self, ground: GroundSpace) -> Self {
        self.ground = Some(ground);
        self
    }

    pub fn with_symmetry(mut self, symmetry: SymmetryGroup) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.partition.n_qubits()
    }

    pub fn hamiltonian(&self) -> &ObservableSum {
        &self.partition.full
    }

    fn infidelity(&self, state: &StateVector) -> Result<Option<f64>> {
        self.ground.as_ref().map(|g| fidelity(state, g).map(|f| 1.0 - f)).transpose()
    }

    fn sector_deviation(&self, state: &StateVector) -> Result<Option<f64>> {
        if self.symmetry.is_empty() {
            return Ok(None);
        }
        let e = self.symmetry.sector_expectations(state)?;
        Ok(Some(e.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)))
    }
}

/// Reduced Pauli bases per term; a linked term gets its source's basis moved
/// by the link permutation, in the same order.
pub fn reduced_pauli_bases(partition: &HamiltonianPartition, group: &SymmetryGroup) -> Result<Vec<Basis>> {
    let n = partition.n_qubits();
    let mut out: Vec<Basis> = Vec::with_capacity(partition.len());
    for m in 0..partition.len() {
        let basis = match partition.symmetry_links.get(&m) {
            Some(link) => out[link.source].permute_qubits(&link.permutation)?,
            None => Basis::Pauli(reduce_basis(&partition.domains[m], n, group)),
        };
        out.push(basis);
    }
    Ok(out)
}

/// The same operator pool for every term.
pub fn pool_bases(partition: &HamiltonianPartition, pool: &OperatorPool) -> Vec<Basis> {
    vec![Basis::from_pool(pool); partition.len()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Qite,
    MtQite,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Qite => "qite",
            Algorithm::MtQite => "mtqite",
        }
    }
}

/// State of a run after one Trotter step (step 0 is the initial state).
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Chosen step size per term, indexed by term.
    pub dts: Vec<f64>,
    pub energy: f64,
    pub infidelity: Option<f64>,
    /// Cumulative Pauli-string rotations applied.
    pub rotations: usize,
    /// Cumulative distinct linear-system measurements.
    pub linear_ledger: usize,
    /// Cumulative distinct energy-scan measurements keyed by candidate state.
    pub scan_ledger: usize,
    /// Same, ignoring which candidate state was measured.
    pub scan_ledger_unkeyed: usize,
    pub residuals: Vec<f64>,
    /// Lowest scan energy with every term on the same grid value.
    pub diagonal_energy: Option<f64>,
    /// `(term, dt)` grid points rejected for a degenerate normalisation.
    pub excluded: Vec<(usize, f64)>,
    /// Terms whose step was transported from a linked source.
    pub transported: Vec<usize>,
    /// Largest coefficient gap between transported and directly solved steps.
    pub transport_deviation: Option<f64>,
    /// Largest `|s_i⟨S_i⟩ − 1|` over the stabilizer generators.
    pub sector_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub steps: Vec<StepRecord>,
    pub final_state: StateVector,
    pub ledger: MeasurementLedger,
    /// Baseline QITE only: the step size of the reported run.
    pub best_dt: Option<f64>,
    /// Baseline QITE only: grid values whose run failed.
    pub failed_dts: Vec<f64>,
}

impl RunRecord {
    pub fn last(&self) -> &StepRecord {
        self.steps.last().expect("a run always records step 0")
    }
}

fn initial_record(problem: &Problem, state: &StateVector) -> Result<StepRecord> {
    Ok(StepRecord {
        step: 0,
        dts: vec![0.0; problem.partition.len()],
        energy: state.energy(problem.hamiltonian())?,
        infidelity: problem.infidelity(state)?,
        rotations: 0,
        linear_ledger: 0,
        scan_ledger: 0,
        scan_ledger_unkeyed: 0,
        residuals: vec![0.0; problem.partition.len()],
        diagonal_energy: None,
        excluded: Vec::new(),
        transported: Vec::new(),
        transport_deviation: None,
        sector_deviation: problem.sector_deviation(state)?,
    })
}

fn check_state(problem: &Problem, state: &StateVector) -> Result<()> {
    if state.n_qubits() != problem.n_qubits() {
        return Err(QiteError::DimensionMismatch {
            expected: problem.n_qubits(),
            found: state.n_qubits(),
        });
    }
    Ok(())
}

/// Per-term, per-grid-point steps; `None` marks an excluded grid point.
pub type StepTable = Vec<Vec<Option<UnitaryStep>>>;

/// Outcome of an exhaustive energy scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// `(grid index per term, energy)` for every candidate, in visit order.
    pub energies: Vec<(Vec<usize>, f64)>,
    /// Grid index per term of the selected candidate.
    pub best: Vec<usize>,
    pub best_energy: f64,
    pub diagonal_min: Option<f64>,
}

fn dt_of(table: &StepTable, choice: &[usize]) -> Vec<f64> {
    choice
        .iter()
        .enumerate()
        .map(|(m, &g)| table[m][g].as_ref().map_or(0.0, |s| s.dt))
        .collect()
}

/// `Less` when candidate `a` beats `b`: lower energy, then smaller total
/// step, then lexicographically smaller step tuple.
fn compare_candidates(ea: f64, da: &[f64], eb: f64, db: &[f64]) -> Ordering {
    if (ea - eb).abs() > ENERGY_TIE_TOL {
        return ea.total_cmp(&eb);
    }
    let sa: f64 = da.iter().sum();
    let sb: f64 = db.iter().sum();
    sa.total_cmp(&sb).then_with(|| {
        da.iter()
            .zip(db)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

struct ScanContext<'a> {
    table: &'a StepTable,
    h: &'a ObservableSum,
    seq: Vec<usize>,
    mode: ApplicationMode,
    ledger: &'a mut MeasurementLedger,
    next_id: &'a mut u64,
    choice: Vec<usize>,
    energies: Vec<(Vec<usize>, f64)>,
}

impl ScanContext<'_> {
    fn visit(&mut self, depth: usize, state: &StateVector) -> Result<()> {
        if depth == self.seq.len() {
            let id = *self.next_id;
            *self.next_id += 1;
            for p in self.h.strings() {
                self.ledger.insert(Purpose::EnergyScan, id, p);
            }
            let e = state.energy(self.h)?;
            self.energies.push((self.choice.clone(), e));
            return Ok(());
        }
        let m = self.seq[depth];
        let table = self.table;
        for (g, step) in table[m].iter().enumerate() {
            let Some(step) = step else { continue };
            self.choice[m] = g;
            if step.is_empty() {
                self.visit(depth + 1, state)?;
            } else {
                let mut next = state.clone();
                next.apply_unitary_step(step, self.mode)?;
                self.visit(depth + 1, &next)?;
            }
        }
        Ok(())
    }
}

/// Evaluates `⟨H⟩` on every candidate state built from one surviving step per
/// term and selects the minimum. Each candidate state is a separate
/// measurement key; ids are drawn from `next_id`.
pub fn energy_scan(
    reference: &StateVector,
    table: &StepTable,
    h: &ObservableSum,
    order: TermOrder,
    mode: ApplicationMode,
    ledger: &mut MeasurementLedger,
    next_id: &mut u64,
) -> Result<ScanResult> {
    if table.is_empty() || table.iter().any(|row| row.iter().all(Option::is_none)) {
        return Err(QiteError::EmptyTable);
    }
    let mut ctx = ScanContext {
        table,
        h,
        seq: order.sequence(table.len()),
        mode,
        ledger,
        next_id,
        choice: vec![0; table.len()],
        energies: Vec::new(),
    };
    ctx.visit(0, reference)?;
    let energies = ctx.energies;
    let mut best = 0;
    for i in 1..energies.len() {
        let (ci, ei) = &energies[i];
        let (cb, eb) = &energies[best];
        if compare_candidates(*ei, &dt_of(table, ci), *eb, &dt_of(table, cb)).is_lt() {
            best = i;
        }
    }
    let diagonal_min = energies
        .iter()
        .filter(|(c, _)| c.iter().all(|&g| g == c[0]))
        .map(|(_, e)| *e)
        .min_by(f64::total_cmp);
    Ok(ScanResult {
        best: energies[best].0.clone(),
        best_energy: energies[best].1,
        energies,
        diagonal_min,
    })
}

fn link_applies(policy: LinkPolicy, link: &SymmetryLink, reference: &StateVector) -> Result<bool> {
    Ok(match policy {
        LinkPolicy::Off => false,
        LinkPolicy::Always => true,
        LinkPolicy::WhenDefinite => {
            let r = reference.inner(&reference.permute_qubits(&link.permutation)?)?;
            (r.norm() - 1.0).abs() <= INVERSION_TOL
        }
    })
}

fn step_gap(a: &UnitaryStep, b: &UnitaryStep, n: usize) -> Result<f64> {
    let d = a.total_generator(n)?.try_sub(&b.total_generator(n)?)?;
    Ok(d.terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max))
}

fn solve_row(
    solver: &TermSolver,
    moments: &TermMoments,
    grid: &TimeGrid,
    drop: f64,
    excluded: &mut Vec<(usize, f64)>,
) -> Result<Vec<Option<UnitaryStep>>> {
    grid.values()
        .iter()
        .map(|&dt| {
            if dt == 0.0 {
                return Ok(Some(UnitaryStep::identity(solver.term_index)));
            }
            match solver.step(moments, dt, drop) {
                Ok(s) => Ok(Some(s)),
                Err(QiteError::DegenerateNormalization { .. }) => {
                    excluded.push((solver.term_index, dt));
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

fn apply_sequence(
    state: &mut StateVector,
    steps: &[&UnitaryStep],
    order: TermOrder,
    mode: ApplicationMode,
) -> Result<()> {
    for m in order.sequence(steps.len()) {
        state.apply_unitary_step(steps[m], mode)?;
    }
    Ok(())
}

/// Multiple-time QITE: each Trotter step measures every term on one frozen
/// reference, solves every grid point, and keeps the energy-minimising
/// combination of per-term step sizes.
pub fn run_mtqite(
    problem: &Problem,
    initial: &StateVector,
    grid: &TimeGrid,
    n_steps: usize,
    opts: &DriverOptions,
) -> Result<RunRecord> {
    run_mtqite_observed(problem, initial, grid, n_steps, opts, &mut |_| {})
}

/// [`run_mtqite`] calling `on_step(k)` once step `k` is complete (0 = start).
pub fn run_mtqite_observed(
    problem: &Problem,
    initial: &StateVector,
    grid: &TimeGrid,
    n_steps: usize,
    opts: &DriverOptions,
    on_step: &mut dyn FnMut(usize),
) -> Result<RunRecord> {
    check_state(problem, initial)?;
    let n = problem.n_qubits();
    let n_terms = problem.partition.len();
    let mut state = initial.clone();
    let mut ledger = MeasurementLedger::new();
    let mut records = vec![initial_record(problem, &state)?];
    let mut rotations = 0;
    let mut next_candidate = 0u64;
    on_step(0);
    for k in 1..=n_steps {
        let reference = state.clone();
        let ref_id = k as u64;
        let mut table: StepTable = Vec::with_capacity(n_terms);
        let mut excluded = Vec::new();
        let mut transported = Vec::new();
        let mut deviation: Option<f64> = None;
        for (m, solver) in problem.solvers.iter().enumerate() {
            if let Some(link) = problem.partition.symmetry_links.get(&m) {
                if link_applies(opts.links, link, &reference)? {
                    let row = table[link.source]
                        .iter()
                        .map(|s: &Option<UnitaryStep>| s.as_ref().map(|s| transport_step(s, m, Some(link))).transpose())
                        .collect::<Result<Vec<_>>>()?;
                    if opts.verify_links && grid.has_nonzero() {
                        let mut scratch = MeasurementLedger::new();
                        let moments = solver.measure(&reference, ref_id, &mut scratch, opts.solver.rcond)?;
                        let direct = solve_row(solver, &moments, grid, opts.solver.drop_threshold, &mut Vec::new())?;
                        for (a, b) in row.iter().zip(&direct) {
                            if let (Some(a), Some(b)) = (a, b) {
                                let gap = step_gap(a, b, n)?;
                                deviation = Some(deviation.map_or(gap, |d: f64| d.max(gap)));
                            }
                        }
                    }
                    excluded.extend(
                        grid.values()
                            .iter()
                            .zip(&row)
                            .filter(|(_, s)| s.is_none())
                            .map(|(&dt, _)| (m, dt)),
                    );
                    transported.push(m);
                    table.push(row);
                    continue;
                }
            }
            let row = if grid.has_nonzero() {
                let moments = solver.measure(&reference, ref_id, &mut ledger, opts.solver.rcond)?;
                solve_row(solver, &moments, grid, opts.solver.drop_threshold, &mut excluded)?
            } else {
                vec![Some(UnitaryStep::identity(m))]
            };
            table.push(row);
        }
        if let Some(m) = table.iter().position(|row| row.iter().all(Option::is_none)) {
            return Err(QiteError::AllGridPointsFailed { term: m });
        }
        let scan = energy_scan(
            &reference,
            &table,
            problem.hamiltonian(),
            opts.order,
            opts.mode,
            &mut ledger,
            &mut next_candidate,
        )?;
        let chosen: Vec<&UnitaryStep> = scan
            .best
            .iter()
            .enumerate()
            .map(|(m, &g)| table[m][g].as_ref().expect("scan only visits surviving points"))
            .collect();
        apply_sequence(&mut state, &chosen, opts.order, opts.mode)?;
        rotations += chosen.iter().map(|s| s.pauli_rotation_count()).sum::<usize>();
        records.push(StepRecord {
            step: k,
            dts: chosen.iter().map(|s| s.dt).collect(),
            energy: state.energy(problem.hamiltonian())?,
            infidelity: problem.infidelity(&state)?,
            rotations,
            linear_ledger: ledger.count(Purpose::LinearSystem),
            scan_ledger: ledger.count(Purpose::EnergyScan),
            scan_ledger_unkeyed: ledger.unkeyed_count(Purpose::EnergyScan),
            residuals: chosen.iter().map(|s| s.residual).collect(),
            diagonal_energy: scan.diagonal_min,
            excluded,
            transported,
            transport_deviation: deviation,
            sector_deviation: problem.sector_deviation(&state)?,
        });
        on_step(k);
    }
    Ok(RunRecord {
        algorithm: Algorithm::MtQite,
        steps: records,
        final_state: state,
        ledger,
        best_dt: None,
        failed_dts: Vec::new(),
    })
}

struct BaselineRun {
    dt: f64,
    state: StateVector,
    rotations: usize,
    records: Vec<StepRecord>,
    failed: bool,
}

/// Standard QITE for every grid value, each term measured on the state left by
/// the previous sub-step. Reports the run with the lowest final energy; the
/// ledger spans all grid runs.
pub fn run_qite_baseline(
    problem: &Problem,
    initial: &StateVector,
    grid: &TimeGrid,
    n_steps: usize,
    opts: &DriverOptions,
) -> Result<RunRecord> {
    run_qite_baseline_observed(problem, initial, grid, n_steps, opts, &mut |_| {})
}

/// [`run_qite_baseline`] calling `on_step(k)` once every grid run has
/// finished step `k` (0 = start).
pub fn run_qite_baseline_observed(
    problem: &Problem,
    initial: &StateVector,
    grid: &TimeGrid,
    n_steps: usize,
    opts: &DriverOptions,
    on_step: &mut dyn FnMut(usize),
) -> Result<RunRecord> {
    check_state(problem, initial)?;
    let n_terms = problem.partition.len();
    let start = initial_record(problem, initial)?;
    let mut ledger = MeasurementLedger::new();
    let mut runs: Vec<BaselineRun> = grid
        .values()
        .iter()
        .map(|&dt| BaselineRun {
            dt,
            state: initial.clone(),
            rotations: 0,
            records: vec![start.clone()],
            failed: false,
        })
        .collect();
    let mut next_ref = 0u64;
    // Ledger totals after each step, shared by every run.
    let mut totals = vec![0];
    on_step(0);
    for k in 1..=n_steps {
        for run in runs.iter_mut().filter(|r| !r.failed) {
            let mut residuals = vec![0.0; n_terms];
            if run.dt > 0.0 {
                for m in opts.order.sequence(n_terms) {
                    let solver = &problem.solvers[m];
                    next_ref += 1;
                    let moments = solver.measure(&run.state, next_ref, &mut ledger, opts.solver.rcond)?;
                    match solver.step(&moments, run.dt, opts.solver.drop_threshold) {
                        Ok(step) => {
                            run.state.apply_unitary_step(&step, opts.mode)?;
                            run.rotations += step.pauli_rotation_count();
                            residuals[m] = step.residual;
                        }
                        Err(QiteError::DegenerateNormalization { .. }) => {
                            run.failed = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            if run.failed {
                continue;
            }
            run.records.push(StepRecord {
                step: k,
                dts: vec![run.dt; n_terms],
                energy: run.state.energy(problem.hamiltonian())?,
                infidelity: problem.infidelity(&run.state)?,
                rotations: run.rotations,
                linear_ledger: 0,
                scan_ledger: 0,
                scan_ledger_unkeyed: 0,
                residuals,
                diagonal_energy: None,
                excluded: Vec::new(),
                transported: Vec::new(),
                transport_deviation: None,
                sector_deviation: problem.sector_deviation(&run.state)?,
            });
        }
        totals.push(ledger.count(Purpose::LinearSystem));
        on_step(k);
    }
    let failed_dts: Vec<f64> = runs.iter().filter(|r| r.failed).map(|r| r.dt).collect();
    let best = runs
        .into_iter()
        .filter(|r| !r.failed)
        .min_by(|a, b| {
            let ea = a.records.last().map_or(0.0, |r| r.energy);
            let eb = b.records.last().map_or(0.0, |r| r.energy);
            compare_candidates(ea, &[a.dt], eb, &[b.dt])
        })
        .ok_or(QiteError::AllGridPointsFailed { term: 0 })?;
    let mut steps = best.records;
    for (rec, &total) in steps.iter_mut().zip(&totals) {
        rec.linear_ledger = total;
    }
    Ok(RunRecord {
        algorithm: Algorithm::Qite,
        steps,
        final_state: best.state,
        ledger,
        best_dt: Some(best.dt),
        failed_dts,
    })
}

/// Runs every term and grid point once on `reference` and returns the step
/// table, without scanning. Useful for inspecting a single Trotter step.
pub fn solve_step_table(
    problem: &Problem,
    reference: &StateVector,
    grid: &TimeGrid,
    opts: &DriverOptions,
    ledger: &mut MeasurementLedger,
    reference_id: u64,
) -> Result<StepTable> {
    check_state(problem, reference)?;
    problem
        .solvers
        .iter()
        .map(|solver| {
            let moments = solver.measure(reference, reference_id, ledger, opts.solver.rcond)?;
            solve_row(solver, &moments, grid, opts.solver.drop_threshold, &mut Vec::new())
        })
        .collect()
}
