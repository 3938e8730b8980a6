//! Model construction, initial states and the prepared problem for a config.

use std::collections::HashSet;

use mtqite_core::hamiltonians::{
    build_hubbard, build_tfim, build_uccgsd_pool, build_xxz, make_partition, parse_fcidump, HamiltonianPartition,
    MolecularData, OperatorPool, PartitionSpec,
};
use mtqite_core::mtqite::{pool_bases, reduced_pauli_bases, DriverOptions, LinkPolicy, Problem, TermOrder, TimeGrid};
use mtqite_core::oracles::{exact_ground, exact_ground_in_subspace, ExactPropagator, GroundSpace};
use mtqite_core::qite::{Basis, Formulation, SolverOptions};
use mtqite_core::symmetry::{find_z2_symmetries, SymmetryGroup};
use mtqite_core::{ApplicationMode, ObservableSum, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{
    ApplicationKind, ExperimentConfig, FormulationKind, InitialConfig, LinkKind, ModelConfig, OrderingKind,
    PartitionKind,
};
use crate::ExperimentError;

/// Stabilizer expectations of emitted batch states must be this close to +1.
pub const SECTOR_TOL: f64 = 1e-8;
/// Resampling budget per batch state before the sector is declared unreachable.
pub const MAX_RESAMPLES: usize = 100;
/// Minimum sector weight `⟨P⟩` of a sample before projection.
pub const MIN_SECTOR_WEIGHT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Model {
    pub tag: String,
    pub hamiltonian: ObservableSum,
    /// Constant added to every reported energy (nuclear repulsion for molecules).
    pub energy_offset: f64,
    pub ground: GroundSpace,
    pub molecule: Option<MolecularData>,
    pub pool: Option<OperatorPool>,
}

impl Model {
    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn exact_energy(&self) -> f64 {
        self.ground.energy + self.energy_offset
    }
}

fn spin_projection_twice(index: usize, n_qubits: usize) -> i64 {
    (0..n_qubits)
        .filter(|q| index >> q & 1 == 1)
        .map(|q| if q % 2 == 0 { 1 } else { -1 })
        .sum()
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<Model, ExperimentError> {
    let tag = cfg.model.tag();
    let model = match &cfg.model {
        ModelConfig::Tfim { n, h_over_j } => spin_model(tag, build_tfim(*n, *h_over_j)?)?,
        ModelConfig::Xxz { n, j } => spin_model(tag, build_xxz(*n, *j)?)?,
        ModelConfig::Hubbard { n_sites, u } => spin_model(tag, build_hubbard(*n_sites, *u)?)?,
        ModelConfig::PauliSum { terms } => {
            let labels: Vec<(f64, &str)> = terms.iter().map(|(c, l)| (*c, l.as_str())).collect();
            let h = ObservableSum::from_labels(&labels).map_err(|e| ExperimentError::Config(e.to_string()))?;
            spin_model(tag, h)?
        }
        ModelConfig::Molecule { fcidump } => {
            let data = parse_fcidump(cfg.resolve(fcidump)).map_err(|e| ExperimentError::Config(e.to_string()))?;
            let h = data.qubit_hamiltonian()?;
            let n = h.n_qubits();
            let (ne, ms2) = (data.n_electrons, data.ms2);
            // The neutral ground state lives in the N / Sz sector of the file.
            let ground = exact_ground_in_subspace(&h, |k| {
                k.count_ones() as usize == ne && spin_projection_twice(k, n) == ms2
            })?;
            let pool = build_uccgsd_pool(data.n_spin_orbitals())?;
            Model {
                tag,
                energy_offset: data.core_energy,
                hamiltonian: h,
                ground,
                molecule: Some(data),
                pool: Some(pool),
            }
        }
    };
    Ok(model)
}

fn spin_model(tag: String, h: ObservableSum) -> Result<Model, ExperimentError> {
    Ok(Model {
        tag,
        ground: exact_ground(&h)?,
        hamiltonian: h,
        energy_offset: 0.0,
        molecule: None,
        pool: None,
    })
}

pub fn build_partition(cfg: &ExperimentConfig, model: &Model) -> Result<HamiltonianPartition, ExperimentError> {
    let n = model.n_qubits();
    let p = &cfg.partition;
    let spec = match p.kind {
        PartitionKind::Trivial => PartitionSpec::Trivial,
        PartitionKind::EvenOdd => PartitionSpec::EvenOdd,
        PartitionKind::Groups => PartitionSpec::Groups(p.groups.clone()),
        PartitionKind::Windows => PartitionSpec::Windows(p.windows.iter().map(|w| (w[0], w[1])).collect()),
        PartitionKind::Greedy => {
            let pool = model
                .pool
                .as_ref()
                .ok_or_else(|| ExperimentError::Config("greedy partitions need a molecule operator pool".into()))?;
            PartitionSpec::GreedyCommuting {
                groups: p.count.unwrap_or(1),
                pool: pool.ops().cloned().collect(),
            }
        }
    };
    let d = p.domain_size.unwrap_or(n);
    if d > n {
        return Err(ExperimentError::Config(format!("domain size {d} exceeds the {n}-qubit register")));
    }
    make_partition(&model.hamiltonian, &spec, d).map_err(|e| ExperimentError::Config(e.to_string()))
}

fn hadamard() -> [[Complex64; 2]; 2] {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

fn pauli_x() -> [[Complex64; 2]; 2] {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    [[o, l], [l, o]]
}

/// Seeded batch of states in the stabilizer sector of `group`.
///
/// Each sample applies X then H to every qubit of `|0…0⟩`, each gate with its
/// own probability, and is projected by exact imaginary-time evolution under
/// minus the sum of all signed group elements.
pub fn generate_initial_batch<R: Rng>(
    count: usize,
    x_prob: f64,
    h_prob: f64,
    beta: f64,
    group: &SymmetryGroup,
    n_qubits: usize,
    rng: &mut R,
) -> Result<Vec<StateVector>, ExperimentError> {
    let elements = group.group_elements(n_qubits);
    let aux = ObservableSum::from_terms(
        n_qubits,
        elements.iter().map(|p| (Complex64::new(-1.0, 0.0), *p)),
    )?;
    let propagator = if group.is_empty() { None } else { Some(ExactPropagator::new(&aux)?) };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut attempts = 0;
        let state = loop {
            if attempts > MAX_RESAMPLES {
                return Err(ExperimentError::Config(format!(
                    "batch state {i}: stabilizer sector unreachable after {MAX_RESAMPLES} resamples"
                )));
            }
            attempts += 1;
            let mut s = StateVector::zero_state(n_qubits);
            for q in 0..n_qubits {
                if rng.random_bool(x_prob) {
                    s.apply_single_qubit(q, pauli_x())?;
                }
                if rng.random_bool(h_prob) {
                    s.apply_single_qubit(q, hadamard())?;
                }
            }
            let Some(prop) = &propagator else { break s };
            let weight = -s.energy(&aux)? / elements.len() as f64;
            if weight < MIN_SECTOR_WEIGHT {
                continue;
            }
            let projected = prop.evolve(&s, beta)?;
            let e = group.sector_expectations(&projected)?;
            if e.iter().all(|v| (v - 1.0).abs() <= SECTOR_TOL) {
                break projected;
            }
        };
        out.push(state);
    }
    Ok(out)
}

/// Everything a run needs, derived once from a config.
#[derive(Clone, Debug)]
pub struct Setup {
    pub model: Model,
    /// Stabilizer found in the Hamiltonian, before adapting to the states.
    pub discovered: SymmetryGroup,
    pub states: Vec<StateVector>,
    pub grid: TimeGrid,
    pub options: DriverOptions,
    pub problem: Problem,
}

fn formulation(cfg: &ExperimentConfig) -> Formulation {
    let kind = cfg.solver.formulation.unwrap_or(if cfg.model.is_molecule() {
        FormulationKind::Antihermitian
    } else {
        FormulationKind::Pauli
    });
    match (kind, cfg.solver.order) {
        (FormulationKind::Antihermitian, _) => Formulation::AntiHermitianOrder2,
        (FormulationKind::Pauli, 1) => Formulation::PauliOrder1,
        (FormulationKind::Pauli, _) => Formulation::PauliOrder2,
    }
}

pub fn build_grid(cfg: &ExperimentConfig) -> Result<TimeGrid, ExperimentError> {
    let g = &cfg.grid;
    let grid = match &g.values {
        Some(v) => {
            let mut v = v.clone();
            if g.include_zero && !v.contains(&0.0) {
                v.push(0.0);
            }
            TimeGrid::from_values(v)
        }
        None => TimeGrid::uniform(g.l, g.t_max, g.include_zero),
    };
    grid.map_err(|e| ExperimentError::Config(e.to_string()))
}

pub fn driver_options(cfg: &ExperimentConfig) -> DriverOptions {
    DriverOptions {
        solver: SolverOptions {
            rcond: cfg.solver.rcond,
            drop_threshold: cfg.solver.drop_threshold,
        },
        mode: match cfg.solver.application {
            ApplicationKind::RotationProduct => ApplicationMode::RotationProduct,
            ApplicationKind::ExactGenerator => ApplicationMode::ExactGenerator,
        },
        order: match cfg.solver.ordering {
            OrderingKind::FirstTermInnermost => TermOrder::FirstTermInnermost,
            OrderingKind::LastTermInnermost => TermOrder::LastTermInnermost,
        },
        links: match cfg.symmetry.links {
            LinkKind::Off => LinkPolicy::Off,
            LinkKind::WhenDefinite => LinkPolicy::WhenDefinite,
            LinkKind::Always => LinkPolicy::Always,
        },
        verify_links: cfg.symmetry.verify_links,
    }
}

pub fn initial_states(
    cfg: &ExperimentConfig,
    model: &Model,
    group: &SymmetryGroup,
) -> Result<Vec<StateVector>, ExperimentError> {
    let n = model.n_qubits();
    match &cfg.initial {
        InitialConfig::Bitstring { bits } => {
            if bits.len() != n {
                return Err(ExperimentError::Config(format!(
                    "bitstring has {} characters for a {n}-qubit model",
                    bits.len()
                )));
            }
            Ok(vec![StateVector::from_bitstring(bits)?])
        }
        InitialConfig::HartreeFock => {
            let data = model.molecule.as_ref().expect("validated: molecule model");
            Ok(vec![StateVector::basis_state(n, data.hartree_fock_index())])
        }
        InitialConfig::SymmetricBatch {
            count,
            x_prob,
            h_prob,
            projection_beta,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            generate_initial_batch(*count, *x_prob, *h_prob, *projection_beta, group, n, &mut rng)
        }
    }
}

/// Sector holding the exact ground space (by the sign of `tr(P g)` per generator).
pub fn ground_sector(group: &SymmetryGroup, ground: &GroundSpace) -> Result<Vec<i8>, ExperimentError> {
    group
        .generators
        .iter()
        .map(|g| {
            let mut tr = 0.0;
            for b in &ground.basis {
                tr += b.pauli_expectation(g)?.re;
            }
            Ok(if tr < 0.0 { -1 } else { 1 })
        })
        .collect()
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Setup, ExperimentError> {
    let model = build_model(cfg)?;
    let partition = build_partition(cfg, &model)?;
    let n = model.n_qubits();
    let mut discovered = find_z2_symmetries(&model.hamiltonian)?;
    if let Some(sector) = &cfg.symmetry.sector {
        if sector.len() != discovered.len() {
            return Err(ExperimentError::Config(format!(
                "sector has {} entries for {} stabilizer generators",
                sector.len(),
                discovered.len()
            )));
        }
        discovered.sector = sector.clone();
    } else {
        discovered.sector = ground_sector(&discovered, &model.ground)?;
    }
    let states = initial_states(cfg, &model, &discovered)?;
    // Keep only the generators every initial state is an eigenstate of.
    let symmetry = discovered.adapted_to(&states, SECTOR_TOL)?;
    let formulation = formulation(cfg);
    let reduction = if cfg.symmetry.reduce { symmetry.clone() } else { SymmetryGroup::empty() };
    let bases = match (&model.pool, formulation) {
        (Some(pool), Formulation::AntiHermitianOrder2) => pool_bases(&partition, pool),
        (_, Formulation::AntiHermitianOrder2) => reduced_pauli_bases(&partition, &reduction)?
            .into_iter()
            .map(|b| match b {
                Basis::Pauli(v) => Basis::anti_hermitian_from_paulis(&v),
                other => other,
            })
            .collect(),
        _ => reduced_pauli_bases(&partition, &reduction)?,
    };
    if n > 10 {
        return Err(ExperimentError::Config(format!("{n} qubits exceeds the 10-qubit emulation cap")));
    }
    let problem = Problem::new(partition, bases, formulation)?
        .with_ground(model.ground.clone())
        .with_symmetry(symmetry);
    Ok(Setup {
        grid: build_grid(cfg)?,
        options: driver_options(cfg),
        model,
        discovered,
        states,
        problem,
    })
}

/// Quantities `check` prints and `run` records, computed from the same setup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derived {
    pub n_qubits: usize,
    pub hamiltonian_terms: usize,
    pub exact_energy: f64,
    pub partition_terms: usize,
    pub domains: Vec<Vec<usize>>,
    /// `(linked term, source term)` pairs.
    pub symmetry_links: Vec<(usize, usize)>,
    pub stabilizer: Vec<String>,
    pub sector: Vec<i8>,
    pub formulation: String,
    pub basis_sizes: Vec<usize>,
    pub measurements_per_reference: Vec<usize>,
    pub grid: Vec<f64>,
    pub initial_states: usize,
    /// Distinct linear-system strings MT-QITE measures per step when no term
    /// is transported.
    pub mtqite_linear_per_step: usize,
    /// Same with every symmetry-linked term transported.
    pub mtqite_linear_per_step_linked: usize,
    /// Distinct linear-system measurements baseline QITE makes per Trotter
    /// step, summed over the grid.
    pub qite_linear_per_step: usize,
    /// Candidate states per MT-QITE energy scan.
    pub scan_candidates: usize,
    pub scan_paulis_per_step: usize,
}

impl Derived {
    pub fn from_setup(setup: &Setup) -> Self {
        let p = &setup.problem;
        let part = &p.partition;
        let union = |skip_linked: bool| {
            let mut seen = HashSet::new();
            for (m, s) in p.solvers.iter().enumerate() {
                if skip_linked && part.symmetry_links.contains_key(&m) {
                    continue;
                }
                seen.extend(s.measured_strings().map(|q| (q.x_mask(), q.z_mask())));
            }
            seen.len()
        };
        let nonzero = setup.grid.values().iter().filter(|&&v| v > 0.0).count();
        let counts: Vec<usize> = p.solvers.iter().map(|s| s.measurement_count()).collect();
        let candidates = setup.grid.len().pow(part.len() as u32);
        Derived {
            n_qubits: p.n_qubits(),
            hamiltonian_terms: part.full.len(),
            exact_energy: setup.model.exact_energy(),
            partition_terms: part.len(),
            domains: part.domains.clone(),
            symmetry_links: part.symmetry_links.iter().map(|(k, l)| (*k, l.source)).collect(),
            stabilizer: p.symmetry.generators.iter().map(|g| g.to_string()).collect(),
            sector: p.symmetry.sector.clone(),
            formulation: format!("{:?}", p.formulation),
            basis_sizes: p.solvers.iter().map(|s| s.basis.len()).collect(),
            measurements_per_reference: counts.clone(),
            grid: setup.grid.values().to_vec(),
            initial_states: setup.states.len(),
            mtqite_linear_per_step: if nonzero > 0 { union(false) } else { 0 },
            mtqite_linear_per_step_linked: if nonzero > 0 { union(true) } else { 0 },
            qite_linear_per_step: nonzero * counts.iter().sum::<usize>(),
            scan_candidates: candidates,
            scan_paulis_per_step: candidates * part.full.len(),
        }
    }
}
