use mtqite_core::hamiltonians::{build_tfim, build_xxz, make_partition, HamiltonianPartition, PartitionSpec};
use mtqite_core::mtqite::{
    energy_scan, reduced_pauli_bases, run_mtqite, run_qite_baseline, solve_step_table, DriverOptions, LinkPolicy,
    Problem, TermOrder, TimeGrid,
};
use mtqite_core::oracles::{exact_ground, exact_ite};
use mtqite_core::qite::{Basis, Formulation, MeasurementLedger, Purpose};
use mtqite_core::symmetry::{find_z2_symmetries, reduce_basis, SymmetryGroup};
use mtqite_core::{ObservableSum, PauliString, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn full_problem(h: &ObservableSum, spec: PartitionSpec, d: usize) -> Problem {
    let part = make_partition(h, &spec, d).unwrap();
    let bases = reduced_pauli_bases(&part, &SymmetryGroup::empty()).unwrap();
    let ground = exact_ground(h).unwrap();
    Problem::new(part, bases, Formulation::PauliOrder2).unwrap().with_ground(ground)
}

fn one_qubit_z() -> Problem {
    let h = ObservableSum::from_labels(&[(1.0, "Z")]).unwrap();
    full_problem(&h, PartitionSpec::Trivial, 1)
}

fn plus() -> StateVector {
    StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap()
}

fn random_h<R: Rng>(n: usize, terms: usize, rng: &mut R) -> ObservableSum {
    let parts: Vec<_> = (0..terms)
        .map(|_| {
            let x = rng.random_range(0..1u64 << n);
            let z = rng.random_range(0..1u64 << n);
            (Complex64::new(rng.random_range(-1.0..1.0), 0.0), PauliString::new(n, x, z, 0).unwrap())
        })
        .collect();
    ObservableSum::from_terms(n, parts).unwrap()
}

fn xxz4_problem() -> Problem {
    let h = build_xxz(4, 0.7).unwrap();
    full_problem(&h, PartitionSpec::EvenOdd, 4)
}

fn neel4() -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = StateVector::random(4, &mut rng);
    let base = StateVector::from_bitstring("0101").unwrap();
    let amps: Vec<_> = base
        .amplitudes()
        .iter()
        .zip(noise.amplitudes())
        .map(|(a, b)| a + 0.2 * b)
        .collect();
    StateVector::from_amplitudes(4, amps).unwrap()
}

#[test]
fn zero_grid_leaves_state_alone() {
    let grid = TimeGrid::from_values(vec![0.0]).unwrap();
    let p = xxz4_problem();
    for rec in [
        run_mtqite(&p, &neel4(), &grid, 3, &DriverOptions::default()).unwrap(),
        run_qite_baseline(&p, &neel4(), &grid, 3, &DriverOptions::default()).unwrap(),
    ] {
        assert_eq!(rec.final_state, neel4());
        assert!(rec.steps.iter().all(|s| s.energy == rec.steps[0].energy));
        assert_eq!(rec.ledger.count(Purpose::LinearSystem), 0);
    }
}

#[test]
fn one_qubit_converges() {
    let grid = TimeGrid::uniform(12, 0.5, false).unwrap();
    let rec = run_mtqite(&one_qubit_z(), &plus(), &grid, 10, &DriverOptions::default()).unwrap();
    for w in rec.steps.windows(2) {
        assert!(w[1].energy < w[0].energy);
    }
    assert!(rec.last().infidelity.unwrap() < 1e-4, "{:?}", rec.last());
    assert!(rec.last().energy > -1.0 - 1e-12);
}

#[test]
fn energy_never_increases_with_zero_in_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..4 {
        let h = random_h(3, 6, &mut rng);
        let k = h.len();
        let p = full_problem(&h, PartitionSpec::Groups(vec![(0..k / 2).collect(), (k / 2..k).collect()]), 3);
        let start = StateVector::random(3, &mut rng);
        let grid = TimeGrid::uniform(6, 0.5, true).unwrap();
        let rec = run_mtqite(&p, &start, &grid, 8, &DriverOptions::default()).unwrap();
        for w in rec.steps.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12);
            assert!(w[1].rotations >= w[0].rotations);
            assert!(w[1].linear_ledger >= w[0].linear_ledger);
        }
        for s in &rec.steps[1..] {
            assert!(s.energy <= s.diagonal_energy.unwrap() + 1e-12);
        }
    }
}

#[test]
fn scan_counts_and_bounds() {
    let p = xxz4_problem();
    let start = neel4();
    let grid = TimeGrid::uniform(12, 0.5, false).unwrap();
    let mut ledger = MeasurementLedger::new();
    let table = solve_step_table(&p, &start, &grid, &DriverOptions::default(), &mut ledger, 0).unwrap();
    let mut next = 0;
    let opts = DriverOptions::default();
    let scan = energy_scan(&start, &table, p.hamiltonian(), opts.order, opts.mode, &mut ledger, &mut next).unwrap();
    assert_eq!(scan.energies.len(), 144);
    assert_eq!(next, 144);
    assert_eq!(ledger.count(Purpose::EnergyScan), 144 * p.hamiltonian().len());
    assert_eq!(ledger.unkeyed_count(Purpose::EnergyScan), p.hamiltonian().len());
    assert!(scan.best_energy <= scan.diagonal_min.unwrap());
    let zero = TimeGrid::default();
    let table = solve_step_table(&p, &start, &zero, &opts, &mut ledger, 0).unwrap();
    let scan = energy_scan(&start, &table, p.hamiltonian(), opts.order, opts.mode, &mut ledger, &mut next).unwrap();
    assert_eq!(scan.energies.len(), 169);
    assert!(scan.best_energy <= start.energy(p.hamiltonian()).unwrap());
}

#[test]
fn scan_breaks_ties_towards_small_steps() {
    let h = ObservableSum::from_labels(&[(1.0, "Z")]).unwrap();
    let p = full_problem(&h, PartitionSpec::Trivial, 1);
    let ground = StateVector::from_bitstring("1").unwrap();
    let rec = run_mtqite(&p, &ground, &TimeGrid::default(), 2, &DriverOptions::default()).unwrap();
    assert_eq!(rec.steps[1].dts, vec![0.0]);
}

#[test]
fn linear_ledger_does_not_depend_on_grid_size() {
    let p = xxz4_problem();
    let opts = DriverOptions::default();
    let a = run_mtqite(&p, &neel4(), &TimeGrid::uniform(6, 0.5, true).unwrap(), 5, &opts).unwrap();
    let b = run_mtqite(&p, &neel4(), &TimeGrid::uniform(12, 0.5, true).unwrap(), 5, &opts).unwrap();
    assert_eq!(a.last().linear_ledger, b.last().linear_ledger);
    let qa = run_qite_baseline(&p, &neel4(), &TimeGrid::uniform(6, 0.5, true).unwrap(), 5, &opts).unwrap();
    let qb = run_qite_baseline(&p, &neel4(), &TimeGrid::uniform(12, 0.5, true).unwrap(), 5, &opts).unwrap();
    assert_eq!(qb.last().linear_ledger, 2 * qa.last().linear_ledger);
}

#[test]
fn runs_are_deterministic() {
    let p = xxz4_problem();
    let opts = DriverOptions::default();
    let grid = TimeGrid::default();
    assert_eq!(
        run_mtqite(&p, &neel4(), &grid, 4, &opts).unwrap(),
        run_mtqite(&p, &neel4(), &grid, 4, &opts).unwrap()
    );
    assert_eq!(
        run_qite_baseline(&p, &neel4(), &grid, 4, &opts).unwrap(),
        run_qite_baseline(&p, &neel4(), &grid, 4, &opts).unwrap()
    );
}

#[test]
fn trivial_partition_matches_baseline() {
    let h = build_xxz(3, 0.5).unwrap();
    let p = full_problem(&h, PartitionSpec::Trivial, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = StateVector::random(3, &mut rng);
    let grid = TimeGrid::from_values(vec![0.15]).unwrap();
    let opts = DriverOptions::default();
    let mt = run_mtqite(&p, &start, &grid, 6, &opts).unwrap();
    let qt = run_qite_baseline(&p, &start, &grid, 6, &opts).unwrap();
    for (a, b) in mt.steps.iter().zip(&qt.steps) {
        assert!((a.energy - b.energy).abs() < 1e-12);
    }
    let gap: f64 = mt
        .final_state
        .amplitudes()
        .iter()
        .zip(qt.final_state.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(gap < 1e-12);
    assert_eq!(mt.steps[1].linear_ledger, qt.steps[1].linear_ledger);
}

#[test]
fn two_qubit_problems_converge() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut done = 0;
    while done < 3 {
        let h = random_h(2, 5, &mut rng);
        let gs = exact_ground(&h).unwrap();
        let spec = mtqite_core::oracles::spectrum(&h).unwrap();
        if gs.degeneracy() != 1 || spec[1] - spec[0] < 0.5 {
            continue;
        }
        let p = full_problem(&h, PartitionSpec::Trivial, 2);
        let start = StateVector::random(2, &mut rng);
        let rec = run_mtqite(&p, &start, &TimeGrid::default(), 50, &DriverOptions::default()).unwrap();
        assert!(rec.last().infidelity.unwrap() < 1e-6, "gap {} {:?}", spec[1] - spec[0], rec.last());
        done += 1;
    }
}

#[test]
fn first_steps_agree_with_exact_ite_for_small_dt() {
    let p = xxz4_problem();
    let grid = TimeGrid::from_values(vec![0.01]).unwrap();
    let opts = DriverOptions::default();
    let rec = run_mtqite(&p, &neel4(), &grid, 1, &opts).unwrap();
    let trotter = exact_ite(&exact_ite(&neel4(), &p.partition.terms[0], 0.01).unwrap(), &p.partition.terms[1], 0.01)
        .unwrap();
    let e = trotter.energy(p.hamiltonian()).unwrap();
    let drop = e - rec.steps[0].energy;
    assert!((rec.last().energy - e).abs() < 0.02 * drop.abs());
}

fn ghz(n: usize) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(1.0, 0.0);
    amps[(1 << n) - 1] = Complex64::new(1.0, 0.0);
    StateVector::from_amplitudes(n, amps).unwrap()
}

fn tfim6_3p() -> Problem {
    let h = build_tfim(6, 1.0).unwrap();
    let group = find_z2_symmetries(&h).unwrap();
    let part = make_partition(&h, &PartitionSpec::Windows(vec![(0, 2), (2, 3), (3, 5)]), 4).unwrap();
    assert!(part.symmetry_links.contains_key(&2));
    let bases = reduced_pauli_bases(&part, &group).unwrap();
    Problem::new(part, bases, Formulation::PauliOrder2)
        .unwrap()
        .with_ground(exact_ground(&h).unwrap())
        .with_symmetry(group)
}

#[test]
fn inversion_transport_matches_direct_solve() {
    let p = tfim6_3p();
    let opts = DriverOptions {
        verify_links: true,
        ..Default::default()
    };
    let rec = run_mtqite(&p, &ghz(6), &TimeGrid::default(), 4, &opts).unwrap();
    assert_eq!(rec.steps[1].transported, vec![2]);
    for s in &rec.steps[1..] {
        if let Some(d) = s.transport_deviation {
            assert!(d < 1e-10, "step {} deviation {d}", s.step);
        }
        assert!(s.sector_deviation.unwrap() < 1e-8);
    }
    let off = run_mtqite(
        &p,
        &ghz(6),
        &TimeGrid::default(),
        1,
        &DriverOptions {
            links: LinkPolicy::Off,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(off.steps[1].transported.is_empty());
    assert!(off.steps[1].linear_ledger > rec.steps[1].linear_ledger);
    assert!((off.steps[1].energy - rec.steps[1].energy).abs() < 1e-10);
}

#[test]
fn linked_basis_is_permuted_source_basis() {
    let p = tfim6_3p();
    let Basis::Pauli(src) = &p.solvers[0].basis else { panic!() };
    let Basis::Pauli(dst) = &p.solvers[2].basis else { panic!() };
    let perm: Vec<usize> = (0..6).rev().collect();
    for (a, b) in src.iter().zip(dst) {
        assert_eq!(a.permute_qubits(&perm).unwrap(), *b);
    }
    let direct = reduce_basis(&p.partition.domains[2], 6, &p.symmetry);
    let mut sorted = dst.clone();
    sorted.sort_by(|a, b| a.canonical_cmp(b));
    assert_eq!(sorted.len(), direct.len());
}

#[test]
fn term_order_switch_changes_application_order() {
    let p = xxz4_problem();
    let grid = TimeGrid::from_values(vec![0.3]).unwrap();
    let a = run_mtqite(&p, &neel4(), &grid, 1, &DriverOptions::default()).unwrap();
    let b = run_mtqite(
        &p,
        &neel4(),
        &grid,
        1,
        &DriverOptions {
            order: TermOrder::LastTermInnermost,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((a.last().energy - b.last().energy).abs() > 1e-8);
    let _: &HamiltonianPartition = &p.partition;
}
