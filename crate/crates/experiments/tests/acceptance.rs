//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with a plain `main` so the verdicts are printed even when the other
//! test binaries capture their output. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mtqite_core::mtqite::Algorithm;
use mtqite_core::oracles::exact_ite;
use mtqite_core::qite::{equivalence_check, qite_step, Basis, Formulation, MeasurementLedger, SolverOptions, TermSolver};
use mtqite_core::symmetry::{reduce_basis, SymmetryGroup};
use mtqite_core::{ApplicationMode, ObservableSum, Pauli, PauliString, StateVector};
use mtqite_experiments::config::{load_value, parse_scalar, set_dotted};
use mtqite_experiments::runner::{write_csv, InvariantReport};
use mtqite_experiments::{run_experiment, ExperimentConfig, ExperimentOutput};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

struct Verdict {
    pass: bool,
    detail: String,
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str, overrides: &[(&str, &str)]) -> ExperimentConfig {
    let (mut doc, base) = load_value(&configs_dir().join(format!("{name}.toml"))).unwrap();
    for (k, v) in overrides {
        set_dotted(&mut doc, k, parse_scalar(v)).unwrap();
    }
    ExperimentConfig::from_toml_value(doc, &base).unwrap()
}

// ---------------------------------------------------------------- dense oracles

fn pauli_matrix(p: Pauli) -> DMatrix<C> {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Kronecker product with qubit 0 as the least significant index bit.
fn dense(p: &PauliString) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    for q in 0..p.n_qubits() {
        m = pauli_matrix(p.pauli_at(q)).kronecker(&m);
    }
    m * C::new(0.0, 1.0).powi(p.phase_exp() as i32)
}

fn dense_sum(h: &ObservableSum) -> DMatrix<C> {
    let d = 1 << h.n_qubits();
    h.terms()
        .iter()
        .fold(DMatrix::zeros(d, d), |acc, (p, c)| acc + dense(p) * *c)
}

fn all_strings(n: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    for x in 0..1u64 << n {
        for z in 0..1u64 << n {
            for ph in 0..4 {
                out.push(PauliString::new(n, x, z, ph).unwrap());
            }
        }
    }
    out
}

fn random_hermitian<R: Rng>(n: usize, terms: usize, rng: &mut R) -> ObservableSum {
    let parts: Vec<_> = (0..terms)
        .map(|_| {
            let s = PauliString::new(n, rng.random_range(0..1u64 << n), rng.random_range(0..1u64 << n), 0).unwrap();
            (C::new(rng.random_range(-1.0..1.0), 0.0), s)
        })
        .collect();
    ObservableSum::from_terms(n, parts).unwrap()
}

fn full_basis(n: usize) -> Vec<PauliString> {
    let domain: Vec<usize> = (0..n).collect();
    reduce_basis(&domain, n, &SymmetryGroup::empty())
}

/// Least-squares slope of `log err` against `log dt`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

// ------------------------------------------------------------ core criteria

fn pauli_statevector() -> Verdict {
    let mut mismatches = 0usize;
    let mut pairs = 0usize;
    for n in 1..=2 {
        let strings = all_strings(n);
        for a in &strings {
            let da = dense(a);
            for b in &strings {
                pairs += 1;
                let (db, prod) = (dense(b), a.try_mul(b).unwrap());
                let ab = &da * &db;
                if dense(&prod) != ab {
                    mismatches += 1;
                }
                let commute = ab == &db * &da;
                if a.commutes(b).unwrap() != commute {
                    mismatches += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=4);
        let p = PauliString::new(n, rng.random_range(0..1u64 << n), rng.random_range(0..1u64 << n), 2 * rng.random_range(0..2))
            .unwrap();
        let theta = rng.random_range(-3.2..3.2);
        let state = StateVector::random(n, &mut rng);
        let out = state.rotated(&p, theta).unwrap();
        let u = (dense(&p) * C::new(0.0, -theta)).exp();
        let expect = u * DVector::from_column_slice(state.amplitudes());
        let dev = out
            .amplitudes()
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    Verdict {
        pass: mismatches == 0 && worst <= 1e-12,
        detail: format!("{pairs} product/commutation pairs, {mismatches} mismatches; 1000 rotations, max deviation {worst:.2e} (tol 1e-12)"),
    }
}

fn step_order() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let basis = Basis::Pauli(full_basis(2));
    let mut slopes = Vec::new();
    for _ in 0..5 {
        let h = random_hermitian(2, 5, &mut rng);
        let start = StateVector::random(2, &mut rng);
        let pts: Vec<(f64, f64)> = log_grid(1e-3, 1e-1, 9)
            .into_iter()
            .map(|dt| {
                let mut ledger = MeasurementLedger::new();
                let step = qite_step(&start, &h, &basis, dt, Formulation::PauliOrder2, SolverOptions::default(), &mut ledger, 0)
                    .unwrap();
                let mut out = start.clone();
                out.apply_unitary_step(&step, ApplicationMode::RotationProduct).unwrap();
                let exact = exact_ite(&start, &h, dt).unwrap();
                let err = out
                    .amplitudes()
                    .iter()
                    .zip(exact.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                (dt, err)
            })
            .collect();
        slopes.push(loglog_slope(&pts));
    }
    let pass = slopes.iter().all(|s| (s - 2.0).abs() <= 0.3);
    let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    Verdict {
        pass,
        detail: format!("log-log slopes over Δτ ∈ [1e-3, 1e-1] on 5 random 2-qubit instances: [{}] (target 2 ± 0.3)", shown.join(", ")),
    }
}

fn formulation_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let basis = full_basis(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let h = random_hermitian(3, rng.random_range(1..=8), &mut rng);
        let state = StateVector::random(3, &mut rng);
        let dt = rng.random_range(0.01..0.5);
        let r = equivalence_check(&state, &h, &basis, dt, 1e-8).unwrap();
        worst = worst.max(r.a_deviation);
    }
    Verdict {
        pass: worst <= 1e-12,
        detail: format!("200 random 3-qubit instances, max |a_AH − a_Pauli| = {worst:.2e} (tol 1e-12)"),
    }
}

fn c_normalisation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let basis = Basis::Pauli(full_basis(2));
    let mut slopes = Vec::new();
    for _ in 0..5 {
        let n = 2;
        let h = random_hermitian(n, 4, &mut rng);
        let state = StateVector::random(n, &mut rng);
        let solver = TermSolver::new(0, h.clone(), basis.clone(), Formulation::PauliOrder2).unwrap();
        let mut ledger = MeasurementLedger::new();
        let m = solver.measure(&state, 0, &mut ledger, 1e-8).unwrap();
        let psi = DVector::from_column_slice(state.amplitudes());
        let dh = dense_sum(&h);
        let pts: Vec<(f64, f64)> = log_grid(1e-2, 1e-1, 7)
            .into_iter()
            .map(|dt| {
                let exact = (psi.adjoint() * (&dh * C::new(-2.0 * dt, 0.0)).exp() * &psi)[(0, 0)].re;
                (dt, (m.c_norm(dt) - exact).abs())
            })
            .collect();
        slopes.push(loglog_slope(&pts));
    }
    let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    Verdict {
        pass: min >= 2.7,
        detail: format!("min log-log slope of |c − ⟨e^(−2Δτh)⟩| over Δτ ∈ [0.01, 0.1] on 5 instances = {min:.3} (≥ 2.7)"),
    }
}

// ------------------------------------------------------- experiment criteria

struct Runs {
    invariants: Vec<(String, InvariantReport)>,
}

impl Runs {
    fn run(&mut self, label: &str, cfg: &ExperimentConfig) -> ExperimentOutput {
        let out = run_experiment(cfg).unwrap_or_else(|e| panic!("{label}: {e}"));
        self.invariants.push((label.to_string(), out.summary.invariants.clone()));
        out
    }
}

fn final_infidelities(out: &ExperimentOutput, alg: Algorithm) -> Vec<f64> {
    out.outcomes_for(alg).map(|o| o.record.last().infidelity.unwrap()).collect()
}

fn tfim6_3p_criterion(runs: &mut Runs) -> (Verdict, ExperimentOutput) {
    let cfg = config("tfim6_3p", &[]);
    let out = runs.run("tfim6_3p", &cfg);
    let mt = final_infidelities(&out, Algorithm::MtQite)[0];
    let qt = final_infidelities(&out, Algorithm::Qite)[0];
    let ratio = mt / qt;
    let full = runs.run("tfim6_3p qite 10 steps", &config("tfim6_3p", &[("qite_steps", "10"), ("algorithm", "\"qite\"")]));
    let qt10 = final_infidelities(&full, Algorithm::Qite)[0];
    let soft = if ratio > 1e-2 && ratio <= 1e-1 { " (soft pass at one order only)" } else { "" };
    (
        Verdict {
            pass: ratio <= 1e-2,
            detail: format!(
                "MT-QITE 10 steps {mt:.3e} vs QITE {} steps {qt:.3e}: ratio {ratio:.3e} (≤ 1e-2){soft}; QITE at 10 steps {qt10:.3e}, ratio {:.3e}",
                cfg.qite_steps(),
                mt / qt10
            ),
        },
        out,
    )
}

fn xxz8_batch_criterion(runs: &mut Runs) -> (Verdict, ExperimentOutput) {
    let out = runs.run("xxz8_2p", &config("xxz8_2p", &[]));
    let s = &out.summary;
    let (mt, qt) = (s.mtqite.as_ref().unwrap(), s.qite.as_ref().unwrap());
    let i = mt.final_infidelity.mean <= 0.2 * qt.final_infidelity.mean;
    let ii = mt.final_infidelity.best <= 1e-4;
    let ledger = mt.linear_paulis.mean;
    let iii = (10f64.powf(4.5)..=10f64.powf(5.5)).contains(&ledger) && ledger <= 0.2 * qt.linear_paulis.mean;
    let rot = mt.rotations.mean;
    let iv = (600.0..=2400.0).contains(&rot);
    let batch_total: f64 = ledger * mt.runs as f64;
    let with_scan = ledger + mt.scan_paulis.mean;
    let flag = |b: bool| if b { "ok" } else { "FAIL" };
    (
        Verdict {
            pass: i && ii && iii && iv,
            detail: format!(
                "(i) {} mean infidelity MT {:.3e} vs QITE {:.3e} (ratio {:.3}, ≤ 0.2); \
                 (ii) {} best MT {:.3e} (≤ 1e-4); \
                 (iii) {} MT linear ledger per run {:.0} = 10^{:.2} (in [10^4.5, 10^5.5]), QITE {:.0}, ratio {:.3} (≤ 0.2) \
                 [batch total 10^{:.2}, per run incl. scan strings 10^{:.2}]; \
                 (iv) {} rotations per run {:.0} (in [600, 2400])",
                flag(i),
                mt.final_infidelity.mean,
                qt.final_infidelity.mean,
                mt.final_infidelity.mean / qt.final_infidelity.mean,
                flag(ii),
                mt.final_infidelity.best,
                flag(iii),
                ledger,
                ledger.log10(),
                qt.linear_paulis.mean,
                ledger / qt.linear_paulis.mean,
                batch_total.log10(),
                with_scan.log10(),
                flag(iv),
                rot
            ),
        },
        out,
    )
}

fn l_independence(runs: &mut Runs) -> (Verdict, Vec<ExperimentOutput>) {
    let short = runs.run("xxz6 L=6", &config("xxz6_l12", &[("grid.l", "6")]));
    let long = runs.run("xxz6 L=12", &config("xxz6_l12", &[]));
    let ledgers = |o: &ExperimentOutput, a| -> Vec<usize> { o.outcomes_for(a).map(|r| r.record.last().linear_ledger).collect() };
    let (m6, m12) = (ledgers(&short, Algorithm::MtQite), ledgers(&long, Algorithm::MtQite));
    let (q6, q12) = (ledgers(&short, Algorithm::Qite), ledgers(&long, Algorithm::Qite));
    let ratio = q12.iter().sum::<usize>() as f64 / q6.iter().sum::<usize>() as f64;
    (
        Verdict {
            pass: m6 == m12 && (ratio - 2.0).abs() <= 0.2,
            detail: format!("MT-QITE ledgers L=6 {m6:?} vs L=12 {m12:?}; QITE L=6 {q6:?} vs L=12 {q12:?}, ratio {ratio:.3} (2 ± 10%)"),
        },
        vec![short, long],
    )
}

fn symmetry_shortcuts(runs: &Runs, tfim3p: &ExperimentOutput) -> Verdict {
    let inv = &tfim3p.summary.invariants;
    let transport = inv.max_transport_deviation;
    let sector = runs
        .invariants
        .iter()
        .filter_map(|(_, r)| r.max_sector_deviation)
        .fold(0.0, f64::max);
    let pass = inv.transported_steps > 0 && transport.is_some_and(|d| d <= 1e-10) && sector <= 1e-8;
    Verdict {
        pass,
        detail: format!(
            "TFIM6 3P: {} transported steps, max |transported − direct| {} (≤ 1e-10); max stabilizer deviation over all runs {sector:.2e} (≤ 1e-8)",
            inv.transported_steps,
            transport.map_or("n/a".into(), |d| format!("{d:.2e}"))
        ),
    }
}

const DISTANCES: [&str; 7] = ["0.60", "0.70", "0.80", "0.90", "1.00", "1.10", "1.20"];

fn h4(runs: &mut Runs) -> (Verdict, ExperimentOutput) {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut first = None;
    let mut at_far = (0.0, 0.0);
    for d in DISTANCES {
        let path = format!("\"../data/fcidump/h4_{d}.fcidump\"");
        let o3 = runs.run(&format!("h4 3P {d}"), &config("h4_3p", &[("model.fcidump", &path)]));
        let o1 = runs.run(&format!("h4 1P {d}"), &config("h4_1p", &[("model.fcidump", &path)]));
        let err = |o: &ExperimentOutput, a| energy_error(o, a) * 1e3;
        let (e3, e1m, e1q) = (err(&o3, Algorithm::MtQite), err(&o1, Algorithm::MtQite), err(&o1, Algorithm::Qite));
        pass &= e3 <= 1.6;
        lines.push(format!("{d} Å 3P {e3:.3} / 1P MT {e1m:.3} / 1P QITE {e1q:.3}"));
        if d == "1.20" {
            at_far = (e3, e1m);
        }
        if first.is_none() {
            first = Some(o3);
        }
    }
    let order = if at_far.0 < at_far.1 { "3P < 1P" } else { "3P ≥ 1P" };
    (
        Verdict {
            pass,
            detail: format!("|E − E_exact| in mHa (3P ≤ 1.6): {}; at 1.20 Å {order}", lines.join("; ")),
        },
        first.unwrap(),
    )
}

fn monotonicity(runs: &Runs) -> Verdict {
    let bad: Vec<&str> = runs
        .invariants
        .iter()
        .filter(|(_, r)| !r.holds())
        .map(|(l, _)| l.as_str())
        .collect();
    let (m, d): (usize, usize) = runs
        .invariants
        .iter()
        .fold((0, 0), |(m, d), (_, r)| (m + r.monotonicity_violations, d + r.diagonal_violations));
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "{} experiments: {m} energy increases (tol 1e-12), {d} scan minima above the diagonal minimum{}",
            runs.invariants.len(),
            if bad.is_empty() { String::new() } else { format!("; failing: {bad:?}") }
        ),
    }
}

/// CSV bytes of `out` with the trailing wall-time column removed.
fn golden_csv(out: &ExperimentOutput, dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.csv"));
    write_csv(&path, &out.rows, &[], &|_| Vec::new()).unwrap();
    std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism(first: &[(String, ExperimentConfig, ExperimentOutput)]) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for (label, cfg, out) in first {
        let again = run_experiment(cfg).unwrap();
        if golden_csv(out, dir.path(), "a") != golden_csv(&again, dir.path(), "b") {
            differing.push(label.clone());
        }
    }
    Verdict {
        pass: differing.is_empty(),
        detail: format!(
            "re-ran {} criterion configs with the same seed: {} byte-identical CSVs{}",
            first.len(),
            first.len() - differing.len(),
            if differing.is_empty() { String::new() } else { format!("; differing: {differing:?}") }
        ),
    }
}

fn energy_error(out: &ExperimentOutput, a: Algorithm) -> f64 {
    let s = match a {
        Algorithm::MtQite => &out.summary.mtqite,
        Algorithm::Qite => &out.summary.qite,
    };
    s.as_ref().map_or(f64::NAN, |s| s.final_energy_error.mean)
}

fn report(name: &str, limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let pass = v.pass && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
    println!(
        "{} {name}: {} [{:.1}s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        took.as_secs_f64()
    );
    pass
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report("pauli-statevector", Some(secs(10)), pauli_statevector);
    ok &= report("qite-step-order", Some(secs(10)), step_order);
    ok &= report("formulation-equivalence", Some(secs(30)), formulation_equivalence);
    ok &= report("c-normalisation", Some(secs(10)), c_normalisation);

    let mut runs = Runs { invariants: Vec::new() };
    let mut reruns: Vec<(String, ExperimentConfig, ExperimentOutput)> = Vec::new();

    let mut tfim = None;
    ok &= report("tfim6-3p-infidelity", Some(secs(600)), || {
        let (v, out) = tfim6_3p_criterion(&mut runs);
        tfim = Some(out);
        v
    });
    let tfim = tfim.unwrap();
    let mut xxz = None;
    ok &= report("xxz8-batch", Some(secs(3600)), || {
        let (v, out) = xxz8_batch_criterion(&mut runs);
        xxz = Some(out);
        v
    });
    let mut lind = None;
    ok &= report("ledger-l-independence", Some(secs(300)), || {
        let (v, outs) = l_independence(&mut runs);
        lind = Some(outs);
        v
    });
    let tfim2p = runs.run("tfim6_2p", &config("tfim6_2p", &[]));
    ok &= report("symmetry-shortcuts", Some(secs(300)), || symmetry_shortcuts(&runs, &tfim));
    let mut h4_first = None;
    ok &= report("h4-chemistry", Some(secs(3600)), || {
        let (v, out) = h4(&mut runs);
        h4_first = Some(out);
        v
    });
    let hubbard = runs.run("hubbard3", &config("hubbard3", &[]));
    let toy = runs.run("toy", &config("toy", &[]));
    ok &= report("monotonicity-upper-bound", None, || monotonicity(&runs));

    let lind = lind.unwrap();
    reruns.push(("tfim6_3p".into(), config("tfim6_3p", &[]), tfim));
    reruns.push(("xxz8_2p".into(), config("xxz8_2p", &[]), xxz.unwrap()));
    let [short, long]: [ExperimentOutput; 2] = lind.try_into().ok().unwrap();
    reruns.push(("xxz6 L=6".into(), config("xxz6_l12", &[("grid.l", "6")]), short));
    reruns.push(("xxz6 L=12".into(), config("xxz6_l12", &[]), long));
    reruns.push(("tfim6_2p".into(), config("tfim6_2p", &[]), tfim2p));
    reruns.push(("h4_3p 0.60".into(), config("h4_3p", &[]), h4_first.unwrap()));
    reruns.push(("hubbard3".into(), config("hubbard3", &[]), hubbard));
    reruns.push(("toy".into(), config("toy", &[]), toy));
    ok &= report("determinism", None, || determinism(&reruns));

    if !ok {
        std::process::exit(1);
    }
}
