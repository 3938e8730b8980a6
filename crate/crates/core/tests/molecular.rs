use std::path::PathBuf;

use mtqite_core::hamiltonians::{number_operator, parse_fcidump, parse_fcidump_str, MolecularData};
use mtqite_core::oracles::{exact_ground_in_subspace, spectrum};
use nalgebra::DMatrix;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fcidump").join(name)
}

fn sidecar_fci(name: &str) -> f64 {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["e_fci"].as_f64().unwrap()
}

/// Applies `a_m` (or `a†_m`) to a determinant, returning the sign and new determinant.
fn apply(m: usize, dagger: bool, det: Option<(f64, usize)>) -> Option<(f64, usize)> {
    let (sign, k) = det?;
    let occupied = k >> m & 1 == 1;
    if occupied == dagger {
        return None;
    }
    let parity = (k & ((1 << m) - 1)).count_ones();
    let sign = if parity % 2 == 1 { -sign } else { sign };
    Some((sign, k ^ (1 << m)))
}

/// Second-quantised Hamiltonian built directly on Fock determinants.
fn fock_matrix(d: &MolecularData) -> DMatrix<f64> {
    let n = d.n_orbitals;
    let modes = 2 * n;
    let dim = 1 << modes;
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    let out = apply(2 * p + s, true, apply(2 * q + s, false, Some((1.0, k))));
                    if let Some((sign, j)) = out {
                        h[(j, k)] += d.h1(p, q) * sign;
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = d.h2(p, q, r, s);
                        for a in 0..2 {
                            for b in 0..2 {
                                let mut det = Some((1.0, k));
                                det = apply(2 * q + a, false, det);
                                det = apply(2 * s + b, false, det);
                                det = apply(2 * r + b, true, det);
                                det = apply(2 * p + a, true, det);
                                if let Some((sign, j)) = det {
                                    h[(j, k)] += 0.5 * v * sign;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    h
}

fn in_sector(k: usize, n_elec: usize) -> bool {
    let up = (k & 0x5555_5555).count_ones();
    let down = (k & 0xAAAA_AAAA).count_ones();
    (up + down) as usize == n_elec && up == down
}

#[test]
fn h2_qubit_hamiltonian_matches_fock_space_oracle() {
    let d = parse_fcidump(fixture("h2_0.74.fcidump")).unwrap();
    assert_eq!((d.n_orbitals, d.n_electrons), (2, 2));
    let h = d.qubit_hamiltonian().unwrap();
    let dense = h.to_dense().unwrap();
    let oracle = fock_matrix(&d);
    let diff = dense.map(|c| c.re) - &oracle;
    assert!(diff.norm() < 1e-12, "matrix deviation {}", diff.norm());
    assert!(dense.map(|c| c.im).norm() < 1e-14);
    let oracle_ground = oracle.symmetric_eigen().eigenvalues.min();
    let ground = spectrum(&h).unwrap()[0];
    assert!((ground - oracle_ground).abs() < 1e-12);
    let sector = exact_ground_in_subspace(&h, |k| in_sector(k, 2)).unwrap();
    assert!((sector.energy + d.core_energy - sidecar_fci("h2_0.74.json")).abs() < 1e-8);
}

#[test]
fn h4_fixtures_match_reference_full_ci() {
    for d in ["0.60", "0.70", "0.80", "0.90", "1.00", "1.10", "1.20"] {
        let data = parse_fcidump(fixture(&format!("h4_{d}.fcidump"))).unwrap();
        assert_eq!((data.n_orbitals, data.n_electrons), (4, 4));
        let h = data.qubit_hamiltonian().unwrap();
        assert!(h.is_hermitian());
        let gs = exact_ground_in_subspace(&h, |k| in_sector(k, 4)).unwrap();
        let reference = sidecar_fci(&format!("h4_{d}.json"));
        assert!(
            (gs.energy + data.core_energy - reference).abs() < 1e-8,
            "d = {d}: {} vs {reference}",
            gs.energy + data.core_energy
        );
    }
}

#[test]
fn molecular_hamiltonian_conserves_particle_number() {
    let data = parse_fcidump(fixture("h4_1.00.fcidump")).unwrap();
    let h = data.qubit_hamiltonian().unwrap();
    assert!(h.commutes_with(&number_operator(8)).unwrap());
    let (hd, nd) = (h.to_dense().unwrap(), number_operator(8).to_dense().unwrap());
    assert!((&hd * &nd - &nd * &hd).norm() < 1e-10);
}

#[test]
fn energies_invariant_under_integral_permutations() {
    let text = std::fs::read_to_string(fixture("h2_0.74.fcidump")).unwrap();
    let base = parse_fcidump_str(&text).unwrap().qubit_hamiltonian().unwrap();
    let (header, body) = text.split_at(text.find("&END").unwrap() + 4);
    for perm in 0..8usize {
        let mut out = String::from(header);
        out.push('\n');
        for line in body.lines().filter(|l| !l.trim().is_empty()) {
            let t: Vec<&str> = line.split_whitespace().collect();
            let (i, j, k, l) = (t[1], t[2], t[3], t[4]);
            let (mut a, mut b, mut c, mut e) = (i, j, k, l);
            if k != "0" {
                if perm & 1 == 1 {
                    std::mem::swap(&mut a, &mut b);
                }
                if perm & 2 == 2 {
                    std::mem::swap(&mut c, &mut e);
                }
                if perm & 4 == 4 {
                    (a, b, c, e) = (c, e, a, b);
                }
            } else if j != "0" && perm & 1 == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            out.push_str(&format!("{} {a} {b} {c} {e}\n", t[0]));
        }
        let h = parse_fcidump_str(&out).unwrap().qubit_hamiltonian().unwrap();
        assert!(h.approx_eq(&base, 1e-14), "permutation {perm}");
    }
}
