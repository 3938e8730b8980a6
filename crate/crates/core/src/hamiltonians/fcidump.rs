//! FCIDUMP reader and the spin-orbital molecular Hamiltonian built from it.

use std::path::Path;

use crate::error::{QiteError, Result};
use crate::hamiltonians::fermion::{FermionOp, JordanWigner};
use crate::pauli::ObservableSum;

/// Integrals over spatial orbitals in chemist notation.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularData {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    /// Nuclear repulsion plus any frozen-core contribution.
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl MolecularData {
    pub fn new(n_orbitals: usize, n_electrons: usize, ms2: i64, core_energy: f64) -> Self {
        Self {
            n_orbitals,
            n_electrons,
            ms2,
            core_energy,
            one_body: vec![0.0; n_orbitals * n_orbitals],
            two_body: vec![0.0; n_orbitals.pow(4)],
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    /// `h_pq`, 0-based.
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_orbitals + q]
    }

    /// `(pq|rs)`, 0-based.
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    pub fn set_h1(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orbitals;
        self.one_body[p * n + q] = v;
        self.one_body[q * n + p] = v;
    }

    /// Sets `(pq|rs)` and its seven symmetry images of a real integral.
    pub fn set_h2(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orbitals;
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.two_body[((a * n + b) * n + c) * n + d] = v;
        }
    }

    /// `Σ h_pq a†_p a_q + ½ Σ (pq|rs) a†_p a†_r a_s a_q` over spin orbitals.
    pub fn fermion_terms(&self) -> Vec<FermionOp> {
        let n = self.n_orbitals;
        let mut ops = Vec::new();
        for p in 0..n {
            for q in 0..n {
                let v = self.h1(p, q);
                if v == 0.0 {
                    continue;
                }
                for spin in 0..2 {
                    ops.push(FermionOp::hop(v, 2 * p + spin, 2 * q + spin));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        if v == 0.0 {
                            continue;
                        }
                        for sigma in 0..2 {
                            for tau in 0..2 {
                                let (pp, qq) = (2 * p + sigma, 2 * q + sigma);
                                let (rr, ss) = (2 * r + tau, 2 * s + tau);
                                if pp == rr || qq == ss {
                                    continue;
                                }
                                ops.push(FermionOp::new(
                                    0.5 * v,
                                    &[(pp, true), (rr, true), (ss, false), (qq, false)],
                                ));
                            }
                        }
                    }
                }
            }
        }
        ops
    }

    /// Electronic qubit Hamiltonian; the core energy is not included.
    pub fn qubit_hamiltonian(&self) -> Result<ObservableSum> {
        let jw = JordanWigner::new(self.n_spin_orbitals());
        let h = jw.map_sum(&self.fermion_terms())?;
        // Round-off leaves tiny imaginary parts on otherwise real coefficients.
        let terms = h.terms().iter().map(|&(p, c)| (num_complex::Complex64::new(c.re, 0.0), p));
        ObservableSum::from_terms(h.n_qubits(), terms.collect::<Vec<_>>())
    }

    /// Computational-basis index of the Hartree–Fock determinant.
    pub fn hartree_fock_index(&self) -> usize {
        (1usize << self.n_electrons) - 1
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "E").parse::<f64>().map_err(|_| QiteError::Parse {
        line,
        msg: format!("invalid number '{tok}'"),
    })
}

fn header_field(header: &str, key: &str) -> Option<String> {
    let upper = header.to_ascii_uppercase();
    let mut search = 0;
    while let Some(pos) = upper[search..].find(key) {
        let start = search + pos;
        let before_ok = start == 0 || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
        let rest = upper[start + key.len()..].trim_start();
        if before_ok && rest.starts_with('=') {
            let value: String = rest[1..]
                .trim_start()
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                .collect();
            return Some(value);
        }
        search = start + key.len();
    }
    None
}

pub fn parse_fcidump_str(text: &str) -> Result<MolecularData> {
    let lines: Vec<&str> = text.lines().collect();
    let first = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or(QiteError::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
    if !lines[first].trim_start().to_ascii_uppercase().starts_with("&FCI") {
        return Err(QiteError::Parse {
            line: first + 1,
            msg: "expected '&FCI' header".into(),
        });
    }
    let mut header = String::new();
    let mut end = None;
    for (i, l) in lines.iter().enumerate().skip(first) {
        let upper = l.trim().to_ascii_uppercase();
        if upper.starts_with("&END") || upper == "/" {
            end = Some(i);
            break;
        }
        header.push_str(l);
        header.push(' ');
        if upper.ends_with("&END") || upper.ends_with('/') {
            end = Some(i);
            break;
        }
    }
    let end = end.ok_or(QiteError::Parse {
        line: lines.len(),
        msg: "unterminated header".into(),
    })?;
    let field = |key: &str| -> Result<i64> {
        let raw = header_field(&header, key).ok_or_else(|| QiteError::Parse {
            line: first + 1,
            msg: format!("header lacks {key}"),
        })?;
        raw.parse::<i64>().map_err(|_| QiteError::Parse {
            line: first + 1,
            msg: format!("invalid {key} value '{raw}'"),
        })
    };
    let norb = field("NORB")?;
    let nelec = field("NELEC")?;
    let ms2 = header_field(&header, "MS2").map_or(Ok(0), |_| field("MS2"))?;
    if norb <= 0 || nelec < 0 || nelec > 2 * norb {
        return Err(QiteError::Parse {
            line: first + 1,
            msg: format!("inconsistent NORB={norb} NELEC={nelec}"),
        });
    }
    let n = norb as usize;
    let mut data = MolecularData::new(n, nelec as usize, ms2, 0.0);

    for (i, l) in lines.iter().enumerate().skip(end + 1) {
        let line = i + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(QiteError::Parse {
                line,
                msg: format!("expected 'value i j k l', found {} fields", toks.len()),
            });
        }
        let v = parse_value(toks[0], line)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let k: i64 = tok.parse().map_err(|_| QiteError::Parse {
                line,
                msg: format!("invalid index '{tok}'"),
            })?;
            if k < 0 || k > norb {
                return Err(QiteError::Parse {
                    line,
                    msg: format!("orbital index {k} outside 0..={norb}"),
                });
            }
            *slot = k as usize;
        }
        match idx {
            [0, 0, 0, 0] => data.core_energy = v,
            [i, j, 0, 0] if i > 0 && j > 0 => data.set_h1(i - 1, j - 1, v),
            // Orbital energies carry no Hamiltonian information.
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                data.set_h2(i - 1, j - 1, k - 1, l - 1, v)
            }
            _ => {
                return Err(QiteError::Parse {
                    line,
                    msg: format!("unrecognised index pattern {idx:?}"),
                })
            }
        }
    }
    Ok(data)
}

pub fn parse_fcidump<P: AsRef<Path>>(path: P) -> Result<MolecularData> {
    parse_fcidump_str(&std::fs::read_to_string(path)?)
}
