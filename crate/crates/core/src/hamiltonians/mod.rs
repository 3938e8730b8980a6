//! Benchmark Hamiltonians, fermionic mappings, generator pools and partitions.

pub mod fcidump;
pub mod fermion;
pub mod partition;
pub mod pool;

use num_complex::Complex64;

use crate::error::{QiteError, Result};
use crate::pauli::{ObservableSum, Pauli, PauliString};

pub use fcidump::{parse_fcidump, parse_fcidump_str, MolecularData};
pub use fermion::{build_hubbard, jordan_wigner, number_operator, FermionOp, JordanWigner};
pub use partition::{make_partition, window_domain, HamiltonianPartition, PartitionSpec, SymmetryLink};
pub use pool::{build_uccgsd_pool, OperatorPool, PoolElement};

fn check_chain(n: usize) -> Result<()> {
    if n < 2 {
        return Err(QiteError::InvalidInput(format!("chain needs at least 2 sites, got {n}")));
    }
    Ok(())
}

fn bond(n: usize, i: usize, p: Pauli) -> PauliString {
    PauliString::from_ops(n, &[(i, p), (i + 1, p)]).expect("bond inside register")
}

/// Open transverse-field Ising chain `−Σ Z_i Z_{i+1} + h Σ X_i`.
pub fn build_tfim(n: usize, h_over_j: f64) -> Result<ObservableSum> {
    check_chain(n)?;
    let mut terms: Vec<(Complex64, PauliString)> = (0..n - 1)
        .map(|i| (Complex64::new(-1.0, 0.0), bond(n, i, Pauli::Z)))
        .collect();
    if h_over_j != 0.0 {
        terms.extend((0..n).map(|i| (Complex64::new(h_over_j, 0.0), PauliString::single(n, i, Pauli::X))));
    }
    ObservableSum::from_terms(n, terms)
}

/// Open XXZ chain `Σ (X_i X_{i+1} + Y_i Y_{i+1} + J Z_i Z_{i+1})`.
pub fn build_xxz(n: usize, j: f64) -> Result<ObservableSum> {
    check_chain(n)?;
    let mut terms = Vec::with_capacity(3 * (n - 1));
    for i in 0..n - 1 {
        terms.push((Complex64::new(1.0, 0.0), bond(n, i, Pauli::X)));
        terms.push((Complex64::new(1.0, 0.0), bond(n, i, Pauli::Y)));
        if j != 0.0 {
            terms.push((Complex64::new(j, 0.0), bond(n, i, Pauli::Z)));
        }
    }
    ObservableSum::from_terms(n, terms)
}
