//! Anti-hermitian generator pools.

use crate::error::{QiteError, Result};
use crate::hamiltonians::fermion::{FermionOp, JordanWigner};
use crate::pauli::ObservableSum;

#[derive(Clone, Debug, PartialEq)]
pub struct PoolElement {
    pub label: String,
    pub op: ObservableSum,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorPool {
    pub elements: Vec<PoolElement>,
}

impl OperatorPool {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = &ObservableSum> + '_ {
        self.elements.iter().map(|e| &e.op)
    }
}

fn spin(mode: usize) -> usize {
    mode % 2
}

/// Spin-conserving generalised singles and doubles, Jordan–Wigner mapped.
///
/// Singles are `a†_p a_q − h.c.` with `p > q`; doubles are
/// `a†_p a†_q a_s a_r − h.c.` with `p > q`, `r > s` and `(p, q) > (r, s)`.
pub fn build_uccgsd_pool(n_spin_orbitals: usize) -> Result<OperatorPool> {
    if n_spin_orbitals % 2 != 0 {
        return Err(QiteError::InvalidInput(format!(
            "UCCGSD pool needs an even number of spin orbitals, got {n_spin_orbitals}"
        )));
    }
    let n = n_spin_orbitals;
    let jw = JordanWigner::new(n);
    let mut elements = Vec::new();
    let mut push = |label: String, exc: FermionOp| -> Result<()> {
        let mut deexc = exc.adjoint();
        deexc.coeff = -deexc.coeff;
        let op = jw.map_sum(&[exc, deexc])?;
        if !op.is_empty() {
            elements.push(PoolElement { label, op });
        }
        Ok(())
    };
    for p in 0..n {
        for q in 0..p {
            if spin(p) == spin(q) {
                push(format!("s{p},{q}"), FermionOp::hop(1.0, p, q))?;
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (0..p).map(move |q| (p, q))).collect();
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            if (p, q) <= (r, s) {
                continue;
            }
            if spin(p) + spin(q) != spin(r) + spin(s) {
                continue;
            }
            push(
                format!("d{p},{q},{r},{s}"),
                FermionOp::new(1.0, &[(p, true), (q, true), (s, false), (r, false)]),
            )?;
        }
    }
    Ok(OperatorPool { elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::fermion::number_operator;

    #[test]
    fn pool_sizes() {
        assert_eq!(build_uccgsd_pool(2).unwrap().len(), 0);
        assert_eq!(build_uccgsd_pool(4).unwrap().len(), 2 + 6);
        assert_eq!(build_uccgsd_pool(8).unwrap().len(), 12 + 150);
        assert!(build_uccgsd_pool(3).is_err());
    }

    #[test]
    fn elements_are_antihermitian_and_number_conserving() {
        let pool = build_uccgsd_pool(8).unwrap();
        let n = number_operator(8);
        for e in &pool.elements {
            assert!(e.op.is_antihermitian(), "{}", e.label);
            assert!(e.op.adjoint().approx_eq(&e.op.negate(), 0.0));
            assert!(e.op.commutes_with(&n).unwrap(), "{}", e.label);
        }
        let mut labels: Vec<_> = pool.elements.iter().map(|e| e.label.clone()).collect();
        labels.dedup();
        assert_eq!(labels.len(), pool.len());
    }

    #[test]
    fn dense_number_commutation_at_four_orbitals() {
        let pool = build_uccgsd_pool(4).unwrap();
        let n = number_operator(4).to_dense().unwrap();
        for e in &pool.elements {
            let t = e.op.to_dense().unwrap();
            assert!((&t * &n - &n * &t).norm() < 1e-12);
        }
    }
}
