//! Noiseless statevector emulation of quantum imaginary-time evolution (QITE)
//! and its multiple-time variant (MT-QITE).

pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod mtqite;
pub mod oracles;
pub mod qite;
pub mod pauli;
pub mod statevector;
pub mod step;
pub mod symmetry;

pub use error::{QiteError, Result};
pub use pauli::{ObservableSum, Pauli, PauliString};
pub use statevector::StateVector;
pub use step::{ApplicationMode, Generator, Rotation, UnitaryStep};
