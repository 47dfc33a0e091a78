//! Fourth tensor powers of the Clifford group, the stabilizer code `V_{n,4}`,
//! and projective 4-designs built from Clifford orbits.

pub mod clifford;
pub mod designs;
pub mod error;
pub mod f2lin;
pub mod fiducial;
pub mod moments;
pub mod pauli;
pub mod sparse;
pub mod stabrep;
pub mod state;

pub use error::{Error, Result};
