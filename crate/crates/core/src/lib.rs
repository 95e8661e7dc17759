//! Synthesis of state preparation, controlled state preparation and general
//! unitaries into single-qubit + CNOT circuits under an ancilla budget, with a
//! statevector simulator used to verify every emitted circuit.

pub mod circuit;
pub mod cqsp;
pub mod error;
pub mod io;
pub mod linalg;
pub mod primitives;
pub mod qsp;
pub mod sim;
pub mod sweep;
pub mod ucg;
pub mod unitary;
pub mod verify;

pub use circuit::{Circuit, Gate, Metrics};
pub use error::{Result, SynthError};
pub use linalg::{AmplitudeTree, AxbxcFactors, CsdFactors, Demultiplexed, Prefix, C64};
pub use sim::StateVector;
