//! State-vector simulation and exhaustive verification of all-or-nothing
//! multiparty teleportation.
//!
//! N senders share a 2N-qubit channel with a single receiver. The channel is
//! N Bell pairs with extra CNOTs folded onto the receiver's last qubit, so the
//! receiver can only separate the teleported qubits once every sender has
//! measured and broadcast. The crate is organised bottom-up:
//!
//! - [`statevector`]: dense amplitude engine, Bell projection, partial trace.
//! - [`channel`]: product and entangled channel construction.
//! - [`protocol`]: senders' measurements, the receiver's CNOT cascade and
//!   Pauli corrections, correction tables.
//! - [`oracle`]: brute-force enumeration over outcome tuples and averaged
//!   receiver states.
//! - [`harness`]: parties on a broadcast bus, participation and voting
//!   scenarios.
//! - [`record`]: the versioned JSON run record written by the CLI.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances quoted
//! throughout the docs refer to.

pub mod channel;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod protocol;
pub mod record;
pub mod reference_tables;
pub mod scalar;
pub mod statevector;

pub use channel::{ChannelKind, ChannelLayout};
pub use error::{Error, Result};
pub use protocol::{OutcomePolicy, PauliOp, PauliString, RunStatus};
pub use scalar::Scalar;
pub use statevector::BellOutcome;

pub type StateVectorF64 = statevector::StateVector<f64>;
pub type StateVectorF32 = statevector::StateVector<f32>;
pub type DensityMatrixF64 = statevector::DensityMatrix<f64>;
pub type Gate1QF64 = statevector::Gate1Q<f64>;
pub type InputQubitF64 = protocol::InputQubit<f64>;
pub type TranscriptF64 = protocol::Transcript<f64>;
pub type CorrectionRowF64 = protocol::CorrectionRow<f64>;
pub type OutcomeReportF64 = oracle::OutcomeReport<f64>;
pub type EnumerationF64 = oracle::Enumeration<f64>;
pub type WithheldAnalysisF64 = oracle::WithheldAnalysis<f64>;
pub type ScenarioReportF64 = harness::ScenarioReport<f64>;
