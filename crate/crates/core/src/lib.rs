//! Exact compilation of single- and two-qudit unitaries into pulse schedules.
//!
//! The gate library consists of pairwise `x`/`y` couplings between basis
//! states allowed by a [`CouplingGraph`], optional direct `z` couplings, and a
//! single two-qudit phase interaction that imprints a phase on `|d-1,d-1>`.
//! Every compiled [`Schedule`] can be replayed by the reference simulator in
//! [`schedule`] and compared with its target up to global phase.

pub mod error;
pub mod formats;
pub mod graph;
pub mod linalg;
pub mod multi;
pub mod random;
pub mod schedule;
pub mod single;
pub mod spectral;

pub use error::{Result, SynthError};
pub use graph::{Capabilities, CouplingGraph, SpanningTree};
pub use linalg::{
    distance_up_to_phase, givens_matrix, lower_givens, z_by_conjugation, Generator, GivensGate, Pulse,
    StatePair, Unitary,
};
pub use multi::{
    abc_decompose, cinc_matrix, cinc_sequence, controlled, is_entangling_diagonal, lambda1_transposition,
    lambda1_unitary, synthesize_lambda1, Circuit, DiagonalCoupling, Stage, TwoQuditSchedule,
};
pub use schedule::{pulse_unitary, simulate, verify, Schedule, ScheduleCounts, System, VerifyReport};
pub use single::{
    diag_solve, givens_params, lower_on_graph, qr_reduce, synthesize_single, synthesize_single_with_tree,
    GivensParams, PhaseSolve, QrResult, SingleCounts, SingleQuditSynthesis,
};
pub use spectral::{
    controlled_rotation, controlled_state_map, spectral_factors, spectral_synthesize, state_prep_angles,
    state_prep_unitary, PrepAngle, QuditState,
};

pub use num_complex::Complex64;
