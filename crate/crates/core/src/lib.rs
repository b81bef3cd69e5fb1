//! Scoring quantum teleportation by average fidelity `F`, fidelity deviation
//! `D` and the teleportability score `tau_k = F - k D`.
//!
//! Resources are two-qubit Schmidt states `sqrt(a)|00> + sqrt(1-a)|11>`,
//! optionally degraded by a [`NoiseModel`], and teleportation is simulated as
//! a density-matrix computation.

pub mod channels;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod qmath;
pub mod states;
pub mod sweep;
pub mod teleport;
pub mod tolerance;

pub use channels::{KrausChannel, NoiseModel};
pub use error::{Error, Result};
pub use metrics::{
    classical_score, evaluate, is_quantum_useful, k_star, tele_score, AverageMethod, Evaluation,
    KStar, Resource, Route, ScoreRecord,
};
pub use qmath::{CMatrix, Ket, QState};
pub use states::{BellIndex, BlochParam, SchmidtParam};
pub use teleport::{ChainSpec, TeleportMap};
