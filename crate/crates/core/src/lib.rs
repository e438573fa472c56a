//! Detection of quantum bug-fix patterns in buggy/fixed Qiskit program pairs.
//!
//! The pipeline per pair: load ([`pairio`]), coarse regex filtering
//! ([`filters`]), a single parse per file plus fact extraction
//! ([`semantics`]), then the seven detectors ([`detectors`]).

pub mod cli;
pub mod detectors;
pub mod filters;
pub mod pairio;
pub mod pyast;
pub mod report;
pub mod semantics;
