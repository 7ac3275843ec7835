//! Batch front end for `orbitalg`: versioned documents, checkers, homology,
//! orbit models and constructions, with deterministic reports.

pub mod catalog;
pub mod commands;
pub mod document;
pub mod report;
