//! Exact chain-level algebra for homotopy-orbit computations: graded modules,
//! chain complexes, differential graded (co)algebras, bar and cobar
//! constructions, twisting cochains, strongly homotopy-comultiplicative maps,
//! circle actions and normalized chains of simplicial sets.

pub mod exactlin;
pub mod graded;
pub mod report;
pub mod chaincx;
pub mod dgstruct;
pub mod barcobar;
pub mod twist;
pub mod dcsh;
pub mod circle;
pub mod simpl;
pub mod fixtures;
