//! Exact E¹ chain complexes and integral homology for mapping tori of
//! Dehn twists on a closed surface.
//!
//! The pipeline is: [`family::build_e1`] builds a finite integral complex
//! from a family's knot-Floer profile, [`chain::ChainComplex::homology`]
//! computes its homology by Smith normal form, [`closed_forms::predict`]
//! gives the expected answer, and [`verify`] compares the two.

pub mod chain;
pub mod closed_forms;
pub mod exterior;
pub mod family;
pub mod snf;
pub mod verify;

pub use chain::{ChainComplex, ChainError, CompareMode, Generator, GradedGroup, SparseMatrix};
pub use closed_forms::{
    fiber_genus_allowed, lens_grading, module_condition, predict, ranks_x, sw_euler, Prediction,
};
pub use exterior::{AlgebraElement, BasisMonomial, Pairing, Sign, SurfaceBasis};
pub use family::{
    build_e1, build_x, d_gamma, u_action, DVariant, E1Complex, Family, FamilyError, FamilySpec,
};
pub use verify::{
    emit_report, sweep, verify_against, verify_case, CaseResult, FamilyKind, ReportFormat,
    SweepParams, Verdict, VerificationReport,
};
