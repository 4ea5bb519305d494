//! Numerical mixing analysis for finite-dimensional quantum dynamical
//! semigroups.
//!
//! The crate computes non-commutative L_p(ρ) quantities for a primitive
//! Lindblad generator, verifies and fits Nash inequalities (type I and II),
//! and converts verified certificates into ultracontractive, Log-Sobolev,
//! eigenvalue-counting and mixing-time bounds. Three built-in generator
//! families (depolarizing, unital qubit, dissipative ring hopping) come with
//! analytic certificates and closed-form cross-checks.

pub mod io;
pub mod lindblad;
pub mod lp;
pub mod models;
pub mod nash;
pub mod numerics;
pub mod optimize;
pub mod sample;
pub mod semigroup;

pub use lindblad::{LindbladGenerator, Picture, Superoperator};
pub use lp::{FullRankState, Observable};
pub use nash::{MixingBoundReport, NashCertificate, NashKind, VerificationReport};
pub use numerics::{CMat, HermitianEigensystem, C64};
pub use semigroup::{Semigroup, SpectralReport};
