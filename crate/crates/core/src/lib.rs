//! Equiangular tight frames from combinatorial designs.
//!
//! The crate is organized around a small set of concrete objects:
//!
//! * [`designs`] — finite fields, Steiner systems, finite affine and
//!   projective planes, incidence matrices, and strongly regular graph
//!   verification.
//! * [`hadamard`] — real (Sylvester, Paley I) and complex (DFT) Hadamard
//!   matrices.
//! * [`frames`] — synthesis matrices, Gram matrices, UNTF/ETF verification,
//!   the Welch and Gerzon bounds, Steiner and simplex ETF constructions,
//!   and Naimark complements.
//! * [`pert`] — the projector onto the elliptope perturbation subspace of a
//!   Gram matrix, the PSD overlap inequalities it implies, and the degree-4
//!   moment-matrix witness built from it.
//! * [`sparsity`] — exact spark/cospark by enumeration and the Gershgorin,
//!   NERF, and fourth-moment lower bounds, with family-parameter tables.

pub mod designs;
pub mod error;
pub mod frames;
pub mod hadamard;
pub mod matrix;
pub mod pert;
pub mod report;
pub mod sparsity;

pub use error::Error;
pub use matrix::ComplexMatrix;
pub use report::{Check, VerificationReport};

/// Default entrywise comparison tolerance. Entries of every matrix in this
/// crate are O(1), so an absolute tolerance is appropriate. May be overridden
/// globally through the `ETFKIT_TOL` environment variable by front ends.
pub const ENTRYWISE_TOL: f64 = 1e-9;
