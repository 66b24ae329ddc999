//! Set-boundary reachability for safety verification of smooth feedforward networks.
//!
//! When a network is a homeomorphism on its input box, the boundary of the
//! output reachable set is the image of the input boundary, so propagating the
//! `2n` faces of the box is enough to decide inclusion in a box safe set. When
//! it is not, cells on which the interval Jacobian determinant excludes zero
//! can be removed from the interior of the input and only the remainder needs
//! to be propagated.
//!
//! Layout:
//! - [`interval`]: validated interval scalars, boxes and matrices
//! - [`activation`]: tanh / sigmoid / linear with range enclosures
//! - [`network`]: model loading, evaluation, Jacobians, seeded generation
//! - [`domains`]: box and zonotope propagation
//! - [`topology`]: faces, grids, Jacobian certification, subset extraction
//! - [`verifier`]: boundary / subset / full / auto drivers
//! - [`montecarlo`]: seeded sampling oracle and falsification

pub mod activation;
pub mod domains;
pub mod error;
pub mod interval;
pub mod montecarlo;
pub mod network;
pub mod topology;
pub mod verifier;

pub use activation::Activation;
pub use domains::{
    box_propagate, check_inclusion, propagate, zono_propagate, Domain, ReachPayload, ReachSet,
    SmoothRelaxation, Zonotope,
};
pub use error::{Error, Result};
pub use interval::{CombineOp, Interval, IntervalBox, IntervalMatrix, Operand};
pub use montecarlo::{monte_carlo, sample_point, MonteCarlo};
pub use network::{Layer, Network};
pub use topology::{
    boundary_faces, certify_homeomorphism, extract_subset, jacobian_interval, partition, CellGrid,
    CertificationResult, SubsetExtraction,
};
pub use verifier::{
    verify, verify_auto, verify_boundary, verify_full, verify_subset, Mode, ReachCell, Stats,
    Status, Verdict, VerificationProblem,
};
