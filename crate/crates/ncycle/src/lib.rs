//! Boxes on the n-cycle: n observables arranged in a ring, each jointly
//! measurable only with its neighbors, each pair described by a joint
//! outcome distribution.
//!
//! The crate provides:
//!
//! - the box data model with nondisturbance checking, convex mixing, and the
//!   canonical boxes (deterministic, extremal nonsignalling, classically
//!   correlated, white noise, isotropic) — [`boxes`], [`vertex`];
//! - evaluation of the 2^(n-1) correlation inequalities (local bound n-2)
//!   and the n cyclic entropic inequalities (local bound 0) — [`inequality`];
//! - local-polytope membership by linear feasibility over deterministic
//!   vertices, cross-checked against the complete facet family — [`oracle`],
//!   [`simplex`];
//! - output relabelings and the depolarizing twirl to isotropic form —
//!   [`symmetry`];
//! - entropic activation: mixing any nonlocal box with a classical box until
//!   an entropic inequality is violated, with a numerically exact small-v
//!   treatment — [`activation`], [`experiment`];
//! - the 4-cycle in two-party notation with its closed-form CHSH value over
//!   vertex weights — [`chsh`];
//! - a JSON box file format with bit-exact probability round-trips — [`io`];
//! - the quantitative reproduction gate — [`verify`].
//!
//! Everything is deterministic given explicit seeds; sweeps and experiment
//! trials run data-parallel under the `parallel` feature (default) with a
//! sequential fallback.
//!
//! ```
//! use ncycle::{pr_box, emax_box, bc_value, c_value, SignVector};
//!
//! // the 4-cycle extremal box maximally violates its correlation
//! // inequality but sits exactly on the entropic boundary
//! let signs = SignVector::canonical(4)?;
//! let extremal = pr_box(&signs)?;
//! assert_eq!(c_value(&extremal, &signs)?, 4.0);
//! assert_eq!(bc_value(&extremal, 4)?, 0.0);
//!
//! // mixed half/half with the companion classical box it reaches the
//! // entropic maximum
//! let mixed = emax_box(&signs, 4)?;
//! assert_eq!(bc_value(&mixed, 4)?, 1.0);
//! # Ok::<(), ncycle::Error>(())
//! ```

pub mod activation;
pub mod boxes;
pub mod chsh;
pub mod error;
pub mod experiment;
pub mod inequality;
pub mod io;
pub mod oracle;
mod par;
pub mod sign;
pub mod simplex;
pub mod symmetry;
pub mod tolerance;
pub mod verify;
pub mod vertex;

pub use activation::{
    activation_search, bc_of_mixture, expansion_value, ActivationOptions, ActivationResult,
    ExpansionModel, VGridSpec,
};
pub use boxes::{
    classical_box, deterministic_box, emax_box, isotropic_box, mix, mix2, pr_box, white_noise,
    CycleBox, EdgeSide,
};
pub use error::{Error, Result};
pub use experiment::{appendix_experiment, ExperimentConfig, ExperimentSummary};
pub use inequality::{
    bc_value, c_value, expectation, full_report, shannon_entropy, InequalityReport,
};
pub use oracle::{decompose_local, facet_check, MembershipMethod, MembershipVerdict};
pub use par::parallel_enabled;
pub use sign::{Parity, SignVector};
pub use symmetry::{align_to_canonical, depolarize, LocalOperation, RelabelAtom, TwirlSpec};
pub use vertex::{random_local_box, random_nonlocal_box, random_ns_box, Decomposition, VertexLabel};
