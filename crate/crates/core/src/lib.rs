//! Monte Carlo simulator and closed-form outage analytics for a downlink
//! network-NOMA system in which three coordinated base stations jointly serve
//! a cell-edge user by distributed analog beamforming while each BS also
//! serves its own near user through superposition coding.
//!
//! Layout of the crate:
//!
//! * [`geometry`]: BS triangle, lens region, user placement.
//! * [`channel`]: Rayleigh fading with bare `d^alpha` path loss.
//! * [`interference`]: Poisson field of co-channel interferers.
//! * [`schemes`]: per-trial SINRs and outage events for N-NOMA and the
//!   OMA / single-BS benchmarks.
//! * [`analytics`]: closed-form outage approximations and their oracles.
//! * [`experiment`]: config files, figure presets, sweeps and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytics;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod interference;
pub mod quadrature;
pub mod schemes;
pub mod special;
pub mod stream;

pub use analytics::AnalyticOutage;
pub use channel::ChannelRealization;
pub use error::{Error, Result};
pub use geometry::{NetworkLayout, Point2D, UserPlacement};
pub use interference::{InterferenceConfig, InterferenceField};
pub use schemes::{SchemeConfig, TrialOutcome};
