//! Semi-passive IRS NLoS sensing toolkit.
//!
//! Models a base station illuminating a target through an intelligent
//! reflecting surface whose active sensors are movable in rigid groups along
//! a 1D segment. Provides:
//!
//! - grouped sensor layouts, placement constraints, and closed-form optimal
//!   positions with a brute-force certification oracle ([`array_geometry`]),
//! - steering vectors, path-loss chain, optimal beamformer/phase profile,
//!   and the end-to-end response matrix ([`channel`]),
//! - CRB for DoA estimation via the trace formula and via closed forms,
//!   the fixed-position baseline, reduction-ratio bounds, and the
//!   budget-constrained element/group trade-off ([`crb`]),
//! - snapshot synthesis, MUSIC on physical and interpolated virtual arrays,
//!   beampatterns, and Monte Carlo RMSE studies ([`estimation`]),
//! - scenario-driven experiment runners with CSV/SVG output ([`experiments`]).

pub mod array_geometry;
pub mod channel;
pub mod crb;
pub mod error;
pub mod estimation;
pub mod experiments;

pub use array_geometry::{PlacementVariant, SensorLayout};
pub use channel::{ChannelGains, SystemConfig};
pub use crb::{BudgetSpec, CrbReport};
pub use error::{Error, Result};
