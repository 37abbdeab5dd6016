//! Density evolution, EXIT curves and fixed-point constructions for regular
//! and spatially coupled LDPC ensembles on the binary erasure channel.

pub mod de;
pub mod distance;
pub mod ensemble;
pub mod error;
pub mod exit;
pub mod fp;
pub mod landscape;
pub mod numeric;
pub mod output;
pub mod thresholds;

pub use distance::{
    ss_exponent, ss_generating_functions, ss_growth_curve, GrowthPoint, SsExponentReport,
    SsFunctions,
};
pub use ensemble::{ChainParams, RegularEnsemble, SmoothedParams};
pub use error::{Error, Result};
pub use landscape::{h_landscape, HLandscape};
pub use thresholds::{map_threshold_asymptotic, thresholds_regular, ThresholdReport};
