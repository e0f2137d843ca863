//! Non-uniform corner cutting of polylines and of nets of functions.
//!
//! [`points`] refines polylines with per-index weight pairs, [`nets`]
//! refines nets of u-functions through piecewise Coons surfaces, and
//! [`weights`] decides whether a schedule of weights converges.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod nets;
pub mod points;
pub mod transfinite;
pub mod value;
pub mod weights;

pub use nets::{
    estimate_bmsdd, net_tail_bound, restrict_to_grid, run_nets, GridT, NetError, NetOfFunctions,
    NetRun, NetRunOptions, PiecewiseCoonsSurface,
};
pub use points::{run_points, sup_distance, tail_bound, PointsError, PointsRun, PolylineLevel, RunOptions, Topology};
pub use transfinite::{
    coons_error_bound, coons_error_exact, divided_diff2, linear_interp, msdd, CoonsPatch, Rect,
    TransfiniteError, UFunction,
};
pub use value::Value;
pub use weights::{certify, certify_nets, Certificate, WeightError, WeightPair, WeightSchedule};
