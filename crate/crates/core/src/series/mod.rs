//! Polynomial and truncated-series arithmetic, expression trees for `Phi_n`,
//! and circle sampling.

pub mod circle;
pub mod expr;
pub mod poly;

pub use circle::{
    circle_extrema, circle_nodes, growth_metrics, local_dip, local_log_dip, CircleExtrema, GrowthMetrics, DEFAULT_NODES,
};
pub use expr::{evaluate, taylor_coeffs, FunctionExpr, IndexAffine, SeqScalar};
pub use poly::{TailEstimate, TaylorPoly, DEGREE_CAP};
