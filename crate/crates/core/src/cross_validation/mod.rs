//! Leave-one-out risk surrogates and parameter search.
//!
//! With `K` the observation multiset and `Q` the estimator matrix, the
//! leave-one-out estimate at a held-out observation is
//! `(sum_{k' != k} Q[k, k']) / (|K| - 1)`. Both surrogates are built from
//! these terms; the squared-error one also needs `p_k' Q^2 p_k`.
//!
//! Pairs are evaluated once per unordered pair of distinct observed cells.
//! The optional thread pool only computes pair values; every sum is taken
//! serially in index order, so results do not depend on the thread count.

pub(crate) mod float;
mod risk;
mod search;

pub use risk::{kl_risk, loo_term, risk, se_risk, CvOptions, LossKind, RiskReport};
pub use search::{
    coordinate_descent_w, grid_search, Axis, DescentOutcome, GridPoint, GridRow, SearchError, SearchOutcome,
    SearchSpace,
};
