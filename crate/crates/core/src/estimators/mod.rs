//! Estimator matrices `Q` over the hypercube and the density estimates
//! `p = Q p_k` they produce.
//!
//! A config is compiled once into an [`Estimator`], which owns the normalizer
//! and any cached tables. Elements are then cheap:
//!
//! | variant                          | element      | squared element |
//! |----------------------------------|--------------|-----------------|
//! | linear, sparse `b`               | `O(nnz(b))`  | `O(nnz(b))`     |
//! | exponential of `b_w`, AA, WAAK   | `O(n)`       | `O(n)`          |
//! | logistic of `b_w`                | `O(n)`       | table, `n <= 30`|
//! | anything else                    | table        | table           |

mod config;
mod counts;
mod estimate;
mod estimator;
pub mod kernel;
mod shrinkage;

pub use config::{gamma_from_lambda, lambda_from_gamma, EstimatorConfig, MixtureComponent, MIXTURE_WEIGHT_TOL};
pub use counts::CountsVector;
pub use estimate::{estimate_at, estimate_full, DensityEstimate};
pub use estimator::Estimator;
pub use kernel::{
    element_config, element_linear, element_mixture, element_transformed, element_waak, ln_element_waak,
    squared_element_general, squared_element_linear, squared_element_waak,
};
pub use shrinkage::{shrinkage_optimal, ShrinkageSpec, SparseEntry};
