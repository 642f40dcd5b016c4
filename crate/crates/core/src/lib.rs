//! Density estimation on the binary hypercube `{-1, 1}^n`.
//!
//! Estimators are diagonalizations of the naturally ordered Walsh matrix,
//! `Q = f(W diag(b) W) / Z`, applied to the empirical distribution of the
//! observations. The linear case (`f` the identity) shrinks each estimated
//! Walsh coefficient by `b_k`; the exponential transform of a first-order
//! `b` is the weighted Aitchison-Aitken kernel, which factorizes over
//! dimensions and can be evaluated in `O(n)` at any `n`.
//!
//! ```
//! use hypercube_density::{estimate_at, CellIndex, CountsVector, EstimatorConfig, HypercubePoint};
//!
//! let data: Vec<_> = ["++-", "++-", "-+-", "+--"]
//!     .iter()
//!     .map(|s| HypercubePoint::parse_signs(s).unwrap())
//!     .collect();
//! let counts = CountsVector::from_observations(&data).unwrap();
//! let est = EstimatorConfig::aa_classic(3, 0.8).build().unwrap();
//! let cell = CellIndex::parse("++-", 3).unwrap();
//! let p = estimate_at(&[cell], &est, &counts).unwrap();
//! assert!(p.values[0] > 0.3);
//! ```
//!
//! | module               | contents                                            |
//! |----------------------|-----------------------------------------------------|
//! | [`walsh`]            | cell indexes, Walsh entries, FWHT, interaction sets |
//! | [`transforms`]       | element-wise transforms and their normalizers       |
//! | [`estimators`]       | estimator configs, elements, density estimates      |
//! | [`cross_validation`] | leave-one-out risks and parameter search            |
//! | [`cli`]              | the `hcdensity` command line                        |

pub mod cli;
pub mod cross_validation;
pub mod error;
pub mod estimators;
pub mod synth;
pub mod transforms;
pub mod walsh;

pub use error::{Error, Result, MAX_DENSE_DIM, MAX_FULL_DIM};
pub use estimators::{
    estimate_at, estimate_full, CountsVector, DensityEstimate, Estimator, EstimatorConfig, MixtureComponent,
    ShrinkageSpec, SparseEntry,
};
pub use transforms::{NormalizerMethod, NormalizerResult, Transform};
pub use walsh::{CellIndex, HypercubePoint};
