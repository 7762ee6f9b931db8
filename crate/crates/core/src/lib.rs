//! Simulation and inference for the stationary distribution of Wright-Fisher
//! k-allele models with selection and parent-independent mutation.
//!
//! The selected stationary density is the neutral Dirichlet law tilted by
//! `exp(-x' S x)`. Its normalizing constant has no closed form, so every
//! likelihood quantity here is estimated from a [`density::WeightedPool`]:
//! a fixed set of Dirichlet draws reweighted at query time. For a fixed pool
//! the mean homozygosity is exactly decreasing and the homozygosity CDF is
//! exactly increasing in `sigma`, which keeps every root-find bracketed.

pub mod cli;
pub mod density;
pub mod error;
pub mod inference;
pub mod model;
pub mod sampler;
pub mod stream;
pub mod study;

pub use error::{Error, Result};
pub use model::{
    datasets, homozygosity, parse_frequencies, quadratic_form, Homozygosity, MutationParams,
    SelectionMatrix, SelectionModel, SimplexPoint,
};
