//! Estimation of the selection intensity: conditional and joint maximum
//! likelihood, the parametric bootstrap, exact intervals from the monotone
//! homozygosity CDF, and posterior sampling under uniform priors.

mod bootstrap;
mod interval;
mod mle;
mod monotone;
mod posterior;
pub mod root;

pub use mle::{
    mle_joint, mle_sigma, mle_sigma_with, profile_point, JointConfig, MleConfig, MleResult, MleStatus,
    ProfilePoint, SigmaInverter,
};
pub use bootstrap::{bootstrap, BootstrapConfig, BootstrapResult, GeneratorParams};
pub(crate) use mle::real;
pub use interval::{quantile_sorted, IntervalEstimate, IntervalMethod};
pub use monotone::{monotone_ci, monotone_ci_with, MonotoneConfig};
pub use posterior::{
    posterior_sample, posterior_summary, write_chain_csv, PosteriorChain, PosteriorConfig, PosteriorMode,
    PosteriorSummary, PriorBounds, ProposalSpec, ThetaProposal,
};
