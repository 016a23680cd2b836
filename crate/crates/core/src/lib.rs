//! Frequency-domain simulator and parameter optimizer for an N-mode
//! nondegenerate optical parametric amplifier (NOPA) enclosed in a
//! coherent feedback loop.
//!
//! The amplifier couples every pair of its N intracavity modes through a
//! pumped second-order nonlinearity, producing a GHZ-like multipartite
//! entangled output: pairwise amplitude differences and the collective
//! phase sum are squeezed together. A control beam splitter (transmissivity
//! `t`) feeds part of the output back into the cavity without any
//! measurement; a second splitter models the loop loss `l`. This crate
//! computes the quadrature correlation variances of the closed-loop
//! output, evaluates a multipartite inseparability criterion against its
//! separability bound, locates the feedback-modified oscillation
//! threshold, and sweeps or optimizes the loop and pump settings.
//!
//! Everything is evaluated from closed-form transfer coefficients; two
//! independent oracles (a direct Langevin-system solve in [`langevin`] and
//! a full beam-splitter network solve in [`network`]) guard the algebra.
//!
//! Conventions: variances are normalized so one vacuum unit per mode and
//! quadrature is 1; the N-partite criterion combination therefore reads
//! `N + 2` for vacuum inputs and certifies inseparability strictly below 4.
//!
//! # Example
//!
//! ```
//! use cfc_nopa::{cfc_variance, AnalysisPoint, LoopParams, NopaParams};
//!
//! let nopa = NopaParams::new(0.1, 0.003, 6.7e-10, 4, 0.15)?;
//! let loop_params = LoopParams::new(0.8, 0.01)?;
//! let at = AnalysisPoint::from_freq_hz(1.0e6)?;
//!
//! let report = cfc_variance(&nopa, &loop_params, &at)?;
//! assert!(report.combined_squeezed < report.criterion_bound); // inseparable
//! assert!(report.combined_squeezed < report.vacuum_reference);
//! # Ok::<(), cfc_nopa::Error>(())
//! ```

pub mod config;
pub mod criteria;
pub mod error;
pub mod feedback;
pub mod langevin;
pub mod network;
pub mod nopa;
pub mod output;
pub mod report;
pub mod sweep;

pub use config::RunConfig;
pub use criteria::{vlf_check, CriterionForm, CriterionVerdict};
pub use error::{Error, Result};
pub use feedback::{
    cfc_variance, closed_loop_amplitudes, modified_threshold, CombinationTag, LoopAmplitudes,
    LoopParams,
};
pub use langevin::langevin_oracle;
pub use network::network_oracle;
pub use nopa::{
    coupling_from_beta, nopa_only_variances, transfer_coefficients, AnalysisPoint, NopaParams,
    TransferSet,
};
pub use report::{VarianceReport, CRITERION_BOUND};
pub use sweep::{
    optimize_joint, run_sweep, FixedParams, FreeParams, JointOptimum, Optimum, SweepAxis,
    SweepResult, SweepSpec, BETA_SEARCH_MAX,
};
