//! Certified numerics for harmonic-number discretizations of the
//! logarithmic integral.
//!
//! The crate is layered: [`interval`] provides outward-rounded arbitrary
//! precision interval arithmetic and every other module computes through
//! it. [`harmonic`] and [`li`] supply the special functions, [`discretized`]
//! the shifted inverse-harmonic sums and two-sided `beta(t)` bounds,
//! [`primes`] an exact segmented-sieve prime counter, and [`verifier`] the
//! finite inequality scans tying the two sides together.

pub mod bernoulli;
pub mod constants;
pub mod discretized;
pub mod error;
pub mod harmonic;
pub mod interval;
pub mod li;
pub mod primes;
pub mod shift;
pub mod util;
pub mod verifier;

pub use discretized::{
    alpha_star, beta_bounds, beta_n, beta_range_ceiling_check, harmonic_mean_shifted, r_ceiling,
    rho_n_search, BoundPair, BoundTarget, RCeiling, ShiftContext,
};
pub use error::{Error, Result};
pub use harmonic::{harmonic_int, harmonic_real, HarmonicSeq, HarmonicValue};
pub use interval::{Interval, PrecisionConfig};
pub use li::{
    li, li_difference_bounds, li_interval, li_scaled, soldner_mu, tail_integral, LiValue,
};
pub use primes::{PrimeCountCache, PrimeCounter, SieveConfig, PI_CAP};
pub use shift::Shift;
pub use verifier::{
    evaluate_inequality, generic_bound_check, preset_by_id, presets, residual_series, scan,
    BoundForm, CheckResult, InequalityPreset, MConstant, ResidualRow, ScanReport, SumStart,
    Verdict,
};
