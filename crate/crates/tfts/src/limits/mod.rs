//! Partial sums of tempered moving averages and their convergence to the
//! tempered Hermite process.
//!
//! With innovations Z_m ~ N(0, 1), S(nt) = Σ_m ξ_m(nt) Z_m and
//! n^{−2H} Σ_m ξ_m(nt)ξ_m(ns) → R_{H,λ}(t, s)/Γ(α)², H = α + ½.

mod checks;
mod mc;
mod scheme;
mod weighted;

pub use checks::{fdd_covariance_check, limit_covariance, limit_variance_check, sandwich_check, tightness_probe};
pub use mc::{gaussian_functionals, invariance_mc, McOutcome};
pub use scheme::{xi_diff, xi_dot, CoeffKind, PartialSumScheme, XiTable};
pub use weighted::{weighted_sum_check, WeightedMode};
