//! Limit laws, goodness-of-fit tests and pathwise verification suites.

mod gof;
mod laws;
mod theorems;
mod yor;

pub use gof::{chi_squared, kolmogorov_survival, ks_test, ks_test_values, ks_two_sample, mean_se, Stage, TestKind, TestReport, Verdict};
pub use laws::{sample_limit_law, target_cdf, yule_quarter_density, Law, SampleSet};
pub use theorems::{verify_theorem, Schedule, Theorem, SuiteTolerances};
pub use yor::{mellin_chain, moment_check_yor};
