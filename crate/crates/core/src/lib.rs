//! Zeckendorf decompositions, random legal decompositions, and Benford
//! digit statistics with exact arithmetic.
//!
//! Every non-negative integer is the sum of a unique set of non-adjacent
//! Fibonacci numbers (normalized here as `F_1 = 1, F_2 = 2`). This crate
//! computes those decompositions at arbitrary precision, runs the random
//! process that grows legal summand sets index by index, verifies the
//! process's exact probability laws in the field `Q(sqrt 5)`, and measures
//! how summand leading digits track the Benford distribution.
//!
//! Layout:
//! - [`fib`]: arbitrary-precision Fibonacci numbers by fast doubling.
//! - [`zeckendorf`]: decomposition, decoding, and legal-set enumeration.
//! - [`scalar`]: exact arithmetic in `Q(sqrt 5)`.
//! - [`digits`]: leading digit blocks, with a logarithmic fast path.
//! - [`density`]: Fibonacci subsets with known densities.
//! - [`process`]: the random process, its exact laws, and simulation.
//! - [`stats`]: Benford references, digit histograms, chi-square.
//! - [`oracle`]: independent brute-force references for testing.
//! - [`experiments`]: the experiment drivers behind the CLI.

pub mod density;
pub mod digits;
pub mod error;
pub mod experiments;
pub mod fib;
pub mod oracle;
pub mod process;
pub mod scalar;
pub mod stats;
pub mod zeckendorf;

pub use density::{
    make_digit_block_set, make_value_residue_set, q_hat, ratio_stats, ratio_stats_of_set, AllFib,
    DensitySet, DigitBlockSet, RatioStats, ResidueSet,
};
pub use digits::{fib_leading_block_fast, leading_digit, significand_block, DigitBlock};
pub use error::{Error, Result};
pub use experiments::{
    big_random_benford, density_converge, exhaustive_benford, run_verify_suite,
    BigRandomBenfordSummary, ConvergeMode, DensityConvergeSummary, ExhaustiveBenfordSummary,
    SuiteReport, VerifySuite, DEFAULT_SEED,
};
pub use fib::{fib, fib_pair, largest_fib_leq, FibIndex};
pub use oracle::{
    brute_force_zeckendorf, enumerate_process_tree, verify_phi_identities, OutcomeTable,
    VerificationReport,
};
pub use process::{
    expected_w, prob_fk_in_a, prob_of_m, prob_of_m_product, sample_a, sample_uniform_like,
    sample_uniform_m, simulate_counts, uniform_below, ProcessConfig, SimulationSummary,
    TrialCounts,
};
pub use scalar::ExactScalar;
pub use stats::{
    benford_probs, chi_square, chi_square_benford, digit_histogram, ChiSquareReport,
    DigitHistogram, CHI2_95_8DOF, CHI2_99_8DOF,
};
pub use zeckendorf::{enumerate_legal, is_legal, summand_values, zd, zd_inverse, ZeckSet};

// Re-exported so downstream callers can construct inputs without naming
// the arbitrary-precision backend explicitly.
pub use num_bigint::BigUint;
pub use num_rational::BigRational;
