//! Success-probability bounds, first-success statistics and block-time
//! modelling.

mod bounds;
mod montecarlo;
mod report;
mod stats;

pub use bounds::{
    binary_entropy, binomial, binomial_prefix_sum, block_time, delta1_for,
    ds_probability_optimal, entropy_sum_holds, fshc_lower_bound, fshc_lower_bound_exact, g_bound,
    prop1_bounds, rational_to_f64, CodePoint, ProbabilityBounds,
};
pub use montecarlo::{
    estimate_p, estimate_p_exhaustive, exact_success_fraction, wilson_interval, PEstimate,
    MAX_EXHAUSTIVE_LENGTH,
};
pub use report::{
    bounds_csv, bounds_rows, entropy_grid, entropy_grid_csv, table7_report, table7_rows, BoundsRow,
    EntropyCheck, Table7Entry, TABLE7_MINERS, TABLE7_PUBLISHED,
};
pub use stats::{
    fshc_stats, geometric_gof, sample_mean_variance, FshcStats, GofBin, GofResult, MIN_GOF_SAMPLES,
};
