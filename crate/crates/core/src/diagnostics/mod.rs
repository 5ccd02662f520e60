//! Quality and flatness metrics over collected samples.

mod eigen;
mod metrics;

pub use eigen::{
    hessian_eigenspectrum, hessian_fd, symmetric_eigenvalues, EigenReport, HESSIAN_STEP,
    MAX_HESSIAN_DIM,
};
pub use metrics::{
    empirical_distribution, ensemble_rmse, exact_distribution_distance, mode_visit_frequencies,
    pairwise_mismatch_count, pmc, regression_rmse, route_summary, DistanceReport, RouteSummary,
};
