//! Auxiliary chains, sum-rate evaluation, minimum sum-rate searches and
//! lower bounds for two-terminal interactive computation.

mod bounds;
mod chain;
mod oracle;
mod penalty;
mod problem;
mod result;

pub use bounds::{
    and_bound_objective, cutset_lower_bound, han_kobayashi_bound, independent_and_parameters,
    lambda_grid_minimizer, lambda_star, lower_bounds, theorem2_bound, theorem4_bound, LowerBounds,
};
pub use chain::{
    cardinality_bound, chain_joint, check_membership, computability_residuals, message_rates,
    AuxChain, Location, RateVector, ROW_TOLERANCE,
};
pub use oracle::{min_sum_rate_bruteforce, MAX_CANDIDATES};
pub use penalty::{
    min_sum_rate_penalty, min_sum_rate_penalty_ladder, PenaltyOptions, MAX_MESSAGES,
};
pub use problem::{ChainEvaluation, SumRateProblem, DEFAULT_CAP};
pub use result::{Method, Status, SumRateResult, CERTIFY_TOL, FEASIBILITY_TOL};
