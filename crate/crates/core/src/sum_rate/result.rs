use serde::Serialize;

use super::bounds::LowerBounds;
use super::chain::{AuxChain, RateVector};
use crate::info::Bits;

/// Residuals below this count as decodable.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Slack allowed when comparing an achieved value with a lower bound.
pub const CERTIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exhaustive search over deterministic chains.
    BruteForce,
    /// Penalized continuous search over stochastic chains.
    Penalty,
}

/// Best chain found by a search, with its rates and the bounds it was
/// compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumRateResult {
    pub t: usize,
    pub achieved: Bits,
    pub rates: RateVector,
    pub residuals: (Bits, Bits),
    pub lower_bounds: LowerBounds,
    pub best_lower_bound: Bits,
    /// The achieved value meets a lower bound, so it is the exact minimum.
    pub certified: bool,
    pub status: Status,
    pub method: Method,
    /// Candidates (brute force) or restarts (penalty) examined.
    pub evaluated: u64,
    pub chain: AuxChain,
}

impl SumRateResult {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}
