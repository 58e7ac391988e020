//! Rates, lower bounds and optimizers for interactive function computation
//! between terminals observing correlated finite-alphabet sources.
//!
//! - [`info`]: probability tables, function tables and Shannon measures.
//! - [`structure`]: supports, rectangles and monochromatic-rectangle tests.
//! - [`sum_rate`]: auxiliary chains, rate evaluation, searches and bounds.
//! - [`allocation`]: the rate-allocation-curve construction for AND of
//!   independent bits.
//! - [`network`]: multiterminal cut-set linear programs and schemes.

pub mod allocation;
pub mod error;
pub mod info;
pub mod network;
pub mod quadrature;
pub mod structure;
pub mod sum_rate;

pub use allocation::{Partition, RateAllocationCurve};
pub use error::{Error, Result};
pub use info::{Bits, FunctionTable, JointPmf};
pub use network::{LpProblem, LpSolution, NetworkSpec, ProtocolSchedule};
pub use sum_rate::{AuxChain, Location, RateVector, SumRateProblem, SumRateResult};
