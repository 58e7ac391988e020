use serde::Serialize;

use super::chain::{
    cardinality_bound, chain_joint, rates_from_joint, residuals_from_joint, AuxChain, Location,
    RateVector,
};
use crate::error::{Error, Result};
use crate::info::{Bits, FunctionTable, JointPmf};

/// Largest alphabet used for `U_j` when the caller gives no caps.
pub const DEFAULT_CAP: usize = 4;

/// A two-terminal computation problem: sources `(X, Y) ~ pmf`, terminal A
/// must compute `f_A(X, Y)` and terminal B must compute `f_B(X, Y)`, and
/// the first message is sent by `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRateProblem {
    pmf: JointPmf,
    f_a: FunctionTable,
    f_b: FunctionTable,
    start: Location,
}

/// Rates and residuals of one chain on one problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainEvaluation {
    pub rates: RateVector,
    pub sum: Bits,
    pub residuals: (Bits, Bits),
}

impl ChainEvaluation {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.residuals.0 < tol && self.residuals.1 < tol
    }
}

impl SumRateProblem {
    pub fn new(
        pmf: JointPmf,
        f_a: FunctionTable,
        f_b: FunctionTable,
        start: Location,
    ) -> Result<Self> {
        if pmf.num_axes() != 2 {
            return Err(Error::Shape(format!(
                "p_XY must have two axes, got {}",
                pmf.num_axes()
            )));
        }
        let (nx, ny) = (pmf.axes()[0], pmf.axes()[1]);
        f_a.require_two_axes(nx, ny, "f_A")?;
        f_b.require_two_axes(nx, ny, "f_B")?;
        Ok(SumRateProblem {
            pmf,
            f_a,
            f_b,
            start,
        })
    }

    pub fn pmf(&self) -> &JointPmf {
        &self.pmf
    }

    pub fn f_a(&self) -> &FunctionTable {
        &self.f_a
    }

    pub fn f_b(&self) -> &FunctionTable {
        &self.f_b
    }

    pub fn start(&self) -> Location {
        self.start
    }

    pub fn x_size(&self) -> usize {
        self.pmf.axes()[0]
    }

    pub fn y_size(&self) -> usize {
        self.pmf.axes()[1]
    }

    /// The equivalent problem in which A speaks first. When B starts, the
    /// terminals trade places: sources and functions are transposed and
    /// `f_A`, `f_B` are exchanged. Chains found for it map back through
    /// [`AuxChain::relabeled_terminals`].
    pub(crate) fn oriented(&self) -> Result<SumRateProblem> {
        match self.start {
            Location::A => Ok(self.clone()),
            Location::B => Ok(SumRateProblem {
                pmf: self.pmf.transposed()?,
                f_a: self.f_b.transposed()?,
                f_b: self.f_a.transposed()?,
                start: Location::A,
            }),
        }
    }

    /// Maps a chain of [`oriented`](Self::oriented) back to this problem.
    pub(crate) fn unorient(&self, chain: AuxChain) -> AuxChain {
        match self.start {
            Location::A => chain,
            Location::B => chain.relabeled_terminals(),
        }
    }

    /// `min(cardinality bound, DEFAULT_CAP)` for each message, computed with
    /// the capped sizes of earlier messages.
    pub fn default_caps(&self, t: usize) -> Vec<usize> {
        let mut caps = Vec::with_capacity(t);
        for j in 0..t {
            let a_sends = (j % 2 == 0) == (self.start == Location::A);
            let own = if a_sends {
                self.x_size()
            } else {
                self.y_size()
            };
            caps.push(cardinality_bound(j + 1, own, &caps, t).min(DEFAULT_CAP));
        }
        caps
    }

    /// Validates user caps against the cardinality bound.
    pub fn resolve_caps(&self, t: usize, caps: Option<&[usize]>) -> Result<Vec<usize>> {
        let Some(caps) = caps else {
            return Ok(self.default_caps(t));
        };
        if caps.len() != t {
            return Err(Error::Domain(format!(
                "{} caps given for t = {t}",
                caps.len()
            )));
        }
        for j in 0..t {
            let a_sends = (j % 2 == 0) == (self.start == Location::A);
            let own = if a_sends {
                self.x_size()
            } else {
                self.y_size()
            };
            let bound = cardinality_bound(j + 1, own, &caps[..j], t);
            if caps[j] == 0 || caps[j] > bound {
                return Err(Error::Domain(format!(
                    "cap {} for U_{} must lie in 1..={bound}",
                    caps[j],
                    j + 1
                )));
            }
        }
        Ok(caps.to_vec())
    }

    pub fn evaluate(&self, chain: &AuxChain) -> Result<ChainEvaluation> {
        if chain.start() != self.start {
            return Err(Error::InvalidChain(format!(
                "chain starts at {:?}, problem starts at {:?}",
                chain.start(),
                self.start
            )));
        }
        let joint = chain_joint(&self.pmf, chain)?;
        let rates = rates_from_joint(&joint, chain)?;
        let residuals = residuals_from_joint(&joint, chain, &self.f_a, &self.f_b)?;
        Ok(ChainEvaluation {
            sum: rates.iter().sum(),
            rates,
            residuals,
        })
    }
}
