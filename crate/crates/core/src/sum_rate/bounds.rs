//! Lower bounds on the minimum sum-rate.

use serde::Serialize;

use super::chain::Location;
use super::problem::SumRateProblem;
use crate::error::{check_open_probability, Error, Result};
use crate::info::{conditional_entropy, h2, Bits, FunctionTable, JointPmf};
use crate::structure::han_kobayashi_condition;

/// Tolerance for the distributional checks that decide whether a
/// structured bound applies.
const APPLICABILITY_TOL: f64 = 1e-9;

fn require_two_axes(pmf: &JointPmf) -> Result<(usize, usize)> {
    if pmf.num_axes() != 2 {
        return Err(Error::Shape("p_XY must have two axes".into()));
    }
    Ok((pmf.axes()[0], pmf.axes()[1]))
}

/// `H(f_B(X,Y) | Y) + H(f_A(X,Y) | X)`: each terminal must at least learn
/// its function value given its own source. Holds for every `t`.
pub fn cutset_lower_bound(
    pmf: &JointPmf,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<Bits> {
    let (nx, ny) = require_two_axes(pmf)?;
    f_a.require_two_axes(nx, ny, "f_A")?;
    f_b.require_two_axes(nx, ny, "f_B")?;
    let za = pmf.augment(f_a.range_size(), |i| f_a.eval2(i[0], i[1]))?;
    let zb = pmf.augment(f_b.range_size(), |i| f_b.eval2(i[0], i[1]))?;
    Ok(conditional_entropy(&zb, &[2], &[1])? + conditional_entropy(&za, &[2], &[0])?)
}

/// One-message bound `H(X|Y)` for a message from A, valid when `p_XY` has
/// full support and every pair of `x` values is separated by some `y`
/// under `f_B`.
pub fn han_kobayashi_bound(pmf: &JointPmf, f_b: &FunctionTable) -> Result<Bits> {
    let (nx, ny) = require_two_axes(pmf)?;
    f_b.require_two_axes(nx, ny, "f_B")?;
    if !pmf.has_full_support() {
        return Err(Error::NotApplicable(
            "p_XY does not have full support".into(),
        ));
    }
    if !han_kobayashi_condition(f_b)? {
        return Err(Error::NotApplicable(
            "some pair of x values is never separated by f_B".into(),
        ));
    }
    conditional_entropy(pmf, &[0], &[1])
}

/// For binary `Y = X xor W` with `X` independent of `W` and both
/// nondegenerate, the minimum sum-rate for computing `f_B` at B is
/// `H(X|Y)` for every number of messages when some `y` separates the two
/// `x` values, and zero otherwise.
pub fn theorem2_bound(pmf: &JointPmf, f_b: &FunctionTable) -> Result<Bits> {
    let (nx, ny) = require_two_axes(pmf)?;
    if (nx, ny) != (2, 2) {
        return Err(Error::NotApplicable(format!(
            "needs binary X and Y, got {nx} x {ny}"
        )));
    }
    f_b.require_two_axes(2, 2, "f_B")?;
    let pr = |x: usize, y: usize| pmf.probs()[x * 2 + y];
    let px0 = pr(0, 0) + pr(0, 1);
    let px1 = pr(1, 0) + pr(1, 1);
    if px0 <= 0.0 || px1 <= 0.0 {
        return Err(Error::NotApplicable("X is deterministic".into()));
    }
    let flip0 = pr(0, 1) / px0;
    let flip1 = pr(1, 0) / px1;
    if (flip0 - flip1).abs() > APPLICABILITY_TOL {
        return Err(Error::NotApplicable(format!(
            "flip probability depends on X ({flip0} vs {flip1}), so X and W are dependent"
        )));
    }
    if flip0 <= 0.0 || flip0 >= 1.0 {
        return Err(Error::NotApplicable("flip noise W is deterministic".into()));
    }
    let separated = (0..2).any(|y| f_b.eval2(0, y) != f_b.eval2(1, y));
    if separated {
        conditional_entropy(pmf, &[0], &[1])
    } else {
        Ok(0.0)
    }
}

/// Lower bound on the infinite-message sum-rate for AND at both terminals
/// with `X ~ Ber(p)` independent of `Y ~ Ber(q)`:
/// `h2(p) + h2(q) - (1 - pq) h2((1-p)(1-q) / (1-pq))`.
pub fn theorem4_bound(p: f64, q: f64) -> Result<Bits> {
    check_open_probability("p", p)?;
    check_open_probability("q", q)?;
    let r = 1.0 - p * q;
    Ok(h2(p) + h2(q) - r * h2((1.0 - p) * (1.0 - q) / r))
}

/// The relaxed objective behind [`theorem4_bound`], as a function of the
/// share `lambda` of the `(0, 0)` mass placed with the `(1, 0)` cell.
pub fn and_bound_objective(p: f64, q: f64, lambda: f64) -> Result<Bits> {
    check_open_probability("p", p)?;
    check_open_probability("q", q)?;
    crate::error::check_probability("lambda", lambda)?;
    let p10 = p * (1.0 - q);
    let p01 = (1.0 - p) * q;
    let p00 = (1.0 - p) * (1.0 - q);
    let m2 = p10 + lambda * p00;
    let m3 = p01 + (1.0 - lambda) * p00;
    let part = |a: f64, m: f64| if m > 0.0 { m * h2(a / m) } else { 0.0 };
    Ok(h2(p) + h2(q) - part(p10, m2) - part(p01, m3))
}

/// Minimizer of [`and_bound_objective`]: `p(1-q) / (p + q - 2pq)`, which
/// splits the `(0, 0)` mass in proportion to `P(1,0) : P(0,1)`. The
/// expression with `p` and `q` interchanged agrees only when `p = q`.
pub fn lambda_star(p: f64, q: f64) -> Result<f64> {
    check_open_probability("p", p)?;
    check_open_probability("q", q)?;
    Ok(p * (1.0 - q) / (p + q - 2.0 * p * q))
}

/// Grid minimizer of [`and_bound_objective`] with the given step
/// (first grid point among exact ties).
pub fn lambda_grid_minimizer(p: f64, q: f64, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(crate::error::domain("grid step must lie in (0, 1]"));
    }
    let n = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let lambda = (k as f64 * step).min(1.0);
        let v = and_bound_objective(p, q, lambda)?;
        if v < best.0 {
            best = (v, lambda);
        }
    }
    Ok(best.1)
}

/// Reads `(p, q)` off a problem with independent binary sources and AND at
/// both terminals.
pub fn independent_and_parameters(
    pmf: &JointPmf,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<(f64, f64)> {
    let (nx, ny) = require_two_axes(pmf)?;
    if (nx, ny) != (2, 2) {
        return Err(Error::NotApplicable("needs binary sources".into()));
    }
    if *f_a != FunctionTable::and2() || *f_b != FunctionTable::and2() {
        return Err(Error::NotApplicable("needs AND at both terminals".into()));
    }
    let pr = |x: usize, y: usize| pmf.probs()[x * 2 + y];
    let p = pr(1, 0) + pr(1, 1);
    let q = pr(0, 1) + pr(1, 1);
    let independent = (0..2).all(|x| {
        (0..2).all(|y| {
            let px = if x == 1 { p } else { 1.0 - p };
            let py = if y == 1 { q } else { 1.0 - q };
            (pr(x, y) - px * py).abs() <= APPLICABILITY_TOL
        })
    });
    if !independent {
        return Err(Error::NotApplicable("X and Y are dependent".into()));
    }
    if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
        return Err(Error::NotApplicable("a source is deterministic".into()));
    }
    Ok((p, q))
}

/// Every lower bound that applies to a problem at a given `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBounds {
    pub cutset: Bits,
    pub theorem2: Option<Bits>,
    pub theorem4: Option<Bits>,
    pub han_kobayashi: Option<Bits>,
}

impl LowerBounds {
    pub fn best(&self) -> Bits {
        [
            Some(self.cutset),
            self.theorem2,
            self.theorem4,
            self.han_kobayashi,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

fn applicable(r: Result<Bits>) -> Result<Option<Bits>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotApplicable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Computes the bounds for `t` messages. The one-message bound is taken in
/// the direction of the single message.
pub fn lower_bounds(problem: &SumRateProblem, t: usize) -> Result<LowerBounds> {
    let pmf = problem.pmf();
    let cutset = cutset_lower_bound(pmf, problem.f_a(), problem.f_b())?;
    let theorem2 = applicable(theorem2_bound(pmf, problem.f_b()))?;
    let theorem4 = applicable(
        independent_and_parameters(pmf, problem.f_a(), problem.f_b())
            .and_then(|(p, q)| theorem4_bound(p, q)),
    )?;
    let han_kobayashi = if t == 1 {
        match problem.start() {
            Location::A => applicable(han_kobayashi_bound(pmf, problem.f_b()))?,
            Location::B => applicable(han_kobayashi_bound(
                &pmf.transposed()?,
                &problem.f_a().transposed()?,
            ))?,
        }
    } else {
        None
    };
    Ok(LowerBounds {
        cutset,
        theorem2,
        theorem4,
        han_kobayashi,
    })
}
