//! Rate-allocation curves for computing `X AND Y` at both terminals with
//! independent `X ~ Ber(p)` and `Y ~ Ber(q)`.
//!
//! Write `X = 1{V_x >= 1 - p}` and `Y = 1{V_y >= 1 - q}` with `V_x`, `V_y`
//! independent uniforms. A monotone curve `(α(s), β(s))` from `(0, 0)` to
//! `(1 - p, 1 - q)` schedules the messages: A repeatedly reveals whether
//! `V_x` has passed `α(s)`, B whether `V_y` has passed `β(s)`. Finite
//! partitions of `s` give staircase schemes with `t = 2n` messages; the
//! limit of fine partitions is a line integral along the curve.

use serde::Serialize;

use crate::error::{check_open_probability, check_probability, domain, Error, Result};
use crate::info::{bernoulli_product, h2, Bits, JointPmf};
use crate::quadrature::adaptive_simpson;
use crate::sum_rate::{AuxChain, Location, RateVector};

/// Absolute tolerance of the curve integrals.
pub const INTEGRAL_TOL: f64 = 1e-9;

/// Width of the interval next to a singular endpoint that is integrated
/// with the antiderivative instead of quadrature.
const SLIVER: f64 = 1e-6;

/// Tolerance for snapping curve endpoints and checking monotonicity.
const CURVE_TOL: f64 = 1e-12;

/// `log2((1 - v) / (1 - r - v))` for `0 <= v < 1 - r`: the rate density
/// for revealing that a `Ber(r)` source's uniform has passed `v`.
fn weight(v: f64, r: f64, name: &str) -> Result<f64> {
    check_probability("parameter", r)?;
    if r >= 1.0 {
        return Err(domain(format!("{name}: parameter must be below 1")));
    }
    if !(v >= 0.0 && v < 1.0 - r) {
        return Err(domain(format!(
            "{name}: v = {v} must lie in [0, {})",
            1.0 - r
        )));
    }
    Ok(((1.0 - v) / (1.0 - r - v)).log2())
}

/// Rate density `w_x(v, p)` for terminal A.
pub fn weight_x(v: f64, p: f64) -> Result<f64> {
    weight(v, p, "weight_x")
}

/// Rate density `w_y(v, q)` for terminal B.
pub fn weight_y(v: f64, q: f64) -> Result<f64> {
    weight(v, q, "weight_y")
}

/// Antiderivative of the rate density: `F(v) = -(1 - v) h2(r / (1 - v))`,
/// with `F(0) = -h2(r)` and `F(1 - r) = 0`. Defined on `[0, 1 - r]`.
pub fn weight_antiderivative(v: f64, r: f64) -> Bits {
    if v >= 1.0 - r {
        return 0.0;
    }
    -(1.0 - v) * h2(r / (1.0 - v))
}

/// Monotone piecewise-linear curve from `(0, 0)` to `(1 - p, 1 - q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateAllocationCurve {
    p: f64,
    q: f64,
    vertices: Vec<(f64, f64)>,
}

impl RateAllocationCurve {
    /// Validates the vertex list. Endpoints within 1e-12 of their targets
    /// are snapped; consecutive repeated vertices are dropped.
    pub fn new(p: f64, q: f64, vertices: Vec<(f64, f64)>) -> Result<Self> {
        check_open_probability("p", p)?;
        check_open_probability("q", q)?;
        let end = (1.0 - p, 1.0 - q);
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve(
                "a curve needs at least two vertices".into(),
            ));
        }
        let mut vs = vertices;
        let close = |a: (f64, f64), b: (f64, f64)| {
            (a.0 - b.0).abs() <= CURVE_TOL && (a.1 - b.1).abs() <= CURVE_TOL
        };
        if !close(vs[0], (0.0, 0.0)) {
            return Err(Error::InvalidCurve(format!(
                "curve must start at (0, 0), got {:?}",
                vs[0]
            )));
        }
        let last = vs.len() - 1;
        if !close(vs[last], end) {
            return Err(Error::InvalidCurve(format!(
                "curve must end at ({}, {}), got {:?}",
                end.0, end.1, vs[last]
            )));
        }
        vs[0] = (0.0, 0.0);
        vs[last] = end;
        for (i, v) in vs.iter().enumerate() {
            if !(v.0.is_finite() && v.1.is_finite())
                || v.0 < -CURVE_TOL
                || v.1 < -CURVE_TOL
                || v.0 > end.0 + CURVE_TOL
                || v.1 > end.1 + CURVE_TOL
            {
                return Err(Error::InvalidCurve(format!(
                    "vertex {i} = {v:?} lies outside [0, {}] x [0, {}]",
                    end.0, end.1
                )));
            }
        }
        for (i, w) in vs.windows(2).enumerate() {
            if w[1].0 < w[0].0 - CURVE_TOL || w[1].1 < w[0].1 - CURVE_TOL {
                return Err(Error::InvalidCurve(format!(
                    "curve decreases between vertices {i} and {}",
                    i + 1
                )));
            }
        }
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(vs.len());
        for v in vs {
            let v = (v.0.clamp(0.0, end.0), v.1.clamp(0.0, end.1));
            if vertices.last().is_none_or(|&l| l != v) {
                vertices.push(v);
            }
        }
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("curve has no extent".into()));
        }
        Ok(RateAllocationCurve { p, q, vertices })
    }

    /// Straight line from `(0, 0)` to `(1 - p, 1 - q)`.
    pub fn diagonal(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, vec![(0.0, 0.0), (1.0 - p, 1.0 - q)])
    }

    /// The sum-rate-minimizing curve. For `q >= p` it runs along the
    /// `v_x` axis to `((q - p) / q, 0)` and then straight to the corner;
    /// for `q < p` it is the mirror image with the terminals' roles swapped.
    pub fn optimal(p: f64, q: f64) -> Result<Self> {
        check_open_probability("p", p)?;
        check_open_probability("q", q)?;
        let knee = if q >= p {
            ((q - p) / q, 0.0)
        } else {
            (0.0, (p - q) / p)
        };
        Self::new(p, q, vec![(0.0, 0.0), knee, (1.0 - p, 1.0 - q)])
    }

    /// The staircase traced by a finite partition of this curve: A's steps
    /// are horizontal, B's are vertical.
    pub fn staircase(&self, partition: &Partition) -> Result<Self> {
        let mut vs = vec![(0.0, 0.0)];
        let mut prev = self.point_at(0.0);
        for &s in &partition.points[1..] {
            let cur = self.point_at(s);
            vs.push((cur.0, prev.1));
            vs.push(cur);
            prev = cur;
        }
        Self::new(self.p, self.q, vs)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// `(α(s), β(s))`, with vertex `k` of `K + 1` at `s = k / K` and linear
    /// interpolation in between.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let k = (self.vertices.len() - 1) as f64;
        let pos = (s.clamp(0.0, 1.0) * k).min(k);
        let i = (pos.floor() as usize).min(self.vertices.len() - 2);
        let frac = pos - i as f64;
        let (a, b) = (self.vertices[i], self.vertices[i + 1]);
        if frac == 0.0 {
            return a;
        }
        if frac == 1.0 {
            return b;
        }
        (a.0 + frac * (b.0 - a.0), a.1 + frac * (b.1 - a.1))
    }
}

/// Breakpoints `0 = s_0 < s_1 < ... < s_n = 1` of the curve parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 || *points.last().unwrap() != 1.0 {
            return Err(Error::InvalidCurve(
                "a partition runs from exactly 0 to exactly 1".into(),
            ));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve(
                "partition points must be strictly increasing".into(),
            ));
        }
        Ok(Partition { points })
    }

    /// `n` equal pieces, giving a `2n`-message scheme.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCurve(
                "a partition needs at least one piece".into(),
            ));
        }
        let mut points: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        points[n] = 1.0;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of pieces `n`.
    pub fn pieces(&self) -> usize {
        self.points.len() - 1
    }

    /// Number of messages `t = 2n`.
    pub fn messages(&self) -> usize {
        2 * self.pieces()
    }
}

/// Rates of the `2n`-message staircase scheme. Message `2i - 1` (from A)
/// moves `α` from `α(s_{i-1})` to `α(s_i)` over the strip above
/// `β(s_{i-1})`; message `2i` (from B) moves `β` to `β(s_i)` over the strip
/// right of `α(s_i)`. Each rate is the strip width times an exact
/// antiderivative difference.
pub fn staircase_rates(curve: &RateAllocationCurve, partition: &Partition) -> Result<RateVector> {
    let (p, q) = (curve.p, curve.q);
    let mut rates = Vec::with_capacity(partition.messages());
    let mut prev = curve.point_at(0.0);
    for &s in &partition.points[1..] {
        let cur = curve.point_at(s);
        let ra =
            (1.0 - prev.1) * (weight_antiderivative(cur.0, p) - weight_antiderivative(prev.0, p));
        let rb =
            (1.0 - cur.0) * (weight_antiderivative(cur.1, q) - weight_antiderivative(prev.1, q));
        rates.push(ra.max(0.0));
        rates.push(rb.max(0.0));
        prev = cur;
    }
    Ok(rates)
}

/// `∫ w(v) (c0 + c1 v) dv` over `[lo, hi]`, where `w` has antiderivative
/// `F` with a log singularity at `1 - r` that may coincide with `hi`.
fn weighted_segment(lo: f64, hi: f64, r: f64, c0: f64, c1: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let lin = |v: f64| c0 + c1 * v;
    let anti = |v: f64| weight_antiderivative(v, r);
    if c1 == 0.0 {
        return Ok(c0 * (anti(hi) - anti(lo)));
    }
    let singular_end = 1.0 - r;
    let cut = if singular_end - hi < SLIVER {
        (singular_end - SLIVER).max(lo)
    } else {
        hi
    };
    let w = |v: f64| ((1.0 - v) / (1.0 - r - v)).log2() * lin(v);
    let mut total = adaptive_simpson(&w, lo, cut, INTEGRAL_TOL)?;
    if cut < hi {
        total += lin(0.5 * (cut + hi)) * (anti(hi) - anti(cut));
    }
    Ok(total)
}

/// Limit sum-rate of ever finer staircases on `curve`:
/// `∫ w_x(v) (1 - β) dv_x + ∫ w_y(v) (1 - α) dv_y` along the curve.
pub fn integral_sum_rate(curve: &RateAllocationCurve) -> Result<Bits> {
    let (p, q) = (curve.p, curve.q);
    let mut total = 0.0;
    for seg in curve.vertices.windows(2) {
        let ((a0, b0), (a1, b1)) = (seg[0], seg[1]);
        if a1 > a0 {
            // β as a function of v_x along the segment.
            let slope = (b1 - b0) / (a1 - a0);
            total += weighted_segment(a0, a1, p, 1.0 - b0 + slope * a0, -slope)?;
        }
        if b1 > b0 {
            let slope = (a1 - a0) / (b1 - b0);
            total += weighted_segment(b0, b1, q, 1.0 - a0 + slope * b0, -slope)?;
        }
    }
    Ok(total)
}

/// Areas of the regions charged to A and to B by a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSplit {
    pub area_x: f64,
    pub area_y: f64,
}

impl RegionSplit {
    pub fn total(&self) -> f64 {
        self.area_x + self.area_y
    }
}

/// Region areas; their sum is `1 - pq` for every curve.
pub fn region_split(curve: &RateAllocationCurve) -> RegionSplit {
    let mut split = RegionSplit {
        area_x: 0.0,
        area_y: 0.0,
    };
    for seg in curve.vertices.windows(2) {
        let ((a0, b0), (a1, b1)) = (seg[0], seg[1]);
        split.area_x += (a1 - a0) * (1.0 - 0.5 * (b0 + b1));
        split.area_y += (b1 - b0) * (1.0 - 0.5 * (a0 + a1));
    }
    split
}

/// Closed form of the integral on the optimal curve:
/// `h2(p) + p h2(q) + p log2 q + p (1 - q) log2 e` for `q >= p`, and the
/// same expression with `p` and `q` exchanged for `q < p`.
pub fn closed_form_infinite_rate(p: f64, q: f64) -> Result<Bits> {
    check_open_probability("p", p)?;
    check_open_probability("q", q)?;
    let (p, q) = if q >= p { (p, q) } else { (q, p) };
    Ok(h2(p) + p * h2(q) + p * q.log2() + p * (1.0 - q) * std::f64::consts::LOG2_E)
}

/// Best two-message sum-rate with A first: `h2(p) + p h2(q)`.
pub fn two_message_rate(p: f64, q: f64) -> Result<Bits> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(h2(p) + p * h2(q))
}

/// Sum-rate of the three-message chain `U1 = X OR W` (`W ~ Ber(1/2)`),
/// `U2 = Y AND U1`, `U3 = X AND U2` for AND at both terminals of a doubly
/// symmetric binary source: `(5/4) h2(p) + (1/2) h2((1-p)/2) - (1-p)/2`.
pub fn dsbs_three_message_rate(p: f64) -> Result<Bits> {
    check_open_probability("p", p)?;
    Ok(1.25 * h2(p) + 0.5 * h2(0.5 * (1.0 - p)) - 0.5 * (1.0 - p))
}

/// The chain behind [`dsbs_three_message_rate`]: `U1 = X OR W` with
/// `W ~ Ber(1/2)` private to A, `U2 = Y AND U1`, `U3 = X AND U2`.
pub fn dsbs_three_message_chain() -> AuxChain {
    let det = |v: usize| {
        if v == 1 {
            vec![0.0, 1.0]
        } else {
            vec![1.0, 0.0]
        }
    };
    AuxChain::from_fn(Location::A, 2, 2, vec![2, 2, 2], |j, own, u| match j {
        0 if own == 1 => vec![0.0, 1.0],
        0 => vec![0.5, 0.5],
        _ => det(own & u[j - 1]),
    })
    .expect("fixed binary chain is valid")
}

/// The staircase scheme as an explicit chain of binary messages for the
/// source `bernoulli_product([p, q])`. Message `j` is 1 while the pair
/// `(V_x, V_y)` is still above the current staircase corner, so the last
/// message equals `X AND Y`.
pub fn staircase_chain(curve: &RateAllocationCurve, partition: &Partition) -> Result<AuxChain> {
    let (p, q) = (curve.p, curve.q);
    let corners: Vec<(f64, f64)> = partition
        .points
        .iter()
        .map(|&s| curve.point_at(s))
        .collect();
    // P(V passes `next` | V in [cur, 1 - r)) for the source symbol 0.
    let pass = |cur: f64, next: f64, r: f64| {
        let den = 1.0 - r - cur;
        if den <= 0.0 {
            0.0
        } else {
            ((1.0 - r - next) / den).clamp(0.0, 1.0)
        }
    };
    AuxChain::from_fn(
        Location::A,
        2,
        2,
        vec![2; partition.messages()],
        |j, own, u| {
            let alive = u.last().is_none_or(|&v| v == 1);
            let i = j / 2;
            let prob_one = if !alive {
                0.0
            } else if own == 1 {
                1.0
            } else if j % 2 == 0 {
                pass(corners[i].0, corners[i + 1].0, p)
            } else {
                pass(corners[i].1, corners[i + 1].1, q)
            };
            vec![1.0 - prob_one, prob_one]
        },
    )
}

/// Source of the construction: independent `Ber(p)` and `Ber(q)`.
pub fn and_source(p: f64, q: f64) -> Result<JointPmf> {
    bernoulli_product(&[p, q])
}
