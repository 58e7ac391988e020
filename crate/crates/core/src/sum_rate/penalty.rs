//! Penalized continuous search over stochastic auxiliary chains.
//!
//! Each conditional table row is a softmax of free logits. The objective
//! is the sum-rate plus `mu` times the two computability residuals, all
//! written as signed sums of joint entropies of marginals of
//! `(X, Y, U^t)`, so the gradient with respect to a cell probability is a
//! signed sum of `-log2` marginal probabilities. `mu` grows geometrically;
//! afterwards small entries are zeroed to make the residuals exactly zero
//! and the sum-rate is refined with the support held fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chain::{AuxChain, Location};
use super::oracle::finish;
use super::problem::SumRateProblem;
use super::result::{Method, Status, SumRateResult, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Largest number of messages the optimizer accepts.
pub const MAX_MESSAGES: usize = 6;

/// Largest dense joint the optimizer works on, in cells.
const MAX_JOINT_CELLS: usize = 1 << 16;

/// Residual total below which a polished point counts as decodable inside
/// the optimizer (the final check uses [`FEASIBILITY_TOL`]).
const INNER_FEASIBLE: f64 = 1e-10;

/// Thresholds tried when zeroing small table entries.
const POLISH_THRESHOLDS: [f64; 6] = [1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2];

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyOptions {
    /// Independent random restarts; at least 20 are recommended.
    pub restarts: usize,
    pub seed: u64,
    /// Alphabet caps per message; defaults to [`SumRateProblem::default_caps`].
    pub caps: Option<Vec<usize>>,
    pub mu_start: f64,
    pub mu_end: f64,
    pub mu_factor: f64,
    /// Adam steps at each penalty weight.
    pub steps_per_stage: usize,
    /// Adam steps of the fixed-support refinement.
    pub refine_steps: usize,
    pub learning_rate: f64,
    /// A feasible chain with at most `t` messages, padded with singleton
    /// messages and kept as a candidate.
    pub warm_start: Option<AuxChain>,
}

impl Default for PenaltyOptions {
    fn default() -> Self {
        PenaltyOptions {
            restarts: 24,
            seed: 0,
            caps: None,
            mu_start: 1.0,
            mu_end: 1e6,
            mu_factor: 10.0,
            steps_per_stage: 300,
            refine_steps: 600,
            learning_rate: 0.05,
            warm_start: None,
        }
    }
}

/// Precomputed indexing of the dense joint over `(x, y, u^t)`.
struct Layout {
    t: usize,
    /// Probability of the source pair behind each cell.
    base: Vec<f64>,
    /// Per step, the offset of each cell's row in the flat parameter vector.
    row_start: Vec<Vec<usize>>,
    /// Per step, the chosen symbol `u_j` of each cell.
    symbol: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    /// Offset of each step's table in the flat parameter vector.
    offsets: Vec<usize>,
    n_params: usize,
    // Marginal keys per cell.
    key_xu: Vec<usize>,
    key_yu: Vec<usize>,
    key_zxu: Vec<usize>,
    key_zyu: Vec<usize>,
    n_xu: usize,
    n_yu: usize,
    n_zxu: usize,
    n_zyu: usize,
    h_x: f64,
    h_y: f64,
    h_xy: f64,
}

impl Layout {
    fn new(problem: &SumRateProblem, sizes: &[usize]) -> Result<Self> {
        let (nx, ny) = (problem.x_size(), problem.y_size());
        let t = sizes.len();
        let k: usize = sizes.iter().product();
        let n = nx * ny * k;
        if n > MAX_JOINT_CELLS {
            return Err(Error::Capacity(format!(
                "joint of {n} cells exceeds the optimizer limit of {MAX_JOINT_CELLS}"
            )));
        }
        let mut offsets = Vec::with_capacity(t);
        let mut n_params = 0;
        let mut prefixes = 1;
        for (j, &s) in sizes.iter().enumerate() {
            offsets.push(n_params);
            let own = if j % 2 == 0 { nx } else { ny };
            n_params += own * prefixes * s;
            prefixes *= s;
        }
        let probs = problem.pmf().probs();
        let fa = problem.f_a();
        let fb = problem.f_b();
        let (za, zb) = (fa.range_size(), fb.range_size());
        let mut layout = Layout {
            t,
            base: Vec::with_capacity(n),
            row_start: vec![Vec::with_capacity(n); t],
            symbol: vec![Vec::with_capacity(n); t],
            sizes: sizes.to_vec(),
            offsets,
            n_params,
            key_xu: Vec::with_capacity(n),
            key_yu: Vec::with_capacity(n),
            key_zxu: Vec::with_capacity(n),
            key_zyu: Vec::with_capacity(n),
            n_xu: nx * k,
            n_yu: ny * k,
            n_zxu: za * nx * k,
            n_zyu: zb * ny * k,
            h_x: 0.0,
            h_y: 0.0,
            h_xy: 0.0,
        };
        let mut u = vec![0usize; t];
        for x in 0..nx {
            for y in 0..ny {
                for uf in 0..k {
                    let c = x * ny + y;
                    layout.base.push(probs[c]);
                    let mut prefix = 0;
                    for j in 0..t {
                        let own = if j % 2 == 0 { x } else { y };
                        let pc: usize = sizes[..j].iter().product();
                        let row = own * pc + prefix;
                        layout.row_start[j].push(layout.offsets[j] + row * sizes[j]);
                        layout.symbol[j].push(u[j]);
                        prefix = prefix * sizes[j] + u[j];
                    }
                    layout.key_xu.push(x * k + uf);
                    layout.key_yu.push(y * k + uf);
                    layout.key_zxu.push((fa.eval2(x, y) * nx + x) * k + uf);
                    layout.key_zyu.push((fb.eval2(x, y) * ny + y) * k + uf);
                    crate::info::advance(&mut u, sizes);
                }
            }
        }
        let marg = |keep: &[usize]| {
            problem
                .pmf()
                .marginal(keep)
                .map(|m| crate::info::entropy_of(m.probs()))
        };
        layout.h_x = marg(&[0])?;
        layout.h_y = marg(&[1])?;
        layout.h_xy = crate::info::entropy_of(probs);
        Ok(layout)
    }

    fn cells(&self) -> usize {
        self.base.len()
    }

    fn joint(&self, q: &[f64], out: &mut [f64]) {
        for (c, slot) in out.iter_mut().enumerate() {
            let mut p = self.base[c];
            for j in 0..self.t {
                if p == 0.0 {
                    break;
                }
                p *= q[self.row_start[j][c] + self.symbol[j][c]];
            }
            *slot = p;
        }
    }
}

struct Scratch {
    joint: Vec<f64>,
    xu: Vec<f64>,
    yu: Vec<f64>,
    zxu: Vec<f64>,
    zyu: Vec<f64>,
    acc: Vec<f64>,
}

impl Scratch {
    fn new(l: &Layout) -> Self {
        Scratch {
            joint: vec![0.0; l.cells()],
            xu: vec![0.0; l.n_xu],
            yu: vec![0.0; l.n_yu],
            zxu: vec![0.0; l.n_zxu],
            zyu: vec![0.0; l.n_zyu],
            acc: vec![0.0; l.n_params],
        }
    }
}

fn entropy(v: &[f64]) -> f64 {
    crate::info::entropy_of(v)
}

/// Sum-rate and residual total of the tables `q`, filling the marginals.
fn evaluate(l: &Layout, q: &[f64], s: &mut Scratch) -> (f64, f64) {
    l.joint(q, &mut s.joint);
    for v in [&mut s.xu, &mut s.yu, &mut s.zxu, &mut s.zyu] {
        v.iter_mut().for_each(|x| *x = 0.0);
    }
    for (c, &p) in s.joint.iter().enumerate() {
        if p > 0.0 {
            s.xu[l.key_xu[c]] += p;
            s.yu[l.key_yu[c]] += p;
            s.zxu[l.key_zxu[c]] += p;
            s.zyu[l.key_zyu[c]] += p;
        }
    }
    let (h_xu, h_yu, h_xyu) = (entropy(&s.xu), entropy(&s.yu), entropy(&s.joint));
    // I(X;U|Y) + I(Y;U|X) = H(YU) + H(XU) - 2 H(XYU) - H(X) - H(Y) + 2 H(XY)
    let sum = h_yu + h_xu - 2.0 * h_xyu - l.h_x - l.h_y + 2.0 * l.h_xy;
    let residual = (entropy(&s.zxu) - h_xu) + (entropy(&s.zyu) - h_yu);
    (sum.max(0.0), residual.max(0.0))
}

/// Gradient of `sum + mu * residual` with respect to the logits, given the
/// softmax tables `q`. Requires a prior call to [`evaluate`] on `q`.
fn gradient(l: &Layout, q: &[f64], mu: f64, s: &mut Scratch, grad: &mut [f64]) {
    let lg = |m: f64| if m > 0.0 { -m.log2() } else { 0.0 };
    s.acc.iter_mut().for_each(|v| *v = 0.0);
    for c in 0..l.cells() {
        let p = s.joint[c];
        if p <= 0.0 {
            continue;
        }
        let g = (1.0 - mu) * (lg(s.xu[l.key_xu[c]]) + lg(s.yu[l.key_yu[c]])) - 2.0 * lg(p)
            + mu * (lg(s.zxu[l.key_zxu[c]]) + lg(s.zyu[l.key_zyu[c]]));
        let gp = g * p;
        for j in 0..l.t {
            s.acc[l.row_start[j][c] + l.symbol[j][c]] += gp;
        }
    }
    for j in 0..l.t {
        let size = l.sizes[j];
        let end = l.offsets.get(j + 1).copied().unwrap_or(l.n_params);
        let mut r = l.offsets[j];
        while r < end {
            let total: f64 = s.acc[r..r + size].iter().sum();
            for k in r..r + size {
                grad[k] = s.acc[k] - q[k] * total;
            }
            r += size;
        }
    }
}

fn softmax_rows(l: &Layout, theta: &[f64], mask: &[bool], q: &mut [f64]) {
    for j in 0..l.t {
        let size = l.sizes[j];
        let end = l.offsets.get(j + 1).copied().unwrap_or(l.n_params);
        let mut r = l.offsets[j];
        while r < end {
            let row = r..r + size;
            let m = row
                .clone()
                .filter(|&k| mask[k])
                .map(|k| theta[k])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for k in row.clone() {
                q[k] = if mask[k] { (theta[k] - m).exp() } else { 0.0 };
                z += q[k];
            }
            for k in row {
                q[k] /= z;
            }
            r += size;
        }
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, theta: &mut [f64], grad: &[f64], lr: f64, mask: &[bool]) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        self.step += 1;
        let c1 = 1.0 - B1.powi(self.step);
        let c2 = 1.0 - B2.powi(self.step);
        for k in 0..theta.len() {
            if !mask[k] {
                continue;
            }
            self.m[k] = B1 * self.m[k] + (1.0 - B1) * grad[k];
            self.v[k] = B2 * self.v[k] + (1.0 - B2) * grad[k] * grad[k];
            theta[k] -= lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + 1e-12);
        }
    }
}

/// Runs Adam on the logits for `steps` iterations and leaves the final
/// tables in `q`.
#[allow(clippy::too_many_arguments)]
fn descend(
    l: &Layout,
    theta: &mut [f64],
    mask: &[bool],
    mu: f64,
    steps: usize,
    lr: f64,
    s: &mut Scratch,
    q: &mut [f64],
    grad: &mut [f64],
) {
    let mut adam = Adam::new(theta.len());
    for _ in 0..steps {
        softmax_rows(l, theta, mask, q);
        evaluate(l, q, s);
        gradient(l, q, mu, s, grad);
        adam.update(theta, grad, lr, mask);
    }
    softmax_rows(l, theta, mask, q);
}

/// Zeroes entries of `q` below `threshold` and renormalizes each row.
fn truncate(l: &Layout, q: &[f64], threshold: f64) -> Vec<f64> {
    let mut out = q.to_vec();
    for j in 0..l.t {
        let size = l.sizes[j];
        let end = l.offsets.get(j + 1).copied().unwrap_or(l.n_params);
        for row in out[l.offsets[j]..end].chunks_mut(size) {
            row.iter_mut().for_each(|v| {
                if *v < threshold {
                    *v = 0.0
                }
            });
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= z);
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Candidate {
    q: Vec<f64>,
    sum: f64,
    residual: f64,
}

impl Candidate {
    fn feasible(&self) -> bool {
        self.residual < INNER_FEASIBLE
    }

    /// Feasible beats infeasible; then lower sum (feasible) or lower
    /// residual (infeasible). Near-ties keep the incumbent.
    fn better_than(&self, other: &Candidate) -> bool {
        match (self.feasible(), other.feasible()) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.sum < other.sum - 1e-12,
            (false, false) => self.residual < other.residual - 1e-15,
        }
    }
}

fn restart(l: &Layout, opts: &PenaltyOptions, index: usize) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let n = l.n_params;
    let mut theta: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let full = vec![true; n];
    let mut s = Scratch::new(l);
    let mut q = vec![0.0; n];
    let mut grad = vec![0.0; n];

    let mut mu = opts.mu_start;
    while mu <= opts.mu_end * (1.0 + 1e-12) {
        descend(
            l,
            &mut theta,
            &full,
            mu,
            opts.steps_per_stage,
            opts.learning_rate,
            &mut s,
            &mut q,
            &mut grad,
        );
        mu *= opts.mu_factor;
    }

    let (sum, residual) = evaluate(l, &q, &mut s);
    let mut best = Candidate {
        q: q.clone(),
        sum,
        residual,
    };
    for &thr in &POLISH_THRESHOLDS {
        let qt = truncate(l, &q, thr);
        let (sum, residual) = evaluate(l, &qt, &mut s);
        let cand = Candidate {
            q: qt,
            sum,
            residual,
        };
        if cand.better_than(&best) {
            best = cand;
        }
    }
    if best.feasible() {
        // Fixed support: entries stay positive, so decodability is kept.
        let mask: Vec<bool> = best.q.iter().map(|&v| v > 0.0).collect();
        let mut theta: Vec<f64> = best
            .q
            .iter()
            .map(|&v| if v > 0.0 { v.ln() } else { 0.0 })
            .collect();
        descend(
            l,
            &mut theta,
            &mask,
            0.0,
            opts.refine_steps,
            opts.learning_rate * 0.5,
            &mut s,
            &mut q,
            &mut grad,
        );
        for qr in [q.clone(), truncate(l, &q, 1e-9)] {
            let (sum, residual) = evaluate(l, &qr, &mut s);
            let cand = Candidate {
                q: qr,
                sum,
                residual,
            };
            if cand.better_than(&best) {
                best = cand;
            }
        }
    }
    best
}

fn to_chain(problem: &SumRateProblem, l: &Layout, q: &[f64]) -> Result<AuxChain> {
    let steps: Vec<Vec<f64>> = (0..l.t)
        .map(|j| {
            let end = l.offsets.get(j + 1).copied().unwrap_or(l.n_params);
            q[l.offsets[j]..end].to_vec()
        })
        .collect();
    AuxChain::new(
        Location::A,
        problem.x_size(),
        problem.y_size(),
        l.sizes.clone(),
        steps,
    )
}

/// Best chain found by penalized descent from `opts.restarts` random
/// starting points. The result is an achievable value (an upper bound on
/// the minimum sum-rate) and is only marked certified when it meets a
/// lower bound. Output depends only on the inputs and `opts.seed`, not on
/// thread scheduling.
pub fn min_sum_rate_penalty(
    problem: &SumRateProblem,
    t: usize,
    opts: &PenaltyOptions,
) -> Result<SumRateResult> {
    if !(1..=MAX_MESSAGES).contains(&t) {
        return Err(Error::Domain(format!(
            "penalty search supports 1 <= t <= {MAX_MESSAGES}, got {t}"
        )));
    }
    if !(opts.mu_start > 0.0 && opts.mu_factor > 1.0 && opts.mu_end >= opts.mu_start) {
        return Err(Error::Domain(
            "penalty schedule needs 0 < mu_start <= mu_end and mu_factor > 1".into(),
        ));
    }
    let caps = problem.resolve_caps(t, opts.caps.as_deref())?;
    let oriented = problem.oriented()?;
    let layout = Layout::new(&oriented, &caps)?;

    let mut candidates: Vec<Candidate> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| restart(&layout, opts, r))
        .collect();

    let mut best_index = None;
    for (i, c) in candidates.iter().enumerate() {
        if best_index.is_none_or(|b: usize| c.better_than(&candidates[b])) {
            best_index = Some(i);
        }
    }
    let mut chosen = match best_index {
        Some(i) => {
            let c = candidates.swap_remove(i);
            let chain = problem.unorient(to_chain(&oriented, &layout, &c.q)?);
            Some((chain, c.feasible()))
        }
        None => None,
    };

    if let Some(warm) = &opts.warm_start {
        let mut padded = warm.clone();
        if padded.start() != problem.start() || padded.t() > t {
            return Err(Error::InvalidChain(format!(
                "warm start must start at {:?} with at most {t} messages",
                problem.start()
            )));
        }
        while padded.t() < t {
            padded = padded.padded();
        }
        let eval = problem.evaluate(&padded)?;
        let replace = match &chosen {
            None => true,
            Some((chain, feasible)) => {
                let current = problem.evaluate(chain)?;
                eval.is_feasible(FEASIBILITY_TOL) && (!feasible || eval.sum <= current.sum)
            }
        };
        if replace {
            chosen = Some((padded, eval.is_feasible(FEASIBILITY_TOL)));
        }
    }

    let (chain, _) =
        chosen.ok_or_else(|| Error::Domain("penalty search needs at least one restart".into()))?;
    finish(
        problem,
        t,
        chain,
        Status::Feasible,
        Method::Penalty,
        opts.restarts as u64,
    )
}

/// Runs the search for `t = 1, ..., t_max`, warm-starting each `t` from the
/// result at `t - 1`, so the reported values never increase with `t`.
pub fn min_sum_rate_penalty_ladder(
    problem: &SumRateProblem,
    t_max: usize,
    opts: &PenaltyOptions,
) -> Result<Vec<SumRateResult>> {
    let mut out: Vec<SumRateResult> = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let mut o = opts.clone();
        o.caps = opts.caps.as_ref().map(|c| c[..t].to_vec());
        if let Some(prev) = out.last().filter(|r| r.is_feasible()) {
            o.warm_start = Some(prev.chain.clone());
        }
        out.push(min_sum_rate_penalty(problem, t, &o)?);
    }
    Ok(out)
}

/// Candidate generator used by tests: a random chain of the given sizes.
#[cfg(test)]
pub(crate) fn random_chain(
    start: Location,
    nx: usize,
    ny: usize,
    sizes: &[usize],
    seed: u64,
) -> AuxChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AuxChain::from_fn(start, nx, ny, sizes.to_vec(), |j, _, _| {
        let raw: Vec<f64> = (0..sizes[j]).map(|_| rng.random_range(0.0..1.0)).collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / z).collect()
    })
    .unwrap()
}
