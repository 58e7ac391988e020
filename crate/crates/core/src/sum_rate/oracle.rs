//! Exhaustive search over deterministic chains with at most two messages.

use super::bounds::lower_bounds;
use super::chain::{AuxChain, Location};
use super::problem::SumRateProblem;
use super::result::{Method, Status, SumRateResult, CERTIFY_TOL, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::info::SUPPORT_EPS;

/// Largest raw search space, counted as all maps into the capped alphabets.
pub const MAX_CANDIDATES: f64 = 1e7;

/// Improvements smaller than this do not replace the incumbent, so the
/// first witness in enumeration order wins ties.
const TIE_TOL: f64 = 1e-12;

/// Calls `visit` for every restricted-growth string of length `n` with
/// labels below `cap`, in lexicographic order. These are the canonical
/// representatives of maps into `cap` labels up to relabeling.
fn for_each_canonical(n: usize, cap: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        pos: usize,
        max_used: usize,
        cap: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pos == cur.len() {
            visit(cur);
            return;
        }
        let limit = if pos == 0 { 1 } else { (max_used + 2).min(cap) };
        for v in 0..limit {
            cur[pos] = v;
            rec(pos + 1, max_used.max(v), cap, cur, visit);
        }
    }
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut cur = vec![0; n];
    rec(0, 0, cap, &mut cur, visit);
}

/// Scores one labeling `u(x, y)` of the source cells.
struct Scorer<'a> {
    nx: usize,
    ny: usize,
    probs: &'a [f64],
    fa: &'a [usize],
    fb: &'a [usize],
    labels: usize,
    pxu: Vec<f64>,
    pyu: Vec<f64>,
    za: Vec<usize>,
    zb: Vec<usize>,
    px: Vec<f64>,
    py: Vec<f64>,
}

const UNSET: usize = usize::MAX;

impl<'a> Scorer<'a> {
    fn new(problem: &'a SumRateProblem, labels: usize) -> Self {
        let (nx, ny) = (problem.x_size(), problem.y_size());
        let probs = problem.pmf().probs();
        let mut px = vec![0.0; nx];
        let mut py = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                px[x] += probs[x * ny + y];
                py[y] += probs[x * ny + y];
            }
        }
        Scorer {
            nx,
            ny,
            probs,
            fa: problem.f_a().values(),
            fb: problem.f_b().values(),
            labels,
            pxu: vec![0.0; nx * labels],
            pyu: vec![0.0; ny * labels],
            za: vec![UNSET; nx * labels],
            zb: vec![UNSET; ny * labels],
            px,
            py,
        }
    }

    /// Sum-rate `H(U|Y) + H(U|X)` when both terminals can decode, else
    /// `None`.
    fn score(&mut self, label: impl Fn(usize, usize) -> usize) -> Option<f64> {
        let k = self.labels;
        self.pxu.iter_mut().for_each(|v| *v = 0.0);
        self.pyu.iter_mut().for_each(|v| *v = 0.0);
        self.za.iter_mut().for_each(|v| *v = UNSET);
        self.zb.iter_mut().for_each(|v| *v = UNSET);
        for x in 0..self.nx {
            for y in 0..self.ny {
                let c = x * self.ny + y;
                let p = self.probs[c];
                if p <= SUPPORT_EPS {
                    continue;
                }
                let u = label(x, y);
                let (ia, ib) = (x * k + u, y * k + u);
                for (slot, z) in [
                    (&mut self.za[ia], self.fa[c]),
                    (&mut self.zb[ib], self.fb[c]),
                ] {
                    if *slot == UNSET {
                        *slot = z;
                    } else if *slot != z {
                        return None;
                    }
                }
                self.pxu[ia] += p;
                self.pyu[ib] += p;
            }
        }
        let cond = |joint: &[f64], marg: &[f64]| -> f64 {
            joint
                .chunks(k)
                .zip(marg)
                .map(|(row, &m)| {
                    row.iter()
                        .filter(|&&v| v > 0.0 && v < m)
                        .map(|&v| v * (m / v).log2())
                        .sum::<f64>()
                })
                .sum()
        };
        Some(cond(&self.pyu, &self.py) + cond(&self.pxu, &self.px))
    }
}

/// Minimum sum-rate over deterministic chains `u_j = g_j(own, u^{j-1})`
/// with `t <= 2` messages and `|U_j| <= caps[j]`.
///
/// The value is achievable, hence an upper bound on the true minimum; it
/// is marked certified when it meets one of the lower bounds.
pub fn min_sum_rate_bruteforce(
    problem: &SumRateProblem,
    t: usize,
    caps: Option<&[usize]>,
) -> Result<SumRateResult> {
    if !(1..=2).contains(&t) {
        return Err(Error::Domain(format!(
            "brute-force search supports t = 1 or 2, got {t}"
        )));
    }
    let caps = problem.resolve_caps(t, caps)?;
    let oriented = problem.oriented()?;
    let (n1, n2) = (oriented.x_size(), oriented.y_size());
    let raw = (caps[0] as f64).powi(n1 as i32)
        * if t == 2 {
            (caps[1] as f64).powi((n2 * caps[0]) as i32)
        } else {
            1.0
        };
    if raw > MAX_CANDIDATES {
        return Err(Error::Capacity(format!(
            "{raw:.3e} candidate chains exceed the limit of {MAX_CANDIDATES:.0e}"
        )));
    }

    let c1 = caps[0];
    let c2 = if t == 2 { caps[1] } else { 1 };
    let mut scorer = Scorer::new(&oriented, c1 * c2);
    let mut best: Option<(f64, Vec<usize>, Vec<Vec<usize>>)> = None;
    let mut evaluated = 0u64;
    let mut options = Vec::new();
    if t == 2 {
        for_each_canonical(n2, c2, &mut |m| options.push(m.to_vec()));
    }
    for_each_canonical(n1, c1, &mut |g1| {
        let used = g1.iter().max().map_or(0, |m| m + 1);
        if t == 1 {
            evaluated += 1;
            if let Some(v) = scorer.score(|x, _| g1[x]) {
                if best.as_ref().is_none_or(|b| v < b.0 - TIE_TOL) {
                    best = Some((v, g1.to_vec(), Vec::new()));
                }
            }
            return;
        }
        // Second message: one canonical map of y per used value of u1,
        // enumerated as an odometer over the per-block choices.
        let mut choice = vec![0usize; used];
        loop {
            evaluated += 1;
            let score = scorer.score(|x, y| {
                let u1 = g1[x];
                u1 * c2 + options[choice[u1]][y]
            });
            if let Some(v) = score {
                if best.as_ref().is_none_or(|b| v < b.0 - TIE_TOL) {
                    let g2 = (0..c1)
                        .map(|u1| {
                            if u1 < used {
                                options[choice[u1]].clone()
                            } else {
                                vec![0; n2]
                            }
                        })
                        .collect();
                    best = Some((v, g1.to_vec(), g2));
                }
            }
            let mut pos = used;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < options.len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    });

    let (status, chain) = match best {
        Some((_, g1, g2)) => {
            let s1 = g1.iter().max().map_or(1, |m| m + 1);
            let mut sizes = vec![s1];
            if t == 2 {
                sizes.push(g2.iter().flatten().max().map_or(1, |m| m + 1));
            }
            let chain = AuxChain::deterministic(Location::A, n1, n2, sizes, |j, own, u| {
                if j == 0 {
                    g1[own]
                } else {
                    g2[u[0]][own]
                }
            })?;
            (Status::Feasible, chain)
        }
        None => (Status::Infeasible, AuxChain::null(Location::A, n1, n2, t)),
    };
    let chain = problem.unorient(chain);
    finish(problem, t, chain, status, Method::BruteForce, evaluated)
}

/// Evaluates a chain with the public measures and attaches bounds.
pub(crate) fn finish(
    problem: &SumRateProblem,
    t: usize,
    chain: AuxChain,
    status: Status,
    method: Method,
    evaluated: u64,
) -> Result<SumRateResult> {
    let eval = problem.evaluate(&chain)?;
    let lower_bounds = lower_bounds(problem, t)?;
    let best_lower_bound = lower_bounds.best();
    let status = if status == Status::Feasible && eval.is_feasible(FEASIBILITY_TOL) {
        Status::Feasible
    } else {
        Status::Infeasible
    };
    let certified = status == Status::Feasible && eval.sum <= best_lower_bound + CERTIFY_TOL;
    Ok(SumRateResult {
        t,
        achieved: eval.sum,
        rates: eval.rates,
        residuals: eval.residuals,
        lower_bounds,
        best_lower_bound,
        certified,
        status,
        method,
        evaluated,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{dsbs, h2, FunctionTable, JointPmf};

    fn canonical_count(n: usize, cap: usize) -> usize {
        let mut c = 0;
        for_each_canonical(n, cap, &mut |_| c += 1);
        c
    }

    #[test]
    fn canonical_strings() {
        // Bell numbers, truncated by the cap.
        assert_eq!(canonical_count(3, 3), 5);
        assert_eq!(canonical_count(4, 4), 15);
        assert_eq!(canonical_count(4, 2), 8);
        let mut seen = Vec::new();
        for_each_canonical(3, 2, &mut |g| seen.push(g.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]
        );
    }

    #[test]
    fn xor_one_message() {
        let p = 0.3;
        let prob = SumRateProblem::new(
            dsbs(p).unwrap(),
            FunctionTable::zero2(),
            FunctionTable::xor2(),
            Location::A,
        )
        .unwrap();
        let r = min_sum_rate_bruteforce(&prob, 1, None).unwrap();
        assert!((r.achieved - h2(p)).abs() < 1e-12);
        assert!(r.certified);
        assert!((r.achieved - 0.881291).abs() < 1e-6);
    }

    #[test]
    fn and_two_messages() {
        let p = 0.3;
        let and = FunctionTable::and2();
        let prob = SumRateProblem::new(dsbs(p).unwrap(), and.clone(), and, Location::A).unwrap();
        let r = min_sum_rate_bruteforce(&prob, 2, None).unwrap();
        assert!((r.achieved - 1.5 * h2(p)).abs() < 1e-9, "{}", r.achieved);
        assert!((r.achieved - 1.321936).abs() < 1e-6);
    }

    #[test]
    fn product_function_one_and_two_messages() {
        let p = 0.1;
        let pmf = JointPmf::product(&[vec![0.25; 4], vec![1.0 - p, p]]).unwrap();
        let f_a = FunctionTable::constant(vec![4, 2], 0).unwrap();
        let f_b = FunctionTable::from_fn(vec![4, 2], 5, |i| (i[0] + 1) * i[1]).unwrap();
        let one = SumRateProblem::new(pmf.clone(), f_a.clone(), f_b.clone(), Location::A).unwrap();
        let r1 = min_sum_rate_bruteforce(&one, 1, None).unwrap();
        assert!((r1.achieved - 2.0).abs() < 1e-12);
        assert!(r1.certified);
        let two = SumRateProblem::new(pmf, f_a, f_b, Location::B).unwrap();
        let r2 = min_sum_rate_bruteforce(&two, 2, Some(&[2, 4])).unwrap();
        assert!(
            (r2.achieved - (h2(p) + 0.2)).abs() < 1e-9,
            "{}",
            r2.achieved
        );
        assert_eq!(r2.chain.start(), Location::B);
    }

    #[test]
    fn nothing_to_send() {
        let u = JointPmf::uniform(vec![2, 2]).unwrap();
        let prob = SumRateProblem::new(
            u,
            FunctionTable::zero2(),
            FunctionTable::second(2, 2).unwrap(),
            Location::A,
        )
        .unwrap();
        let r = min_sum_rate_bruteforce(&prob, 1, None).unwrap();
        assert_eq!(r.achieved, 0.0);
        assert_eq!(r.chain.sizes(), &[1]);
        assert!(r.certified);
    }

    #[test]
    fn capacity_and_domain() {
        let u = JointPmf::uniform(vec![8, 8]).unwrap();
        let f = FunctionTable::first(8, 8).unwrap();
        let prob = SumRateProblem::new(u, f.clone(), f, Location::A).unwrap();
        assert!(matches!(
            min_sum_rate_bruteforce(&prob, 2, Some(&[4, 4])),
            Err(Error::Capacity(_))
        ));
        assert!(min_sum_rate_bruteforce(&prob, 3, None).is_err());
    }

    #[test]
    fn infeasible_when_caps_too_small() {
        let u = JointPmf::uniform(vec![3, 2]).unwrap();
        let prob = SumRateProblem::new(
            u,
            FunctionTable::constant(vec![3, 2], 0).unwrap(),
            FunctionTable::first(3, 2).unwrap(),
            Location::A,
        )
        .unwrap();
        let r = min_sum_rate_bruteforce(&prob, 1, Some(&[2])).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(!r.certified);
    }
}
