use serde::Serialize;

use super::lp::{solve_lp, LpProblem, LpSolution};
use super::spec::{NetworkSpec, MAX_CUT_NODES};
use crate::error::{Error, Result};
use crate::info::{conditional_entropy, Bits};
use crate::sum_rate::{han_kobayashi_bound, theorem2_bound};

/// Conditional-entropy bounds for one cut `(S, S^c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutBounds {
    /// `R_{S,S^c} >= H(f_{S^c} | X_{S^c})`.
    pub into_complement: Bits,
    /// `R_{S^c,S} >= H(f_S | X_S)`.
    pub into_subset: Bits,
}

/// The two directional bounds across the cut with side `s`.
pub fn cut_entropy_bounds(net: &NetworkSpec, s: &[usize]) -> Result<CutBounds> {
    let g = net.group_cut(s)?;
    let with_fc = g.pmf.augment(g.f_complement.range_size(), |x| {
        g.f_complement.eval2(x[0], x[1])
    })?;
    let with_fs = g
        .pmf
        .augment(g.f_s.range_size(), |x| g.f_s.eval2(x[0], x[1]))?;
    Ok(CutBounds {
        into_complement: conditional_entropy(&with_fc, &[2], &[1])?,
        into_subset: conditional_entropy(&with_fs, &[2], &[0])?,
    })
}

/// One-message bound for the cut: if the side `s` speaks once and the
/// complement must compute its functions, the rate is at least
/// `H(X_S | X_{S^c})` whenever every pair of `X_S` values is separated by
/// the complement's functions for some `X_{S^c}` (full support required).
pub fn one_message_cut_bound(net: &NetworkSpec, s: &[usize]) -> Result<Bits> {
    let g = net.group_cut(s)?;
    han_kobayashi_bound(&g.pmf, &g.f_complement)
}

/// Binary-source bound on the total rate across the cut when `s` holds a
/// single binary source and only the complement's functions matter.
pub fn binary_cut_sum_bound(net: &NetworkSpec, s: &[usize]) -> Result<Bits> {
    let g = net.group_cut(s)?;
    theorem2_bound(&g.pmf, &g.f_complement)
}

/// Which cuts enter the program.
#[derive(Debug, Clone, PartialEq)]
pub enum CutSelection {
    /// Every proper nonempty subset (each unordered cut once).
    All,
    /// The listed sides.
    List(Vec<Vec<usize>>),
}

/// User-supplied lower bound on `R_{S,S^c} + R_{S^c,S}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSumBound {
    pub s: Vec<usize>,
    pub bound: Bits,
}

/// Variable label for link `(j, k)`.
pub fn rate_label(edge: (usize, usize)) -> String {
    format!("R[{}->{}]", edge.0, edge.1)
}

fn sides(net: &NetworkSpec, cuts: &CutSelection) -> Result<Vec<Vec<usize>>> {
    match cuts {
        CutSelection::All => {
            let m = net.m();
            if m > MAX_CUT_NODES {
                return Err(Error::Capacity(format!(
                    "enumerating all cuts needs at most {MAX_CUT_NODES} nodes, got {m}"
                )));
            }
            // Sides containing node 0 list every unordered cut once.
            Ok((1u32..(1 << m) - 1)
                .filter(|mask| mask & 1 == 1)
                .map(|mask| (0..m).filter(|&j| mask >> j & 1 == 1).collect())
                .collect())
        }
        CutSelection::List(list) => list.iter().map(|s| net.cut_side(s)).collect(),
    }
}

/// Cut-set program: minimize `Σ R_jk` over the links subject to both
/// directional entropy bounds of each selected cut, the extra sum bounds,
/// and `R >= 0`.
pub fn build_cutset_lp(
    net: &NetworkSpec,
    cuts: &CutSelection,
    extra: &[CutSumBound],
) -> Result<LpProblem> {
    let edges = net.edges();
    let mut lp = LpProblem::sum_objective(edges.iter().map(|&e| rate_label(e)).collect());
    let crossing = |from: &[usize], to: &[usize]| -> Vec<f64> {
        edges
            .iter()
            .map(|(a, b)| {
                if from.contains(a) && to.contains(b) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    for s in sides(net, cuts)? {
        let sc = net.complement(&s);
        let b = cut_entropy_bounds(net, &s)?;
        lp.push(
            format!("{s:?} -> {sc:?}"),
            crossing(&s, &sc),
            b.into_complement,
        );
        lp.push(format!("{sc:?} -> {s:?}"), crossing(&sc, &s), b.into_subset);
    }
    for e in extra {
        let s = net
            .cut_side(&e.s)
            .map_err(|err| Error::InvalidNetwork(format!("extra cut bound: {err}")))?;
        if !e.bound.is_finite() {
            return Err(Error::Domain(format!(
                "extra cut bound for {s:?} is not finite"
            )));
        }
        let sc = net.complement(&s);
        let coeffs = crossing(&s, &sc)
            .iter()
            .zip(crossing(&sc, &s))
            .map(|(a, b)| a + b)
            .collect();
        lp.push(format!("{s:?} <-> {sc:?}"), coeffs, e.bound);
    }
    Ok(lp)
}

/// Builds and solves the cut-set program.
pub fn cutset_lp_optimum(
    net: &NetworkSpec,
    cuts: &CutSelection,
    extra: &[CutSumBound],
) -> Result<(LpProblem, LpSolution)> {
    let lp = build_cutset_lp(net, cuts, extra)?;
    let sol = solve_lp(&lp)?;
    Ok((lp, sol))
}
