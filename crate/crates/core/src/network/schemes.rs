//! Rates of explicit multiterminal schemes and the cut-set programs they
//! are compared against.

use serde::Serialize;

use super::cutset::{binary_cut_sum_bound, cutset_lp_optimum, CutSelection, CutSumBound};
use super::lp::LpStatus;
use super::spec::NetworkSpec;
use crate::error::{check_probability, Error, Result};
use crate::info::{
    bernoulli_product, conditional_entropy, dsbs, entropy, h2, Bits, FunctionTable, JointPmf,
};

/// `3 + log2 e`, the size-independent ceiling on the star scheme with fair
/// coins.
pub const STAR_RATE_CEILING: Bits = 3.0 + std::f64::consts::LOG2_E;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkRate {
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub rate: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeReport {
    pub name: String,
    pub links: Vec<LinkRate>,
    pub sum: Bits,
}

impl SchemeReport {
    fn new(name: &str, links: Vec<LinkRate>) -> Self {
        let sum = links.iter().map(|l| l.rate).sum();
        SchemeReport {
            name: name.to_string(),
            links,
            sum,
        }
    }
}

/// Nodes 0 and 1 observe a doubly symmetric binary source with crossover
/// `p`; node 2 observes nothing and wants `f(X_0, X_1)`; all links exist.
pub fn three_node_network(p: f64, f: &FunctionTable) -> Result<NetworkSpec> {
    f.require_two_axes(2, 2, "f")?;
    let src = dsbs(p)?;
    let joint = JointPmf::new(vec![2, 2, 1], src.probs().to_vec())?;
    let zero = FunctionTable::constant(vec![2, 2, 1], 0)?;
    let f3 = FunctionTable::from_fn(vec![2, 2, 1], f.range_size(), |x| f.eval2(x[0], x[1]))?;
    NetworkSpec::complete(joint, vec![zero.clone(), zero, f3])
}

fn lp_value(net: &NetworkSpec, extra: &[CutSumBound]) -> Result<Bits> {
    let (_, sol) = cutset_lp_optimum(net, &CutSelection::All, extra)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        s => Err(Error::InvalidNetwork(format!("cut-set program is {s:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KornerMartonReport {
    pub scheme: SchemeReport,
    /// Cut-set optimum over all links and all cuts.
    pub lp_optimum: Bits,
    /// The scheme meets the cut-set optimum within 1e-7.
    pub optimal: bool,
}

/// Both sources send `X_0 XOR X_1` at rate `h2(p)` to node 2 in one round.
pub fn korner_marton_rates(p: f64) -> Result<KornerMartonReport> {
    check_probability("p", p)?;
    let scheme = SchemeReport::new(
        "many-to-one",
        vec![
            LinkRate {
                round: 1,
                from: 0,
                to: 2,
                rate: h2(p),
            },
            LinkRate {
                round: 1,
                from: 1,
                to: 2,
                rate: h2(p),
            },
        ],
    );
    let lp_optimum = lp_value(&three_node_network(p, &FunctionTable::xor2())?, &[])?;
    let optimal = (scheme.sum - lp_optimum).abs() <= 1e-7;
    Ok(KornerMartonReport {
        scheme,
        lp_optimum,
        optimal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayReport {
    pub scheme: SchemeReport,
    /// Cut-set optimum over all links and all cuts.
    pub lp_optimum: Bits,
    /// Cut-set optimum when nodes 0 and 1 talk only to node 2, with the
    /// binary-source sum bound on the cuts around nodes 0 and 1.
    pub many_to_one_bound: Bits,
    /// `h2(p) + h2(p)`, the many-to-one rate for XOR and AND.
    pub two_h2: Bits,
    /// `sum - two_h2`.
    pub gap: Bits,
}

/// Node 0 conveys `X_0` to node 1 at rate `H(X_0 | X_1)`; node 1 computes
/// `f` and forwards it to node 2 at rate `H(f(X_0, X_1))`.
pub fn relay_scheme_rates(p: f64, f: &FunctionTable) -> Result<RelayReport> {
    check_probability("p", p)?;
    let net = three_node_network(p, f)?;
    let src = dsbs(p)?;
    let with_f = src.augment(f.range_size(), |x| f.eval2(x[0], x[1]))?;
    let scheme = SchemeReport::new(
        "relay",
        vec![
            LinkRate {
                round: 1,
                from: 0,
                to: 1,
                rate: conditional_entropy(&src, &[0], &[1])?,
            },
            LinkRate {
                round: 2,
                from: 1,
                to: 2,
                rate: entropy(&with_f, &[2])?,
            },
        ],
    );
    let lp_optimum = lp_value(&net, &[])?;
    let many_to_one = net.with_edges(vec![(0, 2), (2, 0), (1, 2), (2, 1)])?;
    let mut extra = Vec::new();
    for s in [vec![0], vec![1]] {
        match binary_cut_sum_bound(&many_to_one, &s) {
            Ok(bound) => extra.push(CutSumBound { s, bound }),
            Err(Error::NotApplicable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let many_to_one_bound = lp_value(&many_to_one, &extra)?;
    let two_h2 = 2.0 * h2(p);
    Ok(RelayReport {
        gap: scheme.sum - two_h2,
        scheme,
        lp_optimum,
        many_to_one_bound,
        two_h2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarReport {
    pub m: usize,
    pub scheme: SchemeReport,
    /// One-round rate of every leaf sending its source to the center.
    pub baseline: Bits,
    /// `3 + log2 e`.
    pub ceiling: Bits,
    pub below_ceiling: bool,
    pub below_baseline: bool,
}

/// Star with center 0 wanting the minimum of `m` independent bits,
/// `params[j] = P(X_j = 1)`. In round `2i - 1` the center sends the running
/// minimum of `X_0..X_{i-1}` to leaf `i`; in round `2i` the leaf returns the
/// minimum including its own bit.
pub fn star_interactive_rates(m: usize, params: &[f64]) -> Result<StarReport> {
    if m < 3 {
        return Err(Error::InvalidNetwork(format!(
            "a star needs at least 3 nodes, got {m}"
        )));
    }
    if params.len() != m {
        return Err(Error::Shape(format!(
            "{} parameters for {m} nodes",
            params.len()
        )));
    }
    for (j, &q) in params.iter().enumerate() {
        check_probability(&format!("params[{j}]"), q)?;
    }
    let mut links = Vec::with_capacity(2 * (m - 1));
    let mut alive = params[0];
    for i in 1..m {
        links.push(LinkRate {
            round: 2 * i - 1,
            from: 0,
            to: i,
            rate: h2(alive),
        });
        links.push(LinkRate {
            round: 2 * i,
            from: i,
            to: 0,
            rate: alive * h2(params[i]),
        });
        alive *= params[i];
    }
    let scheme = SchemeReport::new("interactive star", links);
    let baseline = params[1..].iter().map(|&q| h2(q)).sum();
    Ok(StarReport {
        m,
        below_ceiling: scheme.sum < STAR_RATE_CEILING,
        below_baseline: scheme.sum < baseline,
        scheme,
        baseline,
        ceiling: STAR_RATE_CEILING,
    })
}

/// The star as a network: center 0 wants the minimum, leaves want nothing,
/// links run both ways between the center and each leaf.
pub fn star_network(params: &[f64]) -> Result<NetworkSpec> {
    let joint = bernoulli_product(params)?;
    let m = params.len();
    let axes = vec![2; m];
    let mut functions = vec![FunctionTable::from_fn(axes.clone(), 2, |x| {
        *x.iter().min().unwrap()
    })?];
    for _ in 1..m {
        functions.push(FunctionTable::constant(axes.clone(), 0)?);
    }
    let edges = (1..m).flat_map(|j| [(0, j), (j, 0)]).collect();
    NetworkSpec::new(joint, edges, functions)
}
