use serde::Deserialize;
use serde_json::{json, Map, Value};

use intercomp::info::{bernoulli_product, dsbs};
use intercomp::network::{
    cut_entropy_bounds, cutset_lp_optimum, korner_marton_rates, relay_scheme_rates,
    star_interactive_rates, star_network, CutSelection, CutSumBound, LpStatus, MAX_CUT_NODES,
};
use intercomp::{FunctionTable, JointPmf, NetworkSpec};

use crate::error::{CliError, ValidateField};
use crate::input::decode;
use crate::report::{to_json, Report};
use crate::{Outcome, Settings};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EdgesSpec {
    /// `"complete"`.
    Named(String),
    List(Vec<(usize, usize)>),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Generator {
    Dsbs { p: f64 },
    BernoulliProduct { params: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FunctionSpec {
    Table(FunctionTable),
    /// `"none"`: the node wants nothing.
    Named(String),
    /// `op` over the sources of the nodes in `of` (default: every node with
    /// a nontrivial source).
    Op {
        op: String,
        of: Option<Vec<usize>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CutsSpec {
    /// `"all"`.
    Named(String),
    List(Vec<Vec<usize>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraBound {
    s: Vec<usize>,
    bound: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SchemeSpec {
    KornerMarton { p: f64 },
    Relay { p: f64, function: String },
    Star { m: usize, params: Option<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkInput {
    nodes: usize,
    edges: Option<EdgesSpec>,
    joint: Option<JointPmf>,
    generator: Option<Generator>,
    functions: Vec<FunctionSpec>,
    cuts: Option<CutsSpec>,
    #[serde(default)]
    extra_cut_bounds: Vec<ExtraBound>,
    #[serde(default)]
    schemes: Vec<SchemeSpec>,
}

fn build_joint(input: &NetworkInput) -> Result<JointPmf, CliError> {
    let m = input.nodes;
    match (&input.joint, &input.generator) {
        (Some(_), Some(_)) => Err(CliError::invalid(
            "generator",
            "give either joint or generator, not both",
        )),
        (None, None) => Err(CliError::invalid(
            "joint",
            "missing; give joint or generator",
        )),
        (Some(j), None) => {
            if j.num_axes() != m {
                return Err(CliError::invalid(
                    "joint",
                    format!("{} axes for {m} nodes", j.num_axes()),
                ));
            }
            Ok(j.clone())
        }
        (None, Some(g)) => {
            let src = match g {
                Generator::Dsbs { p } => dsbs(*p),
                Generator::BernoulliProduct { params } => bernoulli_product(params),
            }
            .field("generator")?;
            let k = src.num_axes();
            if k > m {
                return Err(CliError::invalid(
                    "generator",
                    format!("generates {k} sources for {m} nodes"),
                ));
            }
            // Nodes beyond the generated sources observe a constant.
            let mut axes = src.axes().to_vec();
            axes.resize(m, 1);
            JointPmf::new(axes, src.probs().to_vec()).field("generator")
        }
    }
}

const OPS: [&str; 6] = ["xor", "sum", "and", "or", "min", "max"];

fn apply_op(op: &str, values: &[usize]) -> usize {
    match op {
        "xor" => values.iter().sum::<usize>() % 2,
        "sum" => values.iter().sum(),
        "and" => usize::from(values.iter().all(|&v| v > 0)),
        "or" => usize::from(values.iter().any(|&v| v > 0)),
        "min" => values.iter().copied().min().unwrap_or(0),
        _ => values.iter().copied().max().unwrap_or(0),
    }
}

fn op_range(op: &str, sizes: &[usize]) -> usize {
    match op {
        "xor" | "and" | "or" => 2,
        "sum" => sizes.iter().map(|s| s - 1).sum::<usize>() + 1,
        _ => sizes.iter().copied().max().unwrap_or(1),
    }
}

fn build_function(
    spec: &FunctionSpec,
    axes: &[usize],
    field: &str,
) -> Result<FunctionTable, CliError> {
    match spec {
        FunctionSpec::Table(t) => {
            if t.domain_axes() != axes {
                return Err(CliError::invalid(
                    field,
                    format!(
                        "domain {:?} does not match node alphabets {axes:?}",
                        t.domain_axes()
                    ),
                ));
            }
            Ok(t.clone())
        }
        FunctionSpec::Named(n) if n == "none" => {
            FunctionTable::constant(axes.to_vec(), 0).field(field)
        }
        FunctionSpec::Named(n) => Err(CliError::invalid(
            field,
            format!("unknown function \"{n}\"; use \"none\", a table or {{\"op\": ...}}"),
        )),
        FunctionSpec::Op { op, of } => {
            let nodes: Vec<usize> = of
                .clone()
                .unwrap_or_else(|| (0..axes.len()).filter(|&j| axes[j] > 1).collect());
            if let Some(&bad) = nodes.iter().find(|&&j| j >= axes.len()) {
                return Err(CliError::invalid(
                    field,
                    format!("node {bad} is outside 0..{}", axes.len()),
                ));
            }
            let sizes: Vec<usize> = nodes.iter().map(|&j| axes[j]).collect();
            if !OPS.contains(&op.as_str()) {
                return Err(CliError::invalid(
                    field,
                    format!("unknown op \"{op}\"; use xor, sum, and, or, min or max"),
                ));
            }
            let range = op_range(op, &sizes);
            FunctionTable::from_fn(axes.to_vec(), range, |x| {
                let vals: Vec<usize> = nodes.iter().map(|&j| x[j]).collect();
                apply_op(op, &vals)
            })
            .field(field)
        }
    }
}

fn relay_function(name: &str) -> Option<FunctionTable> {
    match name {
        "and" => Some(FunctionTable::and2()),
        "xor" => Some(FunctionTable::xor2()),
        "or" => Some(FunctionTable::or2()),
        _ => None,
    }
}

pub fn run(payload: Map<String, Value>, _settings: Settings) -> Result<Outcome, CliError> {
    let input: NetworkInput = decode(&payload)?;
    let m = input.nodes;
    if m < 2 {
        return Err(CliError::invalid(
            "nodes",
            "a network needs at least two nodes",
        ));
    }
    let joint = build_joint(&input)?;
    if input.functions.len() != m {
        return Err(CliError::invalid(
            "functions",
            format!("{} functions for {m} nodes", input.functions.len()),
        ));
    }
    let functions = input
        .functions
        .iter()
        .enumerate()
        .map(|(j, f)| build_function(f, joint.axes(), &format!("functions[{j}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let net = match &input.edges {
        None => NetworkSpec::complete(joint, functions),
        Some(EdgesSpec::Named(n)) if n == "complete" => NetworkSpec::complete(joint, functions),
        Some(EdgesSpec::Named(n)) => {
            return Err(CliError::invalid(
                "edges",
                format!("expected \"complete\" or a list of pairs, got \"{n}\""),
            ))
        }
        Some(EdgesSpec::List(e)) => NetworkSpec::new(joint, e.clone(), functions),
    }
    .field("edges")?;

    let cuts = match &input.cuts {
        None => CutSelection::All,
        Some(CutsSpec::Named(n)) if n == "all" => CutSelection::All,
        Some(CutsSpec::Named(n)) => {
            return Err(CliError::invalid(
                "cuts",
                format!("expected \"all\" or a list of node sets, got \"{n}\""),
            ))
        }
        Some(CutsSpec::List(list)) => {
            for (i, s) in list.iter().enumerate() {
                net.cut_side(s).field(&format!("cuts[{i}]"))?;
            }
            CutSelection::List(list.clone())
        }
    };
    if cuts == CutSelection::All && m > MAX_CUT_NODES {
        return Err(CliError::invalid(
            "cuts",
            format!("\"all\" needs at most {MAX_CUT_NODES} nodes; list the cuts instead"),
        ));
    }
    let mut extra = Vec::new();
    for (i, e) in input.extra_cut_bounds.iter().enumerate() {
        net.cut_side(&e.s)
            .field(&format!("extra_cut_bounds[{i}].s"))?;
        if !e.bound.is_finite() {
            return Err(CliError::invalid(
                format!("extra_cut_bounds[{i}].bound"),
                "must be finite",
            ));
        }
        extra.push(CutSumBound {
            s: e.s.clone(),
            bound: e.bound,
        });
    }

    let (lp, sol) = cutset_lp_optimum(&net, &cuts, &extra)?;
    let rates: Map<String, Value> = lp
        .variables
        .iter()
        .zip(&sol.values)
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    let listed: Vec<Vec<usize>> = match &cuts {
        CutSelection::List(l) => l.clone(),
        CutSelection::All => (1u32..(1 << m) - 1)
            .filter(|mask| mask & 1 == 1)
            .map(|mask| (0..m).filter(|&j| mask >> j & 1 == 1).collect())
            .collect(),
    };
    let mut cut_bounds = Vec::with_capacity(listed.len());
    for s in &listed {
        let b = cut_entropy_bounds(&net, s)?;
        cut_bounds.push(
            json!({ "s": s, "into_complement": b.into_complement, "into_subset": b.into_subset }),
        );
    }

    let mut schemes = Map::new();
    let mut comparisons = Vec::new();
    for (i, s) in input.schemes.iter().enumerate() {
        let field = format!("schemes[{i}]");
        let (name, report, sum, reference) = match s {
            SchemeSpec::KornerMarton { p } => {
                let r = korner_marton_rates(*p).field(&field)?;
                (
                    format!("korner_marton[{i}]"),
                    to_json(&r)?,
                    r.scheme.sum,
                    Some(r.lp_optimum),
                )
            }
            SchemeSpec::Relay { p, function } => {
                let f = relay_function(function).ok_or_else(|| {
                    CliError::invalid(
                        format!("{field}.function"),
                        format!("expected and, xor or or, got \"{function}\""),
                    )
                })?;
                let r = relay_scheme_rates(*p, &f).field(&field)?;
                (
                    format!("relay[{i}]"),
                    to_json(&r)?,
                    r.scheme.sum,
                    Some(r.lp_optimum),
                )
            }
            SchemeSpec::Star { m, params } => {
                let params = params.clone().unwrap_or_else(|| vec![0.5; *m]);
                let r = star_interactive_rates(*m, &params).field(&field)?;
                let reference = if *m <= MAX_CUT_NODES {
                    let star = star_network(&params)?;
                    let (_, s) = cutset_lp_optimum(&star, &CutSelection::All, &[])?;
                    (s.status == LpStatus::Optimal).then_some(s.objective)
                } else {
                    None
                };
                (format!("star[{i}]"), to_json(&r)?, r.scheme.sum, reference)
            }
        };
        comparisons.push(json!({
            "scheme": name,
            "sum": sum,
            "scheme_network_lp_optimum": reference,
            "gap": reference.map(|r| sum - r),
        }));
        schemes.insert(name, report);
    }

    let results = json!({
        "network": { "nodes": m, "axes": net.joint().axes(), "edges": net.edges() },
        "lp": {
            "status": sol.status,
            "optimum": if sol.status == LpStatus::Optimal { json!(sol.objective) } else { Value::Null },
            "rates": rates,
            "constraints": lp.constraints.len(),
        },
        "cut_bounds": cut_bounds,
        "schemes": schemes,
        "comparisons": comparisons,
    });
    Ok(Outcome {
        report: Report {
            kind: "network",
            inputs: Value::Object(payload),
            results,
            provenance: json!({
                "lp": "dual two-phase tableau simplex with Bland's rule",
                "nodes": "numbered from 0",
            }),
        },
        ok: true,
    })
}
