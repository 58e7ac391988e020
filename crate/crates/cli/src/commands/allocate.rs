use serde::Deserialize;
use serde_json::{json, Map, Value};

use intercomp::allocation::{
    closed_form_infinite_rate, integral_sum_rate, region_split, staircase_rates, two_message_rate,
};
use intercomp::sum_rate::theorem4_bound;
use intercomp::{Partition, RateAllocationCurve};

use crate::error::{CliError, ValidateField};
use crate::input::decode;
use crate::report::{to_json, Report};
use crate::{Outcome, Settings};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CurveSpec {
    /// `"optimal"` or `"diagonal"`.
    Named(String),
    Vertices(Vec<(f64, f64)>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PartitionSpec {
    Points(Vec<f64>),
    /// `"uniform:t"` with `t` an even number of messages.
    Uniform(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocateInput {
    p: f64,
    q: f64,
    curve: Option<CurveSpec>,
    partition: Option<PartitionSpec>,
}

fn parse_partition(spec: Option<&PartitionSpec>) -> Result<Partition, CliError> {
    match spec {
        None => Partition::uniform(1).field("partition"),
        Some(PartitionSpec::Points(points)) => Partition::new(points.clone()).field("partition"),
        Some(PartitionSpec::Uniform(s)) => {
            let t: usize = s
                .strip_prefix("uniform:")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| {
                    CliError::invalid(
                        "partition",
                        format!("expected a list of points or \"uniform:t\", got \"{s}\""),
                    )
                })?;
            if t == 0 || t % 2 != 0 {
                return Err(CliError::invalid(
                    "partition",
                    format!(
                        "uniform staircases have an even, positive number of messages, got {t}"
                    ),
                ));
            }
            Partition::uniform(t / 2).field("partition")
        }
    }
}

pub fn run(payload: Map<String, Value>, _settings: Settings) -> Result<Outcome, CliError> {
    let input: AllocateInput = decode(&payload)?;
    let (p, q) = (input.p, input.q);
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(CliError::invalid(
                name,
                format!("must lie strictly inside (0, 1), got {v}"),
            ));
        }
    }
    let (curve, curve_name) = match &input.curve {
        None => (RateAllocationCurve::optimal(p, q), "optimal".to_string()),
        Some(CurveSpec::Named(n)) if n == "optimal" => {
            (RateAllocationCurve::optimal(p, q), n.clone())
        }
        Some(CurveSpec::Named(n)) if n == "diagonal" => {
            (RateAllocationCurve::diagonal(p, q), n.clone())
        }
        Some(CurveSpec::Named(n)) => {
            return Err(CliError::invalid(
                "curve",
                format!("expected \"optimal\", \"diagonal\" or a vertex list, got \"{n}\""),
            ))
        }
        Some(CurveSpec::Vertices(v)) => (
            RateAllocationCurve::new(p, q, v.clone()),
            "vertices".to_string(),
        ),
    };
    let curve = curve.field("curve")?;
    let partition = parse_partition(input.partition.as_ref())?;
    let rates = staircase_rates(&curve, &partition)?;
    let sum: f64 = rates.iter().sum();
    let regions = region_split(&curve);
    let results = json!({
        "curve": { "kind": curve_name, "vertices": curve.vertices() },
        "partition": partition.points(),
        "t": partition.messages(),
        "rates": rates,
        "sum": sum,
        "integral": integral_sum_rate(&curve)?,
        "closed_form": closed_form_infinite_rate(p, q)?,
        "theorem4_bound": theorem4_bound(p, q)?,
        "two_message_rate": two_message_rate(p, q)?,
        "regions": to_json(&regions)?,
    });
    Ok(Outcome {
        report: Report {
            kind: "allocate",
            inputs: Value::Object(payload),
            results,
            provenance: json!({
                "rates": "exact antiderivative differences per staircase step",
                "integral": "adaptive Simpson along the curve with the antiderivative on the last 1e-6 before a singular endpoint",
                "closed_form": "value of the integral on the optimal curve",
            }),
        },
        ok: true,
    })
}
