use serde::Deserialize;
use serde_json::{json, Map, Value};

use intercomp::info::{conditional_entropy, conditional_mutual_information, entropy};
use intercomp::JointPmf;

use crate::error::{CliError, ValidateField};
use crate::input::decode;
use crate::report::Report;
use crate::{Outcome, Settings};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InfoInput {
    pmf: JointPmf,
    #[serde(default)]
    queries: Vec<Query>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case", deny_unknown_fields)]
enum Query {
    Entropy {
        axes: Vec<usize>,
    },
    ConditionalEntropy {
        target: Vec<usize>,
        given: Vec<usize>,
    },
    MutualInformation {
        a: Vec<usize>,
        b: Vec<usize>,
        #[serde(default)]
        given: Vec<usize>,
    },
}

pub fn run(payload: Map<String, Value>, _settings: Settings) -> Result<Outcome, CliError> {
    let input: InfoInput = decode(&payload)?;
    let pmf = &input.pmf;
    let all: Vec<usize> = (0..pmf.num_axes()).collect();
    let marginals = all
        .iter()
        .map(|&i| entropy(pmf, &[i]))
        .collect::<intercomp::Result<Vec<_>>>()?;
    let mut results = json!({
        "axes": pmf.axes(),
        "joint_entropy": entropy(pmf, &all)?,
        "marginal_entropies": marginals,
        "full_support": pmf.has_full_support(),
    });
    if pmf.num_axes() == 2 {
        results["pair"] = json!({
            "h_x_given_y": conditional_entropy(pmf, &[0], &[1])?,
            "h_y_given_x": conditional_entropy(pmf, &[1], &[0])?,
            "mutual_information": conditional_mutual_information(pmf, &[0], &[1], &[])?,
        });
    }
    let mut answers = Vec::new();
    for (i, q) in input.queries.iter().enumerate() {
        let field = format!("queries[{i}]");
        let value = match q {
            Query::Entropy { axes } => entropy(pmf, axes).field(&field)?,
            Query::ConditionalEntropy { target, given } => {
                conditional_entropy(pmf, target, given).field(&field)?
            }
            Query::MutualInformation { a, b, given } => {
                conditional_mutual_information(pmf, a, b, given).field(&field)?
            }
        };
        answers.push(json!({ "query": payload["queries"][i], "value": value }));
    }
    results["queries"] = Value::Array(answers);
    Ok(Outcome {
        report: Report {
            kind: "info",
            inputs: Value::Object(payload),
            results,
            provenance: json!({ "units": "bits" }),
        },
        ok: true,
    })
}
