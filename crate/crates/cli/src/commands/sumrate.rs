use serde::Deserialize;
use serde_json::{json, Map, Value};

use intercomp::sum_rate::{
    min_sum_rate_bruteforce, min_sum_rate_penalty, Location, PenaltyOptions, SumRateProblem,
    SumRateResult, CERTIFY_TOL, MAX_MESSAGES,
};
use intercomp::{Error, FunctionTable, JointPmf};

use super::check_two_terminal;
use crate::error::{CliError, ValidateField};
use crate::input::decode;
use crate::report::{to_json, Report};
use crate::{Outcome, Settings};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MethodChoice {
    /// Exhaustive search where it fits, penalty search beyond.
    #[default]
    Auto,
    BruteForce,
    Penalty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SumRateInput {
    pmf: JointPmf,
    #[serde(rename = "f_A")]
    f_a: FunctionTable,
    #[serde(rename = "f_B")]
    f_b: FunctionTable,
    t: usize,
    #[serde(default = "default_location")]
    initial_location: Location,
    caps: Option<Vec<usize>>,
    seed: Option<u64>,
    #[serde(default)]
    method: MethodChoice,
    restarts: Option<usize>,
}

fn default_location() -> Location {
    Location::A
}

/// Brute force for `t <= 2` unless the search space is too large.
fn try_bruteforce(
    problem: &SumRateProblem,
    t: usize,
    caps: Option<&[usize]>,
) -> Result<Option<SumRateResult>, CliError> {
    if t > 2 {
        return Ok(None);
    }
    match min_sum_rate_bruteforce(problem, t, caps) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Capacity(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(payload: Map<String, Value>, settings: Settings) -> Result<Outcome, CliError> {
    let input: SumRateInput = decode(&payload)?;
    check_two_terminal(&input.pmf, &input.f_a, &input.f_b)?;
    let t = input.t;
    if t == 0 {
        return Err(CliError::invalid("t", "at least one message is needed"));
    }
    if input.method != MethodChoice::BruteForce && t > MAX_MESSAGES {
        return Err(CliError::invalid(
            "t",
            format!("the penalty search supports at most {MAX_MESSAGES} messages"),
        ));
    }
    if input.method == MethodChoice::BruteForce && t > 2 {
        return Err(CliError::invalid(
            "t",
            "brute force supports at most 2 messages",
        ));
    }
    let problem = SumRateProblem::new(input.pmf, input.f_a, input.f_b, input.initial_location)
        .field("pmf")?;
    let caps = input.caps.as_deref();
    problem.resolve_caps(t, caps).field("caps")?;
    let restarts = input.restarts.unwrap_or(PenaltyOptions::default().restarts);
    if restarts == 0 {
        return Err(CliError::invalid(
            "restarts",
            "at least one restart is needed",
        ));
    }
    let seed = settings.seed.or(input.seed).unwrap_or(0);

    // Solve t' = 1..t in turn, warm-starting each step with the previous
    // feasible chain so the values can only improve as t grows.
    let mut ladder: Vec<SumRateResult> = Vec::with_capacity(t);
    let steps: Vec<usize> = if input.method == MethodChoice::BruteForce {
        vec![t]
    } else {
        (1..=t).collect()
    };
    for &tt in &steps {
        let sub_caps = caps.map(|c| &c[..tt]);
        let exact = match input.method {
            MethodChoice::Penalty => None,
            MethodChoice::BruteForce => Some(min_sum_rate_bruteforce(&problem, tt, sub_caps)?),
            MethodChoice::Auto => try_bruteforce(&problem, tt, sub_caps)?,
        };
        let result = match exact {
            Some(r) => r,
            None => {
                let opts = PenaltyOptions {
                    restarts,
                    seed,
                    caps: sub_caps.map(<[usize]>::to_vec),
                    warm_start: ladder
                        .last()
                        .filter(|r| r.is_feasible())
                        .map(|r| r.chain.clone()),
                    ..PenaltyOptions::default()
                };
                min_sum_rate_penalty(&problem, tt, &opts)?
            }
        };
        ladder.push(result);
    }
    let best = ladder.last().expect("at least one step ran");
    let tolerance = settings.tolerance.unwrap_or(CERTIFY_TOL);
    let mut results = to_json(best)?;
    results["gap_to_best_lower_bound"] = json!(best.achieved - best.best_lower_bound);
    results["within_tolerance_of_bound"] =
        json!(best.is_feasible() && best.achieved - best.best_lower_bound <= tolerance);
    results["ladder"] = Value::Array(
        ladder
            .iter()
            .map(|r| json!({ "t": r.t, "achieved": r.achieved, "status": r.status, "method": r.method, "certified": r.certified }))
            .collect(),
    );
    let penalty_used = ladder
        .iter()
        .any(|r| r.method == intercomp::sum_rate::Method::Penalty);
    let mut provenance = json!({
        "method": best.method,
        "tolerance": tolerance,
    });
    if penalty_used {
        provenance["seed"] = json!(seed);
        provenance["restarts"] = json!(restarts);
        provenance["note"] =
            json!("penalty-search values are achievable sum-rates, not certified minima");
    }
    Ok(Outcome {
        report: Report {
            kind: "sumrate",
            inputs: Value::Object(payload),
            results,
            provenance,
        },
        ok: true,
    })
}
