use serde::Deserialize;
use serde_json::{json, Map, Value};

use intercomp::structure::{
    han_kobayashi_condition, is_column_monochromatic, is_rectangle, is_row_monochromatic,
    maximal_monochromatic_rectangles, support, theorem3_condition_i, Monochromatic, Rectangle,
};
use intercomp::sum_rate::han_kobayashi_bound;
use intercomp::{Error, FunctionTable, JointPmf};

use super::check_two_terminal;
use crate::error::CliError;
use crate::input::decode;
use crate::report::{to_json, Report};
use crate::{Outcome, Settings};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeInput {
    pmf: JointPmf,
    #[serde(rename = "f_A")]
    f_a: FunctionTable,
    #[serde(rename = "f_B")]
    f_b: FunctionTable,
}

fn optional<T>(r: intercomp::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotApplicable(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(payload: Map<String, Value>, _settings: Settings) -> Result<Outcome, CliError> {
    let input: AnalyzeInput = decode(&payload)?;
    let (pmf, f_a, f_b) = (&input.pmf, &input.f_a, &input.f_b);
    check_two_terminal(pmf, f_a, f_b)?;
    let (nx, ny) = (pmf.axes()[0], pmf.axes()[1]);
    let cells: Vec<(usize, usize)> = support(pmf).into_iter().map(|c| (c[0], c[1])).collect();
    let domain = Rectangle::new((0..nx).collect(), (0..ny).collect());
    let f_a_t = f_a.transposed()?;
    let t_pmf = pmf.transposed()?;

    let results = json!({
        "support": {
            "cells": cells,
            "full": pmf.has_full_support(),
            "is_rectangle": is_rectangle(&cells),
        },
        "rectangles": {
            "row_wise_f_A": to_json(&maximal_monochromatic_rectangles(f_a, Monochromatic::RowWise)?)?,
            "column_wise_f_B": to_json(&maximal_monochromatic_rectangles(f_b, Monochromatic::ColumnWise)?)?,
            "f_A": to_json(&maximal_monochromatic_rectangles(f_a, Monochromatic::Full)?)?,
            "f_B": to_json(&maximal_monochromatic_rectangles(f_b, Monochromatic::Full)?)?,
        },
        "monochromatic": {
            "f_A_constant": f_a.is_constant(),
            "f_B_constant": f_b.is_constant(),
            "f_A_row_wise_on_domain": is_row_monochromatic(&domain, f_a)?,
            "f_B_column_wise_on_domain": is_column_monochromatic(&domain, f_b)?,
        },
        "han_kobayashi": {
            "condition_f_B": han_kobayashi_condition(f_b)?,
            "one_message_bound_start_A": optional(han_kobayashi_bound(pmf, f_b))?,
            "condition_f_A": han_kobayashi_condition(&f_a_t)?,
            "one_message_bound_start_B": optional(han_kobayashi_bound(&t_pmf, &f_a_t))?,
        },
        "theorem3_i": theorem3_condition_i(f_b)?,
    });
    Ok(Outcome {
        report: Report {
            kind: "analyze",
            inputs: Value::Object(payload),
            results,
            provenance: json!({
                "rectangles": "maximal rectangles by exhaustive enumeration of one side",
                "one_message_bounds": "H(X|Y) (start A) or H(Y|X) (start B) when every pair of sender symbols is separated and the support is full",
            }),
        },
        ok: true,
    })
}
