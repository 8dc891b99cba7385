//! Side-by-side scenario comparison: run two configurations, project the
//! first trajectory into the second's state space and report per-step
//! chart discrepancies.

use nalgebra::{DVector, Matrix3};
use serde::Serialize;

use crate::config::RawConfig;
use crate::output::format_float;
use crate::scenario::{run_scenario, RunError, RunResult};

/// Chart-level projection from the A-model state space to the B-model's.
pub fn project(projection: &str, a_model: &str, b_model: &str, row: &DVector<f64>) -> Result<DVector<f64>, RunError> {
    match projection {
        "identity" => Ok(row.clone()),
        "pair_so3_to_so3" => {
            if a_model != "rigid_body_pair" || b_model != "lie_group_so3" {
                return Err(RunError::Config(
                    "pair_so3_to_so3 projects rigid_body_pair onto lie_group_so3".into(),
                ));
            }
            let r0 = Matrix3::from_column_slice(&row.as_slice()[0..9]);
            let r1 = Matrix3::from_column_slice(&row.as_slice()[9..18]);
            let w = r0.transpose() * r1;
            Ok(DVector::from_column_slice(w.as_slice()))
        }
        other => Err(RunError::Config(format!("unknown projection id '{other}'"))),
    }
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub projection: String,
    pub steps: usize,
    pub max_discrepancy: f64,
}

pub struct CompareOutcome {
    pub discrepancy_csv: String,
    pub summary: CompareSummary,
}

pub fn run_compare(
    a: &RawConfig,
    b: &RawConfig,
    projection: &str,
) -> Result<CompareOutcome, RunError> {
    if a.steps != b.steps {
        return Err(RunError::Config(format!(
            "step counts differ: {} vs {}",
            a.steps, b.steps
        )));
    }

    let ra: RunResult = run_scenario(a)?;
    let rb: RunResult = run_scenario(b)?;

    let mut csv = String::from("step,discrepancy\n");
    let mut max_d: f64 = 0.0;
    for (k, (row_a, row_b)) in ra.chart_rows.iter().zip(rb.chart_rows.iter()).enumerate() {
        let projected = project(projection, &a.model, &b.model, row_a)?;
        if projected.len() != row_b.len() {
            return Err(RunError::Config(format!(
                "projected chart dimension {} does not match target dimension {}",
                projected.len(),
                row_b.len()
            )));
        }
        let d = (projected - row_b).amax();
        max_d = max_d.max(d);
        csv.push_str(&format!("{k},{}\n", format_float(d)));
    }

    Ok(CompareOutcome {
        discrepancy_csv: csv,
        summary: CompareSummary {
            projection: projection.to_string(),
            steps: a.steps,
            max_discrepancy: max_d,
        },
    })
}
