//! Deterministic CSV and JSON emission. Floats are printed with 17
//! significant digits so identical runs produce byte-identical files.

use serde::Serialize;

use crate::config::DiagnosticsConfig;
use crate::scenario::RunResult;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(result: &RunResult) -> String {
    let width = result.chart_rows.first().map_or(0, |c| c.len());
    let mut out = String::new();
    out.push_str("step");
    for i in 0..width {
        out.push_str(&format!(",c{i}"));
    }
    out.push_str(",del_residual,newton_iters\n");
    for (k, row) in result.chart_rows.iter().enumerate() {
        out.push_str(&k.to_string());
        for v in row.iter() {
            out.push(',');
            out.push_str(&format_float(*v));
        }
        out.push(',');
        if let Some(r) = result.residuals[k] {
            out.push_str(&format_float(r));
        }
        out.push(',');
        if let Some(it) = result.iters[k] {
            out.push_str(&it.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn diagnostics_csv(result: &RunResult, diag: &DiagnosticsConfig) -> String {
    let mut out = String::new();
    out.push_str("step");
    for (name, _) in &result.quantities {
        out.push_str(&format!(",{name}"));
    }
    let with_symplectic = diag.symplectic_every_k > 0;
    if with_symplectic {
        out.push_str(",symplectic_residual");
    }
    out.push('\n');
    for k in 0..result.chart_rows.len() {
        out.push_str(&k.to_string());
        for (_, series) in &result.quantities {
            out.push(',');
            out.push_str(&format_float(series[k]));
        }
        if with_symplectic {
            out.push(',');
            if let Some(s) = result.symplectic[k] {
                out.push_str(&format_float(s));
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct QuantitySummary {
    pub name: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub model: String,
    pub steps: usize,
    pub max_del_residual: Option<f64>,
    pub quantities: Vec<QuantitySummary>,
    pub max_symplectic_residual: Option<f64>,
    pub reduction_max_discrepancy: Option<f64>,
    pub failures: Option<String>,
}

pub fn summarize(model: &str, steps: usize, result: &RunResult) -> Summary {
    let quantities = result
        .quantities
        .iter()
        .map(|(name, series)| {
            let initial = series.first().copied().unwrap_or(0.0);
            let max_abs = series
                .iter()
                .map(|v| (v - initial).abs())
                .fold(0.0, f64::max);
            QuantitySummary {
                name: name.clone(),
                initial,
                max_abs_drift: max_abs,
                max_rel_drift: max_abs / initial.abs().max(f64::MIN_POSITIVE),
            }
        })
        .collect();
    Summary {
        model: model.to_string(),
        steps,
        max_del_residual: result.max_residual(),
        quantities,
        max_symplectic_residual: result.max_symplectic(),
        reduction_max_discrepancy: result.reduction_max,
        failures: None,
    }
}

pub fn summary_json(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}
