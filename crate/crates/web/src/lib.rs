//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Each exported function has a plain Rust twin returning
//! [`anova_bf::Result`], which is what the native tests exercise.

use anova_bf::special::f_upper_tail;
use anova_bf::summary::DEFAULT_P_TOLERANCE;
use anova_bf::{
    bf01_from_summary, critical_f, parse_summary, sim, AnovaSummary, Error, NConvention, Result,
    SimulationConfig, Warning,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Evaluation {
    f: f64,
    df1: u32,
    df2: u32,
    n: u64,
    bf01: f64,
    bf10: f64,
    log_bf10: f64,
    category: String,
    critical_f: f64,
    p_value: f64,
    warnings: Vec<Warning>,
}

/// Bayes factor for a summary string such as `F(1,17)=1.75, p=0.20`.
/// `n` is used when the text carries no sample size.
pub fn evaluate_summary(text: &str, n: Option<u64>) -> Result<String> {
    let mut parsed = parse_summary(text)?;
    parsed.n = parsed.n.or(n);
    let warnings = parsed.warnings(DEFAULT_P_TOLERANCE);
    let summary = parsed.into_summary(None)?;
    let r = bf01_from_summary(&summary);
    let out = Evaluation {
        f: summary.f_value(),
        df1: summary.df1(),
        df2: summary.df2(),
        n: summary.n(),
        bf01: r.bf01,
        bf10: r.bf10,
        log_bf10: r.log_bf10,
        category: r.category.to_string(),
        critical_f: critical_f(summary.n(), summary.df1(), summary.df2())?,
        p_value: f_upper_tail(
            summary.f_value(),
            f64::from(summary.df1()),
            f64::from(summary.df2()),
        )?,
        warnings,
    };
    Ok(serde_json::to_string(&out).expect("plain struct serializes"))
}

/// log BF10 at `points` evenly spaced F values from 0 to `f_max`.
pub fn log_bf10_curve(df1: u32, df2: u32, n: u64, f_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(f_max.is_finite() && f_max > 0.0) {
        return Err(Error::InvalidArgument("f_max must be positive and finite".into()));
    }
    if !(2..=10_000).contains(&points) {
        return Err(Error::InvalidArgument("points must be between 2 and 10000".into()));
    }
    let step = f_max / (points - 1) as f64;
    (0..points)
        .map(|i| Ok(bf01_from_summary(&AnovaSummary::new(i as f64 * step, df1, df2, n)?).log_bf10))
        .collect()
}

/// One simulated condition of the 2 x 3 design as a JSON array with one
/// row per effect.
pub fn simulate_condition(cell_n: usize, g: f64, replications: usize, seed: u64) -> Result<String> {
    if replications > 5000 {
        return Err(Error::InvalidArgument("at most 5000 replications in the browser".into()));
    }
    let config = SimulationConfig {
        cell_sizes: vec![cell_n],
        effect_variances: vec![g],
        replications,
        n_convention: NConvention::TotalObservations,
        ..SimulationConfig::default_grid(seed)
    };
    let rows = sim::run_simulation_with_threads(&config, Some(1))?;
    Ok(serde_json::to_string(&rows).expect("plain struct serializes"))
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = evaluateSummary)]
pub fn evaluate_summary_js(text: &str, n: Option<u32>) -> std::result::Result<String, JsError> {
    evaluate_summary(text, n.map(u64::from)).map_err(js)
}

#[wasm_bindgen(js_name = logBf10Curve)]
pub fn log_bf10_curve_js(
    df1: u32,
    df2: u32,
    n: u32,
    f_max: f64,
    points: u32,
) -> std::result::Result<Vec<f64>, JsError> {
    log_bf10_curve(df1, df2, u64::from(n), f_max, points as usize).map_err(js)
}

#[wasm_bindgen(js_name = simulateCondition)]
pub fn simulate_condition_js(
    cell_n: u32,
    g: f64,
    replications: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    simulate_condition(cell_n as usize, g, replications as usize, u64::from(seed)).map_err(js)
}
