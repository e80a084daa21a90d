use anova_bf_web::{evaluate_summary, log_bf10_curve, simulate_condition};
use serde_json::Value;

#[test]
fn evaluates_fayol_summary() {
    let v: Value = serde_json::from_str(&evaluate_summary("F(1,17)=1.75, p=0.20", Some(18)).unwrap()).unwrap();
    assert!((v["bf01"].as_f64().unwrap() - 1.757).abs() < 5e-4);
    assert_eq!(v["category"], "weak evidence for the null");
    assert!((v["p_value"].as_f64().unwrap() - 0.2034).abs() < 1e-4);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 0);
}

#[test]
fn text_n_wins_and_missing_n_fails() {
    let v: Value = serde_json::from_str(&evaluate_summary("F(1,23)=4.35, n=24", Some(99)).unwrap()).unwrap();
    assert_eq!(v["n"], 24);
    assert!(evaluate_summary("F(1,23)=4.35", None).is_err());
    assert!(evaluate_summary("F(1;23)=4.35", Some(24)).is_err());
}

#[test]
fn curve_starts_at_floor_and_rises() {
    let curve = log_bf10_curve(1, 17, 18, 10.0, 101).unwrap();
    assert_eq!(curve.len(), 101);
    assert!((curve[0] + 0.5 * 18f64.ln()).abs() < 1e-12);
    assert!(curve.windows(2).all(|w| w[1] > w[0]));
    assert!(log_bf10_curve(1, 17, 18, 0.0, 10).is_err());
    assert!(log_bf10_curve(1, 17, 18, 5.0, 1).is_err());
}

#[test]
fn simulation_rows_per_effect() {
    let v: Value = serde_json::from_str(&simulate_condition(10, 0.2, 50, 3).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["effect"], "AB");
    assert_eq!(rows[0]["n_effective"], 60);
    assert!(simulate_condition(10, 0.2, 0, 3).is_err());
    assert!(simulate_condition(10, 0.2, 10_000, 3).is_err());
}
