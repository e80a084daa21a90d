//! Checks against routes that share no code with the library.

use anova_bf::special::f_upper_tail;
use anova_bf::*;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

/// Definitional sums of squares from long-format `(i, j, y)` triples. Every
/// mean is recomputed by filtering, and every SS is a sum over observations.
struct NaiveAnova {
    ss_a: f64,
    ss_b: f64,
    ss_ab: f64,
    ss_error: f64,
}

fn naive_anova(a: usize, b: usize, obs: &[(usize, usize, f64)]) -> NaiveAnova {
    let mean_where = |pred: &dyn Fn(&(usize, usize, f64)) -> bool| {
        let picked: Vec<f64> = obs.iter().filter(|o| pred(o)).map(|o| o.2).collect();
        picked.iter().sum::<f64>() / picked.len() as f64
    };
    let grand = mean_where(&|_| true);
    let a_mean: Vec<f64> = (0..a).map(|i| mean_where(&|o| o.0 == i)).collect();
    let b_mean: Vec<f64> = (0..b).map(|j| mean_where(&|o| o.1 == j)).collect();
    let cell_mean: Vec<Vec<f64>> = (0..a)
        .map(|i| (0..b).map(|j| mean_where(&|o| o.0 == i && o.1 == j)).collect())
        .collect();

    let mut out = NaiveAnova {
        ss_a: 0.0,
        ss_b: 0.0,
        ss_ab: 0.0,
        ss_error: 0.0,
    };
    for &(i, j, y) in obs {
        out.ss_a += (a_mean[i] - grand).powi(2);
        out.ss_b += (b_mean[j] - grand).powi(2);
        out.ss_ab += (cell_mean[i][j] - a_mean[i] - b_mean[j] + grand).powi(2);
        out.ss_error += (y - cell_mean[i][j]).powi(2);
    }
    out
}

fn small_grid_dataset() -> impl Strategy<Value = (usize, usize, usize, Vec<f64>)> {
    (2usize..4, 1usize..4, 2usize..4).prop_flat_map(|(a, b, n)| {
        proptest::collection::vec((-5i32..=5).prop_map(f64::from), a * b * n)
            .prop_map(move |v| (a, b, n, v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn engine_matches_naive_oracle((a, b, n, values) in small_grid_dataset()) {
        let data = FactorialDataset::new(a, b, n, values.clone()).unwrap();
        let table = match two_way_anova(&data) {
            Ok(t) => t,
            Err(Error::DegenerateData(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let obs: Vec<(usize, usize, f64)> = (0..a)
            .flat_map(|i| (0..b).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
            .map(|(i, j, k)| (i, j, data.get(i, j, k)))
            .collect();
        let oracle = naive_anova(a, b, &obs);

        prop_assert!((table.ss_error - oracle.ss_error).abs() < 1e-10);
        prop_assert_eq!(table.df_error as usize, a * b * (n - 1));
        let expected = [
            (Effect::A, oracle.ss_a, a - 1),
            (Effect::B, oracle.ss_b, b - 1),
            (Effect::AB, oracle.ss_ab, (a - 1) * (b - 1)),
        ];
        for (effect, ss, df) in expected {
            match table.effect(effect) {
                Some(row) => {
                    prop_assert!((row.ss - ss).abs() < 1e-10, "{effect}: {} vs {ss}", row.ss);
                    prop_assert_eq!(row.df as usize, df);
                    let f = (ss / df as f64) / (oracle.ss_error / table.df_error as f64);
                    prop_assert!((row.f - f).abs() < 1e-10 * f.max(1.0));
                }
                None => prop_assert_eq!(df, 0),
            }
        }
    }

    #[test]
    fn f_tail_matches_statrs(f in 0.0f64..60.0, df1 in 1u32..40, df2 in 1u32..400) {
        let ours = f_upper_tail(f, f64::from(df1), f64::from(df2)).unwrap();
        let dist = FisherSnedecor::new(f64::from(df1), f64::from(df2)).unwrap();
        let theirs = dist.sf(f);
        prop_assert!((ours - theirs).abs() < 1e-8, "{ours} vs {theirs}");
    }
}

#[test]
fn two_group_fixture_exact() {
    let data = FactorialDataset::new(2, 1, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let t = two_way_anova(&data).unwrap();
    let a = t.effect(Effect::A).unwrap();
    assert!((a.f - 13.5).abs() < 1e-12);
    assert_eq!((a.df, t.df_error), (1, 4));
}

#[test]
fn fayol_p_is_consistent() {
    let implied = FisherSnedecor::new(1.0, 17.0).unwrap().sf(1.75);
    assert!((implied - 0.2034).abs() < 1e-4);
    let s = AnovaSummary::new(1.75, 1, 17, 18)
        .unwrap()
        .with_reported_p(ReportedP::exact(0.20))
        .unwrap();
    assert_eq!(check_p_consistency(&s, 0.02), None);
}

#[test]
fn null_generator_has_unit_variance() {
    let cfg = SimulationConfig {
        cell_sizes: vec![50],
        effect_variances: vec![0.0],
        replications: 200,
        ..SimulationConfig::default_grid(2024)
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0.0;
    for r in 0..cfg.replications as u64 {
        let d = generate_dataset(&cfg, 50, 0.0, r).unwrap();
        for &y in d.values() {
            sum += y;
            sum_sq += y * y;
            count += 1.0;
        }
    }
    let mean = sum / count;
    let var = sum_sq / count - mean * mean;
    assert!((var - 1.0).abs() < 0.05, "variance {var}");
    assert!(mean.abs() < 0.02, "mean {mean}");
}

#[test]
fn effect_variance_reaches_cell_means() {
    // With negligible noise each cell mean is α + τ + γ, variance 3g.
    let g = 0.2;
    let cfg = SimulationConfig {
        cell_sizes: vec![2],
        effect_variances: vec![g],
        replications: 1,
        error_sd: 1e-6,
        ..SimulationConfig::default_grid(5)
    };
    let mut cell_means = Vec::new();
    for r in 0..3000u64 {
        let d = generate_dataset(&cfg, 2, g, r).unwrap();
        let c = d.cell(0, 0);
        cell_means.push((c[0] + c[1]) / 2.0);
    }
    let m = cell_means.iter().sum::<f64>() / cell_means.len() as f64;
    let v = cell_means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (cell_means.len() - 1) as f64;
    assert!((v - 3.0 * g).abs() < 0.06, "variance {v}");
}
