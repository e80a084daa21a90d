use anova_bf::summary::parse_summary_bytes;
use anova_bf::*;
use proptest::prelude::*;

fn summary(f: f64, df1: u32, df2: u32, n: u64) -> AnovaSummary {
    AnovaSummary::new(f, df1, df2, n).unwrap()
}

fn design() -> impl Strategy<Value = (u32, u32, u64)> {
    (1u32..12, 1u32..500, 2u64..5000)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn sse_and_f_routes_agree(
        ss_effect in 0.0f64..1e4,
        ss_error in 1e-3f64..1e4,
        (df1, df2, n) in design(),
    ) {
        let sums = SumsOfSquares::new(ss_effect, ss_error).unwrap();
        let via_sse = delta_bic_from_sse(sums.sse_h1(), sums.sse_h0(), n, df1).unwrap();
        let f = (ss_effect / f64::from(df1)) / (ss_error / f64::from(df2));
        let via_f = delta_bic_from_f(&summary(f, df1, df2, n));
        prop_assert!(rel_close(via_sse, via_f, 1e-9), "{via_sse} vs {via_f}");
    }

    #[test]
    fn scale_free(
        ss_effect in 0.0f64..1e3,
        ss_error in 1e-2f64..1e3,
        c in 1e-6f64..1e6,
        n in 2u64..1000,
        df1 in 1u32..6,
    ) {
        let a = delta_bic_from_sse(ss_error, ss_effect + ss_error, n, df1).unwrap();
        let b = delta_bic_from_sse(c * ss_error, c * ss_effect + c * ss_error, n, df1).unwrap();
        prop_assert!(rel_close(a, b, 1e-10));
    }

    #[test]
    fn bf01_strictly_decreasing_in_f(
        f in 0.0f64..50.0,
        step in 1e-3f64..10.0,
        (df1, df2, n) in design(),
    ) {
        let lo = bf01_from_summary(&summary(f, df1, df2, n));
        let hi = bf01_from_summary(&summary(f + step, df1, df2, n));
        prop_assert!(hi.log_bf10 > lo.log_bf10);
    }

    #[test]
    fn bf01_bounded_by_f_zero(f in 0.0f64..1e3, (df1, df2, n) in design()) {
        let r = bf01_from_summary(&summary(f, df1, df2, n));
        let max_log_bf01 = f64::from(df1) / 2.0 * (n as f64).ln();
        prop_assert!(r.bf01 > 0.0);
        prop_assert!(-r.log_bf10 <= max_log_bf01 * (1.0 + 1e-15));
        let at_zero = bf01_from_summary(&summary(0.0, df1, df2, n));
        prop_assert!(rel_close(-at_zero.log_bf10, max_log_bf01, 1e-15));
    }

    #[test]
    fn decision_boundary(f in 0.0f64..100.0, (df1, df2, n) in design()) {
        let crit = critical_f(n, df1, df2).unwrap();
        // Stay clear of the boundary where rounding decides the sign.
        prop_assume!((f - crit).abs() > 1e-9 * crit.max(1.0));
        let r = bf01_from_summary(&summary(f, df1, df2, n));
        prop_assert_eq!(r.log_bf10 > 0.0, f > crit);
    }

    #[test]
    fn critical_f_is_unit_bf(( df1, df2, n) in design()) {
        let crit = critical_f(n, df1, df2).unwrap();
        let r = bf01_from_summary(&summary(crit, df1, df2, n));
        prop_assert!((r.bf01 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reciprocity_is_exact(delta in -1e4f64..1e4) {
        let r = bf01_from_delta_bic(delta).unwrap();
        prop_assert_eq!(bf10_from_bf01(&bf10_from_bf01(&r)), r);
        let s = bf10_from_bf01(&r);
        prop_assert_eq!(s.log_bf10, -r.log_bf10);
        if delta.abs() < 1400.0 {
            prop_assert!((r.bf01 * r.bf10 - 1.0).abs() < 1e-12);
            prop_assert!(rel_close(r.bf01, (-r.log_bf10).exp(), 1e-12));
        }
        prop_assert_eq!(r.category, classify_evidence(r.log_bf10));
    }

    #[test]
    fn canonical_text_round_trips(
        f in 0.0f64..1e4,
        df1 in 1u32..100,
        df2 in 1u32..100_000,
        n in proptest::option::of(2u64..1_000_000),
        p in proptest::option::of((0.0001f64..0.9999, 0usize..3)),
    ) {
        let reported_p = p.map(|(value, c)| ReportedP {
            comparator: [Comparator::Eq, Comparator::Lt, Comparator::Gt][c],
            value,
        });
        let s = ReportedSummary { f_value: f, df1, df2, n, reported_p };
        let text = s.to_string();
        prop_assert_eq!(parse_summary(&text).unwrap(), s);
    }

    #[test]
    fn parser_total_on_grammar_alphabet(s in "[F()=,.;pnN<>0-9eE+ \\-]{0,40}") {
        let _ = parse_summary(&s);
    }

    #[test]
    fn parser_total_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = parse_summary_bytes(&bytes);
    }

    #[test]
    fn csv_preserves_row_order(
        rows in proptest::collection::vec((0.0f64..100.0, 1u32..5, 1u32..100, 0u64..200), 0..30),
    ) {
        let mut text = String::from("label,f,df1,df2,n\n");
        for (i, (f, d1, d2, n)) in rows.iter().enumerate() {
            text.push_str(&format!("row{i},{f},{d1},{d2},{n}\n"));
        }
        let parsed = parse_batch_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(parsed.len(), rows.len());
        for (i, (rec, row)) in parsed.iter().zip(&rows).enumerate() {
            let line = i as u64 + 2;
            match rec {
                Ok(r) => {
                    prop_assert_eq!(r.source_line, line);
                    let label = format!("row{i}");
                    prop_assert_eq!(r.summary.label(), Some(label.as_str()));
                    prop_assert_eq!(r.summary.f_value(), row.0);
                }
                Err(Error::Row { line: l, column, .. }) => {
                    prop_assert_eq!(*l, line);
                    prop_assert_eq!(column.as_str(), "n");
                    prop_assert!(row.3 < 2);
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}

fn dataset_strategy() -> impl Strategy<Value = FactorialDataset> {
    (2usize..4, 1usize..4, 2usize..11).prop_flat_map(|(a, b, n)| {
        proptest::collection::vec(-50.0f64..50.0, a * b * n)
            .prop_map(move |v| FactorialDataset::new(a, b, n, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn decomposition_is_complete(data in dataset_strategy()) {
        let t = two_way_anova(&data).unwrap();
        let parts: f64 = t.effects.iter().map(|r| r.ss).sum::<f64>() + t.ss_error;
        prop_assert!(rel_close(parts, t.total_ss, 1e-9));
        let df_sum: u64 = t.effects.iter().map(|r| u64::from(r.df)).sum::<u64>()
            + u64::from(t.df_error) + 1;
        prop_assert_eq!(df_sum, t.n_total);
    }

    #[test]
    fn translation_invariant(data in dataset_strategy(), shift in -1e3f64..1e3) {
        let shifted = FactorialDataset::new(
            data.levels_a(),
            data.levels_b(),
            data.cell_n(),
            data.values().iter().map(|y| y + shift).collect(),
        ).unwrap();
        let (t, u) = (two_way_anova(&data).unwrap(), two_way_anova(&shifted).unwrap());
        let scale = t.total_ss;
        prop_assert!((t.ss_error - u.ss_error).abs() <= 1e-9 * scale);
        for (r, s) in t.effects.iter().zip(&u.effects) {
            prop_assert_eq!(r.df, s.df);
            prop_assert!((r.ss - s.ss).abs() <= 1e-9 * scale);
            prop_assert!((r.f - s.f).abs() <= 1e-9 * r.f.max(1.0) * (scale / t.ss_error).max(1.0));
        }
    }

    #[test]
    fn end_to_end_paths_agree(data in dataset_strategy()) {
        let t = two_way_anova(&data).unwrap();
        for row in &t.effects {
            let s = effect_summary(&t, row.effect, NConvention::TotalObservations).unwrap();
            let via_f = bf01_from_summary(&s);
            let sums = sse_pair_for_effect(&t, row.effect).unwrap();
            let via_sse = bf01_from_sse(&sums, s.n(), s.df1()).unwrap();
            prop_assert!(rel_close(via_f.log_bf10, via_sse.log_bf10, 1e-9));
            let ratio = sums.sse_h0() / sums.sse_h1();
            let expected = 1.0 + row.f * f64::from(row.df) / f64::from(t.df_error);
            prop_assert!(rel_close(ratio, expected, 1e-10));
        }
    }
}

#[test]
fn zero_effect_gives_equal_sse() {
    let values: Vec<f64> = (0..6).flat_map(|_| [1.0, 3.0]).collect();
    let t = two_way_anova(&FactorialDataset::new(2, 3, 2, values).unwrap()).unwrap();
    let p = sse_pair_for_effect(&t, Effect::AB).unwrap();
    assert_eq!(p.sse_h0(), p.sse_h1());
}
