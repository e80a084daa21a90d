//! BIC-approximated Bayes factors for ANOVA effects.
//!
//! The crate computes `BF01` (evidence for the null over the alternative) from
//! nothing more than a reported `F(df1, df2)` value and a sample size, and
//! ships the machinery to check that shortcut against the sums-of-squares
//! route on raw balanced data:
//!
//! * [`bf`] holds the closed-form approximation, always evaluated in log space.
//! * [`summary`] parses `F(1,17)=1.75, p=0.20` style strings and batch CSV files.
//! * [`anova`] runs balanced one- and two-way fixed-effects ANOVA.
//! * [`sim`] is a seeded Monte Carlo harness over factorial designs.
//!
//! ```
//! use anova_bf::{bf01_from_summary, AnovaSummary};
//!
//! let s = AnovaSummary::new(1.75, 1, 17, 18).unwrap();
//! let r = bf01_from_summary(&s);
//! assert!((r.bf01 - 1.757).abs() < 5e-4);
//! ```

#![forbid(unsafe_code)]

pub mod anova;
pub mod bf;
mod error;
pub mod rng;
pub mod sim;
pub mod special;
pub mod summary;

pub use anova::{
    effect_summary, sse_pair_for_effect, two_way_anova, AnovaTable, Effect, EffectRow,
    FactorialDataset, NConvention,
};
pub use bf::{
    bf01_from_delta_bic, bf01_from_sse, bf01_from_summary, bf10_from_bf01, bic_from_loglik, classify_evidence,
    critical_f, delta_bic_from_f, delta_bic_from_sse, AnovaSummary, BayesFactorResult,
    ComputationPath, Direction, EvidenceCategory, EvidenceStrength, SumsOfSquares,
};
pub use error::{Error, Result};
pub use sim::{
    five_number_summary, generate_dataset, render_report, run_simulation, ConditionResult,
    FiveNumber, ReportFormat, SimulationConfig,
};
pub use summary::{
    check_p_consistency, parse_batch_csv, parse_summary, Comparator, ReportedP, ReportedSummary,
    SummaryRecord, Warning,
};
