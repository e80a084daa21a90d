//! BIC approximation of the Bayes factor for an ANOVA effect.
//!
//! Every quantity is carried as a log (natural base) until the last moment:
//! `n^{df1}` overflows `f64` for n in the low hundreds, so the closed form
//! `BF01 = sqrt(n^{df1} (1 + F df1/df2)^{-n})` is never evaluated literally.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// How a reported p value was stated next to the F ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    Eq,
    Lt,
    Gt,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportedP {
    pub comparator: Comparator,
    pub value: f64,
}

impl ReportedP {
    pub fn exact(value: f64) -> Self {
        ReportedP {
            comparator: Comparator::Eq,
            value,
        }
    }
}

/// A published ANOVA effect: `F(df1, df2) = f_value` observed on `n`
/// independent observations.
///
/// What counts as `n` depends on the design (subjects in a repeated-measures
/// analysis, total observations in a between-subjects one) and is always the
/// caller's call; nothing here infers it from the degrees of freedom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaSummary {
    f_value: f64,
    df1: u32,
    df2: u32,
    n: u64,
    label: Option<String>,
    reported_p: Option<ReportedP>,
}

impl AnovaSummary {
    pub fn new(f_value: f64, df1: u32, df2: u32, n: u64) -> Result<Self> {
        if !f_value.is_finite() || f_value < 0.0 {
            return Err(Error::Validation(format!(
                "F must be finite and non-negative, got {f_value}"
            )));
        }
        if df1 == 0 || df2 == 0 {
            return Err(Error::Validation(format!(
                "degrees of freedom must be positive, got ({df1}, {df2})"
            )));
        }
        if n < 2 {
            return Err(Error::Validation(format!("n must be at least 2, got {n}")));
        }
        Ok(AnovaSummary {
            f_value,
            df1,
            df2,
            n,
            label: None,
            reported_p: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_reported_p(mut self, p: ReportedP) -> Result<Self> {
        if !(p.value > 0.0 && p.value < 1.0) {
            return Err(Error::Validation(format!(
                "reported p must lie in (0, 1), got {}",
                p.value
            )));
        }
        self.reported_p = Some(p);
        Ok(self)
    }

    pub fn f_value(&self) -> f64 {
        self.f_value
    }

    pub fn df1(&self) -> u32 {
        self.df1
    }

    pub fn df2(&self) -> u32 {
        self.df2
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn reported_p(&self) -> Option<ReportedP> {
        self.reported_p
    }
}

/// Residual sums of squares for one effect: `SSE1 = SS_error` under the
/// alternative and `SSE0 = SS_effect + SS_error` under the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumsOfSquares {
    ss_effect: f64,
    ss_error: f64,
}

impl SumsOfSquares {
    pub fn new(ss_effect: f64, ss_error: f64) -> Result<Self> {
        if !ss_effect.is_finite() || ss_effect < 0.0 {
            return Err(Error::invalid(format!(
                "effect sum of squares must be finite and non-negative, got {ss_effect}"
            )));
        }
        if !ss_error.is_finite() || ss_error <= 0.0 {
            return Err(Error::DegenerateData(format!(
                "error sum of squares must be positive, got {ss_error}"
            )));
        }
        Ok(SumsOfSquares {
            ss_effect,
            ss_error,
        })
    }

    pub fn ss_effect(&self) -> f64 {
        self.ss_effect
    }

    pub fn ss_error(&self) -> f64 {
        self.ss_error
    }

    pub fn sse_h1(&self) -> f64 {
        self.ss_error
    }

    pub fn sse_h0(&self) -> f64 {
        self.ss_effect + self.ss_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationPath {
    /// From `F`, `df1`, `df2` and `n`.
    FromSummary,
    /// From the two residual sums of squares.
    FromSse,
    /// From a ΔBIC supplied directly.
    FromDeltaBic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Null,
    Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvidenceStrength {
    Weak,
    Positive,
    Strong,
    VeryStrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvidenceCategory {
    Equivocal,
    Favors {
        direction: Direction,
        strength: EvidenceStrength,
    },
}

impl fmt::Display for EvidenceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvidenceCategory::Equivocal => f.write_str("equivocal"),
            EvidenceCategory::Favors {
                direction,
                strength,
            } => {
                let strength = match strength {
                    EvidenceStrength::Weak => "weak",
                    EvidenceStrength::Positive => "positive",
                    EvidenceStrength::Strong => "strong",
                    EvidenceStrength::VeryStrong => "very strong",
                };
                let side = match direction {
                    Direction::Null => "the null",
                    Direction::Alternative => "the alternative",
                };
                write!(f, "{strength} evidence for {side}")
            }
        }
    }
}

impl Serialize for EvidenceCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A Bayes factor in both orientations plus its log.
///
/// `log_bf10` is the exact quantity; `bf01` and `bf10` are its exponentials,
/// clamped to the positive finite range when they would overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesFactorResult {
    pub log_bf10: f64,
    pub bf01: f64,
    pub bf10: f64,
    pub category: EvidenceCategory,
    pub path: ComputationPath,
}

impl BayesFactorResult {
    fn from_log_bf10(log_bf10: f64, path: ComputationPath) -> Self {
        BayesFactorResult {
            log_bf10,
            bf01: saturating_exp(-log_bf10),
            bf10: saturating_exp(log_bf10),
            category: classify_evidence(log_bf10),
            path,
        }
    }

    /// `BIC(H1) - BIC(H0)`.
    pub fn delta_bic(&self) -> f64 {
        -2.0 * self.log_bf10
    }

    /// Picks the alternative only when `log BF10 > 0`; ties go to the null.
    pub fn selects_alternative(&self) -> bool {
        self.log_bf10 > 0.0
    }
}

fn saturating_exp(x: f64) -> f64 {
    x.exp().clamp(f64::MIN_POSITIVE, f64::MAX)
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {x}")))
    }
}

/// `-2 log L + k ln n`.
pub fn bic_from_loglik(log_likelihood: f64, k: u32, n: u64) -> Result<f64> {
    check_finite("log-likelihood", log_likelihood)?;
    if k == 0 {
        return Err(Error::invalid("parameter count k must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(-2.0 * log_likelihood + f64::from(k) * (n as f64).ln())
}

/// `ΔBIC10 = n ln(SSE1 / SSE0) + k_diff ln n`.
///
/// The log ratio is taken as `-ln_1p((SSE0 - SSE1) / SSE1)` so that nearly
/// equal residuals do not lose digits to the quotient.
pub fn delta_bic_from_sse(sse_h1: f64, sse_h0: f64, n: u64, k_diff: u32) -> Result<f64> {
    check_finite("SSE1", sse_h1)?;
    check_finite("SSE0", sse_h0)?;
    if sse_h1 <= 0.0 {
        return Err(Error::DegenerateData(format!(
            "SSE under the alternative must be positive, got {sse_h1}"
        )));
    }
    if sse_h0 < sse_h1 {
        return Err(Error::invalid(format!(
            "SSE0 ({sse_h0}) is smaller than SSE1 ({sse_h1}): the alternative cannot explain less than the null"
        )));
    }
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if k_diff == 0 {
        return Err(Error::invalid("k_diff must be at least 1"));
    }
    let n_f = n as f64;
    let log_ratio = -((sse_h0 - sse_h1) / sse_h1).ln_1p();
    Ok(n_f * log_ratio + f64::from(k_diff) * n_f.ln())
}

/// ΔBIC10 written in terms of the F ratio:
/// `-n ln(1 + F df1/df2) + df1 ln n`.
pub fn delta_bic_from_f(summary: &AnovaSummary) -> f64 {
    let n = summary.n as f64;
    let df1 = f64::from(summary.df1);
    let df2 = f64::from(summary.df2);
    -n * (summary.f_value * df1 / df2).ln_1p() + df1 * n.ln()
}

/// `BF01 ≈ exp(ΔBIC10 / 2)`.
pub fn bf01_from_delta_bic(delta_bic: f64) -> Result<BayesFactorResult> {
    check_finite("ΔBIC", delta_bic)?;
    Ok(BayesFactorResult::from_log_bf10(
        -delta_bic / 2.0,
        ComputationPath::FromDeltaBic,
    ))
}

/// Bayes factor from a minimal ANOVA summary.
pub fn bf01_from_summary(summary: &AnovaSummary) -> BayesFactorResult {
    BayesFactorResult::from_log_bf10(
        -delta_bic_from_f(summary) / 2.0,
        ComputationPath::FromSummary,
    )
}

/// Bayes factor from the residual sums of squares of one effect.
pub fn bf01_from_sse(sums: &SumsOfSquares, n: u64, df1: u32) -> Result<BayesFactorResult> {
    let delta = delta_bic_from_sse(sums.sse_h1(), sums.sse_h0(), n, df1)?;
    Ok(BayesFactorResult::from_log_bf10(
        -delta / 2.0,
        ComputationPath::FromSse,
    ))
}

/// Swaps the roles of the two hypotheses: the returned `bf01` is the
/// original `bf10` and vice versa. Applying it twice restores the input.
pub fn bf10_from_bf01(result: &BayesFactorResult) -> BayesFactorResult {
    BayesFactorResult {
        log_bf10: -result.log_bf10,
        bf01: result.bf10,
        bf10: result.bf01,
        category: classify_evidence(-result.log_bf10),
        path: result.path,
    }
}

/// Labels `|ΔBIC| = |2 log BF10|` with the 2 / 6 / 10 bands.
pub fn classify_evidence(log_bf10: f64) -> EvidenceCategory {
    if log_bf10 == 0.0 || log_bf10.is_nan() {
        return EvidenceCategory::Equivocal;
    }
    let magnitude = (2.0 * log_bf10).abs();
    let strength = if magnitude < 2.0 {
        EvidenceStrength::Weak
    } else if magnitude < 6.0 {
        EvidenceStrength::Positive
    } else if magnitude < 10.0 {
        EvidenceStrength::Strong
    } else {
        EvidenceStrength::VeryStrong
    };
    let direction = if log_bf10 > 0.0 {
        Direction::Alternative
    } else {
        Direction::Null
    };
    EvidenceCategory::Favors {
        direction,
        strength,
    }
}

/// The F ratio at which `BF01 = 1`: `(df2/df1) (n^{df1/n} - 1)`.
pub fn critical_f(n: u64, df1: u32, df2: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if df1 == 0 || df2 == 0 {
        return Err(Error::invalid("degrees of freedom must be positive"));
    }
    let n = n as f64;
    let df1 = f64::from(df1);
    let df2 = f64::from(df2);
    Ok(df2 / df1 * (df1 / n * n.ln()).exp_m1())
}
