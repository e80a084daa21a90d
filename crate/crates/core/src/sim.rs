//! Monte Carlo harness over balanced factorial designs.
//!
//! Each dataset follows `y_ijk = α_i + τ_j + γ_ij + ε_ijk`, with the effects
//! drawn once per dataset from `Normal(0, g)` and the noise from
//! `Normal(0, error_sd²)`. Every effect's log BF10 is computed twice, from the
//! F summary and from the residual sums of squares, and the two decisions are
//! compared.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::anova::{
    effect_summary, sse_pair_for_effect, two_way_anova, Effect, FactorialDataset, NConvention,
};
use crate::bf::{bf01_from_sse, bf01_from_summary};
use crate::error::{Error, Result};
use crate::rng::{derive_key, replicate_rng, stream_rng, Domain};

/// Bootstrap resamples behind [`ConditionResult::median_se`].
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// log BF10 values are snapped to this grid before the two paths' decisions
/// are compared.
pub const DECISION_GRID: f64 = 1e-9;

fn default_levels_a() -> usize {
    2
}

fn default_levels_b() -> usize {
    3
}

fn default_error_sd() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_levels_a")]
    pub levels_a: usize,
    #[serde(default = "default_levels_b")]
    pub levels_b: usize,
    pub cell_sizes: Vec<usize>,
    pub effect_variances: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub n_convention: NConvention,
    #[serde(default = "default_error_sd")]
    pub error_sd: f64,
    /// Center the drawn effects so each set sums to zero.
    #[serde(default)]
    pub sum_to_zero: bool,
}

impl SimulationConfig {
    /// The 2×3 grid with cell sizes 20/50/80, g ∈ {0, 0.05, 0.2} and 1000
    /// datasets per condition.
    pub fn default_grid(master_seed: u64) -> Self {
        SimulationConfig {
            levels_a: 2,
            levels_b: 3,
            cell_sizes: vec![20, 50, 80],
            effect_variances: vec![0.0, 0.05, 0.2],
            replications: 1000,
            master_seed,
            n_convention: NConvention::TotalObservations,
            error_sd: 1.0,
            sum_to_zero: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels_a == 0 || self.levels_b == 0 || self.levels_a * self.levels_b < 2 {
            return Err(Error::invalid("design needs at least one factor with two levels"));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if self.cell_sizes.is_empty() || self.effect_variances.is_empty() {
            return Err(Error::invalid("need at least one cell size and one g value"));
        }
        if let Some(c) = self.cell_sizes.iter().find(|&&c| c < 2) {
            return Err(Error::invalid(format!("cell size must be at least 2, got {c}")));
        }
        if let Some(g) = self
            .effect_variances
            .iter()
            .find(|g| !g.is_finite() || **g < 0.0)
        {
            return Err(Error::invalid(format!("g must be finite and non-negative, got {g}")));
        }
        if !(self.error_sd.is_finite() && self.error_sd > 0.0) {
            return Err(Error::invalid(format!(
                "error_sd must be positive, got {}",
                self.error_sd
            )));
        }
        if let NConvention::Explicit(n) = self.n_convention {
            if n < 2 {
                return Err(Error::invalid(format!("explicit n must be at least 2, got {n}")));
            }
        }
        Ok(())
    }

    pub fn effects(&self) -> Vec<Effect> {
        let mut out = Vec::new();
        if self.levels_a >= 2 {
            out.push(Effect::A);
        }
        if self.levels_b >= 2 {
            out.push(Effect::B);
        }
        if self.levels_a >= 2 && self.levels_b >= 2 {
            out.push(Effect::AB);
        }
        out
    }

    /// The `n` fed into the Bayes factor for a given cell size.
    pub fn n_effective(&self, cell_n: usize) -> u64 {
        match self.n_convention {
            NConvention::TotalObservations => (self.levels_a * self.levels_b * cell_n) as u64,
            NConvention::CellCount => cell_n as u64,
            NConvention::Explicit(n) => n,
        }
    }

    fn effect_df(&self, effect: Effect) -> u32 {
        let (a, b) = (self.levels_a as u32, self.levels_b as u32);
        match effect {
            Effect::A => a - 1,
            Effect::B => b - 1,
            Effect::AB => (a - 1) * (b - 1),
        }
    }
}

fn normal_draws<R: Rng>(rng: &mut R, count: usize, sd: f64) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

fn center(xs: &mut [f64]) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter_mut().for_each(|x| *x -= m);
}

/// One simulated dataset, fully determined by
/// `(master_seed, cell_n, g, replicate_index)`.
pub fn generate_dataset(
    config: &SimulationConfig,
    cell_n: usize,
    g: f64,
    replicate_index: u64,
) -> Result<FactorialDataset> {
    let (a, b) = (config.levels_a, config.levels_b);
    let mut rng = replicate_rng(config.master_seed, cell_n, g, replicate_index);

    let effect_sd = g.sqrt();
    let mut alpha = normal_draws(&mut rng, a, effect_sd);
    let mut tau = normal_draws(&mut rng, b, effect_sd);
    let mut gamma = normal_draws(&mut rng, a * b, effect_sd);
    if g == 0.0 {
        alpha.fill(0.0);
        tau.fill(0.0);
        gamma.fill(0.0);
    } else if config.sum_to_zero {
        center(&mut alpha);
        center(&mut tau);
        // Double-center the interaction.
        for i in 0..a {
            center(&mut gamma[i * b..(i + 1) * b]);
        }
        for j in 0..b {
            let m = (0..a).map(|i| gamma[i * b + j]).sum::<f64>() / a as f64;
            (0..a).for_each(|i| gamma[i * b + j] -= m);
        }
    }

    let mut values = Vec::with_capacity(a * b * cell_n);
    for i in 0..a {
        for j in 0..b {
            let mean = alpha[i] + tau[j] + gamma[i * b + j];
            for _ in 0..cell_n {
                let eps: f64 = StandardNormal.sample(&mut rng);
                values.push(mean + config.error_sd * eps);
            }
        }
    }
    FactorialDataset::new(a, b, cell_n, values)
}

/// log BF10 along the summary path and the sums-of-squares path, per effect.
type ReplicateOutput = Option<Vec<(f64, f64)>>;

fn run_replicate(
    config: &SimulationConfig,
    effects: &[Effect],
    cell_n: usize,
    g: f64,
    replicate: u64,
) -> Result<ReplicateOutput> {
    let data = generate_dataset(config, cell_n, g, replicate)?;
    let table = match two_way_anova(&data) {
        Ok(t) => t,
        Err(Error::DegenerateData(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let n = config.n_effective(cell_n);
    let mut out = Vec::with_capacity(effects.len());
    for &effect in effects {
        let summary = effect_summary(&table, effect, config.n_convention)?;
        let via_f = bf01_from_summary(&summary).log_bf10;
        let sums = sse_pair_for_effect(&table, effect)?;
        let via_sse = bf01_from_sse(&sums, n, summary.df1())?.log_bf10;
        out.push((via_f, via_sse));
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(&hi) if frac > 0.0 => sorted[lo] + frac * (hi - sorted[lo]),
        _ => sorted[lo],
    }
}

/// Min, quartiles and max; quartiles interpolate linearly at `h = (m-1) p`.
pub fn five_number_summary(values: &[f64]) -> Result<FiveNumber> {
    if values.is_empty() {
        return Err(Error::invalid("five-number summary of an empty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(FiveNumber {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Bootstrap standard error of the sample median.
pub fn bootstrap_median_se(values: &[f64], resamples: usize, key: [u8; 32]) -> Option<f64> {
    if values.len() < 2 || resamples < 2 {
        return None;
    }
    let mut rng = stream_rng(key, 0);
    let mut buf = vec![0.0; values.len()];
    let medians: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..values.len())];
            }
            buf.sort_by(f64::total_cmp);
            quantile_sorted(&buf, 0.5)
        })
        .collect();
    let mean = medians.iter().sum::<f64>() / resamples as f64;
    let var = medians.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Some(var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub effect: Effect,
    pub cell_n: usize,
    pub g: f64,
    /// `n` handed to the Bayes factor under the configured convention.
    pub n_effective: u64,
    pub df1: u32,
    pub df2: u32,
    pub replications: usize,
    /// `None` only if every replicate was degenerate.
    pub five_number: Option<FiveNumber>,
    pub median_se: Option<f64>,
    pub alt_decision_rate: f64,
    pub path_consistency: f64,
    /// Largest `|Δ log BF10|` seen between the two paths.
    pub max_path_gap: f64,
    pub degenerate_replicates: usize,
}

impl ConditionResult {
    /// `-(df1/2) ln n`: log BF10 at `F = 0`, the smallest value possible.
    pub fn log_bf10_floor(&self) -> f64 {
        -(f64::from(self.df1) / 2.0) * (self.n_effective as f64).ln()
    }
}

fn snapped_decision(log_bf10: f64) -> bool {
    (log_bf10 / DECISION_GRID).round() * DECISION_GRID > 0.0
}

fn run_condition(
    config: &SimulationConfig,
    effects: &[Effect],
    cell_n: usize,
    g: f64,
    threads: Option<usize>,
) -> Result<Vec<ConditionResult>> {
    let reps = config.replications as u64;
    let work = |r: u64| run_replicate(config, effects, cell_n, g, r);
    let outputs: Vec<ReplicateOutput> = execute(reps, threads, work)?;

    let degenerate = outputs.iter().filter(|o| o.is_none()).count();
    let valid: Vec<&Vec<(f64, f64)>> = outputs.iter().flatten().collect();
    let df2 = (config.levels_a * config.levels_b * (cell_n - 1)) as u32;

    effects
        .iter()
        .enumerate()
        .map(|(e_idx, &effect)| {
            let pairs: Vec<(f64, f64)> = valid.iter().map(|v| v[e_idx]).collect();
            let via_f: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let m = pairs.len().max(1) as f64;
            let alt = via_f.iter().filter(|&&x| x > 0.0).count() as f64 / m;
            let agree = pairs
                .iter()
                .filter(|(a, b)| snapped_decision(*a) == snapped_decision(*b))
                .count() as f64
                / m;
            let gap = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let key = derive_key(
                config.master_seed,
                Domain::Bootstrap,
                &[cell_n as u64, g.to_bits(), effect as u64],
            );
            Ok(ConditionResult {
                effect,
                cell_n,
                g,
                n_effective: config.n_effective(cell_n),
                df1: config.effect_df(effect),
                df2,
                replications: config.replications,
                five_number: five_number_summary(&via_f).ok(),
                median_se: bootstrap_median_se(&via_f, BOOTSTRAP_RESAMPLES, key),
                alt_decision_rate: if pairs.is_empty() { 0.0 } else { alt },
                path_consistency: if pairs.is_empty() { 1.0 } else { agree },
                max_path_gap: gap,
                degenerate_replicates: degenerate,
            })
        })
        .collect()
}

/// Runs `work` for every replicate index and returns outputs in index order.
#[cfg(feature = "parallel")]
fn execute<T, F>(reps: u64, threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    match threads {
        Some(1) => (0..reps).map(work).collect(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| (0..reps).into_par_iter().map(&work).collect()),
        None => (0..reps).into_par_iter().map(&work).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<T, F>(reps: u64, _threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    (0..reps).map(work).collect()
}

/// Every `(cell size, g, effect)` condition, in config order.
pub fn run_simulation(config: &SimulationConfig) -> Result<Vec<ConditionResult>> {
    run_simulation_with_threads(config, None)
}

/// As [`run_simulation`], on a pool of `threads` workers (`None` uses the
/// global pool). The result does not depend on the thread count.
pub fn run_simulation_with_threads(
    config: &SimulationConfig,
    threads: Option<usize>,
) -> Result<Vec<ConditionResult>> {
    config.validate()?;
    if threads == Some(0) {
        return Err(Error::invalid("thread count must be at least 1"));
    }
    let effects = config.effects();
    let mut results = Vec::new();
    for &cell_n in &config.cell_sizes {
        for &g in &config.effect_variances {
            results.extend(run_condition(config, &effects, cell_n, g, threads)?);
        }
    }
    Ok(results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown report format `{other}`"))),
        }
    }
}

/// Formats `x` with `digits` significant digits, switching to exponent form
/// for very small or very large magnitudes.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

const CSV_HEADER: &str = "cell_n,g,effect,n_effective,df1,df2,min,q1,median,q3,max,median_se,alt_decision_rate,path_consistency,replications,degenerate_replicates";

fn sorted(results: &[ConditionResult]) -> Vec<&ConditionResult> {
    let mut rows: Vec<&ConditionResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        a.cell_n
            .cmp(&b.cell_n)
            .then(a.g.total_cmp(&b.g))
            .then(a.effect.cmp(&b.effect))
    });
    rows
}

/// Table of results, one row per condition, sorted by cell size, then g,
/// then effect. Markdown numbers carry six significant digits.
pub fn render_report(results: &[ConditionResult], format: ReportFormat) -> String {
    render_report_with_precision(results, format, 6)
}

pub fn render_report_with_precision(
    results: &[ConditionResult],
    format: ReportFormat,
    digits: usize,
) -> String {
    let rows = sorted(results);
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("plain data serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in rows {
                let fv = r.five_number;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.cell_n,
                    r.g,
                    r.effect,
                    r.n_effective,
                    r.df1,
                    r.df2,
                    opt(fv.map(|f| f.min)),
                    opt(fv.map(|f| f.q1)),
                    opt(fv.map(|f| f.median)),
                    opt(fv.map(|f| f.q3)),
                    opt(fv.map(|f| f.max)),
                    opt(r.median_se),
                    r.alt_decision_rate,
                    r.path_consistency,
                    r.replications,
                    r.degenerate_replicates,
                );
            }
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::from(
                "| cell n | g | effect | n | Min | Q1 | Median | Q3 | Max | Alt. rate | Consistency |\n\
                 |---:|---:|:---|---:|---:|---:|---:|---:|---:|---:|---:|\n",
            );
            let num = |x: Option<f64>| x.map(|v| format_sig(v, digits)).unwrap_or_default();
            for r in rows {
                let fv = r.five_number;
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.cell_n,
                    r.g,
                    r.effect,
                    r.n_effective,
                    num(fv.map(|f| f.min)),
                    num(fv.map(|f| f.q1)),
                    num(fv.map(|f| f.median)),
                    num(fv.map(|f| f.q3)),
                    num(fv.map(|f| f.max)),
                    format_sig(r.alt_decision_rate, digits),
                    format_sig(r.path_consistency, digits),
                );
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SimulationConfig {
        SimulationConfig {
            cell_sizes: vec![5],
            effect_variances: vec![0.0, 0.5],
            replications: 40,
            ..SimulationConfig::default_grid(11)
        }
    }

    #[test]
    fn five_numbers() {
        let f = five_number_summary(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((f.min, f.q1, f.median, f.q3, f.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let f = five_number_summary(&[4.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!((f.min, f.q1, f.median, f.q3, f.max), (1.0, 1.75, 2.5, 3.25, 4.0));
        let f = five_number_summary(&[7.0]).unwrap();
        assert_eq!((f.min, f.q1, f.median, f.q3, f.max), (7.0, 7.0, 7.0, 7.0, 7.0));
        assert!(five_number_summary(&[]).is_err());
    }

    #[test]
    fn null_world_has_no_effects() {
        let cfg = small_config();
        let d = generate_dataset(&cfg, 4, 0.0, 0).unwrap();
        // Same stream with g > 0 shifts every cell by its drawn effects; at
        // g = 0 the data are the noise alone.
        let mut rng = replicate_rng(cfg.master_seed, 4, 0.0, 0);
        let _skip: Vec<f64> = normal_draws(&mut rng, 2 + 3 + 6, 1.0);
        let noise: Vec<f64> = (0..24).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert_eq!(d.values(), noise.as_slice());
    }

    #[test]
    fn datasets_are_deterministic() {
        let cfg = small_config();
        let a = generate_dataset(&cfg, 6, 0.2, 17).unwrap();
        let b = generate_dataset(&cfg, 6, 0.2, 17).unwrap();
        assert_eq!(a.values(), b.values());
        let c = generate_dataset(&cfg, 6, 0.2, 18).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn sum_to_zero_centers_effects() {
        let cfg = SimulationConfig {
            sum_to_zero: true,
            error_sd: 1e-9,
            ..small_config()
        };
        let d = generate_dataset(&cfg, 2, 1.0, 0).unwrap();
        let grand = d.values().iter().sum::<f64>() / d.n_total() as f64;
        assert!(grand.abs() < 1e-8);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_config();
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.cell_sizes = vec![1];
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.effect_variances = vec![-0.1];
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.error_sd = 0.0;
        assert!(cfg.validate().is_err());
        assert!(SimulationConfig::default_grid(1).validate().is_ok());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: SimulationConfig = serde_json::from_str(
            r#"{"cell_sizes":[50],"effect_variances":[0,0.2],"replications":10,"master_seed":3}"#,
        )
        .unwrap();
        assert_eq!((cfg.levels_a, cfg.levels_b, cfg.error_sd), (2, 3, 1.0));
        assert_eq!(cfg.n_convention, NConvention::TotalObservations);
        let cfg: SimulationConfig = serde_json::from_str(
            r#"{"cell_sizes":[50],"effect_variances":[0],"replications":10,"master_seed":3,"n_convention":{"explicit":30}}"#,
        )
        .unwrap();
        assert_eq!(cfg.n_convention, NConvention::Explicit(30));
    }

    #[test]
    fn small_run_is_consistent() {
        let results = run_simulation(&small_config()).unwrap();
        assert_eq!(results.len(), 6);
        for r in &results {
            assert_eq!(r.path_consistency, 1.0);
            assert_eq!(r.degenerate_replicates, 0);
            let f = r.five_number.unwrap();
            assert!(f.min >= r.log_bf10_floor() - 1e-9);
            assert!(f.min <= f.q1 && f.q1 <= f.median && f.median <= f.q3 && f.q3 <= f.max);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small_config();
        let one = run_simulation_with_threads(&cfg, Some(1)).unwrap();
        let four = run_simulation_with_threads(&cfg, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn report_shapes() {
        for fmt in [ReportFormat::Markdown, ReportFormat::Csv] {
            assert_eq!(render_report(&[], fmt).lines().count(), if fmt == ReportFormat::Csv { 1 } else { 2 });
        }
        assert_eq!(render_report(&[], ReportFormat::Json).trim(), "[]");

        let results = run_simulation(&small_config()).unwrap();
        let one = &results[..1];
        let csv = render_report(one, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 2);
        let json: serde_json::Value =
            serde_json::from_str(&render_report(one, ReportFormat::Json)).unwrap();
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let median: f64 = fields[8].parse().unwrap();
        assert_eq!(json[0]["five_number"]["median"].as_f64().unwrap(), median);
        let rate: f64 = fields[12].parse().unwrap();
        assert_eq!(json[0]["alt_decision_rate"].as_f64().unwrap(), rate);
    }

    #[test]
    fn report_ordering() {
        let mut results = run_simulation(&small_config()).unwrap();
        results.reverse();
        let csv = render_report(&results, ReportFormat::Csv);
        let keys: Vec<(String, String)> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[1].to_string(), f[2].to_string())
            })
            .collect();
        let expected: Vec<(String, String)> = ["0", "0.5"]
            .iter()
            .flat_map(|g| ["A", "B", "AB"].map(|e| (g.to_string(), e.to_string())))
            .collect();
        assert_eq!(keys, expected);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(1.756568524, 6), "1.75657");
        assert_eq!(format_sig(0.569290, 4), "0.5693");
        assert_eq!(format_sig(300.0, 6), "300.000");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(-3.912023, 3), "-3.91");
        assert_eq!(format_sig(1.5e-7, 3), "1.50e-7");
        assert_eq!(format_sig(f64::MAX, 3), "1.80e308");
    }
}
