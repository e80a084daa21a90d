//! Balanced fixed-effects ANOVA, one-way or two-way with interaction.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bf::{AnovaSummary, SumsOfSquares};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Effect {
    A,
    B,
    AB,
}

impl Effect {
    pub const ALL: [Effect; 3] = [Effect::A, Effect::B, Effect::AB];

    pub fn as_str(self) -> &'static str {
        match self {
            Effect::A => "A",
            Effect::B => "B",
            Effect::AB => "AB",
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which count stands in for `n` when an ANOVA effect is turned into a
/// Bayes factor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NConvention {
    #[default]
    TotalObservations,
    CellCount,
    Explicit(u64),
}


impl FromStr for NConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "total" | "total_observations" => Ok(NConvention::TotalObservations),
            "cell" | "cell_count" => Ok(NConvention::CellCount),
            other => other.parse::<u64>().map(NConvention::Explicit).map_err(|_| {
                Error::invalid(format!(
                    "n convention must be `total`, `cell` or an integer, got `{other}`"
                ))
            }),
        }
    }
}

impl fmt::Display for NConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NConvention::TotalObservations => f.write_str("total"),
            NConvention::CellCount => f.write_str("cell"),
            NConvention::Explicit(n) => write!(f, "{n}"),
        }
    }
}

/// Balanced `a × b` layout with `cell_n` observations per cell, stored
/// row-major as `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialDataset {
    levels_a: usize,
    levels_b: usize,
    cell_n: usize,
    values: Vec<f64>,
}

impl FactorialDataset {
    pub fn new(levels_a: usize, levels_b: usize, cell_n: usize, values: Vec<f64>) -> Result<Self> {
        if levels_a == 0 || levels_b == 0 {
            return Err(Error::invalid("each factor needs at least one level"));
        }
        if cell_n < 2 {
            return Err(Error::invalid(format!(
                "cells need at least 2 observations, got {cell_n}"
            )));
        }
        let expected = levels_a * levels_b * cell_n;
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "a {levels_a}x{levels_b} design with {cell_n} per cell needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite observation {bad}")));
        }
        Ok(FactorialDataset {
            levels_a,
            levels_b,
            cell_n,
            values,
        })
    }

    /// Builds a dataset from `(a_level, b_level, value)` triples. Level labels
    /// are numbered in order of first appearance; cells must all hold the
    /// same number of observations.
    pub fn from_long<I, S>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let mut a_index: HashMap<String, usize> = HashMap::new();
        let mut b_index: HashMap<String, usize> = HashMap::new();
        let mut cells: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        for (a, b, y) in records {
            let next_a = a_index.len();
            let i = *a_index.entry(a.as_ref().to_string()).or_insert(next_a);
            let next_b = b_index.len();
            let j = *b_index.entry(b.as_ref().to_string()).or_insert(next_b);
            cells.entry((i, j)).or_default().push(y);
        }
        let (la, lb) = (a_index.len(), b_index.len());
        if la == 0 {
            return Err(Error::invalid("no observations"));
        }
        let cell_n = cells.get(&(0, 0)).map_or(0, Vec::len);
        let mut values = Vec::with_capacity(la * lb * cell_n);
        for i in 0..la {
            for j in 0..lb {
                let cell = cells.get(&(i, j)).map_or(&[][..], Vec::as_slice);
                if cell.len() != cell_n {
                    return Err(Error::invalid(format!(
                        "unbalanced design: cell ({i}, {j}) has {} observations, expected {cell_n}",
                        cell.len()
                    )));
                }
                values.extend_from_slice(cell);
            }
        }
        Self::new(la, lb, cell_n, values)
    }

    /// Reads `a_level,b_level,value` CSV (with header).
    pub fn read_long_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let (ca, cb, cv) = (col("a_level")?, col("b_level")?, col("value")?);
        let mut triples = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let raw = &record[cv];
            let y: f64 = raw.parse().map_err(|_| Error::Row {
                line,
                column: "value".into(),
                message: format!("cannot parse `{raw}`"),
            })?;
            triples.push((record[ca].to_string(), record[cb].to_string(), y));
        }
        Self::from_long(triples)
    }

    pub fn levels_a(&self) -> usize {
        self.levels_a
    }

    pub fn levels_b(&self) -> usize {
        self.levels_b
    }

    pub fn cell_n(&self) -> usize {
        self.cell_n
    }

    pub fn n_total(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.cell_offset(i, j) + k]
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let start = self.cell_offset(i, j);
        &self.values[start..start + self.cell_n]
    }

    fn cell_offset(&self, i: usize, j: usize) -> usize {
        (i * self.levels_b + j) * self.cell_n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectRow {
    pub effect: Effect,
    pub ss: f64,
    pub df: u32,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTable {
    pub effects: Vec<EffectRow>,
    pub ss_error: f64,
    pub df_error: u32,
    pub total_ss: f64,
    pub n_total: u64,
    pub cell_n: u64,
}

impl AnovaTable {
    pub fn effect(&self, effect: Effect) -> Option<&EffectRow> {
        self.effects.iter().find(|r| r.effect == effect)
    }
}

fn mean(xs: impl Iterator<Item = f64>, count: usize) -> f64 {
    xs.sum::<f64>() / count as f64
}

fn to_df(x: usize) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::invalid("degrees of freedom exceed 32 bits"))
}

/// Classical balanced decomposition through marginal means. Factors with a
/// single level contribute no row.
pub fn two_way_anova(data: &FactorialDataset) -> Result<AnovaTable> {
    let (a, b, n) = (data.levels_a, data.levels_b, data.cell_n);
    if a < 2 && b < 2 {
        return Err(Error::invalid(
            "at least one factor needs two or more levels",
        ));
    }
    let n_total = data.n_total();

    // Pass one: means.
    let grand = mean(data.values.iter().copied(), n_total);
    let cell_means: Vec<f64> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, j)))
        .map(|(i, j)| mean(data.cell(i, j).iter().copied(), n))
        .collect();
    let a_means: Vec<f64> = (0..a)
        .map(|i| mean((0..b).flat_map(|j| data.cell(i, j).iter().copied()), b * n))
        .collect();
    let b_means: Vec<f64> = (0..b)
        .map(|j| mean((0..a).flat_map(|i| data.cell(i, j).iter().copied()), a * n))
        .collect();

    // Pass two: squared deviations.
    let mut ss_error = 0.0;
    let mut total_ss = 0.0;
    let mut ss_ab = 0.0;
    for i in 0..a {
        for j in 0..b {
            let cm = cell_means[i * b + j];
            for &y in data.cell(i, j) {
                ss_error += (y - cm) * (y - cm);
                total_ss += (y - grand) * (y - grand);
            }
            let inter = cm - a_means[i] - b_means[j] + grand;
            ss_ab += inter * inter;
        }
    }
    let ss_a = (b * n) as f64 * a_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_b = (a * n) as f64 * b_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_ab = n as f64 * ss_ab;

    let scale = data.values.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let floor = n_total as f64 * (16.0 * f64::EPSILON * scale).powi(2);
    if ss_error <= floor {
        return Err(Error::DegenerateData(
            "error sum of squares is zero; every cell is constant".to_string(),
        ));
    }

    let df_error = to_df(a * b * (n - 1))?;
    let ms_error = ss_error / f64::from(df_error);
    let mut effects = Vec::with_capacity(3);
    let mut push = |effect, ss: f64, df: usize| -> Result<()> {
        let df = to_df(df)?;
        effects.push(EffectRow {
            effect,
            ss,
            df,
            f: (ss / f64::from(df)) / ms_error,
        });
        Ok(())
    };
    if a >= 2 {
        push(Effect::A, ss_a, a - 1)?;
    }
    if b >= 2 {
        push(Effect::B, ss_b, b - 1)?;
    }
    if a >= 2 && b >= 2 {
        push(Effect::AB, ss_ab, (a - 1) * (b - 1))?;
    }

    Ok(AnovaTable {
        effects,
        ss_error,
        df_error,
        total_ss,
        n_total: n_total as u64,
        cell_n: n as u64,
    })
}

fn row(table: &AnovaTable, effect: Effect) -> Result<&EffectRow> {
    table
        .effect(effect)
        .ok_or_else(|| Error::invalid(format!("effect {effect} is not part of this design")))
}

/// Packs one effect as `F(df, df_error)` with `n` chosen by `convention`.
pub fn effect_summary(
    table: &AnovaTable,
    effect: Effect,
    convention: NConvention,
) -> Result<AnovaSummary> {
    let r = row(table, effect)?;
    let n = match convention {
        NConvention::TotalObservations => table.n_total,
        NConvention::CellCount => table.cell_n,
        NConvention::Explicit(n) if n < 2 => {
            return Err(Error::invalid(format!("explicit n must be at least 2, got {n}")))
        }
        NConvention::Explicit(n) => n,
    };
    AnovaSummary::new(r.f, r.df, table.df_error, n)
}

/// `SSE1 = SS_error`, `SSE0 = SS_effect + SS_error`.
pub fn sse_pair_for_effect(table: &AnovaTable, effect: Effect) -> Result<SumsOfSquares> {
    let r = row(table, effect)?;
    SumsOfSquares::new(r.ss, table.ss_error)
}
