use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trials averaged into each participant's with-tool ratio.
pub const TRIALS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub avg: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
}

pub fn aggregate_ratios(values: &[f64]) -> Result<AggregateStats> {
    if values.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 values for a sample deviation, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("ratios must be finite"));
    }
    let n = values.len() as f64;
    let avg = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - avg) * (v - avg)).sum();
    Ok(AggregateStats {
        avg,
        std: (ss / (n - 1.0)).sqrt(),
    })
}

pub fn trial_mean(trials: &[f64; TRIALS]) -> f64 {
    trials.iter().sum::<f64>() / TRIALS as f64
}

/// One participant's residue ratios, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRatios {
    pub participant: String,
    pub r_p_baseline: f64,
    pub r_p_eyevis_mean: f64,
    pub r_b_baseline: f64,
    pub r_b_eyevis_mean: f64,
    #[serde(skip)]
    pub r_p_trials: Option<[f64; TRIALS]>,
    #[serde(skip)]
    pub r_b_trials: Option<[f64; TRIALS]>,
}

impl ParticipantRatios {
    /// Builds a row from raw trials; the means are derived.
    pub fn from_trials(
        participant: impl Into<String>,
        r_p_baseline: f64,
        r_b_baseline: f64,
        r_p_trials: [f64; TRIALS],
        r_b_trials: [f64; TRIALS],
    ) -> Self {
        Self {
            participant: participant.into(),
            r_p_baseline,
            r_p_eyevis_mean: trial_mean(&r_p_trials),
            r_b_baseline,
            r_b_eyevis_mean: trial_mean(&r_b_trials),
            r_p_trials: Some(r_p_trials),
            r_b_trials: Some(r_b_trials),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioColumn {
    PinkBaseline,
    PinkWithTool,
    BlackBaseline,
    BlackWithTool,
}

impl RatioColumn {
    pub const ALL: [RatioColumn; 4] = [
        RatioColumn::PinkBaseline,
        RatioColumn::PinkWithTool,
        RatioColumn::BlackBaseline,
        RatioColumn::BlackWithTool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RatioColumn::PinkBaseline => "r_p_baseline",
            RatioColumn::PinkWithTool => "r_p_eyevis_mean",
            RatioColumn::BlackBaseline => "r_b_baseline",
            RatioColumn::BlackWithTool => "r_b_eyevis_mean",
        }
    }

    fn get(self, row: &ParticipantRatios) -> f64 {
        match self {
            RatioColumn::PinkBaseline => row.r_p_baseline,
            RatioColumn::PinkWithTool => row.r_p_eyevis_mean,
            RatioColumn::BlackBaseline => row.r_b_baseline,
            RatioColumn::BlackWithTool => row.r_b_eyevis_mean,
        }
    }
}

/// Per-participant ratio table, read from CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantTable {
    pub rows: Vec<ParticipantRatios>,
}

const SHIPPED_TABLE: &str = include_str!("../../data/participant_ratios.csv");

impl ParticipantTable {
    /// The twelve-participant deployment table bundled with the crate.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_TABLE).expect("bundled table parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<ParticipantRatios>, _>>()
            .map_err(|e| Error::Format(format!("participant table: {e}")))?;
        Ok(Self { rows })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn column(&self, col: RatioColumn) -> Vec<f64> {
        self.rows.iter().map(|r| col.get(r)).collect()
    }

    pub fn column_stats(&self) -> Result<Vec<(RatioColumn, AggregateStats)>> {
        RatioColumn::ALL
            .iter()
            .map(|&c| Ok((c, aggregate_ratios(&self.column(c))?)))
            .collect()
    }
}
