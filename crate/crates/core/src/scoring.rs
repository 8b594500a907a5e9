//! Journal influence scores and agreement statistics against a reference
//! ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsrs::DsrsModel;
use crate::ingest::{Column, Indicator};
use crate::regression::RegressionError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("quarter must be 1-4, got {0}")]
    QuarterOutOfRange(i64),

    #[error("`{name}` must be finite and non-negative, got {value}")]
    InvalidIndicator { name: &'static str, value: f64 },

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("score vectors differ in length: {reference} vs {candidate}")]
    LengthMismatch { reference: usize, candidate: usize },

    #[error("need at least {needed} scores, got {found}")]
    TooFewScores { needed: usize, found: usize },

    #[error("score at position {0} is not finite")]
    NonFiniteScore(usize),
}

impl From<RegressionError> for ScoringError {
    fn from(e: RegressionError) -> Self {
        match e {
            RegressionError::MissingFeature(name) => ScoringError::MissingFeature(name),
            other => ScoringError::MissingFeature(other.to_string()),
        }
    }
}

/// Coefficient set of the published five-parameter score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PublishedPrecision {
    /// Constants as printed in the published equation.
    #[default]
    Rounded,
    /// Midpoints of the published 95% confidence bounds, which carry a few
    /// more digits than the printed coefficients.
    ConfidenceMidpoint,
}

/// The published fixed-coefficient influence score.
pub struct PublishedModel;

impl PublishedModel {
    pub const INTERCEPT: f64 = 0.513322;
    pub const QUARTER: f64 = -0.14076;
    pub const H_INDEX: f64 = 0.004716;
    pub const TOTAL_DOCS: f64 = 0.000131;
    pub const TOTAL_REFS: f64 = -8.3e-06;
    pub const CITES_PER_DOC_2Y: f64 = 0.301404;

    /// (lower, upper) 95% bounds in intercept, quarter, h-index, total docs,
    /// total refs, cites/doc order.
    const CONFIDENCE_BOUNDS: [(f64, f64); 6] = [
        (0.295518325, 0.731126),
        (-0.201667404, -0.07986),
        (0.002258486, 0.007174),
        (-0.000107049, 0.000369),
        (-2.35727e-05, 6.98e-06),
        (0.242036313, 0.360772),
    ];

    /// Feature names in the model, matching [`Column::name`].
    pub fn feature_names() -> [&'static str; 5] {
        [
            Column::Quarter.name(),
            Indicator::HIndex.name(),
            Indicator::TotalDocs.name(),
            Indicator::TotalRefs.name(),
            Indicator::CitesPerDoc2y.name(),
        ]
    }

    /// `(intercept, [quarter, h-index, total docs, total refs, cites/doc 2y])`.
    pub fn coefficients(precision: PublishedPrecision) -> (f64, [f64; 5]) {
        match precision {
            PublishedPrecision::Rounded => (
                Self::INTERCEPT,
                [
                    Self::QUARTER,
                    Self::H_INDEX,
                    Self::TOTAL_DOCS,
                    Self::TOTAL_REFS,
                    Self::CITES_PER_DOC_2Y,
                ],
            ),
            PublishedPrecision::ConfidenceMidpoint => {
                let mid = Self::CONFIDENCE_BOUNDS.map(|(lo, hi)| 0.5 * (lo + hi));
                (mid[0], [mid[1], mid[2], mid[3], mid[4], mid[5]])
            }
        }
    }
}

/// Published influence score with the printed constants.
pub fn jis_published(
    quarter: i64,
    h_index: f64,
    total_docs: f64,
    total_refs: f64,
    cites_per_doc_2y: f64,
) -> Result<f64, ScoringError> {
    jis_published_with(
        PublishedPrecision::Rounded,
        quarter,
        h_index,
        total_docs,
        total_refs,
        cites_per_doc_2y,
    )
}

pub fn jis_published_with(
    precision: PublishedPrecision,
    quarter: i64,
    h_index: f64,
    total_docs: f64,
    total_refs: f64,
    cites_per_doc_2y: f64,
) -> Result<f64, ScoringError> {
    if !(1..=4).contains(&quarter) {
        return Err(ScoringError::QuarterOutOfRange(quarter));
    }
    let checked = [
        ("h_index", h_index),
        ("total_docs", total_docs),
        ("total_refs", total_refs),
        ("cites_per_doc_2y", cites_per_doc_2y),
    ];
    for (name, value) in checked {
        if !value.is_finite() || value < 0.0 {
            return Err(ScoringError::InvalidIndicator { name, value });
        }
    }
    let (b0, w) = PublishedModel::coefficients(precision);
    Ok(b0
        + w[0] * quarter as f64
        + w[1] * h_index
        + w[2] * total_docs
        + w[3] * total_refs
        + w[4] * cites_per_doc_2y)
}

/// Score from a fitted model.
pub fn jis_fitted(model: &DsrsModel, features: &BTreeMap<String, f64>) -> Result<f64, ScoringError> {
    Ok(model.fit.predict(features)?.value)
}

/// Intercept plus named weights; the common form of every scoring model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub terms: Vec<(String, f64)>,
}

impl LinearModel {
    pub fn published(precision: PublishedPrecision) -> Self {
        let (intercept, w) = PublishedModel::coefficients(precision);
        Self {
            intercept,
            terms: PublishedModel::feature_names()
                .iter()
                .zip(w)
                .map(|(n, c)| (n.to_string(), c))
                .collect(),
        }
    }

    pub fn from_fit(model: &DsrsModel) -> Self {
        Self {
            intercept: model.fit.b0,
            terms: model
                .fit
                .feature_names
                .iter()
                .cloned()
                .zip(model.fit.b.iter().copied())
                .collect(),
        }
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.terms.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn score(&self, features: &BTreeMap<String, f64>) -> Result<f64, ScoringError> {
        let mut s = self.intercept;
        for (name, c) in &self.terms {
            let x = features
                .get(name)
                .ok_or_else(|| ScoringError::MissingFeature(name.clone()))?;
            s += c * x;
        }
        Ok(s)
    }
}

/// Percent overlap of each quartile block between two rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileMatchReport {
    pub per_quartile_match: [f64; 4],
    pub n: usize,
}

fn check_pair(reference: &[f64], candidate: &[f64], min_len: usize) -> Result<(), ScoringError> {
    if reference.len() != candidate.len() {
        return Err(ScoringError::LengthMismatch {
            reference: reference.len(),
            candidate: candidate.len(),
        });
    }
    if reference.len() < min_len {
        return Err(ScoringError::TooFewScores {
            needed: min_len,
            found: reference.len(),
        });
    }
    if let Some(i) = reference
        .iter()
        .chain(candidate)
        .position(|v| !v.is_finite())
    {
        return Err(ScoringError::NonFiniteScore(i % reference.len()));
    }
    Ok(())
}

/// Indices sorted by descending score; equal scores keep row order.
fn descending_ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// Quartile block sizes; the remainder of `n / 4` goes to the earliest
/// blocks.
pub fn quartile_block_sizes(n: usize) -> [usize; 4] {
    let (base, rem) = (n / 4, n % 4);
    std::array::from_fn(|q| base + usize::from(q < rem))
}

pub fn quartile_match(reference: &[f64], candidate: &[f64]) -> Result<QuartileMatchReport, ScoringError> {
    check_pair(reference, candidate, 4)?;
    let n = reference.len();
    let blocks = quartile_block_sizes(n);
    let quartile_of = |ranking: &[usize]| {
        let mut q = vec![0usize; n];
        let mut pos = 0;
        for (b, &size) in blocks.iter().enumerate() {
            for &i in &ranking[pos..pos + size] {
                q[i] = b;
            }
            pos += size;
        }
        q
    };
    let ref_q = quartile_of(&descending_ranking(reference));
    let cand_q = quartile_of(&descending_ranking(candidate));
    let mut hits = [0usize; 4];
    for (r, c) in ref_q.iter().zip(&cand_q) {
        if r == c {
            hits[*r] += 1;
        }
    }
    Ok(QuartileMatchReport {
        per_quartile_match: std::array::from_fn(|q| 100.0 * hits[q] as f64 / blocks[q] as f64),
        n,
    })
}

/// Mean and median absolute score difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankErrorStats {
    pub mean_abs_diff: f64,
    pub median_abs_diff: f64,
}

pub fn rank_error_stats(reference: &[f64], candidate: &[f64]) -> Result<RankErrorStats, ScoringError> {
    check_pair(reference, candidate, 1)?;
    let mut diffs: Vec<f64> = reference
        .iter()
        .zip(candidate)
        .map(|(r, c)| (r - c).abs())
        .collect();
    let n = diffs.len();
    let mean_abs_diff = diffs.iter().sum::<f64>() / n as f64;
    diffs.sort_by(f64::total_cmp);
    let median_abs_diff = if n % 2 == 1 {
        diffs[n / 2]
    } else {
        0.5 * (diffs[n / 2 - 1] + diffs[n / 2])
    };
    Ok(RankErrorStats {
        mean_abs_diff,
        median_abs_diff,
    })
}
