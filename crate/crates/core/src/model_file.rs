//! JSON persistence for scoring models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsrs::{DsrsModel, Thresholds, VarianceShare};
use crate::scoring::{LinearModel, PublishedModel, PublishedPrecision, ScoringError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("invalid model file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unsupported schema_version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("model lists {features} features but {coefficients} coefficients")]
    Shape { features: usize, coefficients: usize },

    #[error("model coefficient `{0}` is not finite")]
    NonFinite(String),

    #[error("published model does not carry the published constants")]
    NotPublished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Published,
    Fitted,
}

/// Fit statistics kept alongside a fitted model. Non-finite statistics are
/// stored as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub f_stat: Option<f64>,
    pub f_significance: f64,
    pub se_residual: f64,
    pub n: usize,
    /// Intercept first, then features in model order.
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<Option<f64>>,
    pub p_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Lowercase hex SHA-256 of the input table.
    pub input_sha256: Option<String>,
    /// Seconds since the Unix epoch; unset unless supplied by the caller.
    pub timestamp: Option<i64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(input_sha256: Option<String>, timestamp: Option<i64>) -> Self {
        Self {
            input_sha256,
            timestamp,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub response: Option<String>,
    pub features: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub thresholds: Option<Thresholds>,
    pub diagnostics: Option<Diagnostics>,
    pub variance_shares: Vec<VarianceShare>,
    pub provenance: Provenance,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ModelFile {
    /// The published five-feature model with its printed constants.
    pub fn published(provenance: Provenance) -> Self {
        let (intercept, w) = PublishedModel::coefficients(PublishedPrecision::Rounded);
        Self {
            schema_version: SCHEMA_VERSION,
            kind: ModelKind::Published,
            response: None,
            features: PublishedModel::feature_names().iter().map(|s| s.to_string()).collect(),
            intercept,
            coefficients: w.to_vec(),
            thresholds: None,
            diagnostics: None,
            variance_shares: Vec::new(),
            provenance,
        }
    }

    pub fn from_dsrs(model: &DsrsModel, response: &str, provenance: Provenance) -> Self {
        let fit = &model.fit;
        Self {
            schema_version: SCHEMA_VERSION,
            kind: ModelKind::Fitted,
            response: Some(response.to_string()),
            features: fit.feature_names.clone(),
            intercept: fit.b0,
            coefficients: fit.b.clone(),
            thresholds: Some(model.thresholds),
            diagnostics: Some(Diagnostics {
                r_squared: fit.r_squared,
                adjusted_r_squared: fit.adjusted_r_squared,
                f_stat: finite(fit.f_stat),
                f_significance: fit.f_significance,
                se_residual: fit.se_residual,
                n: fit.n,
                std_errors: fit.se.clone(),
                t_stats: fit.t_stats.iter().map(|&t| finite(t)).collect(),
                p_values: fit.p_values.clone(),
            }),
            variance_shares: model.attribution.shares.clone(),
            provenance,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    /// Pretty JSON with a trailing newline; stable under load and save.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), ModelFileError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ModelFileError::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        if self.features.len() != self.coefficients.len() {
            return Err(ModelFileError::Shape {
                features: self.features.len(),
                coefficients: self.coefficients.len(),
            });
        }
        if !self.intercept.is_finite() {
            return Err(ModelFileError::NonFinite("intercept".into()));
        }
        if let Some(i) = self.coefficients.iter().position(|c| !c.is_finite()) {
            return Err(ModelFileError::NonFinite(self.features[i].clone()));
        }
        if self.kind == ModelKind::Published {
            let reference = Self::published(self.provenance.clone());
            if self.features != reference.features
                || self.intercept != reference.intercept
                || self.coefficients != reference.coefficients
            {
                return Err(ModelFileError::NotPublished);
            }
        }
        Ok(())
    }

    pub fn linear_model(&self) -> LinearModel {
        LinearModel {
            intercept: self.intercept,
            terms: self
                .features
                .iter()
                .cloned()
                .zip(self.coefficients.iter().copied())
                .collect(),
        }
    }

    pub fn predict(&self, features: &BTreeMap<String, f64>) -> Result<f64, ScoringError> {
        self.linear_model().score(features)
    }
}
