//! Down-selection with regression and significance.
//!
//! Three stages reduce a wide indicator set to a compact scoring model:
//!
//! 1. [`backward_eliminate`] refits the regression and drops, one per
//!    phase, the feature with the largest p-value among those that are both
//!    insignificant and weakly correlated with the response.
//! 2. [`variance_attribution`] decomposes the correlation matrix of the
//!    survivors and credits each component's share of variance to the
//!    original variable that loads most heavily on it.
//! 3. [`select_representatives`] walks the variables by descending share and
//!    keeps those not strongly correlated with any already kept.
//!
//! [`run_pipeline`] chains the stages and fits the final model.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{FeatureMatrix, IngestError};
use crate::numerics::{correlation_matrix, eigen_symmetric, pearson, Matrix, NumericsError};
use crate::regression::{fit_mlr, FitReport, RegressionError};

pub const DEFAULT_P_THRESHOLD: f64 = 0.05;
pub const DEFAULT_CORR_THRESHOLD: f64 = 0.4;
pub const DEFAULT_PAIRWISE_THRESHOLD: f64 = 0.85;

/// Principal-factor sums must vanish to this tolerance.
const FACTOR_SUM_TOL: f64 = 1e-6;
/// Loadings closer than this are treated as tied.
const LOADING_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Elimination,
    Attribution,
    Selection,
    FinalFit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Elimination => "backward elimination",
            Stage::Attribution => "variance attribution",
            Stage::Selection => "representative selection",
            Stage::FinalFit => "final fit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DsrsError {
    #[error(transparent)]
    Regression(#[from] RegressionError),

    #[error(transparent)]
    Numerics(#[from] NumericsError),

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error("feature `{0}` is constant")]
    ConstantFeature(String),

    #[error("no significant features: elimination would remove `{0}`, the last remaining feature")]
    NoSignificantFeatures(String),

    #[error("principal factor {component} sums to {sum:e}, expected 0")]
    FactorSumNonzero { component: usize, sum: f64 },

    #[error("correlation matrix is {found}x{found}, expected {expected}x{expected}")]
    CorrelationShape { expected: usize, found: usize },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<DsrsError>,
    },
}

impl DsrsError {
    fn at(self, stage: Stage) -> DsrsError {
        DsrsError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// Selection thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// A feature may be eliminated only if its p-value exceeds this.
    pub p_threshold: f64,
    /// ...and its |correlation| with the response is below this.
    pub corr_threshold: f64,
    /// Representatives must be pairwise correlated below this.
    pub pairwise_threshold: f64,
    pub max_features: Option<usize>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            p_threshold: DEFAULT_P_THRESHOLD,
            corr_threshold: DEFAULT_CORR_THRESHOLD,
            pairwise_threshold: DEFAULT_PAIRWISE_THRESHOLD,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub name: String,
    pub p_value: f64,
    /// Pearson correlation with the response.
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub name: String,
    pub p_value: f64,
    pub correlation: f64,
    pub reason: String,
}

/// One refit of the elimination loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub features: Vec<FeatureStat>,
    pub r_squared: f64,
    pub f_significance: f64,
    /// `None` only for the last phase.
    pub removed: Option<Removal>,
}

impl Phase {
    pub fn feature_names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub phases: Vec<Phase>,
}

impl EliminationTrace {
    pub fn final_phase(&self) -> Option<&Phase> {
        self.phases.last()
    }

    /// Feature count at each phase.
    pub fn feature_counts(&self) -> Vec<usize> {
        self.phases.iter().map(|p| p.features.len()).collect()
    }

    pub fn removed(&self) -> Vec<&str> {
        self.phases
            .iter()
            .filter_map(|p| p.removed.as_ref().map(|r| r.name.as_str()))
            .collect()
    }

    /// Per-phase decision table: `phase, factor, p_value, correlation,
    /// retained` where `retained` is `Yes` or `No`.
    pub fn to_delimited(&self, delimiter: u8) -> String {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(Vec::new());
        let mut write = |row: [String; 5]| writer.write_record(&row).expect("writing to memory");
        write(["phase", "factor", "p_value", "correlation", "retained"].map(String::from));
        for (i, phase) in self.phases.iter().enumerate() {
            let removed = phase.removed.as_ref().map(|r| r.name.as_str());
            for f in &phase.features {
                write([
                    (i + 1).to_string(),
                    f.name.clone(),
                    format!("{:.6e}", f.p_value),
                    format!("{:.6}", f.correlation),
                    if removed == Some(f.name.as_str()) { "No" } else { "Yes" }.to_string(),
                ]);
            }
        }
        let bytes = writer.into_inner().expect("in-memory writer");
        String::from_utf8(bytes).expect("utf-8 input")
    }
}

fn response_correlations(m: &FeatureMatrix) -> Result<Vec<f64>, DsrsError> {
    m.feature_names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            pearson(&m.x().column(j), m.y()).map_err(|e| match e {
                NumericsError::ConstantColumn { column: 0 } => DsrsError::ConstantFeature(name.clone()),
                NumericsError::ConstantColumn { .. } => DsrsError::ConstantFeature("response".into()),
                other => other.into(),
            })
        })
        .collect()
}

/// Iterative backward elimination.
///
/// Each phase fits the current features; among those with
/// `p > p_threshold` and `|r| < corr_threshold` the one with the largest
/// p-value is removed (earliest column on ties). Stops when nothing
/// qualifies.
pub fn backward_eliminate(
    m: &FeatureMatrix,
    p_threshold: f64,
    corr_threshold: f64,
) -> Result<(FeatureMatrix, EliminationTrace), DsrsError> {
    let all_corr = response_correlations(m)?;
    let mut current = m.clone();
    let mut corr = all_corr;
    let mut trace = EliminationTrace::default();

    loop {
        let fit = fit_mlr(&current)?;
        let features: Vec<FeatureStat> = current
            .feature_names()
            .iter()
            .enumerate()
            .map(|(j, name)| FeatureStat {
                name: name.clone(),
                p_value: fit.p_values[j + 1],
                correlation: corr[j],
            })
            .collect();

        let mut worst: Option<usize> = None;
        for (j, f) in features.iter().enumerate() {
            let eligible = f.p_value > p_threshold && f.correlation.abs() < corr_threshold;
            if eligible && worst.is_none_or(|w| f.p_value > features[w].p_value) {
                worst = Some(j);
            }
        }

        let Some(w) = worst else {
            trace.phases.push(Phase {
                features,
                r_squared: fit.r_squared,
                f_significance: fit.f_significance,
                removed: None,
            });
            return Ok((current, trace));
        };

        let victim = &features[w];
        if features.len() == 1 {
            return Err(DsrsError::NoSignificantFeatures(victim.name.clone()));
        }
        let removal = Removal {
            name: victim.name.clone(),
            p_value: victim.p_value,
            correlation: victim.correlation,
            reason: format!(
                "p-value {:.6} > {p_threshold} and |r| {:.6} < {corr_threshold}",
                victim.p_value,
                victim.correlation.abs()
            ),
        };
        let keep: Vec<String> = features
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != w)
            .map(|(_, f)| f.name.clone())
            .collect();
        trace.phases.push(Phase {
            features,
            r_squared: fit.r_squared,
            f_significance: fit.f_significance,
            removed: Some(removal),
        });
        current = current.select(&keep)?;
        corr.remove(w);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceShare {
    pub feature: String,
    /// Percentage of total variability, 0..=100.
    pub percent: f64,
}

/// Per-variable share of total variability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceAttribution {
    /// Features in input column order; indexes the correlation matrix.
    pub features: Vec<String>,
    /// Descending by share; ties keep input order.
    pub shares: Vec<VarianceShare>,
}

impl VarianceAttribution {
    pub fn share(&self, feature: &str) -> Option<f64> {
        self.shares.iter().find(|s| s.feature == feature).map(|s| s.percent)
    }

    pub fn ordering(&self) -> Vec<&str> {
        self.shares.iter().map(|s| s.feature.as_str()).collect()
    }

    pub fn total(&self) -> f64 {
        self.shares.iter().map(|s| s.percent).sum()
    }
}

/// Eigen-based attribution of variance to the original variables.
///
/// Columns are standardized and their correlation matrix decomposed.
/// Principal factors are the standardized rows projected on each
/// eigenvector; each factor's sum of squares is its share of variance,
/// credited to the variable with the largest absolute loading in that
/// eigenvector (earliest column on ties) and accumulated per variable.
pub fn variance_attribution(m: &FeatureMatrix) -> Result<VarianceAttribution, DsrsError> {
    let names = m.feature_names();
    let constant = |e: NumericsError| match e {
        NumericsError::ConstantColumn { column } => DsrsError::ConstantFeature(names[column].clone()),
        other => other.into(),
    };
    let (n, p) = (m.n(), m.p());
    let standardized = (0..p)
        .map(|j| {
            crate::numerics::standardize(&m.x().column(j)).map_err(|e| match e {
                NumericsError::ConstantColumn { .. } => DsrsError::ConstantFeature(names[j].clone()),
                other => other.into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let z = Matrix::from_columns(&standardized)?;
    let corr = correlation_matrix(m.x()).map_err(constant)?;
    let eig = eigen_symmetric(&corr)?;
    let factors = z.matmul(&eig.eigenvectors)?;

    let mut sum_squares = vec![0.0; p];
    for (i, ss) in sum_squares.iter_mut().enumerate() {
        let mut sum = 0.0;
        for r in 0..n {
            let f = factors[(r, i)];
            sum += f;
            *ss += f * f;
        }
        if sum.abs() > FACTOR_SUM_TOL {
            return Err(DsrsError::FactorSumNonzero { component: i, sum });
        }
    }
    let total: f64 = sum_squares.iter().sum();

    let mut credit = vec![0.0; p];
    for (i, ss) in sum_squares.iter().enumerate() {
        let loadings = eig.eigenvector(i);
        let mut owner = 0;
        for (j, l) in loadings.iter().enumerate().skip(1) {
            if l.abs() > loadings[owner].abs() + LOADING_TIE_TOL {
                owner = j;
            }
        }
        credit[owner] += 100.0 * ss / total;
    }

    let mut shares: Vec<VarianceShare> = names
        .iter()
        .zip(credit)
        .map(|(f, percent)| VarianceShare {
            feature: f.clone(),
            percent,
        })
        .collect();
    shares.sort_by(|a, b| b.percent.total_cmp(&a.percent));
    Ok(VarianceAttribution {
        features: names.to_vec(),
        shares,
    })
}

/// Greedy pick of low-correlation representatives in descending-share
/// order. `corr` is indexed like `attribution.features`.
pub fn select_representatives(
    attribution: &VarianceAttribution,
    corr: &Matrix,
    pairwise_threshold: f64,
    max_features: Option<usize>,
) -> Result<Vec<String>, DsrsError> {
    let p = attribution.features.len();
    if corr.nrows() != p || corr.ncols() != p {
        return Err(DsrsError::CorrelationShape {
            expected: p,
            found: corr.nrows(),
        });
    }
    let cap = max_features.unwrap_or(usize::MAX);
    let mut accepted: Vec<usize> = Vec::new();
    for share in &attribution.shares {
        if accepted.len() >= cap {
            break;
        }
        let j = attribution
            .features
            .iter()
            .position(|f| *f == share.feature)
            .expect("shares name attributed features");
        if accepted.iter().all(|&a| corr[(a, j)].abs() < pairwise_threshold) {
            accepted.push(j);
        }
    }
    Ok(accepted.into_iter().map(|j| attribution.features[j].clone()).collect())
}

/// Output of [`run_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsrsModel {
    pub selected_features: Vec<String>,
    pub fit: FitReport,
    pub attribution: VarianceAttribution,
    pub trace: EliminationTrace,
    pub thresholds: Thresholds,
}

/// Elimination, attribution, selection, then the final regression on the
/// selected columns.
pub fn run_pipeline(m: &FeatureMatrix, thresholds: &Thresholds) -> Result<DsrsModel, DsrsError> {
    let (reduced, trace) = backward_eliminate(m, thresholds.p_threshold, thresholds.corr_threshold)
        .map_err(|e| e.at(Stage::Elimination))?;

    let attribution = variance_attribution(&reduced).map_err(|e| e.at(Stage::Attribution))?;

    let corr = correlation_matrix(reduced.x()).map_err(|e| DsrsError::from(e).at(Stage::Selection))?;
    let selected = select_representatives(
        &attribution,
        &corr,
        thresholds.pairwise_threshold,
        thresholds.max_features,
    )
    .map_err(|e| e.at(Stage::Selection))?;
    // Keep the surviving column order for the final model.
    let ordered: Vec<String> = reduced
        .feature_names()
        .iter()
        .filter(|f| selected.contains(f))
        .cloned()
        .collect();

    let final_matrix = reduced
        .select(&ordered)
        .map_err(|e| DsrsError::from(e).at(Stage::FinalFit))?;
    let fit = fit_mlr(&final_matrix).map_err(|e| DsrsError::from(e).at(Stage::FinalFit))?;

    Ok(DsrsModel {
        selected_features: ordered,
        fit,
        attribution,
        trace,
        thresholds: *thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(names: &[&str], columns: &[Vec<f64>], y: Vec<f64>) -> FeatureMatrix {
        let x = Matrix::from_columns(columns).unwrap();
        let ids = (0..y.len()).collect();
        FeatureMatrix::new(names.iter().map(|s| s.to_string()).collect(), x, y, ids).unwrap()
    }

    fn attribution(names: &[&str], percents: &[f64]) -> VarianceAttribution {
        let mut shares: Vec<VarianceShare> = names
            .iter()
            .zip(percents)
            .map(|(f, &percent)| VarianceShare {
                feature: f.to_string(),
                percent,
            })
            .collect();
        shares.sort_by(|a, b| b.percent.total_cmp(&a.percent));
        VarianceAttribution {
            features: names.iter().map(|s| s.to_string()).collect(),
            shares,
        }
    }

    #[test]
    fn uncorrelated_pair_splits_evenly() {
        let a = vec![1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0];
        let m = matrix(&["a", "b"], &[a, b], vec![0.0, 1.0, 3.0, 2.0]);
        let att = variance_attribution(&m).unwrap();
        assert!((att.share("a").unwrap() - 50.0).abs() < 1e-9);
        assert!((att.share("b").unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn perfectly_correlated_pair_goes_to_first() {
        // Eigenvalues of [[1,1],[1,1]] are 2 and 0; loadings tie, so the
        // earlier column owns both components.
        let a = vec![1.0, 2.0, 3.0, 5.0, 8.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 1.0).collect();
        let m = matrix(&["a", "b"], &[a, b], vec![1.0, 0.0, 1.0, 0.0, 1.0]);
        let att = variance_attribution(&m).unwrap();
        assert!((att.share("a").unwrap() - 100.0).abs() < 1e-6);
        assert!(att.share("b").unwrap().abs() < 1e-6);
        assert_eq!(att.ordering(), vec!["a", "b"]);
    }

    #[test]
    fn representatives_respect_threshold_and_cap() {
        let att = attribution(&["a", "b", "c"], &[60.0, 30.0, 10.0]);
        let mut corr = Matrix::identity(3);
        assert_eq!(select_representatives(&att, &corr, 0.85, None).unwrap(), vec!["a", "b", "c"]);
        assert_eq!(select_representatives(&att, &corr, 0.85, Some(1)).unwrap(), vec!["a"]);

        corr[(0, 2)] = 0.9;
        corr[(2, 0)] = 0.9;
        corr[(1, 2)] = -0.2;
        corr[(2, 1)] = -0.2;
        assert_eq!(select_representatives(&att, &corr, 0.85, None).unwrap(), vec!["a", "b"]);
        // negative correlation counts by magnitude
        corr[(0, 1)] = -0.95;
        corr[(1, 0)] = -0.95;
        assert_eq!(select_representatives(&att, &corr, 0.85, None).unwrap(), vec!["a"]);
    }

    #[test]
    fn representatives_reject_wrong_shape() {
        let att = attribution(&["a", "b"], &[60.0, 40.0]);
        assert!(matches!(
            select_representatives(&att, &Matrix::identity(3), 0.85, None),
            Err(DsrsError::CorrelationShape { .. })
        ));
    }

    #[test]
    fn single_significant_feature_is_fixed_point() {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| 2.0 * v + if i % 2 == 0 { 0.3 } else { -0.3 }).collect();
        let m = matrix(&["x"], &[x], y);
        let (reduced, trace) = backward_eliminate(&m, 0.05, 0.4).unwrap();
        assert_eq!(reduced.feature_names(), m.feature_names());
        assert_eq!(trace.phases.len(), 1);
        assert!(trace.phases[0].removed.is_none());

        let model = run_pipeline(&m, &Thresholds::default()).unwrap();
        assert_eq!(model.selected_features, vec!["x".to_string()]);
    }

    #[test]
    fn lone_insignificant_feature_is_error() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = vec![1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
        let m = matrix(&["noise"], &[x], y);
        assert_eq!(
            backward_eliminate(&m, 0.05, 0.4).unwrap_err(),
            DsrsError::NoSignificantFeatures("noise".into())
        );
        let err = run_pipeline(&m, &Thresholds::default()).unwrap_err();
        assert!(matches!(err, DsrsError::Stage { stage: Stage::Elimination, .. }));
        assert!(err.to_string().starts_with("backward elimination: "));
    }

    #[test]
    fn constant_feature_named() {
        let m = matrix(
            &["ok", "flat"],
            &[vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![3.0; 5]],
            vec![1.0, 3.0, 2.0, 5.0, 4.0],
        );
        assert_eq!(variance_attribution(&m).unwrap_err(), DsrsError::ConstantFeature("flat".into()));
    }

    #[test]
    fn trace_table_layout() {
        let trace = EliminationTrace {
            phases: vec![
                Phase {
                    features: vec![
                        FeatureStat { name: "a".into(), p_value: 1e-9, correlation: 0.8 },
                        FeatureStat { name: "b".into(), p_value: 0.82, correlation: 0.17 },
                    ],
                    r_squared: 0.7,
                    f_significance: 1e-20,
                    removed: Some(Removal { name: "b".into(), p_value: 0.82, correlation: 0.17, reason: String::new() }),
                },
                Phase {
                    features: vec![FeatureStat { name: "a".into(), p_value: 1e-10, correlation: 0.8 }],
                    r_squared: 0.7,
                    f_significance: 1e-21,
                    removed: None,
                },
            ],
        };
        let table = trace.to_delimited(b';');
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "phase;factor;p_value;correlation;retained");
        assert_eq!(lines[2], "1;b;8.200000e-1;0.170000;No");
        assert_eq!(lines.len(), 4);
        assert_eq!(trace.feature_counts(), vec![2, 1]);
    }
}
