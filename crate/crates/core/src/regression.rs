//! Multiple linear regression with an intercept, plus the allocation of
//! variation, ANOVA F-test and per-coefficient t-tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::FeatureMatrix;
use crate::numerics::{f_pvalue, t_pvalue_two_sided, Cholesky, Matrix, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressionError {
    #[error("collinear predictors: `{column}` is a linear combination of the intercept and earlier columns")]
    Collinear { column: String },

    #[error("insufficient observations: n = {n} with k = {k} predictors (need n > k + 1)")]
    InsufficientObservations { n: usize, k: usize },

    #[error("response is constant")]
    ConstantResponse,

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Fitted coefficients and their diagnostics.
///
/// `se`, `t_stats` and `p_values` are indexed with the intercept at 0 and
/// feature `j` at `j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub feature_names: Vec<String>,
    pub b0: f64,
    pub b: Vec<f64>,
    pub se: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub ssy: f64,
    pub ss0: f64,
    pub sst: f64,
    pub sse: f64,
    pub ssr: f64,
    pub r_squared: f64,
    pub multiple_r: f64,
    pub adjusted_r_squared: f64,
    pub msr: f64,
    pub mse: f64,
    pub f_stat: f64,
    pub f_significance: f64,
    pub se_residual: f64,
    pub n: usize,
    pub k: usize,
}

/// Output of [`FitReport::predict`].
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub value: f64,
    /// Supplied names that the model does not use.
    pub ignored: Vec<String>,
}

impl FitReport {
    /// Degrees of freedom of the residual, `n - k - 1`.
    pub fn residual_df(&self) -> usize {
        self.n - self.k - 1
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.b[j])
    }

    /// p-value of a feature's coefficient.
    pub fn feature_p_value(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.p_values[j + 1])
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// `b0 + sum(b_i * x_i)` over the model's features, looked up by name.
    pub fn predict(&self, features: &BTreeMap<String, f64>) -> Result<Prediction, RegressionError> {
        let mut value = self.b0;
        for (name, coef) in self.feature_names.iter().zip(&self.b) {
            let x = features
                .get(name)
                .ok_or_else(|| RegressionError::MissingFeature(name.clone()))?;
            value += coef * x;
        }
        let ignored = features
            .keys()
            .filter(|k| !self.feature_names.contains(k))
            .cloned()
            .collect();
        Ok(Prediction { value, ignored })
    }

    /// Predictions for every row of a design matrix laid out like the
    /// training features.
    pub fn predict_rows(&self, x: &Matrix) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| self.b0 + x.row(i).iter().zip(&self.b).map(|(v, c)| v * c).sum::<f64>())
            .collect()
    }
}

/// Ordinary least squares with intercept.
///
/// The cross-product matrix is formed on mean-centered columns and solved
/// by Cholesky; the intercept is recovered from the means.
pub fn fit_mlr(m: &FeatureMatrix) -> Result<FitReport, RegressionError> {
    let (n, k) = (m.n(), m.p());
    if n <= k + 1 {
        return Err(RegressionError::InsufficientObservations { n, k });
    }
    let x = m.x();
    let y = m.y();
    let nf = n as f64;

    let x_mean: Vec<f64> = (0..k).map(|j| (0..n).map(|i| x[(i, j)]).sum::<f64>() / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    let mut cross = Matrix::zeros(k, k);
    let mut xty = vec![0.0; k];
    for i in 0..n {
        let row = x.row(i);
        let dy = y[i] - y_mean;
        for a in 0..k {
            let da = row[a] - x_mean[a];
            xty[a] += da * dy;
            for b in a..k {
                cross[(a, b)] += da * (row[b] - x_mean[b]);
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            cross[(a, b)] = cross[(b, a)];
        }
    }

    let chol = Cholesky::factor(&cross).map_err(|e| match e {
        NumericsError::Collinear { column } => RegressionError::Collinear {
            column: m.feature_names()[column].clone(),
        },
        other => other.into(),
    })?;
    let b = chol.solve(&xty)?;
    let b0 = y_mean - b.iter().zip(&x_mean).map(|(c, mu)| c * mu).sum::<f64>();

    let ssy: f64 = y.iter().map(|v| v * v).sum();
    let ss0 = nf * y_mean * y_mean;
    let sst: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    if sst == 0.0 {
        return Err(RegressionError::ConstantResponse);
    }
    let fitted = (0..n).map(|i| b0 + x.row(i).iter().zip(&b).map(|(v, c)| v * c).sum::<f64>());
    let sse: f64 = fitted.zip(y).map(|(f, v)| (v - f) * (v - f)).sum();
    let ssr = sst - sse;

    let df_resid = n - k - 1;
    let r_squared = (ssr / sst).clamp(0.0, 1.0);
    let multiple_r = r_squared.sqrt();
    let adjusted_r_squared = 1.0 - (1.0 - r_squared) * (nf - 1.0) / df_resid as f64;
    let msr = ssr / k as f64;
    let mse = sse / df_resid as f64;
    let f_stat = if mse > 0.0 { msr / mse } else { f64::INFINITY };
    let se_residual = mse.sqrt();

    // (X'X)^-1 on [1 | X]: slope block is the inverse of the centered
    // cross-product; the intercept entry is 1/n + xbar' S^-1 xbar.
    let slope_c = chol.inverse_diagonal();
    let s_inv_mean = chol.solve(&x_mean)?;
    let c00 = 1.0 / nf + x_mean.iter().zip(&s_inv_mean).map(|(a, b)| a * b).sum::<f64>();

    let coefficients: Vec<f64> = std::iter::once(b0).chain(b.iter().copied()).collect();
    let c_diag: Vec<f64> = std::iter::once(c00).chain(slope_c).collect();
    let se: Vec<f64> = c_diag.iter().map(|c| se_residual * c.max(0.0).sqrt()).collect();
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&se)
        .map(|(&c, &s)| {
            if s > 0.0 {
                c / s
            } else if c == 0.0 {
                0.0
            } else {
                c.signum() * f64::INFINITY
            }
        })
        .collect();
    let df = u32::try_from(df_resid).map_err(|_| NumericsError::InvalidDegreesOfFreedom)?;
    let p_values = t_stats
        .iter()
        .map(|&t| t_pvalue_two_sided(t, df))
        .collect::<Result<Vec<_>, _>>()?;
    let f_significance = f_pvalue(
        f_stat,
        u32::try_from(k).map_err(|_| NumericsError::InvalidDegreesOfFreedom)?,
        df,
    )?;

    Ok(FitReport {
        feature_names: m.feature_names().to_vec(),
        b0,
        b,
        se,
        t_stats,
        p_values,
        ssy,
        ss0,
        sst,
        sse,
        ssr,
        r_squared,
        multiple_r,
        adjusted_r_squared,
        msr,
        mse,
        f_stat,
        f_significance,
        se_residual,
        n,
        k,
    })
}
