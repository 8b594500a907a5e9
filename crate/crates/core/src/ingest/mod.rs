//! Indicator tables: parsing, missingness accounting, and assembly of
//! complete-case regression matrices.

mod columns;
mod table;

pub use columns::{Column, Indicator};
pub use table::{parse_number, parse_table, write_table, ParseOptions, QuarterSource};

use thiserror::Error;

use crate::numerics::Matrix;

/// Default ceiling on a feature's missing fraction.
pub const DEFAULT_MAX_MISSING: f64 = 0.20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8: {0}")]
    Encoding(String),

    #[error("row {row}: malformed table: {message}")]
    Malformed { row: usize, message: String },

    #[error("row 1: header is missing mandatory column `{name}`")]
    MissingColumn { name: String },

    #[error("row 1, column {column}: `{name}` duplicates column {first}")]
    DuplicateColumn {
        name: String,
        column: usize,
        first: usize,
    },

    #[error("row {row}, column {column} ({header}): {message}")]
    Cell {
        row: usize,
        column: usize,
        header: String,
        message: String,
    },

    #[error("record {index} ({title}) has no quarter")]
    MissingQuarter { index: usize, title: String },

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("column `{0}` listed more than once")]
    DuplicateFeature(String),

    #[error("feature list is empty")]
    EmptyFeatureList,

    #[error("insufficient observations: {n} complete rows for {p} features (need more than {})", p + 1)]
    InsufficientObservations { n: usize, p: usize },

    #[error("missing-fraction threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),

    #[error("{0}")]
    InvalidMatrix(String),

    #[error("failed to write table: {0}")]
    Write(String),
}

/// One journal-year row.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalRecord {
    pub title: String,
    pub year: Option<i32>,
    /// 1..=4 when present.
    pub quarter: Option<u8>,
    /// Indexed by [`Indicator::index`]; `None` marks a missing cell.
    pub indicators: [Option<f64>; Indicator::COUNT],
    pub sjr_score: Option<f64>,
}

impl JournalRecord {
    pub fn indicator(&self, ind: Indicator) -> Option<f64> {
        self.indicators[ind.index()]
    }

    pub fn value(&self, column: Column) -> Option<f64> {
        match column {
            Column::Quarter => self.quarter.map(f64::from),
            Column::Sjr => self.sjr_score,
            Column::Indicator(ind) => self.indicator(ind),
        }
    }
}

/// Records in input-file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub records: Vec<JournalRecord>,
    pub source_label: String,
    pub category: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Fraction of records with no value in `column`; zero for an empty
    /// dataset.
    pub fn missing_fraction(&self, column: Column) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let missing = self.records.iter().filter(|r| r.value(column).is_none()).count();
        missing as f64 / self.records.len() as f64
    }
}

/// Share of records in each quarter, `[Q1, Q2, Q3, Q4]`.
pub fn quarter_probabilities(dataset: &Dataset) -> Result<[f64; 4], IngestError> {
    if dataset.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let mut counts = [0usize; 4];
    for (index, r) in dataset.records.iter().enumerate() {
        let q = r.quarter.ok_or_else(|| IngestError::MissingQuarter {
            index,
            title: r.title.clone(),
        })?;
        counts[usize::from(q - 1)] += 1;
    }
    let total = dataset.len() as f64;
    Ok(counts.map(|c| c as f64 / total))
}

/// Indicators whose missing fraction is at most `max_missing_fraction`, in
/// canonical order.
pub fn sparsity_filter(dataset: &Dataset, max_missing_fraction: f64) -> Result<Vec<Indicator>, IngestError> {
    if !(0.0..=1.0).contains(&max_missing_fraction) {
        return Err(IngestError::InvalidThreshold(max_missing_fraction));
    }
    Ok(Indicator::ALL
        .into_iter()
        .filter(|&ind| dataset.missing_fraction(Column::Indicator(ind)) <= max_missing_fraction)
        .collect())
}

/// Indicators never offered to the default pipeline: the 3- and 4-year
/// citation rates overlap the 2-year window that the model uses.
pub const EXCLUDED_BY_DEFAULT: [Indicator; 2] = [Indicator::CitesPerDoc4y, Indicator::CitesPerDoc3y];

/// Default regression candidates: `Quarter` followed by the indicators that
/// pass [`sparsity_filter`], less [`EXCLUDED_BY_DEFAULT`].
pub fn candidate_features(dataset: &Dataset, max_missing_fraction: f64) -> Result<Vec<String>, IngestError> {
    let mut names = vec![Column::Quarter.name().to_string()];
    names.extend(
        sparsity_filter(dataset, max_missing_fraction)?
            .into_iter()
            .filter(|i| !EXCLUDED_BY_DEFAULT.contains(i))
            .map(|i| i.name().to_string()),
    );
    Ok(names)
}

/// Dense predictor matrix with named columns and its response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    x: Matrix,
    y: Vec<f64>,
    row_ids: Vec<usize>,
}

impl FeatureMatrix {
    /// Checks shape agreement, finiteness and `n > p + 1`.
    pub fn new(feature_names: Vec<String>, x: Matrix, y: Vec<f64>, row_ids: Vec<usize>) -> Result<Self, IngestError> {
        let (n, p) = (x.nrows(), x.ncols());
        if feature_names.is_empty() {
            return Err(IngestError::EmptyFeatureList);
        }
        if feature_names.len() != p || y.len() != n || row_ids.len() != n {
            return Err(IngestError::InvalidMatrix(format!(
                "shape mismatch: {} names, {}x{} matrix, {} responses, {} row ids",
                feature_names.len(),
                n,
                p,
                y.len(),
                row_ids.len()
            )));
        }
        for (i, name) in feature_names.iter().enumerate() {
            if feature_names[..i].contains(name) {
                return Err(IngestError::DuplicateFeature(name.clone()));
            }
        }
        if x.as_slice().iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(IngestError::InvalidMatrix("matrix holds a non-finite value".into()));
        }
        if n <= p + 1 {
            return Err(IngestError::InsufficientObservations { n, p });
        }
        Ok(Self {
            feature_names,
            x,
            y,
            row_ids,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.feature_index(name).map(|j| self.x.column(j))
    }

    /// Keeps only the named features, in the order given.
    pub fn select(&self, names: &[String]) -> Result<FeatureMatrix, IngestError> {
        let idx = names
            .iter()
            .map(|n| self.feature_index(n).ok_or_else(|| IngestError::UnknownColumn(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        FeatureMatrix::new(names.to_vec(), self.x.select_columns(&idx), self.y.clone(), self.row_ids.clone())
    }

    /// Reorders or subsets rows.
    pub fn select_rows(&self, rows: &[usize]) -> Result<FeatureMatrix, IngestError> {
        FeatureMatrix::new(
            self.feature_names.clone(),
            self.x.select_rows(rows),
            rows.iter().map(|&i| self.y[i]).collect(),
            rows.iter().map(|&i| self.row_ids[i]).collect(),
        )
    }
}

/// A [`FeatureMatrix`] together with the number of rows removed because
/// a modeled column was missing.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBuild {
    pub matrix: FeatureMatrix,
    pub dropped_rows: usize,
}

/// Assembles a complete-case matrix: any record missing one of `features`
/// or the response is dropped.
pub fn build_matrix<S: AsRef<str>>(dataset: &Dataset, features: &[S], response: &str) -> Result<MatrixBuild, IngestError> {
    if features.is_empty() {
        return Err(IngestError::EmptyFeatureList);
    }
    let resolve = |name: &str| Column::parse(name).ok_or_else(|| IngestError::UnknownColumn(name.to_string()));
    let columns = features
        .iter()
        .map(|f| resolve(f.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, c) in columns.iter().enumerate() {
        if columns[..i].contains(c) {
            return Err(IngestError::DuplicateFeature(c.name().to_string()));
        }
    }
    let response = resolve(response)?;

    let p = columns.len();
    let mut data = Vec::new();
    let mut y = Vec::new();
    let mut row_ids = Vec::new();
    for (id, record) in dataset.records.iter().enumerate() {
        let Some(target) = record.value(response) else {
            continue;
        };
        let row: Option<Vec<f64>> = columns.iter().map(|&c| record.value(c)).collect();
        if let Some(row) = row {
            data.extend(row);
            y.push(target);
            row_ids.push(id);
        }
    }
    let n = y.len();
    if n <= p + 1 {
        return Err(IngestError::InsufficientObservations { n, p });
    }
    let x = Matrix::from_row_major(n, p, data).expect("row length equals feature count");
    let names = columns.iter().map(|c| c.name().to_string()).collect();
    Ok(MatrixBuild {
        matrix: FeatureMatrix::new(names, x, y, row_ids)?,
        dropped_rows: dataset.len() - n,
    })
}
