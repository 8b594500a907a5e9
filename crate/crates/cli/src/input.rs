use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dsrs_core::ingest::{parse_table, Column, Dataset, ParseOptions};
use dsrs_core::model_file::ModelFile;
use dsrs_core::scoring::{LinearModel, PublishedPrecision};
use sha2::{Digest, Sha256};

use crate::{ModelSource, PublishedPrecisionArg};

pub struct LoadedTable {
    pub dataset: Dataset,
    pub sha256: String,
}

pub fn read_table(path: &Path) -> Result<LoadedTable> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let sha256 = hex::encode(Sha256::digest(&raw));
    let options = ParseOptions {
        source_label: path.display().to_string(),
        ..ParseOptions::default()
    };
    let dataset = parse_table(&raw, &options).with_context(|| format!("parsing {}", path.display()))?;
    Ok(LoadedTable { dataset, sha256 })
}

pub fn load_model(source: &ModelSource, precision: &PublishedPrecisionArg) -> Result<LinearModel> {
    if source.published {
        let p = if precision.full_precision {
            PublishedPrecision::ConfidenceMidpoint
        } else {
            PublishedPrecision::Rounded
        };
        return Ok(LinearModel::published(p));
    }
    let path = source.model.as_deref().expect("clap requires a model source");
    Ok(read_model_file(path)?.linear_model())
}

pub fn read_model_file(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ModelFile::from_json(&text).with_context(|| format!("loading model {}", path.display()))
}

/// A record with every model feature present.
pub struct ScoredRow {
    /// Position of the record in the dataset.
    pub index: usize,
    pub title: String,
    pub values: Vec<f64>,
    pub score: f64,
}

fn resolve_features(model: &LinearModel) -> Result<Vec<Column>> {
    model
        .feature_names()
        .into_iter()
        .map(|name| Column::parse(name).with_context(|| format!("model feature `{name}` is not a known column")))
        .collect()
}

/// Scores the records that carry every model feature, in table order.
pub fn score_rows(dataset: &Dataset, model: &LinearModel) -> Result<Vec<ScoredRow>> {
    let columns = resolve_features(model)?;
    let names: Vec<String> = model.feature_names().into_iter().map(String::from).collect();
    let mut out = Vec::new();
    for (index, record) in dataset.records.iter().enumerate() {
        let Some(values) = columns.iter().map(|&c| record.value(c)).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        let features: BTreeMap<String, f64> = names.iter().cloned().zip(values.iter().copied()).collect();
        let score = model.score(&features)?;
        out.push(ScoredRow {
            index,
            title: record.title.clone(),
            values,
            score,
        });
    }
    Ok(out)
}

/// Reads an `id`/`score` table. Without an `id` column the ids are 1-based
/// row numbers; without a `score` column a single-column table is read as
/// scores.
pub fn read_scores(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let delimiter = if text.lines().next().is_some_and(|l| l.contains('\t')) {
        b'\t'
    } else if text.lines().next().is_some_and(|l| l.contains(';') && !l.contains(',')) {
        b';'
    } else {
        b','
    };
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let score_col = match (find("score"), headers.len()) {
        (Some(c), _) => c,
        (None, 1) => 0,
        _ => bail!("{}: no `score` column", path.display()),
    };
    let id_col = find("id");
    let (mut ids, mut scores) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let cell = row.get(score_col).unwrap_or("").trim();
        let score: f64 = cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .with_context(|| format!("{}: row {}: invalid score {cell:?}", path.display(), i + 2))?;
        ids.push(match id_col {
            Some(c) => row.get(c).unwrap_or("").to_string(),
            None => (i + 1).to_string(),
        });
        scores.push(score);
    }
    Ok((ids, scores))
}

/// Seconds since the epoch from `SOURCE_DATE_EPOCH`, when set.
pub fn source_date_epoch() -> Result<Option<i64>> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => Ok(Some(
            v.trim()
                .parse()
                .with_context(|| format!("SOURCE_DATE_EPOCH is not an integer: {v:?}"))?,
        )),
        Err(_) => Ok(None),
    }
}
