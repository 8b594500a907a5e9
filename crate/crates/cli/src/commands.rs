use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dsrs_core::cluster::{export_assignments, influence_threshold, kmeans2, random_init, ClusterResult, Label};
use dsrs_core::dsrs::{run_pipeline, Thresholds};
use dsrs_core::ingest::{build_matrix, candidate_features, Column, Indicator};
use dsrs_core::model_file::{ModelFile, Provenance};
use dsrs_core::scoring::{quartile_block_sizes, quartile_match, rank_error_stats};

use crate::input::{load_model, read_scores, read_table, score_rows, source_date_epoch};
use crate::output::{heading, sci, Table};
use crate::{ClassifyArgs, FitArgs, PlotdataArgs, ScoreArgs, ValidateArgs};

pub fn fit(a: &FitArgs) -> Result<()> {
    let delim = a.delimiter.delimiter;
    let table = read_table(&a.input)?;
    let features = match &a.features {
        Some(f) => f.iter().map(|s| s.trim().to_string()).collect(),
        None => candidate_features(&table.dataset, a.max_missing)?,
    };
    let build = build_matrix(&table.dataset, &features, &a.response)?;
    let thresholds = Thresholds {
        p_threshold: a.p_threshold,
        corr_threshold: a.corr_threshold,
        pairwise_threshold: a.pairwise_threshold,
        max_features: a.max_features,
    };
    let model = run_pipeline(&build.matrix, &thresholds)?;
    let fit = &model.fit;

    heading("Input");
    let mut t = Table::new(delim, ["rows", "complete_rows", "dropped_rows", "candidates"]);
    t.row([
        table.dataset.len().to_string(),
        build.matrix.n().to_string(),
        build.dropped_rows.to_string(),
        build.matrix.p().to_string(),
    ]);
    print!("{}", t.finish());

    println!();
    heading("Elimination phases");
    print!("{}", model.trace.to_delimited(delim));

    println!();
    heading("Variance shares");
    let mut t = Table::new(delim, ["feature", "percent"]);
    for s in &model.attribution.shares {
        t.row([s.feature.clone(), format!("{:.6}", s.percent)]);
    }
    print!("{}", t.finish());

    println!();
    heading("Regression statistics");
    let mut t = Table::new(delim, ["statistic", "value"]);
    for (name, v) in [
        ("multiple_r", fit.multiple_r),
        ("r_squared", fit.r_squared),
        ("adjusted_r_squared", fit.adjusted_r_squared),
        ("standard_error", fit.se_residual),
    ] {
        t.row([name.to_string(), format!("{v:.6}")]);
    }
    t.row(["observations".to_string(), fit.n.to_string()]);
    print!("{}", t.finish());

    println!();
    heading("ANOVA");
    let mut t = Table::new(delim, ["source", "df", "ss", "ms", "f", "significance_f"]);
    t.row([
        "Regression".to_string(),
        fit.k.to_string(),
        format!("{:.6}", fit.ssr),
        format!("{:.6}", fit.msr),
        format!("{:.6}", fit.f_stat),
        sci(fit.f_significance),
    ]);
    t.row([
        "Residual".to_string(),
        fit.residual_df().to_string(),
        format!("{:.6}", fit.sse),
        format!("{:.6}", fit.mse),
        String::new(),
        String::new(),
    ]);
    t.row([
        "Total".to_string(),
        (fit.n - 1).to_string(),
        format!("{:.6}", fit.sst),
        String::new(),
        String::new(),
        String::new(),
    ]);
    print!("{}", t.finish());

    println!();
    heading("Coefficients");
    let mut t = Table::new(delim, ["term", "coefficient", "std_error", "t_stat", "p_value"]);
    let terms = std::iter::once("Intercept").chain(fit.feature_names.iter().map(String::as_str));
    let coefs = std::iter::once(fit.b0).chain(fit.b.iter().copied());
    for (i, (term, c)) in terms.zip(coefs).enumerate() {
        t.row([
            term.to_string(),
            format!("{c:.6e}"),
            format!("{:.6e}", fit.se[i]),
            format!("{:.6}", fit.t_stats[i]),
            sci(fit.p_values[i]),
        ]);
    }
    print!("{}", t.finish());

    if let Some(path) = &a.output {
        let provenance = Provenance::new(Some(table.sha256), source_date_epoch()?);
        let file = ModelFile::from_dsrs(&model, &a.response, provenance);
        fs::write(path, file.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Flag name and canonical column for each named score flag.
const SCORE_FLAGS: [(&str, Column); 5] = [
    ("quarter", Column::Quarter),
    ("h-index", Column::Indicator(Indicator::HIndex)),
    ("total-docs", Column::Indicator(Indicator::TotalDocs)),
    ("total-refs", Column::Indicator(Indicator::TotalRefs)),
    ("cites-per-doc-2y", Column::Indicator(Indicator::CitesPerDoc2y)),
];

pub fn score(a: &ScoreArgs) -> Result<()> {
    let model = load_model(&a.source, &a.precision)?;
    let mut values: BTreeMap<String, f64> = BTreeMap::new();
    let named = [
        a.quarter.map(|q| q as f64),
        a.h_index,
        a.total_docs,
        a.total_refs,
        a.cites_per_doc_2y,
    ];
    for ((_, column), v) in SCORE_FLAGS.iter().zip(named) {
        if let Some(v) = v {
            values.insert(column.name().to_string(), v);
        }
    }
    for item in &a.features {
        let (name, value) = item
            .split_once('=')
            .with_context(|| format!("--feature expects NAME=VALUE, got {item:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .with_context(|| format!("--feature {name}: invalid number {value:?}"))?;
        let name = Column::parse(name).map_or_else(|| name.trim().to_string(), |c| c.name().to_string());
        values.insert(name, value);
    }

    let mut inputs = BTreeMap::new();
    for name in model.feature_names() {
        let Some(&v) = values.get(name) else {
            match SCORE_FLAGS.iter().find(|(_, c)| c.name() == name) {
                Some((flag, _)) => bail!("missing required flag --{flag}"),
                None => bail!("missing value for model feature `{name}`; pass --feature \"{name}=VALUE\""),
            }
        };
        if name == Column::Quarter.name() && !(v.fract() == 0.0 && (1.0..=4.0).contains(&v)) {
            bail!("quarter must be 1-4, got {v}");
        }
        if a.source.published && v < 0.0 {
            bail!("`{name}` must be non-negative, got {v}");
        }
        inputs.insert(name.to_string(), v);
    }
    for name in values.keys().filter(|k| !inputs.contains_key(*k)) {
        eprintln!("warning: `{name}` is not a model feature and was ignored");
    }
    println!("{:.6}", model.score(&inputs)?);
    Ok(())
}

fn cluster_init(scores: &[f64], seed: Option<u64>) -> Result<Option<(f64, f64)>> {
    Ok(seed.map(|s| random_init(scores, s)).transpose()?)
}

pub fn classify(a: &ClassifyArgs) -> Result<()> {
    let delim = a.delimiter.delimiter;
    let (ids, scores) = if let Some(path) = &a.source.scores {
        read_scores(path)?
    } else {
        let path = a.source.input.as_deref().expect("clap requires a score source");
        if a.model.is_none() && !a.published {
            bail!("--input needs --model or --published");
        }
        let source = crate::ModelSource {
            model: a.model.clone(),
            published: a.published,
        };
        let model = load_model(&source, &crate::PublishedPrecisionArg { full_precision: false })?;
        let rows = score_rows(&read_table(path)?.dataset, &model)?;
        rows.into_iter().map(|r| (r.title, r.score)).unzip()
    };
    let result = kmeans2(&scores, cluster_init(&scores, a.seed)?)?;

    heading("Clusters");
    let mut t = Table::new(delim, ["statistic", "value"]);
    t.row(["mean_national".to_string(), format!("{:.6}", result.mean_low)]);
    t.row(["mean_international".to_string(), format!("{:.6}", result.mean_high)]);
    t.row(["influence_threshold".to_string(), format!("{:.6}", influence_threshold(&result))]);
    t.row(["iterations".to_string(), result.iterations.to_string()]);
    t.row(["converged".to_string(), result.converged.to_string()]);
    t.row(["refinement_moves".to_string(), result.refinement_moves.to_string()]);
    print!("{}", t.finish());

    println!();
    heading("Proportions");
    print!("{}", proportions(&result, delim));

    let labeled = export_assignments(&ids, &scores, &result, delim)?;
    match &a.output {
        Some(path) => fs::write(path, labeled).with_context(|| format!("writing {}", path.display()))?,
        None => {
            println!();
            heading("Assignments");
            print!("{labeled}");
        }
    }
    Ok(())
}

fn proportions(result: &ClusterResult, delim: u8) -> String {
    let sizes = result.cluster_sizes();
    let n = result.assignments.len() as f64;
    let mut t = Table::new(delim, ["label", "count", "fraction"]);
    for (label, count) in [Label::National, Label::International].into_iter().zip(sizes) {
        t.row([label.to_string(), count.to_string(), format!("{:.6}", count as f64 / n)]);
    }
    t.finish()
}

pub fn validate(a: &ValidateArgs) -> Result<()> {
    let delim = a.delimiter.delimiter;
    let model = load_model(&a.source, &a.precision)?;
    let reference_column = Column::parse(&a.reference_column)
        .with_context(|| format!("unknown reference column `{}`", a.reference_column))?;
    let dataset = read_table(&a.input)?.dataset;
    let (mut reference, mut candidate) = (Vec::new(), Vec::new());
    for row in score_rows(&dataset, &model)? {
        if let Some(r) = dataset.records[row.index].value(reference_column) {
            reference.push(r);
            candidate.push(row.score);
        }
    }
    if reference.is_empty() {
        bail!(
            "reference column `{}` has no values in rows with every model feature",
            reference_column.name()
        );
    }
    let matches = quartile_match(&reference, &candidate)?;
    let errors = rank_error_stats(&reference, &candidate)?;

    heading("Quartile match");
    let mut t = Table::new(delim, ["quartile", "journals", "match_percent"]);
    let blocks = quartile_block_sizes(matches.n);
    for (q, (size, pct)) in blocks.iter().zip(matches.per_quartile_match).enumerate() {
        t.row([format!("Q{}", q + 1), size.to_string(), format!("{pct:.2}")]);
    }
    print!("{}", t.finish());

    println!();
    heading("Score difference");
    let mut t = Table::new(delim, ["statistic", "value"]);
    t.row(["journals".to_string(), matches.n.to_string()]);
    t.row(["mean_abs_diff".to_string(), format!("{:.6}", errors.mean_abs_diff)]);
    t.row(["median_abs_diff".to_string(), format!("{:.6}", errors.median_abs_diff)]);
    print!("{}", t.finish());
    Ok(())
}

/// Lowercase ASCII alphanumerics with runs of anything else collapsed to `_`.
fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn write_file(dir: &Path, name: &str, contents: String) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn plotdata(a: &PlotdataArgs) -> Result<()> {
    let delim = a.delimiter.delimiter;
    let model = load_model(&a.source, &a.precision)?;
    let dataset = read_table(&a.input)?.dataset;
    let rows = score_rows(&dataset, &model)?;
    fs::create_dir_all(&a.output_dir).with_context(|| format!("creating {}", a.output_dir.display()))?;

    let mut written = Vec::new();
    for (j, feature) in model.feature_names().into_iter().enumerate() {
        let mut t = Table::new(delim, [feature, "JIS"]);
        for r in &rows {
            t.row([r.values[j].to_string(), r.score.to_string()]);
        }
        let name = format!("jis_vs_{}.csv", slug(feature));
        write_file(&a.output_dir, &name, t.finish())?;
        written.push(name);
    }

    let mut t = Table::new(delim, ["JIS", "label"]);
    if !rows.is_empty() {
        let scores: Vec<f64> = rows.iter().map(|r| r.score).collect();
        let result = kmeans2(&scores, cluster_init(&scores, a.seed)?)?;
        for (s, label) in scores.iter().zip(result.labels()) {
            t.row([s.to_string(), label.to_string()]);
        }
    }
    write_file(&a.output_dir, "jis_clusters.csv", t.finish())?;
    written.push("jis_clusters.csv".to_string());

    heading("Plot data");
    let mut t = Table::new(delim, ["file", "rows"]);
    for name in written {
        t.row([name, rows.len().to_string()]);
    }
    print!("{}", t.finish());
    Ok(())
}
