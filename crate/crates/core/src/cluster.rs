//! Two-means clustering of influence scores into National and International
//! classes.

use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TOLERANCE: f64 = 0.01;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("need at least 2 scores, got {0}")]
    TooFewScores(usize),

    #[error("score at position {0} is not finite")]
    NonFinite(usize),

    #[error("all scores are identical; there is nothing to separate")]
    Degenerate,

    #[error("initial means must be distinct finite values, got ({0}, {1})")]
    InvalidInit(f64, f64),

    #[error("invalid clustering configuration: {0}")]
    InvalidConfig(String),

    #[error("{ids} ids for {scores} scores")]
    LengthMismatch { ids: usize, scores: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    National,
    International,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::National => "National",
            Label::International => "International",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    /// Squared change in either mean above which another iteration runs.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Follow the mean-update loop with single-point moves until no move
    /// lowers the within-cluster sum of squares.
    pub refine: bool,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub mean_low: f64,
    pub mean_high: f64,
    /// 0 for the low cluster, 1 for the high cluster.
    pub assignments: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
    /// Single-point moves made by the refinement pass.
    pub refinement_moves: usize,
    /// Within-cluster sum of squares after each iteration's assignment step,
    /// then after each refinement move.
    pub sse_history: Vec<f64>,
}

impl ClusterResult {
    pub fn label_of(cluster: u8) -> Label {
        if cluster == 0 {
            Label::National
        } else {
            Label::International
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        self.assignments.iter().map(|&c| Self::label_of(c)).collect()
    }

    /// Fraction of samples in the National cluster.
    pub fn national_fraction(&self) -> f64 {
        let low = self.assignments.iter().filter(|&&c| c == 0).count();
        low as f64 / self.assignments.len() as f64
    }

    pub fn cluster_sizes(&self) -> [usize; 2] {
        let low = self.assignments.iter().filter(|&&c| c == 0).count();
        [low, self.assignments.len() - low]
    }
}

/// Nearest-mean assignment; a tie goes to cluster 0.
fn nearest(x: f64, u0: f64, u1: f64) -> u8 {
    if (x - u1).abs() < (x - u0).abs() {
        1
    } else {
        0
    }
}

/// Within-cluster sum of squared deviations about each cluster's own mean.
pub fn within_cluster_sse(scores: &[f64], assignments: &[u8]) -> f64 {
    let mut sum = [0.0; 2];
    let mut count = [0usize; 2];
    for (&x, &c) in scores.iter().zip(assignments) {
        sum[c as usize] += x;
        count[c as usize] += 1;
    }
    let centre: [f64; 2] =
        std::array::from_fn(|k| if count[k] > 0 { sum[k] / count[k] as f64 } else { 0.0 });
    scores
        .iter()
        .zip(assignments)
        .map(|(&x, &c)| (x - centre[c as usize]).powi(2))
        .sum()
}

fn validate_scores(scores: &[f64]) -> Result<(f64, f64), ClusterError> {
    if scores.len() < 2 {
        return Err(ClusterError::TooFewScores(scores.len()));
    }
    if let Some(i) = scores.iter().position(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite(i));
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(ClusterError::Degenerate);
    }
    Ok((min, max))
}

/// Two distinct observed scores drawn with a seeded generator.
pub fn random_init(scores: &[f64], seed: u64) -> Result<(f64, f64), ClusterError> {
    validate_scores(scores)?;
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, distinct.len(), 2);
    Ok((distinct[picked.index(0)], distinct[picked.index(1)]))
}

pub fn kmeans2(scores: &[f64], init: Option<(f64, f64)>) -> Result<ClusterResult, ClusterError> {
    kmeans2_with(scores, init, &KMeansConfig::default())
}

/// Lloyd iterations on one-dimensional scores.
///
/// The loop stops once neither mean moves by more than `sqrt(tolerance)` or
/// after `max_iterations`. Means start ordered low to high, so swapping the
/// initial pair gives the same run. Final assignments are to the nearer
/// final mean. With `refine` set, points are then moved one at a time while a
/// move lowers the within-cluster sum of squares, and the means become the
/// centroids of the refined partition.
pub fn kmeans2_with(
    scores: &[f64],
    init: Option<(f64, f64)>,
    config: &KMeansConfig,
) -> Result<ClusterResult, ClusterError> {
    if !(config.tolerance >= 0.0 && config.tolerance.is_finite()) {
        return Err(ClusterError::InvalidConfig(format!(
            "tolerance must be finite and non-negative, got {}",
            config.tolerance
        )));
    }
    if config.max_iterations == 0 {
        return Err(ClusterError::InvalidConfig("max_iterations must be at least 1".into()));
    }
    let (min, max) = validate_scores(scores)?;
    let (a, b) = init.unwrap_or((min, max));
    if !a.is_finite() || !b.is_finite() || a == b {
        return Err(ClusterError::InvalidInit(a, b));
    }
    let (mut u0, mut u1) = if a < b { (a, b) } else { (b, a) };

    let mut assignments = vec![0u8; scores.len()];
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    let mut changed = true;
    while changed && iterations < config.max_iterations {
        iterations += 1;
        changed = false;

        let (mut sum0, mut sum1) = (0.0, 0.0);
        let (mut ele0, mut ele1) = (0usize, 0usize);
        for (slot, &x) in assignments.iter_mut().zip(scores) {
            *slot = nearest(x, u0, u1);
            if *slot == 0 {
                sum0 += x;
                ele0 += 1;
            } else {
                sum1 += x;
                ele1 += 1;
            }
        }
        sse_history.push(within_cluster_sse(scores, &assignments));

        let (new0, new1) = match (ele0, ele1) {
            (0, _) => {
                let m1 = sum1 / ele1 as f64;
                (farthest_from(scores, m1), m1)
            }
            (_, 0) => {
                let m0 = sum0 / ele0 as f64;
                (m0, farthest_from(scores, m0))
            }
            _ => (sum0 / ele0 as f64, sum1 / ele1 as f64),
        };
        if (new0 - u0).powi(2) > config.tolerance || (new1 - u1).powi(2) > config.tolerance {
            changed = true;
        }
        u0 = new0;
        u1 = new1;
    }

    if u0 > u1 {
        std::mem::swap(&mut u0, &mut u1);
    }
    for (slot, &x) in assignments.iter_mut().zip(scores) {
        *slot = nearest(x, u0, u1);
    }
    let mut refinement_moves = 0;
    if config.refine {
        if assignments.iter().all(|&c| c == assignments[0]) {
            // A far-off mean can leave every point on one side; split at the
            // largest score so both clusters are populated.
            let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (slot, &x) in assignments.iter_mut().zip(scores) {
                *slot = u8::from(x == top);
            }
        }
        refinement_moves = refine(scores, &mut assignments, &mut sse_history);
        let centres = centroids(scores, &assignments);
        if centres[0] > centres[1] {
            for c in assignments.iter_mut() {
                *c ^= 1;
            }
        }
        let centres = centroids(scores, &assignments);
        u0 = centres[0];
        u1 = centres[1];
    }
    Ok(ClusterResult {
        mean_low: u0,
        mean_high: u1,
        assignments,
        iterations,
        converged: !changed,
        refinement_moves,
        sse_history,
    })
}

fn centroids(scores: &[f64], assignments: &[u8]) -> [f64; 2] {
    let mut sum = [0.0; 2];
    let mut count = [0usize; 2];
    for (&x, &c) in scores.iter().zip(assignments) {
        sum[c as usize] += x;
        count[c as usize] += 1;
    }
    std::array::from_fn(|k| sum[k] / count[k] as f64)
}

/// Moves single points between clusters, in index order and repeated until a
/// full pass makes no move, whenever the move lowers the within-cluster sum
/// of squares. Both clusters must be non-empty on entry and stay so.
fn refine(scores: &[f64], assignments: &mut [u8], sse_history: &mut Vec<f64>) -> usize {
    let scale = scores.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let eps = 1e-12 * scale * scale;
    let mut moves = 0;
    loop {
        let mut moved = false;
        for i in 0..scores.len() {
            let mut count = [0usize; 2];
            for &c in assignments.iter() {
                count[c as usize] += 1;
            }
            let from = assignments[i] as usize;
            let to = 1 - from;
            if count[from] < 2 {
                continue;
            }
            let centre = centroids(scores, assignments);
            let x = scores[i];
            let gain = count[from] as f64 / (count[from] - 1) as f64 * (x - centre[from]).powi(2);
            let cost = count[to] as f64 / (count[to] + 1) as f64 * (x - centre[to]).powi(2);
            if cost < gain - eps {
                assignments[i] = to as u8;
                moves += 1;
                moved = true;
                sse_history.push(within_cluster_sse(scores, assignments));
            }
        }
        if !moved {
            return moves;
        }
    }
}

/// Score farthest from `centre`; the earliest wins a tie.
fn farthest_from(scores: &[f64], centre: f64) -> f64 {
    let mut best = scores[0];
    for &x in &scores[1..] {
        if (x - centre).abs() > (best - centre).abs() {
            best = x;
        }
    }
    best
}

/// International only when strictly closer to the high mean.
pub fn classify(score: f64, result: &ClusterResult) -> Label {
    ClusterResult::label_of(nearest(score, result.mean_low, result.mean_high))
}

/// Midpoint of the two cluster means.
pub fn influence_threshold(result: &ClusterResult) -> f64 {
    0.5 * (result.mean_low + result.mean_high)
}

/// `id,score,label` rows for each journal.
pub fn export_assignments(
    ids: &[String],
    scores: &[f64],
    result: &ClusterResult,
    delimiter: u8,
) -> Result<String, ClusterError> {
    if ids.len() != scores.len() || scores.len() != result.assignments.len() {
        return Err(ClusterError::LengthMismatch {
            ids: ids.len(),
            scores: scores.len(),
        });
    }
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    let io = |e: csv::Error| ClusterError::InvalidConfig(e.to_string());
    w.write_record(["id", "score", "label"]).map_err(io)?;
    for ((id, s), &c) in ids.iter().zip(scores).zip(&result.assignments) {
        w.write_record([id.as_str(), &s.to_string(), ClusterResult::label_of(c).as_str()])
            .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ClusterError::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
