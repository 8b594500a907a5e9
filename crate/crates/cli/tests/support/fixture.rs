//! Generator for the bundled synthetic indicator table.
//!
//! The response is planted on Quarter, H index and Cites/Doc 2y only. Every
//! other indicator is drawn independently of it, the 3- and 4-year citation
//! rates track the 2-year rate, and the last three indicators are mostly
//! missing. Output uses the semicolon and decimal-comma layout of a SCImago
//! export.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const SEED: u64 = 2012;
pub const ROWS: usize = 240;
pub const INFORMATIVE: [&str; 3] = ["Quarter", "H Index", "Cites/Doc 2y"];

/// Planted response: intercept and effects of quarter, H index and 2-year
/// cites per document, plus the error standard deviation.
pub const INTERCEPT: f64 = 0.5;
pub const EFFECTS: [f64; 3] = [-0.15, 0.005, 0.3];
pub const ERROR_SD: f64 = 0.1;

const HEADER: [&str; 17] = [
    "Title",
    "Year",
    "SJR Best Quartile",
    "SJR",
    "Total Docs. (2012)",
    "Total Docs. (3years)",
    "Total Refs.",
    "Total Cites (3years)",
    "H index",
    "Citable Docs. (3years)",
    "Cites / Doc. (4years)",
    "Cites / Doc. (3years)",
    "Cites / Doc. (2years)",
    "Ref. / Doc.",
    "Cited Docs.",
    "Uncited Docs.",
    "%International Collaboration",
];

fn decimal_comma(v: f64, places: usize) -> String {
    format!("{v:.places$}").replace('.', ",")
}

pub fn generate() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let error = Normal::new(0.0, ERROR_SD).unwrap();
    let mut out = HEADER.join(";");
    out.push('\n');
    for i in 0..ROWS {
        let quarter: u8 = rng.random_range(1..=4);
        let h: u32 = rng.random_range(0..=120);
        let cpd2 = (rng.random_range(0.0..4.0f64) * 100.0).round() / 100.0;
        let cpd3 = ((cpd2 * rng.random_range(0.9..1.2)) * 100.0).round() / 100.0;
        let cpd4 = ((cpd3 * rng.random_range(0.9..1.2)) * 100.0).round() / 100.0;
        let docs: u32 = rng.random_range(10..=600);
        let docs3: u32 = rng.random_range(30..=1800);
        let refs: u32 = rng.random_range(100..=30_000);
        let cites3: u32 = rng.random_range(0..=5000);
        let citable3: u32 = rng.random_range(30..=1800);
        let ref_per_doc = (rng.random_range(5.0..60.0f64) * 100.0).round() / 100.0;
        let sparse = |rng: &mut ChaCha8Rng, hi: u32| {
            if rng.random_bool(0.1) {
                rng.random_range(0..=hi).to_string()
            } else {
                ["-", "--", "---", ""][rng.random_range(0..4)].to_string()
            }
        };
        let cited = sparse(&mut rng, 400);
        let uncited = sparse(&mut rng, 200);
        let intl = if rng.random_bool(0.1) {
            decimal_comma(rng.random_range(0.0..60.0), 2)
        } else {
            "--".to_string()
        };
        let sjr = INTERCEPT
            + EFFECTS[0] * f64::from(quarter)
            + EFFECTS[1] * f64::from(h)
            + EFFECTS[2] * cpd2
            + error.sample(&mut rng);
        let row = [
            format!("Synthetic Journal {:03}", i + 1),
            "2012".to_string(),
            format!("Q{quarter}"),
            decimal_comma(sjr, 3),
            docs.to_string(),
            docs3.to_string(),
            refs.to_string(),
            cites3.to_string(),
            h.to_string(),
            citable3.to_string(),
            decimal_comma(cpd4, 2),
            decimal_comma(cpd3, 2),
            decimal_comma(cpd2, 2),
            decimal_comma(ref_per_doc, 2),
            cited,
            uncited,
            intl,
        ];
        out.push_str(&row.join(";"));
        out.push('\n');
    }
    out
}

pub fn committed_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/journals.csv")
}
