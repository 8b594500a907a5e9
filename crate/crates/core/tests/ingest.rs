use dsrs_core::ingest::{
    build_matrix, candidate_features, parse_table, quarter_probabilities, sparsity_filter, write_table, Column, Dataset,
    Indicator, IngestError, JournalRecord, ParseOptions,
};
use proptest::prelude::*;

/// Five years of one journal in the semicolon, decimal-comma layout of a
/// SCImago export, with the usual dash markers for missing cells.
const FIVE_YEARS: &str = "\
Title;Year;SJR Best Quartile;SJR;Total Documents;Total Docs. (3years);Total References;Total Cites (3years);H index;Citable Docs. (3years);Cites / Doc. (4years);Cites / Doc. (3years);Cites / Doc. (2years);References / Doc.;Cited Docs.;Uncited Docs.;%International Collaboration
Sample Journal;2008;Q2;0,25;34;25;662;15;4;25;0,60;0,60;0,60;19,47;10;--;6,90
Sample Journal;2009;Q2;0,31;26;59;529;37;2;59;0,63;0,63;0,63;20,35;-;1;--
Sample Journal;2010;Q3;0,22;20;85;515;51;1;85;0,60;0,60;0,33;25,75;-;--;--
Sample Journal;2011;Q1;0,48;21;80;776;74;14;80;0,99;0,93;1,30;36,95;--;--;---
Sample Journal;2012;Q1;0,61;23;67;846;92;30;67;0,97;1,37;1,68;36,78;--;1;---
";

#[test]
fn decimal_commas_and_dash_markers() {
    let d = parse_table(FIVE_YEARS.as_bytes(), &ParseOptions::default()).unwrap();
    assert_eq!(d.len(), 5);
    let last = &d.records[4];
    assert_eq!(last.year, Some(2012));
    assert_eq!(last.quarter, Some(1));
    assert_eq!(last.indicator(Indicator::TotalRefs), Some(846.0));
    assert_eq!(last.indicator(Indicator::HIndex), Some(30.0));
    assert_eq!(last.indicator(Indicator::CitesPerDoc2y), Some(1.68));
    assert_eq!(last.indicator(Indicator::RefsPerDoc), Some(36.78));
    assert_eq!(last.indicator(Indicator::CitedDocs), None);
    assert_eq!(last.indicator(Indicator::InternationalCollaboration), None);
    assert_eq!(d.records[0].indicator(Indicator::InternationalCollaboration), Some(6.9));
    assert_eq!(d.records[2].quarter, Some(3));
}

#[test]
fn sparse_indicators_are_filtered() {
    let d = parse_table(FIVE_YEARS.as_bytes(), &ParseOptions::default()).unwrap();
    let kept = sparsity_filter(&d, 0.20).unwrap();
    assert_eq!(kept.len(), 10);
    for sparse in [Indicator::CitedDocs, Indicator::UncitedDocs, Indicator::InternationalCollaboration] {
        assert!(!kept.contains(&sparse));
    }
    let candidates = candidate_features(&d, 0.20).unwrap();
    assert_eq!(candidates[0], "Quarter");
    assert_eq!(candidates.len(), 9);
    assert!(!candidates.iter().any(|c| c == "Cites/Doc 4y" || c == "Cites/Doc 3y"));
    assert_eq!(quarter_probabilities(&d).unwrap(), [0.4, 0.4, 0.2, 0.0]);
}

#[test]
fn too_few_complete_rows() {
    let d = parse_table(FIVE_YEARS.as_bytes(), &ParseOptions::default()).unwrap();
    let features = ["Quarter", "H Index", "Total Docs", "Total Refs", "Cites/Doc 2y"];
    assert!(matches!(
        build_matrix(&d, &features, "SJR"),
        Err(IngestError::InsufficientObservations { n: 5, p: 5 })
    ));
    let m = build_matrix(&d, &["H Index", "Cites/Doc 2y"], "SJR").unwrap();
    assert_eq!(m.matrix.n(), 5);
    assert_eq!(m.dropped_rows, 0);
}

#[test]
fn cell_errors_report_position() {
    let bad = FIVE_YEARS.replace("846", "8x6");
    match parse_table(bad.as_bytes(), &ParseOptions::default()) {
        Err(IngestError::Cell { row, column, header, .. }) => {
            assert_eq!((row, column), (6, 7));
            assert_eq!(header, "Total References");
        }
        other => panic!("{other:?}"),
    }
}

fn record_strategy() -> impl Strategy<Value = JournalRecord> {
    let count = proptest::option::of(0.0..1e7f64);
    let real = proptest::option::of(prop_oneof![-1e6..1e6f64, Just(0.0), 1e-9..1e-3f64]);
    (
        "[A-Za-z][A-Za-z0-9 ,;\"&.()/-]{0,30}[A-Za-z0-9]",
        proptest::option::of(1900..2100i32),
        proptest::option::of(1u8..=4),
        proptest::collection::vec(count, Indicator::COUNT),
        proptest::collection::vec(real, Indicator::COUNT),
        proptest::option::of(0.0..50.0f64),
    )
        .prop_map(|(title, year, quarter, counts, reals, sjr)| {
            let indicators = std::array::from_fn(|k| {
                if Indicator::ALL[k].is_count() {
                    counts[k]
                } else {
                    reals[k]
                }
            });
            JournalRecord {
                title,
                year,
                quarter,
                indicators,
                sjr_score: sjr,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn written_tables_read_back_unchanged(
        records in proptest::collection::vec(record_strategy(), 0..12),
        semicolon in any::<bool>(),
    ) {
        let delimiter = if semicolon { b';' } else { b',' };
        let d = Dataset { records, ..Dataset::default() };
        let text = write_table(&d, delimiter).unwrap();
        let opts = ParseOptions { delimiter: Some(delimiter), ..ParseOptions::default() };
        let back = parse_table(text.as_bytes(), &opts).unwrap();
        prop_assert_eq!(back.records, d.records);
    }

    #[test]
    fn canonical_names_resolve_to_themselves(k in 0usize..Indicator::COUNT) {
        let ind = Indicator::ALL[k];
        prop_assert_eq!(Column::parse(ind.name()), Some(Column::Indicator(ind)));
    }
}
