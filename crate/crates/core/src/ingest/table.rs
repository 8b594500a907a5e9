use super::columns::{normalize, year_suffixed_total_docs, HeaderField};
use super::{Dataset, Indicator, IngestError, JournalRecord};

/// Which column supplies a record's quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuarterSource {
    /// An explicit `Quarter` column when present, otherwise the SJR
    /// quartile column (`Q1`..`Q4`).
    #[default]
    Auto,
    QuarterColumn,
    QuartileColumn,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Field delimiter; detected from the header line when `None`.
    pub delimiter: Option<u8>,
    pub quarter_source: QuarterSource,
    /// Year assigned to rows when the table carries no year information.
    pub default_year: Option<i32>,
    pub source_label: String,
    pub category: String,
}

const MISSING_MARKERS: [&str; 4] = ["", "-", "--", "---"];

pub(crate) fn is_missing(cell: &str) -> bool {
    MISSING_MARKERS.contains(&cell.trim())
}

/// Parses a numeric cell. Missing markers give `Ok(None)`; a single comma
/// with no period is read as a decimal comma (`"0,60"` is 0.6).
pub fn parse_number(cell: &str) -> Result<Option<f64>, String> {
    let cell = cell.trim();
    if is_missing(cell) {
        return Ok(None);
    }
    let commas = cell.matches(',').count();
    let owned;
    let text = if commas == 0 {
        cell
    } else if commas == 1 && !cell.contains('.') {
        owned = cell.replace(',', ".");
        owned.as_str()
    } else {
        return Err(format!("ambiguous numeric value {cell:?}"));
    };
    let is_numeric_text = text
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    match text.parse::<f64>() {
        Ok(v) if is_numeric_text && v.is_finite() => Ok(Some(v)),
        _ => Err(format!("non-numeric value {cell:?}")),
    }
}

fn parse_quarter(cell: &str) -> Result<Option<u8>, String> {
    let cell = cell.trim();
    if is_missing(cell) {
        return Ok(None);
    }
    let digits = cell
        .strip_prefix('Q')
        .or_else(|| cell.strip_prefix('q'))
        .unwrap_or(cell);
    match digits.parse::<u8>() {
        Ok(q @ 1..=4) => Ok(Some(q)),
        _ => Err(format!("quarter must be 1-4 or Q1-Q4, got {cell:?}")),
    }
}

/// Chooses between semicolon and comma by counting unquoted occurrences in
/// the header line.
fn detect_delimiter(text: &str) -> u8 {
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let mut in_quotes = false;
    let (mut semis, mut commas) = (0usize, 0usize);
    for c in header.chars() {
        match c {
            '"' => in_quotes = !in_quotes,
            ';' if !in_quotes => semis += 1,
            ',' if !in_quotes => commas += 1,
            _ => {}
        }
    }
    if semis > commas {
        b';'
    } else {
        b','
    }
}

#[derive(Debug, Default)]
struct Layout {
    title: Option<usize>,
    year: Option<usize>,
    quarter: Option<usize>,
    quartile: Option<usize>,
    sjr: Option<usize>,
    indicators: Vec<(usize, Indicator)>,
    header_year: Option<i32>,
}

fn layout(headers: &csv::StringRecord) -> Result<Layout, IngestError> {
    let mut out = Layout::default();
    let mut seen: Vec<(HeaderField, usize)> = Vec::new();
    for (col, raw) in headers.iter().enumerate() {
        let field = HeaderField::classify(raw);
        if field == HeaderField::Ignored {
            continue;
        }
        if let Some((_, first)) = seen.iter().find(|(f, _)| *f == field) {
            return Err(IngestError::DuplicateColumn {
                name: raw.trim().to_string(),
                column: col + 1,
                first: first + 1,
            });
        }
        seen.push((field, col));
        match field {
            HeaderField::Title => out.title = Some(col),
            HeaderField::Year => out.year = Some(col),
            HeaderField::Quarter => out.quarter = Some(col),
            HeaderField::Quartile => out.quartile = Some(col),
            HeaderField::Sjr => out.sjr = Some(col),
            HeaderField::Indicator(ind) => {
                if ind == Indicator::TotalDocs {
                    out.header_year = year_suffixed_total_docs(&normalize(raw));
                }
                out.indicators.push((col, ind));
            }
            HeaderField::Ignored => {}
        }
    }
    if out.title.is_none() {
        return Err(IngestError::MissingColumn {
            name: "Title".to_string(),
        });
    }
    Ok(out)
}

/// Parses a delimited indicator table into a [`Dataset`].
///
/// Rows and columns in error positions are 1-based; the header is row 1.
pub fn parse_table(raw: &[u8], options: &ParseOptions) -> Result<Dataset, IngestError> {
    let text = std::str::from_utf8(raw).map_err(|e| IngestError::Encoding(e.to_string()))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut dataset = Dataset {
        records: Vec::new(),
        source_label: options.source_label.clone(),
        category: options.category.clone(),
    };
    if text.trim().is_empty() {
        return Ok(dataset);
    }

    let delimiter = options.delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    let layout = layout(&headers)?;

    let quarter_col = match options.quarter_source {
        QuarterSource::Auto => layout.quarter.or(layout.quartile),
        QuarterSource::QuarterColumn => Some(layout.quarter.ok_or(IngestError::MissingColumn {
            name: "Quarter".to_string(),
        })?),
        QuarterSource::QuartileColumn => Some(layout.quartile.ok_or(IngestError::MissingColumn {
            name: "SJR Best Quartile".to_string(),
        })?),
    };

    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(e, i + 2))?;
        let row_no = row.position().map_or(i + 2, |p| p.line() as usize);
        if row.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let cell_err = |col: usize, message: String| IngestError::Cell {
            row: row_no,
            column: col + 1,
            header: headers.get(col).unwrap_or("").trim().to_string(),
            message,
        };
        let cell = |col: usize| row.get(col).unwrap_or("");

        let title = cell(layout.title.expect("checked in layout")).trim().to_string();
        let year = match layout.year {
            Some(col) => {
                let c = cell(col).trim();
                if is_missing(c) {
                    None
                } else {
                    Some(c.parse::<i32>().map_err(|_| cell_err(col, format!("invalid year {c:?}")))?)
                }
            }
            None => layout.header_year.or(options.default_year),
        };
        let quarter = match quarter_col {
            Some(col) => parse_quarter(cell(col)).map_err(|m| cell_err(col, m))?,
            None => None,
        };
        let sjr_score = match layout.sjr {
            Some(col) => parse_number(cell(col)).map_err(|m| cell_err(col, m))?,
            None => None,
        };
        let mut indicators = [None; Indicator::COUNT];
        for &(col, ind) in &layout.indicators {
            let v = parse_number(cell(col)).map_err(|m| cell_err(col, m))?;
            if let Some(x) = v {
                if ind.is_count() && x < 0.0 {
                    return Err(cell_err(col, format!("count indicator must be non-negative, got {x}")));
                }
            }
            indicators[ind.index()] = v;
        }
        dataset.records.push(JournalRecord {
            title,
            year,
            quarter,
            indicators,
            sjr_score,
        });
    }
    Ok(dataset)
}

fn csv_error(e: csv::Error, fallback_row: usize) -> IngestError {
    let row = e
        .position()
        .map_or(fallback_row, |p| p.line() as usize);
    IngestError::Malformed {
        row,
        message: e.to_string(),
    }
}

/// Writes a dataset in the canonical column layout that [`parse_table`]
/// reads back unchanged.
pub fn write_table(dataset: &Dataset, delimiter: u8) -> Result<String, IngestError> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    let mut header = vec!["Title", "Year", "Quarter", "SJR"];
    header.extend(Indicator::ALL.iter().map(|i| i.name()));
    writer.write_record(&header).map_err(write_error)?;

    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &dataset.records {
        let mut row = vec![
            r.title.clone(),
            r.year.map(|y| y.to_string()).unwrap_or_default(),
            r.quarter.map(|q| q.to_string()).unwrap_or_default(),
            num(r.sjr_score),
        ];
        row.extend(r.indicators.iter().map(|v| num(*v)));
        writer.write_record(&row).map_err(write_error)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| IngestError::Write(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IngestError::Write(e.to_string()))
}

fn write_error(e: csv::Error) -> IngestError {
    IngestError::Write(e.to_string())
}
