use std::fmt;

/// The thirteen per-journal bibliometric indicators published in an
/// SCImago journal-year row, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indicator {
    TotalDocs,
    TotalDocs3y,
    TotalRefs,
    TotalCites3y,
    HIndex,
    CitableDocs3y,
    CitesPerDoc4y,
    CitesPerDoc3y,
    CitesPerDoc2y,
    RefsPerDoc,
    CitedDocs,
    UncitedDocs,
    InternationalCollaboration,
}

impl Indicator {
    pub const COUNT: usize = 13;

    pub const ALL: [Indicator; Self::COUNT] = [
        Indicator::TotalDocs,
        Indicator::TotalDocs3y,
        Indicator::TotalRefs,
        Indicator::TotalCites3y,
        Indicator::HIndex,
        Indicator::CitableDocs3y,
        Indicator::CitesPerDoc4y,
        Indicator::CitesPerDoc3y,
        Indicator::CitesPerDoc2y,
        Indicator::RefsPerDoc,
        Indicator::CitedDocs,
        Indicator::UncitedDocs,
        Indicator::InternationalCollaboration,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical column name, as written by [`crate::ingest::write_table`].
    pub fn name(self) -> &'static str {
        match self {
            Indicator::TotalDocs => "Total Docs",
            Indicator::TotalDocs3y => "Total Docs 3y",
            Indicator::TotalRefs => "Total Refs",
            Indicator::TotalCites3y => "Total Cites 3y",
            Indicator::HIndex => "H Index",
            Indicator::CitableDocs3y => "Citable Docs 3y",
            Indicator::CitesPerDoc4y => "Cites/Doc 4y",
            Indicator::CitesPerDoc3y => "Cites/Doc 3y",
            Indicator::CitesPerDoc2y => "Cites/Doc 2y",
            Indicator::RefsPerDoc => "Ref/Doc",
            Indicator::CitedDocs => "Cited Docs",
            Indicator::UncitedDocs => "Uncited Docs",
            Indicator::InternationalCollaboration => "International Collaboration %",
        }
    }

    /// Counts of documents, references, citations, and the h-index must be
    /// non-negative.
    pub fn is_count(self) -> bool {
        matches!(
            self,
            Indicator::TotalDocs
                | Indicator::TotalDocs3y
                | Indicator::TotalRefs
                | Indicator::TotalCites3y
                | Indicator::HIndex
                | Indicator::CitableDocs3y
                | Indicator::CitedDocs
                | Indicator::UncitedDocs
        )
    }

    fn from_normalized(key: &str) -> Option<Self> {
        let three_years = |stem: &str| {
            key.strip_prefix(stem)
                .is_some_and(|rest| matches!(rest, "3years" | "3year" | "3yrs" | "3yr" | "3y"))
        };
        let per_doc = |years: char| {
            ["citesdoc", "citesperdoc", "citesperdocument"].iter().any(|stem| {
                key.strip_prefix(stem).is_some_and(|rest| {
                    let mut chars = rest.chars();
                    chars.next() == Some(years)
                        && matches!(chars.as_str(), "years" | "year" | "yrs" | "yr" | "y")
                })
            })
        };
        let ind = match key {
            "totaldocs" | "totaldocuments" | "totaldocscurrentyear" | "totaldocumentscurrentyear" => {
                Indicator::TotalDocs
            }
            "totalrefs" | "totalreferences" => Indicator::TotalRefs,
            "hindex" => Indicator::HIndex,
            "refdoc" | "refsdoc" | "referencesdoc" | "refperdoc" | "refsperdoc" | "referencesperdoc" => {
                Indicator::RefsPerDoc
            }
            "citeddocs" | "citeddocuments" => Indicator::CitedDocs,
            "unciteddocs" | "unciteddocuments" => Indicator::UncitedDocs,
            "internationalcollaboration" | "internationalcollab" | "intlcollaboration" => {
                Indicator::InternationalCollaboration
            }
            _ if three_years("totaldocs") || three_years("totaldocuments") => Indicator::TotalDocs3y,
            _ if three_years("totalcites") => Indicator::TotalCites3y,
            _ if three_years("citabledocs") || three_years("citabledocuments") => Indicator::CitableDocs3y,
            _ if per_doc('4') => Indicator::CitesPerDoc4y,
            _ if per_doc('3') => Indicator::CitesPerDoc3y,
            _ if per_doc('2') => Indicator::CitesPerDoc2y,
            _ if year_suffixed_total_docs(key).is_some() => Indicator::TotalDocs,
            _ => return None,
        };
        Some(ind)
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lowercase ASCII alphanumerics only: `"Cites / Doc. (2years)"` becomes
/// `"citesdoc2years"`.
pub(crate) fn normalize(header: &str) -> String {
    header
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// `"Total Docs. (2012)"` style headers carry the publication year.
pub(crate) fn year_suffixed_total_docs(key: &str) -> Option<i32> {
    let rest = key
        .strip_prefix("totaldocs")
        .or_else(|| key.strip_prefix("totaldocuments"))?;
    (rest.len() == 4 && rest.bytes().all(|b| b.is_ascii_digit()))
        .then(|| rest.parse().ok())
        .flatten()
}

/// A named column usable as a regression feature or response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    Quarter,
    Sjr,
    Indicator(Indicator),
}

impl Column {
    pub const QUARTER_NAME: &'static str = "Quarter";
    pub const SJR_NAME: &'static str = "SJR";

    pub fn name(self) -> &'static str {
        match self {
            Column::Quarter => Self::QUARTER_NAME,
            Column::Sjr => Self::SJR_NAME,
            Column::Indicator(ind) => ind.name(),
        }
    }

    /// Resolves a canonical name or any accepted header alias.
    pub fn parse(name: &str) -> Option<Column> {
        let key = normalize(name);
        match key.as_str() {
            "quarter" => Some(Column::Quarter),
            "sjr" | "sjrscore" => Some(Column::Sjr),
            _ => Indicator::from_normalized(&key).map(Column::Indicator),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Role of one header cell in an input table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HeaderField {
    Title,
    Year,
    Quarter,
    Quartile,
    Sjr,
    Indicator(Indicator),
    Ignored,
}

impl HeaderField {
    pub(crate) fn classify(header: &str) -> HeaderField {
        let key = normalize(header);
        match key.as_str() {
            "title" | "journal" | "journaltitle" | "sourcetitle" => HeaderField::Title,
            "year" => HeaderField::Year,
            "quarter" => HeaderField::Quarter,
            "sjrbestquartile" | "quartile" | "sjrquartile" => HeaderField::Quartile,
            "sjr" | "sjrscore" => HeaderField::Sjr,
            _ => Indicator::from_normalized(&key).map_or(HeaderField::Ignored, HeaderField::Indicator),
        }
    }
}
