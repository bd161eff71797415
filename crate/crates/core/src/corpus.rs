//! Canonical domain types shared by every other module: paper identifiers,
//! paper/author/venue records, citation edges, year histograms and the
//! immutable [`CorpusSnapshot`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Earliest publication year the corpus can contain.
pub const MIN_YEAR: i32 = 1965;

/// Two-digit year codes at or above this value belong to the 1900s.
pub const YEAR_PIVOT: u8 = 65;

/// Current calendar year (UTC).
pub fn current_year() -> i32 {
    Utc::now().year()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("malformed paper id {0:?}: expected <letter><yy>-<nnnn>")]
    MalformedId(String),
    #[error("author name is empty after normalization")]
    EmptyName,
}

/// Eight-character anthology identifier, e.g. `P19-1001`.
///
/// Field order matches the canonical rendering, so the derived ordering is
/// identical to lexicographic ordering of the canonical strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaperId {
    collection: u8,
    year_code: u8,
    sequence: u16,
}

impl PaperId {
    pub fn new(collection: char, year_code: u8, sequence: u16) -> Result<Self, CorpusError> {
        if !collection.is_ascii_uppercase() || year_code > 99 || sequence > 9999 {
            return Err(CorpusError::MalformedId(format!(
                "{collection}{year_code:02}-{sequence:04}"
            )));
        }
        Ok(Self {
            collection: collection as u8,
            year_code,
            sequence,
        })
    }

    pub fn parse(s: &str) -> Result<Self, CorpusError> {
        let malformed = || CorpusError::MalformedId(s.to_string());
        let b = s.as_bytes();
        if b.len() != 8 || !b[0].is_ascii_uppercase() || b[3] != b'-' {
            return Err(malformed());
        }
        let digits = |r: std::ops::Range<usize>| -> Option<u32> {
            b[r].iter().try_fold(0u32, |acc, &c| {
                c.is_ascii_digit().then(|| acc * 10 + u32::from(c - b'0'))
            })
        };
        let year_code = digits(1..3).ok_or_else(malformed)?;
        let sequence = digits(4..8).ok_or_else(malformed)?;
        Ok(Self {
            collection: b[0],
            year_code: year_code as u8,
            sequence: sequence as u16,
        })
    }

    pub fn collection(&self) -> char {
        self.collection as char
    }

    pub fn year_code(&self) -> u8 {
        self.year_code
    }

    pub fn sequence(&self) -> u16 {
        self.sequence
    }

    /// Expands the two-digit year code with the pivot at 65.
    pub fn year(&self) -> i32 {
        if self.year_code >= YEAR_PIVOT {
            1900 + i32::from(self.year_code)
        } else {
            2000 + i32::from(self.year_code)
        }
    }
}

/// Free-function form of [`PaperId::year`].
pub fn year_from_id(id: PaperId) -> i32 {
    id.year()
}

/// Free-function form of [`PaperId::parse`].
pub fn parse_paper_id(s: &str) -> Result<PaperId, CorpusError> {
    PaperId::parse(s)
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:02}-{:04}",
            self.collection as char, self.year_code, self.sequence
        )
    }
}

impl FromStr for PaperId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for PaperId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PaperId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PaperId::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Lowercases, strips diacritics, drops periods after single-letter initials
/// and collapses whitespace. Commas are kept and name parts are never
/// reordered.
pub fn normalize_author_name(name: &str) -> Result<String, CorpusError> {
    let mut current = normalize_once(name);
    // Dropping a period can expose another initial ("a.." -> "a."); iterate to a fixpoint.
    loop {
        let next = normalize_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    if current.is_empty() {
        Err(CorpusError::EmptyName)
    } else {
        Ok(current)
    }
}

fn normalize_once(name: &str) -> String {
    let folded: Vec<char> = name
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect();

    let mut out = String::with_capacity(folded.len());
    for (i, &c) in folded.iter().enumerate() {
        if c == '.' && is_initial_period(&folded, i) {
            continue;
        }
        if c.is_whitespace() {
            if !out.is_empty() && !out.ends_with(' ') {
                out.push(' ');
            }
            continue;
        }
        out.push(c);
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

// "j." and the "r." of "j.r." are initials; "jr." is not.
fn is_initial_period(chars: &[char], i: usize) -> bool {
    if i == 0 || !chars[i - 1].is_alphabetic() {
        return false;
    }
    i == 1 || chars[i - 2].is_whitespace() || chars[i - 2] == '.'
}

/// Venue key: lowercase, trimmed, inner whitespace collapsed.
pub fn normalize_venue(venue: &str) -> String {
    venue
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: PaperId,
    pub title: String,
    pub authors: Vec<String>,
    /// Normalized venue key.
    pub venue: String,
    pub year: i32,
    pub abstract_text: Option<String>,
    pub full_text: Option<String>,
    pub pdf_url: Option<String>,
    pub reference_strings: Vec<String>,
    pub url_mentions: Vec<String>,
}

impl PaperRecord {
    /// Normalized author keys in author-list order (unnormalizable names are skipped).
    pub fn author_keys(&self) -> impl Iterator<Item = String> + '_ {
        self.authors
            .iter()
            .filter_map(|a| normalize_author_name(a).ok())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorRecord {
    pub key: String,
    pub display_name: String,
    pub paper_ids: BTreeSet<PaperId>,
    pub first_year: i32,
    pub last_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueRecord {
    pub key: String,
    pub display_name: String,
    pub papers_by_year: BTreeMap<i32, Vec<PaperId>>,
}

impl VenueRecord {
    pub fn histogram(&self) -> YearHistogram {
        self.papers_by_year
            .iter()
            .map(|(&y, ids)| (y, ids.len() as u64))
            .collect()
    }

    pub fn paper_ids(&self) -> impl Iterator<Item = PaperId> + '_ {
        self.papers_by_year.values().flatten().copied()
    }

    pub fn paper_count(&self) -> usize {
        self.papers_by_year.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CitationEdge {
    pub citing: PaperId,
    pub cited: PaperId,
}

/// Year → count mapping with a running total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearHistogram {
    entries: BTreeMap<i32, u64>,
    total: u64,
}

impl YearHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, year: i32, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(year).or_insert(0) += count;
        self.total += count;
    }

    pub fn increment(&mut self, year: i32) {
        self.add(year, 1);
    }

    pub fn get(&self, year: i32) -> u64 {
        self.entries.get(&year).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &BTreeMap<i32, u64> {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(i32, u64)> for YearHistogram {
    fn from_iter<I: IntoIterator<Item = (i32, u64)>>(iter: I) -> Self {
        let mut h = YearHistogram::new();
        for (y, c) in iter {
            h.add(y, c);
        }
        h
    }
}

impl FromIterator<i32> for YearHistogram {
    fn from_iter<I: IntoIterator<Item = i32>>(iter: I) -> Self {
        iter.into_iter().map(|y| (y, 1)).collect()
    }
}

/// Year → real value series (relative frequencies, normalized weights).
pub type YearSeries = BTreeMap<i32, f64>;

/// Immutable, versioned view of the whole corpus plus its resolved citation graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSnapshot {
    pub papers: BTreeMap<PaperId, PaperRecord>,
    pub authors: BTreeMap<String, AuthorRecord>,
    pub venues: BTreeMap<String, VenueRecord>,
    pub citation_edges: BTreeSet<CitationEdge>,
    pub unresolved_reference_count: u64,
    pub version: u64,
    pub built_at: DateTime<Utc>,
}

impl CorpusSnapshot {
    pub fn empty() -> Self {
        Self {
            papers: BTreeMap::new(),
            authors: BTreeMap::new(),
            venues: BTreeMap::new(),
            citation_edges: BTreeSet::new(),
            unresolved_reference_count: 0,
            version: 1,
            built_at: Utc::now(),
        }
    }

    /// Assembles a snapshot from paper records and resolved edges, deriving
    /// the author and venue collections.
    pub fn assemble(
        papers: BTreeMap<PaperId, PaperRecord>,
        venue_display: &BTreeMap<String, String>,
        citation_edges: BTreeSet<CitationEdge>,
        unresolved_reference_count: u64,
        version: u64,
    ) -> Self {
        let mut authors: BTreeMap<String, AuthorRecord> = BTreeMap::new();
        let mut venues: BTreeMap<String, VenueRecord> = BTreeMap::new();
        for paper in papers.values() {
            for (key, display) in paper
                .authors
                .iter()
                .filter_map(|a| normalize_author_name(a).ok().map(|k| (k, a)))
            {
                let rec = authors.entry(key.clone()).or_insert_with(|| AuthorRecord {
                    key,
                    display_name: display.split_whitespace().collect::<Vec<_>>().join(" "),
                    paper_ids: BTreeSet::new(),
                    first_year: paper.year,
                    last_year: paper.year,
                });
                rec.paper_ids.insert(paper.id);
                rec.first_year = rec.first_year.min(paper.year);
                rec.last_year = rec.last_year.max(paper.year);
            }
            let venue = venues
                .entry(paper.venue.clone())
                .or_insert_with(|| VenueRecord {
                    key: paper.venue.clone(),
                    display_name: venue_display
                        .get(&paper.venue)
                        .cloned()
                        .unwrap_or_else(|| paper.venue.clone()),
                    papers_by_year: BTreeMap::new(),
                });
            venue
                .papers_by_year
                .entry(paper.year)
                .or_default()
                .push(paper.id);
        }
        Self {
            papers,
            authors,
            venues,
            citation_edges,
            unresolved_reference_count,
            version,
            built_at: Utc::now(),
        }
    }

    /// Equality ignoring `version` and `built_at`.
    pub fn same_content(&self, other: &Self) -> bool {
        self.papers == other.papers
            && self.authors == other.authors
            && self.venues == other.venues
            && self.citation_edges == other.citation_edges
            && self.unresolved_reference_count == other.unresolved_reference_count
    }

    pub fn paper(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.papers.get(id)
    }

    /// Checks every structural invariant by full scan and returns the violations.
    pub fn validate(&self, max_year: i32) -> Vec<String> {
        let mut problems = Vec::new();
        for (id, p) in &self.papers {
            if *id != p.id {
                problems.push(format!("paper keyed {id} carries id {}", p.id));
            }
            if !(MIN_YEAR..=max_year).contains(&p.year) {
                problems.push(format!("{id}: year {} out of range", p.year));
            }
            if p.year != p.id.year() {
                problems.push(format!("{id}: year {} disagrees with id", p.year));
            }
            if p.title.trim().is_empty() || p.authors.is_empty() {
                problems.push(format!("{id}: empty title or author list"));
            }
            for key in p.author_keys() {
                match self.authors.get(&key) {
                    Some(a) if a.paper_ids.contains(id) => {}
                    _ => problems.push(format!("{id}: author {key:?} missing back-reference")),
                }
            }
            match self.venues.get(&p.venue) {
                Some(v) if v.papers_by_year.get(&p.year).is_some_and(|ids| ids.contains(id)) => {}
                _ => problems.push(format!("{id}: venue {:?} missing back-reference", p.venue)),
            }
        }
        for (key, a) in &self.authors {
            let years: Vec<i32> = a
                .paper_ids
                .iter()
                .filter_map(|id| self.papers.get(id))
                .map(|p| p.year)
                .collect();
            if years.len() != a.paper_ids.len() {
                problems.push(format!("author {key:?} lists unknown papers"));
                continue;
            }
            if years.iter().min() != Some(&a.first_year) || years.iter().max() != Some(&a.last_year)
            {
                problems.push(format!("author {key:?} year span inconsistent"));
            }
            for id in &a.paper_ids {
                if !self.papers[id].author_keys().any(|k| &k == key) {
                    problems.push(format!("author {key:?} claims {id} without authorship"));
                }
            }
        }
        for (key, v) in &self.venues {
            for (year, ids) in &v.papers_by_year {
                for id in ids {
                    match self.papers.get(id) {
                        Some(p) if p.year == *year && &p.venue == key => {}
                        _ => problems.push(format!("venue {key:?} lists {id} under {year}")),
                    }
                }
            }
        }
        if self.venues.len() > self.papers.len() {
            problems.push("more venues than papers".into());
        }
        for e in &self.citation_edges {
            if e.citing == e.cited {
                problems.push(format!("self edge on {}", e.citing));
            }
            if !self.papers.contains_key(&e.citing) || !self.papers.contains_key(&e.cited) {
                problems.push(format!("dangling edge {} -> {}", e.citing, e.cited));
            }
        }
        problems
    }
}
