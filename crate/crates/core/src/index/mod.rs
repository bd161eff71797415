//! Positional, field-scoped inverted index.
//!
//! Every search domain owns a sorted table of entity keys and one or more
//! fields. Postings refer to entities by their ordinal in that table, so
//! posting lists sorted by ordinal are also sorted by entity key.

mod tokenize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Bm25Params;
use crate::corpus::{current_year, CorpusSnapshot, PaperRecord, YearSeries, MIN_YEAR};
use crate::topics::Taxonomy;

pub use tokenize::{terms, token_surfaces, tokenize, Token};

/// Longest phrase accepted by [`InvertedIndex::ngram_trend`].
pub const MAX_NGRAM: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("query has no searchable terms")]
    EmptyQuery,
    #[error("page and page_size must be positive")]
    BadPage,
    #[error("unknown search domain {0:?}")]
    UnknownDomain(String),
    #[error("phrase must have between 1 and {MAX_NGRAM} tokens, got {0}")]
    PhraseTooLong(usize),
    #[error("phrase has no tokens")]
    EmptyPhrase,
    #[error("year range {from}..={to} is empty")]
    BadYearRange { from: i32, to: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchDomain {
    Papers,
    Authors,
    Venues,
    Urls,
    FieldOfStudy,
}

impl SearchDomain {
    pub const ALL: [SearchDomain; 5] = [
        SearchDomain::Papers,
        SearchDomain::Authors,
        SearchDomain::Venues,
        SearchDomain::Urls,
        SearchDomain::FieldOfStudy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SearchDomain::Papers => "papers",
            SearchDomain::Authors => "authors",
            SearchDomain::Venues => "venues",
            SearchDomain::Urls => "urls",
            SearchDomain::FieldOfStudy => "field_of_study",
        }
    }
}

impl fmt::Display for SearchDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchDomain {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect::<String>()
            .to_lowercase();
        match folded.as_str() {
            "papers" | "paper" => Ok(SearchDomain::Papers),
            "authors" | "author" => Ok(SearchDomain::Authors),
            "venues" | "venue" => Ok(SearchDomain::Venues),
            "urls" | "url" => Ok(SearchDomain::Urls),
            "fieldofstudy" | "fieldsofstudy" | "topics" => Ok(SearchDomain::FieldOfStudy),
            _ => Err(SearchError::UnknownDomain(s.to_string())),
        }
    }
}

/// Indexed text fields. Papers carry three; every other domain has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Field {
    Title,
    Abstract,
    FullText,
    AuthorName,
    VenueName,
    Url,
    Subtopic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Ordinal into the owning domain's key table.
    pub doc: u32,
    pub tf: u32,
    pub positions: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldIndex {
    terms: BTreeMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    total_length: u64,
}

impl FieldIndex {
    fn build<'a>(texts: impl Iterator<Item = Option<&'a str>>) -> Self {
        let mut terms: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut doc_lengths = Vec::new();
        let mut total_length = 0u64;
        for (doc, text) in texts.enumerate() {
            let mut local: BTreeMap<String, Vec<u32>> = BTreeMap::new();
            let mut len = 0u32;
            for tok in tokenize(text.unwrap_or("")) {
                local.entry(tok.surface).or_default().push(tok.position);
                len += 1;
            }
            for (term, positions) in local {
                terms.entry(term).or_default().push(Posting {
                    doc: doc as u32,
                    tf: positions.len() as u32,
                    positions,
                });
            }
            doc_lengths.push(len);
            total_length += u64::from(len);
        }
        Self {
            terms,
            doc_lengths,
            total_length,
        }
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.terms.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn doc_length(&self, doc: u32) -> u32 {
        self.doc_lengths[doc as usize]
    }

    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn total_length(&self) -> u64 {
        self.total_length
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn average_length(&self) -> f64 {
        if self.doc_lengths.is_empty() {
            0.0
        } else {
            self.total_length as f64 / self.doc_lengths.len() as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainIndex {
    keys: Vec<String>,
    fields: Vec<(Field, FieldIndex)>,
}

impl DomainIndex {
    fn build<'a, F>(keys: Vec<String>, fields: &[Field], mut text: F) -> Self
    where
        F: FnMut(usize, Field) -> Option<&'a str>,
    {
        let fields = fields
            .iter()
            .map(|&f| (f, FieldIndex::build((0..keys.len()).map(|i| text(i, f)))))
            .collect();
        Self { keys, fields }
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn field(&self, field: Field) -> Option<&FieldIndex> {
        self.fields.iter().find(|(f, _)| *f == field).map(|(_, i)| i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedHit {
    pub key: String,
    pub score: f64,
    pub matched_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPage {
    pub total_hits: usize,
    pub hits: Vec<RankedHit>,
}

/// Lucene-style BM25 idf; always positive.
pub fn bm25_idf(doc_count: f64, df: f64) -> f64 {
    (1.0 + (doc_count - df + 0.5) / (df + 0.5)).ln()
}

/// Saturated, length-normalized term frequency component of BM25.
pub fn bm25_tf(tf: f64, doc_len: f64, avg_len: f64, k1: f64, b: f64) -> f64 {
    tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avg_len))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    papers: DomainIndex,
    paper_years: Vec<i32>,
    authors: DomainIndex,
    venues: DomainIndex,
    urls: DomainIndex,
    topics: DomainIndex,
    /// year -> total 1-, 2- and 3-grams over full texts.
    ngram_totals: BTreeMap<i32, [u64; MAX_NGRAM]>,
}

impl InvertedIndex {
    /// Indexes paper title/abstract/full text, author and venue names,
    /// distinct URL strings and subtopic names.
    pub fn build(snapshot: &CorpusSnapshot, taxonomy: &Taxonomy) -> Self {
        let papers: Vec<&PaperRecord> = snapshot.papers.values().collect();
        let paper_index = DomainIndex::build(
            papers.iter().map(|p| p.id.to_string()).collect(),
            &[Field::Title, Field::Abstract, Field::FullText],
            |i, f| match f {
                Field::Title => Some(papers[i].title.as_str()),
                Field::Abstract => papers[i].abstract_text.as_deref(),
                _ => papers[i].full_text.as_deref(),
            },
        );

        let authors: Vec<_> = snapshot.authors.values().collect();
        let author_index = DomainIndex::build(
            authors.iter().map(|a| a.key.clone()).collect(),
            &[Field::AuthorName],
            |i, _| Some(authors[i].display_name.as_str()),
        );

        let venues: Vec<_> = snapshot.venues.values().collect();
        let venue_index = DomainIndex::build(
            venues.iter().map(|v| v.key.clone()).collect(),
            &[Field::VenueName],
            |i, _| Some(venues[i].display_name.as_str()),
        );

        let urls: Vec<String> = papers
            .iter()
            .flat_map(|p| p.url_mentions.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let url_index = DomainIndex::build(urls.clone(), &[Field::Url], |i, _| {
            Some(urls[i].as_str())
        });

        let mut topics: Vec<(String, String)> = taxonomy
            .iter()
            .map(|(c, r)| (format!("{c}/{}", r.name), r.name.clone()))
            .collect();
        topics.sort();
        let topic_index = DomainIndex::build(
            topics.iter().map(|(k, _)| k.clone()).collect(),
            &[Field::Subtopic],
            |i, _| Some(topics[i].1.as_str()),
        );

        let mut ngram_totals: BTreeMap<i32, [u64; MAX_NGRAM]> = BTreeMap::new();
        let full = paper_index.field(Field::FullText).expect("papers index full text");
        for (doc, p) in papers.iter().enumerate() {
            let len = u64::from(full.doc_length(doc as u32));
            let totals = ngram_totals.entry(p.year).or_default();
            for (n, slot) in totals.iter_mut().enumerate() {
                *slot += len.saturating_sub(n as u64);
            }
        }

        Self {
            paper_years: papers.iter().map(|p| p.year).collect(),
            papers: paper_index,
            authors: author_index,
            venues: venue_index,
            urls: url_index,
            topics: topic_index,
            ngram_totals,
        }
    }

    pub fn domain(&self, domain: SearchDomain) -> &DomainIndex {
        match domain {
            SearchDomain::Papers => &self.papers,
            SearchDomain::Authors => &self.authors,
            SearchDomain::Venues => &self.venues,
            SearchDomain::Urls => &self.urls,
            SearchDomain::FieldOfStudy => &self.topics,
        }
    }

    /// True when no corpus document is indexed. The subtopic domain comes
    /// from the taxonomy and is not counted.
    pub fn is_empty(&self) -> bool {
        SearchDomain::ALL
            .iter()
            .filter(|d| **d != SearchDomain::FieldOfStudy)
            .all(|d| self.domain(*d).keys.is_empty())
    }

    fn weighted_fields(&self, domain: SearchDomain, params: &Bm25Params) -> Vec<(f64, &FieldIndex)> {
        let d = self.domain(domain);
        d.fields
            .iter()
            .map(|(f, idx)| {
                let w = match f {
                    Field::Title => params.title_weight,
                    Field::Abstract => params.abstract_weight,
                    Field::FullText => params.full_text_weight,
                    _ => 1.0,
                };
                (w, idx)
            })
            .collect()
    }

    /// Every matching entity ranked by (score desc, key asc), unpaginated.
    pub fn rank(
        &self,
        query: &str,
        domain: SearchDomain,
        params: &Bm25Params,
    ) -> Result<Vec<RankedHit>, SearchError> {
        let query_terms: BTreeSet<String> = token_surfaces(query).collect();
        if query_terms.is_empty() {
            return Err(SearchError::EmptyQuery);
        }
        let mut scores: HashMap<u32, (f64, BTreeSet<&str>)> = HashMap::new();
        for (weight, field) in self.weighted_fields(domain, params) {
            let n = field.doc_count() as f64;
            let avg_len = field.average_length();
            for term in &query_terms {
                let postings = field.postings(term);
                if postings.is_empty() {
                    continue;
                }
                let idf = bm25_idf(n, postings.len() as f64);
                for p in postings {
                    let dl = f64::from(field.doc_length(p.doc));
                    let s = idf * bm25_tf(f64::from(p.tf), dl, avg_len, params.k1, params.b);
                    let entry = scores.entry(p.doc).or_insert((0.0, BTreeSet::new()));
                    entry.0 += weight * s;
                    entry.1.insert(term.as_str());
                }
            }
        }
        let keys = &self.domain(domain).keys;
        let mut hits: Vec<RankedHit> = scores
            .into_iter()
            .map(|(doc, (score, matched))| RankedHit {
                key: keys[doc as usize].clone(),
                score,
                matched_terms: matched.into_iter().map(String::from).collect(),
            })
            .collect();
        hits.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
        Ok(hits)
    }

    /// OR-semantics BM25 search, paginated from page 1. A page past the end
    /// is empty rather than an error.
    pub fn search(
        &self,
        query: &str,
        domain: SearchDomain,
        page: usize,
        page_size: usize,
        params: &Bm25Params,
    ) -> Result<SearchPage, SearchError> {
        if page == 0 || page_size == 0 {
            return Err(SearchError::BadPage);
        }
        let all = self.rank(query, domain, params)?;
        let total_hits = all.len();
        let start = (page - 1).saturating_mul(page_size);
        let hits = all.into_iter().skip(start).take(page_size).collect();
        Ok(SearchPage { total_hits, hits })
    }

    /// Total full-text n-grams of length `n` (1..=3) in papers of `year`.
    pub fn ngram_total(&self, year: i32, n: usize) -> u64 {
        self.ngram_totals
            .get(&year)
            .map_or(0, |t| t[n.clamp(1, MAX_NGRAM) - 1])
    }

    /// Relative frequency per year of the exact token sequence across all
    /// full texts. Every year in the (clamped) range is present.
    pub fn ngram_trend(&self, phrase: &str, year_from: i32, year_to: i32) -> Result<YearSeries, SearchError> {
        let tokens = terms(phrase);
        match tokens.len() {
            0 => return Err(SearchError::EmptyPhrase),
            n if n > MAX_NGRAM => return Err(SearchError::PhraseTooLong(n)),
            _ => {}
        }
        if year_from > year_to {
            return Err(SearchError::BadYearRange {
                from: year_from,
                to: year_to,
            });
        }
        let n = tokens.len();
        let full = self.papers.field(Field::FullText).expect("papers index full text");
        let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
        for (doc, occurrences) in phrase_occurrences(full, &tokens) {
            *counts.entry(self.paper_years[doc as usize]).or_insert(0) += occurrences;
        }
        let lo = year_from.max(MIN_YEAR);
        let hi = year_to.min(current_year());
        Ok((lo..=hi)
            .map(|y| {
                let total = self.ngram_total(y, n);
                let value = if total == 0 {
                    0.0
                } else {
                    counts.get(&y).copied().unwrap_or(0) as f64 / total as f64
                };
                (y, value)
            })
            .collect())
    }
}

/// (doc, occurrence count) for every document containing the phrase.
fn phrase_occurrences(field: &FieldIndex, phrase: &[String]) -> Vec<(u32, u64)> {
    let lists: Vec<&[Posting]> = phrase.iter().map(|t| field.postings(t)).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return Vec::new();
    }
    let mut cursors = vec![0usize; lists.len()];
    let mut out = Vec::new();
    'docs: for first in lists[0] {
        for (k, list) in lists.iter().enumerate().skip(1) {
            while cursors[k] < list.len() && list[cursors[k]].doc < first.doc {
                cursors[k] += 1;
            }
            if cursors[k] == list.len() {
                break 'docs;
            }
            if list[cursors[k]].doc != first.doc {
                continue 'docs;
            }
        }
        let count = first
            .positions
            .iter()
            .filter(|&&p| {
                lists
                    .iter()
                    .enumerate()
                    .skip(1)
                    .all(|(k, list)| list[cursors[k]].positions.binary_search(&(p + k as u32)).is_ok())
            })
            .count() as u64;
        if count > 0 {
            out.push((first.doc, count));
        }
    }
    out
}

/// Text window of `radius` tokens around the first matched term, searched in
/// title, abstract and full text order.
pub fn snippet(paper: &PaperRecord, matched_terms: &[String], radius: usize) -> Option<String> {
    let fields = [
        Some(paper.title.as_str()),
        paper.abstract_text.as_deref(),
        paper.full_text.as_deref(),
    ];
    for text in fields.into_iter().flatten() {
        let toks = terms(text);
        if let Some(pos) = toks.iter().position(|t| matched_terms.contains(t)) {
            let lo = pos.saturating_sub(radius);
            let hi = (pos + radius + 1).min(toks.len());
            return Some(toks[lo..hi].join(" "));
        }
    }
    None
}
