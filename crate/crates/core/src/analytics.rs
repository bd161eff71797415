//! Paper, author and venue statistics, TF-IDF similarity and the ranked
//! "popular / seminal / diverse" lists.
//!
//! Citations are always bucketed by the citing paper's year. Every ranked
//! output is ordered by (score desc, key asc).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::config::AnalyticsConfig;
use crate::corpus::{normalize_author_name, normalize_venue, CorpusSnapshot, PaperId, YearHistogram};
use crate::index::{terms, token_surfaces};
use crate::topics::{aggregate_weights, diversity_entropy, entropy, Category, SubtopicKey, TopicAssignment};
use crate::urls::{rank_counts, CountEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("unknown paper {0}")]
    UnknownPaper(String),
    #[error("unknown author {0:?}")]
    UnknownAuthor(String),
    #[error("unknown venue {0:?}")]
    UnknownVenue(String),
    #[error("unknown ranked list kind {0:?}")]
    UnknownListKind(String),
}

/// Title tokens that mark a survey paper.
pub const SURVEY_MARKERS: [&str; 4] = ["survey", "review", "overview", "tutorial"];

// ---------------------------------------------------------------------------
// TF-IDF similarity
// ---------------------------------------------------------------------------

/// Sparse TF-IDF vectors over title + abstract (tf = raw count,
/// idf = ln(N / df)).
#[derive(Debug, Clone, Default)]
pub struct SimilarityModel {
    ids: Vec<PaperId>,
    vectors: Vec<Vec<(u32, f64)>>,
    norms: Vec<f64>,
    postings: Vec<Vec<(u32, f64)>>,
}

impl SimilarityModel {
    pub fn build(snapshot: &CorpusSnapshot) -> Self {
        let counts: Vec<BTreeMap<String, u32>> = snapshot
            .papers
            .values()
            .map(|p| {
                let mut tf = BTreeMap::new();
                let text = [Some(p.title.as_str()), p.abstract_text.as_deref()];
                for t in text.into_iter().flatten().flat_map(token_surfaces) {
                    *tf.entry(t).or_insert(0) += 1;
                }
                tf
            })
            .collect();
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for tf in &counts {
            for t in tf.keys() {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let term_ids: HashMap<&str, u32> = df.keys().enumerate().map(|(i, t)| (*t, i as u32)).collect();
        let n = counts.len() as f64;
        let mut postings = vec![Vec::new(); df.len()];
        let mut vectors = Vec::with_capacity(counts.len());
        let mut norms = Vec::with_capacity(counts.len());
        for (doc, tf) in counts.iter().enumerate() {
            let v: Vec<(u32, f64)> = tf
                .iter()
                .map(|(t, &c)| {
                    let idf = (n / f64::from(df[t.as_str()])).ln();
                    (term_ids[t.as_str()], f64::from(c) * idf)
                })
                .filter(|(_, w)| *w != 0.0)
                .collect();
            for &(term, w) in &v {
                postings[term as usize].push((doc as u32, w));
            }
            norms.push(v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt());
            vectors.push(v);
        }
        Self {
            ids: snapshot.papers.keys().copied().collect(),
            vectors,
            norms,
            postings,
        }
    }

    fn position(&self, id: &PaperId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    /// Cosine similarity of two papers; 0 when either vector is zero.
    pub fn cosine(&self, a: &PaperId, b: &PaperId) -> Option<f64> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        if self.norms[i] == 0.0 || self.norms[j] == 0.0 {
            return Some(0.0);
        }
        let (va, vb) = (&self.vectors[i], &self.vectors[j]);
        let (mut x, mut y, mut dot) = (0, 0, 0.0);
        while x < va.len() && y < vb.len() {
            match va[x].0.cmp(&vb[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    dot += va[x].1 * vb[y].1;
                    x += 1;
                    y += 1;
                }
            }
        }
        Some((dot / (self.norms[i] * self.norms[j])).min(1.0))
    }

    /// Top-k most similar papers with positive similarity, self excluded,
    /// ties by ascending id.
    pub fn top_k(&self, id: &PaperId, k: usize) -> Option<Vec<SimilarPaper>> {
        let i = self.position(id)?;
        if self.norms[i] == 0.0 {
            return Some(Vec::new());
        }
        let mut dots: HashMap<u32, f64> = HashMap::new();
        for &(term, wq) in &self.vectors[i] {
            for &(doc, wd) in &self.postings[term as usize] {
                if doc as usize != i {
                    *dots.entry(doc).or_insert(0.0) += wq * wd;
                }
            }
        }
        let mut out: Vec<SimilarPaper> = dots
            .into_iter()
            .map(|(doc, dot)| SimilarPaper {
                id: self.ids[doc as usize],
                similarity: (dot / (self.norms[i] * self.norms[doc as usize])).min(1.0),
            })
            .filter(|s| s.similarity > 0.0)
            .collect();
        out.sort_by(|a, b| b.similarity.total_cmp(&a.similarity).then_with(|| a.id.cmp(&b.id)));
        out.truncate(k);
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarPaper {
    pub id: PaperId,
    pub similarity: f64,
}

pub fn similar_papers(catalog: &Catalog, id: &PaperId, k: usize) -> Result<Vec<SimilarPaper>, AnalyticsError> {
    catalog
        .similarity()
        .top_k(id, k.max(1))
        .ok_or_else(|| AnalyticsError::UnknownPaper(id.to_string()))
}

// ---------------------------------------------------------------------------
// Entity statistics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSubtopic {
    pub category: Category,
    pub subtopic: String,
    pub weight: f64,
}

fn weighted(map: BTreeMap<SubtopicKey, f64>) -> Vec<WeightedSubtopic> {
    map.into_iter()
        .map(|(k, weight)| WeightedSubtopic {
            category: k.category,
            subtopic: k.subtopic,
            weight,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperStats {
    pub id: PaperId,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: String,
    pub year: i32,
    pub citations_by_year: YearHistogram,
    pub total_citations: u64,
    pub outgoing_citations: u64,
    pub similar_papers: Vec<SimilarPaper>,
    pub topic_distribution: Vec<TopicAssignment>,
    pub diversity: f64,
    pub mentioned_urls: Vec<String>,
    pub pdf_link: Option<String>,
}

fn citations_by_citing_year(catalog: &Catalog, ids: impl IntoIterator<Item = PaperId>) -> YearHistogram {
    let snapshot = catalog.snapshot();
    ids.into_iter()
        .flat_map(|id| catalog.graph().citing(&id).iter().copied())
        .filter_map(|c| snapshot.paper(&c))
        .map(|p| p.year)
        .collect()
}

pub fn paper_stats(catalog: &Catalog, id: &PaperId, cfg: &AnalyticsConfig) -> Result<PaperStats, AnalyticsError> {
    let paper = catalog
        .snapshot()
        .paper(id)
        .ok_or_else(|| AnalyticsError::UnknownPaper(id.to_string()))?;
    let citations_by_year = citations_by_citing_year(catalog, [*id]);
    let topic_distribution = catalog.assignments().for_paper(id).to_vec();
    Ok(PaperStats {
        id: *id,
        title: paper.title.clone(),
        authors: paper.authors.clone(),
        venue: paper.venue.clone(),
        year: paper.year,
        total_citations: citations_by_year.total(),
        citations_by_year,
        outgoing_citations: catalog.graph().cited_by(id).len() as u64,
        similar_papers: similar_papers(catalog, id, cfg.similar_k)?,
        diversity: diversity_entropy(&topic_distribution),
        topic_distribution,
        mentioned_urls: paper.url_mentions.clone(),
        pdf_link: paper.pdf_url.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorStats {
    pub key: String,
    pub display_name: String,
    pub papers: Vec<PaperId>,
    pub first_year: i32,
    pub last_year: i32,
    pub publications_by_year: YearHistogram,
    pub citations_by_year: YearHistogram,
    pub topic_distribution: Vec<WeightedSubtopic>,
    pub diversity: f64,
    pub venue_preference: Vec<CountEntry>,
}

/// Looks an author up by key, falling back to normalizing the input.
pub fn author_stats(catalog: &Catalog, key: &str) -> Result<AuthorStats, AnalyticsError> {
    let snapshot = catalog.snapshot();
    let author = snapshot
        .authors
        .get(key)
        .or_else(|| {
            normalize_author_name(key)
                .ok()
                .and_then(|k| snapshot.authors.get(&k))
        })
        .ok_or_else(|| AnalyticsError::UnknownAuthor(key.to_string()))?;
    let papers: Vec<_> = author
        .paper_ids
        .iter()
        .filter_map(|id| snapshot.paper(id))
        .collect();
    let mut venues: BTreeMap<&str, u64> = BTreeMap::new();
    for p in &papers {
        *venues.entry(&p.venue).or_insert(0) += 1;
    }
    let topics = aggregate_weights(author.paper_ids.iter().map(|id| catalog.assignments().for_paper(id)));
    Ok(AuthorStats {
        key: author.key.clone(),
        display_name: author.display_name.clone(),
        papers: author.paper_ids.iter().copied().collect(),
        first_year: author.first_year,
        last_year: author.last_year,
        publications_by_year: papers.iter().map(|p| p.year).collect(),
        citations_by_year: citations_by_citing_year(catalog, author.paper_ids.iter().copied()),
        diversity: entropy(topics.values().copied()),
        topic_distribution: weighted(topics),
        venue_preference: rank_counts(venues),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueStats {
    pub key: String,
    pub display_name: String,
    pub publications_by_year: YearHistogram,
    pub citations_by_year: YearHistogram,
    /// Publications with `year >= now_year - recent_years`.
    pub recent_publications: u64,
    pub topic_distribution: Vec<WeightedSubtopic>,
    pub papers_by_year: BTreeMap<i32, Vec<PaperId>>,
    /// Edges into this venue grouped by the citing paper's venue.
    pub top_citing_venues: Vec<CountEntry>,
    /// Edges out of this venue grouped by the cited paper's venue.
    pub top_cited_venues: Vec<CountEntry>,
    pub top_authors: Vec<CountEntry>,
    /// Per publication year, the normalized subtopic weights of that year's papers.
    pub topic_shift: BTreeMap<i32, Vec<WeightedSubtopic>>,
}

pub fn venue_stats(
    catalog: &Catalog,
    key: &str,
    now_year: i32,
    cfg: &AnalyticsConfig,
) -> Result<VenueStats, AnalyticsError> {
    let snapshot = catalog.snapshot();
    let venue = snapshot
        .venues
        .get(key)
        .or_else(|| snapshot.venues.get(&normalize_venue(key)))
        .ok_or_else(|| AnalyticsError::UnknownVenue(key.to_string()))?;
    let venue_of = |id: &PaperId| snapshot.paper(id).map(|p| p.venue.as_str());

    let mut citing: BTreeMap<&str, u64> = BTreeMap::new();
    let mut cited: BTreeMap<&str, u64> = BTreeMap::new();
    let mut authors: BTreeMap<String, u64> = BTreeMap::new();
    for id in venue.paper_ids() {
        for src in catalog.graph().citing(&id) {
            if let Some(v) = venue_of(src) {
                *citing.entry(v).or_insert(0) += 1;
            }
        }
        for dst in catalog.graph().cited_by(&id) {
            if let Some(v) = venue_of(dst) {
                *cited.entry(v).or_insert(0) += 1;
            }
        }
        if let Some(p) = snapshot.paper(&id) {
            for a in p.author_keys().collect::<BTreeSet<_>>() {
                *authors.entry(a).or_insert(0) += 1;
            }
        }
    }

    let assignments = catalog.assignments();
    let topic_shift = venue
        .papers_by_year
        .iter()
        .map(|(y, ids)| (*y, weighted(aggregate_weights(ids.iter().map(|id| assignments.for_paper(id))))))
        .collect();
    let recent_from = now_year - cfg.recent_years;

    Ok(VenueStats {
        key: venue.key.clone(),
        display_name: venue.display_name.clone(),
        publications_by_year: venue.histogram(),
        citations_by_year: citations_by_citing_year(catalog, venue.paper_ids()),
        recent_publications: venue
            .papers_by_year
            .iter()
            .filter(|(y, _)| **y >= recent_from)
            .map(|(_, ids)| ids.len() as u64)
            .sum(),
        topic_distribution: weighted(aggregate_weights(venue.paper_ids().map(|id| assignments.for_paper(&id)))),
        papers_by_year: venue.papers_by_year.clone(),
        top_citing_venues: rank_counts(citing),
        top_cited_venues: rank_counts(cited),
        top_authors: rank_counts(authors.iter().map(|(k, c)| (k.as_str(), *c))),
        topic_shift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub papers: usize,
    pub authors: usize,
    pub venues: usize,
    pub citations: usize,
    pub unresolved_references: u64,
    pub classified_papers: usize,
    pub unclassified_papers: usize,
    pub publications_by_year: YearHistogram,
}

pub fn corpus_summary(catalog: &Catalog) -> CorpusSummary {
    let s = catalog.snapshot();
    let classified = catalog.assignments().classified_count();
    CorpusSummary {
        papers: s.papers.len(),
        authors: s.authors.len(),
        venues: s.venues.len(),
        citations: s.citation_edges.len(),
        unresolved_references: s.unresolved_reference_count,
        classified_papers: classified,
        unclassified_papers: s.papers.len() - classified,
        publications_by_year: s.papers.values().map(|p| p.year).collect(),
    }
}

// ---------------------------------------------------------------------------
// Ranked lists
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankedListKind {
    RecentPopularPapers,
    SurveyPapers,
    SeminalPapers,
    DiversePapers,
    RecentPopularAuthors,
    LifetimePopularAuthors,
    TopPublishingAuthors,
    RecentProlificAuthors,
    DiverseAuthors,
    YoungPopularAuthors,
}

impl RankedListKind {
    pub const ALL: [RankedListKind; 10] = [
        RankedListKind::RecentPopularPapers,
        RankedListKind::SurveyPapers,
        RankedListKind::SeminalPapers,
        RankedListKind::DiversePapers,
        RankedListKind::RecentPopularAuthors,
        RankedListKind::LifetimePopularAuthors,
        RankedListKind::TopPublishingAuthors,
        RankedListKind::RecentProlificAuthors,
        RankedListKind::DiverseAuthors,
        RankedListKind::YoungPopularAuthors,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RankedListKind::RecentPopularPapers => "recent_popular_papers",
            RankedListKind::SurveyPapers => "survey_papers",
            RankedListKind::SeminalPapers => "seminal_papers",
            RankedListKind::DiversePapers => "diverse_papers",
            RankedListKind::RecentPopularAuthors => "recent_popular_authors",
            RankedListKind::LifetimePopularAuthors => "lifetime_popular_authors",
            RankedListKind::TopPublishingAuthors => "top_publishing_authors",
            RankedListKind::RecentProlificAuthors => "recent_prolific_authors",
            RankedListKind::DiverseAuthors => "diverse_authors",
            RankedListKind::YoungPopularAuthors => "young_popular_authors",
        }
    }

    pub fn ranks_papers(&self) -> bool {
        matches!(
            self,
            RankedListKind::RecentPopularPapers
                | RankedListKind::SurveyPapers
                | RankedListKind::SeminalPapers
                | RankedListKind::DiversePapers
        )
    }
}

impl fmt::Display for RankedListKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankedListKind {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-'))
            .collect::<String>()
            .to_lowercase();
        RankedListKind::ALL
            .into_iter()
            .find(|k| k.name().replace('_', "") == folded)
            .ok_or_else(|| AnalyticsError::UnknownListKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub key: String,
    pub score: f64,
}

/// Top `k` entities of one list kind, scored as of `now_year`.
pub fn ranked_list(
    catalog: &Catalog,
    kind: RankedListKind,
    now_year: i32,
    k: usize,
    cfg: &AnalyticsConfig,
) -> Vec<RankedEntry> {
    let snapshot = catalog.snapshot();
    let graph = catalog.graph();
    let recent_from = now_year - cfg.recent_years;
    let cites = |id: &PaperId| graph.in_degree(id) as f64;

    let mut entries: Vec<RankedEntry> = if kind.ranks_papers() {
        snapshot
            .papers
            .values()
            .filter_map(|p| {
                let score = match kind {
                    RankedListKind::RecentPopularPapers => (p.year >= recent_from).then(|| cites(&p.id)),
                    RankedListKind::SurveyPapers => terms(&p.title)
                        .iter()
                        .any(|t| SURVEY_MARKERS.contains(&t.as_str()))
                        .then(|| cites(&p.id)),
                    RankedListKind::SeminalPapers => {
                        let years: BTreeSet<i32> = graph
                            .citing(&p.id)
                            .iter()
                            .filter_map(|c| snapshot.paper(c))
                            .map(|c| c.year)
                            .collect();
                        (now_year - p.year >= cfg.seminal_age
                            && years.len() >= cfg.seminal_distinct_years)
                            .then(|| cites(&p.id))
                    }
                    _ => Some(diversity_entropy(catalog.assignments().for_paper(&p.id))),
                }?;
                Some(RankedEntry {
                    key: p.id.to_string(),
                    score,
                })
            })
            .collect()
    } else {
        snapshot
            .authors
            .values()
            .filter_map(|a| {
                let papers = || a.paper_ids.iter().filter_map(|id| snapshot.paper(id));
                let score = match kind {
                    RankedListKind::RecentPopularAuthors => papers()
                        .filter(|p| p.year >= recent_from)
                        .map(|p| cites(&p.id))
                        .sum(),
                    RankedListKind::LifetimePopularAuthors => papers().map(|p| cites(&p.id)).sum(),
                    RankedListKind::TopPublishingAuthors => a.paper_ids.len() as f64,
                    RankedListKind::RecentProlificAuthors => {
                        papers().filter(|p| p.year >= recent_from).count() as f64
                    }
                    RankedListKind::DiverseAuthors => entropy(
                        aggregate_weights(a.paper_ids.iter().map(|id| catalog.assignments().for_paper(id)))
                            .into_values(),
                    ),
                    RankedListKind::YoungPopularAuthors => {
                        if a.first_year < recent_from {
                            return None;
                        }
                        papers().map(|p| cites(&p.id)).sum()
                    }
                    _ => unreachable!("paper kinds handled above"),
                };
                Some(RankedEntry {
                    key: a.key.clone(),
                    score,
                })
            })
            .collect()
    };
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
    entries.truncate(k.max(1));
    entries
}
