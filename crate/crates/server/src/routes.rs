use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use scholarscope::analytics::{self, CorpusSummary, RankedEntry};
use scholarscope::index::{snippet, RankedHit};
use scholarscope::topics::{self, first_occurrence_timeline, SubtopicKey, TimelineEntry};
use scholarscope::urls::TopTables;
use scholarscope::{Catalog, Category, PaperId, RankedListKind, SearchDomain, UrlCategory, YearHistogram, YearSeries};
use serde::Serialize;

use crate::error::ApiError;
use crate::state::AppState;
use crate::VERSION_HEADER;

type Shared = State<Arc<AppState>>;
type Params = Query<HashMap<String, String>>;

const SNIPPET_RADIUS: usize = 10;
const DEFAULT_K: usize = 10;

/// Every successful body: the snapshot version and the payload.
#[derive(Debug, Serialize)]
pub struct Envelope<T> {
    pub version: u64,
    pub data: T,
}

fn respond<T: Serialize>(version: u64, data: T) -> Response {
    let mut resp = Json(Envelope { version, data }).into_response();
    resp.headers_mut().insert(VERSION_HEADER, version.into());
    resp
}

/// Runs `f` against one catalog and stamps both outcomes with its version.
fn with_catalog<T, F>(state: &AppState, f: F) -> Response
where
    T: Serialize,
    F: FnOnce(&Catalog) -> Result<T, ApiError>,
{
    let catalog = state.current();
    let version = catalog.version();
    match f(&catalog) {
        Ok(data) => respond(version, data),
        Err(e) => e.at_version(version).into_response(),
    }
}

fn param<T: FromStr>(q: &HashMap<String, String>, name: &str) -> Result<Option<T>, ApiError> {
    match q.get(name).map(|s| s.trim()).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| ApiError::bad_request("BadParameter", format!("{name}={raw:?} is not valid"))),
    }
}

fn positive(q: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match param::<usize>(q, name)?.unwrap_or(default) {
        0 => Err(ApiError::bad_request("BadParameter", format!("{name} must be positive"))),
        v => Ok(v),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/corpus/summary", get(summary))
        .route("/api/search", get(search))
        .route("/api/ngrams", get(ngrams))
        .route("/api/papers/{id}", get(paper))
        .route("/api/authors/{key}", get(author))
        .route("/api/venues/{key}", get(venue))
        .route("/api/topics", get(taxonomy))
        .route("/api/topics/timeline", get(timeline))
        .route("/api/topics/{category}/{subtopic}", get(topic))
        .route("/api/lists/{kind}", get(list))
        .route("/api/urls/top", get(urls_top))
        .route("/api/urls/{domain}", get(url_domain))
        .route("/api/admin/reingest", post(reingest))
        .fallback(|| async { ApiError::not_found("NoSuchEndpoint", "no such endpoint") })
        .with_state(state)
}

async fn summary(State(s): Shared) -> Response {
    with_catalog(&s, |c| Ok::<CorpusSummary, ApiError>(analytics::corpus_summary(c)))
}

#[derive(Debug, Serialize)]
pub struct SearchHit {
    pub key: String,
    pub label: String,
    pub score: f64,
    pub matched_terms: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snippet: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SearchResponse {
    pub query: String,
    pub domain: SearchDomain,
    pub page: usize,
    pub page_size: usize,
    pub total_hits: usize,
    pub hits: Vec<SearchHit>,
}

fn label(c: &Catalog, domain: SearchDomain, hit: &RankedHit) -> (String, Option<String>) {
    let s = c.snapshot();
    match domain {
        SearchDomain::Papers => PaperId::parse(&hit.key)
            .ok()
            .and_then(|id| s.paper(&id))
            .map(|p| (p.title.clone(), snippet(p, &hit.matched_terms, SNIPPET_RADIUS)))
            .unwrap_or_else(|| (hit.key.clone(), None)),
        SearchDomain::Authors => (
            s.authors.get(&hit.key).map_or_else(|| hit.key.clone(), |a| a.display_name.clone()),
            None,
        ),
        SearchDomain::Venues => (
            s.venues.get(&hit.key).map_or_else(|| hit.key.clone(), |v| v.display_name.clone()),
            None,
        ),
        SearchDomain::Urls | SearchDomain::FieldOfStudy => (hit.key.clone(), None),
    }
}

async fn search(State(s): Shared, Query(q): Params) -> Response {
    let cfg = &s.config;
    with_catalog(&s, |c| {
        let query = q.get("q").cloned().unwrap_or_default();
        let domain = match q.get("domain").map(|d| d.trim()).filter(|d| !d.is_empty()) {
            Some(d) => SearchDomain::from_str(d)?,
            None => SearchDomain::Papers,
        };
        let page = param::<usize>(&q, "page")?.unwrap_or(1);
        let page_size = param::<usize>(&q, "page_size")?.unwrap_or(cfg.page_size);
        if page_size > cfg.max_page_size {
            return Err(ApiError::bad_request(
                "BadPage",
                format!("page_size may not exceed {}", cfg.max_page_size),
            ));
        }
        let result = c.index().search(&query, domain, page, page_size, &cfg.bm25)?;
        let hits = result
            .hits
            .into_iter()
            .map(|h| {
                let (label, snippet) = label(c, domain, &h);
                SearchHit {
                    key: h.key,
                    label,
                    score: h.score,
                    matched_terms: h.matched_terms,
                    snippet,
                }
            })
            .collect();
        Ok(SearchResponse {
            query,
            domain,
            page,
            page_size,
            total_hits: result.total_hits,
            hits,
        })
    })
}

#[derive(Debug, Serialize)]
pub struct NgramResponse {
    pub phrase: String,
    pub n: usize,
    pub from: i32,
    pub to: i32,
    pub frequencies: YearSeries,
}

async fn ngrams(State(s): Shared, Query(q): Params) -> Response {
    with_catalog(&s, |c| {
        let phrase = q.get("phrase").cloned().unwrap_or_default();
        let years = c.snapshot().papers.values().map(|p| p.year);
        let (lo, hi) = years.fold((i32::MAX, i32::MIN), |(lo, hi), y| (lo.min(y), hi.max(y)));
        let now = s.config.now_year();
        let from = param(&q, "from")?.unwrap_or(if lo == i32::MAX { now } else { lo });
        let to = param(&q, "to")?.unwrap_or(if hi == i32::MIN { now } else { hi });
        let frequencies = c.index().ngram_trend(&phrase, from, to)?;
        Ok(NgramResponse {
            n: scholarscope::index::terms(&phrase).len(),
            phrase,
            from,
            to,
            frequencies,
        })
    })
}

async fn paper(State(s): Shared, Path(id): Path<String>) -> Response {
    with_catalog(&s, |c| {
        let id = PaperId::parse(id.trim())?;
        Ok(analytics::paper_stats(c, &id, &s.config.analytics)?)
    })
}

async fn author(State(s): Shared, Path(key): Path<String>) -> Response {
    with_catalog(&s, |c| Ok(analytics::author_stats(c, &key)?))
}

async fn venue(State(s): Shared, Path(key): Path<String>) -> Response {
    with_catalog(&s, |c| {
        Ok(analytics::venue_stats(c, &key, s.config.now_year(), &s.config.analytics)?)
    })
}

#[derive(Debug, Serialize)]
pub struct SubtopicInfo {
    pub name: String,
    pub triggers: Vec<String>,
    pub papers: usize,
}

#[derive(Debug, Serialize)]
pub struct CategoryInfo {
    pub category: Category,
    pub subtopics: Vec<SubtopicInfo>,
}

async fn taxonomy(State(s): Shared) -> Response {
    with_catalog(&s, |c| {
        Ok::<_, ApiError>(
            Category::ALL
                .iter()
                .map(|&category| CategoryInfo {
                    category,
                    subtopics: c
                        .taxonomy()
                        .rules(category)
                        .iter()
                        .map(|r| SubtopicInfo {
                            name: r.name.clone(),
                            triggers: r.triggers.clone(),
                            papers: c
                                .assignments()
                                .papers_with(&SubtopicKey {
                                    category,
                                    subtopic: r.name.clone(),
                                })
                                .count(),
                        })
                        .collect(),
                })
                .collect::<Vec<_>>(),
        )
    })
}

#[derive(Debug, Serialize)]
pub struct TopicResponse {
    pub category: Category,
    pub subtopic: String,
    pub triggers: Vec<String>,
    pub papers_by_year: YearHistogram,
    pub authors_by_year: YearHistogram,
    pub papers: Vec<PaperId>,
}

async fn topic(State(s): Shared, Path((category, subtopic)): Path<(String, String)>) -> Response {
    with_catalog(&s, |c| {
        let category = Category::from_str(&category)
            .map_err(|_| ApiError::not_found("UnknownCategory", format!("unknown category {category:?}")))?;
        let key = SubtopicKey { category, subtopic };
        let papers_by_year = topics::topic_year_distribution(&key, c.taxonomy(), c.snapshot(), c.assignments())?;
        let authors_by_year = topics::topic_author_distribution(&key, c.taxonomy(), c.snapshot(), c.assignments())?;
        let triggers = c
            .taxonomy()
            .rule(category, &key.subtopic)
            .map(|r| r.triggers.clone())
            .unwrap_or_default();
        Ok(TopicResponse {
            papers: c.assignments().papers_with(&key).collect(),
            category,
            subtopic: key.subtopic,
            triggers,
            papers_by_year,
            authors_by_year,
        })
    })
}

async fn timeline(State(s): Shared) -> Response {
    with_catalog(&s, |c| {
        Ok::<Vec<TimelineEntry>, ApiError>(first_occurrence_timeline(c.taxonomy(), c.snapshot(), c.assignments()))
    })
}

#[derive(Debug, Serialize)]
pub struct ListResponse {
    pub kind: RankedListKind,
    pub now_year: i32,
    pub k: usize,
    pub entries: Vec<RankedEntry>,
}

async fn list(State(s): Shared, Path(kind): Path<String>, Query(q): Params) -> Response {
    with_catalog(&s, |c| {
        let kind = RankedListKind::from_str(&kind)?;
        let k = positive(&q, "k", DEFAULT_K)?;
        let now_year = s.config.now_year();
        Ok(ListResponse {
            kind,
            now_year,
            k,
            entries: analytics::ranked_list(c, kind, now_year, k, &s.config.analytics),
        })
    })
}

async fn urls_top(State(s): Shared, Query(q): Params) -> Response {
    with_catalog(&s, |c| {
        let k = positive(&q, "k", DEFAULT_K)?;
        Ok::<TopTables, ApiError>(c.urls().top_tables(k))
    })
}

#[derive(Debug, Serialize)]
pub struct UrlDomainResponse {
    pub domain: String,
    pub category: UrlCategory,
    pub mentions: u64,
    pub usage_by_year: YearHistogram,
}

async fn url_domain(State(s): Shared, Path(domain): Path<String>) -> Response {
    with_catalog(&s, |c| {
        let domain = domain.trim().to_lowercase();
        let category = c
            .urls()
            .domain_category(&domain)
            .ok_or_else(|| ApiError::not_found("UnknownUrlDomain", format!("{domain:?} is never mentioned")))?;
        let usage_by_year = c.urls().usage_by_year(&domain);
        Ok(UrlDomainResponse {
            domain,
            category,
            mentions: usage_by_year.total(),
            usage_by_year,
        })
    })
}

async fn reingest(State(s): Shared) -> Response {
    match s.reingest().await {
        Ok(outcome) => respond(outcome.version, outcome),
        Err(e) => ApiError::from(e).into_response(),
    }
}
