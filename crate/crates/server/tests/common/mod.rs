#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use scholarscope::fixture::{self, FixtureCorpus, NOW_YEAR};
use scholarscope_server::{serve_on, ApiConfig, AppState, VERSION_HEADER};
use serde_json::Value;
use tempfile::TempDir;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

pub struct TestServer {
    pub dir: TempDir,
    pub base: String,
    pub state: Arc<AppState>,
    pub fixture: FixtureCorpus,
    pub client: reqwest::Client,
    shutdown: Option<oneshot::Sender<()>>,
}

pub struct Reply {
    pub status: u16,
    pub header_version: Option<u64>,
    pub body: Value,
}

impl Reply {
    pub fn version(&self) -> Option<u64> {
        self.body.get("version").and_then(Value::as_u64)
    }

    pub fn data(&self) -> &Value {
        &self.body["data"]
    }

    pub fn error_code(&self) -> Option<&str> {
        self.body.get("error_code").and_then(Value::as_str)
    }
}

pub fn fixture_config(dir: &std::path::Path) -> ApiConfig {
    ApiConfig {
        listen: "127.0.0.1:0".into(),
        corpus_dir: dir.join("corpus"),
        snapshot_path: Some(dir.join("catalog.snapshot")),
        now_year: Some(NOW_YEAR),
        ..ApiConfig::default()
    }
}

impl TestServer {
    /// Writes the fixture into a fresh directory and serves it.
    pub async fn start() -> TestServer {
        let dir = tempfile::tempdir().unwrap();
        let f = fixture::generate();
        f.write_to(&dir.path().join("corpus")).unwrap();
        let config = fixture_config(dir.path());
        Self::start_with(dir, f, config).await
    }

    pub async fn start_with(dir: TempDir, fixture: FixtureCorpus, config: ApiConfig) -> TestServer {
        let state = tokio::task::spawn_blocking(move || AppState::start(config))
            .await
            .unwrap()
            .unwrap();
        let state = Arc::new(state);
        let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel();
        tokio::spawn(serve_on(listener, Arc::clone(&state), async {
            let _ = rx.await;
        }));
        TestServer {
            dir,
            base,
            state,
            fixture,
            client: reqwest::Client::new(),
            shutdown: Some(tx),
        }
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.dir.path().join("corpus")
    }

    async fn reply(resp: reqwest::Response) -> Reply {
        let status = resp.status().as_u16();
        let header_version = resp
            .headers()
            .get(VERSION_HEADER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.parse().ok());
        let body = resp.json().await.unwrap_or(Value::Null);
        Reply {
            status,
            header_version,
            body,
        }
    }

    pub async fn get(&self, path: &str) -> Reply {
        Self::reply(self.client.get(format!("{}{path}", self.base)).send().await.unwrap()).await
    }

    pub async fn post(&self, path: &str) -> Reply {
        Self::reply(self.client.post(format!("{}{path}", self.base)).send().await.unwrap()).await
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}

/// Every documented GET endpoint, instantiated on the fixture.
pub fn documented_gets(f: &FixtureCorpus) -> Vec<String> {
    vec![
        "/api/corpus/summary".into(),
        "/api/search?q=summarization&domain=papers".into(),
        "/api/search?q=lee&domain=authors&page=1&page_size=5".into(),
        "/api/search?q=emnlp&domain=venues".into(),
        "/api/search?q=statmt&domain=urls".into(),
        "/api/search?q=tagging&domain=field_of_study".into(),
        "/api/ngrams?phrase=machine%20translation&from=2000&to=2019".into(),
        "/api/papers/P19-1001".into(),
        format!("/api/papers/{}", f.truth.survey_paper),
        "/api/authors/ann%20lee".into(),
        "/api/venues/acl".into(),
        "/api/topics".into(),
        "/api/topics/Task/Summarization".into(),
        "/api/topics/timeline".into(),
        "/api/lists/seminal_papers?k=5".into(),
        "/api/lists/young_popular_authors".into(),
        "/api/urls/top?k=5".into(),
        "/api/urls/statmt.org".into(),
    ]
}

/// Top-level keys each documented endpoint's `data` must carry.
pub fn expected_keys(path: &str) -> &'static [&'static str] {
    let route = path.split('?').next().unwrap();
    match route {
        "/api/corpus/summary" => &["papers", "authors", "venues", "citations", "unresolved_references"],
        "/api/search" => &["query", "domain", "page", "page_size", "total_hits", "hits"],
        "/api/ngrams" => &["phrase", "n", "from", "to", "frequencies"],
        "/api/topics" | "/api/topics/timeline" => &[],
        "/api/urls/top" => &["total_mentions", "top_tlds", "top_domains", "top_subdomains", "top_urls_per_category"],
        r if r.starts_with("/api/papers/") => &[
            "id",
            "title",
            "authors",
            "venue",
            "year",
            "citations_by_year",
            "total_citations",
            "similar_papers",
            "topic_distribution",
            "diversity",
            "mentioned_urls",
        ],
        r if r.starts_with("/api/authors/") => &[
            "key",
            "display_name",
            "papers",
            "publications_by_year",
            "citations_by_year",
            "topic_distribution",
            "diversity",
            "venue_preference",
        ],
        r if r.starts_with("/api/venues/") => &[
            "key",
            "publications_by_year",
            "citations_by_year",
            "recent_publications",
            "topic_distribution",
            "top_citing_venues",
            "top_cited_venues",
            "top_authors",
        ],
        r if r.starts_with("/api/topics/") => &["category", "subtopic", "papers_by_year", "authors_by_year", "papers"],
        r if r.starts_with("/api/lists/") => &["kind", "now_year", "k", "entries"],
        r if r.starts_with("/api/urls/") => &["domain", "category", "mentions", "usage_by_year"],
        _ => panic!("undocumented route {route}"),
    }
}

/// Checks the envelope, the version header and the documented keys.
pub fn shape_problem(path: &str, r: &Reply) -> Option<String> {
    if r.status != 200 {
        return Some(format!("{path}: status {} body {}", r.status, r.body));
    }
    let Some(v) = r.version() else {
        return Some(format!("{path}: body has no version"));
    };
    if r.header_version != Some(v) {
        return Some(format!("{path}: header version {:?} != body version {v}", r.header_version));
    }
    let data = r.data();
    let route = path.split('?').next().unwrap();
    if route == "/api/topics" || route == "/api/topics/timeline" {
        if !data.as_array().is_some_and(|a| !a.is_empty()) {
            return Some(format!("{path}: expected a non-empty array"));
        }
        return None;
    }
    expected_keys(path)
        .iter()
        .find(|k| data.get(**k).is_none())
        .map(|k| format!("{path}: data lacks {k:?}"))
}

/// (path, method, expected status, expected error_code) for the error contract.
pub const ERROR_CASES: [(&str, &str, u16, &str); 17] = [
    ("/api/papers/Z99-9999", "GET", 404, "UnknownPaper"),
    ("/api/papers/P19_1001", "GET", 400, "MalformedId"),
    ("/api/search?q=&domain=papers", "GET", 400, "EmptyQuery"),
    ("/api/search?domain=papers", "GET", 400, "EmptyQuery"),
    ("/api/search?q=parsing&domain=galaxies", "GET", 400, "UnknownDomain"),
    ("/api/search?q=parsing&page=0", "GET", 400, "BadPage"),
    ("/api/search?q=parsing&page_size=100000", "GET", 400, "BadPage"),
    ("/api/search?q=parsing&page=two", "GET", 400, "BadParameter"),
    ("/api/ngrams?phrase=one%20two%20three%20four", "GET", 400, "PhraseTooLong"),
    ("/api/ngrams?phrase=", "GET", 400, "EmptyPhrase"),
    ("/api/ngrams?phrase=graph&from=2010&to=2000", "GET", 400, "BadYearRange"),
    ("/api/authors/nobody%20at%20all", "GET", 404, "UnknownAuthor"),
    ("/api/venues/nowhere", "GET", 404, "UnknownVenue"),
    ("/api/topics/Task/Juggling", "GET", 404, "UnknownSubtopic"),
    ("/api/lists/most_handsome_papers", "GET", 404, "UnknownListKind"),
    ("/api/urls/never-mentioned.org", "GET", 404, "UnknownUrlDomain"),
    ("/api/no/such/endpoint", "GET", 404, "NoSuchEndpoint"),
];
