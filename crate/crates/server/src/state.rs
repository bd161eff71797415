use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use scholarscope::ingest::{self, load_venue_aliases};
use scholarscope::store;
use scholarscope::topics::load_taxonomy;
use scholarscope::{Catalog, CategoryRules, CorpusDirectoryLayout, IngestOptions, SuffixList, Taxonomy};
use serde::Serialize;
use thiserror::Error;
use tokio::sync::Mutex;

use crate::config::ApiConfig;

#[derive(Debug, Error)]
pub enum StartupError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("cannot load resource: {0}")]
    Resource(String),
    #[error("cannot build corpus: {0}")]
    Ingest(#[from] ingest::IngestError),
    #[error("cannot persist snapshot: {0}")]
    Store(#[from] store::StoreError),
    #[error("cannot bind {addr}: {message}")]
    Bind { addr: String, message: String },
}

#[derive(Debug, Error)]
#[error("re-ingest failed, version {retained_version} stays active: {message}")]
pub struct IngestFailed {
    pub retained_version: u64,
    pub message: String,
}

/// Files that parameterize a build, loaded once at startup.
#[derive(Debug, Clone)]
pub struct Resources {
    pub taxonomy: Taxonomy,
    pub suffixes: SuffixList,
    pub category_rules: CategoryRules,
    pub venue_aliases: BTreeMap<String, String>,
}

impl Resources {
    pub fn load(cfg: &ApiConfig) -> Result<Self, StartupError> {
        let res = |e: &dyn std::fmt::Display| StartupError::Resource(e.to_string());
        Ok(Self {
            taxonomy: load_taxonomy(cfg.taxonomy_path.as_deref()).map_err(|e| res(&e))?,
            suffixes: match &cfg.suffixes_path {
                Some(p) => SuffixList::load(p).map_err(|e| res(&e))?,
                None => SuffixList::default(),
            },
            category_rules: match &cfg.category_rules_path {
                Some(p) => CategoryRules::load(p).map_err(|e| res(&e))?,
                None => CategoryRules::default(),
            },
            venue_aliases: match &cfg.venue_aliases_path {
                Some(p) => load_venue_aliases(p).map_err(|e| res(&e))?,
                None => BTreeMap::new(),
            },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReingestOutcome {
    pub previous_version: u64,
    pub version: u64,
    /// True when this trigger waited for a concurrent re-ingest instead of
    /// running its own.
    pub coalesced: bool,
    pub papers: usize,
    pub citation_edges: usize,
}

/// Shared service state: the active catalog plus what is needed to rebuild it.
pub struct AppState {
    pub config: ApiConfig,
    pub resources: Resources,
    active: RwLock<Arc<Catalog>>,
    writer: Mutex<()>,
}

impl AppState {
    pub fn new(config: ApiConfig, resources: Resources, catalog: Catalog) -> Self {
        Self {
            config,
            resources,
            active: RwLock::new(Arc::new(catalog)),
            writer: Mutex::new(()),
        }
    }

    /// Loads the persisted snapshot when it matches the configured resources,
    /// otherwise ingests the corpus directory and persists the result.
    pub fn start(config: ApiConfig) -> Result<Self, StartupError> {
        config.validate()?;
        let resources = Resources::load(&config)?;
        let persisted = config
            .snapshot_path
            .as_deref()
            .filter(|p| p.is_file())
            .and_then(|p| match store::load_snapshot(p) {
                Ok(parts)
                    if parts.taxonomy == resources.taxonomy
                        && parts.suffixes == resources.suffixes
                        && parts.category_rules == resources.category_rules =>
                {
                    tracing::info!(path = %p.display(), version = parts.snapshot.version, "loaded snapshot");
                    Some(parts)
                }
                Ok(_) => {
                    tracing::warn!(path = %p.display(), "snapshot built with other resources; rebuilding");
                    None
                }
                Err(e) => {
                    tracing::warn!(path = %p.display(), error = %e, "unusable snapshot; rebuilding");
                    None
                }
            });
        let catalog = match persisted {
            Some(parts) => Catalog::from_parts(parts),
            None => {
                let (snapshot, report) = ingest::load_corpus(&layout(&config), &ingest_options(&config, &resources))?;
                tracing::info!(
                    papers = report.papers_loaded,
                    resolved = report.references_resolved,
                    warnings = report.warnings.len(),
                    "ingested corpus"
                );
                let catalog = build(snapshot, &resources);
                if let Some(p) = &config.snapshot_path {
                    store::save_snapshot(catalog.parts(), p)?;
                }
                catalog
            }
        };
        Ok(Self::new(config, resources, catalog))
    }

    /// The catalog every part of one request must be computed from.
    pub fn current(&self) -> Arc<Catalog> {
        Arc::clone(&self.active.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Rebuilds from the corpus directory off the async workers and swaps the
    /// result in. Concurrent triggers wait for the running rebuild and report
    /// its outcome instead of starting another.
    pub async fn reingest(self: &Arc<Self>) -> Result<ReingestOutcome, IngestFailed> {
        let before = self.current().version();
        let _guard = match self.writer.try_lock() {
            Ok(g) => g,
            Err(_) => {
                let _g = self.writer.lock().await;
                let now = self.current();
                return Ok(ReingestOutcome {
                    previous_version: before,
                    version: now.version(),
                    coalesced: true,
                    papers: now.snapshot().papers.len(),
                    citation_edges: now.snapshot().citation_edges.len(),
                });
            }
        };
        let old = self.current();
        let state = Arc::clone(self);
        let base = Arc::clone(&old);
        let built = tokio::task::spawn_blocking(move || -> Result<Catalog, String> {
            let (snapshot, _) = ingest::reingest(
                &layout(&state.config),
                base.snapshot(),
                &ingest_options(&state.config, &state.resources),
            )
            .map_err(|e| e.to_string())?;
            let catalog = build(snapshot, &state.resources);
            if let Some(p) = &state.config.snapshot_path {
                store::save_snapshot(catalog.parts(), p).map_err(|e| e.to_string())?;
            }
            Ok(catalog)
        })
        .await
        .map_err(|e| e.to_string())
        .and_then(|r| r);
        let catalog = built.map_err(|message| {
            tracing::error!(%message, "re-ingest failed");
            IngestFailed {
                retained_version: old.version(),
                message,
            }
        })?;
        let outcome = ReingestOutcome {
            previous_version: old.version(),
            version: catalog.version(),
            coalesced: false,
            papers: catalog.snapshot().papers.len(),
            citation_edges: catalog.snapshot().citation_edges.len(),
        };
        *self.active.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(catalog);
        tracing::info!(version = outcome.version, papers = outcome.papers, "swapped in new snapshot");
        Ok(outcome)
    }
}

fn layout(cfg: &ApiConfig) -> CorpusDirectoryLayout {
    CorpusDirectoryLayout::from_root(&cfg.corpus_dir)
}

fn ingest_options(cfg: &ApiConfig, res: &Resources) -> IngestOptions {
    IngestOptions {
        resolver: cfg.resolver,
        venue_aliases: res.venue_aliases.clone(),
        ..IngestOptions::default()
    }
}

fn build(snapshot: scholarscope::CorpusSnapshot, res: &Resources) -> Catalog {
    Catalog::build(
        snapshot,
        res.taxonomy.clone(),
        res.suffixes.clone(),
        res.category_rules.clone(),
    )
}
