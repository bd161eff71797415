use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use scholarscope::analytics::ranked_list;
use scholarscope::ingest::load_corpus;
use scholarscope::{
    store, AnalyticsConfig, Bm25Params, Catalog, CategoryRules, CorpusDirectoryLayout, IngestOptions, RankedListKind,
    SearchDomain, SuffixList, Taxonomy,
};
use scholarscope_server::{config_path, ApiConfig, CONFIG_ENV};
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "scholarscope", version, about = "Build, query and serve scholarly corpus catalogs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a corpus directory and write a catalog snapshot.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the JSON API.
    Serve {
        /// Config file; SCHOLARSCOPE_CONFIG overrides it when set.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a ranked search against a snapshot and print the hits as JSON.
    Search {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, short)]
        q: String,
        #[arg(long, default_value = "papers")]
        domain: String,
        #[arg(long, default_value_t = 1)]
        page: usize,
        #[arg(long, default_value_t = 20)]
        page_size: usize,
    },
    /// Print one ranked list from a snapshot as JSON.
    Stats {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        now_year: Option<i32>,
    },
    /// Ask a running server to re-ingest its corpus directory.
    Reingest {
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        url: String,
    },
    /// Write the deterministic test corpus to a directory.
    GenFixture {
        #[arg(long)]
        out: PathBuf,
    },
}

fn open(snapshot: &PathBuf) -> Result<Catalog> {
    let parts = store::load_snapshot(snapshot).with_context(|| format!("loading {}", snapshot.display()))?;
    Ok(Catalog::from_parts(parts))
}

fn ingest(corpus: PathBuf, out: PathBuf) -> Result<()> {
    let layout = CorpusDirectoryLayout::from_root(&corpus);
    let (snapshot, report) = load_corpus(&layout, &IngestOptions::default())
        .with_context(|| format!("ingesting {}", corpus.display()))?;
    let catalog = Catalog::build(snapshot, Taxonomy::default(), SuffixList::default(), CategoryRules::default());
    store::save_snapshot(catalog.parts(), &out).with_context(|| format!("writing {}", out.display()))?;
    for w in &report.warnings {
        eprintln!("warning: {w:?}");
    }
    println!(
        "{} papers, {}/{} references resolved, {} citation edges, {} URLs -> {}",
        report.papers_loaded,
        report.references_resolved,
        report.references_seen,
        catalog.snapshot().citation_edges.len(),
        report.urls_extracted,
        out.display()
    );
    Ok(())
}

async fn serve(config: Option<PathBuf>) -> Result<()> {
    let config = match config_path(config) {
        Some(path) => ApiConfig::load(&path)?,
        None => bail!("no config file given; pass --config or set {CONFIG_ENV}"),
    };
    scholarscope_server::serve(config).await?;
    Ok(())
}

async fn reingest(url: String) -> Result<()> {
    let resp = reqwest::Client::new()
        .post(format!("{}/api/admin/reingest", url.trim_end_matches('/')))
        .send()
        .await?;
    let status = resp.status();
    let body: serde_json::Value = resp.json().await?;
    println!("{}", serde_json::to_string_pretty(&body)?);
    if !status.is_success() {
        bail!("server answered {status}");
    }
    Ok(())
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Ingest { corpus, out } => ingest(corpus, out),
        Command::Serve { config } => serve(config).await,
        Command::Search {
            snapshot,
            q,
            domain,
            page,
            page_size,
        } => {
            let catalog = open(&snapshot)?;
            let domain: SearchDomain = domain.parse()?;
            let result = catalog.index().search(&q, domain, page, page_size, &Bm25Params::default())?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(())
        }
        Command::Stats {
            snapshot,
            kind,
            k,
            now_year,
        } => {
            let catalog = open(&snapshot)?;
            let kind: RankedListKind = kind.parse()?;
            let now_year = match now_year {
                Some(y) => y,
                None => catalog.snapshot().papers.values().map(|p| p.year).max().unwrap_or_default(),
            };
            let entries = ranked_list(&catalog, kind, now_year, k, &AnalyticsConfig::default());
            println!("{}", serde_json::to_string_pretty(&entries)?);
            Ok(())
        }
        Command::Reingest { url } => reingest(url).await,
        Command::GenFixture { out } => {
            let f = scholarscope::fixture::generate();
            f.write_to(&out)?;
            println!("wrote {} papers to {}", f.papers.len(), out.display());
            Ok(())
        }
    }
}
