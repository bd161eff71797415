//! Loads a corpus directory into a [`CorpusSnapshot`].
//!
//! Layout:
//!
//! ```text
//! <root>/metadata.jsonl          one flat JSON object per line
//! <root>/text/<id>.txt           extracted full text
//! <root>/refs/<id>.refs.txt      one reference string per line (optional dir)
//! ```

mod resolve;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ResolverConfig;
use crate::corpus::{
    current_year, normalize_author_name, normalize_venue, CitationEdge, CorpusSnapshot, PaperId,
    PaperRecord, MIN_YEAR,
};

pub use resolve::{
    jaccard, normalize_reference_text, reference_tokens, ReferenceResolver, ResolutionStage,
};

pub const METADATA_FILE: &str = "metadata.jsonl";
pub const TEXT_DIR: &str = "text";
pub const REFS_DIR: &str = "refs";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("metadata file {0} does not exist")]
    MissingMetadata(PathBuf),
    #[error("duplicate paper id {0}")]
    DuplicateId(PaperId),
    #[error("malformed metadata record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("malformed venue alias file: {0}")]
    MalformedAliases(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDirectoryLayout {
    pub metadata_path: PathBuf,
    pub text_dir: PathBuf,
    pub refs_dir: Option<PathBuf>,
}

impl CorpusDirectoryLayout {
    /// Standard layout under `root`; the refs directory is used only if present.
    pub fn from_root(root: impl AsRef<Path>) -> Self {
        let root = root.as_ref();
        let refs = root.join(REFS_DIR);
        Self {
            metadata_path: root.join(METADATA_FILE),
            text_dir: root.join(TEXT_DIR),
            refs_dir: refs.is_dir().then_some(refs),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub resolver: ResolverConfig,
    /// Normalized alias -> normalized canonical venue key.
    pub venue_aliases: BTreeMap<String, String>,
    /// Latest admissible publication year.
    pub max_year: i32,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            resolver: ResolverConfig::default(),
            venue_aliases: BTreeMap::new(),
            max_year: current_year(),
        }
    }
}

/// Reads a JSON object of `alias: canonical` venue names.
pub fn load_venue_aliases(path: &Path) -> Result<BTreeMap<String, String>, IngestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let raw: BTreeMap<String, String> =
        serde_json::from_str(&text).map_err(|e| IngestError::MalformedAliases(e.to_string()))?;
    Ok(raw
        .into_iter()
        .map(|(a, c)| (normalize_venue(&a), normalize_venue(&c)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub papers_loaded: usize,
    pub texts_attached: usize,
    pub references_seen: u64,
    pub references_resolved: u64,
    pub resolved_by_stage: BTreeMap<ResolutionStage, u64>,
    pub urls_extracted: usize,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Debug, Deserialize)]
struct MetadataLine {
    id: String,
    title: String,
    authors: Vec<String>,
    venue: String,
    year: i64,
    #[serde(default, rename = "abstract")]
    abstract_text: Option<String>,
    #[serde(default)]
    url: Option<String>,
}

const TRAILING_PUNCTUATION: &[char] = &['.', ',', ';', ':', ')', ']', '}', '>', '"', '\''];

/// Every maximal `http://`, `https://` or `ftp://` run of non-whitespace,
/// minus trailing punctuation. Repeats are kept.
pub fn extract_urls(text: &str) -> Vec<String> {
    const SCHEMES: [&str; 3] = ["http://", "https://", "ftp://"];
    let mut out = Vec::new();
    let mut rest = text;
    while let Some((start, scheme)) = SCHEMES
        .iter()
        .filter_map(|s| rest.find(s).map(|i| (i, *s)))
        .min()
    {
        let tail = &rest[start..];
        let end = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let candidate = tail[..end].trim_end_matches(TRAILING_PUNCTUATION);
        if candidate.len() > scheme.len() {
            out.push(candidate.to_string());
        }
        rest = &tail[end..];
    }
    out
}

fn parse_metadata(
    path: &Path,
    opts: &IngestOptions,
) -> Result<(BTreeMap<PaperId, PaperRecord>, BTreeMap<String, String>), IngestError> {
    if !path.is_file() {
        return Err(IngestError::MissingMetadata(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut papers = BTreeMap::new();
    let mut venue_display: BTreeMap<PaperId, (String, String)> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| IngestError::MalformedRecord {
            line: line_no,
            message,
        };
        let raw: MetadataLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let id = PaperId::parse(raw.id.trim()).map_err(|e| bad(e.to_string()))?;
        let title = raw.title.trim();
        if title.is_empty() {
            return Err(bad(format!("{id}: empty title")));
        }
        if raw.authors.is_empty() {
            return Err(bad(format!("{id}: empty author list")));
        }
        for a in &raw.authors {
            normalize_author_name(a).map_err(|e| bad(format!("{id}: author {a:?}: {e}")))?;
        }
        let mut venue = normalize_venue(&raw.venue);
        if venue.is_empty() {
            return Err(bad(format!("{id}: empty venue")));
        }
        if let Some(canonical) = opts.venue_aliases.get(&venue) {
            venue = canonical.clone();
        }
        let year = i32::try_from(raw.year).map_err(|_| bad(format!("{id}: bad year")))?;
        if !(MIN_YEAR..=opts.max_year).contains(&year) {
            return Err(bad(format!(
                "{id}: year {year} outside {MIN_YEAR}..={}",
                opts.max_year
            )));
        }
        if year != id.year() {
            return Err(bad(format!(
                "{id}: year {year} inconsistent with id year {}",
                id.year()
            )));
        }
        let record = PaperRecord {
            id,
            title: title.to_string(),
            authors: raw.authors.iter().map(|a| a.trim().to_string()).collect(),
            venue: venue.clone(),
            year,
            abstract_text: raw.abstract_text.filter(|s| !s.trim().is_empty()),
            full_text: None,
            pdf_url: raw.url.filter(|s| !s.trim().is_empty()),
            reference_strings: Vec::new(),
            url_mentions: Vec::new(),
        };
        if papers.insert(id, record).is_some() {
            return Err(IngestError::DuplicateId(id));
        }
        venue_display.insert(id, (venue, raw.venue.trim().to_string()));
    }
    // Display name of a venue comes from its lowest-id paper.
    let mut display = BTreeMap::new();
    for (key, name) in venue_display.into_values() {
        display.entry(key).or_insert(name);
    }
    Ok((papers, display))
}

/// Files in `dir` ending with `suffix`, keyed by the parsed id, sorted by name.
fn id_files(
    dir: &Path,
    suffix: &str,
    warnings: &mut Vec<IngestWarning>,
) -> Result<Vec<(PaperId, PathBuf)>, IngestError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    let mut out = Vec::new();
    for path in entries {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        let Some(stem) = name.strip_suffix(suffix) else {
            warnings.push(IngestWarning {
                file: path.display().to_string(),
                message: format!("ignored: name does not end in {suffix}"),
            });
            continue;
        };
        match PaperId::parse(stem) {
            Ok(id) => out.push((id, path)),
            Err(e) => warnings.push(IngestWarning {
                file: path.display().to_string(),
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Builds a fresh snapshot (version 1) from the corpus directory.
pub fn load_corpus(
    layout: &CorpusDirectoryLayout,
    opts: &IngestOptions,
) -> Result<(CorpusSnapshot, IngestReport), IngestError> {
    build(layout, opts, 1)
}

/// Full rebuild; the new snapshot's version is `old.version + 1`. On error
/// the caller keeps `old`.
pub fn reingest(
    layout: &CorpusDirectoryLayout,
    old: &CorpusSnapshot,
    opts: &IngestOptions,
) -> Result<(CorpusSnapshot, IngestReport), IngestError> {
    build(layout, opts, old.version + 1)
}

fn build(
    layout: &CorpusDirectoryLayout,
    opts: &IngestOptions,
    version: u64,
) -> Result<(CorpusSnapshot, IngestReport), IngestError> {
    let (mut papers, venue_display) = parse_metadata(&layout.metadata_path, opts)?;
    let mut report = IngestReport {
        papers_loaded: papers.len(),
        ..IngestReport::default()
    };

    if layout.text_dir.is_dir() {
        for (id, path) in id_files(&layout.text_dir, ".txt", &mut report.warnings)? {
            let Some(paper) = papers.get_mut(&id) else {
                report.warnings.push(IngestWarning {
                    file: path.display().to_string(),
                    message: format!("no metadata record for {id}; not ingested"),
                });
                continue;
            };
            match fs::read_to_string(&path) {
                Ok(text) => {
                    paper.full_text = Some(text);
                    report.texts_attached += 1;
                }
                Err(e) => report.warnings.push(IngestWarning {
                    file: path.display().to_string(),
                    message: format!("unreadable text: {e}"),
                }),
            }
        }
    } else {
        report.warnings.push(IngestWarning {
            file: layout.text_dir.display().to_string(),
            message: "text directory missing; no full texts attached".into(),
        });
    }

    if let Some(refs_dir) = layout.refs_dir.as_deref().filter(|d| d.is_dir()) {
        for (id, path) in id_files(refs_dir, ".refs.txt", &mut report.warnings)? {
            let Some(paper) = papers.get_mut(&id) else {
                report.warnings.push(IngestWarning {
                    file: path.display().to_string(),
                    message: format!("no metadata record for {id}; not ingested"),
                });
                continue;
            };
            match fs::read_to_string(&path) {
                Ok(text) => {
                    paper.reference_strings = text
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .map(String::from)
                        .collect();
                }
                Err(e) => report.warnings.push(IngestWarning {
                    file: path.display().to_string(),
                    message: format!("unreadable references: {e}"),
                }),
            }
        }
    }

    for paper in papers.values_mut() {
        let mut urls = Vec::new();
        for text in [paper.abstract_text.as_deref(), paper.full_text.as_deref()]
            .into_iter()
            .flatten()
        {
            urls.extend(extract_urls(text));
        }
        report.urls_extracted += urls.len();
        paper.url_mentions = urls;
    }

    let resolver = ReferenceResolver::new(
        papers.values().map(|p| (p.id, p.title.as_str())),
        opts.resolver,
    );
    let resolved: Vec<(PaperId, Vec<Option<(PaperId, ResolutionStage)>>)> = papers
        .par_iter()
        .map(|(id, p)| {
            let hits = p
                .reference_strings
                .iter()
                .map(|r| resolver.resolve(r, Some(*id)))
                .collect();
            (*id, hits)
        })
        .collect();

    let mut edges = BTreeSet::new();
    for (citing, hits) in resolved {
        for hit in hits {
            report.references_seen += 1;
            if let Some((cited, stage)) = hit {
                report.references_resolved += 1;
                *report.resolved_by_stage.entry(stage).or_insert(0) += 1;
                edges.insert(CitationEdge { citing, cited });
            }
        }
    }
    let unresolved = report.references_seen - report.references_resolved;
    let snapshot = CorpusSnapshot::assemble(papers, &venue_display, edges, unresolved, version);
    Ok((snapshot, report))
}
