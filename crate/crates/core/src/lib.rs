//! Scholarly corpus exploration engine.
//!
//! Ingests paper metadata, extracted full text and reference strings from a
//! corpus directory, resolves an internal citation graph, builds a
//! positional inverted index, classifies papers into a five-category topic
//! taxonomy and computes paper, author, venue, topic and URL statistics.
//!
//! The usual pipeline:
//!
//! ```no_run
//! use scholarscope::{ingest, Catalog, CorpusDirectoryLayout, IngestOptions};
//! use scholarscope::{CategoryRules, SuffixList, Taxonomy};
//!
//! let layout = CorpusDirectoryLayout::from_root("corpus/");
//! let (snapshot, report) = ingest::load_corpus(&layout, &IngestOptions::default())?;
//! println!("{} papers, {} references resolved", report.papers_loaded, report.references_resolved);
//! let catalog = Catalog::build(snapshot, Taxonomy::default(), SuffixList::default(), CategoryRules::default());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analytics;
pub mod catalog;
pub mod config;
pub mod corpus;
pub mod fixture;
pub mod index;
pub mod ingest;
pub mod store;
pub mod topics;
pub mod urls;

pub use analytics::{RankedEntry, RankedListKind};
pub use catalog::{Catalog, CatalogParts, CitationGraph};
pub use config::{AnalyticsConfig, Bm25Params, ResolverConfig};
pub use corpus::{
    AuthorRecord, CitationEdge, CorpusSnapshot, PaperId, PaperRecord, VenueRecord, YearHistogram,
    YearSeries,
};
pub use index::{InvertedIndex, RankedHit, SearchDomain, SearchPage};
pub use ingest::{CorpusDirectoryLayout, IngestOptions, IngestReport};
pub use topics::{Category, Taxonomy, TopicAssignment, TopicAssignments};
pub use urls::{CategoryRules, ParsedUrl, SuffixList, UrlCategory};
