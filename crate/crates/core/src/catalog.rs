use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytics::SimilarityModel;
use crate::corpus::{CorpusSnapshot, PaperId};
use crate::index::InvertedIndex;
use crate::topics::{Taxonomy, TopicAssignments};
use crate::urls::{CategoryRules, SuffixList, UrlCatalog};

/// Incoming and outgoing adjacency of the resolved citation graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CitationGraph {
    incoming: BTreeMap<PaperId, Vec<PaperId>>,
    outgoing: BTreeMap<PaperId, Vec<PaperId>>,
}

impl CitationGraph {
    pub fn build(snapshot: &CorpusSnapshot) -> Self {
        let mut g = CitationGraph::default();
        for e in &snapshot.citation_edges {
            g.incoming.entry(e.cited).or_default().push(e.citing);
            g.outgoing.entry(e.citing).or_default().push(e.cited);
        }
        g
    }

    /// Papers citing `id`, ascending.
    pub fn citing(&self, id: &PaperId) -> &[PaperId] {
        self.incoming.get(id).map_or(&[], Vec::as_slice)
    }

    /// Papers cited by `id`, ascending.
    pub fn cited_by(&self, id: &PaperId) -> &[PaperId] {
        self.outgoing.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn in_degree(&self, id: &PaperId) -> usize {
        self.citing(id).len()
    }
}

/// The persisted part of a built corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogParts {
    pub snapshot: CorpusSnapshot,
    pub index: InvertedIndex,
    pub taxonomy: Taxonomy,
    pub assignments: TopicAssignments,
    pub suffixes: SuffixList,
    pub category_rules: CategoryRules,
}

impl CatalogParts {
    /// Indexes and classifies a snapshot.
    pub fn build(
        snapshot: CorpusSnapshot,
        taxonomy: Taxonomy,
        suffixes: SuffixList,
        category_rules: CategoryRules,
    ) -> Self {
        let index = InvertedIndex::build(&snapshot, &taxonomy);
        let assignments = TopicAssignments::classify(&snapshot, &taxonomy);
        Self {
            snapshot,
            index,
            taxonomy,
            assignments,
            suffixes,
            category_rules,
        }
    }

    /// Equality ignoring the snapshot's version and build time.
    pub fn same_content(&self, other: &Self) -> bool {
        self.snapshot.same_content(&other.snapshot)
            && self.index == other.index
            && self.taxonomy == other.taxonomy
            && self.assignments == other.assignments
            && self.suffixes == other.suffixes
            && self.category_rules == other.category_rules
    }
}

/// An immutable, fully built corpus: the unit served to readers and
/// replaced atomically on re-ingest.
#[derive(Debug, Clone)]
pub struct Catalog {
    parts: CatalogParts,
    graph: CitationGraph,
    urls: UrlCatalog,
    similarity: SimilarityModel,
}

impl Catalog {
    pub fn from_parts(parts: CatalogParts) -> Self {
        let graph = CitationGraph::build(&parts.snapshot);
        let urls = UrlCatalog::build(&parts.snapshot, &parts.suffixes, &parts.category_rules);
        let similarity = SimilarityModel::build(&parts.snapshot);
        Self {
            parts,
            graph,
            urls,
            similarity,
        }
    }

    pub fn build(
        snapshot: CorpusSnapshot,
        taxonomy: Taxonomy,
        suffixes: SuffixList,
        category_rules: CategoryRules,
    ) -> Self {
        Self::from_parts(CatalogParts::build(snapshot, taxonomy, suffixes, category_rules))
    }

    pub fn parts(&self) -> &CatalogParts {
        &self.parts
    }

    pub fn into_parts(self) -> CatalogParts {
        self.parts
    }

    pub fn version(&self) -> u64 {
        self.parts.snapshot.version
    }

    pub fn snapshot(&self) -> &CorpusSnapshot {
        &self.parts.snapshot
    }

    pub fn index(&self) -> &InvertedIndex {
        &self.parts.index
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.parts.taxonomy
    }

    pub fn assignments(&self) -> &TopicAssignments {
        &self.parts.assignments
    }

    pub fn graph(&self) -> &CitationGraph {
        &self.graph
    }

    pub fn urls(&self) -> &UrlCatalog {
        &self.urls
    }

    pub fn similarity(&self) -> &SimilarityModel {
        &self.similarity
    }
}
