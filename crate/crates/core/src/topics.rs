//! Five-category topic taxonomy, rule-based multi-label classification and
//! topic-level temporal statistics.
//!
//! A paper is assigned every subtopic whose trigger phrases occur in it as
//! whole token sequences. Occurrences are weighted by field (title 3,
//! abstract 2, full text 1) and the per-paper counts are normalized into
//! weights that sum to one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusSnapshot, PaperId, PaperRecord, YearHistogram};
use crate::index::terms;

pub const TITLE_MULTIPLIER: u64 = 3;
pub const ABSTRACT_MULTIPLIER: u64 = 2;
pub const FULL_TEXT_MULTIPLIER: u64 = 1;

/// Longest trigger phrase, in tokens.
pub const MAX_TRIGGER_TOKENS: usize = 4;

const DEFAULT_TAXONOMY: &str = include_str!("../data/taxonomy.json");

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("malformed taxonomy: {0}")]
    MalformedTaxonomy(String),
    #[error("unknown subtopic {category}/{subtopic}")]
    UnknownSubtopic { category: String, subtopic: String },
    #[error("cannot read taxonomy file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    LinguisticTarget,
    Task,
    Approach,
    Language,
    DatasetType,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::LinguisticTarget,
        Category::Task,
        Category::Approach,
        Category::Language,
        Category::DatasetType,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::LinguisticTarget => "LinguisticTarget",
            Category::Task => "Task",
            Category::Approach => "Approach",
            Category::Language => "Language",
            Category::DatasetType => "DatasetType",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = TopicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| TopicError::MalformedTaxonomy(format!("unknown category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtopicRule {
    pub name: String,
    pub triggers: Vec<String>,
    /// Each trigger pre-split with the index tokenizer.
    pub trigger_tokens: Vec<Vec<String>>,
}

impl SubtopicRule {
    pub fn new(name: &str, triggers: &[&str]) -> Result<Self, TopicError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(TopicError::MalformedTaxonomy("empty subtopic name".into()));
        }
        if triggers.is_empty() {
            return Err(TopicError::MalformedTaxonomy(format!(
                "subtopic {name:?} has no triggers"
            )));
        }
        let mut phrases = Vec::with_capacity(triggers.len());
        let mut tokens = Vec::with_capacity(triggers.len());
        for t in triggers {
            let toks = terms(t);
            if toks.is_empty() || toks.len() > MAX_TRIGGER_TOKENS {
                return Err(TopicError::MalformedTaxonomy(format!(
                    "trigger {t:?} of {name:?} must have 1 to {MAX_TRIGGER_TOKENS} tokens"
                )));
            }
            phrases.push(toks.join(" "));
            tokens.push(toks);
        }
        Ok(Self {
            name: name.to_string(),
            triggers: phrases,
            trigger_tokens: tokens,
        })
    }
}

/// The fixed five categories, each an ordered list of subtopic rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Taxonomy {
    categories: BTreeMap<Category, Vec<SubtopicRule>>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy::from_json(DEFAULT_TAXONOMY).expect("embedded taxonomy is valid")
    }
}

impl Taxonomy {
    pub fn new(categories: BTreeMap<Category, Vec<SubtopicRule>>) -> Result<Self, TopicError> {
        let mut full = BTreeMap::new();
        for c in Category::ALL {
            full.insert(c, Vec::new());
        }
        for (c, rules) in categories {
            let mut seen = BTreeSet::new();
            for r in &rules {
                if !seen.insert(r.name.clone()) {
                    return Err(TopicError::MalformedTaxonomy(format!(
                        "duplicate subtopic {:?} in {c}",
                        r.name
                    )));
                }
            }
            full.insert(c, rules);
        }
        Ok(Self { categories: full })
    }

    pub fn from_json(text: &str) -> Result<Self, TopicError> {
        let top: OrderedMap<OrderedMap<Vec<String>>> = serde_json::from_str(text)
            .map_err(|e| TopicError::MalformedTaxonomy(e.to_string()))?;
        let mut categories = BTreeMap::new();
        for (cat_name, subtopics) in top.0 {
            let cat: Category = cat_name.parse()?;
            if categories.contains_key(&cat) {
                return Err(TopicError::MalformedTaxonomy(format!(
                    "category {cat} listed twice"
                )));
            }
            let rules = subtopics
                .0
                .iter()
                .map(|(name, triggers)| {
                    let t: Vec<&str> = triggers.iter().map(String::as_str).collect();
                    SubtopicRule::new(name, &t)
                })
                .collect::<Result<Vec<_>, _>>()?;
            categories.insert(cat, rules);
        }
        if let Some(missing) = Category::ALL.iter().find(|c| !categories.contains_key(c)) {
            return Err(TopicError::MalformedTaxonomy(format!(
                "category {missing} is missing"
            )));
        }
        Taxonomy::new(categories)
    }

    pub fn load(path: &Path) -> Result<Self, TopicError> {
        Taxonomy::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn rules(&self, category: Category) -> &[SubtopicRule] {
        self.categories.get(&category).map_or(&[], Vec::as_slice)
    }

    pub fn rule(&self, category: Category, subtopic: &str) -> Option<&SubtopicRule> {
        self.rules(category).iter().find(|r| r.name == subtopic)
    }

    /// Every (category, rule) pair in category order, then file order.
    pub fn iter(&self) -> impl Iterator<Item = (Category, &SubtopicRule)> {
        self.categories
            .iter()
            .flat_map(|(c, rules)| rules.iter().map(move |r| (*c, r)))
    }

    pub fn subtopic_count(&self) -> usize {
        self.categories.values().map(Vec::len).sum()
    }
}

/// Reads a taxonomy file, or returns the embedded default when `path` is `None`.
pub fn load_taxonomy(path: Option<&Path>) -> Result<Taxonomy, TopicError> {
    match path {
        Some(p) => Taxonomy::load(p),
        None => Ok(Taxonomy::default()),
    }
}

// JSON object kept as ordered pairs so duplicate keys are visible.
struct OrderedMap<V>(Vec<(String, V)>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for OrderedMap<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairVisitor<V>(std::marker::PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairVisitor<V> {
            type Value = OrderedMap<V>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut pairs = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, V>()? {
                    if pairs.iter().any(|(seen, _)| seen == &k) {
                        return Err(serde::de::Error::custom(format!("duplicate key {k:?}")));
                    }
                    pairs.push((k, v));
                }
                Ok(OrderedMap(pairs))
            }
        }

        deserializer.deserialize_map(PairVisitor(std::marker::PhantomData))
    }
}

/// Identifies one subtopic across the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubtopicKey {
    pub category: Category,
    pub subtopic: String,
}

impl fmt::Display for SubtopicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.category, self.subtopic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub paper: PaperId,
    pub category: Category,
    pub subtopic: String,
    pub match_count: u64,
    pub weight: f64,
}

impl TopicAssignment {
    pub fn key(&self) -> SubtopicKey {
        SubtopicKey {
            category: self.category,
            subtopic: self.subtopic.clone(),
        }
    }
}

struct FieldTokens {
    tokens: Vec<String>,
    positions: HashMap<String, Vec<usize>>,
}

impl FieldTokens {
    fn new(text: Option<&str>) -> Self {
        let tokens = text.map(terms).unwrap_or_default();
        let mut positions: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            positions.entry(t.clone()).or_default().push(i);
        }
        Self { tokens, positions }
    }

    fn occurrences(&self, phrase: &[String]) -> u64 {
        let Some(starts) = self.positions.get(&phrase[0]) else {
            return 0;
        };
        starts
            .iter()
            .filter(|&&p| {
                self.tokens
                    .get(p..p + phrase.len())
                    .is_some_and(|window| window == phrase)
            })
            .count() as u64
    }
}

/// Assigns every subtopic with at least one weighted trigger match.
pub fn classify_paper(paper: &PaperRecord, taxonomy: &Taxonomy) -> Vec<TopicAssignment> {
    let title = FieldTokens::new(Some(&paper.title));
    let abstract_text = FieldTokens::new(paper.abstract_text.as_deref());
    let full_text = FieldTokens::new(paper.full_text.as_deref());

    let mut assignments: Vec<TopicAssignment> = taxonomy
        .iter()
        .filter_map(|(category, rule)| {
            let match_count: u64 = rule
                .trigger_tokens
                .iter()
                .map(|phrase| {
                    TITLE_MULTIPLIER * title.occurrences(phrase)
                        + ABSTRACT_MULTIPLIER * abstract_text.occurrences(phrase)
                        + FULL_TEXT_MULTIPLIER * full_text.occurrences(phrase)
                })
                .sum();
            (match_count > 0).then(|| TopicAssignment {
                paper: paper.id,
                category,
                subtopic: rule.name.clone(),
                match_count,
                weight: 0.0,
            })
        })
        .collect();

    let total: u64 = assignments.iter().map(|a| a.match_count).sum();
    for a in &mut assignments {
        a.weight = a.match_count as f64 / total as f64;
    }
    assignments
}

/// Shannon entropy (natural log) of the assignment weights; 0 for none or one.
pub fn diversity_entropy(assignments: &[TopicAssignment]) -> f64 {
    entropy(assignments.iter().map(|a| a.weight))
}

pub fn entropy(weights: impl IntoIterator<Item = f64>) -> f64 {
    let mut terms: Vec<f64> = weights
        .into_iter()
        .filter(|w| *w > 0.0)
        .map(|w| -w * w.ln())
        .collect();
    terms.sort_by(f64::total_cmp);
    let h: f64 = terms.iter().sum();
    // -0.0 for a single weight of 1
    h.max(0.0)
}

/// Sums per-paper weights by subtopic and renormalizes to 1. Empty input
/// yields an empty map.
pub fn aggregate_weights<'a>(
    per_paper: impl IntoIterator<Item = &'a [TopicAssignment]>,
) -> BTreeMap<SubtopicKey, f64> {
    let mut acc: BTreeMap<SubtopicKey, f64> = BTreeMap::new();
    for assignments in per_paper {
        for a in assignments {
            *acc.entry(a.key()).or_insert(0.0) += a.weight;
        }
    }
    let total: f64 = acc.values().sum();
    if total > 0.0 {
        for v in acc.values_mut() {
            *v /= total;
        }
    }
    acc
}

/// Topic assignments for every paper of a snapshot.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TopicAssignments {
    by_paper: BTreeMap<PaperId, Vec<TopicAssignment>>,
}

impl TopicAssignments {
    pub fn classify(snapshot: &CorpusSnapshot, taxonomy: &Taxonomy) -> Self {
        let by_paper = snapshot
            .papers
            .par_iter()
            .map(|(id, p)| (*id, classify_paper(p, taxonomy)))
            .filter(|(_, a)| !a.is_empty())
            .collect();
        Self { by_paper }
    }

    pub fn for_paper(&self, id: &PaperId) -> &[TopicAssignment] {
        self.by_paper.get(id).map_or(&[], Vec::as_slice)
    }

    /// Papers with at least one assignment.
    pub fn iter(&self) -> impl Iterator<Item = (&PaperId, &[TopicAssignment])> {
        self.by_paper.iter().map(|(id, a)| (id, a.as_slice()))
    }

    pub fn classified_count(&self) -> usize {
        self.by_paper.len()
    }

    pub fn papers_with(&self, key: &SubtopicKey) -> impl Iterator<Item = PaperId> + '_ {
        let key = key.clone();
        self.by_paper
            .iter()
            .filter(move |(_, a)| {
                a.iter()
                    .any(|x| x.category == key.category && x.subtopic == key.subtopic)
            })
            .map(|(id, _)| *id)
    }
}

fn require_subtopic(taxonomy: &Taxonomy, key: &SubtopicKey) -> Result<(), TopicError> {
    taxonomy
        .rule(key.category, &key.subtopic)
        .map(|_| ())
        .ok_or_else(|| TopicError::UnknownSubtopic {
            category: key.category.to_string(),
            subtopic: key.subtopic.clone(),
        })
}

/// Papers assigned the subtopic, bucketed by publication year.
pub fn topic_year_distribution(
    key: &SubtopicKey,
    taxonomy: &Taxonomy,
    snapshot: &CorpusSnapshot,
    assignments: &TopicAssignments,
) -> Result<YearHistogram, TopicError> {
    require_subtopic(taxonomy, key)?;
    Ok(assignments
        .papers_with(key)
        .filter_map(|id| snapshot.paper(&id))
        .map(|p| p.year)
        .collect())
}

/// Distinct authors with at least one paper assigned the subtopic, per year.
pub fn topic_author_distribution(
    key: &SubtopicKey,
    taxonomy: &Taxonomy,
    snapshot: &CorpusSnapshot,
    assignments: &TopicAssignments,
) -> Result<YearHistogram, TopicError> {
    require_subtopic(taxonomy, key)?;
    let pairs: BTreeSet<(i32, String)> = assignments
        .papers_with(key)
        .filter_map(|id| snapshot.paper(&id))
        .flat_map(|p| p.author_keys().map(move |a| (p.year, a)))
        .collect();
    Ok(pairs.into_iter().map(|(y, _)| y).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub category: Category,
    pub subtopic: String,
    pub first_year: i32,
}

/// First publication year of each subtopic that has any paper, ordered by
/// year, then category, then subtopic name.
pub fn first_occurrence_timeline(
    taxonomy: &Taxonomy,
    snapshot: &CorpusSnapshot,
    assignments: &TopicAssignments,
) -> Vec<TimelineEntry> {
    let mut first: BTreeMap<SubtopicKey, i32> = BTreeMap::new();
    for (id, list) in assignments.iter() {
        let Some(paper) = snapshot.paper(id) else {
            continue;
        };
        for a in list {
            let year = first.entry(a.key()).or_insert(paper.year);
            *year = (*year).min(paper.year);
        }
    }
    let mut timeline: Vec<TimelineEntry> = taxonomy
        .iter()
        .filter_map(|(category, rule)| {
            let key = SubtopicKey {
                category,
                subtopic: rule.name.clone(),
            };
            first.get(&key).map(|&first_year| TimelineEntry {
                category,
                subtopic: rule.name.clone(),
                first_year,
            })
        })
        .collect();
    timeline.sort_by(|a, b| {
        (a.first_year, a.category, &a.subtopic).cmp(&(b.first_year, b.category, &b.subtopic))
    });
    timeline
}
