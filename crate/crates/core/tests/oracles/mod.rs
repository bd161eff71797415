//! Brute-force reference implementations used as test oracles.
//!
//! Everything here works from the raw fixture files and the generator's ground
//! truth, never from the engine's index or snapshot structures.

#![allow(dead_code)]

pub mod criteria;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use scholarscope::fixture::{FixtureCorpus, FixturePaper};
use scholarscope::ingest::{self, IngestReport};
use scholarscope::{Catalog, CategoryRules, CorpusDirectoryLayout, IngestOptions, SuffixList, Taxonomy};
use tempfile::TempDir;

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

pub fn tokens(text: &str) -> Vec<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"[\p{Alphabetic}\p{N}]+(?:['-][\p{Alphabetic}\p{N}]+)*").unwrap());
    re.find_iter(text).map(|m| m.as_str().to_lowercase()).collect()
}

pub fn count_windows(haystack: &[String], needle: &[String]) -> u64 {
    if needle.is_empty() || haystack.len() < needle.len() {
        return 0;
    }
    haystack.windows(needle.len()).filter(|w| *w == needle).count() as u64
}

pub struct Built {
    pub dir: TempDir,
    pub fixture: FixtureCorpus,
    pub catalog: Catalog,
    pub report: IngestReport,
}

pub fn build_fixture() -> Built {
    let dir = tempfile::tempdir().unwrap();
    let fixture = scholarscope::fixture::generate();
    fixture.write_to(dir.path()).unwrap();
    let (catalog, report) = load(dir.path());
    Built {
        dir,
        fixture,
        catalog,
        report,
    }
}

pub fn load(root: &Path) -> (Catalog, IngestReport) {
    let layout = CorpusDirectoryLayout::from_root(root);
    let (snapshot, report) = ingest::load_corpus(&layout, &IngestOptions::default()).unwrap();
    let catalog = Catalog::build(snapshot, Taxonomy::default(), SuffixList::default(), CategoryRules::default());
    (catalog, report)
}

// BM25 -----------------------------------------------------------------------

pub struct Doc {
    pub key: String,
    pub fields: Vec<Vec<String>>,
}

pub fn paper_docs(fixture: &FixtureCorpus) -> (Vec<Doc>, Vec<f64>) {
    let mut docs: Vec<Doc> = fixture
        .papers
        .iter()
        .map(|p| Doc {
            key: p.id.to_string(),
            fields: vec![
                tokens(&p.title),
                p.abstract_text.as_deref().map(tokens).unwrap_or_default(),
                tokens(&p.full_text),
            ],
        })
        .collect();
    docs.sort_by(|a, b| a.key.cmp(&b.key));
    (docs, vec![3.0, 2.0, 1.0])
}

/// Exhaustive BM25 over every document, fields then sorted distinct query terms.
pub fn bm25(docs: &[Doc], weights: &[f64], query: &str) -> Vec<(String, f64)> {
    let q: BTreeSet<String> = tokens(query).into_iter().collect();
    let n = docs.len() as f64;
    let mut scores = vec![(0.0f64, false); docs.len()];
    for (f, weight) in weights.iter().enumerate() {
        let total: usize = docs.iter().map(|d| d.fields[f].len()).sum();
        let avg = total as f64 / n;
        for term in &q {
            let tfs: Vec<u64> = docs
                .iter()
                .map(|d| d.fields[f].iter().filter(|t| *t == term).count() as u64)
                .collect();
            let df = tfs.iter().filter(|&&c| c > 0).count() as f64;
            if df == 0.0 {
                continue;
            }
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            for (d, &tf) in tfs.iter().enumerate() {
                if tf == 0 {
                    continue;
                }
                let tf = tf as f64;
                let dl = docs[d].fields[f].len() as f64;
                let s = idf * (tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * dl / avg)));
                scores[d].0 += weight * s;
                scores[d].1 = true;
            }
        }
    }
    let mut out: Vec<(String, f64)> = scores
        .into_iter()
        .enumerate()
        .filter(|(_, (_, hit))| *hit)
        .map(|(d, (s, _))| (docs[d].key.clone(), s))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

// n-grams ----------------------------------------------------------------------

/// Sliding-window relative frequency per year over raw full texts.
pub fn ngram_series(fixture: &FixtureCorpus, phrase: &str, from: i32, to: i32) -> BTreeMap<i32, f64> {
    let needle = tokens(phrase);
    let n = needle.len();
    let mut hits: BTreeMap<i32, u64> = BTreeMap::new();
    let mut totals: BTreeMap<i32, u64> = BTreeMap::new();
    for p in &fixture.papers {
        let toks = tokens(&p.full_text);
        *hits.entry(p.year).or_default() += count_windows(&toks, &needle);
        *totals.entry(p.year).or_default() += (toks.len() + 1).saturating_sub(n) as u64;
    }
    (from..=to)
        .map(|y| {
            let t = totals.get(&y).copied().unwrap_or(0);
            let h = hits.get(&y).copied().unwrap_or(0);
            (y, if t == 0 { 0.0 } else { h as f64 / t as f64 })
        })
        .collect()
}

// Topics -----------------------------------------------------------------------

/// (category, subtopic, trigger phrases) straight from the taxonomy file.
pub fn taxonomy_triggers() -> Vec<(String, String, Vec<String>)> {
    let text = include_str!("../../data/taxonomy.json");
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    let mut out = Vec::new();
    for (cat, subs) in v.as_object().unwrap() {
        for (sub, triggers) in subs.as_object().unwrap() {
            let t = triggers
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect();
            out.push((cat.clone(), sub.clone(), t));
        }
    }
    out
}

/// (category, subtopic) -> weighted match count for one paper.
pub fn classify(paper: &FixturePaper) -> BTreeMap<(String, String), u64> {
    let title = tokens(&paper.title);
    let abs = paper.abstract_text.as_deref().map(tokens).unwrap_or_default();
    let full = tokens(&paper.full_text);
    let mut out = BTreeMap::new();
    for (cat, sub, triggers) in taxonomy_triggers() {
        let count: u64 = triggers
            .iter()
            .map(|t| {
                let phrase = tokens(t);
                3 * count_windows(&title, &phrase) + 2 * count_windows(&abs, &phrase) + count_windows(&full, &phrase)
            })
            .sum();
        if count > 0 {
            out.insert((cat, sub), count);
        }
    }
    out
}

pub fn weights(counts: &BTreeMap<(String, String), u64>) -> BTreeMap<(String, String), f64> {
    let total: u64 = counts.values().sum();
    counts
        .iter()
        .map(|(k, c)| (k.clone(), *c as f64 / total as f64))
        .collect()
}

pub fn shannon(ws: impl IntoIterator<Item = f64>) -> f64 {
    ws.into_iter().filter(|w| *w > 0.0).map(|w| -w * w.ln()).sum::<f64>().abs()
}

/// Sorts by score desc then key asc, treating scores within `tol` as tied.
pub fn sort_ranked(v: &mut [(String, f64)], tol: f64) {
    v.sort_by(|a, b| {
        if (a.1 - b.1).abs() <= tol {
            a.0.cmp(&b.0)
        } else {
            b.1.total_cmp(&a.1)
        }
    });
}
