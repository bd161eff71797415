//! URL mention parsing (public suffix, registrable domain, subdomain),
//! categorization and usage statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusSnapshot, PaperId, YearHistogram};

const DEFAULT_SUFFIXES: &str = include_str!("../data/suffixes.json");
const DEFAULT_RULES: &str = include_str!("../data/url_categories.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrlError {
    #[error("unparsable url {0:?}")]
    UnparsableUrl(String),
    #[error("invalid suffix list: {0}")]
    BadSuffixList(String),
    #[error("invalid category rules: {0}")]
    BadCategoryRules(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedUrl {
    pub scheme: String,
    pub host: String,
    pub subdomain: String,
    pub registrable_domain: String,
    pub public_suffix: String,
    pub path: String,
    /// False when no suffix-list entry matched and the last label was used.
    pub known_suffix: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixList {
    entries: BTreeSet<String>,
}

impl Default for SuffixList {
    fn default() -> Self {
        SuffixList::from_json(DEFAULT_SUFFIXES).expect("embedded suffix list is valid")
    }
}

impl SuffixList {
    pub fn new<I, S>(entries: I) -> Result<Self, UrlError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for e in entries {
            let e = e.as_ref().trim();
            if e.is_empty()
                || e.starts_with('.')
                || e.ends_with('.')
                || e.contains("..")
                || e != e.to_lowercase()
                || e.contains(char::is_whitespace)
            {
                return Err(UrlError::BadSuffixList(format!("bad entry {e:?}")));
            }
            set.insert(e.to_string());
        }
        if set.is_empty() {
            return Err(UrlError::BadSuffixList("list is empty".into()));
        }
        Ok(Self { entries: set })
    }

    pub fn from_json(text: &str) -> Result<Self, UrlError> {
        let raw: Vec<String> =
            serde_json::from_str(text).map_err(|e| UrlError::BadSuffixList(e.to_string()))?;
        SuffixList::new(raw)
    }

    pub fn load(path: &Path) -> Result<Self, UrlError> {
        SuffixList::from_json(&read(path)?)
    }

    pub fn contains(&self, suffix: &str) -> bool {
        self.entries.contains(suffix)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

fn read(path: &Path) -> Result<String, UrlError> {
    std::fs::read_to_string(path).map_err(|e| UrlError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

const SCHEMES: [&str; 3] = ["http", "https", "ftp"];

/// Splits a URL into host components using longest whole-label suffix match.
/// Hosts without any listed suffix fall back to their last label and are
/// flagged through [`ParsedUrl::known_suffix`].
pub fn parse_url(raw: &str, suffixes: &SuffixList) -> Result<ParsedUrl, UrlError> {
    let unparsable = || UrlError::UnparsableUrl(raw.to_string());
    let (scheme, rest) = raw.split_once("://").ok_or_else(unparsable)?;
    let scheme = scheme.to_ascii_lowercase();
    if !SCHEMES.contains(&scheme.as_str()) {
        return Err(unparsable());
    }
    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let (authority, path) = rest.split_at(authority_end);
    let host_port = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    let host = match host_port.rsplit_once(':') {
        Some((h, port)) if port.chars().all(|c| c.is_ascii_digit()) => h,
        _ => host_port,
    };
    let host = host.strip_suffix('.').unwrap_or(host).to_lowercase();
    if host.is_empty() {
        return Err(unparsable());
    }
    let labels: Vec<&str> = host.split('.').collect();
    let label_ok = |l: &&str| {
        !l.is_empty()
            && !l.starts_with('-')
            && !l.ends_with('-')
            && l.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_')
    };
    if !labels.iter().all(label_ok) {
        return Err(unparsable());
    }
    // IPv4 literals have no domain structure.
    if labels.iter().all(|l| l.chars().all(|c| c.is_ascii_digit())) {
        return Err(unparsable());
    }

    let mut suffix_len = 0;
    for n in 1..=labels.len() {
        if suffixes.contains(&labels[labels.len() - n..].join(".")) {
            suffix_len = n;
        }
    }
    let known_suffix = suffix_len > 0;
    if !known_suffix {
        suffix_len = 1;
    }
    if labels.len() <= suffix_len {
        // The host is a bare suffix: nothing is registrable under it.
        return Err(unparsable());
    }
    let public_suffix = labels[labels.len() - suffix_len..].join(".");
    let registrable_domain = labels[labels.len() - suffix_len - 1..].join(".");
    let subdomain = labels[..labels.len() - suffix_len - 1].join(".");
    Ok(ParsedUrl {
        scheme,
        host,
        subdomain,
        registrable_domain,
        public_suffix,
        path: path.to_string(),
        known_suffix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UrlCategory {
    University,
    DigitalLibrary,
    Dataset,
    ResearchGroup,
    Other,
}

impl UrlCategory {
    pub const ALL: [UrlCategory; 5] = [
        UrlCategory::University,
        UrlCategory::DigitalLibrary,
        UrlCategory::Dataset,
        UrlCategory::ResearchGroup,
        UrlCategory::Other,
    ];
}

impl fmt::Display for UrlCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for UrlCategory {
    type Err = UrlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        UrlCategory::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| UrlError::BadCategoryRules(format!("unknown category {s:?}")))
    }
}

/// A dot-separated host pattern matched against the trailing labels of a
/// host; a `*` label matches any single label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRule {
    pub pattern: String,
    pub category: UrlCategory,
}

impl CategoryRule {
    pub fn matches(&self, host: &str) -> bool {
        let pat: Vec<&str> = self.pattern.split('.').collect();
        let labels: Vec<&str> = host.split('.').collect();
        labels.len() >= pat.len()
            && pat
                .iter()
                .rev()
                .zip(labels.iter().rev())
                .all(|(p, l)| *p == "*" || p == l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRules {
    rules: Vec<CategoryRule>,
}

impl Default for CategoryRules {
    fn default() -> Self {
        CategoryRules::from_json(DEFAULT_RULES).expect("embedded category rules are valid")
    }
}

impl CategoryRules {
    pub fn new(rules: Vec<CategoryRule>) -> Result<Self, UrlError> {
        for r in &rules {
            if r.category == UrlCategory::Other {
                return Err(UrlError::BadCategoryRules(format!(
                    "{:?}: Other is the fallthrough and cannot be a rule",
                    r.pattern
                )));
            }
            if r.pattern.is_empty()
                || r.pattern != r.pattern.to_lowercase()
                || r.pattern.split('.').any(str::is_empty)
            {
                return Err(UrlError::BadCategoryRules(format!(
                    "bad pattern {:?}",
                    r.pattern
                )));
            }
        }
        Ok(Self { rules })
    }

    pub fn from_json(text: &str) -> Result<Self, UrlError> {
        let rules: Vec<CategoryRule> =
            serde_json::from_str(text).map_err(|e| UrlError::BadCategoryRules(e.to_string()))?;
        CategoryRules::new(rules)
    }

    pub fn load(path: &Path) -> Result<Self, UrlError> {
        CategoryRules::from_json(&read(path)?)
    }

    pub fn rules(&self) -> &[CategoryRule] {
        &self.rules
    }
}

/// First matching rule's category, or `Other`.
pub fn categorize(url: &ParsedUrl, rules: &CategoryRules) -> UrlCategory {
    rules
        .rules
        .iter()
        .find(|r| r.matches(&url.host))
        .map_or(UrlCategory::Other, |r| r.category)
}

/// One URL occurrence in one paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrlMention {
    pub paper: PaperId,
    pub year: i32,
    pub raw: String,
    pub parsed: Option<ParsedUrl>,
    pub category: Option<UrlCategory>,
}

/// Every URL mention of a snapshot, parsed and categorized once.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UrlCatalog {
    mentions: Vec<UrlMention>,
}

impl UrlCatalog {
    pub fn build(snapshot: &CorpusSnapshot, suffixes: &SuffixList, rules: &CategoryRules) -> Self {
        let mentions = snapshot
            .papers
            .values()
            .flat_map(|p| {
                p.url_mentions.iter().map(move |raw| {
                    let parsed = parse_url(raw, suffixes).ok();
                    let category = parsed.as_ref().map(|u| categorize(u, rules));
                    UrlMention {
                        paper: p.id,
                        year: p.year,
                        raw: raw.clone(),
                        parsed,
                        category,
                    }
                })
            })
            .collect();
        Self { mentions }
    }

    pub fn mentions(&self) -> &[UrlMention] {
        &self.mentions
    }

    /// Mentions (with multiplicity) of a registrable domain per mentioning paper's year.
    pub fn usage_by_year(&self, registrable_domain: &str) -> YearHistogram {
        let domain = registrable_domain.trim().to_lowercase();
        self.mentions
            .iter()
            .filter(|m| {
                m.parsed
                    .as_ref()
                    .is_some_and(|p| p.registrable_domain == domain)
            })
            .map(|m| m.year)
            .collect()
    }

    /// Category of a registrable domain's mentions, if it was mentioned at all.
    pub fn domain_category(&self, registrable_domain: &str) -> Option<UrlCategory> {
        let domain = registrable_domain.trim().to_lowercase();
        self.mentions.iter().find_map(|m| {
            m.parsed
                .as_ref()
                .filter(|p| p.registrable_domain == domain)
                .and(m.category)
        })
    }

    pub fn top_tables(&self, k: usize) -> TopTables {
        let k = k.max(1);
        let parsed: Vec<(&UrlMention, &ParsedUrl)> = self
            .mentions
            .iter()
            .filter_map(|m| m.parsed.as_ref().map(|p| (m, p)))
            .collect();

        let mut tlds: BTreeMap<&str, u64> = BTreeMap::new();
        let mut domains: BTreeMap<&str, u64> = BTreeMap::new();
        let mut hosts: BTreeMap<&str, (u64, BTreeSet<PaperId>)> = BTreeMap::new();
        let mut per_category: BTreeMap<UrlCategory, BTreeMap<&str, u64>> = BTreeMap::new();
        for (m, p) in &parsed {
            *tlds.entry(&p.public_suffix).or_insert(0) += 1;
            *domains.entry(&p.registrable_domain).or_insert(0) += 1;
            let h = hosts.entry(&p.host).or_default();
            h.0 += 1;
            h.1.insert(m.paper);
            *per_category
                .entry(m.category.unwrap_or(UrlCategory::Other))
                .or_default()
                .entry(&m.raw)
                .or_insert(0) += 1;
        }

        let top_subdomains = rank_counts(hosts.iter().map(|(h, (c, _))| (*h, *c)))
            .into_iter()
            .take(k)
            .map(|e| {
                let papers = hosts[e.name.as_str()].1.iter().copied().collect();
                SubdomainEntry {
                    host: e.name,
                    count: e.count,
                    papers,
                }
            })
            .collect();

        TopTables {
            total_mentions: self.mentions.len() as u64,
            parseable_mentions: parsed.len() as u64,
            top_tlds: truncate(rank_counts(tlds), k),
            top_domains: truncate(rank_counts(domains), k),
            top_subdomains,
            top_urls_per_category: per_category
                .into_iter()
                .map(|(c, urls)| (c, truncate(rank_counts(urls), k)))
                .collect(),
        }
    }
}

fn truncate(mut v: Vec<CountEntry>, k: usize) -> Vec<CountEntry> {
    v.truncate(k);
    v
}

/// Sorted by (count desc, name asc).
pub fn rank_counts<'a>(counts: impl IntoIterator<Item = (&'a str, u64)>) -> Vec<CountEntry> {
    let mut v: Vec<CountEntry> = counts
        .into_iter()
        .map(|(name, count)| CountEntry {
            name: name.to_string(),
            count,
        })
        .collect();
    v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub name: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdomainEntry {
    pub host: String,
    pub count: u64,
    pub papers: Vec<PaperId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopTables {
    pub total_mentions: u64,
    pub parseable_mentions: u64,
    pub top_tlds: Vec<CountEntry>,
    pub top_domains: Vec<CountEntry>,
    pub top_subdomains: Vec<SubdomainEntry>,
    pub top_urls_per_category: BTreeMap<UrlCategory, Vec<CountEntry>>,
}
