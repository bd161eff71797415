//! Three-stage resolution of raw bibliography strings to in-corpus papers:
//! an embedded anthology id, then exact containment of a normalized title,
//! then a unique token-set Jaccard argmax above a threshold.

use std::collections::{BTreeSet, HashMap};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::config::ResolverConfig;
use crate::corpus::PaperId;

static EMBEDDED_ID: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b[A-Z][0-9]{2}-[0-9]{4}\b").expect("valid id regex"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionStage {
    EmbeddedId,
    ExactTitle,
    FuzzyTitle,
}

/// Lowercases, deletes apostrophes, turns all other punctuation except
/// intra-word hyphens into spaces and collapses whitespace.
pub fn normalize_reference_text(text: &str) -> String {
    let chars: Vec<char> = text.chars().flat_map(char::to_lowercase).collect();
    let mut out = String::with_capacity(chars.len());
    let mut pending_space = false;
    for (i, &c) in chars.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || (c == '-'
                && i > 0
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric()));
        if keep {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else if c == '\'' || c == '\u{2019}' {
            continue;
        } else {
            pending_space = true;
        }
    }
    out
}

/// Whitespace tokens of [`normalize_reference_text`].
pub fn reference_tokens(text: &str) -> Vec<String> {
    normalize_reference_text(text)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Token-set Jaccard similarity; 0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

struct TitleEntry {
    id: PaperId,
    token_count: usize,
    padded: String,
    distinct_tokens: usize,
}

pub struct ReferenceResolver {
    config: ResolverConfig,
    ids: BTreeSet<PaperId>,
    titles: Vec<TitleEntry>,
    by_token: HashMap<String, Vec<usize>>,
}

impl ReferenceResolver {
    pub fn new<'a>(
        papers: impl IntoIterator<Item = (PaperId, &'a str)>,
        config: ResolverConfig,
    ) -> Self {
        let mut ids = BTreeSet::new();
        let mut titles = Vec::new();
        let mut by_token: HashMap<String, Vec<usize>> = HashMap::new();
        for (id, title) in papers {
            ids.insert(id);
            let tokens = reference_tokens(title);
            if tokens.is_empty() {
                continue;
            }
            let distinct: BTreeSet<String> = tokens.iter().cloned().collect();
            let slot = titles.len();
            for t in &distinct {
                by_token.entry(t.clone()).or_default().push(slot);
            }
            titles.push(TitleEntry {
                id,
                token_count: tokens.len(),
                padded: format!(" {} ", tokens.join(" ")),
                distinct_tokens: distinct.len(),
            });
        }
        Self {
            config,
            ids,
            titles,
            by_token,
        }
    }

    /// Resolves `reference`, never to `citing` itself.
    pub fn resolve(
        &self,
        reference: &str,
        citing: Option<PaperId>,
    ) -> Option<(PaperId, ResolutionStage)> {
        let not_self = |id: &PaperId| Some(*id) != citing;

        let embedded = EMBEDDED_ID
            .find_iter(reference)
            .filter_map(|m| PaperId::parse(m.as_str()).ok())
            .find(|id| self.ids.contains(id) && not_self(id));
        if let Some(id) = embedded {
            return Some((id, ResolutionStage::EmbeddedId));
        }

        let ref_tokens: BTreeSet<String> = reference_tokens(reference).into_iter().collect();
        if ref_tokens.is_empty() {
            return None;
        }
        let mut shared: HashMap<usize, usize> = HashMap::new();
        for t in &ref_tokens {
            for &slot in self.by_token.get(t).into_iter().flatten() {
                *shared.entry(slot).or_insert(0) += 1;
            }
        }
        let mut candidates: Vec<(usize, usize)> = shared
            .into_iter()
            .filter(|(slot, _)| not_self(&self.titles[*slot].id))
            .collect();
        candidates.sort_unstable();

        let padded_ref = format!(" {} ", normalize_reference_text(reference));
        let exact: BTreeSet<PaperId> = candidates
            .iter()
            .map(|&(slot, _)| &self.titles[slot])
            .filter(|t| {
                t.token_count >= self.config.min_title_tokens && padded_ref.contains(&t.padded)
            })
            .map(|t| t.id)
            .collect();
        if exact.len() == 1 {
            return exact.into_iter().next().map(|id| (id, ResolutionStage::ExactTitle));
        }

        let mut best: Option<(f64, PaperId)> = None;
        let mut tied = false;
        for &(slot, inter) in &candidates {
            let t = &self.titles[slot];
            let union = ref_tokens.len() + t.distinct_tokens - inter;
            let sim = inter as f64 / union as f64;
            match best {
                Some((b, id)) if sim == b && id != t.id => tied = true,
                Some((b, _)) if sim <= b => {}
                _ => {
                    best = Some((sim, t.id));
                    tied = false;
                }
            }
        }
        match best {
            Some((sim, id)) if !tied && sim >= self.config.jaccard_threshold => {
                Some((id, ResolutionStage::FuzzyTitle))
            }
            _ => None,
        }
    }
}
