//! Tunable parameters shared by the build pipeline and the query layer.

use serde::{Deserialize, Serialize};

/// BM25 parameters and per-field weights for the Papers domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub title_weight: f64,
    pub abstract_weight: f64,
    pub full_text_weight: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self {
            k1: 1.2,
            b: 0.75,
            title_weight: 3.0,
            abstract_weight: 2.0,
            full_text_weight: 1.0,
        }
    }
}

/// Reference resolution thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    /// Minimum token count for a title to be matched by exact containment.
    pub min_title_tokens: usize,
    /// Minimum token-set Jaccard similarity for the fuzzy stage.
    pub jaccard_threshold: f64,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self {
            min_title_tokens: 4,
            jaccard_threshold: 0.9,
        }
    }
}

/// Windows and thresholds behind the ranked lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticsConfig {
    /// A paper or author counts as recent when `year >= now_year - recent_years`.
    pub recent_years: i32,
    /// Minimum age in years for seminal papers.
    pub seminal_age: i32,
    /// Minimum number of distinct citing years for seminal papers.
    pub seminal_distinct_years: usize,
    /// Length of the similar-papers list on paper pages.
    pub similar_k: usize,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        Self {
            recent_years: 5,
            seminal_age: 10,
            seminal_distinct_years: 5,
            similar_k: 5,
        }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), String> {
        let all = [
            ("k1", self.k1),
            ("b", self.b),
            ("title_weight", self.title_weight),
            ("abstract_weight", self.abstract_weight),
            ("full_text_weight", self.full_text_weight),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("bm25.{name} must be positive, got {v}"));
            }
        }
        if self.b > 1.0 {
            return Err(format!("bm25.b must not exceed 1, got {}", self.b));
        }
        Ok(())
    }
}

impl ResolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_title_tokens == 0 {
            return Err("resolver.min_title_tokens must be positive".into());
        }
        if !(self.jaccard_threshold > 0.0 && self.jaccard_threshold <= 1.0) {
            return Err(format!(
                "resolver.jaccard_threshold must lie in (0, 1], got {}",
                self.jaccard_threshold
            ));
        }
        Ok(())
    }
}

impl AnalyticsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.recent_years <= 0
            || self.seminal_age <= 0
            || self.seminal_distinct_years == 0
            || self.similar_k == 0
        {
            return Err("analytics thresholds must all be positive".into());
        }
        Ok(())
    }
}
