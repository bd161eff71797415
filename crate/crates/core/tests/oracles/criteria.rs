//! One check per acceptance criterion that can be decided without a server.
//! Each returns a short summary on success and a description of the first
//! discrepancy otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scholarscope::analytics::{paper_stats, ranked_list, venue_stats};
use scholarscope::corpus::normalize_author_name;
use scholarscope::fixture::NOW_YEAR;
use scholarscope::ingest::{self, ReferenceResolver, ResolutionStage};
use scholarscope::store;
use scholarscope::topics::first_occurrence_timeline;
use scholarscope::urls::{categorize, parse_url, CountEntry, UrlError};
use scholarscope::{
    AnalyticsConfig, Bm25Params, CatalogParts, Category, PaperId, CorpusDirectoryLayout, IngestOptions, RankedListKind, ResolverConfig,
    SearchDomain, SuffixList, UrlCategory,
};

use super::*;

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ingestion

pub fn ingestion_fidelity(root: &Path, fixture: &FixtureCorpus) -> Outcome {
    let truth = &fixture.truth;
    let start = Instant::now();
    let (snapshot, report) =
        ingest::load_corpus(&CorpusDirectoryLayout::from_root(root), &IngestOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "load_corpus took {elapsed:?}");
    ensure!(report.papers_loaded == truth.papers, "papers_loaded {} != {}", report.papers_loaded, truth.papers);
    ensure!(snapshot.papers.len() == 60, "papers {}", snapshot.papers.len());
    ensure!(snapshot.venues.len() == truth.venues, "venues {} != {}", snapshot.venues.len(), truth.venues);
    ensure!(snapshot.authors.len() == truth.authors, "authors {} != {}", snapshot.authors.len(), truth.authors);
    let edges: BTreeSet<_> = snapshot.citation_edges.iter().map(|e| (e.citing, e.cited)).collect();
    let found = truth.edges.intersection(&edges).count();
    ensure!(found == truth.edges.len(), "resolved {found} of {} planted edges", truth.edges.len());
    ensure!(edges.len() == truth.edges.len(), "{} edges, {} planted", edges.len(), truth.edges.len());
    ensure!(
        report.references_seen == truth.references_seen() as u64,
        "references_seen {} != {}",
        report.references_seen,
        truth.references_seen()
    );
    ensure!(
        report.references_resolved == truth.planted_references.len() as u64,
        "references_resolved {} != {}",
        report.references_resolved,
        truth.planted_references.len()
    );
    ensure!(
        snapshot.unresolved_reference_count == truth.unresolvable_references.len() as u64,
        "unresolved {} != {}",
        snapshot.unresolved_reference_count,
        truth.unresolvable_references.len()
    );
    let problems = snapshot.validate(NOW_YEAR);
    ensure!(problems.is_empty(), "snapshot invalid: {problems:?}");
    Ok(format!(
        "papers=60 venues=5 authors=25 edges={}/{} in {:.0?}",
        found,
        truth.edges.len(),
        elapsed
    ))
}

// resolution

pub fn resolution_staging(fixture: &FixtureCorpus, snapshot_edges: &BTreeSet<(PaperId, PaperId)>) -> Outcome {
    let truth = &fixture.truth;
    let resolver = ReferenceResolver::new(
        fixture.papers.iter().map(|p| (p.id, p.title.as_str())),
        ResolverConfig::default(),
    );
    let mut per_stage: BTreeMap<ResolutionStage, usize> = BTreeMap::new();
    for r in &truth.planted_references {
        let got = resolver.resolve(&r.reference, Some(r.citing));
        ensure!(
            got == Some((r.cited, r.stage)),
            "{:?} from {} resolved to {got:?}, planted {} via {:?}",
            r.reference,
            r.citing,
            r.cited,
            r.stage
        );
        *per_stage.entry(r.stage).or_default() += 1;
        if r.stage == ResolutionStage::FuzzyTitle {
            let title = fixture.paper(&r.cited).unwrap().title.as_str();
            let a: BTreeSet<String> = tokens(&r.reference).into_iter().collect();
            let b: BTreeSet<String> = tokens(title).into_iter().collect();
            let j = a.intersection(&b).count() as f64 / a.union(&b).count() as f64;
            ensure!(j >= 0.9 && j < 1.0, "fuzzy variant has Jaccard {j}");
        }
    }
    for stage in [ResolutionStage::EmbeddedId, ResolutionStage::ExactTitle, ResolutionStage::FuzzyTitle] {
        ensure!(per_stage.get(&stage).copied().unwrap_or(0) > 0, "no {stage:?} references planted");
    }
    for (citing, reference) in &truth.unresolvable_references {
        let got = resolver.resolve(reference, Some(*citing));
        ensure!(got.is_none(), "{reference:?} should stay unresolved, got {got:?}");
    }
    let (citing, near, target) = &truth.near_miss;
    let a: BTreeSet<String> = tokens(near).into_iter().collect();
    let b: BTreeSet<String> = tokens(&fixture.paper(target).unwrap().title).into_iter().collect();
    let j = a.intersection(&b).count() as f64 / a.union(&b).count() as f64;
    ensure!(close(j, 0.6, 1e-12), "near miss Jaccard is {j}");
    ensure!(resolver.resolve(near, Some(*citing)).is_none(), "near miss resolved");
    let false_edges: Vec<_> = snapshot_edges.difference(&truth.edges).collect();
    ensure!(false_edges.is_empty(), "false edges {false_edges:?}");
    Ok(format!(
        "stage1={} stage2={} stage3={} near-miss(J=0.6) unresolved, false edges=0",
        per_stage[&ResolutionStage::EmbeddedId],
        per_stage[&ResolutionStage::ExactTitle],
        per_stage[&ResolutionStage::FuzzyTitle]
    ))
}

// ranking

pub fn random_queries(fixture: &FixtureCorpus, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = fixture
        .papers
        .iter()
        .flat_map(|p| {
            let mut t = tokens(&p.title);
            t.extend(tokens(&p.full_text));
            t
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let mut words: Vec<String> = (0..n).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect();
            if rng.gen_bool(0.1) {
                words.push("zzyzx".into());
            }
            if rng.gen_bool(0.2) {
                words[0] = words[0].to_uppercase();
            }
            words.join(" ")
        })
        .collect()
}

pub fn ranking_oracle(catalog: &Catalog, fixture: &FixtureCorpus) -> Outcome {
    let (docs, weights) = paper_docs(fixture);
    let params = Bm25Params::default();
    let queries = random_queries(fixture, 100, 3);
    let mut compared = 0;
    for q in &queries {
        let expected = bm25(&docs, &weights, q);
        let mut got = Vec::new();
        let mut page = 1;
        loop {
            let p = catalog
                .index()
                .search(q, SearchDomain::Papers, page, 7, &params)
                .map_err(|e| format!("{q:?}: {e}"))?;
            ensure!(p.total_hits == expected.len(), "{q:?}: total_hits {} != {}", p.total_hits, expected.len());
            if p.hits.is_empty() {
                break;
            }
            got.extend(p.hits);
            page += 1;
        }
        ensure!(got.len() == expected.len(), "{q:?}: {} hits != {}", got.len(), expected.len());
        for (g, (key, score)) in got.iter().zip(&expected) {
            ensure!(&g.key == key, "{q:?}: order differs at {key} (got {})", g.key);
            ensure!(close(g.score, *score, 1e-9), "{q:?}: {key} scored {} vs {score}", g.score);
        }
        compared += expected.len();
    }
    Ok(format!("100 queries, {compared} ranked hits identical to brute force"))
}

// n-grams

pub fn random_phrases(fixture: &FixtureCorpus, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec!["machine translation".to_string()];
    while out.len() < count {
        let p = fixture.papers.choose(&mut rng).unwrap();
        let toks = tokens(&p.full_text);
        let n = rng.gen_range(1..=3);
        let start = rng.gen_range(0..=toks.len() - n);
        out.push(toks[start..start + n].join(" "));
    }
    out
}

pub fn ngram_oracle(catalog: &Catalog, fixture: &FixtureCorpus) -> Outcome {
    let (from, to) = (1998, 2021);
    for phrase in random_phrases(fixture, 20, 4) {
        let got = catalog.index().ngram_trend(&phrase, from, to).map_err(|e| e.to_string())?;
        let expected = ngram_series(fixture, &phrase, from, to);
        ensure!(
            got.keys().eq(expected.keys()),
            "{phrase:?}: years {:?} vs {:?}",
            got.keys().collect::<Vec<_>>(),
            expected.keys().collect::<Vec<_>>()
        );
        for (y, v) in &expected {
            ensure!(close(got[y], *v, 1e-12), "{phrase:?} {y}: {} vs {v}", got[y]);
        }
    }
    let vocab: BTreeSet<String> = fixture.papers.iter().flat_map(|p| tokens(&p.full_text)).collect();
    let mut sums: BTreeMap<i32, f64> = BTreeMap::new();
    for term in &vocab {
        for (y, v) in catalog.index().ngram_trend(term, 2000, 2019).map_err(|e| e.to_string())? {
            *sums.entry(y).or_default() += v;
        }
    }
    for (y, s) in &sums {
        ensure!(close(*s, 1.0, 1e-9), "unigram frequencies of {y} sum to {s}");
    }
    Ok(format!(
        "20 phrases match sliding-window counts; unigram sums = 1 over {} years",
        sums.len()
    ))
}

// topics

pub fn topic_engine(catalog: &Catalog, fixture: &FixtureCorpus) -> Outcome {
    let truth = &fixture.truth;
    let mut classified = 0;
    for p in &fixture.papers {
        let expected = classify(p);
        let got: BTreeMap<(String, String), u64> = catalog
            .assignments()
            .for_paper(&p.id)
            .iter()
            .map(|a| ((a.category.name().to_string(), a.subtopic.clone()), a.match_count))
            .collect();
        ensure!(got == expected, "{}: classified {got:?}, brute force {expected:?}", p.id);
        let planted: BTreeSet<(String, String)> = truth
            .topics
            .get(&p.id)
            .map(|s| s.iter().map(|(c, n)| (c.name().to_string(), n.clone())).collect())
            .unwrap_or_default();
        let got_keys: BTreeSet<_> = got.keys().cloned().collect();
        ensure!(got_keys == planted, "{}: subtopics {got_keys:?}, planted {planted:?}", p.id);
        let assigned = catalog.assignments().for_paper(&p.id);
        if !assigned.is_empty() {
            classified += 1;
            let sum: f64 = assigned.iter().map(|a| a.weight).sum();
            ensure!(close(sum, 1.0, 1e-9), "{}: weights sum to {sum}", p.id);
            let oracle_w = weights(&expected);
            for a in assigned {
                let w = oracle_w[&(a.category.name().to_string(), a.subtopic.clone())];
                ensure!(close(a.weight, w, 1e-12), "{}: weight {} vs {w}", p.id, a.weight);
            }
        }
    }
    let uniform = catalog.assignments().for_paper(&truth.uniform_topic_paper);
    let h = scholarscope::topics::diversity_entropy(uniform);
    ensure!(uniform.len() == 4, "uniform paper has {} subtopics", uniform.len());
    ensure!(close(h, 4f64.ln(), 1e-9), "uniform entropy {h}");
    let timeline: BTreeMap<(Category, String), i32> =
        first_occurrence_timeline(catalog.taxonomy(), catalog.snapshot(), catalog.assignments())
            .into_iter()
            .map(|e| ((e.category, e.subtopic), e.first_year))
            .collect();
    ensure!(timeline == truth.timeline, "timeline {timeline:?} != {:?}", truth.timeline);
    Ok(format!(
        "{classified} classified papers match brute force; H(uniform)=ln 4; timeline has {} subtopics",
        timeline.len()
    ))
}

// analytics

fn venue_key(fixture: &FixtureCorpus, id: &PaperId) -> String {
    scholarscope::corpus::normalize_venue(&fixture.paper(id).unwrap().venue)
}

/// Brute-force ranked list over the raw fixture and planted edges.
pub fn oracle_ranked(fixture: &FixtureCorpus, kind: RankedListKind, cfg: &AnalyticsConfig) -> Vec<(String, f64)> {
    let truth = &fixture.truth;
    let now = NOW_YEAR;
    let recent = |y: i32| y >= now - cfg.recent_years;
    let cites = |id: &PaperId| truth.edges.iter().filter(|(_, c)| c == id).count() as f64;
    let paper_weights: BTreeMap<PaperId, BTreeMap<(String, String), f64>> = fixture
        .papers
        .iter()
        .map(|p| (p.id, weights(&classify(p))))
        .collect();
    let mut out: Vec<(String, f64)> = Vec::new();
    match kind {
        RankedListKind::RecentPopularPapers
        | RankedListKind::SurveyPapers
        | RankedListKind::SeminalPapers
        | RankedListKind::DiversePapers => {
            for p in &fixture.papers {
                let eligible = match kind {
                    RankedListKind::RecentPopularPapers => recent(p.year),
                    RankedListKind::SurveyPapers => tokens(&p.title)
                        .iter()
                        .any(|t| ["survey", "review", "overview", "tutorial"].contains(&t.as_str())),
                    RankedListKind::SeminalPapers => {
                        let years: BTreeSet<i32> = truth
                            .edges
                            .iter()
                            .filter(|(_, c)| *c == p.id)
                            .map(|(s, _)| truth.years[s])
                            .collect();
                        now - p.year >= cfg.seminal_age && years.len() >= cfg.seminal_distinct_years
                    }
                    _ => true,
                };
                if !eligible {
                    continue;
                }
                let score = if kind == RankedListKind::DiversePapers {
                    shannon(paper_weights[&p.id].values().copied())
                } else {
                    cites(&p.id)
                };
                out.push((p.id.to_string(), score));
            }
        }
        _ => {
            let mut by_author: BTreeMap<String, Vec<&FixturePaper>> = BTreeMap::new();
            for p in &fixture.papers {
                let keys: BTreeSet<String> = p.authors.iter().map(|a| normalize_author_name(a).unwrap()).collect();
                for k in keys {
                    by_author.entry(k).or_default().push(p);
                }
            }
            for (key, papers) in by_author {
                let first = papers.iter().map(|p| p.year).min().unwrap();
                let score = match kind {
                    RankedListKind::RecentPopularAuthors => {
                        papers.iter().filter(|p| recent(p.year)).map(|p| cites(&p.id)).sum()
                    }
                    RankedListKind::LifetimePopularAuthors => papers.iter().map(|p| cites(&p.id)).sum(),
                    RankedListKind::TopPublishingAuthors => papers.len() as f64,
                    RankedListKind::RecentProlificAuthors => papers.iter().filter(|p| recent(p.year)).count() as f64,
                    RankedListKind::DiverseAuthors => {
                        let mut acc: BTreeMap<(String, String), f64> = BTreeMap::new();
                        for p in &papers {
                            for (k, w) in &paper_weights[&p.id] {
                                *acc.entry(k.clone()).or_default() += w;
                            }
                        }
                        let total: f64 = acc.values().sum();
                        shannon(acc.values().map(|w| w / total))
                    }
                    RankedListKind::YoungPopularAuthors => {
                        if first < now - cfg.recent_years {
                            continue;
                        }
                        papers.iter().map(|p| cites(&p.id)).sum()
                    }
                    _ => unreachable!(),
                };
                out.push((key, score));
            }
        }
    }
    sort_ranked(&mut out, 1e-9);
    out
}

pub fn analytics_conservation(catalog: &Catalog, fixture: &FixtureCorpus) -> Outcome {
    let truth = &fixture.truth;
    let cfg = AnalyticsConfig::default();
    let edges = catalog.snapshot().citation_edges.len() as u64;
    let mut total = 0;
    for id in catalog.snapshot().papers.keys() {
        let s = paper_stats(catalog, id, &cfg).map_err(|e| e.to_string())?;
        ensure!(s.citations_by_year.total() == s.total_citations, "{id}: histogram total mismatch");
        total += s.total_citations;
    }
    ensure!(total == edges, "sum of total_citations {total} != {edges} edges");

    for vkey in catalog.snapshot().venues.keys() {
        let v = venue_stats(catalog, vkey, NOW_YEAR, &cfg).map_err(|e| e.to_string())?;
        let mut citing: BTreeMap<String, u64> = BTreeMap::new();
        let mut cited: BTreeMap<String, u64> = BTreeMap::new();
        for (s, c) in &truth.edges {
            if &venue_key(fixture, c) == vkey {
                *citing.entry(venue_key(fixture, s)).or_default() += 1;
            }
            if &venue_key(fixture, s) == vkey {
                *cited.entry(venue_key(fixture, c)).or_default() += 1;
            }
        }
        let as_map = |v: &[CountEntry]| -> BTreeMap<String, u64> {
            v.iter().map(|e| (e.name.clone(), e.count)).collect()
        };
        ensure!(as_map(&v.top_citing_venues) == citing, "{vkey}: citing table {:?} vs {citing:?}", v.top_citing_venues);
        ensure!(as_map(&v.top_cited_venues) == cited, "{vkey}: cited table {:?} vs {cited:?}", v.top_cited_venues);
        let into: u64 = truth.edges.iter().filter(|(_, c)| &venue_key(fixture, c) == vkey).count() as u64;
        ensure!(
            v.top_citing_venues.iter().map(|e| e.count).sum::<u64>() == into,
            "{vkey}: citing table does not partition incoming edges"
        );
        ensure!(v.citations_by_year.total() == into, "{vkey}: citations_by_year total");
    }

    for kind in RankedListKind::ALL {
        let expected = oracle_ranked(fixture, kind, &cfg);
        let got = ranked_list(catalog, kind, NOW_YEAR, 10_000, &cfg);
        ensure!(got.len() == expected.len(), "{kind}: {} entries vs {}", got.len(), expected.len());
        for (g, (key, score)) in got.iter().zip(&expected) {
            ensure!(&g.key == key && close(g.score, *score, 1e-9), "{kind}: got {}={} expected {key}={score}", g.key, g.score);
        }
        let top5 = ranked_list(catalog, kind, NOW_YEAR, 5, &cfg);
        ensure!(top5[..] == got[..got.len().min(5)], "{kind}: top-5 is not a prefix");
        ensure!(!expected.is_empty(), "{kind}: empty on fixture");
    }
    Ok(format!("sum citations = {edges} edges; 5 venues partition; 10 ranked lists equal brute force"))
}

// urls

type Expect = Option<(&'static str, &'static str, &'static str, bool)>;

/// (input, Some((subdomain, registrable domain, public suffix, known suffix)) or None when unparsable).
pub const URL_TABLE: [(&str, Expect); 30] = [
    ("http://www.cl.cam.ac.uk/~sc609/", Some(("www.cl", "cam.ac.uk", "ac.uk", true))),
    ("https://aclanthology.org/P05-1015", Some(("", "aclanthology.org", "org", true))),
    ("http://nlp.stanford.edu/software/", Some(("nlp", "stanford.edu", "edu", true))),
    ("https://www.ox.ac.uk", Some(("www", "ox.ac.uk", "ac.uk", true))),
    ("http://ac.uk/", None),
    ("http://uk/", None),
    ("http://example.co.uk:8080/path?q=1", Some(("", "example.co.uk", "co.uk", true))),
    ("https://user:pw@host.example.com/a", Some(("host", "example.com", "com", true))),
    ("ftp://ftp.uni-stuttgart.de/pub", Some(("ftp", "uni-stuttgart.de", "de", true))),
    ("http://www.example.edu.au/", Some(("www", "example.edu.au", "edu.au", true))),
    ("http://a.b.c.example.co.jp/", Some(("a.b.c", "example.co.jp", "co.jp", true))),
    ("http://EXAMPLE.COM/Path", Some(("", "example.com", "com", true))),
    ("http://example.xyz/", Some(("", "example.xyz", "xyz", false))),
    ("http://deep.sub.example.xyz", Some(("deep.sub", "example.xyz", "xyz", false))),
    ("http:///nohost", None),
    ("http://192.168.0.1/index", None),
    ("not a url", None),
    ("mailto:someone@example.com", None),
    ("gopher://example.com", None),
    ("http://example..com", None),
    ("http://-bad.com", None),
    ("http://example.com./", Some(("", "example.com", "com", true))),
    ("https://www.aclweb.org/anthology/", Some(("www", "aclweb.org", "org", true))),
    ("http://research.microsoft.com/en-us/", Some(("research", "microsoft.com", "com", true))),
    ("https://github.com", Some(("", "github.com", "com", true))),
    ("http://www.iitb.ac.in/", Some(("www.iitb", "ac.in", "in", true))),
    ("https://www.uni-heidelberg.de/", Some(("www", "uni-heidelberg.de", "de", true))),
    ("http://co.uk", None),
    ("https://catalog.ldc.upenn.edu/LDC2006T13", Some(("catalog.ldc", "upenn.edu", "edu", true))),
    ("http://localhost:8000/", None),
];

pub fn expected_category(host: &str) -> UrlCategory {
    match host {
        "www.cs.cmu.edu" | "www.ox.ac.uk" | "www.cl.cam.ac.uk" => UrlCategory::University,
        "nlp.stanford.edu" | "research.microsoft.com" => UrlCategory::ResearchGroup,
        "aclanthology.org" => UrlCategory::DigitalLibrary,
        "www.statmt.org" | "catalog.ldc.upenn.edu" | "www.kaggle.com" => UrlCategory::Dataset,
        _ => UrlCategory::Other,
    }
}

pub fn url_analytics(catalog: &Catalog, fixture: &FixtureCorpus) -> Outcome {
    let suffixes = SuffixList::default();
    for (input, expect) in URL_TABLE {
        let got = parse_url(input, &suffixes);
        match (expect, got) {
            (None, Err(UrlError::UnparsableUrl(_))) => {}
            (Some((sub, reg, suf, known)), Ok(u)) => {
                ensure!(
                    u.subdomain == sub && u.registrable_domain == reg && u.public_suffix == suf && u.known_suffix == known,
                    "{input}: parsed {u:?}"
                );
            }
            (e, g) => return Err(format!("{input}: expected {e:?}, got {g:?}")),
        }
    }

    let mentions = catalog.urls().mentions();
    let got: BTreeMap<PaperId, Vec<&str>> = mentions.iter().fold(BTreeMap::new(), |mut m, x| {
        m.entry(x.paper).or_insert_with(Vec::new).push(x.raw.as_str());
        m
    });
    let planted: BTreeMap<PaperId, Vec<&str>> = fixture.truth.url_mentions.iter().fold(BTreeMap::new(), |mut m, (p, u)| {
        m.entry(*p).or_insert_with(Vec::new).push(u.as_str());
        m
    });
    ensure!(got == planted, "extracted mentions differ from planted ones");

    let mut per_category: BTreeMap<UrlCategory, u64> = BTreeMap::new();
    let mut parseable = 0u64;
    let mut suffix_set = BTreeSet::new();
    for m in mentions {
        match (&m.parsed, m.category) {
            (Some(p), Some(c)) => {
                parseable += 1;
                let matching = UrlCategory::ALL.iter().filter(|k| **k == c).count();
                ensure!(matching == 1, "{}: category not unique", m.raw);
                ensure!(c == categorize(p, &catalog.parts().category_rules), "{}: inconsistent category", m.raw);
                ensure!(c == expected_category(&p.host), "{}: category {c:?}", m.raw);
                *per_category.entry(c).or_default() += 1;
                suffix_set.insert(p.public_suffix.clone());
            }
            (None, None) => {}
            _ => return Err(format!("{}: parsed/category disagree", m.raw)),
        }
    }
    ensure!(per_category.values().sum::<u64>() == parseable, "categories do not partition parseable mentions");
    let tables = catalog.urls().top_tables(100);
    ensure!(tables.parseable_mentions == parseable, "top tables parseable count");
    ensure!(
        tables.top_tlds.iter().map(|e| e.count).sum::<u64>() == parseable,
        "suffix table does not partition mentions"
    );
    ensure!(
        tables
            .top_urls_per_category
            .values()
            .flat_map(|v| v.iter().map(|e| e.count))
            .sum::<u64>()
            == parseable,
        "category tables do not partition mentions"
    );
    ensure!(suffix_set.len() == 4, "suffixes {suffix_set:?}");
    Ok(format!(
        "30-case parse table; {} mentions ({} parseable) partitioned into {} categories over {} suffixes",
        mentions.len(),
        parseable,
        per_category.len(),
        suffix_set.len()
    ))
}

// storage

pub fn store_round_trip(catalog: &Catalog, dir: &Path) -> Outcome {
    let path = dir.join("fixture.snapshot");
    let parts: &CatalogParts = catalog.parts();
    store::save_snapshot(parts, &path).map_err(|e| e.to_string())?;
    let loaded = store::load_snapshot(&path).map_err(|e| e.to_string())?;
    ensure!(&loaded == parts, "loaded snapshot differs");
    ensure!(loaded.same_content(parts), "loaded snapshot content differs");
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    ensure!(
        matches!(store::decode(&bytes[..bytes.len() / 2]), Err(store::StoreError::ChecksumMismatch)),
        "truncation not detected"
    );
    Ok(format!("{} byte snapshot round-trips content-equal", bytes.len()))
}
