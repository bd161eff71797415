//! Deterministic synthetic corpus with recorded ground truth.
//!
//! Sixty papers from five venues and twenty-five authors, three per year from
//! 2000 to 2019. Citation edges are planted by writing reference strings that
//! embed the cited id, quote the exact title, or permute a long title;
//! topic triggers and URL mentions are planted into titles, abstracts and
//! full texts from trigger-free filler vocabulary.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::corpus::PaperId;
use crate::ingest::{ResolutionStage, METADATA_FILE, REFS_DIR, TEXT_DIR};
use crate::topics::Category;

pub const PAPER_COUNT: usize = 60;
pub const FIRST_YEAR: i32 = 2000;
pub const LAST_YEAR: i32 = 2019;
/// Reference year for the ranked lists computed over the fixture.
pub const NOW_YEAR: i32 = 2019;

const SEED: u64 = 0x5EED_2019;

const VENUES: [(&str, char); 5] = [
    ("ACL", 'P'),
    ("EMNLP", 'D'),
    ("NAACL", 'N'),
    ("COLING", 'C'),
    ("LREC", 'L'),
];

const AUTHORS: [&str; 25] = [
    "José García",
    "Ann Lee",
    "Wei Zhang",
    "Priya Sharma",
    "Lars Müller",
    "Sofia Rossi",
    "Kenji Sato",
    "Amara Okafor",
    "Elena Petrova",
    "Omar Haddad",
    "Mei Chen",
    "Rahul Verma",
    "Ingrid Berg",
    "Lucas Silva",
    "Fatima Khan",
    "Jonas Weber",
    "Aiko Tanaka",
    "Diego López",
    "Nora Jensen",
    "Tomás Novák",
    "Hana Kim",
    "Ravi Iyer",
    "Chloé Martin",
    "Samuel Adeyemi",
    "Yuki Mori",
];

/// Spellings that normalize to the same key as the canonical name.
const AUTHOR_VARIANTS: [(&str, &str); 3] = [
    ("José García", "Jose  Garcia"),
    ("Lars Müller", "LARS MÜLLER"),
    ("Chloé Martin", "Chloe Martin"),
];

/// Words free of topic triggers and survey markers.
const POOL: [&str; 30] = [
    "robust", "scalable", "efficient", "graph", "lattice", "models", "under", "sparse",
    "constraints", "adaptive", "neural", "latent", "structured", "inference", "learning",
    "representations", "joint", "hierarchical", "probabilistic", "kernel", "features", "decoding",
    "alignment", "memory", "attention", "transfer", "bayesian", "incremental", "contextual",
    "lexical",
];

const FUNCTION_WORDS: [&str; 14] = [
    "we", "propose", "a", "the", "of", "and", "in", "to", "with", "results", "show", "that", "our",
    "method",
];

const SYLLABLES: [&str; 10] = ["ka", "lo", "mi", "ne", "ru", "so", "ta", "vi", "ze", "pu"];

/// (subtopic, first trigger) for every planted subtopic. Pragmatics is
/// deliberately never planted.
const PLANTABLE: [(Category, &str, &str); 12] = [
    (Category::LinguisticTarget, "Syntax", "syntactic"),
    (Category::LinguisticTarget, "Discourse", "discourse"),
    (Category::Task, "Tagging", "tagging"),
    (Category::Task, "Summarization", "summarization"),
    (Category::Task, "Chunking", "chunking"),
    (Category::Approach, "supervised", "supervised"),
    (Category::Approach, "unsupervised", "unsupervised"),
    (Category::Language, "English", "english"),
    (Category::Language, "Chinese", "chinese"),
    (Category::Language, "Hindi", "hindi"),
    (Category::DatasetType, "news", "newswire"),
    (Category::DatasetType, "clinical notes", "clinical notes"),
];

const URL_POOL: [&str; 10] = [
    "http://www.cs.cmu.edu/~ark/data",
    "https://nlp.stanford.edu/projects/glove/",
    "http://www.ox.ac.uk/research",
    "http://www.cl.cam.ac.uk/~sc609/resources.html",
    "https://aclanthology.org/P05-1015",
    "http://www.statmt.org/wmt14/",
    "https://catalog.ldc.upenn.edu/LDC2006T13",
    "https://github.com/facebookresearch/fastText",
    "http://research.microsoft.com/en-us/downloads",
    "https://www.kaggle.com/datasets",
];

const UNPARSABLE_URL: &str = "http:///broken-link";

pub const SURVEY_PAPER: usize = 7;
pub const SUMMARIZATION_PAPER: usize = 21;
pub const NEAR_MISS_TARGET: usize = 30;
pub const UNIFORM_TOPIC_PAPER: usize = 40;
pub const NEAR_MISS_CITING: usize = 50;
pub const NEAR_MISS_REFERENCE: &str = "Neural Machine Translation System.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedReference {
    pub citing: PaperId,
    pub cited: PaperId,
    pub reference: String,
    pub stage: ResolutionStage,
}

/// Everything the generator planted.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub papers: usize,
    pub venues: usize,
    pub authors: usize,
    pub years: BTreeMap<PaperId, i32>,
    /// Deduplicated planted citation edges (citing, cited).
    pub edges: BTreeSet<(PaperId, PaperId)>,
    /// Every resolvable reference line, including duplicates.
    pub planted_references: Vec<PlantedReference>,
    /// References that must stay unresolved (external works and the near miss).
    pub unresolvable_references: Vec<(PaperId, String)>,
    /// The Jaccard-0.6 near-title reference and its would-be target.
    pub near_miss: (PaperId, String, PaperId),
    pub topics: BTreeMap<PaperId, BTreeSet<(Category, String)>>,
    /// First publication year of every planted subtopic.
    pub timeline: BTreeMap<(Category, String), i32>,
    /// (paper, raw url) in text order, repeats kept.
    pub url_mentions: Vec<(PaperId, String)>,
    pub survey_paper: PaperId,
    pub summarization_paper: PaperId,
    pub uniform_topic_paper: PaperId,
}

impl GroundTruth {
    pub fn references_seen(&self) -> usize {
        self.planted_references.len() + self.unresolvable_references.len()
    }
}

#[derive(Debug, Clone)]
pub struct FixturePaper {
    pub id: PaperId,
    pub index: usize,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: String,
    pub year: i32,
    pub abstract_text: Option<String>,
    pub full_text: String,
    pub references: Vec<String>,
    pub pdf_url: Option<String>,
}

impl FixturePaper {
    pub fn metadata_line(&self) -> String {
        let mut obj = json!({
            "id": self.id.to_string(),
            "title": self.title,
            "authors": self.authors,
            "venue": self.venue,
            "year": self.year,
        });
        if let Some(a) = &self.abstract_text {
            obj["abstract"] = json!(a);
        }
        if let Some(u) = &self.pdf_url {
            obj["url"] = json!(u);
        }
        obj.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct FixtureCorpus {
    pub papers: Vec<FixturePaper>,
    pub truth: GroundTruth,
}

/// Each year's three papers go to three consecutive venues, rotating by year.
fn venue_index(i: usize) -> usize {
    (i / 3 + i % 3 + 1) % VENUES.len()
}

fn paper_id(i: usize) -> PaperId {
    let year = FIRST_YEAR + (i / 3) as i32;
    let (_, letter) = VENUES[venue_index(i)];
    PaperId::new(letter, (year % 100) as u8, 1001 + (i % 3) as u16).expect("valid fixture id")
}

fn nonce(i: usize) -> String {
    format!("{}{}dor", SYLLABLES[(i / 10) % 10], SYLLABLES[i % 10])
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next()
        .map(|f| f.to_uppercase().collect::<String>() + c.as_str())
        .unwrap_or_default()
}

fn filler_sentence(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(6..12);
    let words: Vec<&str> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                *FUNCTION_WORDS.choose(rng).unwrap()
            } else {
                *POOL.choose(rng).unwrap()
            }
        })
        .collect();
    format!("{}.", capitalize(&words.join(" ")))
}

fn author_list(i: usize) -> Vec<String> {
    let first = if i < 45 { i % 20 } else { 20 + (i - 45) % 5 };
    let mut idx = vec![first];
    if i % 3 != 0 {
        idx.push((i * 7 + 3) % 20);
    }
    if i % 4 == 0 {
        idx.push((i * 11 + 5) % 20);
    }
    idx.dedup();
    let mut seen = BTreeSet::new();
    idx.retain(|a| seen.insert(*a));
    idx.into_iter()
        .map(|a| {
            let name = AUTHORS[a];
            match AUTHOR_VARIANTS.iter().find(|(c, _)| *c == name) {
                Some((_, variant)) if i % 2 == 1 => variant.to_string(),
                _ => name.to_string(),
            }
        })
        .collect()
}

enum Placement {
    Title,
    Abstract,
    FullText(usize),
}

/// Generates the fixture in memory. Identical on every call.
pub fn generate() -> FixtureCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let ids: Vec<PaperId> = (0..PAPER_COUNT).map(paper_id).collect();
    let mut truth = GroundTruth {
        papers: PAPER_COUNT,
        venues: VENUES.len(),
        authors: AUTHORS.len(),
        survey_paper: ids[SURVEY_PAPER],
        summarization_paper: ids[SUMMARIZATION_PAPER],
        uniform_topic_paper: ids[UNIFORM_TOPIC_PAPER],
        years: BTreeMap::new(),
        edges: BTreeSet::new(),
        planted_references: Vec::new(),
        unresolvable_references: Vec::new(),
        near_miss: (ids[NEAR_MISS_CITING], String::new(), ids[NEAR_MISS_TARGET]),
        topics: BTreeMap::new(),
        timeline: BTreeMap::new(),
        url_mentions: Vec::new(),
    };

    // Titles first: references quote them.
    let mut titles = Vec::with_capacity(PAPER_COUNT);
    let mut long_title = vec![false; PAPER_COUNT];
    let mut planted: Vec<Vec<(Category, &str, &str, Placement)>> = Vec::new();
    let mut has_abstract = vec![false; PAPER_COUNT];
    for i in 0..PAPER_COUNT {
        has_abstract[i] = i % 4 != 0;
        let mut plants = Vec::new();
        match i {
            SURVEY_PAPER | NEAR_MISS_TARGET => {}
            SUMMARIZATION_PAPER => {
                plants.push((Category::Task, "Summarization", "summarization", Placement::FullText(4)));
            }
            UNIFORM_TOPIC_PAPER => {}
            _ if i % 11 == 5 => {}
            _ => {
                let n = rng.gen_range(1..=3);
                for &(cat, sub, trig) in PLANTABLE.choose_multiple(&mut rng, n) {
                    let placement = match rng.gen_range(0..3) {
                        0 => Placement::Title,
                        1 if has_abstract[i] => Placement::Abstract,
                        _ => Placement::FullText(rng.gen_range(1..=3)),
                    };
                    plants.push((cat, sub, trig, placement));
                }
            }
        }

        let title = match i {
            SURVEY_PAPER => "A Survey of Parsing".to_string(),
            NEAR_MISS_TARGET => "Neural Machine Translation Systems".to_string(),
            UNIFORM_TOPIC_PAPER => "Unsupervised Chunking for English News".to_string(),
            SUMMARIZATION_PAPER => format!("Summarization of Meeting Transcripts with {} Graphs", capitalize(&nonce(i))),
            _ => {
                long_title[i] = i % 6 == 1;
                let n_words = if long_title[i] { 9 } else { 3 };
                let words: Vec<String> = POOL
                    .choose_multiple(&mut rng, n_words)
                    .map(|w| capitalize(w))
                    .collect();
                let mut t = words.join(" ");
                let in_title: Vec<&str> = plants
                    .iter()
                    .filter(|p| matches!(p.3, Placement::Title))
                    .map(|p| p.2)
                    .collect();
                if !in_title.is_empty() {
                    t.push_str(" for ");
                    t.push_str(&in_title.iter().map(|w| capitalize(w)).collect::<Vec<_>>().join(" and "));
                }
                t.push(' ');
                t.push_str(&capitalize(&nonce(i)));
                t
            }
        };
        if i == UNIFORM_TOPIC_PAPER {
            for (cat, sub) in [
                (Category::Approach, "unsupervised"),
                (Category::Task, "Chunking"),
                (Category::Language, "English"),
                (Category::DatasetType, "news"),
            ] {
                truth.topics.entry(ids[i]).or_default().insert((cat, sub.to_string()));
            }
        }
        for p in &plants {
            truth.topics.entry(ids[i]).or_default().insert((p.0, p.1.to_string()));
        }
        titles.push(title);
        planted.push(plants);
    }

    for (id, subs) in &truth.topics {
        for key in subs {
            let year = id.year();
            let first = truth.timeline.entry(key.clone()).or_insert(year);
            *first = (*first).min(year);
        }
    }

    // Citations.
    let mut cites: Vec<Vec<usize>> = vec![Vec::new(); PAPER_COUNT];
    for (i, out) in cites.iter_mut().enumerate().skip(3) {
        let mut set = BTreeSet::new();
        set.insert(i - 3);
        if i % 2 == 0 {
            set.insert(0);
        }
        if i % 3 == 0 {
            set.insert(1);
        }
        if i % 5 == 0 {
            set.insert(2);
        }
        if i > 4 && rng.gen_bool(0.6) {
            set.insert(rng.gen_range(0..i - 3));
        }
        if i == NEAR_MISS_CITING {
            set.remove(&NEAR_MISS_TARGET);
        }
        out.extend(set);
    }

    let surname = |j: usize| {
        let first = &author_list(j)[0];
        first.split_whitespace().last().unwrap_or("Anon").to_string()
    };
    let mut style_counter = 0usize;
    let mut references: Vec<Vec<String>> = vec![Vec::new(); PAPER_COUNT];
    for i in 0..PAPER_COUNT {
        for &j in &cites[i] {
            let (venue, _) = VENUES[venue_index(j)];
            let year = ids[j].year();
            let mut styles = vec![match style_counter % 3 {
                0 => ResolutionStage::EmbeddedId,
                1 => ResolutionStage::ExactTitle,
                _ if long_title[j] => ResolutionStage::FuzzyTitle,
                _ => ResolutionStage::ExactTitle,
            }];
            style_counter += 1;
            if i % 7 == 3 && j == i - 3 {
                styles.push(ResolutionStage::EmbeddedId);
            }
            for stage in styles {
                let reference = match stage {
                    ResolutionStage::EmbeddedId => format!(
                        "{} et al. {year}. {}. In Proceedings of {venue}. Anthology {}.",
                        surname(j),
                        titles[j],
                        ids[j]
                    ),
                    ResolutionStage::ExactTitle => format!(
                        "{}, X. ({year}). {}. In Proc. of {venue}, pages 1-9.",
                        surname(j),
                        titles[j]
                    ),
                    ResolutionStage::FuzzyTitle => {
                        let mut words: Vec<&str> = titles[j].split_whitespace().collect();
                        words.rotate_left(1);
                        format!("{} {year}", words.join(" "))
                    }
                };
                truth.planted_references.push(PlantedReference {
                    citing: ids[i],
                    cited: ids[j],
                    reference: reference.clone(),
                    stage,
                });
                references[i].push(reference);
            }
            truth.edges.insert((ids[i], ids[j]));
        }
        let externals = 1 + i % 2;
        for e in 0..externals {
            let reference = format!(
                "{}, Q. {}. Foundations of Statistical Corpus Work, volume {}. Press of Elsewhere.",
                AUTHORS[(i + e * 5) % 25].split_whitespace().last().unwrap(),
                1980 + (i + e) % 20,
                i * 2 + e
            );
            truth.unresolvable_references.push((ids[i], reference.clone()));
            references[i].push(reference);
        }
        if i == NEAR_MISS_CITING {
            references[i].push(NEAR_MISS_REFERENCE.to_string());
            truth
                .unresolvable_references
                .push((ids[i], NEAR_MISS_REFERENCE.to_string()));
            truth.near_miss = (ids[i], NEAR_MISS_REFERENCE.to_string(), ids[NEAR_MISS_TARGET]);
        }
        references[i].shuffle(&mut rng);
    }

    // Texts.
    let mut papers = Vec::with_capacity(PAPER_COUNT);
    for i in 0..PAPER_COUNT {
        let abstract_text = has_abstract[i].then(|| {
            let mut sentences = vec![filler_sentence(&mut rng), filler_sentence(&mut rng)];
            for p in planted[i].iter().filter(|p| matches!(p.3, Placement::Abstract)) {
                sentences.push(format!("We address {} here.", p.2));
            }
            sentences.shuffle(&mut rng);
            sentences.join(" ")
        });

        let mut sentences: Vec<String> = (0..rng.gen_range(5..9))
            .map(|_| filler_sentence(&mut rng))
            .collect();
        for p in &planted[i] {
            if let Placement::FullText(n) = p.3 {
                for _ in 0..n {
                    sentences.push(format!("Results on {} improve.", p.2));
                }
            }
        }
        for _ in 0..(i % 4) {
            sentences.push("We apply machine translation to this task.".to_string());
        }
        if i % 5 == 2 {
            sentences.push("Neural machine translation is used.".to_string());
        }
        if i % 3 == 0 {
            let n = rng.gen_range(1..=3);
            for _ in 0..n {
                let url = URL_POOL.choose(&mut rng).unwrap().to_string();
                // Repeat some mentions within the same paper.
                let times = if rng.gen_bool(0.3) { 2 } else { 1 };
                for _ in 0..times {
                    sentences.push(format!("Resources are available (see {url})."));
                }
            }
        }
        if i == 33 {
            sentences.push(format!("A dead link {UNPARSABLE_URL} appears."));
        }
        sentences.shuffle(&mut rng);
        let full_text = sentences.join(" ");
        for sentence in full_text.split(". ") {
            for word in sentence.split_whitespace() {
                if let Some(u) = ["http://", "https://"]
                    .iter()
                    .find_map(|s| word.find(s).map(|at| &word[at..]))
                {
                    let u = u.trim_end_matches(|c| ".,;:)]}>\"'".contains(c));
                    truth.url_mentions.push((ids[i], u.to_string()));
                }
            }
        }

        let (venue, _) = VENUES[venue_index(i)];
        papers.push(FixturePaper {
            id: ids[i],
            index: i,
            title: titles[i].clone(),
            authors: author_list(i),
            venue: venue.to_string(),
            year: ids[i].year(),
            abstract_text,
            full_text,
            references: std::mem::take(&mut references[i]),
            pdf_url: (i % 2 == 0).then(|| format!("https://aclanthology.org/{}.pdf", ids[i])),
        });
        truth.years.insert(ids[i], ids[i].year());
    }

    FixtureCorpus { papers, truth }
}

impl FixtureCorpus {
    /// Writes `metadata.jsonl`, `text/` and `refs/` under `root`.
    pub fn write_to(&self, root: &Path) -> io::Result<()> {
        let text_dir = root.join(TEXT_DIR);
        let refs_dir = root.join(REFS_DIR);
        fs::create_dir_all(&text_dir)?;
        fs::create_dir_all(&refs_dir)?;
        let mut meta = String::new();
        for p in &self.papers {
            meta.push_str(&p.metadata_line());
            meta.push('\n');
            fs::write(text_dir.join(format!("{}.txt", p.id)), &p.full_text)?;
            if !p.references.is_empty() {
                fs::write(
                    refs_dir.join(format!("{}.refs.txt", p.id)),
                    p.references.join("\n") + "\n",
                )?;
            }
        }
        fs::write(root.join(METADATA_FILE), meta)
    }

    pub fn paper(&self, id: &PaperId) -> Option<&FixturePaper> {
        self.papers.iter().find(|p| &p.id == id)
    }
}

/// A 61st paper (2019) for re-ingestion tests; it cites the survey paper by id.
pub fn extra_paper() -> FixturePaper {
    let id = PaperId::new('P', 19, 1999).expect("valid id");
    FixturePaper {
        id,
        index: PAPER_COUNT,
        title: "Incremental Lattice Decoding Revisited Zorvath".to_string(),
        authors: vec!["Ann Lee".into(), "Yuki Mori".into()],
        venue: "ACL".into(),
        year: 2019,
        abstract_text: Some("We revisit lattice decoding with memory.".into()),
        full_text: "We apply machine translation to lattice decoding. See http://www.statmt.org/wmt14/ for data.".into(),
        references: vec![format!("Kim. 2002. A Survey of Parsing. {}", paper_id(SURVEY_PAPER))],
        pdf_url: None,
    }
}

/// Appends [`extra_paper`] to a written fixture directory.
pub fn append_extra_paper(root: &Path) -> io::Result<FixturePaper> {
    let p = extra_paper();
    let meta_path = root.join(METADATA_FILE);
    let mut meta = fs::read_to_string(&meta_path)?;
    meta.push_str(&p.metadata_line());
    meta.push('\n');
    fs::write(&meta_path, meta)?;
    fs::write(root.join(TEXT_DIR).join(format!("{}.txt", p.id)), &p.full_text)?;
    fs::write(
        root.join(REFS_DIR).join(format!("{}.refs.txt", p.id)),
        p.references.join("\n") + "\n",
    )?;
    Ok(p)
}
