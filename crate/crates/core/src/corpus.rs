//! BIO corpora: the container, document-preserving splits, CoNLL-style
//! serialization and counts.
//!
//! File layout written by [`write_conll`]:
//!
//! ```text
//! # doc: Goblin
//! A O
//! goblin B-MONS
//! . O
//!
//! # doc: Ettin
//! ...
//! ```
//!
//! Every sentence is followed by one blank line. Each document starts with a
//! `# doc: <owner>` line; documents without sentences are kept as a bare
//! marker line. Only tokens and tags are stored, so sentences read back are
//! rebuilt with single spaces between tokens.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::Add;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bio::{self, Tag};
use crate::error::{Error, Result};
use crate::eval::extract_spans_from_bio;
use crate::fsutil;
use crate::gazetteer::normalize_name;
use crate::textspan::Sentence;

pub const DOC_MARKER: &str = "# doc: ";

/// Owner used for sentences read from a file without document markers.
pub const ANONYMOUS_OWNER: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub sentence: Sentence,
    pub tags: Vec<Tag>,
}

impl TaggedSentence {
    pub fn new(sentence: Sentence, tags: Vec<Tag>) -> Result<Self> {
        if tags.len() != sentence.tokens.len() {
            return Err(Error::TagCountMismatch {
                tags: tags.len(),
                tokens: sentence.tokens.len(),
            });
        }
        if !bio::is_well_formed(&tags) {
            return Err(Error::Invalid(format!(
                "malformed BIO sequence in sentence {:?}",
                sentence.text
            )));
        }
        Ok(Self { sentence, tags })
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentence.token_texts()
    }

    /// The same tokens and tags on a sentence rebuilt from its tokens.
    pub fn canonical(&self) -> Self {
        let tokens: Vec<&str> = self.tokens().collect();
        Self {
            sentence: Sentence::from_tokens(&tokens, self.sentence.doc_owner.clone()),
            tags: self.tags.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub owner: String,
    pub sentences: Vec<TaggedSentence>,
}

/// Documents in order, owners unique ignoring case.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BioCorpus {
    documents: Vec<Document>,
}

impl BioCorpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut corpus = Self::default();
        for doc in documents {
            corpus.push_document(doc.owner, doc.sentences)?;
        }
        Ok(corpus)
    }

    pub fn push_document(&mut self, owner: String, sentences: Vec<TaggedSentence>) -> Result<()> {
        let key = normalize_name(&owner);
        if key.is_empty() || owner.contains(['\n', '\r']) || owner != owner.trim() {
            return Err(Error::InvalidOwner(owner));
        }
        if self.documents.iter().any(|d| normalize_name(&d.owner) == key) {
            return Err(Error::Invalid(format!("duplicate document owner {owner:?}")));
        }
        self.documents.push(Document { owner, sentences });
        Ok(())
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// All sentences in document order.
    pub fn sentences(&self) -> impl Iterator<Item = &TaggedSentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn n_sentences(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    /// Same corpus with every sentence rebuilt from its tokens, which is
    /// exactly what survives a CoNLL round trip.
    pub fn canonical(&self) -> Self {
        Self {
            documents: self
                .documents
                .iter()
                .map(|d| Document {
                    owner: d.owner.clone(),
                    sentences: d.sentences.iter().map(TaggedSentence::canonical).collect(),
                })
                .collect(),
        }
    }

    /// Applies `f` to every tag sequence, then repairs the result.
    pub fn map_tags(&self, mut f: impl FnMut(&Tag) -> Tag) -> Self {
        Self {
            documents: self
                .documents
                .iter()
                .map(|d| Document {
                    owner: d.owner.clone(),
                    sentences: d
                        .sentences
                        .iter()
                        .map(|s| {
                            let mut tags: Vec<Tag> = s.tags.iter().map(&mut f).collect();
                            bio::repair_tags(&mut tags);
                            TaggedSentence {
                                sentence: s.sentence.clone(),
                                tags,
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// splits

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    /// Train, dev and test fractions.
    pub ratios: [f64; 3],
    pub shuffle_seed: Option<u64>,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            ratios: [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
            shuffle_seed: None,
        }
    }
}

impl SplitSpec {
    pub fn new(ratios: [f64; 3], shuffle_seed: Option<u64>) -> Result<Self> {
        let spec = Self { ratios, shuffle_seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidSplit(format!("{:?} has a negative or non-finite ratio", self.ratios)));
        }
        let sum: f64 = self.ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!("{:?} sums to {sum}, expected 1", self.ratios)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    pub train: BioCorpus,
    pub dev: BioCorpus,
    pub test: BioCorpus,
}

impl Splits {
    pub fn named(&self) -> [(&'static str, &BioCorpus); 3] {
        [("train", &self.train), ("dev", &self.dev), ("test", &self.test)]
    }
}

/// Assigns whole documents to train, dev and test so that each split holds
/// close to its share of sentences.
///
/// Documents are taken in order (after an optional seeded shuffle). With
/// `before` the number of sentences in earlier documents and `B_i` the
/// cumulative quota `(r_1 + ... + r_i) * total`, a document goes to the
/// first split with `before < B_i`. Each split then ends within one
/// document of its cumulative quota, so its size differs from its own quota
/// by less than the largest document.
pub fn split_corpus(corpus: &BioCorpus, spec: &SplitSpec) -> Result<Splits> {
    spec.validate()?;
    let mut order: Vec<usize> = (0..corpus.documents.len()).collect();
    if let Some(seed) = spec.shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let total = corpus.n_sentences() as f64;
    let mut bounds = [0.0; 3];
    let mut acc = 0.0;
    for (b, r) in bounds.iter_mut().zip(spec.ratios) {
        acc += r;
        *b = acc * total;
    }
    // the last non-empty split absorbs rounding and trailing empty documents
    let last = spec.ratios.iter().rposition(|r| *r > 0.0).unwrap_or(2);
    bounds[last] = f64::INFINITY;

    let mut parts: [Vec<Document>; 3] = Default::default();
    let mut before = 0usize;
    for i in order {
        let doc = &corpus.documents[i];
        let slot = bounds
            .iter()
            .position(|b| (before as f64) < *b)
            .unwrap_or(last);
        parts[slot].push(doc.clone());
        before += doc.sentences.len();
    }

    let [train, dev, test] = parts.map(|documents| BioCorpus { documents });
    for (name, part) in [("train", &train), ("dev", &dev), ("test", &test)] {
        if part.n_sentences() == 0 {
            log::warn!("{name} split is empty");
        }
    }
    Ok(Splits { train, dev, test })
}

// ---------------------------------------------------------------------------
// CoNLL serialization

pub fn to_conll_string(corpus: &BioCorpus) -> Result<String> {
    let mut out = String::new();
    for doc in &corpus.documents {
        if doc.owner.contains(['\n', '\r']) {
            return Err(Error::InvalidOwner(doc.owner.clone()));
        }
        out.push_str(DOC_MARKER);
        out.push_str(&doc.owner);
        out.push('\n');
        for s in &doc.sentences {
            if s.tags.len() != s.sentence.tokens.len() {
                return Err(Error::TagCountMismatch {
                    tags: s.tags.len(),
                    tokens: s.sentence.tokens.len(),
                });
            }
            for (token, tag) in s.sentence.tokens.iter().zip(&s.tags) {
                if token.text.is_empty() || token.text.chars().any(char::is_whitespace) {
                    return Err(Error::Invalid(format!("token {:?} cannot be serialized", token.text)));
                }
                let _ = writeln!(out, "{} {}", token.text, tag);
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_conll(corpus: &BioCorpus, path: impl AsRef<Path>) -> Result<()> {
    let text = to_conll_string(corpus)?;
    fsutil::write_atomic(path.as_ref(), text.as_bytes())
}

/// A parsed corpus plus the number of tags rewritten from `I-X` to `B-X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllRead {
    pub corpus: BioCorpus,
    pub repairs: usize,
}

struct ConllBuilder {
    documents: Vec<Document>,
    owners: HashSet<String>,
    tokens: Vec<String>,
    tags: Vec<Tag>,
    repairs: usize,
}

impl ConllBuilder {
    fn flush_sentence(&mut self) {
        if self.tokens.is_empty() {
            return;
        }
        if self.documents.is_empty() {
            self.documents.push(Document {
                owner: ANONYMOUS_OWNER.to_string(),
                sentences: Vec::new(),
            });
        }
        let doc = self.documents.last_mut().expect("document exists");
        let mut tags = std::mem::take(&mut self.tags);
        self.repairs += bio::repair_tags(&mut tags);
        let sentence = Sentence::from_tokens(&self.tokens, doc.owner.clone());
        self.tokens.clear();
        doc.sentences.push(TaggedSentence { sentence, tags });
    }
}

/// Parses the format produced by [`write_conll`]. Tokens and tags may be
/// separated by any run of spaces or tabs. `#` lines other than document
/// markers are skipped unless they parse as a token line.
pub fn parse_conll(text: &str, path: &Path) -> Result<ConllRead> {
    let mut b = ConllBuilder {
        documents: Vec::new(),
        owners: HashSet::new(),
        tokens: Vec::new(),
        tags: Vec::new(),
        repairs: 0,
    };
    let err = |line: usize, message: String| Error::Conll {
        path: path.to_path_buf(),
        line,
        message,
    };

    for (i, raw) in text.split('\n').enumerate() {
        let lineno = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(owner) = line.strip_prefix(DOC_MARKER) {
            b.flush_sentence();
            let key = normalize_name(owner);
            if key.is_empty() || owner != owner.trim() {
                return Err(err(lineno, format!("invalid document owner {owner:?}")));
            }
            if !b.owners.insert(key) {
                return Err(err(lineno, format!("duplicate document owner {owner:?}")));
            }
            b.documents.push(Document {
                owner: owner.to_string(),
                sentences: Vec::new(),
            });
            continue;
        }
        if line.trim().is_empty() {
            b.flush_sentence();
            continue;
        }
        let fields: Vec<&str> = line.split([' ', '\t']).filter(|f| !f.is_empty()).collect();
        if line.starts_with('#') && fields.len() != 2 {
            continue;
        }
        if fields.len() != 2 {
            return Err(err(lineno, format!("expected 2 fields, found {}", fields.len())));
        }
        if fields[0].chars().any(char::is_whitespace) {
            return Err(err(lineno, format!("token {:?} contains whitespace", fields[0])));
        }
        let tag: Tag = fields[1].parse().map_err(|e: Error| err(lineno, e.to_string()))?;
        b.tokens.push(fields[0].to_string());
        b.tags.push(tag);
    }
    b.flush_sentence();

    if b.repairs > 0 {
        log::warn!("{}: repaired {} malformed I- tags", path.display(), b.repairs);
    }
    Ok(ConllRead {
        corpus: BioCorpus { documents: b.documents },
        repairs: b.repairs,
    })
}

pub fn read_conll(path: impl AsRef<Path>) -> Result<ConllRead> {
    let path = path.as_ref();
    let text = fsutil::read_utf8(path)?;
    parse_conll(&text, path)
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: usize,
    pub n_sentences: usize,
    pub n_tokens: usize,
    pub n_spans: usize,
    pub spans_per_label: BTreeMap<String, usize>,
}

impl CorpusStats {
    /// Flat `key -> number` entries, labels as `spans.<LABEL>`.
    pub fn flat(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::from([
            ("n_documents".to_string(), self.n_documents),
            ("n_sentences".to_string(), self.n_sentences),
            ("n_tokens".to_string(), self.n_tokens),
            ("n_spans".to_string(), self.n_spans),
        ]);
        for (label, n) in &self.spans_per_label {
            out.insert(format!("spans.{label}"), *n);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.flat()).expect("map of numbers serializes")
    }
}

impl Add for CorpusStats {
    type Output = CorpusStats;

    fn add(mut self, rhs: CorpusStats) -> CorpusStats {
        self.n_documents += rhs.n_documents;
        self.n_sentences += rhs.n_sentences;
        self.n_tokens += rhs.n_tokens;
        self.n_spans += rhs.n_spans;
        for (label, n) in rhs.spans_per_label {
            *self.spans_per_label.entry(label).or_default() += n;
        }
        self
    }
}

pub fn corpus_stats(corpus: &BioCorpus) -> CorpusStats {
    let mut stats = CorpusStats {
        n_documents: corpus.documents.len(),
        ..Default::default()
    };
    for s in corpus.sentences() {
        stats.n_sentences += 1;
        stats.n_tokens += s.tags.len();
        for span in extract_spans_from_bio(&s.tags).spans {
            stats.n_spans += 1;
            *stats.spans_per_label.entry(span.label).or_default() += 1;
        }
    }
    stats
}
