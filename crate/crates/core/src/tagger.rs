//! Dictionary tagging: longest-first gazetteer matching with overlap
//! suppression, and projection of the accepted spans onto BIO token tags.
//!
//! Acceptance follows the gazetteer order. Entries are visited longest
//! first; within an entry, occurrences are visited left to right; an
//! occurrence is accepted only if it overlaps no span accepted before it.
//! Candidates for all entries are collected in one pass of an Aho-Corasick
//! automaton and then replayed in that order.

use aho_corasick::{AhoCorasick, AhoCorasickBuilder, MatchKind};
use serde::{Deserialize, Serialize};

use crate::bio::{validate_label, Tag, DEFAULT_LABEL};
use crate::corpus::{BioCorpus, TaggedSentence};
use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::ingest::LoreCorpus;
use crate::textspan::{fold_char, is_word_char_at, Sentence, SentenceSplitter, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Match anywhere, including inside longer words.
    Substring,
    /// Both ends of a match must sit on word boundaries.
    #[default]
    WordBoundary,
}

impl std::str::FromStr for MatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "substring" => Ok(MatchMode::Substring),
            "word_boundary" | "word-boundary" => Ok(MatchMode::WordBoundary),
            _ => Err(Error::Invalid(format!(
                "unknown match mode {s:?} (expected substring or word_boundary)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
    /// Sentence text in `[start, end)`, original casing.
    pub surface: String,
    pub gazetteer_key: String,
}

/// A compiled gazetteer, reusable across sentences.
#[derive(Debug, Clone)]
pub struct SpanMatcher {
    automaton: AhoCorasick,
    keys: Vec<String>,
    mode: MatchMode,
    fold: bool,
    label: String,
}

impl SpanMatcher {
    pub fn new(gazetteer: &Gazetteer, mode: MatchMode) -> Self {
        Self::with_label(gazetteer, mode, DEFAULT_LABEL).expect("default label is valid")
    }

    pub fn with_label(gazetteer: &Gazetteer, mode: MatchMode, label: &str) -> Result<Self> {
        validate_label(label)?;
        let keys: Vec<String> = gazetteer.entries().iter().map(|e| e.norm.clone()).collect();
        let automaton = AhoCorasickBuilder::new()
            .match_kind(MatchKind::Standard)
            .build(&keys)
            .map_err(|e| Error::Invalid(format!("cannot compile gazetteer: {e}")))?;
        Ok(Self {
            automaton,
            keys,
            mode,
            fold: gazetteer.case_insensitive(),
            label: label.to_string(),
        })
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn find_spans(&self, sentence_text: &str) -> Vec<EntitySpan> {
        if self.keys.is_empty() {
            return Vec::new();
        }
        let chars: Vec<char> = sentence_text.chars().collect();
        let haystack: String = if self.fold {
            chars.iter().map(|&c| fold_char(c)).collect()
        } else {
            sentence_text.to_string()
        };
        // byte offset -> char offset; folding keeps the char count unchanged
        let mut char_at = vec![0usize; haystack.len() + 1];
        let mut n = 0;
        for (b, _) in haystack.char_indices() {
            char_at[b] = n;
            n += 1;
        }
        char_at[haystack.len()] = n;

        let mut candidates: Vec<(usize, usize, usize)> = self
            .automaton
            .find_overlapping_iter(&haystack)
            .map(|m| (m.pattern().as_usize(), char_at[m.start()], char_at[m.end()]))
            .filter(|&(_, s, e)| self.mode == MatchMode::Substring || on_word_boundaries(&chars, s, e))
            .collect();
        candidates.sort_unstable();

        let mut taken = vec![false; chars.len()];
        let mut spans = Vec::new();
        for (entry, start, end) in candidates {
            if taken[start..end].iter().any(|&t| t) {
                continue;
            }
            taken[start..end].iter_mut().for_each(|t| *t = true);
            spans.push(EntitySpan {
                start,
                end,
                label: self.label.clone(),
                surface: chars[start..end].iter().collect(),
                gazetteer_key: self.keys[entry].clone(),
            });
        }
        spans.sort_by_key(|s| s.start);
        spans
    }
}

fn on_word_boundaries(chars: &[char], start: usize, end: usize) -> bool {
    (start == 0 || !is_word_char_at(chars, start - 1)) && (end == chars.len() || !is_word_char_at(chars, end))
}

/// Convenience wrapper compiling the gazetteer for a single lookup.
pub fn find_spans(sentence_text: &str, gazetteer: &Gazetteer, mode: MatchMode) -> Vec<EntitySpan> {
    SpanMatcher::new(gazetteer, mode).find_spans(sentence_text)
}

/// `B-` on the token where a span starts, `I-` on every other token the span
/// overlaps, `O` elsewhere. A token overlapping a span without starting it
/// is `I-`, even if it is the first token of that span; the result is
/// repaired to valid IOB2.
pub fn spans_to_bio(tokens: &[Token], spans: &[EntitySpan]) -> Result<Vec<Tag>> {
    let mut tags = vec![Tag::Outside; tokens.len()];
    for span in spans {
        let mut hit = false;
        for (tag, token) in tags.iter_mut().zip(tokens) {
            if token.end <= span.start || token.start >= span.end {
                continue;
            }
            hit = true;
            *tag = if token.start == span.start {
                Tag::Begin(span.label.clone())
            } else {
                Tag::Inside(span.label.clone())
            };
        }
        if !hit {
            return Err(Error::SpanWithoutTokens {
                start: span.start,
                end: span.end,
                surface: span.surface.clone(),
            });
        }
    }
    crate::bio::repair_tags(&mut tags);
    Ok(tags)
}

/// Splits, tokenizes and tags one sentence.
pub fn tag_sentence(sentence: Sentence, matcher: &SpanMatcher) -> Result<TaggedSentence> {
    let spans = matcher.find_spans(&sentence.text);
    let tags = spans_to_bio(&sentence.tokens, &spans)?;
    TaggedSentence::new(sentence, tags)
}

pub fn tag_corpus_with(corpus: &LoreCorpus, matcher: &SpanMatcher, splitter: &SentenceSplitter) -> Result<BioCorpus> {
    let mut out = BioCorpus::default();
    for doc in corpus {
        let sentences = splitter
            .split(&doc.text)
            .into_iter()
            .map(|s| tag_sentence(Sentence::new(s.text, doc.owner_name.clone()), matcher))
            .collect::<Result<Vec<_>>>()?;
        out.push_document(doc.owner_name.clone(), sentences)?;
    }
    Ok(out)
}

pub fn tag_corpus(corpus: &LoreCorpus, gazetteer: &Gazetteer, mode: MatchMode) -> Result<BioCorpus> {
    tag_corpus_with(corpus, &SpanMatcher::new(gazetteer, mode), &SentenceSplitter::default())
}
