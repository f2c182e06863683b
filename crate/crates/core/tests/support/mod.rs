//! Independent reference implementations and generators shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use lorener::textspan::Sentence;
use lorener::{BioCorpus, Document, Tag, TaggedSentence};
use rand::seq::SliceRandom;
use rand::Rng;

/// Reference span: (start, end, gazetteer index) in character offsets.
pub type OracleSpan = (usize, usize, usize);

fn lower(c: char) -> char {
    let l: Vec<char> = c.to_lowercase().collect();
    if l.len() == 1 {
        l[0]
    } else {
        c
    }
}

fn word_char(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    if c.is_alphanumeric() {
        return true;
    }
    let joiner = c == '\'' || c == '\u{2019}' || c == '-' || c == '\u{2010}';
    joiner && i >= 1 && i + 1 < chars.len() && chars[i - 1].is_alphanumeric() && chars[i + 1].is_alphanumeric()
}

/// Brute force: every entry in priority order, every start position left to
/// right, accepted when it overlaps nothing accepted before.
pub fn oracle_spans(sentence: &str, entries: &[String], word_boundary: bool) -> Vec<OracleSpan> {
    let text: Vec<char> = sentence.chars().collect();
    let mut accepted: Vec<OracleSpan> = Vec::new();
    for (k, entry) in entries.iter().enumerate() {
        let pat: Vec<char> = entry.chars().collect();
        if pat.is_empty() || pat.len() > text.len() {
            continue;
        }
        for start in 0..=text.len() - pat.len() {
            let end = start + pat.len();
            let hit = (0..pat.len()).all(|j| lower(text[start + j]) == lower(pat[j]));
            if !hit {
                continue;
            }
            if word_boundary {
                let left_ok = start == 0 || !word_char(&text, start - 1);
                let right_ok = end == text.len() || !word_char(&text, end);
                if !(left_ok && right_ok) {
                    continue;
                }
            }
            if accepted.iter().all(|&(s, e, _)| end <= s || start >= e) {
                accepted.push((start, end, k));
            }
        }
    }
    accepted.sort();
    accepted
}

/// Priority order of a raw name list: longest normalized key first, ties
/// ascending, duplicates by key removed.
pub fn oracle_order(names: &[String]) -> Vec<String> {
    let mut keys: Vec<String> = names
        .iter()
        .map(|n| n.split_whitespace().collect::<Vec<_>>().join(" ").chars().map(lower).collect::<String>())
        .filter(|k| !k.is_empty())
        .collect();
    keys.sort();
    keys.dedup();
    keys.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
    keys
}

const VOCAB: &[&str] = &[
    "imp", "impressive", "ape", "drake", "dragon", "mephit", "steam", "ogre", "ogres", "goblin", "hob", "hobgoblin",
    "the", "a", "of", "red", "dust", "devil", "owl", "bear", "owlbear", "Imp", "DRAGON", "Steam", "half-orc",
    "orc", "x", "xa", "ax",
];
const PUNCT: &[&str] = &[".", ",", "'s", "!", "-", "(", ")"];

/// A random lore-like sentence of at most `max_tokens` words and the name
/// list to match against it.
pub fn random_instance<R: Rng>(rng: &mut R, max_tokens: usize, max_names: usize) -> (String, Vec<String>) {
    let n_tokens = rng.gen_range(0..=max_tokens);
    let mut sentence = String::new();
    for i in 0..n_tokens {
        if i > 0 {
            let sep = if rng.gen_bool(0.1) { "" } else { " " };
            sentence.push_str(sep);
        }
        if rng.gen_bool(0.15) {
            sentence.push_str(PUNCT.choose(rng).unwrap());
        } else {
            sentence.push_str(VOCAB.choose(rng).unwrap());
        }
    }
    let n_names = rng.gen_range(0..=max_names);
    let names = (0..n_names)
        .map(|_| {
            let words = rng.gen_range(1..=4);
            (0..words).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
        })
        .collect();
    (sentence, names)
}

const TOKENS: &[&str] = &["the", "goblin", "Ettin", ".", ",", "#", "owlbear's", "half-orc", "é", "42", "\"", "drake"];
const LABELS: &[&str] = &["MONS", "PER", "LOC"];

/// A random well-formed tagged sentence.
pub fn random_sentence<R: Rng>(rng: &mut R, owner: &str, max_tokens: usize) -> TaggedSentence {
    let n = rng.gen_range(1..=max_tokens);
    let tokens: Vec<&str> = (0..n).map(|_| *TOKENS.choose(rng).unwrap()).collect();
    let mut tags = Vec::with_capacity(n);
    for i in 0..n {
        let r: f64 = rng.gen();
        let tag = match (&tags.last(), r) {
            (_, r) if r < 0.55 => Tag::Outside,
            (Some(Tag::Begin(l)) | Some(Tag::Inside(l)), r) if r < 0.8 => Tag::Inside(l.clone()),
            _ => Tag::Begin(LABELS.choose(rng).unwrap().to_string()),
        };
        let _ = i;
        tags.push(tag);
    }
    TaggedSentence::new(Sentence::from_tokens(&tokens, owner), tags).unwrap()
}

/// A random corpus with canonical sentences, some documents empty.
pub fn random_corpus<R: Rng>(rng: &mut R, max_docs: usize, max_sentences: usize) -> BioCorpus {
    let n_docs = rng.gen_range(1..=max_docs);
    let docs = (0..n_docs)
        .map(|d| {
            let owner = format!("Monster {d}");
            let n = rng.gen_range(0..=max_sentences);
            Document {
                sentences: (0..n).map(|_| random_sentence(rng, &owner, 12)).collect(),
                owner,
            }
        })
        .collect();
    BioCorpus::new(docs).unwrap()
}
