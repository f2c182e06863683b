//! Rule-based sentence segmentation and word tokenization.
//!
//! All offsets are in characters (Unicode scalar values), not bytes. Tokens
//! never contain whitespace, so every token can be written on its own line.

use serde::{Deserialize, Serialize};

/// Lowercases a character when its lowercase form is a single character,
/// keeping a one-to-one mapping between original and folded offsets.
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}')
}

/// Whether `chars[i]` belongs to a word: letters and digits always,
/// apostrophes and hyphens only between two letters or digits.
pub fn is_word_char_at(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    if c.is_alphanumeric() {
        return true;
    }
    is_joiner(c)
        && i > 0
        && chars[i - 1].is_alphanumeric()
        && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    /// Character offset into the sentence, inclusive.
    pub start: usize,
    /// Character offset into the sentence, exclusive.
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<Token>,
    pub doc_owner: String,
}

impl Sentence {
    pub fn new(text: impl Into<String>, doc_owner: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Self {
            text,
            tokens,
            doc_owner: doc_owner.into(),
        }
    }

    /// Rebuilds a sentence from bare token strings joined by single spaces.
    /// Token strings must be non-empty and free of whitespace.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], doc_owner: impl Into<String>) -> Self {
        let mut text = String::new();
        let mut out = Vec::with_capacity(tokens.len());
        let mut pos = 0;
        for (i, t) in tokens.iter().enumerate() {
            let t = t.as_ref();
            debug_assert!(!t.is_empty() && !t.chars().any(char::is_whitespace));
            if i > 0 {
                text.push(' ');
                pos += 1;
            }
            let len = t.chars().count();
            text.push_str(t);
            out.push(Token {
                text: t.to_string(),
                start: pos,
                end: pos + len,
            });
            pos += len;
        }
        Self {
            text,
            tokens: out,
            doc_owner: doc_owner.into(),
        }
    }

    pub fn token_texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }
}

/// A sentence located in its document by character offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSlice {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

pub const DEFAULT_ABBREVIATIONS: &[&str] = &["Mr.", "Dr.", "e.g.", "i.e.", "vs."];

#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: Vec<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}' | '\u{BB}')
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
        }
    }

    /// Whitespace-delimited word ending at `end` (exclusive) is a known abbreviation.
    fn ends_with_abbreviation(&self, chars: &[char], end: usize) -> bool {
        let start = chars[..end]
            .iter()
            .rposition(|c| c.is_whitespace())
            .map_or(0, |p| p + 1);
        let word: String = chars[start..end].iter().collect();
        self.abbreviations.iter().any(|a| *a == word)
    }

    /// Splits at `.`, `!` or `?` (plus any closing quotes or brackets)
    /// followed by whitespace, and at blank lines. Sentences are trimmed; the
    /// text between consecutive sentences is whitespace only.
    pub fn split(&self, text: &str) -> Vec<SentenceSlice> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut cuts = Vec::new();
        let mut i = 0;
        while i < n {
            let c = chars[i];
            if matches!(c, '.' | '!' | '?') {
                let mut j = i + 1;
                while j < n && matches!(chars[j], '.' | '!' | '?') {
                    j += 1;
                }
                while j < n && is_closer(chars[j]) {
                    j += 1;
                }
                if j < n && chars[j].is_whitespace() && !(c == '.' && j == i + 1 && self.ends_with_abbreviation(&chars, j)) {
                    cuts.push(j);
                }
                i = j;
                continue;
            }
            if c == '\n' {
                let mut j = i + 1;
                while j < n && chars[j].is_whitespace() && chars[j] != '\n' {
                    j += 1;
                }
                if j < n && chars[j] == '\n' {
                    cuts.push(i);
                }
            }
            i += 1;
        }
        cuts.push(n);

        let mut out = Vec::new();
        let mut from = 0;
        for cut in cuts {
            if cut <= from {
                continue;
            }
            let mut s = from;
            let mut e = cut;
            while s < e && chars[s].is_whitespace() {
                s += 1;
            }
            while e > s && chars[e - 1].is_whitespace() {
                e -= 1;
            }
            if s < e {
                out.push(SentenceSlice {
                    text: chars[s..e].iter().collect(),
                    start: s,
                    end: e,
                });
            }
            from = cut;
        }
        out
    }
}

pub fn split_sentences(text: &str) -> Vec<SentenceSlice> {
    SentenceSplitter::default().split(text)
}

/// Maximal runs of word characters become one token; any other
/// non-whitespace character is a token of its own.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char_at(&chars, i) {
            while i < chars.len() && is_word_char_at(&chars, i) {
                i += 1;
            }
        } else {
            i += 1;
        }
        tokens.push(Token {
            text: chars[start..i].iter().collect(),
            start,
            end: i,
        });
    }
    tokens
}
