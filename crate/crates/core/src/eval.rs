//! Exact-match span scoring over BIO corpora.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bio::{self, validate_label, Tag};
use crate::corpus::BioCorpus;
use crate::error::{Error, Result};

/// A decoded span within one sentence, token indices end-exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecodedSpans {
    pub spans: Vec<TokenSpan>,
    pub repairs: usize,
}

/// Decodes IOB2 tags into maximal `B-X (I-X)*` runs. Malformed `I-X` tags
/// are read as `B-X` and counted.
pub fn extract_spans_from_bio(tags: &[Tag]) -> DecodedSpans {
    let mut out = DecodedSpans::default();
    let mut open: Option<TokenSpan> = None;
    for (i, tag) in tags.iter().enumerate() {
        let begins = match tag {
            Tag::Outside => {
                out.spans.extend(open.take());
                continue;
            }
            Tag::Begin(_) => true,
            Tag::Inside(_) => {
                let malformed = bio::is_malformed_at(tags, i)
                    || open.as_ref().map(|s| s.label.as_str()) != tag.label();
                out.repairs += usize::from(bio::is_malformed_at(tags, i));
                malformed
            }
        };
        if begins {
            out.spans.extend(open.take());
            open = Some(TokenSpan {
                start: i,
                end: i + 1,
                label: tag.label().unwrap_or_default().to_string(),
            });
        } else if let Some(span) = open.as_mut() {
            span.end = i + 1;
        }
    }
    out.spans.extend(open);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanKey {
    pub sentence_index: usize,
    pub token_start: usize,
    pub token_end: usize,
    pub label: String,
}

/// Every span in the corpus keyed by global sentence ordinal.
pub fn corpus_spans(corpus: &BioCorpus) -> BTreeSet<SpanKey> {
    corpus
        .sentences()
        .enumerate()
        .flat_map(|(i, s)| {
            extract_spans_from_bio(&s.tags).spans.into_iter().map(move |sp| SpanKey {
                sentence_index: i,
                token_start: sp.start,
                token_end: sp.end,
                label: sp.label,
            })
        })
        .collect()
}

/// Counts and metrics as fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, zero when both inputs are zero. Works for fractions or
/// percentages alike.
pub fn f1_from_pr(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Rounds a fraction to a percentage with two decimals.
pub fn percent(x: f64) -> f64 {
    (x * 10_000.0).round() / 100.0
}

impl EvalReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: f1_from_pr(precision, recall),
        }
    }

    /// JSON with counts and two-decimal percentages.
    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"tp\": {},\n  \"fp\": {},\n  \"fn\": {},\n  \"precision\": {:.2},\n  \"recall\": {:.2},\n  \"f1\": {:.2}\n}}",
            self.tp,
            self.fp,
            self.fn_,
            self.precision * 100.0,
            self.recall * 100.0,
            self.f1 * 100.0
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.2} R={:.2} F1={:.2} (tp={} fp={} fn={})",
            self.precision * 100.0,
            self.recall * 100.0,
            self.f1 * 100.0,
            self.tp,
            self.fp,
            self.fn_
        )
    }
}

fn check_alignment(pred: &BioCorpus, gold: &BioCorpus) -> Result<()> {
    let mut p = pred.sentences();
    let mut g = gold.sentences();
    let mut index = 0;
    loop {
        match (p.next(), g.next()) {
            (None, None) => return Ok(()),
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::TokenMismatch {
                    sentence: index,
                    detail: format!(
                        "sentence counts differ (pred {}, gold {})",
                        pred.n_sentences(),
                        gold.n_sentences()
                    ),
                })
            }
            (Some(ps), Some(gs)) => {
                let pt: Vec<&str> = ps.tokens().collect();
                let gt: Vec<&str> = gs.tokens().collect();
                if let Some(k) = (0..pt.len().max(gt.len())).find(|&k| pt.get(k) != gt.get(k)) {
                    return Err(Error::TokenMismatch {
                        sentence: index,
                        detail: format!(
                            "token {k}: pred {:?}, gold {:?}",
                            pt.get(k).copied().unwrap_or("<end>"),
                            gt.get(k).copied().unwrap_or("<end>")
                        ),
                    });
                }
            }
        }
        index += 1;
    }
}

/// Exact (sentence, token range, label) matching. With `target_labels`,
/// spans of other labels are dropped from both sides first.
pub fn score(pred: &BioCorpus, gold: &BioCorpus, target_labels: Option<&BTreeSet<String>>) -> Result<EvalReport> {
    check_alignment(pred, gold)?;
    let keep = |k: &SpanKey| target_labels.map_or(true, |t| t.contains(&k.label));
    let p: BTreeSet<SpanKey> = corpus_spans(pred).into_iter().filter(keep).collect();
    let g: BTreeSet<SpanKey> = corpus_spans(gold).into_iter().filter(keep).collect();
    let tp = p.intersection(&g).count();
    Ok(EvalReport::from_counts(tp, p.len() - tp, g.len() - tp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnmappedPolicy {
    #[default]
    DropToO,
    Keep,
}

impl std::str::FromStr for UnmappedPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" | "drop_to_o" | "drop-to-o" => Ok(UnmappedPolicy::DropToO),
            "keep" => Ok(UnmappedPolicy::Keep),
            _ => Err(Error::Invalid(format!("unknown unmapped policy {s:?} (expected drop or keep)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelMap {
    pub mapping: BTreeMap<String, String>,
    pub unmapped_policy: UnmappedPolicy,
}

impl LabelMap {
    pub fn new<I, A, B>(pairs: I, unmapped_policy: UnmappedPolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mapping: BTreeMap<String, String> = pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        for target in mapping.values() {
            validate_label(target)?;
        }
        Ok(Self {
            mapping,
            unmapped_policy,
        })
    }

    /// The zero-shot protocol: person predictions count as the domain label,
    /// everything else is dropped.
    pub fn zero_shot(target: &str) -> Result<Self> {
        Self::new([("PER", target)], UnmappedPolicy::DropToO)
    }

    pub fn apply(&self, tag: &Tag) -> Tag {
        match tag.label() {
            None => Tag::Outside,
            Some(label) => match (self.mapping.get(label), self.unmapped_policy) {
                (Some(target), _) => tag.with_label(target),
                (None, UnmappedPolicy::Keep) => tag.clone(),
                (None, UnmappedPolicy::DropToO) => Tag::Outside,
            },
        }
    }
}

/// Relabels every tag, keeping B/I positions, then repairs the sequences.
pub fn remap_labels(corpus: &BioCorpus, map: &LabelMap) -> BioCorpus {
    corpus.map_tags(|t| map.apply(t))
}
