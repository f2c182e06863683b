//! Weak-supervision NER corpus construction from entity name lists and lore
//! documents.
//!
//! The pipeline runs [`ingest`] -> [`gazetteer`] -> [`tagger`] (using
//! [`textspan`] for segmentation) -> [`corpus`]. Predictions from any token
//! classifier are scored with [`eval`], and [`assoc`] turns tagged corpora
//! into entity association graphs.

pub mod assoc;
pub mod bio;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod gazetteer;
pub mod ingest;
pub mod tagger;
pub mod textspan;

mod fsutil;

pub use assoc::{build_association_map, diff_maps, export_dot, AssociationMap, MapDiff};
pub use bio::{Tag, DEFAULT_LABEL};
pub use corpus::{
    corpus_stats, read_conll, split_corpus, write_conll, BioCorpus, ConllRead, CorpusStats, Document, SplitSpec,
    Splits, TaggedSentence,
};
pub use error::{Error, Result};
pub use eval::{extract_spans_from_bio, remap_labels, score, EvalReport, LabelMap, SpanKey, UnmappedPolicy};
pub use gazetteer::{
    build_gazetteer, compute_ignore_list, merge_name_lists, normalize_name, Gazetteer, GazetteerConfig,
};
pub use ingest::{
    filter_infobox_entities, load_infobox_records, load_lore_corpus, load_name_list, InfoboxRecord, LoreCorpus,
    LoreDocument,
};
pub use tagger::{find_spans, spans_to_bio, tag_corpus, EntitySpan, MatchMode, SpanMatcher};
pub use textspan::{split_sentences, tokenize, Sentence, Token};

pub use fsutil::write_atomic;
