//! The matching dictionary: name normalization, list merging, the
//! frequency-based ignore list and longest-first ordering.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use crate::error::Result;
use crate::fsutil;
use crate::ingest::{self, LoreCorpus};
use crate::textspan::fold_char;

pub const DEFAULT_IGNORE_THRESHOLD: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GazetteerConfig {
    /// A name found in strictly more documents than this is ignored.
    pub ignore_threshold: usize,
    pub case_insensitive: bool,
}

impl Default for GazetteerConfig {
    fn default() -> Self {
        Self {
            ignore_threshold: DEFAULT_IGNORE_THRESHOLD,
            case_insensitive: true,
        }
    }
}

impl GazetteerConfig {
    pub fn normalize(&self, raw: &str) -> String {
        normalize_with(raw, self.case_insensitive)
    }
}

/// Trims, collapses internal whitespace runs to one space and case-folds.
/// An empty result means the name should be dropped.
pub fn normalize_name(raw: &str) -> String {
    normalize_with(raw, true)
}

fn normalize_with(raw: &str, fold: bool) -> String {
    let mut out = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        if fold {
            out.extend(word.chars().map(fold_char));
        } else {
            out.push_str(word);
        }
    }
    out
}

/// `a` followed by `b`, keeping the first surface form of each normalized key.
pub fn merge_name_lists<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Vec<String> {
    let mut seen = HashSet::new();
    a.iter()
        .map(AsRef::as_ref)
        .chain(b.iter().map(AsRef::as_ref))
        .filter(|name| {
            let key = normalize_name(name);
            !key.is_empty() && seen.insert(key)
        })
        .map(|name| name.trim().to_string())
        .collect()
}

/// For each distinct normalized name, the owners of the documents whose text
/// contains it as a raw substring, in corpus order.
pub fn document_presence<S: AsRef<str>>(
    corpus: &LoreCorpus,
    names: &[S],
    config: &GazetteerConfig,
) -> Vec<(String, Vec<String>)> {
    let keys: Vec<String> = {
        let mut seen = HashSet::new();
        names
            .iter()
            .map(|n| config.normalize(n.as_ref()))
            .filter(|k| !k.is_empty() && seen.insert(k.clone()))
            .collect()
    };
    let texts: Vec<String> = corpus
        .iter()
        .map(|d| {
            if config.case_insensitive {
                d.text.chars().map(fold_char).collect()
            } else {
                d.text.clone()
            }
        })
        .collect();

    keys.into_iter()
        .map(|key| {
            let owners = corpus
                .iter()
                .zip(&texts)
                .filter(|(_, text)| text.contains(key.as_str()))
                .map(|(d, _)| d.owner_name.clone())
                .collect();
            (key, owners)
        })
        .collect()
}

/// Normalized keys of names that occur in more than
/// `config.ignore_threshold` distinct documents.
pub fn compute_ignore_list<S: AsRef<str>>(
    corpus: &LoreCorpus,
    names: &[S],
    config: &GazetteerConfig,
) -> BTreeSet<String> {
    document_presence(corpus, names, config)
        .into_iter()
        .filter(|(_, owners)| owners.len() > config.ignore_threshold)
        .map(|(key, _)| key)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerEntry {
    /// First-seen original spelling.
    pub surface: String,
    pub norm: String,
}

/// Entries ordered longest normalized key first, ties ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    ignore: BTreeSet<String>,
    case_insensitive: bool,
}

impl Gazetteer {
    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn ignore(&self) -> &BTreeSet<String> {
        &self.ignore
    }

    pub fn case_insensitive(&self) -> bool {
        self.case_insensitive
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.surface.as_str())
    }

    /// Writes surface forms one per line, in match order.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fsutil::write_lines(path.as_ref(), self.surfaces())
    }

    /// Reads a name-per-line file. Order is recomputed, so hand-edited files
    /// are accepted.
    pub fn read(path: impl AsRef<Path>, config: &GazetteerConfig) -> Result<Self> {
        let names = ingest::load_name_list(path)?;
        Ok(build_gazetteer(&names, &BTreeSet::new(), config))
    }
}

/// Orders two normalized keys for matching priority.
pub fn match_order(a: &str, b: &str) -> std::cmp::Ordering {
    b.chars().count().cmp(&a.chars().count()).then_with(|| a.cmp(b))
}

pub fn build_gazetteer<S: AsRef<str>>(
    names: &[S],
    ignore: &BTreeSet<String>,
    config: &GazetteerConfig,
) -> Gazetteer {
    let mut seen = HashSet::new();
    let mut entries: Vec<GazetteerEntry> = names
        .iter()
        .map(AsRef::as_ref)
        .filter_map(|name| {
            let norm = config.normalize(name);
            if norm.is_empty() || ignore.contains(&norm) || !seen.insert(norm.clone()) {
                return None;
            }
            Some(GazetteerEntry {
                surface: name.trim().to_string(),
                norm,
            })
        })
        .collect();
    entries.sort_by(|a, b| match_order(&a.norm, &b.norm));
    Gazetteer {
        entries,
        ignore: ignore.clone(),
        case_insensitive: config.case_insensitive,
    }
}

pub fn write_ignore_list(path: impl AsRef<Path>, ignore: &BTreeSet<String>) -> Result<()> {
    fsutil::write_lines(path.as_ref(), ignore)
}

pub fn read_ignore_list(path: impl AsRef<Path>, config: &GazetteerConfig) -> Result<BTreeSet<String>> {
    Ok(ingest::load_name_list(path)?
        .iter()
        .map(|n| config.normalize(n))
        .filter(|k| !k.is_empty())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::LoreDocument;

    fn corpus(texts: &[String]) -> LoreCorpus {
        LoreCorpus::new(
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| LoreDocument {
                    owner_name: format!("Owner {i}"),
                    text: t.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    /// 40 documents, the first `hits` of which contain "impressive".
    fn imp_corpus(hits: usize) -> LoreCorpus {
        let texts: Vec<String> = (0..40)
            .map(|i| {
                if i < hits {
                    format!("The {i}th hall was impressive indeed.")
                } else {
                    format!("The {i}th hall was plain.")
                }
            })
            .collect();
        corpus(&texts)
    }

    #[test]
    fn normalize() {
        assert_eq!(normalize_name("  Steam   Mephit "), "steam mephit");
        assert_eq!(normalize_name("imp"), "imp");
        assert_eq!(normalize_name("Ettin"), normalize_name("ettin"));
        assert_eq!(normalize_name(" \t "), "");
        let cs = GazetteerConfig {
            case_insensitive: false,
            ..Default::default()
        };
        assert_eq!(cs.normalize(" Steam\tMephit"), "Steam Mephit");
    }

    #[test]
    fn merge() {
        assert_eq!(
            merge_name_lists(&["goblin", "ettin"], &["Ettin", "archdevil"]),
            ["goblin", "ettin", "archdevil"]
        );
        let empty: [&str; 0] = [];
        assert_eq!(merge_name_lists(&empty, &["imp"]), ["imp"]);
        assert_eq!(merge_name_lists(&["imp", "  ", "Imp "], &empty), ["imp"]);
    }

    #[test]
    fn ignore_threshold_is_strict() {
        let cfg = GazetteerConfig::default();
        let ignored = compute_ignore_list(&imp_corpus(31), &["imp", "hall"], &cfg);
        assert!(ignored.contains("imp"));
        // "hall" appears in all 40 documents
        assert!(ignored.contains("hall"));

        let ignored = compute_ignore_list(&imp_corpus(30), &["imp"], &cfg);
        assert!(ignored.is_empty());
    }

    #[test]
    fn ignore_counts_documents_not_occurrences() {
        let texts: Vec<String> = (0..3).map(|_| "imp imp imp imp imp imp".to_string()).collect();
        let cfg = GazetteerConfig {
            ignore_threshold: 3,
            ..Default::default()
        };
        assert!(compute_ignore_list(&corpus(&texts), &["imp"], &cfg).is_empty());
    }

    #[test]
    fn ignore_threshold_zero() {
        let texts = vec!["a goblin".to_string(), "nothing".to_string()];
        let cfg = GazetteerConfig {
            ignore_threshold: 0,
            ..Default::default()
        };
        let ignored = compute_ignore_list(&corpus(&texts), &["Goblin", "ettin"], &cfg);
        assert_eq!(ignored.into_iter().collect::<Vec<_>>(), ["goblin"]);
    }

    #[test]
    fn build_orders_longest_first() {
        let cfg = GazetteerConfig::default();
        let g = build_gazetteer(&["mephit", "steam mephit"], &BTreeSet::new(), &cfg);
        assert_eq!(g.surfaces().collect::<Vec<_>>(), ["steam mephit", "mephit"]);

        let ignore: BTreeSet<String> = ["imp".to_string()].into();
        let g = build_gazetteer(&["ape", "imp"], &ignore, &cfg);
        assert_eq!(g.surfaces().collect::<Vec<_>>(), ["ape"]);

        let g = build_gazetteer(&["dog", "cat"], &BTreeSet::new(), &cfg);
        assert_eq!(g.surfaces().collect::<Vec<_>>(), ["cat", "dog"]);
    }

    #[test]
    fn build_dedupes_keeping_first_surface() {
        let cfg = GazetteerConfig::default();
        let g = build_gazetteer(&["Ettin", "ettin", "", "  "], &BTreeSet::new(), &cfg);
        assert_eq!(g.len(), 1);
        assert_eq!(g.entries()[0].surface, "Ettin");
        assert_eq!(g.entries()[0].norm, "ettin");
    }

    #[test]
    fn gazetteer_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GazetteerConfig::default();
        let g = build_gazetteer(&["imp", "Steam Mephit", "ogre"], &BTreeSet::new(), &cfg);
        let path = dir.path().join("gazetteer.txt");
        g.write(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "Steam Mephit\nogre\nimp\n");
        assert_eq!(Gazetteer::read(&path, &cfg).unwrap(), g);

        let ignore: BTreeSet<String> = ["imp".into(), "steam mephit".into()].into();
        let ipath = dir.path().join("ignore.txt");
        write_ignore_list(&ipath, &ignore).unwrap();
        assert_eq!(read_ignore_list(&ipath, &cfg).unwrap(), ignore);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn name() -> impl Strategy<Value = String> {
            "[A-Ca-c]{1,4}( [a-c]{1,3}){0,2}"
        }

        proptest! {
            #[test]
            fn ignore_list_is_monotone(
                texts in prop::collection::vec("[a-c ]{0,30}", 1..12),
                names in prop::collection::vec(name(), 1..8),
            ) {
                let c = corpus(&texts);
                let lists: Vec<BTreeSet<String>> = (0..=12)
                    .map(|t| compute_ignore_list(&c, &names, &GazetteerConfig { ignore_threshold: t, ..Default::default() }))
                    .collect();
                for w in lists.windows(2) {
                    prop_assert!(w[1].is_subset(&w[0]));
                }
            }

            #[test]
            fn merge_is_idempotent(names in prop::collection::vec(name(), 0..12)) {
                let once = merge_name_lists(&names, &names);
                let empty: [&str; 0] = [];
                prop_assert_eq!(merge_name_lists(&once, &once), once.clone());
                prop_assert_eq!(merge_name_lists(&names, &empty), once);
            }

            #[test]
            fn build_invariants(
                names in prop::collection::vec(name(), 0..20),
                ignore in prop::collection::btree_set("[a-c]{1,3}", 0..4),
            ) {
                let g = build_gazetteer(&names, &ignore, &GazetteerConfig::default());
                for w in g.entries().windows(2) {
                    let (a, b) = (&w[0].norm, &w[1].norm);
                    let (la, lb) = (a.chars().count(), b.chars().count());
                    prop_assert!(la > lb || (la == lb && a < b));
                }
                for e in g.entries() {
                    prop_assert!(!e.norm.is_empty());
                    prop_assert!(!ignore.contains(&e.norm));
                }
            }
        }
    }
}
