//! Association maps (mentioned entity -> owners of the lore mentioning it),
//! map diffs and Graphviz export.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::BioCorpus;
use crate::error::{Error, Result};
use crate::eval::extract_spans_from_bio;
use crate::fsutil;
use crate::gazetteer::{document_presence, normalize_name, GazetteerConfig};
use crate::ingest::LoreCorpus;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssociationMap {
    /// Mentioned entity -> distinct owners, in first-mention order.
    pub entries: BTreeMap<String, Vec<String>>,
    pub include_self: bool,
}

/// Collects (mention, owner) pairs, deduplicated on normalized names.
struct MapBuilder {
    include_self: bool,
    /// normalized name -> display name
    canonical: HashMap<String, String>,
    entries: BTreeMap<String, Vec<String>>,
    seen: BTreeSet<(String, String)>,
}

impl MapBuilder {
    fn new<'a>(owners: impl IntoIterator<Item = &'a str>, include_self: bool) -> Self {
        Self {
            include_self,
            canonical: owners.into_iter().map(|o| (normalize_name(o), o.to_string())).collect(),
            entries: BTreeMap::new(),
            seen: BTreeSet::new(),
        }
    }

    fn add(&mut self, mention: &str, owner: &str) {
        let m = normalize_name(mention);
        let o = normalize_name(owner);
        if m.is_empty() || (!self.include_self && m == o) || !self.seen.insert((m.clone(), o)) {
            return;
        }
        let name = self.canonical.entry(m).or_insert_with(|| mention.to_string()).clone();
        self.entries.entry(name).or_default().push(owner.to_string());
    }

    fn finish(self) -> AssociationMap {
        AssociationMap {
            entries: self.entries,
            include_self: self.include_self,
        }
    }
}

impl AssociationMap {
    /// Every (entity, owner) pair, normalized.
    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        self.entries
            .iter()
            .flat_map(|(e, owners)| owners.iter().map(move |o| (normalize_name(e), normalize_name(o))))
            .collect()
    }

    pub fn n_pairs(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("string map serializes")
    }

    /// Parses an `{entity: [owners]}` object. `include_self` is set when any
    /// entity lists itself.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("association map: {e}")))?;
        let mut b = MapBuilder::new(raw.keys().map(String::as_str), true);
        for (entity, owners) in &raw {
            for owner in owners {
                b.add(entity, owner);
            }
        }
        let mut map = b.finish();
        map.include_self = map.pairs().iter().any(|(e, o)| e == o);
        Ok(map)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        fsutil::write_atomic(path.as_ref(), text.as_bytes())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fsutil::read_utf8(path)?).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Span surface text: the covered tokens, space separated.
fn span_surface(tokens: &[&str], start: usize, end: usize) -> String {
    tokens[start..end].join(" ")
}

/// Links each document owner to every distinct entity tagged in its lore.
/// Mentions matching a document owner are displayed with the owner's
/// spelling.
pub fn build_association_map(corpus: &BioCorpus, include_self: bool) -> AssociationMap {
    let mut b = MapBuilder::new(corpus.documents().iter().map(|d| d.owner.as_str()), include_self);
    for doc in corpus.documents() {
        for s in &doc.sentences {
            let tokens: Vec<&str> = s.tokens().collect();
            for span in extract_spans_from_bio(&s.tags).spans {
                b.add(&span_surface(&tokens, span.start, span.end), &doc.owner);
            }
        }
    }
    b.finish()
}

/// The raw text-lookup map: a name is linked to every document containing it
/// as a substring, the same counting used for the ignore list.
pub fn lookup_association_map<S: AsRef<str>>(
    corpus: &LoreCorpus,
    names: &[S],
    config: &GazetteerConfig,
    include_self: bool,
) -> AssociationMap {
    let mut b = MapBuilder::new(corpus.iter().map(|d| d.owner_name.as_str()), include_self);
    let mut display: HashMap<String, &str> = HashMap::new();
    for n in names {
        display.entry(config.normalize(n.as_ref())).or_insert(n.as_ref().trim());
    }
    for (key, owners) in document_presence(corpus, names, config) {
        for owner in owners {
            b.add(display[&key], &owner);
        }
    }
    b.finish()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDiff {
    pub only_in_a: BTreeMap<String, Vec<String>>,
    pub only_in_b: BTreeMap<String, Vec<String>>,
    pub common: usize,
}

impl MapDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diff serializes")
    }
}

fn one_sided(a: &AssociationMap, other: &BTreeSet<(String, String)>) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (entity, owners) in &a.entries {
        let e = normalize_name(entity);
        for owner in owners {
            if !other.contains(&(e.clone(), normalize_name(owner))) {
                out.entry(entity.clone()).or_default().push(owner.clone());
            }
        }
    }
    out
}

/// Set difference over normalized (entity, owner) pairs, grouped by entity
/// under each map's own spelling.
pub fn diff_maps(a: &AssociationMap, b: &AssociationMap) -> MapDiff {
    let pa = a.pairs();
    let pb = b.pairs();
    MapDiff {
        only_in_a: one_sided(a, &pb),
        only_in_b: one_sided(b, &pa),
        common: pa.intersection(&pb).count(),
    }
}

fn dot_id(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz digraph with an `owner -> mentioned` edge per pair. Nodes and
/// edges are sorted.
pub fn export_dot(map: &AssociationMap) -> String {
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for (entity, owners) in &map.entries {
        nodes.insert(entity.as_str());
        for owner in owners {
            nodes.insert(owner.as_str());
            edges.insert((owner.as_str(), entity.as_str()));
        }
    }
    if nodes.is_empty() {
        return "digraph assoc {}\n".to_string();
    }
    let mut out = String::from("digraph assoc {\n");
    for n in &nodes {
        let _ = writeln!(out, "  {};", dot_id(n));
    }
    for (from, to) in &edges {
        let _ = writeln!(out, "  {} -> {};", dot_id(from), dot_id(to));
    }
    out.push_str("}\n");
    out
}
