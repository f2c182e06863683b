//! Loading of lore documents, entity name lists and wiki infobox dumps.
//!
//! All loaders consume files that were collected offline. Lore files are a
//! single flat JSON object (`{"Owner Name": "lore text", ...}`), name lists
//! are plain text with one name per line, and infobox dumps are a JSON array
//! of `{"page": ..., "<key>": "<value>", ...}` objects.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::de::{Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fsutil;
use crate::gazetteer::normalize_name;

/// One lore text and the entity it describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoreDocument {
    pub owner_name: String,
    pub text: String,
}

/// Lore documents in file order. Owner names are unique ignoring case.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoreCorpus {
    documents: Vec<LoreDocument>,
}

impl LoreCorpus {
    /// Builds a corpus, rejecting empty or case-insensitively repeated owners.
    pub fn new(documents: Vec<LoreDocument>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            let key = normalize_name(&doc.owner_name);
            if key.is_empty() {
                return Err(Error::InvalidOwner(doc.owner_name.clone()));
            }
            if !seen.insert(key) {
                return Err(Error::Invalid(format!(
                    "duplicate owner name {:?}",
                    doc.owner_name
                )));
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[LoreDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LoreDocument> {
        self.documents.iter()
    }
}

impl<'a> IntoIterator for &'a LoreCorpus {
    type Item = &'a LoreDocument;
    type IntoIter = std::slice::Iter<'a, LoreDocument>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

/// A wiki page and its infobox attributes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InfoboxRecord {
    pub page_name: String,
    pub attributes: BTreeMap<String, String>,
}

/// Ordered key/value entries of a JSON object, duplicates kept.
struct OrderedEntries(Vec<(String, serde_json::Value)>);

impl<'de> Deserialize<'de> for OrderedEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = OrderedEntries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut entries = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((k, v)) = map.next_entry::<String, serde_json::Value>()? {
                    entries.push((k, v));
                }
                Ok(OrderedEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

struct OrderedArray(Vec<OrderedEntries>);

impl<'de> Deserialize<'de> for OrderedArray {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ArrayVisitor;

        impl<'de> Visitor<'de> for ArrayVisitor {
            type Value = OrderedArray;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON array of objects")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(item) = seq.next_element::<OrderedEntries>()? {
                    out.push(item);
                }
                Ok(OrderedArray(out))
            }
        }

        deserializer.deserialize_seq(ArrayVisitor)
    }
}

fn malformed(path: &Path, message: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Parses lore JSON text. `path` is only used in error messages.
pub fn parse_lore_corpus(text: &str, path: &Path) -> Result<LoreCorpus> {
    let entries: OrderedEntries = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            malformed(path, "expected a top-level object mapping names to lore text")
        } else {
            malformed(path, e.to_string())
        }
    })?;

    let mut seen = HashSet::new();
    let mut documents = Vec::with_capacity(entries.0.len());
    for (name, value) in entries.0 {
        let text = match value {
            serde_json::Value::String(s) => s,
            other => {
                return Err(malformed(
                    path,
                    format!("value for {name:?} is {}, expected a string", json_kind(&other)),
                ))
            }
        };
        let owner_name = name.trim().to_string();
        let key = normalize_name(&owner_name);
        if key.is_empty() {
            return Err(malformed(path, "empty owner name"));
        }
        if !seen.insert(key) {
            return Err(Error::DuplicateOwner {
                path: path.to_path_buf(),
                name,
            });
        }
        documents.push(LoreDocument { owner_name, text });
    }
    Ok(LoreCorpus { documents })
}

fn json_kind(v: &serde_json::Value) -> &'static str {
    match v {
        serde_json::Value::Null => "null",
        serde_json::Value::Bool(_) => "a boolean",
        serde_json::Value::Number(_) => "a number",
        serde_json::Value::String(_) => "a string",
        serde_json::Value::Array(_) => "an array",
        serde_json::Value::Object(_) => "an object",
    }
}

pub fn load_lore_corpus(path: impl AsRef<Path>) -> Result<LoreCorpus> {
    let path = path.as_ref();
    let text = fsutil::read_utf8(path)?;
    parse_lore_corpus(&text, path)
}

/// Trimmed, non-blank lines in order. Duplicates are kept.
pub fn parse_name_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_name_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    Ok(parse_name_list(&fsutil::read_utf8(path)?))
}

pub fn write_name_list(path: impl AsRef<Path>, names: &[String]) -> Result<()> {
    fsutil::write_lines(path.as_ref(), names)
}

/// Parses an infobox dump. Attributes whose values are not strings are
/// dropped; records without a string `page` are malformed.
pub fn parse_infobox_records(text: &str, path: &Path) -> Result<Vec<InfoboxRecord>> {
    let array: OrderedArray = serde_json::from_str(text).map_err(|e| malformed(path, e.to_string()))?;
    let mut records = Vec::with_capacity(array.0.len());
    for (i, entries) in array.0.into_iter().enumerate() {
        let mut page_name = None;
        let mut attributes = BTreeMap::new();
        for (k, v) in entries.0 {
            match (k.as_str(), v) {
                ("page", serde_json::Value::String(s)) => page_name = Some(s),
                ("page", other) => {
                    return Err(malformed(
                        path,
                        format!("record {i}: \"page\" is {}, expected a string", json_kind(&other)),
                    ))
                }
                (_, serde_json::Value::String(s)) => {
                    attributes.insert(k, s);
                }
                _ => {}
            }
        }
        let page_name = page_name.ok_or_else(|| malformed(path, format!("record {i} has no \"page\"")))?;
        records.push(InfoboxRecord {
            page_name,
            attributes,
        });
    }
    Ok(records)
}

pub fn load_infobox_records(path: impl AsRef<Path>) -> Result<Vec<InfoboxRecord>> {
    let path = path.as_ref();
    let text = fsutil::read_utf8(path)?;
    parse_infobox_records(&text, path)
}

/// Page names of records carrying `type_key` with a value outside
/// `excluded_values`. Records without the key are skipped.
pub fn filter_infobox_entities<S: AsRef<str>>(
    records: &[InfoboxRecord],
    type_key: &str,
    excluded_values: &[S],
) -> Vec<String> {
    assert!(!type_key.is_empty(), "type_key must be non-empty");
    records
        .iter()
        .filter(|r| match r.attributes.get(type_key) {
            Some(value) => !excluded_values.iter().any(|x| x.as_ref() == value),
            None => false,
        })
        .map(|r| r.page_name.clone())
        .collect()
}
