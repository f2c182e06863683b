//! BIO (IOB2) tags.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_LABEL: &str = "MONS";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Outside,
    Begin(String),
    Inside(String),
}

/// Labels are non-empty and contain neither whitespace nor control characters.
pub fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

impl Tag {
    pub fn label(&self) -> Option<&str> {
        match self {
            Tag::Outside => None,
            Tag::Begin(l) | Tag::Inside(l) => Some(l),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Tag::Outside)
    }

    /// Same position in the span, different label.
    pub fn with_label(&self, label: &str) -> Tag {
        match self {
            Tag::Outside => Tag::Outside,
            Tag::Begin(_) => Tag::Begin(label.to_string()),
            Tag::Inside(_) => Tag::Inside(label.to_string()),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Begin(l) => write!(f, "B-{l}"),
            Tag::Inside(l) => write!(f, "I-{l}"),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tag = match s {
            "O" => return Ok(Tag::Outside),
            _ if s.starts_with("B-") => Tag::Begin(s[2..].to_string()),
            _ if s.starts_with("I-") => Tag::Inside(s[2..].to_string()),
            _ => return Err(Error::InvalidTag(s.to_string())),
        };
        validate_label(tag.label().unwrap_or_default()).map_err(|_| Error::InvalidTag(s.to_string()))?;
        Ok(tag)
    }
}

/// An `I-X` that does not continue a `B-X` or `I-X` is malformed.
pub fn is_malformed_at(tags: &[Tag], i: usize) -> bool {
    match &tags[i] {
        Tag::Inside(label) => match i.checked_sub(1).map(|p| &tags[p]) {
            Some(Tag::Begin(prev)) | Some(Tag::Inside(prev)) => prev != label,
            _ => true,
        },
        _ => false,
    }
}

/// Rewrites every malformed `I-X` to `B-X` and returns how many were fixed.
pub fn repair_tags(tags: &mut [Tag]) -> usize {
    let mut repairs = 0;
    for i in 0..tags.len() {
        if is_malformed_at(tags, i) {
            let label = tags[i].label().unwrap_or_default().to_string();
            tags[i] = Tag::Begin(label);
            repairs += 1;
        }
    }
    repairs
}

pub fn is_well_formed(tags: &[Tag]) -> bool {
    (0..tags.len()).all(|i| !is_malformed_at(tags, i))
}
