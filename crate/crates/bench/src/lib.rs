//! Synthetic inputs for the benchmarks.

use lorener::{LoreCorpus, LoreDocument};

const WORDS: &[&str] = &[
    "the", "ancient", "lair", "of", "a", "beast", "hoards", "gold", "and", "its", "kin", "roam", "under", "dark",
    "mountains", "where", "travelers", "fear", "to", "tread",
];

/// `n_names` multi-word monster names.
pub fn names(n_names: usize) -> Vec<String> {
    (0..n_names)
        .map(|i| match i % 3 {
            0 => format!("creature{i}"),
            1 => format!("elder creature{i}"),
            _ => format!("lesser shadow creature{i}"),
        })
        .collect()
}

/// A deterministic lore corpus mentioning names from [`names`].
pub fn corpus(n_docs: usize, sentences_per_doc: usize, n_names: usize) -> LoreCorpus {
    let names = names(n_names);
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let documents = (0..n_docs)
        .map(|d| {
            let mut text = String::new();
            for _ in 0..sentences_per_doc {
                for w in 0..12 {
                    if w > 0 {
                        text.push(' ');
                    }
                    let r = next() as usize;
                    if r % 7 == 0 {
                        text.push_str(&names[r % names.len()]);
                    } else {
                        text.push_str(WORDS[r % WORDS.len()]);
                    }
                }
                text.push_str(". ");
            }
            LoreDocument {
                owner_name: format!("Owner {d}"),
                text,
            }
        })
        .collect();
    LoreCorpus::new(documents).expect("owners are unique")
}
