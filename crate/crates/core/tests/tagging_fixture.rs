use std::path::PathBuf;

use lorener::corpus::to_conll_string;
use lorener::{
    build_gazetteer, compute_ignore_list, load_lore_corpus, load_name_list, tag_corpus, GazetteerConfig, MatchMode,
};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn tag_fixture(mode: MatchMode) -> String {
    let lore = load_lore_corpus(fixtures().join("lore.json")).unwrap();
    let names = load_name_list(fixtures().join("srd_monsters.txt")).unwrap();
    let cfg = GazetteerConfig::default();
    let ignore = compute_ignore_list(&lore, &names, &cfg);
    let g = build_gazetteer(&names, &ignore, &cfg);
    to_conll_string(&tag_corpus(&lore, &g, mode).unwrap()).unwrap()
}

#[test]
fn fixture_tagging_is_deterministic() {
    let lore = load_lore_corpus(fixtures().join("lore.json")).unwrap();
    assert_eq!(lore.len(), 30);
    for mode in [MatchMode::WordBoundary, MatchMode::Substring] {
        assert_eq!(tag_fixture(mode), tag_fixture(mode));
    }
}

#[test]
fn fixture_tagging_matches_snapshot() {
    let snapshot = std::fs::read_to_string(fixtures().join("expected/lore.word_boundary.conll")).unwrap();
    assert_eq!(tag_fixture(MatchMode::WordBoundary), snapshot);
}

#[test]
fn fixture_shows_substring_false_positive() {
    let wb = tag_fixture(MatchMode::WordBoundary);
    let sub = tag_fixture(MatchMode::Substring);
    assert!(wb.contains("impressive O\n"));
    assert!(sub.contains("impressive B-MONS\n"));
    assert!(wb.contains("steam B-MONS\nmephit I-MONS\nhissed O\n"));
}
