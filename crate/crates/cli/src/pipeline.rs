use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use lorener::corpus::to_conll_string;
use lorener::gazetteer::{build_gazetteer, compute_ignore_list, merge_name_lists};
use lorener::tagger::{tag_corpus_with, SpanMatcher};
use lorener::textspan::SentenceSplitter;
use lorener::{corpus_stats, filter_infobox_entities, load_infobox_records, load_lore_corpus, load_name_list, split_corpus};

use crate::config::PipelineConfig;

/// Names from every list plus the filtered infobox, merged in order.
pub fn collect_names(
    name_lists: &[PathBuf],
    infobox: Option<&Path>,
    type_key: &str,
    exclude: &[String],
) -> anyhow::Result<Vec<String>> {
    let mut names: Vec<String> = Vec::new();
    for path in name_lists {
        let list = load_name_list(path)?;
        log::info!("read {} names from {}", list.len(), path.display());
        names = merge_name_lists(&names, &list);
    }
    if let Some(path) = infobox {
        let records = load_infobox_records(path)?;
        let list = filter_infobox_entities(&records, type_key, exclude);
        log::info!("kept {} of {} infobox records from {}", list.len(), records.len(), path.display());
        names = merge_name_lists(&names, &list);
    }
    log::info!("merged name list has {} names", names.len());
    Ok(names)
}

/// gazetteer -> ignore -> tag -> split -> stats. All outputs are computed
/// before the first file is written.
pub fn run(config: &PipelineConfig) -> anyhow::Result<Vec<PathBuf>> {
    let names = collect_names(
        &config.name_lists,
        config.infobox.as_deref(),
        &config.infobox_type_key,
        &config.infobox_exclude,
    )?;
    let lore = load_lore_corpus(&config.lore)?;
    log::info!("loaded {} lore documents from {}", lore.len(), config.lore.display());

    let ignore = compute_ignore_list(&lore, &names, &config.gazetteer);
    log::info!(
        "ignore list: {} names in more than {} documents",
        ignore.len(),
        config.gazetteer.ignore_threshold
    );
    let gazetteer = build_gazetteer(&names, &ignore, &config.gazetteer);
    log::info!("gazetteer: {} entries", gazetteer.len());

    let matcher = SpanMatcher::with_label(&gazetteer, config.mode, &config.label)?;
    let tagged = tag_corpus_with(&lore, &matcher, &SentenceSplitter::default())?;
    let splits = split_corpus(&tagged, &config.split)?;

    let mut stats = BTreeMap::new();
    let mut files: Vec<(String, String)> = Vec::new();
    for (key, value) in corpus_stats(&tagged).flat() {
        stats.insert(format!("all.{key}"), value);
    }
    for (name, part) in splits.named() {
        let s = corpus_stats(part);
        log::info!("{name}: {} documents, {} sentences, {} spans", s.n_documents, s.n_sentences, s.n_spans);
        for (key, value) in s.flat() {
            stats.insert(format!("{name}.{key}"), value);
        }
        files.push((format!("{name}.conll"), to_conll_string(part)?));
    }

    let lines = |items: &mut dyn Iterator<Item = &str>| items.map(|s| format!("{s}\n")).collect::<String>();
    files.push(("names.txt".into(), lines(&mut names.iter().map(String::as_str))));
    files.push(("ignore.txt".into(), lines(&mut ignore.iter().map(String::as_str))));
    files.push(("gazetteer.txt".into(), lines(&mut gazetteer.surfaces())));
    files.push(("stats.json".into(), serde_json::to_string_pretty(&stats)? + "\n"));

    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = config.output_dir.join(name);
        lorener::write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    log::info!("wrote {} files to {}", written.len(), config.output_dir.display());
    Ok(written)
}
