mod config;
mod pipeline;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lorener::assoc::{build_association_map, diff_maps, export_dot, AssociationMap};
use lorener::corpus::to_conll_string;
use lorener::gazetteer::{build_gazetteer, compute_ignore_list, read_ignore_list, Gazetteer, GazetteerConfig};
use lorener::tagger::{tag_corpus_with, SpanMatcher};
use lorener::textspan::SentenceSplitter;
use lorener::{
    corpus_stats, load_lore_corpus, read_conll, remap_labels, score, split_corpus, LabelMap, MatchMode, SplitSpec,
    UnmappedPolicy,
};

use crate::config::{parse_ratios, Overrides, PipelineConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lorener", version, about = "Dictionary-tagged NER corpora from entity lists and lore text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge name lists and write the ordered gazetteer
    Gazetteer(GazetteerArgs),
    /// Names found in more than --threshold lore documents
    Ignore(IgnoreArgs),
    /// Tag lore documents into a BIO corpus
    Tag(TagArgs),
    /// Split a corpus into train/dev/test by whole documents
    Split(SplitArgs),
    /// Corpus counts as JSON
    Stats(StatsArgs),
    /// Exact-match span precision/recall/F1
    Score(ScoreArgs),
    /// Rename or drop span labels
    Remap(RemapArgs),
    /// Association map (mentioned entity -> lore owners) of a tagged corpus
    Assoc(AssocArgs),
    /// Compare two association maps
    Diff(DiffArgs),
    /// Graphviz DOT export of an association map
    Graph(GraphArgs),
    /// Run gazetteer, ignore, tag, split and stats from a config file
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct NameSources {
    /// Name list file, one name per line (repeatable)
    #[arg(long = "names")]
    names: Vec<PathBuf>,
    /// Infobox JSON dump
    #[arg(long)]
    infobox: Option<PathBuf>,
    #[arg(long, default_value = "type5e")]
    type_key: String,
    /// Infobox type values to drop (repeatable)
    #[arg(long = "exclude")]
    exclude: Vec<String>,
}

impl NameSources {
    fn collect(&self) -> anyhow::Result<Vec<String>> {
        if self.names.is_empty() && self.infobox.is_none() {
            bail!(UsageError("give at least one --names or --infobox".into()));
        }
        pipeline::collect_names(&self.names, self.infobox.as_deref(), &self.type_key, &self.exclude)
    }
}

#[derive(Debug, Args)]
struct GazetteerArgs {
    #[command(flatten)]
    sources: NameSources,
    /// Ignore list file produced by `ignore`
    #[arg(long)]
    ignore: Option<PathBuf>,
    #[arg(long)]
    case_sensitive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IgnoreArgs {
    #[arg(long)]
    lore: PathBuf,
    #[command(flatten)]
    sources: NameSources,
    #[arg(long, default_value_t = lorener::gazetteer::DEFAULT_IGNORE_THRESHOLD)]
    threshold: usize,
    #[arg(long)]
    case_sensitive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TagArgs {
    #[arg(long)]
    lore: PathBuf,
    /// Gazetteer file produced by `gazetteer`
    #[arg(long)]
    gazetteer: PathBuf,
    /// substring or word_boundary
    #[arg(long, default_value = "word_boundary")]
    mode: MatchMode,
    #[arg(long, default_value = lorener::DEFAULT_LABEL)]
    label: String,
    #[arg(long)]
    case_sensitive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Train, dev and test fractions
    #[arg(long, default_value = "2/3,1/6,1/6")]
    ratios: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Only score these labels (comma separated)
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RemapArgs {
    #[arg(long)]
    input: PathBuf,
    /// SOURCE=TARGET label pair (repeatable), e.g. PER=MONS
    #[arg(long = "map", required = true)]
    map: Vec<String>,
    /// What happens to labels without a mapping: drop or keep
    #[arg(long, default_value = "drop")]
    unmapped: UnmappedPolicy,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AssocArgs {
    /// Tagged corpus with document markers
    #[arg(long)]
    input: PathBuf,
    /// Keep entities mentioned in their own lore
    #[arg(long)]
    include_self: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiffArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    lore: Option<PathBuf>,
    #[arg(long = "names")]
    names: Vec<PathBuf>,
    #[arg(long)]
    infobox: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long)]
    case_sensitive: bool,
    #[arg(long)]
    mode: Option<MatchMode>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "LORENER_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            lorener::write_atomic(path, text.as_bytes())?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn gazetteer_config(case_sensitive: bool) -> GazetteerConfig {
    GazetteerConfig {
        case_insensitive: !case_sensitive,
        ..Default::default()
    }
}

fn parse_label_pair(s: &str) -> anyhow::Result<(String, String)> {
    match s.split_once('=') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => bail!(UsageError(format!("--map expects SOURCE=TARGET, got {s:?}"))),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gazetteer(a) => {
            let cfg = gazetteer_config(a.case_sensitive);
            let names = a.sources.collect()?;
            let ignore = match &a.ignore {
                Some(p) => read_ignore_list(p, &cfg)?,
                None => BTreeSet::new(),
            };
            let g = build_gazetteer(&names, &ignore, &cfg);
            log::info!("gazetteer: {} entries ({} ignored keys)", g.len(), ignore.len());
            emit(a.out.as_deref(), &g.surfaces().map(|s| format!("{s}\n")).collect::<String>())
        }
        Command::Ignore(a) => {
            let cfg = GazetteerConfig {
                ignore_threshold: a.threshold,
                ..gazetteer_config(a.case_sensitive)
            };
            let names = a.sources.collect()?;
            let lore = load_lore_corpus(&a.lore)?;
            let ignore = compute_ignore_list(&lore, &names, &cfg);
            log::info!("{} of {} names ignored", ignore.len(), names.len());
            emit(a.out.as_deref(), &ignore.iter().map(|s| format!("{s}\n")).collect::<String>())
        }
        Command::Tag(a) => {
            let g = Gazetteer::read(&a.gazetteer, &gazetteer_config(a.case_sensitive))?;
            let lore = load_lore_corpus(&a.lore)?;
            let matcher = SpanMatcher::with_label(&g, a.mode, &a.label)?;
            let tagged = tag_corpus_with(&lore, &matcher, &SentenceSplitter::default())?;
            let stats = corpus_stats(&tagged);
            log::info!("tagged {} sentences, {} spans", stats.n_sentences, stats.n_spans);
            emit(a.out.as_deref(), &to_conll_string(&tagged)?)
        }
        Command::Split(a) => {
            let spec = SplitSpec::new(parse_ratios(&a.ratios).map_err(|e| UsageError(e.to_string()))?, a.seed)?;
            let corpus = read_conll(&a.input)?.corpus;
            let splits = split_corpus(&corpus, &spec)?;
            let texts = splits
                .named()
                .map(|(name, part)| to_conll_string(part).map(|t| (name, t, part.n_sentences())));
            let texts: Vec<_> = texts.into_iter().collect::<lorener::Result<_>>()?;
            std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
            for (name, text, n) in texts {
                let path = a.out_dir.join(format!("{name}.conll"));
                lorener::write_atomic(&path, text.as_bytes())?;
                log::info!("{name}: {n} sentences -> {}", path.display());
            }
            Ok(())
        }
        Command::Stats(a) => {
            let corpus = read_conll(&a.input)?.corpus;
            emit(a.out.as_deref(), &(corpus_stats(&corpus).to_json() + "\n"))
        }
        Command::Score(a) => {
            let pred = read_conll(&a.pred)?;
            let gold = read_conll(&a.gold)?;
            let labels: BTreeSet<String> = a.labels.into_iter().collect();
            let report = score(&pred.corpus, &gold.corpus, (!labels.is_empty()).then_some(&labels))?;
            if let Some(path) = &a.json {
                lorener::write_atomic(path, (report.to_json() + "\n").as_bytes())?;
            }
            emit(None, &format!("{report}\n"))
        }
        Command::Remap(a) => {
            let pairs = a.map.iter().map(|s| parse_label_pair(s)).collect::<anyhow::Result<BTreeMap<_, _>>>()?;
            let map = LabelMap::new(pairs, a.unmapped)?;
            let corpus = read_conll(&a.input)?.corpus;
            emit(a.out.as_deref(), &to_conll_string(&remap_labels(&corpus, &map))?)
        }
        Command::Assoc(a) => {
            let corpus = read_conll(&a.input)?.corpus;
            let map = build_association_map(&corpus, a.include_self);
            log::info!("{} entities, {} pairs", map.entries.len(), map.n_pairs());
            emit(a.out.as_deref(), &(map.to_json() + "\n"))
        }
        Command::Diff(a) => {
            let d = diff_maps(&AssociationMap::read(&a.a)?, &AssociationMap::read(&a.b)?);
            emit(a.out.as_deref(), &(d.to_json() + "\n"))
        }
        Command::Graph(a) => emit(a.out.as_deref(), &export_dot(&AssociationMap::read(&a.map)?)),
        Command::Pipeline(a) => {
            let ratios = match &a.ratios {
                Some(r) => Some(parse_ratios(r).map_err(|e| UsageError(e.to_string()))?),
                None => None,
            };
            let overrides = Overrides {
                lore: a.lore,
                name_lists: a.names,
                infobox: a.infobox,
                ignore_threshold: a.threshold,
                case_sensitive: a.case_sensitive,
                mode: a.mode,
                label: a.label,
                ratios,
                seed: a.seed,
                output_dir: a.out_dir,
            };
            let config = PipelineConfig::load(&a.config, overrides)?;
            pipeline::run(&config)?;
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<lorener::Error>() {
            return if e.is_io() { EXIT_IO } else { EXIT_DATA };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_DATA
}

fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if out.ends_with(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
