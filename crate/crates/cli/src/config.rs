//! Pipeline configuration file (TOML). Relative paths resolve against the
//! directory holding the config file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lorener::{GazetteerConfig, MatchMode, SplitSpec, DEFAULT_LABEL};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub infobox: InfoboxSection,
    #[serde(default)]
    pub gazetteer: GazetteerSection,
    #[serde(default)]
    pub tagger: TaggerSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub lore: Option<PathBuf>,
    #[serde(default)]
    pub name_lists: Vec<PathBuf>,
    pub infobox: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoboxSection {
    #[serde(default = "default_type_key")]
    pub type_key: String,
    #[serde(default)]
    pub exclude: Vec<String>,
}

fn default_type_key() -> String {
    "type5e".to_string()
}

impl Default for InfoboxSection {
    fn default() -> Self {
        Self {
            type_key: default_type_key(),
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GazetteerSection {
    pub ignore_threshold: Option<usize>,
    pub case_insensitive: Option<bool>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TaggerSection {
    pub mode: Option<MatchMode>,
    pub label: Option<String>,
}

/// A ratio written as a number or as a fraction string like `"2/3"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Ratio {
    Number(f64),
    Text(String),
}

impl Ratio {
    pub fn value(&self) -> anyhow::Result<f64> {
        match self {
            Ratio::Number(x) => Ok(*x),
            Ratio::Text(s) => parse_fraction(s),
        }
    }
}

pub fn parse_fraction(s: &str) -> anyhow::Result<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().with_context(|| format!("bad ratio {s:?}"))?;
            let d: f64 = d.trim().parse().with_context(|| format!("bad ratio {s:?}"))?;
            if d == 0.0 {
                bail!("bad ratio {s:?}: zero denominator");
            }
            Ok(n / d)
        }
        None => s.parse().with_context(|| format!("bad ratio {s:?}")),
    }
}

/// Parses `"2/3,1/6,1/6"`.
pub fn parse_ratios(s: &str) -> anyhow::Result<[f64; 3]> {
    let parts: Vec<f64> = s.split(',').map(parse_fraction).collect::<anyhow::Result<_>>()?;
    match parts[..] {
        [a, b, c] => Ok([a, b, c]),
        _ => bail!("expected three comma-separated ratios, got {s:?}"),
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub ratios: Option<Vec<Ratio>>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Fully resolved settings for `pipeline`.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub lore: PathBuf,
    pub name_lists: Vec<PathBuf>,
    pub infobox: Option<PathBuf>,
    pub infobox_type_key: String,
    pub infobox_exclude: Vec<String>,
    pub gazetteer: GazetteerConfig,
    pub mode: MatchMode,
    pub split: SplitSpec,
    pub label: String,
    pub output_dir: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lore: Option<PathBuf>,
    pub name_lists: Vec<PathBuf>,
    pub infobox: Option<PathBuf>,
    pub ignore_threshold: Option<usize>,
    pub case_sensitive: bool,
    pub mode: Option<MatchMode>,
    pub label: Option<String>,
    pub ratios: Option<[f64; 3]>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: Overrides) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let raw: RawConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_raw(raw, base, overrides)
    }

    pub fn from_raw(raw: RawConfig, base: &Path, o: Overrides) -> anyhow::Result<Self> {
        let lore = match (o.lore, raw.input.lore) {
            (Some(p), _) => p,
            (None, Some(p)) => resolve(base, &p),
            (None, None) => bail!("no lore file given (input.lore or --lore)"),
        };
        let name_lists = if !o.name_lists.is_empty() {
            o.name_lists
        } else {
            raw.input.name_lists.iter().map(|p| resolve(base, p)).collect()
        };
        let infobox = o.infobox.or_else(|| raw.input.infobox.map(|p| resolve(base, &p)));
        if name_lists.is_empty() && infobox.is_none() {
            bail!("no entity names given (input.name_lists, input.infobox, --names or --infobox)");
        }

        let defaults = GazetteerConfig::default();
        let gazetteer = GazetteerConfig {
            ignore_threshold: o
                .ignore_threshold
                .or(raw.gazetteer.ignore_threshold)
                .unwrap_or(defaults.ignore_threshold),
            case_insensitive: !o.case_sensitive && raw.gazetteer.case_insensitive.unwrap_or(defaults.case_insensitive),
        };

        let ratios = match (o.ratios, raw.split.ratios) {
            (Some(r), _) => r,
            (None, Some(list)) => {
                let values: Vec<f64> = list.iter().map(Ratio::value).collect::<anyhow::Result<_>>()?;
                match values[..] {
                    [a, b, c] => [a, b, c],
                    _ => bail!("split.ratios needs exactly three entries"),
                }
            }
            (None, None) => SplitSpec::default().ratios,
        };
        let split = SplitSpec::new(ratios, o.seed.or(raw.split.seed))?;

        let label = o
            .label
            .or(raw.tagger.label)
            .unwrap_or_else(|| DEFAULT_LABEL.to_string());
        lorener::bio::validate_label(&label)?;

        let output_dir = match (o.output_dir, raw.output.dir) {
            (Some(p), _) => p,
            (None, Some(p)) => resolve(base, &p),
            (None, None) => bail!("no output directory given (output.dir, --out-dir or LORENER_OUT_DIR)"),
        };

        Ok(Self {
            lore,
            name_lists,
            infobox,
            infobox_type_key: raw.infobox.type_key,
            infobox_exclude: raw.infobox.exclude,
            gazetteer,
            mode: o.mode.or(raw.tagger.mode).unwrap_or_default(),
            split,
            label,
            output_dir,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str) -> RawConfig {
        toml::from_str(text).unwrap()
    }

    const BASIC: &str = r#"
        [input]
        lore = "lore.json"
        name_lists = ["a.txt", "/abs/b.txt"]
        [split]
        ratios = ["2/3", 0.1666666666666667, "1/6"]
        seed = 3
        [output]
        dir = "out"
    "#;

    #[test]
    fn resolves_paths_and_defaults() {
        let c = PipelineConfig::from_raw(raw(BASIC), Path::new("/cfg"), Overrides::default()).unwrap();
        assert_eq!(c.lore, Path::new("/cfg/lore.json"));
        assert_eq!(c.name_lists, [PathBuf::from("/cfg/a.txt"), PathBuf::from("/abs/b.txt")]);
        assert_eq!(c.output_dir, Path::new("/cfg/out"));
        assert_eq!(c.gazetteer, GazetteerConfig::default());
        assert_eq!(c.mode, MatchMode::WordBoundary);
        assert_eq!(c.split.shuffle_seed, Some(3));
        assert_eq!(c.label, "MONS");
        assert_eq!(c.infobox_type_key, "type5e");
    }

    #[test]
    fn flags_win() {
        let o = Overrides {
            ignore_threshold: Some(5),
            case_sensitive: true,
            mode: Some(MatchMode::Substring),
            seed: Some(9),
            ratios: Some([1.0, 0.0, 0.0]),
            output_dir: Some("elsewhere".into()),
            label: Some("CREATURE".into()),
            ..Default::default()
        };
        let c = PipelineConfig::from_raw(raw(BASIC), Path::new("/cfg"), o).unwrap();
        assert_eq!(c.gazetteer.ignore_threshold, 5);
        assert!(!c.gazetteer.case_insensitive);
        assert_eq!(c.mode, MatchMode::Substring);
        assert_eq!(c.split.shuffle_seed, Some(9));
        assert_eq!(c.split.ratios, [1.0, 0.0, 0.0]);
        assert_eq!(c.output_dir, Path::new("elsewhere"));
        assert_eq!(c.label, "CREATURE");
    }

    #[test]
    fn rejects_bad_configs() {
        let none = Overrides::default;
        assert!(PipelineConfig::from_raw(raw("[output]\ndir = \"o\""), Path::new("."), none()).is_err());
        let bad_ratio = BASIC.replace("\"1/6\"]", "\"1/2\"]");
        assert!(PipelineConfig::from_raw(raw(&bad_ratio), Path::new("."), none()).is_err());
        assert!(toml::from_str::<RawConfig>("[input]\nlores = 1").is_err());
        assert!(toml::from_str::<RawConfig>("[tagger]\nmode = \"fuzzy\"").is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_ratios("2/3,1/6,1/6").unwrap(), [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert_eq!(parse_ratios("0.5, 0.25 ,0.25").unwrap(), [0.5, 0.25, 0.25]);
        assert!(parse_ratios("1/0,0,0").is_err());
        assert!(parse_ratios("1,0").is_err());
    }
}
