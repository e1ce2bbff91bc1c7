//! Run configuration read from a TOML file.
//!
//! Precedence, highest first: command-line flags, values in the file,
//! built-in preset defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{generate_synth, load_dataset, MultiViewDataset, SynthSpec};
use crate::error::{Error, Result};
use crate::eval::{EvalMode, EvalOptions};
use crate::trainer::{Algorithm, Hyperparams, Preset};

pub const FORMAT_VERSION: u32 = 1;

/// Where the training data comes from. Exactly one field may be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub synth: Option<SynthSpec>,
    /// Seed of a preset dataset; defaults to the run seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub noise_fractions: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub mode: Option<EvalMode>,
    pub eval: EvalOptions,
}

/// Raw file contents. Hyperparameters stay untyped so that a partial table
/// can be layered over preset defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub algorithm: Option<Algorithm>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Preset whose hyperparameter row is used as the base; defaults to the
    /// data preset, or `synth1`.
    pub hyperparams_preset: Option<Preset>,
    pub data: DataSection,
    pub hyperparams: toml::Table,
    pub experiment: ExperimentSection,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub algorithm: Option<Algorithm>,
    pub preset: Option<Preset>,
    pub data: Option<PathBuf>,
    pub max_iters: Option<usize>,
    pub mode: Option<EvalMode>,
}

/// Fully resolved configuration; this is what reports embed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub out: PathBuf,
    pub data: DataSection,
    /// Hyperparameters of the selected algorithm.
    pub hyperparams: Hyperparams,
    /// Hyperparameters of both algorithms, used by the noise sweep.
    pub hyperparams_standard: Hyperparams,
    pub hyperparams_an: Hyperparams,
    pub noise_fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    pub mode: EvalMode,
    pub eval: EvalOptions,
}

pub const DEFAULT_NOISE_FRACTIONS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const DEFAULT_SEED_COUNT: u64 = 5;

fn layered_hyperparams(
    preset: Preset,
    algorithm: Algorithm,
    overlay: &toml::Table,
    seed: u64,
    max_iters: Option<usize>,
) -> Result<Hyperparams> {
    let base = Hyperparams::preset(preset, algorithm);
    let mut table = toml::Table::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
    for (k, v) in overlay {
        table.insert(k.clone(), v.clone());
    }
    let mut hp: Hyperparams = table
        .try_into()
        .map_err(|e| Error::Config(format!("hyperparams: {e}")))?;
    if !overlay.contains_key("seed") {
        hp.seed = seed;
    }
    if let Some(m) = max_iters {
        hp.max_iters = m;
    }
    hp.validate(algorithm)?;
    Ok(hp)
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, flags: &Overrides) -> Result<Self> {
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let algorithm = flags
            .algorithm
            .or(file.algorithm)
            .unwrap_or(Algorithm::Standard);
        let out =
            flags.out.clone().or(file.out).ok_or_else(|| {
                Error::Config("no output directory given (--out or `out`)".into())
            })?;

        let mut data = file.data;
        if let Some(p) = &flags.data {
            data = DataSection {
                path: Some(p.clone()),
                ..Default::default()
            };
        } else if let Some(p) = flags.preset {
            data = DataSection {
                preset: Some(p),
                ..Default::default()
            };
        }
        let sources = [
            data.path.is_some(),
            data.preset.is_some(),
            data.synth.is_some(),
        ];
        match sources.iter().filter(|&&s| s).count() {
            0 => {
                return Err(Error::Config(
                    "no data source: set one of data.path, data.preset, data.synth".into(),
                ))
            }
            1 => {}
            _ => {
                return Err(Error::Config(
                    "set only one of data.path, data.preset, data.synth".into(),
                ))
            }
        }
        if let Some(p) = &data.path {
            if !p.join("manifest.json").is_file() {
                return Err(Error::Config(format!(
                    "dataset directory {} has no manifest.json",
                    p.display()
                )));
            }
        }

        let hp_preset = file
            .hyperparams_preset
            .or(data.preset)
            .unwrap_or(Preset::Synth1);
        let overlay = &file.hyperparams;
        let hyperparams_standard = layered_hyperparams(
            hp_preset,
            Algorithm::Standard,
            overlay,
            seed,
            flags.max_iters,
        )?;
        let hyperparams_an = layered_hyperparams(
            hp_preset,
            Algorithm::AntiNoise,
            overlay,
            seed,
            flags.max_iters,
        )?;
        let hyperparams = match algorithm {
            Algorithm::Standard => hyperparams_standard.clone(),
            Algorithm::AntiNoise => hyperparams_an.clone(),
        };

        let noise_fractions = file
            .experiment
            .noise_fractions
            .unwrap_or_else(|| DEFAULT_NOISE_FRACTIONS.to_vec());
        if let Some(f) = noise_fractions.iter().find(|f| !(0.0..=0.5).contains(*f)) {
            return Err(Error::Config(format!(
                "noise fraction {f} outside [0, 0.5]"
            )));
        }
        let seeds = file
            .experiment
            .seeds
            .unwrap_or_else(|| (seed..seed + DEFAULT_SEED_COUNT).collect());
        if seeds.is_empty() {
            return Err(Error::Config("experiment.seeds is empty".into()));
        }
        let mode = flags
            .mode
            .or(file.experiment.mode)
            .unwrap_or(EvalMode::Classify);

        Ok(Self {
            algorithm,
            seed,
            out,
            data,
            hyperparams,
            hyperparams_standard,
            hyperparams_an,
            noise_fractions,
            seeds,
            mode,
            eval: file.experiment.eval,
        })
    }

    /// Synthetic spec for preset or inline data, `None` for a dataset directory.
    pub fn synth_spec(&self) -> Option<SynthSpec> {
        let seed = self.data.seed.unwrap_or(self.seed);
        if let Some(spec) = &self.data.synth {
            return Some(spec.clone());
        }
        self.data.preset.map(|p| match p {
            Preset::Synth1 => SynthSpec::synth1(seed),
            Preset::Synth2 => SynthSpec::synth2(seed),
        })
    }

    pub fn dataset(&self) -> Result<MultiViewDataset> {
        match (&self.data.path, self.synth_spec()) {
            (Some(p), _) => load_dataset(p),
            (None, Some(spec)) => generate_synth(&spec),
            (None, None) => Err(Error::Config("no data source".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags_out() -> Overrides {
        Overrides {
            out: Some("o".into()),
            ..Default::default()
        }
    }

    #[test]
    fn partial_hyperparams_layer_over_preset() {
        let file = ConfigFile::from_toml(
            "algorithm = \"an\"\n[data]\npreset = \"synth2\"\n[hyperparams]\nbeta = 0.5\n",
        )
        .unwrap();
        let cfg = RunConfig::resolve(file, &flags_out()).unwrap();
        let base = Hyperparams::preset(Preset::Synth2, Algorithm::AntiNoise);
        assert_eq!(cfg.algorithm, Algorithm::AntiNoise);
        assert_eq!(cfg.hyperparams.beta, 0.5);
        assert_eq!(cfg.hyperparams.k_per_view, base.k_per_view);
        assert_eq!(cfg.hyperparams.mu, base.mu);
    }

    #[test]
    fn flags_win_over_file() {
        let file =
            ConfigFile::from_toml("seed = 3\nout = \"a\"\n[data]\npreset = \"synth1\"\n").unwrap();
        let flags = Overrides {
            seed: Some(9),
            out: Some("b".into()),
            max_iters: Some(0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(file, &flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.out, PathBuf::from("b"));
        assert_eq!(cfg.hyperparams.max_iters, 0);
        assert_eq!(cfg.hyperparams.seed, 9);
        assert_eq!(cfg.seeds, vec![9, 10, 11, 12, 13]);
    }

    #[test]
    fn data_sources_are_exclusive() {
        let none = ConfigFile::from_toml("").unwrap();
        assert!(RunConfig::resolve(none, &flags_out()).is_err());
        let two = ConfigFile::from_toml("[data]\npreset = \"synth1\"\npath = \"x\"\n").unwrap();
        assert!(RunConfig::resolve(two, &flags_out()).is_err());
    }

    #[test]
    fn missing_dataset_directory_is_rejected() {
        let file = ConfigFile::from_toml("[data]\npath = \"/definitely/not/here\"\n").unwrap();
        let err = RunConfig::resolve(file, &flags_out()).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigFile::from_toml("colour = 1\n").is_err());
        let file = ConfigFile::from_toml("[data]\npreset = \"synth1\"\n[hyperparams]\nbta = 1.0\n")
            .unwrap();
        assert!(RunConfig::resolve(file, &flags_out()).is_err());
    }

    #[test]
    fn bad_fraction_is_rejected() {
        let file = ConfigFile::from_toml(
            "[data]\npreset = \"synth1\"\n[experiment]\nnoise_fractions = [0.7]\n",
        )
        .unwrap();
        assert!(RunConfig::resolve(file, &flags_out()).is_err());
    }
}
