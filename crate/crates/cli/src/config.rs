//! Experiment configuration, read from TOML.
//!
//! ```toml
//! format = "json"
//! seed = 2024
//!
//! [[suite]]
//! name = "holder-duality"
//! pairs = [["schatten:p=1", "schatten:p=2"]]
//! dims = [2, 4, 8]
//! samples = 20
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use idealcalc::{Ensemble, SearchBudget, SpaceSpec};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("suite {index} ({name}): {message}")]
    Invalid {
        index: usize,
        name: String,
        message: String,
    },
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuiteName {
    Rearrangement,
    QuasiNormAxioms,
    SvInequalities,
    CalkinRoundtrip,
    HolderDuality,
    LorentzMarcinkiewiczDuality,
    MultiplierSandwich,
    DerivationSandwich,
    ZsidoBound,
    GeneratorRecovery,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Rearrangement,
        SuiteName::QuasiNormAxioms,
        SuiteName::SvInequalities,
        SuiteName::CalkinRoundtrip,
        SuiteName::HolderDuality,
        SuiteName::LorentzMarcinkiewiczDuality,
        SuiteName::MultiplierSandwich,
        SuiteName::DerivationSandwich,
        SuiteName::ZsidoBound,
        SuiteName::GeneratorRecovery,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Rearrangement => "rearrangement",
            SuiteName::QuasiNormAxioms => "quasi-norm-axioms",
            SuiteName::SvInequalities => "sv-inequalities",
            SuiteName::CalkinRoundtrip => "calkin-roundtrip",
            SuiteName::HolderDuality => "holder-duality",
            SuiteName::LorentzMarcinkiewiczDuality => "lorentz-marcinkiewicz-duality",
            SuiteName::MultiplierSandwich => "multiplier-sandwich",
            SuiteName::DerivationSandwich => "derivation-sandwich",
            SuiteName::ZsidoBound => "zsido-bound",
            SuiteName::GeneratorRecovery => "generator-recovery",
        }
    }

    fn uses_spaces(self) -> bool {
        matches!(
            self,
            SuiteName::QuasiNormAxioms
                | SuiteName::CalkinRoundtrip
                | SuiteName::LorentzMarcinkiewiczDuality
                | SuiteName::ZsidoBound
        )
    }

    fn uses_pairs(self) -> bool {
        matches!(
            self,
            SuiteName::HolderDuality
                | SuiteName::MultiplierSandwich
                | SuiteName::DerivationSandwich
        )
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SuiteName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<String>,
    #[serde(default)]
    suite: Vec<RawSuite>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuite {
    name: String,
    #[serde(default)]
    spaces: Vec<String>,
    #[serde(default)]
    pairs: Vec<[String; 2]>,
    #[serde(default)]
    dims: Vec<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    restarts: Option<usize>,
    steps: Option<usize>,
    #[serde(default)]
    ensembles: Vec<String>,
    #[serde(default)]
    orders: Vec<usize>,
}

/// One validated suite entry. For `derivation-sandwich` a pair is `(I, J)`;
/// for the multiplier suites it is `(F, G)` with the estimate of
/// `sup ||xi eta||_F / ||eta||_G`.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub name: SuiteName,
    pub spaces: Vec<SpaceSpec>,
    pub pairs: Vec<(SpaceSpec, SpaceSpec)>,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub budget: SearchBudget,
    pub ensembles: Vec<Ensemble>,
    /// Dilation orders checked by `quasi-norm-axioms`.
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub suites: Vec<SuiteConfig>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_SEED: u64 = 2024;
const DEFAULT_SAMPLES: usize = 20;
const DEFAULT_RESTARTS: usize = 8;
const DEFAULT_STEPS: usize = 60;

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let format = match raw.format.as_deref() {
            None => Format::Json,
            Some(f) => f.parse().map_err(ConfigError::Other)?,
        };
        let base_seed = raw.seed.unwrap_or(DEFAULT_SEED);
        let suites = raw
            .suite
            .into_iter()
            .enumerate()
            .map(|(index, s)| validate(index, s, base_seed))
            .collect::<Result<_, _>>()?;
        Ok(ExperimentConfig {
            suites,
            output: raw.output,
            format,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Replace every suite seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for s in &mut self.suites {
            s.seed = seed;
            s.budget = s.budget.with_seed(seed);
        }
        self
    }
}

fn validate(index: usize, raw: RawSuite, base_seed: u64) -> Result<SuiteConfig, ConfigError> {
    let bad = |message: String| ConfigError::Invalid {
        index,
        name: raw.name.clone(),
        message,
    };
    let name: SuiteName = raw.name.parse().map_err(&bad)?;
    let parse_space = |s: &String| s.parse::<SpaceSpec>().map_err(|e| bad(e.to_string()));
    let spaces = raw
        .spaces
        .iter()
        .map(parse_space)
        .collect::<Result<Vec<_>, _>>()?;
    let pairs = raw
        .pairs
        .iter()
        .map(|[a, b]| Ok((parse_space(a)?, parse_space(b)?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    if name.uses_spaces() && spaces.is_empty() {
        return Err(bad("needs at least one entry in `spaces`".into()));
    }
    if name.uses_pairs() && pairs.is_empty() {
        return Err(bad("needs at least one entry in `pairs`".into()));
    }
    if name == SuiteName::HolderDuality
        && pairs
            .iter()
            .any(|(f, g)| f.schatten_exponent().is_none() || g.schatten_exponent().is_none())
    {
        return Err(bad("holder-duality pairs must be Schatten spaces".into()));
    }
    if name == SuiteName::LorentzMarcinkiewiczDuality
        && spaces
            .iter()
            .any(|s| !matches!(s.kind(), idealcalc::SpaceKind::Lorentz { .. }))
    {
        return Err(bad(
            "lorentz-marcinkiewicz-duality spaces must be Lorentz spaces".into(),
        ));
    }

    let dims = if raw.dims.is_empty() {
        vec![4]
    } else {
        raw.dims
    };
    if dims.contains(&0) {
        return Err(bad("dimensions must be at least 1".into()));
    }
    for s in spaces.iter().chain(pairs.iter().flat_map(|(a, b)| [a, b])) {
        if let Some(max) = s.max_len() {
            if let Some(&n) = dims.iter().find(|&&n| n > max) {
                return Err(bad(format!(
                    "{s} has {max} weights but dimension {n} is requested"
                )));
            }
        }
    }
    let orders = if raw.orders.is_empty() {
        vec![2, 3, 4]
    } else {
        raw.orders
    };
    if orders.contains(&0) {
        return Err(bad("dilation orders must be at least 1".into()));
    }
    if name == SuiteName::QuasiNormAxioms {
        let longest = dims.iter().max().unwrap() * orders.iter().max().unwrap();
        if let Some(s) = spaces
            .iter()
            .find(|s| s.max_len().is_some_and(|m| m < longest))
        {
            return Err(bad(format!(
                "{s} is too short for dilated length {longest}"
            )));
        }
    }
    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(bad("sample count must be at least 1".into()));
    }
    let seed = raw.seed.unwrap_or(base_seed);
    let budget = SearchBudget::new(
        raw.restarts.unwrap_or(DEFAULT_RESTARTS),
        raw.steps.unwrap_or(DEFAULT_STEPS),
        seed,
    )
    .map_err(|e| bad(e.to_string()))?;
    let ensembles = if raw.ensembles.is_empty() {
        vec![Ensemble::Gaussian]
    } else {
        raw.ensembles
            .iter()
            .map(|e| e.parse::<Ensemble>().map_err(|e| bad(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    Ok(SuiteConfig {
        name,
        spaces,
        pairs,
        dims,
        samples,
        seed,
        budget,
        ensembles,
        orders,
    })
}

/// The configuration shipped as `configs/default.toml`.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

pub fn default_config() -> ExperimentConfig {
    ExperimentConfig::parse(DEFAULT_CONFIG).expect("bundled default config is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_has_no_suites() {
        let c = ExperimentConfig::parse("").unwrap();
        assert!(c.suites.is_empty());
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn suite_names_round_trip() {
        for n in SuiteName::ALL {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn rejects_bad_entries() {
        let cases = [
            "[[suite]]\nname = \"nope\"",
            "[[suite]]\nname = \"zsido-bound\"",
            "[[suite]]\nname = \"zsido-bound\"\nspaces = [\"schatten:p=-1\"]",
            "[[suite]]\nname = \"rearrangement\"\ndims = [0]",
            "[[suite]]\nname = \"rearrangement\"\nsamples = 0",
            "[[suite]]\nname = \"rearrangement\"\nbogus = 1",
            "[[suite]]\nname = \"holder-duality\"\npairs = [[\"uniform\", \"schatten:p=1\"]]",
            "[[suite]]\nname = \"zsido-bound\"\nspaces = [\"lorentz:p=1:w=harmonic:n=4\"]\ndims = [8]",
            "format = \"xml\"",
            "[[suite]\n",
        ];
        for text in cases {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn seed_override_reaches_budgets() {
        let c = ExperimentConfig::parse("[[suite]]\nname = \"rearrangement\"\nseed = 3")
            .unwrap()
            .with_seed(9);
        assert_eq!(c.suites[0].seed, 9);
        assert_eq!(c.suites[0].budget.seed(), 9);
    }

    #[test]
    fn bundled_default_is_valid() {
        let c = default_config();
        let names: Vec<_> = c.suites.iter().map(|s| s.name).collect();
        for n in SuiteName::ALL {
            assert!(names.contains(&n), "{n} missing from default config");
        }
    }
}
