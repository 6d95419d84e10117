//! Pipeline parameters: a JSON config file, flag-style overrides, and the
//! resolved, validated set the rest of the crate consumes.
//!
//! Durations are written as strings ("15m", "1h", "900s", or bare
//! seconds). The resolved config serializes to a canonical JSON form whose
//! SHA-256 labels a run in the output manifest.

use std::fmt;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::symbolize::Alphabet;

/// A positive duration in whole seconds, parsed from `<n>s`, `<n>m`,
/// `<n>h`, or a bare integer of seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DurationSpec(u64);

impl DurationSpec {
    pub fn from_secs(secs: u64) -> Self {
        Self(secs)
    }

    pub fn seconds(self) -> u64 {
        self.0
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::Config(format!(
                "unparseable duration \"{s}\" (try \"15m\" or \"1h\")"
            ))
        };
        let (digits, unit) = match s.strip_suffix(['s', 'm', 'h']) {
            Some(d) => (d, &s[s.len() - 1..]),
            None => (s, "s"),
        };
        let n: u64 = digits.parse().map_err(|_| bad())?;
        let secs = match unit {
            "s" => n,
            "m" => n * 60,
            "h" => n * 3600,
            _ => unreachable!("strip_suffix limits the unit"),
        };
        if secs == 0 {
            return Err(Error::Config(format!("duration \"{s}\" must be positive")));
        }
        Ok(Self(secs))
    }
}

impl fmt::Display for DurationSpec {
    /// Canonical form: whole hours as `h`, else whole minutes as `m`,
    /// else seconds.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(3600) {
            write!(f, "{}h", self.0 / 3600)
        } else if self.0.is_multiple_of(60) {
            write!(f, "{}m", self.0 / 60)
        } else {
            write!(f, "{}s", self.0)
        }
    }
}

impl Serialize for DurationSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DurationSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        DurationSpec::parse(&s).map_err(D::Error::custom)
    }
}

/// How the symbol alphabet is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    /// `{"symbols": n}`: n equal-width bins labelled a, b, c, ...
    Uniform { symbols: usize },
    /// Explicit labels and strictly ascending interior cut points.
    Explicit {
        labels: Vec<char>,
        boundaries: Vec<f64>,
    },
}

impl AlphabetSpec {
    pub fn uniform(symbols: usize) -> Self {
        AlphabetSpec::Uniform { symbols }
    }

    pub fn to_alphabet(&self) -> Result<Alphabet> {
        match self {
            AlphabetSpec::Uniform { symbols } => Alphabet::uniform(*symbols),
            AlphabetSpec::Explicit { labels, boundaries } => {
                Alphabet::new(labels.clone(), boundaries.clone())
            }
        }
    }
}

/// Whether each channel is normalized against its own range or against
/// the range of all channels of the series together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizationScope {
    #[serde(rename = "per-channel")]
    PerChannel,
    #[serde(rename = "global")]
    Global,
}

/// Fully resolved pipeline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub window_length: DurationSpec,
    pub stride: DurationSpec,
    pub delta: usize,
    pub alphabet: AlphabetSpec,
    pub epsilon_on: f64,
    pub tolerance: f64,
    pub scope: NormalizationScope,
}

impl Default for PipelineConfig {
    /// Hour-long non-overlapping windows, 4 uniform symbols, 3-frame
    /// motifs, zero on-threshold, 5% conservation tolerance, per-channel
    /// normalization.
    fn default() -> Self {
        Self {
            window_length: DurationSpec::from_secs(3600),
            stride: DurationSpec::from_secs(3600),
            delta: 3,
            alphabet: AlphabetSpec::uniform(4),
            epsilon_on: 0.0,
            tolerance: 0.05,
            scope: NormalizationScope::PerChannel,
        }
    }
}

impl PipelineConfig {
    /// Check every parse-time checkable precondition.
    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(Error::Config("delta must be at least 1".into()));
        }
        if self.stride.seconds() > self.window_length.seconds() {
            return Err(Error::Config(format!(
                "stride {} exceeds window length {}",
                self.stride, self.window_length
            )));
        }
        if !self.epsilon_on.is_finite() || self.epsilon_on < 0.0 {
            return Err(Error::Config(format!(
                "epsilon_on must be a non-negative power in kW, got {}",
                self.epsilon_on
            )));
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            return Err(Error::Config(format!(
                "tolerance must be a non-negative fraction, got {}",
                self.tolerance
            )));
        }
        self.alphabet.to_alphabet()?;
        Ok(())
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        self.alphabet.to_alphabet()
    }

    /// Canonical JSON form: pretty-printed, fixed key order, durations in
    /// their canonical spelling, trailing newline.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config always serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn sha256_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Optional fields as they appear in a config file; anything omitted
/// falls back to the defaults (stride falls back to the window length).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub window_length: Option<DurationSpec>,
    pub stride: Option<DurationSpec>,
    pub delta: Option<usize>,
    pub alphabet: Option<AlphabetSpec>,
    pub epsilon_on: Option<f64>,
    pub tolerance: Option<f64>,
    pub scope: Option<NormalizationScope>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Flag-style overrides layered on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub window: Option<DurationSpec>,
    pub stride: Option<DurationSpec>,
    pub delta: Option<usize>,
    pub alphabet_symbols: Option<usize>,
    pub epsilon_on: Option<f64>,
}

/// Defaults, overlaid by the config file, overlaid by explicit overrides,
/// then validated. A stride set nowhere follows the resolved window
/// length, keeping windows non-overlapping by default.
pub fn resolve_config(
    file: Option<ConfigFile>,
    overrides: &ConfigOverrides,
) -> Result<PipelineConfig> {
    let defaults = PipelineConfig::default();
    let file = file.unwrap_or_default();

    let window_length = overrides
        .window
        .or(file.window_length)
        .unwrap_or(defaults.window_length);
    let stride = overrides.stride.or(file.stride).unwrap_or(window_length);
    let alphabet = match overrides.alphabet_symbols {
        Some(n) => AlphabetSpec::uniform(n),
        None => file.alphabet.unwrap_or(defaults.alphabet),
    };
    let config = PipelineConfig {
        window_length,
        stride,
        delta: overrides.delta.or(file.delta).unwrap_or(defaults.delta),
        alphabet,
        epsilon_on: overrides
            .epsilon_on
            .or(file.epsilon_on)
            .unwrap_or(defaults.epsilon_on),
        tolerance: file.tolerance.unwrap_or(defaults.tolerance),
        scope: file.scope.unwrap_or(defaults.scope),
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations_parse_in_all_units() {
        assert_eq!(DurationSpec::parse("15m").unwrap().seconds(), 900);
        assert_eq!(DurationSpec::parse("1h").unwrap().seconds(), 3600);
        assert_eq!(DurationSpec::parse("90s").unwrap().seconds(), 90);
        assert_eq!(DurationSpec::parse("900").unwrap().seconds(), 900);
        assert_eq!(DurationSpec::parse(" 2h ").unwrap().seconds(), 7200);
        for bad in ["0", "0m", "", "m", "1.5h", "-2m", "5d", "h1"] {
            assert!(DurationSpec::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn durations_print_canonically() {
        assert_eq!(DurationSpec::from_secs(3600).to_string(), "1h");
        assert_eq!(DurationSpec::from_secs(7200).to_string(), "2h");
        assert_eq!(DurationSpec::from_secs(900).to_string(), "15m");
        assert_eq!(DurationSpec::from_secs(5400).to_string(), "90m");
        assert_eq!(DurationSpec::from_secs(90).to_string(), "90s");
    }

    #[test]
    fn defaults_follow_the_documented_values() {
        let c = PipelineConfig::default();
        assert_eq!(c.window_length.seconds(), 3600);
        assert_eq!(c.stride.seconds(), 3600);
        assert_eq!(c.delta, 3);
        assert_eq!(c.alphabet, AlphabetSpec::uniform(4));
        assert_eq!(c.epsilon_on, 0.0);
        assert_eq!(c.tolerance, 0.05);
        assert_eq!(c.scope, NormalizationScope::PerChannel);
        c.validate().unwrap();
    }

    #[test]
    fn config_file_fields_overlay_defaults() {
        let file =
            ConfigFile::from_json(r#"{"window_length": "30m", "delta": 2, "scope": "global"}"#)
                .unwrap();
        let c = resolve_config(Some(file), &ConfigOverrides::default()).unwrap();
        assert_eq!(c.window_length.seconds(), 1800);
        // Stride was not set anywhere, so it follows the window.
        assert_eq!(c.stride.seconds(), 1800);
        assert_eq!(c.delta, 2);
        assert_eq!(c.scope, NormalizationScope::Global);
        assert_eq!(c.tolerance, 0.05);
    }

    #[test]
    fn overrides_beat_the_config_file() {
        let file = ConfigFile::from_json(r#"{"window_length": "1h", "stride": "30m"}"#).unwrap();
        let overrides = ConfigOverrides {
            window: Some(DurationSpec::parse("2h").unwrap()),
            delta: Some(5),
            alphabet_symbols: Some(6),
            ..Default::default()
        };
        let c = resolve_config(Some(file), &overrides).unwrap();
        assert_eq!(c.window_length.seconds(), 7200);
        // Explicit stride from the file survives a window override.
        assert_eq!(c.stride.seconds(), 1800);
        assert_eq!(c.delta, 5);
        assert_eq!(c.alphabet, AlphabetSpec::uniform(6));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(ConfigFile::from_json(r#"{"window": "1h"}"#).is_err());
    }

    #[test]
    fn explicit_alphabets_parse_from_json() {
        let file = ConfigFile::from_json(
            r#"{"alphabet": {"labels": ["L", "M", "H"], "boundaries": [0.3, 0.7]}}"#,
        )
        .unwrap();
        let c = resolve_config(Some(file), &ConfigOverrides::default()).unwrap();
        let alphabet = c.alphabet().unwrap();
        assert_eq!(alphabet.labels(), &['L', 'M', 'H']);
        assert_eq!(alphabet.boundaries(), &[0.3, 0.7]);
    }

    #[test]
    fn invalid_parameter_combinations_fail_validation() {
        let bad = [
            PipelineConfig {
                delta: 0,
                ..PipelineConfig::default()
            },
            PipelineConfig {
                stride: DurationSpec::from_secs(7200),
                ..PipelineConfig::default()
            },
            PipelineConfig {
                epsilon_on: -1.0,
                ..PipelineConfig::default()
            },
            PipelineConfig {
                tolerance: f64::NAN,
                ..PipelineConfig::default()
            },
            PipelineConfig {
                alphabet: AlphabetSpec::uniform(1),
                ..PipelineConfig::default()
            },
        ];
        for config in bad {
            assert!(config.validate().is_err(), "{config:?}");
        }
    }

    #[test]
    fn canonical_form_round_trips() {
        let c = resolve_config(
            Some(
                ConfigFile::from_json(r#"{"window_length": "120m", "epsilon_on": 0.25}"#).unwrap(),
            ),
            &ConfigOverrides::default(),
        )
        .unwrap();
        let canonical = c.canonical_json();
        // The 120-minute spelling normalizes to hours.
        assert!(canonical.contains("\"2h\""));
        let reparsed: PipelineConfig = serde_json::from_str(&canonical).unwrap();
        assert_eq!(reparsed, c);
        assert_eq!(reparsed.canonical_json(), canonical);
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = PipelineConfig::default();
        let b = PipelineConfig::default();
        assert_eq!(a.sha256_hex(), b.sha256_hex());
        assert_eq!(a.sha256_hex().len(), 64);
        let c = PipelineConfig {
            delta: 4,
            ..PipelineConfig::default()
        };
        assert_ne!(a.sha256_hex(), c.sha256_hex());
    }
}
