//! Run configuration: a `key = value` file overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use cubic_census::Signature;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "CUBIC_CENSUS_CACHE";

/// Special functions are evaluated in `f64`; more digits cannot be honored.
pub const MAX_PRECISION_DIGITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SigChoice {
    Positive,
    Negative,
    Both,
}

impl SigChoice {
    pub fn signatures(self) -> Vec<Signature> {
        match self {
            SigChoice::Positive => vec![Signature::PositiveDisc],
            SigChoice::Negative => vec![Signature::NegativeDisc],
            SigChoice::Both => vec![Signature::PositiveDisc, Signature::NegativeDisc],
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "positive" | "pos" | "+" => Some(SigChoice::Positive),
            "negative" | "neg" | "-" => Some(SigChoice::Negative),
            "both" => Some(SigChoice::Both),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Effective settings after merging the config file and flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub max_disc: Option<f64>,
    pub signature: SigChoice,
    pub filter: String,
    /// Worker threads; `0` lets the pool decide. Never affects output.
    #[serde(skip)]
    pub threads: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    pub precision: u32,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_disc: None,
            signature: SigChoice::Both,
            filter: "all".into(),
            threads: 0,
            cache_dir: None,
            precision: MAX_PRECISION_DIGITS,
            format: Format::Csv,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub max_disc: Option<f64>,
    pub signature: Option<SigChoice>,
    pub filter: Option<String>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub precision: Option<u32>,
    pub format: Option<Format>,
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| ConfigError(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn bad(key: &str, v: &str) -> ConfigError {
    ConfigError(format!("config key {key}: invalid value {v:?}"))
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        for (k, v) in map {
            match k.as_str() {
                "max_disc" => c.max_disc = Some(v.parse().map_err(|_| bad(k, v))?),
                "signature" => c.signature = SigChoice::parse(v).ok_or_else(|| bad(k, v))?,
                "filter" => c.filter = v.clone(),
                "threads" => c.threads = v.parse().map_err(|_| bad(k, v))?,
                "cache_dir" => c.cache_dir = Some(PathBuf::from(v)),
                "precision" => c.precision = v.parse().map_err(|_| bad(k, v))?,
                "format" => {
                    c.format = match v.as_str() {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(bad(k, v)),
                    }
                }
                _ => return Err(ConfigError(format!("unknown config key {k}"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: Option<&Path>, flags: Overrides) -> Result<Self, ConfigError> {
        let mut c = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("cannot read config {}: {e}", p.display())))?;
                RunConfig::from_map(&parse_config_text(&text)?)?
            }
            None => RunConfig::default(),
        };
        if let Some(x) = flags.max_disc {
            c.max_disc = Some(x);
        }
        if let Some(s) = flags.signature {
            c.signature = s;
        }
        if let Some(f) = flags.filter {
            c.filter = f;
        }
        if let Some(t) = flags.threads {
            c.threads = t;
        }
        if let Some(d) = flags.cache_dir {
            c.cache_dir = Some(d);
        }
        if let Some(p) = flags.precision {
            c.precision = p;
        }
        if let Some(f) = flags.format {
            c.format = f;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(x) = self.max_disc {
            if !(x.is_finite() && x >= 0.0) {
                return Err(ConfigError(format!("max_disc {x} must be a nonnegative number")));
            }
        }
        if self.precision == 0 || self.precision > MAX_PRECISION_DIGITS {
            return Err(ConfigError(format!("precision {} outside 1..={MAX_PRECISION_DIGITS} digits", self.precision)));
        }
        cubic_census::enumerate::ClassFilter::parse(&self.filter).map_err(|e| ConfigError(e.to_string()))?;
        Ok(())
    }

    /// SHA-256 over the output-relevant settings and the command line
    /// arguments, first 16 hex digits.
    pub fn hash(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).expect("serializable").as_bytes());
        h.update(b"\0");
        h.update(command.as_bytes());
        let digest = h.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
