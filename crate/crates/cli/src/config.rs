//! Run configuration: a TOML file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use hminus_core::ball::Ball;
use hminus_core::bounds::{c_min, VerifyConfig, XPoint};
use hminus_core::classnumber::PrecisionPolicy;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Overrides the cache path from the config file.
pub const CACHE_ENV: &str = "HMINUS_CACHE";
pub const DEFAULT_CACHE: &str = "hminus-cache.jsonl";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Starting bits for the analytic class number; absent means automatic.
    pub initial_bits: Option<u32>,
    pub max_bits: u32,
    /// Output precision of real enclosures.
    pub prec: u32,
    pub siegel_prec: u32,
    /// Both class number methods are run up to this prime.
    pub oracle_ceiling: u64,
    /// Entries like `2p`, `p^2` or `10000000`.
    pub x_grid: Vec<String>,
    pub nu: Vec<u64>,
    pub sigma_steps: Vec<u32>,
    pub eq2_sigma: u32,
    pub eq2_x: u64,
    /// Decimal string; absent means each bound's default.
    pub c: Option<String>,
    pub force_indicator: bool,
    pub format: Format,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            initial_bits: None,
            max_bits: 1 << 20,
            prec: 128,
            siegel_prec: 64,
            oracle_ceiling: 199,
            x_grid: ["2p", "10p", "p^2", "10000000"].map(String::from).to_vec(),
            nu: vec![0, 1, 2, 3],
            sigma_steps: vec![1, 2],
            eq2_sigma: 2,
            eq2_x: 10_000_000,
            c: None,
            force_indicator: false,
            format: Format::Jsonl,
            cache: None,
            jobs: 1,
        }
    }
}

pub fn parse_x_point(s: &str) -> Result<XPoint> {
    let s = s.trim();
    if s == "p^2" || s == "p2" {
        return Ok(XPoint::PSquared);
    }
    if let Some(k) = s.strip_suffix('p') {
        return k
            .parse()
            .map(XPoint::TimesP)
            .map_err(|_| CliError::Config(format!("bad x-grid entry {s:?}")));
    }
    s.parse()
        .map(XPoint::Fixed)
        .map_err(|_| CliError::Config(format!("bad x-grid entry {s:?}")))
}

pub fn parse_c(s: &str, prec: u32) -> Result<Ball> {
    let c = Ball::from_decimal(s.trim(), prec).ok_or_else(|| CliError::Invalid(format!("c = {s:?} is not a decimal")))?;
    if c.certainly_lt(&c_min(prec)) {
        return Err(CliError::Invalid(format!("c = {s} is below 6.4355")));
    }
    Ok(c)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.initial_bits {
            if b == 0 || b > self.max_bits {
                return Err(CliError::Config(format!("initial_bits {b} must lie in 1..=max_bits ({})", self.max_bits)));
            }
        }
        if self.prec < 32 || self.siegel_prec < 32 {
            return Err(CliError::Config("prec and siegel_prec must be at least 32".into()));
        }
        for x in &self.x_grid {
            parse_x_point(x)?;
        }
        if self.nu.iter().any(|&n| n > 20) {
            return Err(CliError::Config("nu values above 20 are not supported".into()));
        }
        if self.sigma_steps.iter().any(|&k| !(1..=2).contains(&k)) {
            return Err(CliError::Config("sigma_steps must be 1 or 2".into()));
        }
        if !(2..=3).contains(&self.eq2_sigma) {
            return Err(CliError::Config("eq2_sigma must be 2 or 3".into()));
        }
        if let Some(c) = &self.c {
            parse_c(c, self.prec)?;
        }
        if self.jobs == 0 {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        Ok(())
    }

    /// Flag, then the environment, then the config file, then the default.
    pub fn cache_path(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE))
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy {
            initial_bits: self.initial_bits,
            max_bits: self.max_bits,
        }
    }

    pub fn c_ball(&self) -> Result<Option<Ball>> {
        self.c.as_deref().map(|c| parse_c(c, self.prec)).transpose()
    }

    pub fn siegel_c(&self) -> Result<Ball> {
        Ok(self.c_ball()?.unwrap_or_else(|| c_min(self.prec)))
    }

    pub fn verify_config(&self) -> Result<VerifyConfig> {
        Ok(VerifyConfig {
            prec: self.prec,
            c: self.c_ball()?,
            x_grid: self.x_grid.iter().map(|s| parse_x_point(s)).collect::<Result<_>>()?,
            nus: self.nu.clone(),
            sigma_steps: self.sigma_steps.clone(),
            eq2_sigma: self.eq2_sigma,
            eq2_x: self.eq2_x,
            force_indicator: self.force_indicator,
            policy: self.policy(),
            siegel_prec: self.siegel_prec,
        })
    }

    /// Hash of the settings that affect records of `kind`.
    pub fn fingerprint(&self, kind: &str, method: Option<&str>) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            kind: &'a str,
            method: Option<&'a str>,
            initial_bits: Option<u32>,
            max_bits: u32,
            prec: u32,
            siegel_prec: u32,
            c: Option<&'a str>,
        }
        let key = match kind {
            "siegel" => Key {
                kind,
                method: None,
                initial_bits: None,
                max_bits: 0,
                prec: self.prec,
                siegel_prec: self.siegel_prec,
                c: Some(self.c.as_deref().unwrap_or(hminus_core::bounds::C_MIN)),
            },
            _ => Key {
                kind,
                method,
                initial_bits: self.initial_bits,
                max_bits: self.max_bits,
                prec: self.prec,
                siegel_prec: 0,
                c: None,
            },
        };
        let bytes = serde_json::to_vec(&key).expect("key serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
