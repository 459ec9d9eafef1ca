//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A mode number that may be fixed or derived from the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSpec {
    Fixed(u32),
    /// `Nmin + offset`.
    Auto(u32),
}

impl ModeSpec {
    pub fn resolve(self, nmin: u32) -> u32 {
        match self {
            ModeSpec::Fixed(n) => n,
            ModeSpec::Auto(k) => nmin + k,
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s == "auto" {
            return Ok(ModeSpec::Auto(0));
        }
        if let Some(rest) = s.strip_prefix("auto+") {
            return rest
                .trim()
                .parse()
                .map(ModeSpec::Auto)
                .map_err(|_| CliError::Config(format!("bad mode offset '{s}'")));
        }
        match s.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(ModeSpec::Fixed(n)),
            _ => Err(CliError::Config(format!(
                "mode must be a positive integer, 'auto' or 'auto+k', got '{s}'"
            ))),
        }
    }
}

impl std::fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeSpec::Fixed(n) => write!(f, "{n}"),
            ModeSpec::Auto(0) => write!(f, "auto"),
            ModeSpec::Auto(k) => write!(f, "auto+{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub major_radius: f64,
    pub minor_radius: f64,
    pub eps: f64,
    pub n: ModeSpec,
    pub nphi: usize,
    /// `None` selects the smallest multiple of `4n` that is at least 64.
    pub ntheta: Option<usize>,
    pub tol: f64,
    pub maxit: usize,
    pub tol_theta: f64,
    pub tol_phi_band: f64,
    pub band_delta: f64,
    pub eps_list: Vec<f64>,
    pub n_list: Vec<ModeSpec>,
    pub out: PathBuf,
    pub verbosity: u8,
    pub experimental_below_threshold: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            major_radius: 2.0,
            minor_radius: 1.0,
            eps: 0.05,
            n: ModeSpec::Auto(0),
            nphi: 401,
            ntheta: None,
            tol: 1e-10,
            maxit: 10_000,
            tol_theta: 1e-2,
            tol_phi_band: 5e-2,
            band_delta: 5e-2,
            eps_list: Vec::new(),
            n_list: Vec::new(),
            out: PathBuf::from("halftorus-out"),
            verbosity: 1,
            experimental_below_threshold: false,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: expected a finite number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> CliResult<usize> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: expected a non-negative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> CliResult<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim();
            if seen.insert(key.to_string(), lineno + 1).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            cfg.set(key, value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> CliResult<()> {
        match key {
            "R" => self.major_radius = parse_f64(key, v)?,
            "r" => self.minor_radius = parse_f64(key, v)?,
            "eps" => self.eps = parse_f64(key, v)?,
            "n" => self.n = ModeSpec::parse(v)?,
            "nphi" => self.nphi = parse_usize(key, v)?,
            "ntheta" => {
                self.ntheta = if v.trim() == "auto" {
                    None
                } else {
                    Some(parse_usize(key, v)?)
                }
            }
            "tol" => self.tol = parse_f64(key, v)?,
            "maxit" => self.maxit = parse_usize(key, v)?,
            "tol_theta" => self.tol_theta = parse_f64(key, v)?,
            "tol_phi_band" => self.tol_phi_band = parse_f64(key, v)?,
            "band_delta" => self.band_delta = parse_f64(key, v)?,
            "eps_list" => self.eps_list = list(v).map(|s| parse_f64(key, s)).collect::<CliResult<_>>()?,
            "n_list" => self.n_list = list(v).map(ModeSpec::parse).collect::<CliResult<_>>()?,
            "out" => self.out = PathBuf::from(v.trim()),
            "verbosity" => {
                self.verbosity = v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("verbosity: expected 0, 1 or 2, got '{v}'")))?
            }
            "experimental_below_threshold" => self.experimental_below_threshold = parse_bool(key, v)?,
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> CliResult<()> {
        halftorus::TorusShape::new(self.major_radius, self.minor_radius, self.eps, 1)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for &e in &self.eps_list {
            halftorus::TorusShape::new(self.major_radius, self.minor_radius, e, 1)
                .map_err(|err| CliError::Config(format!("eps_list entry {e}: {err}")))?;
        }
        if self.nphi < halftorus::RadialGrid::MIN_NODES {
            return Err(CliError::Config(format!("nphi = {} is below 16", self.nphi)));
        }
        if let Some(nt) = self.ntheta {
            if nt < halftorus::Grid2D::MIN_NODES {
                return Err(CliError::Config(format!("ntheta = {nt} is below 16")));
            }
        }
        let positive = [
            ("tol", self.tol),
            ("tol_theta", self.tol_theta),
            ("tol_phi_band", self.tol_phi_band),
            ("band_delta", self.band_delta),
        ];
        for (k, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(CliError::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if self.maxit == 0 {
            return Err(CliError::Config("maxit must be positive".into()));
        }
        if self.verbosity > 2 {
            return Err(CliError::Config(format!(
                "verbosity must be 0, 1 or 2, got {}",
                self.verbosity
            )));
        }
        Ok(())
    }

    /// Canonical `key = value` listing of every setting that affects results.
    pub fn canonical(&self) -> String {
        let f = |x: f64| format!("{x:e}");
        let mut s = String::new();
        let _ = writeln!(s, "R = {}", f(self.major_radius));
        let _ = writeln!(s, "r = {}", f(self.minor_radius));
        let _ = writeln!(s, "eps = {}", f(self.eps));
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "nphi = {}", self.nphi);
        let _ = writeln!(
            s,
            "ntheta = {}",
            self.ntheta.map_or_else(|| "auto".to_string(), |v| v.to_string())
        );
        let _ = writeln!(s, "tol = {}", f(self.tol));
        let _ = writeln!(s, "maxit = {}", self.maxit);
        let _ = writeln!(s, "tol_theta = {}", f(self.tol_theta));
        let _ = writeln!(s, "tol_phi_band = {}", f(self.tol_phi_band));
        let _ = writeln!(s, "band_delta = {}", f(self.band_delta));
        let eps: Vec<String> = self.eps_list.iter().map(|&e| f(e)).collect();
        let _ = writeln!(s, "eps_list = {}", eps.join(", "));
        let ns: Vec<String> = self.n_list.iter().map(ModeSpec::to_string).collect();
        let _ = writeln!(s, "n_list = {}", ns.join(", "));
        let _ = writeln!(
            s,
            "experimental_below_threshold = {}",
            self.experimental_below_threshold
        );
        s
    }

    /// SHA-256 of [`RunConfig::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
