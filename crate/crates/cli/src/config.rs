//! Flat `key = value` run configuration.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored. Angles
//! accept decimals or `pi` literals such as `pi/4`, `3pi/8`, `3*pi/8`,
//! `0.25*pi`. Lists are comma separated.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lev,
    Regularizing,
    Darboux,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lev => "lev",
            Method::Regularizing => "regularizing",
            Method::Darboux => "darboux",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lev" => Ok(Method::Lev),
            "regularizing" => Ok(Method::Regularizing),
            "darboux" => Ok(Method::Darboux),
            _ => Err(format!("expected lev, regularizing or darboux, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json-lines" | "jsonl" | "json" => Ok(Format::JsonLines),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("expected json-lines or csv, got `{s}`")),
        }
    }
}

/// Which `x` data the holonomy commands run on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataSource {
    /// Pinned second-order Taylor data.
    Taylor,
    /// Gauss-Newton solution of the monodromy problem.
    Solved,
}

impl FromStr for DataSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "taylor" => Ok(DataSource::Taylor),
            "solved" => Ok(DataSource::Solved),
            _ => Err(format!("expected taylor or solved, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub phi: f64,
    pub genus: u32,
    pub degree: usize,
    pub samples: usize,
    pub ode_tol: f64,
    pub quad_tol: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
    pub method: Method,
    pub data: DataSource,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub sweep_phi: Vec<f64>,
    pub sweep_genus: Vec<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            phi: FRAC_PI_4,
            genus: 50,
            degree: 3,
            samples: 8,
            ode_tol: 1e-10,
            quad_tol: 1e-10,
            // truncation floor of the default degree is near 2e-8 at g = 50
            solver_tol: 1e-7,
            max_iter: 15,
            method: Method::Lev,
            data: DataSource::Taylor,
            format: Format::JsonLines,
            output: None,
            sweep_phi: vec![std::f64::consts::PI / 6.0, FRAC_PI_4, std::f64::consts::PI / 3.0],
            sweep_genus: vec![50, 100, 200],
        }
    }
}

pub const COMMANDS: [&str; 7] =
    ["sphere-check", "torus", "lawson-volume", "lawson-holonomy", "solve-monodromy", "verify", "sweep"];

pub const KEYS: [&str; 15] = [
    "command",
    "phi",
    "genus",
    "degree",
    "samples",
    "ode_tol",
    "quad_tol",
    "solver_tol",
    "max_iter",
    "method",
    "data",
    "format",
    "output",
    "sweep_phi",
    "sweep_genus",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Flag(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    UnknownKey,
    Malformed,
    Range,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub location: Location,
    pub key: String,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::Line(n) => write!(f, "line {n}: ")?,
            Location::Flag(name) => write!(f, "flag --{name}: ")?,
        }
        let kind = match self.kind {
            ErrorKind::UnknownKey => "unknown key",
            ErrorKind::Malformed => "malformed value for",
            ErrorKind::Range => "out of range:",
            ErrorKind::Duplicate => "duplicate key",
        };
        write!(f, "{kind} `{}`", self.key)?;
        if !self.message.is_empty() {
            write!(f, " ({})", self.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// `pi` literal or decimal.
pub fn parse_angle(s: &str) -> Option<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().ok().filter(|x| x.is_finite());
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let coef = match head.strip_suffix('*').unwrap_or(head) {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().ok()?,
    };
    let den = match tail {
        "" => 1.0,
        _ => tail.strip_prefix('/')?.parse::<f64>().ok().filter(|d| *d != 0.0)?,
    };
    let v = coef * std::f64::consts::PI / den;
    v.is_finite().then_some(v)
}

fn list<T>(raw: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let v: Option<Vec<T>> = raw.split(',').map(|p| item(p.trim())).collect();
    v.filter(|v| !v.is_empty())
}

fn err(location: Location, key: &str, kind: ErrorKind, message: impl Into<String>) -> ConfigError {
    ConfigError { location, key: key.to_string(), kind, message: message.into() }
}

fn check_phi(phi: f64) -> Result<(), String> {
    if phi > 0.0 && phi < FRAC_PI_2 {
        Ok(())
    } else {
        Err(format!("{phi} not in (0, pi/2)"))
    }
}

fn check_genus(g: u32) -> Result<(), String> {
    if g >= 2 {
        Ok(())
    } else {
        Err(format!("{g} < 2"))
    }
}

fn check_tol(x: f64) -> Result<(), String> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(format!("{x} is not positive"))
    }
}

fn check_count(n: usize) -> Result<(), String> {
    if n >= 1 {
        Ok(())
    } else {
        Err("must be at least 1".into())
    }
}

impl RunConfig {
    /// Parse `value` into the field named `key` and range-check it.
    pub fn set(&mut self, key: &str, value: &str, location: Location) -> Result<(), ConfigError> {
        let malformed = |msg: &str| err(location.clone(), key, ErrorKind::Malformed, msg);
        let range = |msg: String| err(location.clone(), key, ErrorKind::Range, msg);
        let int = |v: &str| v.parse::<u64>().map_err(|_| malformed("expected a non-negative integer"));
        let real = |v: &str| v.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| malformed("expected a number"));
        match key {
            "command" => {
                if !COMMANDS.contains(&value) {
                    return Err(malformed(&format!("expected one of {}", COMMANDS.join(", "))));
                }
                self.command = Some(value.to_string());
            }
            "phi" => {
                let phi = parse_angle(value).ok_or_else(|| malformed("expected an angle such as 0.7 or pi/4"))?;
                check_phi(phi).map_err(range)?;
                self.phi = phi;
            }
            "genus" => {
                let g = u32::try_from(int(value)?).map_err(|_| range("too large".into()))?;
                check_genus(g).map_err(range)?;
                self.genus = g;
            }
            "degree" => {
                self.degree = int(value)? as usize;
                check_count(self.degree).map_err(range)?;
            }
            "samples" => {
                self.samples = int(value)? as usize;
                check_count(self.samples).map_err(range)?;
            }
            "max_iter" => {
                self.max_iter = int(value)? as usize;
                check_count(self.max_iter).map_err(range)?;
            }
            "ode_tol" | "quad_tol" | "solver_tol" => {
                let x = real(value)?;
                check_tol(x).map_err(range)?;
                match key {
                    "ode_tol" => self.ode_tol = x,
                    "quad_tol" => self.quad_tol = x,
                    _ => self.solver_tol = x,
                }
            }
            "method" => self.method = value.parse().map_err(|m: String| malformed(&m))?,
            "data" => self.data = value.parse().map_err(|m: String| malformed(&m))?,
            "format" => self.format = value.parse().map_err(|m: String| malformed(&m))?,
            "output" => {
                if value.is_empty() {
                    return Err(malformed("empty path"));
                }
                self.output = Some(PathBuf::from(value));
            }
            "sweep_phi" => {
                let v = list(value, parse_angle).ok_or_else(|| malformed("expected a comma separated list of angles"))?;
                for phi in &v {
                    check_phi(*phi).map_err(range)?;
                }
                self.sweep_phi = v;
            }
            "sweep_genus" => {
                let v = list(value, |p| p.parse::<u32>().ok())
                    .ok_or_else(|| malformed("expected a comma separated list of integers"))?;
                for g in &v {
                    check_genus(*g).map_err(range)?;
                }
                self.sweep_genus = v;
            }
            _ => return Err(err(location, key, ErrorKind::UnknownKey, format!("known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(err(Location::Line(n), line, ErrorKind::Malformed, "expected `key = value`"));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(err(Location::Line(n), k, ErrorKind::UnknownKey, format!("known keys: {}", KEYS.join(", "))));
        }
        if seen.iter().any(|s| s == k) {
            return Err(err(Location::Line(n), k, ErrorKind::Duplicate, ""));
        }
        seen.push(k.to_string());
        cfg.set(k, v, Location::Line(n))?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4"), Some(FRAC_PI_4));
        assert_eq!(parse_angle("3pi/8"), Some(3.0 * PI / 8.0));
        assert_eq!(parse_angle("3 * pi / 8"), Some(3.0 * PI / 8.0));
        assert_eq!(parse_angle("0.25*pi"), Some(0.25 * PI));
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("-pi/4"), Some(-FRAC_PI_4));
        assert_eq!(parse_angle("0.7"), Some(0.7));
        for bad in ["", "pi/", "pi/0", "2pie", "x", "pi4", "inf", "1/4"] {
            assert_eq!(parse_angle(bad), None, "{bad}");
        }
    }

    #[test]
    fn example_file() {
        let cfg = parse_config("phi = pi/4\ngenus = 50").unwrap();
        assert_eq!(cfg.phi, FRAC_PI_4);
        assert_eq!(cfg.genus, 50);
        assert_eq!(cfg.degree, 3);
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.degree, cfg.samples, cfg.ode_tol, cfg.quad_tol), (3, 8, 1e-10, 1e-10));
        assert_eq!(cfg.method, Method::Lev);
        assert_eq!(cfg.format, Format::JsonLines);
        assert_eq!(parse_config("# nothing\n\n   \n").unwrap(), RunConfig::default());
    }

    #[test]
    fn phi_range_error_names_phi() {
        let e = parse_config("genus = 10\nphi = 2").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Range);
        assert_eq!(e.key, "phi");
        assert_eq!(e.location, Location::Line(2));
        assert!(e.to_string().contains("phi") && e.to_string().starts_with("line 2"));
    }

    #[test]
    fn error_kinds_carry_lines() {
        let e = parse_config("phi = pi/4\n\ncolour = red").unwrap_err();
        assert_eq!((e.kind, e.location.clone()), (ErrorKind::UnknownKey, Location::Line(3)));
        let e = parse_config("genus = many").unwrap_err();
        assert_eq!((e.kind, e.key.as_str()), (ErrorKind::Malformed, "genus"));
        let e = parse_config("genus = 1").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Range);
        let e = parse_config("ode_tol = -1e-3").unwrap_err();
        assert_eq!((e.kind, e.key.as_str()), (ErrorKind::Range, "ode_tol"));
        let e = parse_config("method = magic").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Malformed);
        let e = parse_config("phi pi/4").unwrap_err();
        assert_eq!((e.kind, e.location.clone()), (ErrorKind::Malformed, Location::Line(1)));
        let e = parse_config("genus = 3\ngenus = 4").unwrap_err();
        assert_eq!((e.kind, e.location.clone()), (ErrorKind::Duplicate, Location::Line(2)));
        let e = parse_config("sweep_phi = pi/6, 3").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Range);
    }

    #[test]
    fn comments_and_lists() {
        let cfg = parse_config(
            "# sweep setup\nsweep_phi = pi/6, pi/4 # two angles\nsweep_genus = 4,8\nformat = csv\nmethod = darboux\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep_phi, vec![PI / 6.0, FRAC_PI_4]);
        assert_eq!(cfg.sweep_genus, vec![4, 8]);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.method, Method::Darboux);
    }
}
