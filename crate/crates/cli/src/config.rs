//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ltlab_core::verifier::Suite;
use ltlab_core::{Dimension, FamilyKind, FamilyParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Eval,
    Probe,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Eval => "eval",
            Command::Probe => "probe",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "verify" => Ok(Command::Verify),
            "eval" => Ok(Command::Eval),
            "probe" => Ok(Command::Probe),
            "sweep" => Ok(Command::Sweep),
            other => Err(format!("unknown command '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
            other => Err(format!("unknown format '{other}' (csv or json)")),
        }
    }
}

/// Functional selector of `eval` and `sweep`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalChoice {
    Leray,
    Hardy,
    Energy(ltlab_core::EnergyKind),
    Lq,
    Moser,
    Ft,
}

impl FromStr for FunctionalChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "leray" => Ok(FunctionalChoice::Leray),
            "hardy" => Ok(FunctionalChoice::Hardy),
            "lq" => Ok(FunctionalChoice::Lq),
            "moser" => Ok(FunctionalChoice::Moser),
            "ft" => Ok(FunctionalChoice::Ft),
            other => match other.strip_prefix("energy:") {
                Some(k) => k.parse().map(FunctionalChoice::Energy).map_err(|e| e.to_string()),
                None => Err(format!(
                    "unknown functional '{other}' (leray, hardy, energy:grad_n_x1|mixed_link2|ft_weight, lq, moser, ft)"
                )),
            },
        }
    }
}

impl fmt::Display for FunctionalChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalChoice::Leray => f.write_str("leray"),
            FunctionalChoice::Hardy => f.write_str("hardy"),
            FunctionalChoice::Energy(k) => write!(f, "energy:{}", k.name()),
            FunctionalChoice::Lq => f.write_str("lq"),
            FunctionalChoice::Moser => f.write_str("moser"),
            FunctionalChoice::Ft => f.write_str("ft"),
        }
    }
}

/// Swept parameter of `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eps,
    Amplitude,
    Q,
    Alpha,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Eps => "eps",
            SweepParam::Amplitude => "amplitude",
            SweepParam::Q => "q",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eps" => Ok(SweepParam::Eps),
            "amplitude" => Ok(SweepParam::Amplitude),
            "q" => Ok(SweepParam::Q),
            "alpha" => Ok(SweepParam::Alpha),
            "beta" => Ok(SweepParam::Beta),
            other => Err(format!("unknown sweep parameter '{other}' (eps, amplitude, q, alpha, beta)")),
        }
    }
}

/// `lo:hi:steps`, `steps` equally spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            return Err(format!("range '{s}' is not lo:hi:steps"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad range start '{lo}'"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad range end '{hi}'"))?;
        let steps: usize = steps.parse().map_err(|_| format!("bad step count '{steps}'"))?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("range '{s}' needs finite ends and at least one step"));
        }
        Ok(SweepRange { lo, hi, steps })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub dims: Vec<usize>,
    pub suite: Suite,
    pub family: Option<FamilyParams>,
    pub functional: FunctionalChoice,
    pub q: Option<f64>,
    pub eps_grid: Vec<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub param: Option<SweepParam>,
    pub range: Option<SweepRange>,
}

pub const DEFAULT_DIMS: [usize; 3] = [2, 3, 4];
pub const DEFAULT_EPS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            dims: match command {
                Command::Verify => DEFAULT_DIMS.to_vec(),
                _ => vec![2],
            },
            suite: Suite::All,
            family: None,
            functional: FunctionalChoice::Leray,
            q: None,
            eps_grid: DEFAULT_EPS.to_vec(),
            alpha: None,
            beta: None,
            tol: None,
            seed: 0,
            out_path: None,
            format: None,
            param: None,
            range: None,
        }
    }

    /// Output format: explicit, else from the file extension, else CSV.
    pub fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.out_path.as_ref().and_then(|p| p.extension()) {
            Some(e) if e == "json" => Format::Json,
            _ => Format::Csv,
        })
    }

    pub fn dimensions(&self) -> Result<Vec<Dimension>, CliError> {
        self.dims
            .iter()
            .map(|&d| Dimension::new(d).map_err(|e| CliError::Usage(e.to_string())))
            .collect()
    }

    pub fn family_or_default(&self) -> FamilyParams {
        self.family
            .clone()
            .unwrap_or_else(|| FamilyParams::new(FamilyKind::Bump, 0.5, 1.0))
    }

    /// Sets one key; `key` uses the flag spelling without dashes (`-` and
    /// `_` are interchangeable).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "command" => self.command = v.parse()?,
            "dims" | "dim" => self.dims = parse_list(v)?,
            "suite" => self.suite = v.parse().map_err(|e: ltlab_core::Error| e.to_string())?,
            "family" => self.family = Some(v.parse().map_err(|e: ltlab_core::Error| e.to_string())?),
            "functional" => self.functional = v.parse()?,
            "q" => self.q = Some(parse_num(v)?),
            "eps" | "eps_grid" => self.eps_grid = parse_list(v)?,
            "alpha" => self.alpha = Some(parse_num(v)?),
            "beta" => self.beta = Some(parse_num(v)?),
            "tol" => self.tol = Some(parse_num(v)?),
            "seed" => self.seed = parse_num(v)?,
            "out" | "out_path" => self.out_path = Some(PathBuf::from(v)),
            "format" => self.format = Some(v.parse()?),
            "param" => self.param = Some(v.parse()?),
            "range" => self.range = Some(v.parse()?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse '{s}'"))
}

/// Comma-separated list without spaces.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_num).collect()
}

pub type ConfigEntry = (usize, String, String);

/// `(line number, key, value)` triples of a config file.
pub fn parse_config_text(text: &str) -> Result<Vec<ConfigEntry>, (usize, String)> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err((k + 1, format!("expected 'key = value', found '{line}'")));
        };
        if key.trim().is_empty() {
            return Err((k + 1, "empty key".into()));
        }
        out.push((k + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Applies a config file on top of `base`.
pub fn apply_config_file(base: &mut RunConfig, path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let entries = parse_config_text(&text).map_err(|(line, message)| CliError::Config {
        path: path.to_path_buf(),
        line,
        message,
    })?;
    for (line, key, value) in entries {
        base.set(&key, &value).map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            line,
            message,
        })?;
    }
    Ok(())
}

/// Reads a config file; the command defaults to `verify` unless the file
/// names one.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(Command::Verify);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    if let Ok(entries) = parse_config_text(&text) {
        if let Some((_, _, c)) = entries.iter().find(|(_, k, _)| k == "command") {
            if let Ok(c) = c.parse() {
                cfg = RunConfig::new(c);
            }
        }
    }
    apply_config_file(&mut cfg, path)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_and_comments() {
        let e = parse_config_text("# header\nsuite = core # trailing\n\ndims = 2\n").unwrap();
        assert_eq!(e, vec![(2, "suite".into(), "core".into()), (4, "dims".into(), "2".into())]);
        let mut c = RunConfig::new(Command::Verify);
        for (_, k, v) in e {
            c.set(&k, &v).unwrap();
        }
        assert_eq!(c.suite, Suite::Core);
        assert_eq!(c.dims, vec![2]);
    }

    #[test]
    fn bad_line_reports_its_number() {
        assert_eq!(parse_config_text("suite = core\noops\n").unwrap_err().0, 2);
    }

    #[test]
    fn ranges_and_lists() {
        let r: SweepRange = "0.1:0.5:5".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 5);
        assert!((p[2] - 0.3).abs() < 1e-15);
        assert!("1:2".parse::<SweepRange>().is_err());
        assert!("1:2:0".parse::<SweepRange>().is_err());
        assert_eq!(parse_list::<f64>("0.1,0.03").unwrap(), vec![0.1, 0.03]);
        assert!(parse_list::<usize>("2, 3").is_err());
    }

    #[test]
    fn functional_names() {
        for s in ["leray", "hardy", "energy:grad_n_x1", "energy:mixed_link2", "energy:ft_weight", "lq", "moser", "ft"] {
            assert_eq!(s.parse::<FunctionalChoice>().unwrap().to_string(), s);
        }
        assert!("energy:nope".parse::<FunctionalChoice>().is_err());
    }
}
