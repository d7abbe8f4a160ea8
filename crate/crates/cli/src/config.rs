//! Run configuration: command-line flags over a `key=value` file over
//! defaults, validated before anything is computed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use tlspin::chain::{Boundary, ChainSpec};
use tlspin::{AlgebraSpec, Family, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    So,
    Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Algebra family.
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyArg>,
    /// Fundamental dimension N.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Deformation parameter q > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Branch of the rapidity parameter η.
    #[arg(long, global = true, value_enum)]
    pub sign: Option<SignArg>,
    /// Chain length r.
    #[arg(long, global = true)]
    pub length: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// Truncation order of the series propagator.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Comma-separated sample times.
    #[arg(long = "t-samples", global = true)]
    pub t_samples: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `key=value` file supplying defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: AlgebraSpec,
    pub sign: Sign,
    pub length: usize,
    pub boundary: Boundary,
    pub order: Option<usize>,
    pub t_samples: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn chain(&self) -> Result<ChainSpec, String> {
        ChainSpec::new(self.spec, self.length, self.boundary, self.sign).map_err(|e| e.to_string())
    }
}

const KEYS: [&str; 10] = ["family", "n", "q", "sign", "length", "boundary", "order", "t_samples", "out", "format"];

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value, got '{raw}'", lineno + 1))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key '{}'", lineno + 1, k.trim()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config_text(&text)
}

fn from_file<T>(file: &BTreeMap<String, String>, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, String> {
    file.get(key).map(|v| parse(v).map_err(|e| format!("config key {key}: {e}"))).transpose()
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse::<T>().map_err(|_| format!("cannot parse '{s}'"))
}

fn parse_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true)
}

pub fn parse_times(s: &str) -> Result<Vec<f64>, String> {
    let ts: Vec<f64> = s.split(',').map(|p| parse_num::<f64>(p.trim())).collect::<Result<_, _>>()?;
    if ts.is_empty() || ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(format!("sample times must be finite and non-negative, got '{s}'"));
    }
    Ok(ts)
}

/// Merges flags, the optional config file and defaults, then validates.
pub fn resolve(args: &GlobalArgs) -> Result<RunConfig, String> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let family = args.family.or(from_file(&file, "family", parse_enum::<FamilyArg>)?).unwrap_or(FamilyArg::So);
    let n = args.n.or(from_file(&file, "n", parse_num::<usize>)?).unwrap_or(3);
    let q = args.q.or(from_file(&file, "q", parse_num::<f64>)?).unwrap_or(1.0);
    let sign = args.sign.or(from_file(&file, "sign", parse_enum::<SignArg>)?).unwrap_or(SignArg::Plus);
    let length = args.length.or(from_file(&file, "length", parse_num::<usize>)?).unwrap_or(4);
    let boundary = args.boundary.or(from_file(&file, "boundary", parse_enum::<BoundaryArg>)?).unwrap_or(BoundaryArg::Open);
    let order = args.order.or(from_file(&file, "order", parse_num::<usize>)?);
    let t_samples = match &args.t_samples {
        Some(s) => Some(parse_times(s)?),
        None => from_file(&file, "t_samples", parse_times)?,
    };
    let out = args.out.clone().or(from_file(&file, "out", |s| Ok(PathBuf::from(s)))?);
    let format = args.format.or(from_file(&file, "format", parse_enum::<Format>)?);

    let family = match family {
        FamilyArg::So => Family::Orthogonal,
        FamilyArg::Sp => Family::Symplectic,
    };
    let spec = AlgebraSpec::new(family, n, q).map_err(|e| e.to_string())?;
    let sign = match sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    };
    let boundary = match boundary {
        BoundaryArg::Open => Boundary::Open,
        BoundaryArg::Closed => Boundary::Closed,
    };
    if length < 2 {
        return Err(format!("chain length must be at least 2, got {length}"));
    }
    if boundary == Boundary::Closed && length < 3 {
        return Err("a closed chain needs at least 3 sites".into());
    }
    if order == Some(0) {
        return Err("order must be at least 1".into());
    }
    Ok(RunConfig { spec, sign, length, boundary, order, t_samples, out, format })
}
