//! Command-line parsing into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Command {
    Eval,
    Sample,
    Mode,
    Classify,
    Certify,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Family {
    Gh,
    Gig,
    Mgh,
    Gigp,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Output {
    #[default]
    Json,
    Csv,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Sample => "sample",
            Command::Mode => "mode",
            Command::Classify => "classify",
            Command::Certify => "certify",
            Command::Sweep => "sweep",
        }
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gh => "gh",
            Family::Gig => "gig",
            Family::Mgh => "mgh",
            Family::Gigp => "gigp",
            Family::Custom => "custom",
        }
    }

    /// (required, optional) parameter keys.
    fn keys(self, subfamily: Option<&str>) -> (&'static [&'static str], &'static [&'static str]) {
        match (self, subfamily) {
            (Family::Gh, None) => (&["lambda", "alpha", "beta", "delta"], &["mu"]),
            (Family::Gh, Some("nig" | "hyperbolic")) => (&["alpha", "beta", "delta"], &["mu"]),
            (Family::Gh, Some("variance_gamma" | "vg")) => (&["lambda", "alpha", "beta"], &["mu"]),
            (Family::Gh, Some("student_t" | "t")) => (&["nu"], &["mu"]),
            (Family::Gh, Some(_)) => (&["alpha"], &["mu"]),
            (Family::Gig, _) => (&["lambda", "chi", "psi"], &[]),
            (Family::Mgh, _) => (&["lambda", "chi", "psi", "mu_vec", "beta_vec"], &["a_matrix", "direction"]),
            (Family::Gigp, _) => (&["lambda", "chi", "psi"], &["ymax"]),
            (Family::Custom, _) => (&["table", "left_power", "right_rate"], &["mu", "beta", "sigma"]),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parameter value as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        nvmix::shapecheck::linspace(self.lo, self.hi, self.n)
    }
}

/// `sweep` ranges one scalar parameter over `n` evenly spaced values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        nvmix::shapecheck::linspace(self.lo, self.hi, self.n)
    }
}

/// Tolerance keys accepted by `--tol` with their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 5] = [
    // second differences of ln f may reach this times max(1, |ln f|)
    ("curvature", 1e-9),
    // |mode - mu| below this times (1 + |mu|) counts as "at mu"
    ("mode", 1e-6),
    // orthogonal gradient components at a multivariate mode
    ("gradient", 1e-5),
    // random lines for multivariate certification
    ("trials", 100.0),
    // radius of the ball the random lines pass through
    ("radius", 3.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: Family,
    /// GH sub-family name (`nig`, `hyperbolic`, `vg`, `student_t`, `laplace`).
    pub subfamily: Option<String>,
    pub params: BTreeMap<String, ParamValue>,
    pub grid: Option<Grid>,
    pub seed: Option<u64>,
    pub output: Output,
    /// Overrides on top of [`TOLERANCE_DEFAULTS`].
    pub tolerances: BTreeMap<String, f64>,
    pub count: usize,
    pub sweep: Option<Sweep>,
}

impl RunConfig {
    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCE_DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).expect("known tolerance key")
        })
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(ParamValue::Scalar(v)) => Some(*v),
            _ => None,
        }
    }

    /// Parses arguments without the program name.
    pub fn from_args<I, S>(args: I) -> Result<RunConfig, ConfigError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let argv = std::iter::once(std::ffi::OsString::from("nvmix")).chain(args.into_iter().map(Into::into));
        let cli = match Cli::try_parse_from(argv) {
            Ok(c) => c,
            Err(e) => {
                use clap::error::ErrorKind;
                return Err(match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ConfigError::Help(e.to_string()),
                    _ => ConfigError::Invalid { field: "arguments".into(), message: e.to_string().trim().to_string() },
                });
            }
        };
        cli.validate()
    }
}

/// Why a command line was not accepted.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// `--help` or `--version`: print and exit successfully.
    Help(String),
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub(crate) fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Help(s) => f.write_str(s),
            ConfigError::Invalid { field, message } => write!(f, "{field}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Shape properties of normal variance-mean mixtures and their relatives.
#[derive(Debug, Parser)]
#[command(name = "nvmix", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Distribution family.
    #[arg(long, value_enum)]
    family: Family,

    /// GH sub-family: nig, hyperbolic, vg, student_t, laplace.
    #[arg(long)]
    subfamily: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    psi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,

    /// Location vector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    mu_vec: Option<String>,
    /// Drift vector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    beta_vec: Option<String>,
    /// Scale matrix, rows separated by `;`, entries by `,`.
    #[arg(long, allow_hyphen_values = true)]
    a_matrix: Option<String>,
    /// Direction of the evaluation line for `mgh eval` (default: beta, or e1).
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,

    /// Largest count for `gigp` (default 100).
    #[arg(long)]
    ymax: Option<u64>,

    /// Mixing-density table: rows of `x log_g`.
    #[arg(long)]
    table: Option<String>,
    /// Left tail of the table density behaves like x^a.
    #[arg(long, allow_negative_numbers = true)]
    left_power: Option<f64>,
    /// Right tail of the table density behaves like exp(-r x).
    #[arg(long, allow_negative_numbers = true)]
    right_rate: Option<f64>,

    /// Evaluation grid `LO,HI,N`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Tolerance override `key=value`; repeatable.
    #[arg(long)]
    tol: Vec<String>,
    /// Number of draws for `sample`.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Parameter range for `sweep`: `NAME=LO,HI,N`.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::field(field, format!("entry {}: cannot parse {:?} as a number", i + 1, t.trim())))
        })
        .collect()
}

fn parse_matrix(field: &str, s: &str) -> Result<Vec<Vec<f64>>, ConfigError> {
    let rows = s
        .split(';')
        .enumerate()
        .map(|(i, r)| parse_list(field, r).map_err(|e| prefix(e, &format!("row {}", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(ConfigError::field(field, format!("matrix must be square; got {} rows", rows.len())));
    }
    Ok(rows)
}

fn prefix(e: ConfigError, what: &str) -> ConfigError {
    match e {
        ConfigError::Invalid { field, message } => ConfigError::Invalid { field, message: format!("{what}, {message}") },
        other => other,
    }
}

fn parse_range(field: &str, s: &str) -> Result<(f64, f64, usize), ConfigError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(ConfigError::field(field, format!("expected LO,HI,N, got {s:?}")));
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|_| ConfigError::field(field, format!("LO: cannot parse {:?}", parts[0])))?;
    let hi = parts[1].trim().parse::<f64>().map_err(|_| ConfigError::field(field, format!("HI: cannot parse {:?}", parts[1])))?;
    let n = parts[2].trim().parse::<usize>().map_err(|_| ConfigError::field(field, format!("N: cannot parse {:?} as a count", parts[2])))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(ConfigError::field(field, "bounds must be finite"));
    }
    Ok((lo, hi, n))
}

impl Cli {
    fn validate(self) -> Result<RunConfig, ConfigError> {
        let mut given: BTreeMap<String, ParamValue> = BTreeMap::new();
        let scalars = [
            ("mu", self.mu),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
            ("chi", self.chi),
            ("psi", self.psi),
            ("sigma", self.sigma),
            ("nu", self.nu),
            ("left_power", self.left_power),
            ("right_rate", self.right_rate),
            ("ymax", self.ymax.map(|v| v as f64)),
        ];
        for (k, v) in scalars {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(ConfigError::field(&flag(k), "must be finite"));
                }
                given.insert(k.to_string(), ParamValue::Scalar(v));
            }
        }
        for (k, v) in [("mu_vec", &self.mu_vec), ("beta_vec", &self.beta_vec), ("direction", &self.direction)] {
            if let Some(s) = v {
                given.insert(k.to_string(), ParamValue::Vector(parse_list(&flag(k), s)?));
            }
        }
        if let Some(s) = &self.a_matrix {
            given.insert("a_matrix".into(), ParamValue::Matrix(parse_matrix("--a-matrix", s)?));
        }
        if let Some(s) = &self.table {
            given.insert("table".into(), ParamValue::Text(s.clone()));
        }

        if let Some(sub) = &self.subfamily {
            if self.family != Family::Gh {
                return Err(ConfigError::field("--subfamily", format!("only applies to family gh, not {}", self.family)));
            }
            sub.parse::<nvmix::GhFamily>().map_err(|e| ConfigError::field("--subfamily", e.to_string()))?;
        }
        let (required, optional) = self.family.keys(self.subfamily.as_deref());
        for k in given.keys() {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                let who = match &self.subfamily {
                    Some(s) => format!("family gh, subfamily {s}"),
                    None => format!("family {}", self.family),
                };
                return Err(ConfigError::field(&flag(k), format!("not a parameter of {who}")));
            }
        }

        let sweep = match (&self.sweep, self.command) {
            (Some(s), Command::Sweep) => {
                let (name, range) = s
                    .split_once('=')
                    .ok_or_else(|| ConfigError::field("--sweep", format!("expected NAME=LO,HI,N, got {s:?}")))?;
                let name = name.trim().replace('-', "_");
                let scalar_ok = required.contains(&name.as_str()) || optional.contains(&name.as_str());
                if !scalar_ok || matches!(name.as_str(), "mu_vec" | "beta_vec" | "a_matrix" | "direction" | "table") {
                    return Err(ConfigError::field("--sweep", format!("`{name}` is not a scalar parameter of family {}", self.family)));
                }
                let (lo, hi, n) = parse_range("--sweep", range)?;
                if n < 2 {
                    return Err(ConfigError::field("--sweep", "N must be at least 2"));
                }
                Some(Sweep { param: name, lo, hi, n })
            }
            (Some(_), _) => return Err(ConfigError::field("--sweep", "only valid with the sweep command")),
            (None, Command::Sweep) => return Err(ConfigError::field("--sweep", "the sweep command needs --sweep NAME=LO,HI,N")),
            (None, _) => None,
        };
        for k in required {
            let swept = sweep.as_ref().is_some_and(|s| s.param == *k);
            if !given.contains_key(*k) && !swept {
                return Err(ConfigError::field(&flag(k), format!("required for family {}", self.family)));
            }
        }

        let grid = match &self.grid {
            Some(s) => {
                if self.family == Family::Gigp {
                    return Err(ConfigError::field("--grid", "gigp evaluates on 0..=ymax; use --ymax"));
                }
                let (lo, hi, n) = parse_range("--grid", s)?;
                if n < 3 {
                    return Err(ConfigError::field("--grid", format!("N must be at least 3, got {n}")));
                }
                if !(lo < hi) {
                    return Err(ConfigError::field("--grid", format!("LO must be below HI, got {lo} and {hi}")));
                }
                if self.family == Family::Gig && !(lo > 0.0) {
                    return Err(ConfigError::field("--grid", "gig densities live on (0, inf); LO must be positive"));
                }
                Some(Grid { lo, hi, n })
            }
            None => None,
        };

        if self.command == Command::Sample && self.seed.is_none() {
            return Err(ConfigError::field("--seed", "required for sample"));
        }
        if self.command == Command::Sample && self.count == 0 {
            return Err(ConfigError::field("--count", "must be positive"));
        }
        if self.output == Output::Csv && !matches!(self.command, Command::Eval | Command::Sweep) {
            return Err(ConfigError::field("--output", format!("csv is only available for eval and sweep, not {}", self.command)));
        }

        let mut tolerances = BTreeMap::new();
        for t in &self.tol {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| ConfigError::field("--tol", format!("expected key=value, got {t:?}")))?;
            let k = k.trim();
            if !TOLERANCE_DEFAULTS.iter().any(|(d, _)| *d == k) {
                let known: Vec<&str> = TOLERANCE_DEFAULTS.iter().map(|(d, _)| *d).collect();
                return Err(ConfigError::field("--tol", format!("unknown key `{k}`; known keys: {}", known.join(", "))));
            }
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| ConfigError::field("--tol", format!("{k}: cannot parse {v:?} as a number")))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::field("--tol", format!("{k} must be positive and finite")));
            }
            tolerances.insert(k.to_string(), v);
        }

        Ok(RunConfig {
            command: self.command,
            family: self.family,
            subfamily: self.subfamily,
            params: given,
            grid,
            seed: self.seed,
            output: self.output,
            tolerances,
            count: self.count,
            sweep,
        })
    }
}

/// `mu_vec` → `--mu-vec`
pub(crate) fn flag(key: &str) -> String {
    format!("--{}", key.replace('_', "-"))
}
