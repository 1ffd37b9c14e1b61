//! Distribution objects built from validated parameters.

use std::collections::BTreeMap;

use nvmix::linalg::SquareMatrix;
use nvmix::table::parse_table;
use nvmix::{GhFamily, GhParams, GigPParams, GigParams, MixingDensity, MvMixtureSpec, TableDensity};

use crate::config::{flag, Family, ParamValue, RunConfig};
use crate::RunError;

pub enum Model {
    Gh(GhParams<f64>),
    Gig(GigParams<f64>),
    Mgh {
        spec: MvMixtureSpec<f64>,
        gig: GigParams<f64>,
        /// Unit vector of the `eval` line.
        direction: Vec<f64>,
    },
    Gigp {
        params: GigPParams<f64>,
        ymax: u64,
    },
    Custom {
        table: TableDensity<f64>,
        mixing: MixingDensity<f64>,
        mu: f64,
        beta: f64,
        sigma: f64,
    },
}

struct Params<'a>(&'a BTreeMap<String, ParamValue>);

impl Params<'_> {
    fn scalar(&self, k: &str) -> Option<f64> {
        match self.0.get(k) {
            Some(ParamValue::Scalar(v)) => Some(*v),
            _ => None,
        }
    }

    fn need(&self, k: &str) -> Result<f64, RunError> {
        self.scalar(k).ok_or_else(|| RunError::field(&flag(k), "missing"))
    }

    fn vector(&self, k: &str) -> Option<&[f64]> {
        match self.0.get(k) {
            Some(ParamValue::Vector(v)) => Some(v),
            _ => None,
        }
    }
}

fn domain(e: nvmix::Error) -> RunError {
    RunError::field("params", e.to_string())
}

/// Reads and validates the table file named by `--table`.
pub fn load_table(path: &str, left_power: f64, right_rate: f64) -> Result<TableDensity<f64>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::field("--table", format!("{path}: {e}")))?;
    let (xs, logs) = parse_table::<f64>(&text).map_err(|e| RunError::field("--table", format!("{path}: {}", strip(e))))?;
    TableDensity::new(xs, logs, left_power, right_rate).map_err(|e| RunError::field("--table", format!("{path}: {}", strip(e))))
}

fn strip(e: nvmix::Error) -> String {
    match e {
        nvmix::Error::Domain(s) | nvmix::Error::InvalidParams(s) => s,
        other => other.to_string(),
    }
}

pub fn build(cfg: &RunConfig, params: &BTreeMap<String, ParamValue>) -> Result<Model, RunError> {
    let p = Params(params);
    match cfg.family {
        Family::Gh => {
            let gh = match &cfg.subfamily {
                None => GhParams::new(
                    p.scalar("mu").unwrap_or(0.0),
                    p.need("lambda")?,
                    p.need("alpha")?,
                    p.need("beta")?,
                    p.need("delta")?,
                ),
                Some(name) => {
                    let fam: GhFamily = name.parse().map_err(|e: nvmix::Error| RunError::field("--subfamily", e.to_string()))?;
                    fam.build(|k| p.scalar(k))
                }
            };
            Ok(Model::Gh(gh.map_err(domain)?))
        }
        Family::Gig => Ok(Model::Gig(GigParams::new(p.need("lambda")?, p.need("chi")?, p.need("psi")?).map_err(domain)?)),
        Family::Gigp => {
            let params = GigPParams::new(p.need("lambda")?, p.need("chi")?, p.need("psi")?).map_err(domain)?;
            let ymax = p.scalar("ymax").unwrap_or(100.0);
            if !(ymax >= 1.0) {
                return Err(RunError::field("--ymax", "must be at least 1"));
            }
            Ok(Model::Gigp { params, ymax: ymax as u64 })
        }
        Family::Mgh => {
            let gig = GigParams::new(p.need("lambda")?, p.need("chi")?, p.need("psi")?).map_err(domain)?;
            let mu = p.vector("mu_vec").ok_or_else(|| RunError::field("--mu-vec", "missing"))?.to_vec();
            let beta = p.vector("beta_vec").ok_or_else(|| RunError::field("--beta-vec", "missing"))?.to_vec();
            let dim = mu.len();
            if beta.len() != dim {
                return Err(RunError::field("--beta-vec", format!("has {} entries but --mu-vec has {dim}", beta.len())));
            }
            let a = match params.get("a_matrix") {
                Some(ParamValue::Matrix(rows)) => {
                    if rows.len() != dim {
                        return Err(RunError::field("--a-matrix", format!("is {0}x{0} but --mu-vec has {dim} entries", rows.len())));
                    }
                    SquareMatrix::from_rows(rows).ok_or_else(|| RunError::field("--a-matrix", "rows must have equal length"))?
                }
                _ => SquareMatrix::identity(dim),
            };
            let direction = match p.vector("direction") {
                Some(d) if d.len() != dim => {
                    return Err(RunError::field("--direction", format!("has {} entries, expected {dim}", d.len())))
                }
                Some(d) => d.to_vec(),
                None if beta.iter().any(|&b| b != 0.0) => beta.clone(),
                None => (0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            };
            let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(RunError::field("--direction", "must be nonzero"));
            }
            let direction = direction.iter().map(|v| v / norm).collect();
            let spec = MvMixtureSpec::new(mu, beta, a, MixingDensity::gig(gig)).map_err(|e| match e {
                nvmix::Error::IllConditioned { .. } => RunError::field("--a-matrix", e.to_string()),
                other => domain(other),
            })?;
            Ok(Model::Mgh { spec, gig, direction })
        }
        Family::Custom => {
            let path = match params.get("table") {
                Some(ParamValue::Text(s)) => s.clone(),
                _ => return Err(RunError::field("--table", "missing")),
            };
            let table = load_table(&path, p.need("left_power")?, p.need("right_rate")?)?;
            let sigma = p.scalar("sigma").unwrap_or(1.0);
            if !(sigma > 0.0) {
                return Err(RunError::field("--sigma", format!("must be positive, got {sigma}")));
            }
            Ok(Model::Custom {
                mixing: table.clone().into_mixing(),
                table,
                mu: p.scalar("mu").unwrap_or(0.0),
                beta: p.scalar("beta").unwrap_or(0.0),
                sigma,
            })
        }
    }
}
