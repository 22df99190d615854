//! File formats: the PMF JSON schema and the sweep template.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use simcheck_core::pmf::{JointPmf, Labels};

use crate::CliError;

/// On-disk PMF: alphabets as label lists and the table indexed
/// `p[x][y][z]`. Entries are decimal numbers or strings; a string of the
/// form `"6/100"` is parsed as an exact rational before conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfFile {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub p: Vec<Vec<Vec<PValue>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

pub fn parse_prob(value: &PValue) -> Result<f64, CliError> {
    match value {
        PValue::Number(v) => Ok(*v),
        PValue::Text(s) => {
            let s = s.trim();
            if let Some((num, den)) = s.split_once('/') {
                let num: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| CliError::BadProbability(s.to_string()))?;
                let den: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| CliError::BadProbability(s.to_string()))?;
                if den == 0 {
                    return Err(CliError::BadProbability(s.to_string()));
                }
                Ok(num as f64 / den as f64)
            } else {
                s.parse::<f64>()
                    .map_err(|_| CliError::BadProbability(s.to_string()))
            }
        }
    }
}

pub fn pmf_from_file(file: &PmfFile) -> Result<JointPmf, CliError> {
    let x_size = file.x.len();
    let y_size = file.y.len();
    let z_size = file.z.len();
    if file.p.len() != x_size {
        return Err(CliError::BadShape(format!(
            "p has {} x-slices, expected {}",
            file.p.len(),
            x_size
        )));
    }
    let mut probs = vec![0.0; x_size * y_size * z_size];
    for (xi, plane) in file.p.iter().enumerate() {
        if plane.len() != y_size {
            return Err(CliError::BadShape(format!(
                "p[{xi}] has {} y-rows, expected {}",
                plane.len(),
                y_size
            )));
        }
        for (yi, row) in plane.iter().enumerate() {
            if row.len() != z_size {
                return Err(CliError::BadShape(format!(
                    "p[{xi}][{yi}] has {} z-entries, expected {}",
                    row.len(),
                    z_size
                )));
            }
            for (zi, value) in row.iter().enumerate() {
                probs[(xi * y_size + yi) * z_size + zi] = parse_prob(value)?;
            }
        }
    }
    let pmf = JointPmf::new(x_size, y_size, z_size, probs)?;
    Ok(pmf.with_labels(Labels {
        x: file.x.clone(),
        y: file.y.clone(),
        z: file.z.clone(),
    })?)
}

pub fn load_pmf(path: &Path) -> Result<JointPmf, CliError> {
    let text = fs::read_to_string(path)?;
    let file: PmfFile = serde_json::from_str(&text)?;
    pmf_from_file(&file)
}

/// Serializes a PMF back into the file schema (numbers only).
pub fn pmf_to_file(pmf: &JointPmf) -> PmfFile {
    let default_labels = |prefix: &str, n: usize| -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    };
    let (x, y, z) = match pmf.labels() {
        Some(l) => (l.x.clone(), l.y.clone(), l.z.clone()),
        None => (
            default_labels("x", pmf.x_size()),
            default_labels("y", pmf.y_size()),
            default_labels("z", pmf.z_size()),
        ),
    };
    let p = (0..pmf.x_size())
        .map(|xi| {
            (0..pmf.y_size())
                .map(|yi| {
                    (0..pmf.z_size())
                        .map(|zi| PValue::Number(pmf.prob(xi, yi, zi)))
                        .collect()
                })
                .collect()
        })
        .collect();
    PmfFile { x, y, z, p }
}

/// Sweep template: the parameterized family plus the alpha and gamma grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub family: String,
    pub alpha: ParamSpec,
    pub gamma: ParamSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    Values { values: Vec<f64> },
    Range { from: f64, to: f64, step: f64 },
}

impl ParamSpec {
    /// Expands the declared parameters to a grid. Range values are snapped
    /// to 12 decimals so multiples of a decimal step print cleanly.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        match self {
            ParamSpec::Values { values } => {
                if values.is_empty() {
                    return Err(CliError::BadTemplate("empty parameter list".into()));
                }
                Ok(values.clone())
            }
            ParamSpec::Range { from, to, step } => {
                if !step.is_finite() || *step <= 0.0 {
                    return Err(CliError::BadTemplate(format!("bad step {step}")));
                }
                let mut grid = Vec::new();
                let mut k = 0u64;
                loop {
                    let value = from + k as f64 * step;
                    if value > to + step * 0.5 {
                        break;
                    }
                    grid.push((value * 1e12).round() / 1e12);
                    k += 1;
                    if k > 1_000_000 {
                        return Err(CliError::BadTemplate("range yields too many points".into()));
                    }
                }
                if grid.is_empty() {
                    return Err(CliError::BadTemplate("empty parameter range".into()));
                }
                Ok(grid)
            }
        }
    }
}

pub fn load_template(path: &Path) -> Result<SweepTemplate, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
