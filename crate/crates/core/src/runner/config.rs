use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bound_state::{FieldGrid, Numerics};
use crate::ditch::{BoxSpec, Profile};
use crate::error::{Error, Result};
use crate::geometry::{curve_from_curvature, tabulated_from_rows, Curve, DEFAULT_C_HAT_FLOOR, DEFAULT_OMEGA};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Line,
    Corner {
        phi: f64,
    },
    SmoothedCorner {
        theta: f64,
        width: f64,
    },
    DecayingCurvature {
        c2: f64,
        beta: f64,
    },
    /// Signed curvature given at increasing arc-length points, linear in
    /// between and zero outside.
    Curvature {
        s: Vec<f64>,
        k: Vec<f64>,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    /// Polyline through `(ξ, x, y)` rows, given inline or as a CSV file
    /// (relative to the config file).
    Tabulated {
        #[serde(default)]
        points: Vec<[f64; 3]>,
        #[serde(default)]
        file: Option<PathBuf>,
        #[serde(default = "default_resolution")]
        resolution: usize,
        #[serde(default)]
        origin_xi: Option<f64>,
    },
}

fn default_resolution() -> usize {
    8192
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub omega: f64,
    pub c_hat_floor: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            omega: DEFAULT_OMEGA,
            c_hat_floor: DEFAULT_C_HAT_FLOOR,
        }
    }
}

/// κ grid: explicit values, or `points` equally spaced values between the
/// bounds (defaults 0.55α and 8α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kappas: Option<Vec<f64>>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kappas: None,
            kappa_min: None,
            kappa_max: None,
            points: 50,
        }
    }
}

/// Trial widths: explicit values, or `points` log-spaced values in
/// [lambda_min, lambda_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialConfig {
    /// Defaults to α.
    pub kappa: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            kappa: None,
            lambdas: None,
            lambda_min: 1e-3,
            lambda_max: 1.0,
            points: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    /// Defaults to the square profile with ∫W = α.
    pub profile: Option<Profile>,
    pub epsilons: Vec<f64>,
    /// Mesh steps h = ε/d.
    pub h_divisors: Vec<f64>,
    #[serde(rename = "box")]
    pub bbox: Option<BoxSpec>,
    /// Allowed relative distance between the extrapolated ditch energy and
    /// the boundary-integral energy.
    pub budget: f64,
    pub transverse_epsilons: Vec<f64>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            profile: None,
            epsilons: vec![0.2, 0.1],
            h_divisors: vec![4.0],
            bbox: None,
            budget: 0.02,
            transverse_epsilons: vec![0.2, 0.1, 0.05, 0.025],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveConfig,
    pub alpha: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub trial: TrialConfig,
    #[serde(default)]
    pub validate: ValidateConfig,
    /// Sampling grid for eigenfunction dumps after `spectrum`.
    #[serde(default)]
    pub field: Option<FieldGrid>,
    /// Directory that relative paths in the config refer to.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

/// Sets `dotted.key = value` in a TOML document; the value is parsed as a
/// TOML value and taken as a string if that fails.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(format!("override `{assignment}` is not of the form key=value")))?;
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let mut table = doc;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| config_error(format!("`{part}` in override `{key}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text).map_err(config_error)?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(doc).try_into().map_err(config_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text, overrides)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(config_error(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.alpha, "alpha")?;
        self.numerics.validate().map_err(config_error)?;
        if !(self.check.omega > 0.0 && self.check.omega < 1.0) {
            return Err(config_error(format!(
                "check.omega must lie in (0, 1), got {}",
                self.check.omega
            )));
        }
        positive(self.check.c_hat_floor, "check.c_hat_floor")?;
        positive(self.validate.budget, "validate.budget")?;
        for &e in self.validate.epsilons.iter().chain(&self.validate.transverse_epsilons) {
            positive(e, "epsilon")?;
        }
        if self.validate.h_divisors.iter().any(|&d| !(d >= 4.0)) {
            return Err(config_error("validate.h_divisors must be at least 4 (h <= epsilon/4)"));
        }
        if let Some(p) = &self.validate.profile {
            p.validate().map_err(config_error)?;
            let a = p.coupling();
            if (a - self.alpha).abs() > 1e-9 * self.alpha {
                return Err(config_error(format!(
                    "profile integral {a} does not match alpha {}",
                    self.alpha
                )));
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Profile {
        self.validate
            .profile
            .clone()
            .unwrap_or(Profile::Square { strength: self.alpha })
    }

    pub fn kappa_grid(&self) -> Result<Vec<f64>> {
        if let Some(k) = &self.sweep.kappas {
            return Ok(k.clone());
        }
        let lo = self.sweep.kappa_min.unwrap_or(0.55 * self.alpha);
        let hi = self.sweep.kappa_max.unwrap_or(8.0 * self.alpha);
        let n = self.sweep.points;
        if n < 2 || !(hi > lo) || !(lo > 0.0) {
            return Err(config_error(format!(
                "invalid kappa range [{lo}, {hi}] with {n} points"
            )));
        }
        Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    pub fn lambda_grid(&self) -> Result<Vec<f64>> {
        if let Some(l) = &self.trial.lambdas {
            return Ok(l.clone());
        }
        let (lo, hi, n) = (self.trial.lambda_min, self.trial.lambda_max, self.trial.points);
        if n < 2 || !(hi > lo) || !(lo > 0.0) {
            return Err(config_error(format!(
                "invalid lambda range [{lo}, {hi}] with {n} points"
            )));
        }
        Ok((0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect())
    }

    pub fn build_curve(&self) -> Result<Curve> {
        match &self.curve {
            CurveConfig::Line => Ok(Curve::line()),
            CurveConfig::Corner { phi } => Curve::corner(*phi),
            CurveConfig::SmoothedCorner { theta, width } => Curve::smoothed_corner(*theta, *width),
            CurveConfig::DecayingCurvature { c2, beta } => Curve::decaying_curvature(*c2, *beta),
            CurveConfig::Curvature { s, k, resolution } => {
                if s.len() != k.len() || s.len() < 2 || s.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(config_error(
                        "curvature table needs matching, strictly increasing s and k columns",
                    ));
                }
                let (s, k) = (Arc::new(s.clone()), Arc::new(k.clone()));
                let domain = (s[0].min(0.0), s[s.len() - 1].max(0.0));
                let table = move |x: f64| {
                    if x < s[0] || x > s[s.len() - 1] {
                        return 0.0;
                    }
                    let i = s.partition_point(|&v| v <= x).clamp(1, s.len() - 1) - 1;
                    let t = (x - s[i]) / (s[i + 1] - s[i]);
                    k[i] + t * (k[i + 1] - k[i])
                };
                curve_from_curvature(Arc::new(table), domain, *resolution)
            }
            CurveConfig::Tabulated {
                points,
                file,
                resolution,
                origin_xi,
            } => {
                let rows: Vec<(f64, f64, f64)> = match file {
                    Some(f) => read_rows(&self.base_dir.join(f))?,
                    None => points.iter().map(|p| (p[0], p[1], p[2])).collect(),
                };
                tabulated_from_rows(rows, *resolution, *origin_xi)
            }
        }
    }
}

/// Reads `xi,x,y` rows; blank lines, `#` comments and a non-numeric header
/// are skipped.
fn read_rows(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 3 => rows.push((v[0], v[1], v[2])),
            _ if rows.is_empty() && lineno == 0 => continue,
            _ => {
                return Err(config_error(format!(
                    "{}:{}: expected three numbers",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}
