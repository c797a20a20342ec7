use gkz_core::analytic::Quadrature;
use gkz_core::rational::{approx_f64, Rat};
use gkz_core::verify::VerifyOptions;
use gkz_core::{validate_config, validate_config_with_dual, ExactLatError, IntMatrix, WeightConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaInput {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl AlphaInput {
    pub fn to_complex(&self) -> Result<Vec<Complex64>, String> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(format!("alpha has {} real and {} imaginary parts", self.re.len(), self.im.len()));
        }
        Ok((0..self.re.len()).map(|i| Complex64::new(self.re[i], self.im.get(i).copied().unwrap_or(0.0))).collect())
    }

    /// `re,re,...` with optional `re:im` items, or an inline JSON object.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| format!("alpha: {e}"));
        }
        let mut input = AlphaInput { re: Vec::new(), im: Vec::new() };
        for item in s.split(',') {
            let (re, im) = item.split_once(':').unwrap_or((item, "0"));
            let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("alpha item {item:?}: {e}"));
            input.re.push(p(re)?);
            input.im.push(p(im)?);
        }
        Ok(input)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInput {
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

impl Default for QuadratureInput {
    fn default() -> Self {
        QuadratureInput { half_width: default_half_width(), nodes: default_nodes() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_monodromy")]
    pub monodromy: f64,
    #[serde(default = "default_residual")]
    pub residual: f64,
    #[serde(default = "default_connection")]
    pub connection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { monodromy: default_monodromy(), residual: default_residual(), connection: default_connection() }
    }
}

fn default_half_width() -> f64 {
    40.0
}
fn default_nodes() -> usize {
    2000
}
fn default_monodromy() -> f64 {
    1e-6
}
fn default_residual() -> f64 {
    1e-8
}
fn default_connection() -> f64 {
    1e-6
}
fn default_truncation() -> usize {
    8
}
fn default_fatten() -> f64 {
    1.0
}

/// On-disk description of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub name: String,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    /// Gale dual to use instead of the Hermite-form one.
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub alpha: Option<AlphaInput>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub quadrature: QuadratureInput,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_fatten")]
    pub fatten: f64,
}

#[derive(Debug)]
pub enum InstanceError {
    Shape(String),
    Config(ExactLatError),
    Alpha(String),
}

impl InstanceFile {
    pub fn from_config(name: &str, cfg: &WeightConfig) -> Self {
        InstanceFile {
            name: name.to_string(),
            b: cfg.b.to_rows_i64(),
            a: Some(cfg.a.to_rows_i64()),
            alpha: None,
            truncation: default_truncation(),
            quadrature: QuadratureInput::default(),
            tolerances: Tolerances::default(),
            fatten: default_fatten(),
        }
    }

    pub fn config(&self) -> Result<WeightConfig, InstanceError> {
        let cols = self.b.first().map_or(0, Vec::len);
        if self.b.is_empty() || self.b.iter().any(|r| r.len() != cols) {
            return Err(InstanceError::Shape("B must be a non-empty rectangular matrix".into()));
        }
        let b = IntMatrix::from_rows(&self.b, cols);
        match &self.a {
            None => validate_config(&b),
            Some(a) => {
                if a.iter().any(|r| r.len() != cols) {
                    return Err(InstanceError::Shape("A must have as many columns as B".into()));
                }
                validate_config_with_dual(&b, &IntMatrix::from_rows(a, cols))
            }
        }
        .map_err(InstanceError::Config)
    }

    pub fn alpha(&self, cfg: &WeightConfig) -> Result<Option<Vec<Complex64>>, InstanceError> {
        let Some(input) = &self.alpha else { return Ok(None) };
        let a = input.to_complex().map_err(InstanceError::Alpha)?;
        if a.len() != cfg.m() {
            return Err(InstanceError::Alpha(format!("alpha has length {}, expected d - n = {}", a.len(), cfg.m())));
        }
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(InstanceError::Alpha("alpha has non-finite entries".into()));
        }
        Ok(Some(a))
    }

    pub fn quadrature(&self) -> Quadrature {
        Quadrature { half_width: self.quadrature.half_width, nodes: self.quadrature.nodes, ..Quadrature::default() }
    }

    pub fn fatten_rat(&self) -> Rat {
        approx_f64(self.fatten, 1000)
    }

    pub fn verify_options(&self, seed: u64) -> VerifyOptions {
        VerifyOptions {
            truncation: self.truncation,
            fatten: self.fatten_rat(),
            seed,
            quadrature: self.quadrature(),
            monodromy_tol: self.tolerances.monodromy,
            residual_tol: self.tolerances.residual,
            connection_tol: self.tolerances.connection,
            ..VerifyOptions::default()
        }
    }
}
