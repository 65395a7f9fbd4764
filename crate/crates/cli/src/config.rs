//! Run configuration: an optional TOML file merged with command-line flags.
//!
//! ```toml
//! order = 6
//! sigma = "zero"            # or nine numbers, row-major
//!
//! [geometry]
//! preset = "berger:2"       # or an inline frame:
//! # e12 = [0, 0, 1]         # [e₁, e₂] in the frame basis
//! # e23 = [0, 0, 0]
//! # e31 = [0, 0, 0]
//! # vol = 1.0
//! # jets = [[...9 numbers...], ...]   # H₁, H₂, … of the polynomial H(x)
//!
//! [numeric]
//! tol = 1e-12
//! t_grid = [0.05, 0.06]
//! t_max = 0.8
//! x_from = 0.05
//! x_to = 0.2
//!
//! [output]
//! json = "report.json"
//! ```

use std::path::{Path, PathBuf};

use nahm_core::collar_geometry::MetricJet;
use nahm_core::frame_algebra::{FrameModel, Mat3};
use nahm_core::presets::{parse_h2, Preset};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    order: Option<usize>,
    sigma: Option<SigmaSpec>,
    #[serde(default)]
    geometry: GeometrySection,
    #[serde(default)]
    numeric: NumericSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SigmaSpec {
    Name(String),
    Matrix(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    preset: Option<String>,
    h2: Option<Vec<f64>>,
    e12: Option<[f64; 3]>,
    e23: Option<[f64; 3]>,
    e31: Option<[f64; 3]>,
    vol: Option<f64>,
    jets: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericSection {
    tol: Option<f64>,
    t_grid: Option<Vec<f64>>,
    t_max: Option<f64>,
    x_from: Option<f64>,
    x_to: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    json: Option<PathBuf>,
}

/// Values given on the command line; each overrides the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub preset: Option<String>,
    pub h2: Option<String>,
    pub sigma: Option<String>,
    pub order: Option<usize>,
    pub tol: Option<f64>,
    pub t_grid: Option<String>,
    pub t_max: Option<f64>,
    pub x_from: Option<f64>,
    pub x_to: Option<f64>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Geometry {
    pub label: String,
    pub frame: FrameModel,
    pub metric: MetricJet,
}

#[derive(Debug, Clone, Default)]
pub struct Numeric {
    pub tol: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub x_from: Option<f64>,
    pub x_to: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub sigma: Mat3,
    pub order: Option<usize>,
    pub numeric: Numeric,
    pub json: Option<PathBuf>,
}

/// Comma-separated numbers, e.g. `1,-1,0`.
pub fn parse_list(field: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("{field}: '{}' is not a number", s.trim())))
        })
        .collect()
}

fn matrix9(field: &str, values: &[f64]) -> Result<Mat3, CliError> {
    if values.len() != 9 {
        return Err(CliError::Validation(format!(
            "{field}: expected 9 numbers (row-major), got {}",
            values.len()
        )));
    }
    Ok(Mat3::from_row_slice(values))
}

fn sigma_from_text(text: &str) -> Result<Mat3, CliError> {
    if text.trim() == "zero" {
        Ok(Mat3::zeros())
    } else {
        matrix9("sigma", &parse_list("sigma", text)?)
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
}

fn inline_geometry(g: &GeometrySection) -> Result<Geometry, CliError> {
    let (Some(e12), Some(e23), Some(e31)) = (g.e12, g.e23, g.e31) else {
        return Err(CliError::Validation(
            "geometry: give either preset or all of e12, e23, e31".into(),
        ));
    };
    let frame = FrameModel::from_brackets(e12, e23, e31, g.vol.unwrap_or(1.0))
        .map_err(|e| CliError::Validation(format!("geometry: {e}")))?;
    let mut coeffs = vec![Mat3::identity()];
    for (k, jet) in g.jets.iter().flatten().enumerate() {
        coeffs.push(matrix9(&format!("geometry.jets[{k}]"), jet)?);
    }
    let metric = MetricJet::polynomial(coeffs).map_err(|e| CliError::Validation(format!("geometry.jets: {e}")))?;
    Ok(Geometry {
        label: "inline".into(),
        frame,
        metric,
    })
}

fn preset_geometry(name: &str, h2: Option<Vec<f64>>) -> Result<Geometry, CliError> {
    let h2 = h2.map(|v| parse_h2(&v)).transpose().map_err(|e| CliError::Validation(format!("h2: {e}")))?;
    let preset = Preset::parse(name, h2).map_err(|e| CliError::Validation(format!("preset: {e}")))?;
    let (frame, metric) = preset.geometry().map_err(|e| CliError::Validation(format!("preset: {e}")))?;
    Ok(Geometry {
        label: preset.to_string(),
        frame,
        metric,
    })
}

impl RunConfig {
    pub fn resolve(config: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let file = match config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let h2 = match &o.h2 {
            Some(t) => Some(parse_list("h2", t)?),
            None => file.geometry.h2.clone(),
        };
        let inline = file.geometry.e12.is_some() || file.geometry.e23.is_some() || file.geometry.e31.is_some();
        let geometry = match (o.preset.as_deref(), file.geometry.preset.as_deref()) {
            (Some(name), _) => preset_geometry(name, h2)?,
            (None, Some(name)) if !inline => preset_geometry(name, h2)?,
            (None, Some(_)) => {
                return Err(CliError::Validation("geometry: preset and inline frame are exclusive".into()))
            }
            (None, None) if inline => inline_geometry(&file.geometry)?,
            (None, None) => return Err(CliError::Validation("no geometry: pass --preset or a config file".into())),
        };
        let sigma = match (&o.sigma, file.sigma) {
            (Some(t), _) => sigma_from_text(t)?,
            (None, Some(SigmaSpec::Name(t))) => sigma_from_text(&t)?,
            (None, Some(SigmaSpec::Matrix(v))) => matrix9("sigma", &v)?,
            (None, None) => Mat3::zeros(),
        };
        let t_grid = match &o.t_grid {
            Some(t) => Some(parse_list("t-grid", t)?),
            None => file.numeric.t_grid,
        };
        Ok(Self {
            geometry,
            sigma,
            order: o.order.or(file.order),
            numeric: Numeric {
                tol: o.tol.or(file.numeric.tol),
                t_grid,
                t_max: o.t_max.or(file.numeric.t_max),
                x_from: o.x_from.or(file.numeric.x_from),
                x_to: o.x_to.or(file.numeric.x_to),
            },
            json: o.json.clone().or(file.output.json),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<FileConfig, toml::de::Error> {
        toml::from_str(text)
    }

    #[test]
    fn full_file() {
        let f = parse(
            "order = 4\nsigma = [0,0,0,0,1,0,0,0,-1]\n[geometry]\npreset = \"t3-h2\"\nh2 = [1,-1,0]\n\
             [numeric]\ntol = 1e-10\nt_grid = [0.1, 0.2]\n[output]\njson = \"out.json\"\n",
        )
        .unwrap();
        assert_eq!(f.order, Some(4));
        assert!(matches!(f.sigma, Some(SigmaSpec::Matrix(ref v)) if v.len() == 9));
        assert_eq!(f.numeric.t_grid, Some(vec![0.1, 0.2]));
    }

    #[test]
    fn unknown_key_names_its_line() {
        let err = parse("order = 4\n[numeric]\ntolerance = 1e-3\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("tolerance"), "{err}");
    }

    #[test]
    fn lists_and_sigma() {
        assert_eq!(parse_list("h2", "1, -1,0").unwrap(), vec![1.0, -1.0, 0.0]);
        assert!(parse_list("h2", "1,x").is_err());
        assert_eq!(sigma_from_text("zero").unwrap(), Mat3::zeros());
        assert!(sigma_from_text("1,2").is_err());
    }

    #[test]
    fn inline_frame() {
        let f = parse("[geometry]\ne12 = [0,0,1]\ne23 = [0,0,0]\ne31 = [0,0,0]\njets = [[0,0,0,0,0,0,0,0,0]]\n")
            .unwrap();
        let g = inline_geometry(&f.geometry).unwrap();
        assert_eq!(g.frame.c(2, 0, 1), 1.0);
        assert_eq!(g.metric.order(), 1);
    }
}
