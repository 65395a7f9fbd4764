//! Standard boundary geometries.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;

use crate::collar_geometry::{intrinsic_geometry, MetricJet};
use crate::error::{NahmError, Result};
use crate::frame_algebra::{symtf, FrameModel, Mat3};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// Flat torus with the product collar.
    T3Flat,
    /// Hyperbolic ball over the unit round sphere, H = (1 − x²/4)² I.
    S3Hyperbolic,
    /// Flat torus with H = I + h₂x².
    T3H2(Mat3),
    /// Berger sphere H₀ = diag(λ², 1, 1), in its orthonormal frame, with
    /// the jets H = I − P x² of a collar that is Poincaré–Einstein to third order.
    Berger(f64),
}

impl Preset {
    pub const NAMES: [&'static str; 4] = ["t3-flat", "s3-hyperbolic", "t3-h2", "berger:<lambda>"];

    /// Parse a preset name; `t3-h2` takes its h₂ from `h2`.
    pub fn parse(name: &str, h2: Option<Mat3>) -> Result<Self> {
        match name {
            "t3-flat" => Ok(Self::T3Flat),
            "s3-hyperbolic" => Ok(Self::S3Hyperbolic),
            "t3-h2" => {
                let h2 = h2.ok_or_else(|| NahmError::InvalidInput("preset t3-h2 needs h2".into()))?;
                Ok(Self::T3H2(h2))
            }
            _ => {
                if let Some(l) = name.strip_prefix("berger:") {
                    let lambda: f64 = l
                        .parse()
                        .map_err(|_| NahmError::InvalidInput(format!("bad Berger parameter '{l}'")))?;
                    if !(lambda > 0.0 && lambda.is_finite()) {
                        return Err(NahmError::InvalidInput("Berger parameter must be positive".into()));
                    }
                    Ok(Self::Berger(lambda))
                } else {
                    Err(NahmError::InvalidInput(format!(
                        "unknown preset '{name}' (expected one of {})",
                        Self::NAMES.join(", ")
                    )))
                }
            }
        }
    }

    pub fn frame(&self) -> FrameModel {
        match self {
            Self::T3Flat | Self::T3H2(_) => FrameModel::flat_torus(1.0).expect("flat torus"),
            Self::S3Hyperbolic => FrameModel::round_s3(),
            Self::Berger(l) => berger_frame(*l),
        }
    }

    pub fn metric(&self) -> Result<MetricJet> {
        match self {
            Self::T3Flat => Ok(MetricJet::product()),
            Self::S3Hyperbolic => MetricJet::polynomial(vec![
                Mat3::identity(),
                Mat3::zeros(),
                Mat3::identity() * -0.5,
                Mat3::zeros(),
                Mat3::identity() / 16.0,
            ]),
            Self::T3H2(h2) => MetricJet::polynomial(vec![Mat3::identity(), Mat3::zeros(), *h2]),
            Self::Berger(l) => pe_jet(&berger_frame(*l)),
        }
    }

    pub fn geometry(&self) -> Result<(FrameModel, MetricJet)> {
        Ok((self.frame(), self.metric()?))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::T3Flat => write!(f, "t3-flat"),
            Self::S3Hyperbolic => write!(f, "s3-hyperbolic"),
            Self::T3H2(_) => write!(f, "t3-h2"),
            Self::Berger(l) => write!(f, "berger:{l}"),
        }
    }
}

/// The round sphere frame rescaled so that diag(λ², 1, 1) becomes orthonormal.
pub fn berger_frame(lambda: f64) -> FrameModel {
    let a = Mat3::from_diagonal(&Vector3::new(lambda, 1.0, 1.0));
    let f = FrameModel::round_s3().change_coframe(&a).expect("Berger coframe");
    debug_assert!((f.vol() - 2.0 * PI * PI * lambda).abs() < 1e-9);
    f
}

/// The polynomial jet H = I − P(h₀) x² on `frame`.
pub fn pe_jet(frame: &FrameModel) -> Result<MetricJet> {
    let p = intrinsic_geometry(frame, &Mat3::identity())?.schouten;
    MetricJet::polynomial(vec![Mat3::identity(), Mat3::zeros(), -p])
}

/// Parse h₂ from three diagonal entries or nine row-major entries; the
/// result is symmetrized.
pub fn parse_h2(values: &[f64]) -> Result<Mat3> {
    match values.len() {
        3 => Ok(Mat3::from_diagonal(&Vector3::new(values[0], values[1], values[2]))),
        9 => {
            let m = Mat3::from_row_slice(values);
            if (m - m.transpose()).amax() > 1e-14 {
                return Err(NahmError::InvalidInput("h2 must be symmetric".into()));
            }
            Ok(m)
        }
        n => Err(NahmError::InvalidInput(format!("h2 needs 3 or 9 numbers, got {n}"))),
    }
}

/// Whether a matrix is symmetric and trace-free to `tol`.
pub fn is_symtf(m: &Mat3, tol: f64) -> bool {
    (m - symtf(m)).amax() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collar_geometry::check_pe;

    #[test]
    fn parse_names() {
        assert_eq!(Preset::parse("t3-flat", None).unwrap(), Preset::T3Flat);
        assert_eq!(Preset::parse("berger:2", None).unwrap(), Preset::Berger(2.0));
        assert!(Preset::parse("berger:-1", None).is_err());
        assert!(Preset::parse("t3-h2", None).is_err());
        assert!(Preset::parse("nope", None).is_err());
    }

    #[test]
    fn presets_are_pe_where_expected() {
        for p in [Preset::T3Flat, Preset::S3Hyperbolic, Preset::Berger(2.0), Preset::Berger(0.7)] {
            let (f, m) = p.geometry().unwrap();
            assert_eq!(check_pe(&f, &m, 3).unwrap(), vec![true, true, true], "{p}");
        }
    }

    #[test]
    fn berger_volume() {
        assert!((berger_frame(3.0).vol() - 6.0 * PI * PI).abs() < 1e-12);
    }
}
