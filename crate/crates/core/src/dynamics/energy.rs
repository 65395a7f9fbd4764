//! Yang–Mills energy of the collar, boundary Chern–Simons-type integrals and
//! the Laurent expansion of the truncated energy.
//!
//! Traces are taken in the 2×2 representation. The 𝔰𝔲(2) inner product is
//! ⟨u, v⟩ = −tr(uv) and 2-forms carry the standard norm, so the flat model
//! a = θ/x has |F|² = 3 for the compactified metric dx² + h(x) with the x⁻⁴
//! weight absorbed by conformal invariance.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::collar_geometry::MetricJet;
use crate::dynamics::evolve::{evolve, StepControl, Trajectory};
use crate::dynamics::fit::laurent_fit;
use crate::dynamics::quadrature::simpson;
use crate::error::{NahmError, Result};
use crate::frame_algebra::{covariant_ext_d, curvature, exterior_d, FrameModel, Mat3};
use crate::nahm_expansion::{expand, BoundaryData};
use crate::su2::{trace_wedge_1_1_1, trace_wedge_1_2};

fn eight_pi2() -> f64 {
    8.0 * PI * PI
}

/// (1/8π²)[tr(2α̃∧f_{α₀}) + tr(α̃∧d_{α₀}α̃) + ⅔ tr(α̃∧α̃∧α̃)] per unit frame
/// volume, with α̃ = a − α₀.
pub fn boundary_cs_density(a: &Mat3, alpha0: &Mat3, frame: &FrameModel) -> f64 {
    let at = a - alpha0;
    let f0 = curvature(alpha0, frame);
    let dat = covariant_ext_d(alpha0, &at, frame);
    let s = 2.0 * trace_wedge_1_2(&at, &f0) + trace_wedge_1_2(&at, &dat) + 2.0 / 3.0 * trace_wedge_1_1_1(&at, &at, &at);
    s / eight_pi2()
}

/// Boundary integral over the whole level set {x = t}.
pub fn boundary_cs(a: &Mat3, alpha0: &Mat3, frame: &FrameModel) -> f64 {
    boundary_cs_density(a, alpha0, frame) * frame.vol()
}

/// Chern–Simons functional (1/8π²)∫tr(a∧da + ⅔a³) relative to the coframe
/// trivialization.
pub fn chern_simons(a: &Mat3, frame: &FrameModel) -> f64 {
    let s = trace_wedge_1_2(a, &exterior_d(a, frame)) + 2.0 / 3.0 * trace_wedge_1_1_1(a, a, a);
    s * frame.vol() / eight_pi2()
}

/// |F|² dVol per unit frame volume and unit dx at grid node `i`.
pub fn energy_density(traj: &Trajectory, i: usize) -> Result<f64> {
    let x = traj.grid()[i];
    let a = traj.values()[i];
    let h = traj.metric().gram(x);
    let h_inv = h.try_inverse().ok_or(NahmError::NotPositiveDefinite)?;
    let det = h.determinant();
    let da = traj.derivative(i)?;
    let f = curvature(&a, traj.frame());
    let radial = (da * h_inv * da.transpose()).trace();
    let tangential = (f * h * f.transpose()).trace() / det;
    Ok(0.5 * (radial + tangential) * det.sqrt())
}

/// Energy (1/8π²)∫|F|² of the collar region t ≤ x ≤ t_max. Both ends must
/// be grid nodes.
pub fn collar_energy(traj: &Trajectory, t: f64, t_max: f64) -> Result<f64> {
    let i0 = traj.index_of(t)?;
    let i1 = traj.index_of(t_max)?;
    if i1 <= i0 {
        return Ok(0.0);
    }
    let xs = &traj.grid()[i0..=i1];
    let fs = (i0..=i1).map(|i| energy_density(traj, i)).collect::<Result<Vec<_>>>()?;
    Ok(simpson(xs, &fs) * traj.frame().vol() / eight_pi2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyConfig {
    pub order: usize,
    pub sigma: Mat3,
    /// Cut-off values t at which the boundary integral is sampled.
    pub t_grid: Vec<f64>,
    pub t_max: f64,
    pub tol: f64,
}

impl EnergyConfig {
    /// Geometric grid of `n` points from `t_min` with ratio `ratio`.
    pub fn geometric_grid(t_min: f64, ratio: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_min * ratio.powi(i as i32)).collect()
    }
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            order: 6,
            sigma: Mat3::zeros(),
            t_grid: Self::geometric_grid(0.05, 1.2, 16),
            t_max: 0.8,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// Laurent coefficients of the boundary integral, powers −3..=1.
    pub laurent: BTreeMap<i32, f64>,
    pub fit_residual: f64,
    /// CS of the boundary connection α₀.
    pub cs_value: f64,
    /// max |𝓔(t, t_max) − (B(t_max) − B(t))| over the grid.
    pub stokes_residual: f64,
}

/// Expand, sample the boundary integral on the t-grid, fit its Laurent
/// series, and check the Stokes identity on a numerical trajectory.
pub fn energy_report(frame: &FrameModel, metric: &MetricJet, cfg: &EnergyConfig) -> Result<EnergyReport> {
    if cfg.t_grid.is_empty() || cfg.t_grid.iter().any(|t| !(*t > 0.0 && *t < cfg.t_max)) {
        return Err(NahmError::InvalidInput("t-grid must lie in (0, t_max)".into()));
    }
    let data = BoundaryData::new(frame.clone(), metric.clone(), cfg.sigma, cfg.order)?;
    let e = expand(&data)?;
    let samples: Vec<(f64, f64)> = cfg
        .t_grid
        .iter()
        .map(|&t| (t, boundary_cs(&e.evaluate(t), &e.alpha0, frame)))
        .collect();
    let fit = laurent_fit(&samples, &[-3, -2, -1, 0, 1, 2, 3])?;
    let laurent = (-3..=1).map(|p| (p, fit.coeff(p))).collect();

    let t_min = cfg.t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let control = StepControl {
        max_rel_step: 0.001,
        ..StepControl::with_tol(cfg.tol).landmarks(cfg.t_grid.iter().copied())
    };
    let traj = evolve(frame, metric.clone(), e.evaluate(t_min), t_min, cfg.t_max, &control)?;
    let b_max = boundary_cs(&traj.value_at(cfg.t_max)?, &e.alpha0, frame);
    let mut stokes = 0.0_f64;
    for &t in &cfg.t_grid {
        let energy = collar_energy(&traj, t, cfg.t_max)?;
        let b = boundary_cs(&traj.value_at(t)?, &e.alpha0, frame);
        stokes = stokes.max((energy - (b_max - b)).abs());
    }
    Ok(EnergyReport {
        laurent,
        fit_residual: fit.residual,
        cs_value: chern_simons(&e.alpha0, frame),
        stokes_residual: stokes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_density() {
        let flat = FrameModel::flat_torus(1.0).unwrap();
        for t in [0.1, 0.5, 2.0] {
            let d = boundary_cs_density(&(Mat3::identity() / t), &Mat3::zeros(), &flat);
            assert!((d + t.powi(-3) / eight_pi2()).abs() < 1e-15 * t.powi(-3));
        }
        let a = Mat3::new(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.9);
        assert_eq!(boundary_cs_density(&a, &a, &FrameModel::round_s3()), 0.0);
    }

    #[test]
    fn chern_simons_values() {
        let s3 = FrameModel::round_s3();
        assert_eq!(chern_simons(&Mat3::zeros(), &s3), 0.0);
        assert!((chern_simons(&Mat3::identity(), &s3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_energy() {
        let flat = FrameModel::flat_torus(1.0).unwrap();
        let traj = evolve(&flat, MetricJet::product(), Mat3::identity(), 1.0, 0.1, &StepControl::default()).unwrap();
        let e = collar_energy(&traj, 0.1, 1.0).unwrap();
        let exact = (1e3 - 1.0) / eight_pi2();
        assert!((e - exact).abs() < 1e-7 * exact, "{e} {exact} {}", traj.grid().len());
        let node = traj.grid()[3];
        assert_eq!(collar_energy(&traj, node, node).unwrap(), 0.0);
        assert!(matches!(collar_energy(&traj, 0.05, 1.0), Err(NahmError::OutOfRange { .. })));
    }
}
