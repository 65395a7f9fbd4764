//! Numerical integration of the radial self-duality equation
//! ∂ₓa = −⋆(x)(d_Y a + ½[a∧a]).

use std::fmt;
use std::sync::Arc;

use crate::collar_geometry::MetricJet;
use crate::dynamics::quadrature::fornberg_weights;
use crate::error::{NahmError, Result};
use crate::frame_algebra::{curvature, exterior_d, hodge2, max_abs, on_form_index, wedge_bracket, FrameModel, Mat3};
use crate::log_series::MatSeries;
use crate::nahm_expansion::self_duality_residual_series;

/// The boundary metric family h(x) as a Gram matrix.
#[derive(Clone)]
pub enum MetricModel {
    /// Jets read as a polynomial in x.
    Jet(MetricJet),
    Function(Arc<dyn Fn(f64) -> Mat3 + Send + Sync>),
}

impl MetricModel {
    pub fn gram(&self, x: f64) -> Mat3 {
        match self {
            Self::Jet(m) => m.evaluate(x),
            Self::Function(f) => f(x),
        }
    }
}

impl fmt::Debug for MetricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Jet(m) => f.debug_tuple("Jet").field(m).finish(),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl From<MetricJet> for MetricModel {
    fn from(m: MetricJet) -> Self {
        Self::Jet(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    /// Local error bound per step, relative to 1 + ‖a‖.
    pub tol: f64,
    /// First trial step; defaults to 10⁻³ of the starting point.
    pub initial_step: Option<f64>,
    /// Smallest step relative to |x| before giving up.
    pub min_step: f64,
    pub max_step: f64,
    /// Largest step relative to |x|.
    pub max_rel_step: f64,
    /// Points the grid must contain.
    pub landmarks: Vec<f64>,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            initial_step: None,
            min_step: 1e-13,
            max_step: f64::INFINITY,
            max_rel_step: 0.005,
            landmarks: Vec::new(),
            max_steps: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn landmarks(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.landmarks.extend(points);
        self
    }
}

/// Integrate y′ = rhs(x, y) from `x_from` to `x_to` with RK4 and step
/// doubling. Returns the visited nodes in integration order and the largest
/// accepted local error estimate.
pub fn integrate(
    rhs: impl Fn(f64, &Mat3) -> Result<Mat3>,
    y0: Mat3,
    x_from: f64,
    x_to: f64,
    control: &StepControl,
) -> Result<(Vec<f64>, Vec<Mat3>, f64)> {
    let fail = |x: f64, reason: &str| NahmError::IntegrationFailure {
        x,
        reason: reason.to_string(),
    };
    if !(x_from.is_finite() && x_to.is_finite()) || x_from == x_to {
        return Err(NahmError::InvalidInput("integration range must be finite and nonempty".into()));
    }
    let dir = (x_to - x_from).signum();
    let mut marks: Vec<f64> = control
        .landmarks
        .iter()
        .copied()
        .filter(|m| (m - x_from) * dir > 0.0 && (x_to - m) * dir > 0.0)
        .collect();
    marks.push(x_to);
    marks.sort_by(|a, b| ((a - b) * dir).partial_cmp(&0.0).unwrap());
    marks.dedup();

    let rk4 = |x: f64, y: &Mat3, h: f64| -> Result<Mat3> {
        let k1 = rhs(x, y)?;
        let k2 = rhs(x + 0.5 * h, &(y + k1 * (0.5 * h)))?;
        let k3 = rhs(x + 0.5 * h, &(y + k2 * (0.5 * h)))?;
        let k4 = rhs(x + h, &(y + k3 * h))?;
        Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    };

    let mut xs = vec![x_from];
    let mut ys = vec![y0];
    let mut x = x_from;
    let mut y = y0;
    let mut h = control.initial_step.unwrap_or(1e-3 * x_from.abs().max(1e-300)).min(control.max_step);
    let mut worst = 0.0_f64;
    let mut next = 0;
    let mut steps = 0;
    while next < marks.len() {
        steps += 1;
        if steps > control.max_steps {
            return Err(fail(x, "step budget exhausted"));
        }
        let target = marks[next];
        h = h.min(control.max_rel_step * x.abs());
        let remaining = (target - x).abs();
        let hits = h >= remaining * (1.0 - 1e-12);
        let step = if hits { remaining } else { h };
        let y1 = rk4(x, &y, dir * step)?;
        let half = rk4(x, &y, 0.5 * dir * step)?;
        let y2 = rk4(x + 0.5 * dir * step, &half, 0.5 * dir * step)?;
        let err = max_abs(&(y2 - y1)) / 15.0;
        let scale = control.tol * (1.0 + max_abs(&y2));
        if !err.is_finite() || !y2.iter().all(|v| v.is_finite()) {
            h = 0.25 * step;
        } else if err <= scale {
            y = y2 + (y2 - y1) / 15.0;
            x = if hits { target } else { x + dir * step };
            xs.push(x);
            ys.push(y);
            worst = worst.max(err);
            if hits {
                next += 1;
            }
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 4.0) };
            h = (step * grow).min(control.max_step);
            if hits {
                h = h.max(step);
            }
        } else {
            h = step * (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.9);
        }
        if h < control.min_step * x.abs().max(f64::MIN_POSITIVE) {
            return Err(fail(x, "step size underflow"));
        }
    }
    Ok((xs, ys, worst))
}

/// Right-hand side −⋆(x) f_a of the evolution equation.
pub fn evolution_rhs(frame: &FrameModel, metric: &MetricModel, x: f64, a: &Mat3) -> Result<Mat3> {
    let star = hodge2(&metric.gram(x)).map_err(|_| NahmError::IntegrationFailure {
        x,
        reason: "boundary metric is not positive definite".into(),
    })?;
    Ok(-on_form_index(&star, &curvature(a, frame)))
}

/// A numerical solution on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Vec<f64>,
    values: Vec<Mat3>,
    frame: FrameModel,
    metric: MetricModel,
    max_local_error: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Mat3] {
        &self.values
    }

    pub fn frame(&self) -> &FrameModel {
        &self.frame
    }

    pub fn metric(&self) -> &MetricModel {
        &self.metric
    }

    pub fn max_local_error(&self) -> f64 {
        self.max_local_error
    }

    /// Index of the grid node at `x`.
    pub fn index_of(&self, x: f64) -> Result<usize> {
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        let slack = 1e-12 * hi.abs().max(lo.abs());
        if x < lo - slack || x > hi + slack {
            return Err(NahmError::OutOfRange { x, lo, hi });
        }
        let i = self.grid.partition_point(|g| *g < x - slack);
        if i < self.grid.len() && (self.grid[i] - x).abs() <= slack {
            Ok(i)
        } else {
            Err(NahmError::NotOnGrid(x))
        }
    }

    pub fn value_at(&self, x: f64) -> Result<Mat3> {
        Ok(self.values[self.index_of(x)?])
    }

    /// ∂ₓa at node `i` from the evolution equation.
    pub fn derivative(&self, i: usize) -> Result<Mat3> {
        evolution_rhs(&self.frame, &self.metric, self.grid[i], &self.values[i])
    }

    /// Pointwise ‖∂ₓa + ⋆f_a‖ with ∂ₓa from 7-point finite differences on the
    /// grid, independent of the integrator.
    pub fn self_duality_residual(&self) -> Result<Vec<(f64, f64)>> {
        let n = self.grid.len();
        if n < 7 {
            return Err(NahmError::InvalidInput("need at least 7 grid points".into()));
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let start = i.saturating_sub(3).min(n - 7);
            let nodes = &self.grid[start..start + 7];
            let w = fornberg_weights(self.grid[i], nodes, 1);
            let fd = (0..7).fold(Mat3::zeros(), |acc, j| acc + self.values[start + j] * w[1][j]);
            out.push((self.grid[i], max_abs(&(fd - self.derivative(i)?))));
        }
        Ok(out)
    }
}

/// Integrate the evolution equation from `seed` at `x_from` to `x_to`.
pub fn evolve(
    frame: &FrameModel,
    metric: impl Into<MetricModel>,
    seed: Mat3,
    x_from: f64,
    x_to: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    if !(x_from.min(x_to) > 0.0) {
        return Err(NahmError::InvalidInput("integration range must lie in x > 0".into()));
    }
    let metric = metric.into();
    let (mut xs, mut ys, worst) = integrate(|x, a| evolution_rhs(frame, &metric, x, a), seed, x_from, x_to, control)?;
    if x_to < x_from {
        xs.reverse();
        ys.reverse();
    }
    Ok(Trajectory {
        grid: xs,
        values: ys,
        frame: frame.clone(),
        metric,
        max_local_error: worst,
    })
}

/// A numerical solution written as a known series plus a computed remainder.
#[derive(Debug, Clone)]
pub struct Deviation {
    pub grid: Vec<f64>,
    pub remainder: Vec<Mat3>,
    pub max_local_error: f64,
}

/// Integrate the evolution equation for a = b + r, where b is a finite
/// log-Laurent polynomial and r the unknown remainder. The residual of b is
/// taken from exact series arithmetic, so r carries no cancellation error
/// from the large leading terms of a.
pub fn evolve_remainder(
    frame: &FrameModel,
    metric: &MetricJet,
    base: &MatSeries,
    seed: Mat3,
    x_from: f64,
    x_to: f64,
    control: &StepControl,
) -> Result<Deviation> {
    if !(x_from.min(x_to) > 0.0) {
        return Err(NahmError::InvalidInput("integration range must lie in x > 0".into()));
    }
    let extra = 16;
    let residual = self_duality_residual_series(frame, metric, base, base.order() as usize + extra)?;
    let model = MetricModel::Jet(metric.clone());
    let rhs = |x: f64, r: &Mat3| -> Result<Mat3> {
        let star = hodge2(&model.gram(x)).map_err(|_| NahmError::IntegrationFailure {
            x,
            reason: "boundary metric is not positive definite".into(),
        })?;
        let b = base.evaluate(x);
        let f = exterior_d(r, frame) + wedge_bracket(&b, r) + wedge_bracket(r, r) * 0.5;
        Ok(-residual.evaluate(x) - on_form_index(&star, &f))
    };
    let (mut xs, mut rs, worst) = integrate(rhs, seed, x_from, x_to, control)?;
    if x_to < x_from {
        xs.reverse();
        rs.reverse();
    }
    Ok(Deviation {
        grid: xs,
        remainder: rs,
        max_local_error: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_model_is_exact() {
        let flat = FrameModel::flat_torus(1.0).unwrap();
        let traj = evolve(&flat, MetricJet::product(), Mat3::identity(), 1.0, 0.01, &StepControl::default()).unwrap();
        assert_eq!(traj.grid()[0], 0.01);
        assert_eq!(*traj.grid().last().unwrap(), 1.0);
        let worst = traj
            .grid()
            .iter()
            .zip(traj.values())
            .map(|(x, a)| max_abs(&(a - Mat3::identity() / *x)))
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst:e}");
    }

    #[test]
    fn landmarks_are_hit() {
        let flat = FrameModel::flat_torus(1.0).unwrap();
        let ctl = StepControl::default().landmarks([0.5, 0.25, 0.125]);
        let traj = evolve(&flat, MetricJet::product(), Mat3::identity(), 1.0, 0.1, &ctl).unwrap();
        for m in [0.5, 0.25, 0.125, 0.1, 1.0] {
            let a = traj.value_at(m).unwrap();
            assert!(max_abs(&(a - Mat3::identity() / m)) < 1e-9);
        }
        assert!(matches!(traj.value_at(0.3), Err(NahmError::NotOnGrid(_))));
        assert!(matches!(traj.value_at(2.0), Err(NahmError::OutOfRange { .. })));
    }

    #[test]
    fn wrong_seed_blows_up() {
        // the trace mode grows like x⁻² towards the boundary, so a large
        // seed runs into a finite-x singularity
        let flat = FrameModel::flat_torus(1.0).unwrap();
        let r = evolve(&flat, MetricJet::product(), Mat3::identity() * 5.0, 1.0, 1e-3, &StepControl::default());
        match r {
            Err(NahmError::IntegrationFailure { x, .. }) => assert!(x > 1e-3 && x < 1.0),
            other => panic!("{other:?}"),
        }
    }
}
