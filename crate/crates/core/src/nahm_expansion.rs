//! Formal expansion of self-dual connections with a Nahm pole.
//!
//! In radial gauge a self-dual connection over the collar is a family of
//! boundary connections α(x) solving ∂ₓα = −⋆(x) f_α, with ⋆(x) the
//! Λ² → Λ¹ star of h(x). With the pole normalized to θ/x the solution has
//! the form
//!
//! α(x) = θ/x + α₀ + Σ_{k ≥ 1} Σ_l α_{k,l} xᵏ (log x)ˡ,
//!
//! and the coefficients are determined order by order, except for the
//! symmetric trace-free part of α₁ which is free.

use std::collections::BTreeMap;

use crate::collar_geometry::{extrinsic_jets, intrinsic_geometry, weyl_eb, IntrinsicGeometry, MetricJet};
use crate::error::{NahmError, Result};
use crate::frame_algebra::{
    covariant_ext_d, curvature, exterior_d, hodge2, max_abs, on_form_index, sk, symtf, tf, trace_part, wedge_bracket,
    FrameModel, Mat3,
};
use crate::log_series::MatSeries;

/// Default tolerance for residue classification.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Highest log power allowed at xᵏ.
pub fn log_cap(k: usize) -> u32 {
    k.div_ceil(2) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub frame: FrameModel,
    pub metric: MetricJet,
    /// Free datum symtf α₁.
    pub sigma: Mat3,
    /// Truncation order N.
    pub order: usize,
}

impl BoundaryData {
    pub fn new(frame: FrameModel, metric: MetricJet, sigma: Mat3, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(NahmError::OrderTooLow(order as i32));
        }
        if max_abs(&(sigma - symtf(&sigma))) > 1e-14 {
            return Err(NahmError::InvalidInput("sigma must be symmetric and trace-free".into()));
        }
        Ok(Self {
            frame,
            metric,
            sigma,
            order,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionExpansion {
    pub alpha_minus1: Mat3,
    pub alpha0: Mat3,
    coeffs: BTreeMap<(usize, u32), Mat3>,
    order: usize,
}

impl ConnectionExpansion {
    pub fn order(&self) -> usize {
        self.order
    }

    /// α_{k,l}; zero when not stored.
    pub fn get(&self, k: usize, l: u32) -> Mat3 {
        self.coeffs.get(&(k, l)).copied().unwrap_or_else(Mat3::zeros)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&(usize, u32), &Mat3)> {
        self.coeffs.iter()
    }

    fn insert(&mut self, k: usize, l: u32, c: Mat3) {
        assert!(l <= log_cap(k), "coefficient ({k},{l}) exceeds the log cap");
        assert!((1..=self.order).contains(&k));
        self.coeffs.insert((k, l), c);
    }

    /// The 0-instanton obstruction α_{1,1}.
    pub fn obstruction(&self) -> Mat3 {
        self.get(1, 1)
    }

    /// α(x) as a log-Laurent series known through x^N.
    pub fn series(&self) -> MatSeries {
        let mut s = MatSeries::new(-1, self.order as i32);
        s.set(-1, 0, self.alpha_minus1);
        s.set(0, 0, self.alpha0);
        for (&(k, l), c) in &self.coeffs {
            s.set(k as i32, l, *c);
        }
        s
    }

    pub fn evaluate(&self, x: f64) -> Mat3 {
        self.series().evaluate(x)
    }

    /// The expansion for the residue `rotation`: every coefficient is moved by
    /// the constant gauge rotation acting on the value index.
    pub fn rotated(&self, rotation: &Mat3) -> MatSeries {
        self.series().map(|c| rotation * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidueClass {
    Zero,
    NahmPole { rotation: Mat3 },
    Invalid,
}

/// Classify the residue of a 0-connection in an orthonormal boundary frame.
pub fn classify_residue(r: &Mat3, tol: f64) -> ResidueClass {
    if max_abs(r) <= tol {
        return ResidueClass::Zero;
    }
    let col = |i: usize| r.column(i).into_owned();
    let defect = [
        col(0) - col(1).cross(&col(2)),
        col(1) - col(2).cross(&col(0)),
        col(2) - col(0).cross(&col(1)),
    ]
    .iter()
    .fold(0.0_f64, |acc, v| acc.max(v.amax()));
    if defect <= tol {
        ResidueClass::NahmPole { rotation: *r }
    } else {
        ResidueClass::Invalid
    }
}

/// The connection whose torsion against θ is `t`, i.e. ⋆₀ d_α θ = T.
pub fn solve_torsion(t: &Mat3, intrinsic: &IntrinsicGeometry) -> Mat3 {
    intrinsic.spin_conn + sk(t) - symtf(t) + Mat3::identity() * (t.trace() / 6.0)
}

/// The boundary connection α₀ = ω − 2S₀ + ½𝖧₀.
pub fn alpha0(frame: &FrameModel, m: &MetricJet) -> Result<Mat3> {
    let ext = extrinsic_jets(&m.with_order(m.order().max(1))?)?;
    let geo = intrinsic_geometry(frame, &Mat3::identity())?;
    let s0 = ext.shape_at(0);
    if max_abs(&s0) == 0.0 {
        return Ok(geo.spin_conn);
    }
    Ok(geo.spin_conn - s0.transpose() * 2.0 + Mat3::identity() * (0.5 * ext.mean_curv.get(0, 0)))
}

/// Series of the Λ² → Λ¹ star of h(x), known through `order`.
fn inverse_star_series(m: &MetricJet, order: usize) -> Result<MatSeries> {
    let h = m.series(order)?;
    Ok(h.scalar_mul(&h.det3().sqrt()?.invert()?))
}

fn curvature_series(alpha: &MatSeries, frame: &FrameModel) -> MatSeries {
    let d = alpha.map(|a| exterior_d(a, frame));
    let q = alpha.mul_with(alpha, |a, b| wedge_bracket(a, b) * 0.5);
    &d + &q
}

/// ∂ₓα + ⋆(x) f_α for a series α, with ⋆ given as its Λ² → Λ¹ series.
fn residual_with(alpha: &MatSeries, star: &MatSeries, frame: &FrameModel) -> MatSeries {
    let f = curvature_series(alpha, frame);
    let sf = star.mul_with(&f, on_form_index);
    &alpha.d_dx() + &sf
}

/// Self-duality residual ∂ₓα + ⋆(x) f_α of a completed expansion, known
/// through x^{N−1}.
pub fn self_duality_residual(data: &BoundaryData, e: &ConnectionExpansion) -> Result<MatSeries> {
    let star = inverse_star_series(&data.metric, data.order + 1)?;
    Ok(residual_with(&e.series(), &star, &data.frame))
}

/// Residual of a finite log-Laurent polynomial `alpha`, read as exact, known
/// through x^{order−1}.
pub fn self_duality_residual_series(
    frame: &FrameModel,
    metric: &MetricJet,
    alpha: &MatSeries,
    order: usize,
) -> Result<MatSeries> {
    let star = inverse_star_series(metric, order + 1)?;
    Ok(residual_with(&alpha.clone().with_order(order as i32), &star, frame))
}

/// Solve the recursion through order N.
pub fn expand(data: &BoundaryData) -> Result<ConnectionExpansion> {
    let n = data.order;
    if n < 2 {
        return Err(NahmError::OrderTooLow(n as i32));
    }
    let star = inverse_star_series(&data.metric, n + 1)?;
    let mut e = ConnectionExpansion {
        alpha_minus1: Mat3::identity(),
        alpha0: alpha0(&data.frame, &data.metric)?,
        coeffs: BTreeMap::new(),
        order: n,
    };
    let rhs = |e: &ConnectionExpansion, k: usize, l: u32| -> Mat3 {
        -residual_with(&e.series(), &star, &data.frame).get(k as i32 - 1, l)
    };

    // order 1: the model operator is singular on symtf, which is free
    let t = rhs(&e, 1, 0);
    e.insert(1, 1, symtf(&t));
    e.insert(1, 0, sk(&t) * 0.5 + trace_part(&t) / 3.0 + data.sigma);

    for k in 2..=n {
        let kf = k as f64;
        for l in (0..=log_cap(k)).rev() {
            let t = rhs(&e, k, l);
            let c = sk(&t) / (kf + 1.0) + symtf(&t) / (kf - 1.0) + trace_part(&t) / (kf + 2.0);
            e.insert(k, l, c);
        }
    }
    Ok(e)
}

/// k g + (tr g) I − gᵀ, the linearization of the recursion at order k.
pub fn model_operator(k: f64, g: &Mat3) -> Mat3 {
    g * k + Mat3::identity() * g.trace() - g.transpose()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstruction {
    /// symtf ⋆₀(⋆₂θ − f_{α₀}).
    pub recursive: Mat3,
    /// 2(W̄ᴮ − W̄ᴱ).
    pub weyl: Mat3,
    pub max_diff: f64,
}

/// The 0-instanton obstruction tensor computed from the recursion and from
/// the Weyl tensor.
pub fn obstruction(frame: &FrameModel, m: &MetricJet) -> Result<Obstruction> {
    let ext = extrinsic_jets(&m.with_order(m.order().max(3))?)?;
    let a0 = alpha0(frame, m)?;
    let f0 = curvature(&a0, frame);
    let star0 = hodge2(&Mat3::identity())?;
    let recursive = symtf(&on_form_index(&star0, &(ext.star_at(2) - f0)));
    let (w_e, w_b) = weyl_eb(frame, m)?;
    let weyl = (w_b - w_e) * 2.0;
    Ok(Obstruction {
        recursive,
        weyl,
        max_diff: max_abs(&(recursive - weyl)),
    })
}

/// ½ tf Ric♯ of the metric `h` on the frame.
pub fn spin_boundary_value(frame: &FrameModel, h: &Mat3) -> Result<Mat3> {
    let geo = intrinsic_geometry(frame, h)?;
    Ok(tf(&geo.ricci_sharp(h)) * 0.5)
}

/// No coefficient carrying a log exceeds `tol`.
pub fn is_smooth(e: &ConnectionExpansion, tol: f64) -> bool {
    e.coefficients().all(|(&(_, l), c)| l == 0 || max_abs(c) <= tol)
}

/// ⋆₀ d_α θ in the orthonormal boundary frame.
pub fn torsion(alpha: &Mat3, frame: &FrameModel) -> Mat3 {
    covariant_ext_d(alpha, &Mat3::identity(), frame)
}
