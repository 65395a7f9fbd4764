//! Radial gauge fixing at jet level.
//!
//! A 0-connection on the collar is A = d + a + C dx/x with a tangential and
//! C an 𝔰𝔬(3) matrix (the adjoint image of an 𝔰𝔲(2) element). Gauge
//! transformations are SO(3)-valued functions of x acting on the value index.

use crate::error::{NahmError, Result};
use crate::frame_algebra::{max_abs, Mat3};
use crate::log_series::{MatSeries, ScalarSeries};

/// An SO(3)-valued jet g(x) with g(0) = I.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeJet {
    g: MatSeries,
}

impl GaugeJet {
    pub fn new(g: MatSeries) -> Result<Self> {
        if g.terms().any(|(&(k, l), c)| (k < 0 || (k == 0 && l > 0)) && max_abs(c) > 0.0) {
            return Err(NahmError::InvalidInput("gauge jet must be regular at x = 0".into()));
        }
        if max_abs(&(g.get(0, 0) - Mat3::identity())) > 1e-14 {
            return Err(NahmError::InvalidInput("gauge jet must start at the identity".into()));
        }
        let scale = 1.0 + g.max_norm_through(g.order()).powi(2);
        let defect = (&(&g.transpose() * &g) - &MatSeries::one(g.order())).max_norm_through(g.order());
        if defect > 1e-12 * scale {
            return Err(NahmError::InvalidInput(format!("gauge jet is not orthogonal (defect {defect:e})")));
        }
        Ok(Self { g })
    }

    pub fn identity(order: i32) -> Self {
        Self {
            g: MatSeries::one(order),
        }
    }

    pub fn series(&self) -> &MatSeries {
        &self.g
    }
}

/// Transform (a, C) by g: a ↦ gᵀa, C ↦ gᵀCg + x gᵀ∂ₓg.
pub fn apply_gauge(g: &GaugeJet, a: &MatSeries, c: &MatSeries) -> (MatSeries, MatSeries) {
    let gt = g.g.transpose();
    let a_new = &gt * a;
    let x = ScalarSeries::monomial(1.0, 1, 0, g.g.order() + 1);
    let x_dg = g.g.d_dx().scalar_mul(&x);
    let c_new = &(&(&gt * c) * &g.g) + &(&gt * &x_dg);
    (a_new, c_new)
}

/// Solve x∂ₓu = −Cu with u(0) = I and return u together with the tangential
/// part uᵀa of the gauge-transformed connection, whose radial part vanishes.
pub fn radial_gauge_fix(a: &MatSeries, c: &MatSeries) -> Result<(GaugeJet, MatSeries)> {
    if c.terms().any(|(&(k, _), m)| k <= 0 && max_abs(m) > 0.0) {
        return Err(NahmError::NotAdapted);
    }
    if c.terms().any(|(_, m)| max_abs(&(m + m.transpose())) > 1e-12 * (1.0 + max_abs(m))) {
        return Err(NahmError::InvalidInput("radial component must be antisymmetric".into()));
    }
    let order = c.order();
    let mut u = MatSeries::new(0, order);
    u.set(0, 0, Mat3::identity());
    for k in 1..=order {
        // (Cu) at xᵏ, grouped by log power
        let mut cu: Vec<Mat3> = Vec::new();
        for (&(k1, l1), cm) in c.terms() {
            if k1 > k {
                continue;
            }
            for (&(k2, l2), um) in u.terms() {
                if k1 + k2 == k {
                    let l = (l1 + l2) as usize;
                    if cu.len() <= l {
                        cu.resize(l + 1, Mat3::zeros());
                    }
                    cu[l] += cm * um;
                }
            }
        }
        // k u_{k,l} + (l+1) u_{k,l+1} = −(Cu)_{k,l}
        let mut above = Mat3::zeros();
        for l in (0..cu.len()).rev() {
            let v = (-cu[l] - above * (l as f64 + 1.0)) / k as f64;
            u.set(k, l as u32, v);
            above = v;
        }
    }
    let gauge = GaugeJet { g: u };
    let a_new = &gauge.g.transpose() * a;
    Ok((gauge, a_new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn trivial_radial_part() {
        let a = MatSeries::monomial(Mat3::identity(), -1, 0, 6);
        let (g, a2) = radial_gauge_fix(&a, &MatSeries::new(1, 6)).unwrap();
        assert_eq!(g.series().get(0, 0), Mat3::identity());
        assert_eq!(g.series().max_norm_through(6), 1.0);
        assert_eq!(a2.get(-1, 0), Mat3::identity());
    }

    #[test]
    fn linear_radial_part() {
        let xi = Mat3::new(0.0, -0.4, 0.3, 0.4, 0.0, -0.9, -0.3, 0.9, 0.0);
        let c = MatSeries::monomial(xi, 1, 0, 10);
        let (g, _) = radial_gauge_fix(&MatSeries::new(-1, 10), &c).unwrap();
        let expected = MatSeries::monomial(-xi, 1, 0, 10).exp().unwrap();
        assert!((g.series() - &expected).max_norm_through(10) < 1e-15);
    }

    #[test]
    fn rejects_non_adapted() {
        let xi = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let c = MatSeries::constant(xi, 4);
        assert_eq!(radial_gauge_fix(&MatSeries::new(-1, 4), &c).unwrap_err(), NahmError::NotAdapted);
    }

    #[test]
    fn round_trip() {
        let mut rng = random::rng(7);
        for logs in [false, true] {
            let g = GaugeJet::new(random::gauge_jet(&mut rng, 8, 0.5, logs)).unwrap();
            let mut a = MatSeries::new(-1, 8);
            for k in -1..=6 {
                a.set(k, 0, random::matrix(&mut rng, 1.0));
            }
            a.set(3, 1, random::matrix(&mut rng, 1.0));
            let (a1, c1) = apply_gauge(&g, &a, &MatSeries::new(1, 8));
            let (u, a2) = radial_gauge_fix(&a1, &c1).unwrap();
            assert!((&a2 - &a).max_norm_through(6) < 1e-12);
            assert!((&u.series().transpose() - g.series()).max_norm_through(6) < 1e-12);
        }
    }
}
