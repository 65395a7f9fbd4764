//! Geometry of a geodesic collar dx² + h(x) over a homogeneous boundary.
//!
//! The boundary metric h(x) is stored through its vector-frame Gram matrix
//! H(x), with H(0) = I so that the coframe is orthonormal at the boundary.
//! Endomorphisms act on vector components; their adjoints on 1-form
//! components are the transposes.

use crate::error::{NahmError, Result};
use crate::frame_algebra::{covariant_ext_d, hodge1, levi_civita, max_abs, symtf, tf, FrameModel, Mat3};
use crate::log_series::{MatSeries, ScalarSeries};

const JET_TOL: f64 = 1e-14;

/// Taylor jets of H(x) in geodesic normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    coeffs: Vec<Mat3>,
    order: usize,
    exact: bool,
}

impl MetricJet {
    /// Jets H₀, …, H_N known through order N = `coeffs.len() − 1`.
    pub fn new(coeffs: Vec<Mat3>) -> Result<Self> {
        Self::validate(&coeffs)?;
        let order = coeffs.len() - 1;
        Ok(Self {
            coeffs,
            order,
            exact: false,
        })
    }

    /// A metric that is exactly the given polynomial in x, so every higher
    /// jet vanishes.
    pub fn polynomial(coeffs: Vec<Mat3>) -> Result<Self> {
        Self::validate(&coeffs)?;
        let order = coeffs.len() - 1;
        Ok(Self {
            coeffs,
            order,
            exact: true,
        })
    }

    /// The product collar H(x) = I.
    pub fn product() -> Self {
        Self {
            coeffs: vec![Mat3::identity()],
            order: 0,
            exact: true,
        }
    }

    fn validate(coeffs: &[Mat3]) -> Result<()> {
        let h0 = coeffs
            .first()
            .ok_or_else(|| NahmError::InvalidMetricJet("no coefficients given".into()))?;
        if max_abs(&(h0 - Mat3::identity())) > JET_TOL {
            return Err(NahmError::InvalidMetricJet("H0 must be the identity".into()));
        }
        for (k, h) in coeffs.iter().enumerate() {
            if !h.iter().all(|v| v.is_finite()) {
                return Err(NahmError::InvalidMetricJet(format!("H{k} has non-finite entries")));
            }
            if max_abs(&(h - h.transpose())) > JET_TOL * (1.0 + max_abs(h)) {
                return Err(NahmError::InvalidMetricJet(format!("H{k} is not symmetric")));
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Highest order through which the jets are known.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The jet Hₖ.
    pub fn h(&self, k: usize) -> Result<Mat3> {
        if k > self.order && !self.exact {
            return Err(NahmError::InsufficientOrder {
                needed: k,
                available: self.order,
            });
        }
        Ok(self.coeffs.get(k).copied().unwrap_or_else(Mat3::zeros))
    }

    pub fn coefficients(&self) -> &[Mat3] {
        &self.coeffs
    }

    /// Same jets, declared known through `order`. Fails for non-polynomial
    /// jets asked beyond their known order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        if order > self.order && !self.exact {
            return Err(NahmError::InsufficientOrder {
                needed: order,
                available: self.order,
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        Ok(Self {
            coeffs,
            order,
            exact: self.exact && order >= self.coeffs.len() - 1,
        })
    }

    /// H(x) as a series known through `order`.
    pub fn series(&self, order: usize) -> Result<MatSeries> {
        let jet = self.with_order(order)?;
        let mut s = MatSeries::new(0, order as i32);
        for (k, h) in jet.coeffs.iter().enumerate() {
            s.set(k as i32, 0, *h);
        }
        Ok(s)
    }

    /// H(x) from the stored jets read as a polynomial.
    pub fn evaluate(&self, x: f64) -> Mat3 {
        self.coeffs.iter().rev().fold(Mat3::zeros(), |acc, h| acc * x + h)
    }

    /// dH/dx from the stored jets read as a polynomial.
    pub fn evaluate_derivative(&self, x: f64) -> Mat3 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Mat3::zeros(), |acc, (k, h)| acc * x + h * k as f64)
    }

    /// Jets of the Gram matrix after x ↦ λx, Hₖ ↦ λ⁻ᵏHₖ.
    pub fn rescale(&self, lambda: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, h)| h * lambda.powi(-(k as i32)))
                .collect(),
            order: self.order,
            exact: self.exact,
        }
    }
}

/// Extrinsic quantities of the level sets of x, as series.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicJets {
    /// Shape operator S = −½H⁻¹H′.
    pub shape: MatSeries,
    /// Mean curvature tr S.
    pub mean_curv: ScalarSeries,
    /// Normal curvature operator ∂ₓS − S².
    pub normal_curv: MatSeries,
    /// Hodge star Λ¹ → Λ² of h(x), √det H · H⁻¹.
    pub star_jets: MatSeries,
}

impl ExtrinsicJets {
    pub fn shape_at(&self, k: i32) -> Mat3 {
        self.shape.get(k, 0)
    }

    pub fn normal_curv_at(&self, k: i32) -> Mat3 {
        self.normal_curv.get(k, 0)
    }

    pub fn star_at(&self, k: i32) -> Mat3 {
        self.star_jets.get(k, 0)
    }
}

/// Shape operator, mean and normal curvature and star jets of `m`, using all
/// jets the metric carries.
pub fn extrinsic_jets(m: &MetricJet) -> Result<ExtrinsicJets> {
    let h = m.series(m.order())?;
    let h_inv = h.invert()?;
    let shape = (&h_inv * &h.d_dx()).scale(-0.5);
    let mean_curv = shape.trace();
    let normal_curv = &shape.d_dx() - &(&shape * &shape);
    let vol = h.det3().sqrt()?;
    let star_jets = h_inv.scalar_mul(&vol);
    Ok(ExtrinsicJets {
        shape,
        mean_curv,
        normal_curv,
        star_jets,
    })
}

/// Levi-Civita data of a homogeneous metric on a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicGeometry {
    /// `gamma[k][i][j]` = Γᵏᵢⱼ with ∇_{eᵢ}eⱼ = Γᵏᵢⱼ eₖ.
    pub gamma: [[[f64; 3]; 3]; 3],
    /// Spin connection as a valued 1-form in the Cholesky-orthonormal coframe
    /// (the given coframe when H = I).
    pub spin_conn: Mat3,
    pub ricci: Mat3,
    pub scalar: f64,
    pub einstein: Mat3,
    pub schouten: Mat3,
}

impl IntrinsicGeometry {
    /// Ricci endomorphism H⁻¹Ric.
    pub fn ricci_sharp(&self, h: &Mat3) -> Mat3 {
        h.try_inverse().expect("metric is positive definite") * self.ricci
    }

    pub fn schouten_sharp(&self, h: &Mat3) -> Mat3 {
        h.try_inverse().expect("metric is positive definite") * self.schouten
    }
}

fn christoffel(frame: &FrameModel, h: &Mat3) -> Result<[[[f64; 3]; 3]; 3]> {
    let h_inv = h.try_inverse().ok_or(NahmError::NotPositiveDefinite)?;
    // b[i][j][k] = ⟨[eᵢ,eⱼ],eₖ⟩
    let mut b = [[[0.0; 3]; 3]; 3];
    for (i, bi) in b.iter_mut().enumerate() {
        for (j, bij) in bi.iter_mut().enumerate() {
            for (k, v) in bij.iter_mut().enumerate() {
                *v = (0..3).map(|m| frame.c(m, i, j) * h[(m, k)]).sum();
            }
        }
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (l, gl) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                gl[i][j] = (0..3)
                    .map(|k| 0.5 * h_inv[(l, k)] * (b[i][j][k] - b[j][k][i] + b[k][i][j]))
                    .sum();
            }
        }
    }
    Ok(gamma)
}

/// Valued 1-form of the Levi-Civita connection in an orthonormal frame.
fn spin_form(gamma: &[[[f64; 3]; 3]; 3]) -> Mat3 {
    let mut w = Mat3::zeros();
    for m in 0..3 {
        for i in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for j in 0..3 {
                    s += levi_civita(m, k, j) * gamma[k][i][j];
                }
            }
            w[(m, i)] = -0.5 * s;
        }
    }
    w
}

/// Christoffel symbols, curvature and spin connection of the homogeneous
/// metric with Gram matrix `h` on `frame`.
pub fn intrinsic_geometry(frame: &FrameModel, h: &Mat3) -> Result<IntrinsicGeometry> {
    hodge1(h)?;
    let gamma = christoffel(frame, h)?;
    let mut ricci = Mat3::zeros();
    for j in 0..3 {
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                // Rⁱ_{kij}
                for m in 0..3 {
                    s += gamma[m][j][k] * gamma[i][i][m]
                        - gamma[m][i][k] * gamma[i][j][m]
                        - frame.c(m, i, j) * gamma[i][m][k];
                }
            }
            ricci[(j, k)] = s;
        }
    }
    let ricci = (ricci + ricci.transpose()) * 0.5;
    let h_inv = h.try_inverse().ok_or(NahmError::NotPositiveDefinite)?;
    let scalar = (h_inv * ricci).trace();
    let on_frame = if max_abs(&(h - Mat3::identity())) == 0.0 {
        gamma
    } else {
        christoffel(&frame.orthonormalize(h)?, &Mat3::identity())?
    };
    Ok(IntrinsicGeometry {
        gamma,
        spin_conn: spin_form(&on_frame),
        ricci,
        scalar,
        einstein: ricci - h * (0.5 * scalar),
        schouten: ricci - h * (0.25 * scalar),
    })
}

/// Electric and magnetic parts of the ambient Weyl tensor at the boundary.
pub fn weyl_eb(frame: &FrameModel, m: &MetricJet) -> Result<(Mat3, Mat3)> {
    let ext = extrinsic_jets(&m.with_order(m.order().max(2))?)?;
    let geo = intrinsic_geometry(frame, &Mat3::identity())?;
    let s0 = ext.shape_at(0);
    let rn0 = ext.normal_curv_at(0);
    let mean0 = ext.mean_curv.get(0, 0);
    let w_e = tf(&(s0 * s0 - rn0 + geo.ricci - s0 * mean0)) * 0.5;
    // ⋆₀ = I on the orthonormal boundary frame
    let w_b = symtf(&covariant_ext_d(&geo.spin_conn, &s0.transpose(), frame));
    Ok((w_e, w_b))
}

/// Poincaré–Einstein conditions through `order` ∈ {1, 2, 3}: h₁ = 0,
/// h₂ = −P(h₀), tr h₃ = 0.
pub fn check_pe(frame: &FrameModel, m: &MetricJet, order: usize) -> Result<Vec<bool>> {
    const TOL: f64 = 1e-12;
    if !(1..=3).contains(&order) {
        return Err(NahmError::InvalidInput(format!("PE check order must be 1, 2 or 3, got {order}")));
    }
    let mut out = vec![max_abs(&m.h(1)?) <= TOL];
    if order >= 2 {
        let geo = intrinsic_geometry(frame, &Mat3::identity())?;
        out.push(max_abs(&(m.h(2)? + geo.schouten)) <= TOL);
    }
    if order >= 3 {
        out.push(m.h(3)?.trace().abs() <= TOL);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_algebra::exterior_d;
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn diag(a: f64, b: f64, c: f64) -> Mat3 {
        Mat3::from_diagonal(&Vector3::new(a, b, c))
    }

    fn hyperbolic() -> MetricJet {
        MetricJet::polynomial(vec![Mat3::identity(), Mat3::zeros(), Mat3::identity() * -0.5, Mat3::zeros(), Mat3::identity() / 16.0])
            .unwrap()
    }

    fn sym3() -> impl Strategy<Value = Mat3> {
        proptest::collection::vec(-0.5..0.5f64, 6).prop_map(|v| {
            Mat3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5])
        })
    }

    fn jet(order: usize) -> impl Strategy<Value = MetricJet> {
        proptest::collection::vec(sym3(), order).prop_map(|hs| {
            let mut c = vec![Mat3::identity()];
            c.extend(hs);
            MetricJet::new(c).unwrap()
        })
    }

    fn frame() -> impl Strategy<Value = FrameModel> {
        prop_oneof![
            Just(FrameModel::flat_torus(1.0).unwrap()),
            Just(FrameModel::round_s3()),
            Just(FrameModel::round_s3().change_coframe(&diag(2.0, 1.0, 1.0)).unwrap()),
            // solvable Lie algebra [e₃,e₁] = e₁, [e₃,e₂] = −e₂ (Sol geometry)
            Just(FrameModel::from_brackets([0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], 1.0).unwrap()),
        ]
    }

    #[test]
    fn jet_validation() {
        assert!(MetricJet::new(vec![Mat3::identity() * 2.0]).is_err());
        let mut ns = Mat3::zeros();
        ns[(0, 1)] = 1.0;
        assert!(MetricJet::new(vec![Mat3::identity(), ns]).is_err());
        let m = MetricJet::new(vec![Mat3::identity(), Mat3::zeros()]).unwrap();
        assert_eq!(m.h(3), Err(NahmError::InsufficientOrder { needed: 3, available: 1 }));
        assert_eq!(hyperbolic().h(7).unwrap(), Mat3::zeros());
    }

    #[test]
    fn product_collar() {
        let ext = extrinsic_jets(&MetricJet::product().with_order(5).unwrap()).unwrap();
        assert_eq!(ext.shape.max_norm_through(5), 0.0);
        assert_eq!(ext.normal_curv.max_norm_through(5), 0.0);
        assert_eq!(ext.star_at(0), Mat3::identity());
        assert_eq!(ext.star_jets.max_norm_through(5), 1.0);
    }

    #[test]
    fn hyperbolic_ball_jets() {
        let ext = extrinsic_jets(&hyperbolic().with_order(8).unwrap()).unwrap();
        // S = −½ h′/h with h = (1 − x²/4)² scalar, i.e. (x/2)/(1 − x²/4)
        let scalar_shape = [0.0, 0.5, 0.0, 0.125, 0.0, 1.0 / 32.0];
        for (k, v) in scalar_shape.iter().enumerate() {
            assert!(max_abs(&(ext.shape_at(k as i32) - Mat3::identity() * *v)) < 1e-14, "k={k}");
        }
        assert!(max_abs(&(ext.star_at(0) - Mat3::identity())) < 1e-15);
        assert!(max_abs(&ext.star_at(1)) < 1e-15);
        assert!(max_abs(&(ext.star_at(2) + Mat3::identity() * 0.25)) < 1e-15);
        for k in 3..=8 {
            assert!(max_abs(&ext.star_at(k)) < 1e-14);
        }
    }

    #[test]
    fn linear_jet_shape() {
        let k = Mat3::new(0.3, 0.1, 0.0, 0.1, -0.2, 0.4, 0.0, 0.4, 0.7);
        let ext = extrinsic_jets(&MetricJet::new(vec![Mat3::identity(), k]).unwrap()).unwrap();
        assert!(max_abs(&(ext.shape_at(0) + k * 0.5)) < 1e-15);
    }

    #[test]
    fn flat_and_round_geometry() {
        let flat = intrinsic_geometry(&FrameModel::flat_torus(1.0).unwrap(), &Mat3::identity()).unwrap();
        assert_eq!(flat.ricci, Mat3::zeros());
        assert_eq!(flat.scalar, 0.0);
        assert!(flat.gamma.iter().flatten().flatten().all(|g| *g == 0.0));

        let s3 = FrameModel::round_s3();
        let geo = intrinsic_geometry(&s3, &Mat3::identity()).unwrap();
        assert!(max_abs(&(geo.ricci - Mat3::identity() * 2.0)) < 1e-14);
        assert!((geo.scalar - 6.0).abs() < 1e-14);
        assert!(max_abs(&(geo.einstein + Mat3::identity())) < 1e-14);
        assert!(max_abs(&(geo.schouten - Mat3::identity() * 0.5)) < 1e-14);
        // bi-invariant oracle ∇_{eᵢ}eⱼ = ½[eᵢ,eⱼ]
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((geo.gamma[k][i][j] - 0.5 * s3.c(k, i, j)).abs() < 1e-15);
                }
            }
        }
        assert!(max_abs(&(geo.spin_conn - Mat3::identity())) < 1e-15);
        // ⋆F of the spin connection is the Einstein tensor
        let f = exterior_d(&geo.spin_conn, &s3) + crate::frame_algebra::wedge_bracket(&geo.spin_conn, &geo.spin_conn) * 0.5;
        assert!(max_abs(&(f - geo.einstein)) < 1e-14);
    }

    #[test]
    fn berger_sphere_ricci() {
        // Milnor's formula for the Berger sphere H = diag(λ², 1, 1): Ric eigenvalues
        // in an orthonormal frame are 2λ², 4 − 2λ², 4 − 2λ² with the normalization
        // where λ = 1 gives Ric = 2.
        let lam: f64 = 1.7;
        let h = diag(lam * lam, 1.0, 1.0);
        let geo = intrinsic_geometry(&FrameModel::round_s3(), &h).unwrap();
        let rs = geo.ricci_sharp(&h);
        let expect = diag(2.0 * lam.powi(2), 4.0 - 2.0 * lam.powi(2), 4.0 - 2.0 * lam.powi(2));
        assert!(max_abs(&(rs - expect)) < 1e-13, "{rs}");
        // same answer through the orthonormalized frame
        let on = FrameModel::round_s3().change_coframe(&diag(lam, 1.0, 1.0)).unwrap();
        let geo_on = intrinsic_geometry(&on, &Mat3::identity()).unwrap();
        assert!(max_abs(&(geo_on.ricci - expect)) < 1e-13);
        assert!(max_abs(&(geo_on.spin_conn - geo.spin_conn)) < 1e-13);
    }

    #[test]
    fn weyl_parts_examples() {
        let (we, wb) = weyl_eb(&FrameModel::round_s3(), &hyperbolic()).unwrap();
        assert!(max_abs(&we) < 1e-14);
        assert!(max_abs(&wb) < 1e-14);

        let h2 = diag(0.3, -0.7, 0.4);
        let m = MetricJet::new(vec![Mat3::identity(), Mat3::zeros(), h2]).unwrap();
        let (we, wb) = weyl_eb(&FrameModel::flat_torus(1.0).unwrap(), &m).unwrap();
        assert!(max_abs(&(we - h2 * 0.5)) < 1e-15);
        assert!(max_abs(&wb) < 1e-15);
    }

    #[test]
    fn pe_checks() {
        let s3 = FrameModel::round_s3();
        assert_eq!(check_pe(&s3, &hyperbolic(), 3).unwrap(), vec![true, true, true]);
        let flat = FrameModel::flat_torus(1.0).unwrap();
        let m = MetricJet::new(vec![Mat3::identity(), diag(1.0, 0.0, 0.0), Mat3::zeros(), Mat3::zeros()]).unwrap();
        assert!(!check_pe(&flat, &m, 3).unwrap()[0]);
        let m = MetricJet::new(vec![Mat3::identity(), Mat3::zeros(), Mat3::identity()]).unwrap();
        assert_eq!(check_pe(&flat, &m, 2).unwrap(), vec![true, false]);
        assert!(matches!(check_pe(&flat, &m, 3), Err(NahmError::InsufficientOrder { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn collar_identities(m in jet(6)) {
            let e = extrinsic_jets(&m).unwrap();
            let n = 3;
            let close = |a: &MatSeries, b: &MatSeries| (a - b).max_norm_through(n) <= 1e-12;
            let st = e.shape.transpose();
            let rt = e.normal_curv.transpose();
            let tr_s2 = (&e.shape * &e.shape).trace();
            let ric_n = e.normal_curv.trace();
            // Riccati equation
            prop_assert!(close(&e.shape.d_dx(), &(&(&e.shape * &e.shape) + &e.normal_curv)));
            // derivative of the star
            let mean = e.mean_curv.times_matrix(&Mat3::identity());
            let rhs7 = &e.star_jets * &(&st.scale(2.0) - &mean);
            prop_assert!(close(&e.star_jets.d_dx(), &rhs7));
            // transposed Riccati equation
            prop_assert!(close(&st.d_dx(), &(&(&st * &st) + &rt)));
            // derivative of the mean curvature
            let lhs9 = e.mean_curv.d_dx();
            let rhs9 = &tr_s2 + &ric_n;
            prop_assert!((&lhs9 - &rhs9).max_norm_through(n) <= 1e-12);
            // second derivative of the star
            let inner = &(&(&(&(&st * &st).scale(6.0) - &(&st * &mean).scale(4.0)) + &(&mean * &mean)) + &rt.scale(2.0))
                - &(&tr_s2 + &ric_n).times_matrix(&Mat3::identity());
            prop_assert!(close(&e.star_jets.d_dx().d_dx(), &(&e.star_jets * &inner)));
            // ⋆² = 1 with the Λ² → Λ¹ star and its consequence at order 2
            let h = m.series(6).unwrap();
            let star2 = h.scalar_mul(&h.det3().sqrt().unwrap().invert().unwrap());
            let one = &star2 * &e.star_jets;
            prop_assert!((&one - &MatSeries::one(6)).max_norm_through(5) <= 1e-12);
            // second derivative of H
            let h2 = h.d_dx().d_dx();
            let rhs5 = (&h * &(&(&e.shape * &e.shape) - &e.normal_curv)).scale(2.0);
            prop_assert!(close(&h2, &rhs5));
        }

        #[test]
        fn torsion_free_and_trace(f in frame(), a in sym3()) {
            let h = Mat3::identity() + a * 0.8 + (a * a) * 0.3;
            let geo = intrinsic_geometry(&f, &h).unwrap();
            let on = f.orthonormalize(&h).unwrap();
            prop_assert!(max_abs(&covariant_ext_d(&geo.spin_conn, &Mat3::identity(), &on)) <= 1e-13 * 10.0);
            let tr = (h.try_inverse().unwrap() * geo.ricci).trace();
            prop_assert!((tr - geo.scalar).abs() <= 1e-13 * (1.0 + geo.scalar.abs()));
            // closed form ω = Dᵀ − ½ tr D
            let d = on.d_coframe();
            let closed = d.transpose() - Mat3::identity() * (0.5 * d.trace());
            prop_assert!(max_abs(&(closed - geo.spin_conn)) <= 1e-12);
        }

        #[test]
        fn weyl_parts_trace_free(f in frame(), m in jet(3)) {
            let (we, wb) = weyl_eb(&f, &m).unwrap();
            prop_assert!(we.trace().abs() <= 1e-13);
            prop_assert!(wb.trace().abs() <= 1e-13);
            prop_assert!(max_abs(&(wb - wb.transpose())) <= 1e-13);
        }
    }
}
