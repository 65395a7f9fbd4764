//! The 2×2 anti-hermitian representation of 𝔰𝔲(2) with basis Eᵢ = σᵢ/2.
//!
//! With σ₁ = diag(i, −i), σ₂ = [[0, 1], [−1, 0]], σ₃ = [[0, i], [i, 0]] the
//! basis satisfies [Eᵢ, Eⱼ] = εᵢⱼₖ Eₖ, tr(EᵢEⱼ) = −½δᵢⱼ and
//! tr(EᵢEⱼEₖ) = −¼εᵢⱼₖ.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

use crate::frame_algebra::Mat3;

pub type Su2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn basis() -> [Su2; 3] {
    let z = c(0.0, 0.0);
    let half = 0.5;
    [
        Su2::new(c(0.0, half), z, z, c(0.0, -half)),
        Su2::new(z, c(half, 0.0), c(-half, 0.0), z),
        Su2::new(z, c(0.0, half), c(0.0, half), z),
    ]
}

/// Σ vᵢ Eᵢ.
pub fn from_vector(v: &Vector3<f64>) -> Su2 {
    let e = basis();
    e[0] * c(v[0], 0.0) + e[1] * c(v[1], 0.0) + e[2] * c(v[2], 0.0)
}

/// The 2×2 matrices of the frame components of a valued form, one per column.
pub fn columns(m: &Mat3) -> [Su2; 3] {
    [0, 1, 2].map(|j| from_vector(&m.column(j).into_owned()))
}

/// Coefficient of dVol in tr(a ∧ F) for a valued 1-form `a` and a valued
/// 2-form `f` in the Θ basis.
pub fn trace_wedge_1_2(a: &Mat3, f: &Mat3) -> f64 {
    let (a, f) = (columns(a), columns(f));
    (0..3).map(|j| (a[j] * f[j]).trace().re).sum()
}

/// Coefficient of dVol in tr(a ∧ b ∧ c) for valued 1-forms.
pub fn trace_wedge_1_1_1(a: &Mat3, b: &Mat3, c3: &Mat3) -> f64 {
    let (a, b, c3) = (columns(a), columns(b), columns(c3));
    let mut s = 0.0;
    for (j, k, l, sgn) in [
        (0, 1, 2, 1.0),
        (1, 2, 0, 1.0),
        (2, 0, 1, 1.0),
        (0, 2, 1, -1.0),
        (2, 1, 0, -1.0),
        (1, 0, 2, -1.0),
    ] {
        s += sgn * (a[j] * b[k] * c3[l]).trace().re;
    }
    s
}
