//! Linear algebra of the soldering identification on a homogeneous 3-manifold.
//!
//! Every 𝔰𝔲(2)-valued object is stored as a real 3×3 matrix through the
//! covering isomorphism σᵢ/2 ↦ 𝔞ᵢ, so the Lie bracket is the cross product.
//! Three readings of a [`Mat3`] are used throughout the crate:
//!
//! * **endomorphism** of the boundary tangent bundle, `M[i][j]` mapping the
//!   `j`-th frame vector onto the `i`-th;
//! * **valued 1-form**, `M[i][j]` the coefficient of θʲ ⊗ σᵢ/2;
//! * **valued 2-form**, `M[i][m]` the coefficient of Θₘ ⊗ σᵢ/2 where
//!   (Θ₁, Θ₂, Θ₃) = (θ²∧θ³, θ³∧θ¹, θ¹∧θ²).
//!
//! The soldering form θ is the identity in the 1-form reading, and the first
//! two readings agree under θ⁻¹∘γ. Fields are constant on the boundary in the
//! global coframe, so exterior derivatives reduce to contractions with the
//! structure constants.

use nalgebra::{Matrix3, Vector3};

use crate::error::{NahmError, Result};

pub type Mat3 = Matrix3<f64>;

/// Totally antisymmetric symbol on {0, 1, 2}.
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Orthogonal split of an endomorphism into skew, symmetric trace-free and
/// trace parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomp {
    pub sk: Mat3,
    pub symtf: Mat3,
    pub trace: f64,
}

impl Decomp {
    pub fn recompose(&self) -> Mat3 {
        self.sk + self.symtf + Mat3::identity() * (self.trace / 3.0)
    }
}

pub fn decompose(m: &Mat3) -> Decomp {
    Decomp {
        sk: sk(m),
        symtf: symtf(m),
        trace: m.trace(),
    }
}

pub fn sk(m: &Mat3) -> Mat3 {
    (m - m.transpose()) * 0.5
}

pub fn sym(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

/// Trace-free part, without symmetrizing.
pub fn tf(m: &Mat3) -> Mat3 {
    m - Mat3::identity() * (m.trace() / 3.0)
}

pub fn symtf(m: &Mat3) -> Mat3 {
    tf(&sym(m))
}

pub fn trace_part(m: &Mat3) -> Mat3 {
    Mat3::identity() * (m.trace() / 3.0)
}

pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Antisymmetric matrix of `v` in the 𝔞ᵢ basis, i.e. `cross_matrix(v) * w = v × w`.
pub fn cross_matrix(v: &Vector3<f64>) -> Mat3 {
    Mat3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Inverse of [`cross_matrix`] on the antisymmetric part.
pub fn axial_vector(m: &Mat3) -> Vector3<f64> {
    let a = sk(m);
    Vector3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)])
}

/// Transpose of the cofactor matrix.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let mut c = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            c[(j, i)] = m[(i1, j1)] * m[(i2, j2)] - m[(i1, j2)] * m[(i2, j1)];
        }
    }
    c
}

fn check_spd(h: &Mat3) -> Result<()> {
    if max_abs(&(h - h.transpose())) > 1e-12 * (1.0 + max_abs(h)) {
        return Err(NahmError::NotPositiveDefinite);
    }
    if h.cholesky().is_none() {
        return Err(NahmError::NotPositiveDefinite);
    }
    Ok(())
}

/// Matrix of ⋆: Λ¹ → Λ² for the metric whose vector-frame Gram matrix is `h`.
pub fn hodge1(h: &Mat3) -> Result<Mat3> {
    check_spd(h)?;
    let inv = h.try_inverse().ok_or(NahmError::NotPositiveDefinite)?;
    Ok(inv * h.determinant().sqrt())
}

/// Matrix of ⋆: Λ² → Λ¹, the inverse of [`hodge1`].
pub fn hodge2(h: &Mat3) -> Result<Mat3> {
    check_spd(h)?;
    Ok(h / h.determinant().sqrt())
}

/// Apply a form-index operator (such as a Hodge star) to a valued form.
#[inline]
pub fn on_form_index(star: &Mat3, m: &Mat3) -> Mat3 {
    m * star.transpose()
}

/// The valued 2-form [g∧d] in the Θ basis.
pub fn wedge_bracket(g: &Mat3, d: &Mat3) -> Mat3 {
    let mut out = Mat3::zeros();
    for m in 0..3 {
        let (j, k) = ((m + 1) % 3, (m + 2) % 3);
        let gj: Vector3<f64> = g.column(j).into();
        let gk: Vector3<f64> = g.column(k).into();
        let dj: Vector3<f64> = d.column(j).into();
        let dk: Vector3<f64> = d.column(k).into();
        let col = gj.cross(&dk) - gk.cross(&dj);
        out.set_column(m, &col);
    }
    out
}

/// `star` (a Λ² → Λ¹ matrix) applied to ½([g∧d] + [d∧g]).
pub fn wedge_bracket_star(g: &Mat3, d: &Mat3, star: &Mat3) -> Mat3 {
    let two_form = (wedge_bracket(g, d) + wedge_bracket(d, g)) * 0.5;
    on_form_index(star, &two_form)
}

/// Structure constants and volume of a global coframe θ¹, θ², θ³ with
/// dθᵏ = −½ cᵏᵢⱼ θⁱ∧θʲ.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameModel {
    /// `c[k][i][j]` = cᵏᵢⱼ.
    c: [[[f64; 3]; 3]; 3],
    vol: f64,
}

impl FrameModel {
    pub fn new(c: [[[f64; 3]; 3]; 3], vol: f64) -> Result<Self> {
        if !(vol > 0.0 && vol.is_finite()) {
            return Err(NahmError::InvalidFrame(format!("volume must be positive, got {vol}")));
        }
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    if c[k][i][j] != -c[k][j][i] {
                        return Err(NahmError::InvalidFrame(format!(
                            "c[{k}][{i}][{j}] is not antisymmetric in its lower indices"
                        )));
                    }
                }
            }
        }
        let frame = Self { c, vol };
        let jac = frame.jacobi_defect();
        if jac > 1e-14 * (1.0 + frame.max_structure_constant().powi(2)) {
            return Err(NahmError::InvalidFrame(format!("Jacobi identity fails by {jac:e}")));
        }
        Ok(frame)
    }

    /// Build from the brackets [e₁,e₂], [e₂,e₃], [e₃,e₁] given as vectors.
    pub fn from_brackets(e12: [f64; 3], e23: [f64; 3], e31: [f64; 3], vol: f64) -> Result<Self> {
        let mut c = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            c[k][0][1] = e12[k];
            c[k][1][0] = -e12[k];
            c[k][1][2] = e23[k];
            c[k][2][1] = -e23[k];
            c[k][2][0] = e31[k];
            c[k][0][2] = -e31[k];
        }
        Self::new(c, vol)
    }

    pub fn flat_torus(vol: f64) -> Result<Self> {
        Self::new([[[0.0; 3]; 3]; 3], vol)
    }

    /// Unit round 3-sphere in the left-invariant frame, cᵏᵢⱼ = 2εᵢⱼₖ.
    pub fn round_s3() -> Self {
        let mut c = [[[0.0; 3]; 3]; 3];
        for (k, ck) in c.iter_mut().enumerate() {
            for (i, row) in ck.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = 2.0 * levi_civita(i, j, k);
                }
            }
        }
        Self::new(c, 2.0 * std::f64::consts::PI.powi(2)).expect("round S3 frame is valid")
    }

    #[inline]
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[k][i][j]
    }

    pub fn structure_constants(&self) -> &[[[f64; 3]; 3]; 3] {
        &self.c
    }

    pub fn vol(&self) -> f64 {
        self.vol
    }

    fn max_structure_constant(&self) -> f64 {
        self.c.iter().flatten().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Largest entry of Σ_cyc [[eᵢ,eⱼ],eₖ].
    pub fn jacobi_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for n in 0..3 {
                        let mut s = 0.0;
                        for m in 0..3 {
                            s += self.c[m][i][j] * self.c[n][m][k]
                                + self.c[m][j][k] * self.c[n][m][i]
                                + self.c[m][k][i] * self.c[n][m][j];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// The same manifold described in the coframe θ' = Aθ.
    pub fn change_coframe(&self, a: &Mat3) -> Result<Self> {
        let det = a.determinant();
        if det <= 0.0 {
            return Err(NahmError::InvalidFrame("coframe change must preserve orientation".into()));
        }
        let ai = a.try_inverse().ok_or_else(|| NahmError::InvalidFrame("singular coframe change".into()))?;
        let mut c = [[[0.0; 3]; 3]; 3];
        for (ka, cka) in c.iter_mut().enumerate() {
            for r in 0..3 {
                for s in 0..3 {
                    let mut v = 0.0;
                    for b in 0..3 {
                        for p in 0..3 {
                            for q in 0..3 {
                                v += a[(ka, b)] * self.c[b][p][q] * ai[(p, r)] * ai[(q, s)];
                            }
                        }
                    }
                    cka[r][s] = v;
                }
            }
        }
        // restore exact antisymmetry lost to rounding
        for ck in c.iter_mut() {
            for r in 0..3 {
                ck[r][r] = 0.0;
                for s in (r + 1)..3 {
                    let v = 0.5 * (ck[r][s] - ck[s][r]);
                    ck[r][s] = v;
                    ck[s][r] = -v;
                }
            }
        }
        Self::new(c, self.vol * det)
    }

    /// An orthonormal coframe for the metric with vector-frame Gram matrix `h`,
    /// obtained by Cholesky factorization.
    pub fn orthonormalize(&self, h: &Mat3) -> Result<Self> {
        check_spd(h)?;
        let l = h.cholesky().ok_or(NahmError::NotPositiveDefinite)?.l();
        self.change_coframe(&l.transpose())
    }

    /// `D` with dθᵏ = Σₘ D[k][m] Θₘ.
    pub fn d_coframe(&self) -> Mat3 {
        let mut d = Mat3::zeros();
        for k in 0..3 {
            for m in 0..3 {
                let (p, q) = ((m + 1) % 3, (m + 2) % 3);
                // −½ (c^k_pq − c^k_qp) = −c^k_pq
                d[(k, m)] = -self.c[k][p][q];
            }
        }
        d
    }
}

/// Exterior derivative of a constant-coefficient valued 1-form.
pub fn exterior_d(g: &Mat3, frame: &FrameModel) -> Mat3 {
    g * frame.d_coframe()
}

/// dg + [w∧g] in the 2-form basis.
pub fn covariant_ext_d(w: &Mat3, g: &Mat3, frame: &FrameModel) -> Mat3 {
    exterior_d(g, frame) + wedge_bracket(w, g)
}

/// Curvature dw + ½[w∧w] of the connection with coefficient `w`.
pub fn curvature(w: &Mat3, frame: &FrameModel) -> Mat3 {
    exterior_d(w, frame) + wedge_bracket(w, w) * 0.5
}
