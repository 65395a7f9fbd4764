//! Least-squares Laurent fitting.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{NahmError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentFit {
    pub coeffs: BTreeMap<i32, f64>,
    /// Root-mean-square of the fit residual.
    pub residual: f64,
}

impl LaurentFit {
    pub fn coeff(&self, p: i32) -> f64 {
        self.coeffs.get(&p).copied().unwrap_or(0.0)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.coeffs.iter().map(|(&p, c)| c * t.powi(p)).sum()
    }
}

/// Fit Σ c_p t^p to the samples by least squares.
pub fn laurent_fit(samples: &[(f64, f64)], powers: &[i32]) -> Result<LaurentFit> {
    if powers.is_empty() || samples.len() < 2 * powers.len() {
        return Err(NahmError::InvalidInput(format!(
            "laurent fit needs at least {} samples for {} powers, got {}",
            2 * powers.len(),
            powers.len(),
            samples.len()
        )));
    }
    if samples.iter().any(|(t, v)| !(*t > 0.0 && t.is_finite() && v.is_finite())) {
        return Err(NahmError::InvalidInput("samples need finite values at positive t".into()));
    }
    let (m, n) = (samples.len(), powers.len());
    let mut a = DMatrix::from_fn(m, n, |i, j| samples[i].0.powi(powers[j]));
    let b = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let scales: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-13 * smax) {
        return Err(NahmError::RankDeficient);
    }
    let x = svd.solve(&b, 0.0).map_err(|_| NahmError::RankDeficient)?;
    let r = &a * &x - &b;
    let coeffs = powers.iter().zip(x.iter()).zip(&scales).map(|((&p, c), s)| (p, c / s)).collect();
    Ok(LaurentFit {
        coeffs,
        residual: r.norm() / (m as f64).sqrt(),
    })
}
