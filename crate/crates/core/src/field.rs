//! Band-limited fields stored as eigenbasis coefficients.

use std::sync::Arc;

use crate::domain::DomainSpec;
use crate::error::{NshError, Result};
use crate::params::Params;
use crate::spectral::Basis;

/// A real field on a box or torus, `u = Σ c_j v_j` with `v_j` L2-orthonormal
/// Laplacian eigenfunctions. Cheap to clone: the basis is shared.
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: Arc<Basis>,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(basis: Arc<Basis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(NshError::LengthMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(NshError::NonFinite(i));
        }
        Ok(Self { basis, coeffs })
    }

    /// Unchecked constructor for internal use on coefficient vectors known to be valid.
    pub(crate) fn from_parts(basis: Arc<Basis>, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), basis.len());
        Self { basis, coeffs }
    }

    pub fn zeros(basis: Arc<Basis>) -> Self {
        let n = basis.len();
        Self::from_parts(basis, vec![0.0; n])
    }

    /// The constant field `u ≡ value`.
    pub fn constant(basis: Arc<Basis>, value: f64) -> Self {
        let mut c = vec![0.0; basis.len()];
        c[0] = value * basis.domain().volume().sqrt();
        Self::from_parts(basis, c)
    }

    /// Forward transform of collocation-grid values (row-major).
    pub fn from_grid(basis: Arc<Basis>, values: &[f64]) -> Result<Self> {
        if values.len() != basis.grid_len() {
            return Err(NshError::LengthMismatch {
                expected: basis.grid_len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(NshError::NonFinite(i));
        }
        let coeffs = basis.analyze(values);
        Ok(Self::from_parts(basis, coeffs))
    }

    /// Sample a function of the physical coordinates on the grid and project.
    pub fn from_fn(basis: Arc<Basis>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values: Vec<f64> = basis.grid_points().iter().map(|x| f(x)).collect();
        Self::from_grid(basis, &values)
    }

    /// Inverse transform: values on the collocation grid.
    pub fn to_grid(&self) -> Vec<f64> {
        self.basis.synthesize(&self.coeffs)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn domain(&self) -> &DomainSpec {
        self.basis.domain()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.basis.same_as(&other.basis) {
            Ok(())
        } else {
            Err(NshError::BasisMismatch)
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::from_parts(
            self.basis.clone(),
            self.coeffs.iter().map(|c| c * t).collect(),
        )
    }

    /// `self + t * other`
    pub fn add_scaled(&self, t: f64, other: &SpectralField) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.basis.clone(),
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + t * b)
                .collect(),
        ))
    }

    /// L2 inner product `∫ u h dx`.
    pub fn dot(&self, other: &SpectralField) -> Result<f64> {
        self.check_same(other)?;
        Ok(dot(&self.coeffs, &other.coeffs))
    }

    /// `∫ u² dx = Σ c_j²`.
    pub fn l2_norm_sq(&self) -> f64 {
        dot(&self.coeffs, &self.coeffs)
    }

    /// `‖u‖²_{W²₂} = Σ (μ² + μ + 1) c²`.
    pub fn w22_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.basis.eigen_table().mu)
            .map(|(c, m)| (m * m + m + 1.0) * c * c)
            .sum()
    }

    /// `Q[u] = ∫ (Δu + u)² − α u² dx = Σ ((μ_j − 1)² − α) c_j²`.
    pub fn quadratic_form(&self, p: &Params) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.basis.eigen_table().mu)
            .map(|(c, &m)| p.symbol(m) * c * c)
            .sum()
    }

    /// `∫ u^m dx` for `m ∈ {2, 3, 4}` on the collocation grid (exact for
    /// band-limited fields).
    pub fn integral_power(&self, m: u32) -> Result<f64> {
        if !(2..=4).contains(&m) {
            return Err(NshError::UnsupportedPower(m));
        }
        let w = self.basis.quadrature_weight();
        let grid = self.to_grid();
        Ok(w * grid.iter().map(|u| u.powi(m as i32)).sum::<f64>())
    }

    /// Domain average `|Ω|⁻¹ ∫ u dx`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / self.basis.domain().volume().sqrt()
    }

    /// Point evaluation by direct summation over modes.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }

    /// Value and spatial gradient at `x` by direct summation over modes.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = self.basis.dim();
        let mut v = 0.0;
        let mut g = vec![0.0; n];
        for (slot, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (bv, bg) = self.basis.basis_value_gradient(slot, x);
            v += c * bv;
            for a in 0..n {
                g[a] += c * bg[a];
            }
        }
        (v, g)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use std::f64::consts::PI;

    fn square(n: usize) -> Arc<Basis> {
        Basis::new(DomainSpec::neumann_box(&[PI, PI], 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn constant_field_has_only_constant_mode() {
        let b = square(6);
        let u = SpectralField::from_fn(b, |_| 1.0).unwrap();
        assert!((u.coeffs()[0] - PI).abs() < 1e-13);
        assert!(u.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn cosine_is_a_single_mode() {
        let b = square(6);
        let u = SpectralField::from_fn(b.clone(), |x| x[0].cos()).unwrap();
        let slot = b
            .modes()
            .iter()
            .position(|m| m.index == vec![1, 0])
            .unwrap();
        for (i, c) in u.coeffs().iter().enumerate() {
            if i == slot {
                // cos x = sqrt(π/2) * sqrt(2/π) cos x, times the 1/sqrt(π) constant factor on axis 2
                assert!((c - (PI / 2.0).sqrt() * PI.sqrt()).abs() < 1e-13);
            } else {
                assert!(c.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn power_integrals_of_simple_fields() {
        let b = square(4);
        let one = SpectralField::constant(b.clone(), 1.0);
        assert!((one.integral_power(3).unwrap() - PI * PI).abs() < 1e-12);
        let c = SpectralField::from_fn(b, |x| x[0].cos()).unwrap();
        assert!((c.integral_power(2).unwrap() - PI * PI / 2.0).abs() < 1e-12);
        assert!(c.integral_power(3).unwrap().abs() < 1e-12);
        assert!((c.integral_power(4).unwrap() - 3.0 * PI * PI / 8.0).abs() < 1e-12);
        assert_eq!(c.integral_power(5), Err(NshError::UnsupportedPower(5)));
    }

    #[test]
    fn quadratic_form_examples() {
        let b = square(4);
        let p = Params::new(-1.0, 1.0).unwrap();
        let c = SpectralField::from_fn(b.clone(), |x| x[0].cos()).unwrap();
        assert!((c.quadratic_form(&p) - PI * PI / 2.0).abs() < 1e-12);
        let one = SpectralField::constant(b, 1.0);
        assert!((one.quadratic_form(&p) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_lengths_and_nan() {
        let b = square(2);
        assert!(SpectralField::new(b.clone(), vec![0.0; 3]).is_err());
        let mut c = vec![0.0; b.len()];
        c[2] = f64::NAN;
        assert_eq!(SpectralField::new(b.clone(), c), Err(NshError::NonFinite(2)));
        assert!(SpectralField::from_grid(b, &[1.0; 7]).is_err());
    }

    #[test]
    fn basis_mismatch_is_detected() {
        let a = SpectralField::zeros(square(2));
        let b = SpectralField::zeros(square(3));
        assert_eq!(a.dot(&b), Err(NshError::BasisMismatch));
    }

    #[test]
    fn point_evaluation_matches_grid() {
        let b = square(5);
        let u = SpectralField::from_fn(b.clone(), |x| (2.0 * x[0]).cos() * x[1].cos() + 0.3).unwrap();
        let grid = u.to_grid();
        let pts = b.grid_points();
        for idx in [0, 17, 60, grid.len() - 1] {
            assert!((u.evaluate(&pts[idx]) - grid[idx]).abs() < 1e-12);
        }
    }
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.basis.same_as(&other.basis) && self.coeffs == other.coeffs
    }
}
