//! Radial plateau test functions.

use std::sync::Arc;

use crate::error::{NshError, Result};
use crate::field::SpectralField;
use crate::spectral::Basis;

/// Quintic smoothstep, `0` at `x <= 0` and `1` at `x >= 1`.
pub fn smoothstep5(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (6.0 * x - 15.0))
}

/// Largest radius of a ball centered in the fundamental cell that fits inside it.
pub fn inradius(basis: &Basis) -> f64 {
    let a = basis.domain().generator_matrix();
    let inv = a.try_inverse().expect("generators validated at construction");
    (0..inv.nrows())
        .map(|i| 0.5 / inv.row(i).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Plateau `1` on `|x − x₀| <= r − 1`, `0` outside `r − ½`, with a quintic
/// transition; `x₀` is the center of the cell.
pub fn build_plateau_bump(basis: &Arc<Basis>, r: f64) -> Result<SpectralField> {
    build_plateau_bump_with(basis, r, 1.0, 0.5)
}

/// Plateau `1` on `|x − x₀| <= r − inner`, `0` outside `r − outer`
/// (`inner > outer >= 0`).
pub fn build_plateau_bump_with(basis: &Arc<Basis>, r: f64, inner: f64, outer: f64) -> Result<SpectralField> {
    if !(inner > outer && outer >= 0.0 && r > inner && r.is_finite()) {
        return Err(NshError::InvalidParams(format!(
            "bump needs r > inner > outer >= 0, got r={r}, inner={inner}, outer={outer}"
        )));
    }
    if r - outer > inradius(basis) {
        return Err(NshError::BumpTooLarge { radius: r });
    }
    let a = basis.domain().generator_matrix();
    let n = basis.dim();
    let center: Vec<f64> = (0..n).map(|i| 0.5 * a.row(i).sum()).collect();
    let (plateau, edge) = (r - inner, r - outer);
    SpectralField::from_fn(basis.clone(), |x| {
        let rho = x.iter().zip(&center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt();
        1.0 - smoothstep5((rho - plateau) / (edge - plateau))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use std::f64::consts::PI;

    #[test]
    fn smoothstep_endpoints() {
        assert_eq!(smoothstep5(-1.0), 0.0);
        assert_eq!(smoothstep5(0.0), 0.0);
        assert_eq!(smoothstep5(1.0), 1.0);
        assert_eq!(smoothstep5(0.5), 0.5);
    }

    #[test]
    fn inradius_of_box_and_hex_cell() {
        let b = Basis::new(DomainSpec::neumann_box(&[4.0, 6.0], 1.0).unwrap(), 2).unwrap();
        assert!((inradius(&b) - 2.0).abs() < 1e-14);
        let h = DomainSpec::skew_torus(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]], 1.0).unwrap();
        let hb = Basis::new(h, 2).unwrap();
        assert!((inradius(&hb) - 3f64.sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn too_large_radius_is_rejected() {
        let b = Basis::new(DomainSpec::neumann_box(&[2.0 * PI, 2.0 * PI], 1.0).unwrap(), 8).unwrap();
        assert!(matches!(build_plateau_bump(&b, 4.0), Err(NshError::BumpTooLarge { .. })));
        assert!(build_plateau_bump(&b, 3.0).is_ok());
    }
}
