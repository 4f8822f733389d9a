//! Computational domains: Neumann boxes and flat tori spanned by lattice generators.
//!
//! Both kinds carry a stretch factor `R` that is applied multiplicatively to the
//! base geometry, so `volume(R) = R^n * volume(1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{NshError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    /// Rectangular box with sliding-wall (half-Neumann) boundary conditions.
    NeumannBox,
    /// Flat torus `R^n / A Z^n`, `A` the generator matrix.
    SkewTorus,
}

impl DomainKind {
    pub fn tag(self) -> &'static str {
        match self {
            DomainKind::NeumannBox => "box",
            DomainKind::SkewTorus => "torus",
        }
    }
}

/// Validated domain description.
///
/// For a box `base` holds the `n` side lengths; for a torus it holds the
/// `n x n` generator matrix in column-major order (column `k` is `h_k`).
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    kind: DomainKind,
    dim: usize,
    base: Vec<f64>,
    stretch: f64,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(NshError::UnsupportedDimension(n))
    }
}

fn check_stretch(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(NshError::InvalidStretch(r))
    }
}

impl DomainSpec {
    pub fn neumann_box(lengths: &[f64], stretch: f64) -> Result<Self> {
        check_dim(lengths.len())?;
        check_stretch(stretch)?;
        if let Some(&bad) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(NshError::NonPositiveLength(bad));
        }
        Ok(Self {
            kind: DomainKind::NeumannBox,
            dim: lengths.len(),
            base: lengths.to_vec(),
            stretch,
        })
    }

    /// Torus from its generator vectors `h_1, ..., h_n`.
    pub fn skew_torus(generators: &[Vec<f64>], stretch: f64) -> Result<Self> {
        let n = generators.len();
        check_dim(n)?;
        check_stretch(stretch)?;
        if generators.iter().any(|h| h.len() != n) {
            return Err(NshError::MalformedGenerators(format!(
                "expected {n} vectors of length {n}"
            )));
        }
        let base: Vec<f64> = generators.iter().flatten().copied().collect();
        if base.iter().any(|x| !x.is_finite()) {
            return Err(NshError::MalformedGenerators("non-finite entry".into()));
        }
        let a = DMatrix::from_column_slice(n, n, &base);
        let det = a.determinant();
        let scale: f64 = generators
            .iter()
            .map(|h| h.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if !(det.abs() > 1e-12 * scale) {
            return Err(NshError::SingularGenerators(det.abs()));
        }
        Ok(Self {
            kind: DomainKind::SkewTorus,
            dim: n,
            base,
            stretch,
        })
    }

    /// Generic constructor: box side lengths, or torus generators flattened column-major.
    pub fn make(kind: DomainKind, dims: &[f64], stretch: f64) -> Result<Self> {
        match kind {
            DomainKind::NeumannBox => Self::neumann_box(dims, stretch),
            DomainKind::SkewTorus => {
                let n = (dims.len() as f64).sqrt().round() as usize;
                if n * n != dims.len() {
                    return Err(NshError::MalformedGenerators(format!(
                        "{} entries is not a square matrix",
                        dims.len()
                    )));
                }
                let cols: Vec<Vec<f64>> = dims.chunks(n).map(|c| c.to_vec()).collect();
                Self::skew_torus(&cols, stretch)
            }
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    /// Unstretched geometry as stored (lengths or column-major generators).
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn with_stretch(&self, stretch: f64) -> Result<Self> {
        check_stretch(stretch)?;
        Ok(Self {
            stretch,
            ..self.clone()
        })
    }

    /// Effective box side lengths `R * L_i`; `None` for a torus.
    pub fn lengths(&self) -> Option<Vec<f64>> {
        match self.kind {
            DomainKind::NeumannBox => Some(self.base.iter().map(|l| l * self.stretch).collect()),
            DomainKind::SkewTorus => None,
        }
    }

    /// Effective generator matrix (columns are the stretched lattice vectors).
    /// For a box this is the diagonal matrix of side lengths.
    pub fn generator_matrix(&self) -> DMatrix<f64> {
        match self.kind {
            DomainKind::NeumannBox => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.lengths().unwrap()))
            }
            DomainKind::SkewTorus => {
                DMatrix::from_column_slice(self.dim, self.dim, &self.base) * self.stretch
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::NeumannBox => self.lengths().unwrap().iter().product(),
            DomainKind::SkewTorus => self.generator_matrix().determinant().abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn box_area_and_stretch() {
        let d = DomainSpec::make(DomainKind::NeumannBox, &[PI, PI], 1.0).unwrap();
        assert!((d.volume() - PI * PI).abs() < 1e-14);
        let d3 = d.with_stretch(3.0).unwrap();
        assert!((d3.volume() - 9.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_torus_area() {
        let d = DomainSpec::skew_torus(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]], 1.0)
            .unwrap();
        assert!((d.volume() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            DomainSpec::neumann_box(&[1.0, -2.0], 1.0),
            Err(NshError::NonPositiveLength(-2.0))
        );
        assert!(matches!(
            DomainSpec::neumann_box(&[1.0; 4], 1.0),
            Err(NshError::UnsupportedDimension(4))
        ));
        assert!(matches!(
            DomainSpec::skew_torus(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1.0),
            Err(NshError::SingularGenerators(_))
        ));
        assert!(DomainSpec::neumann_box(&[1.0], 0.0).is_err());
    }

    #[test]
    fn volume_scales_like_r_to_the_n() {
        for n in 1..=3 {
            let d = DomainSpec::neumann_box(&vec![1.3; n], 1.0).unwrap();
            let r = 2.5;
            let dr = d.with_stretch(r).unwrap();
            assert!((dr.volume() / d.volume() - r.powi(n as i32)).abs() < 1e-12);
        }
    }
}
