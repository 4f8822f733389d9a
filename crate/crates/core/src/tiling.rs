//! Entire solutions from box solutions by even reflection, and strong-form
//! residuals of periodic fields.
//!
//! The Neumann mode `cos(πk x/L)` on `[0, L]` is already the even extension
//! of itself, so reflection is index bookkeeping: on `[0, cL]` it is mode
//! `ck`, and on the period cell `[0, 2L)` it is `cos(2πk y)` with `y = x/2L`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{NshError, Result};
use crate::field::SpectralField;
use crate::functionals::Moments;
use crate::params::Params;
use crate::spectral::{strides, Basis};

/// A box solution together with its reflected copies.
#[derive(Clone, Debug)]
pub struct ReflectionTiling {
    pub counts: Vec<usize>,
    /// Field on the box `[0, c₁L₁] × … × [0, cₙLₙ]`.
    pub assembled: SpectralField,
}

impl ReflectionTiling {
    pub fn copies(&self) -> usize {
        self.counts.iter().product()
    }
}

pub fn reflect_extend(u: &SpectralField, counts: &[usize]) -> Result<ReflectionTiling> {
    let basis = u.basis();
    let lengths = u.domain().lengths().ok_or(NshError::NotABox)?;
    if counts.len() != lengths.len() {
        return Err(NshError::LengthMismatch {
            expected: lengths.len(),
            got: counts.len(),
        });
    }
    if counts.contains(&0) {
        return Err(NshError::InvalidCounts);
    }
    let big: Vec<f64> = lengths.iter().zip(counts).map(|(l, &c)| l * c as f64).collect();
    let bw: Vec<usize> = basis.bandwidth().iter().zip(counts).map(|(b, c)| b * c).collect();
    let grid: Vec<usize> = basis.grid_shape().iter().zip(counts).map(|(m, c)| m * c).collect();
    let target = Basis::with_bandwidths(DomainSpec::neumann_box(&big, 1.0)?, &bw, Some(&grid))?;
    let shape: Vec<usize> = bw.iter().map(|b| b + 1).collect();
    let st = strides(&shape);
    let factor = (counts.iter().product::<usize>() as f64).sqrt();
    let mut c = vec![0.0; target.len()];
    for (mode, &a) in basis.modes().iter().zip(u.coeffs()) {
        let flat: usize = mode
            .index
            .iter()
            .zip(counts)
            .zip(&st)
            .map(|((&k, &cnt), &s)| k as usize * cnt * s)
            .sum();
        c[flat] = a * factor;
    }
    Ok(ReflectionTiling {
        counts: counts.to_vec(),
        assembled: SpectralField::new(target, c)?,
    })
}

/// The even extension of a box field as a field on its period cell, the
/// torus with generators `2L_i e_i`.
pub fn periodic_cell(u: &SpectralField) -> Result<SpectralField> {
    let basis = u.basis();
    let lengths = u.domain().lengths().ok_or(NshError::NotABox)?;
    let n = lengths.len();
    let gens: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2.0 * lengths[i] } else { 0.0 }).collect())
        .collect();
    let torus = Basis::with_bandwidths(DomainSpec::skew_torus(&gens, 1.0)?, basis.bandwidth(), None)?;
    let mut full = vec![Complex64::new(0.0, 0.0); torus.complex_len()];
    let norms = &basis.eigen_table().norm;
    for ((mode, &a), &nm) in basis.modes().iter().zip(u.coeffs()).zip(norms) {
        if a == 0.0 {
            continue;
        }
        let nonzero: Vec<usize> = (0..n).filter(|&i| mode.index[i] != 0).collect();
        let amp = a * nm * 0.5f64.powi(nonzero.len() as i32);
        for signs in 0..(1usize << nonzero.len()) {
            let mut k = mode.index.clone();
            for (b, &ax) in nonzero.iter().enumerate() {
                if signs >> b & 1 == 1 {
                    k[ax] = -k[ax];
                }
            }
            let idx = torus.complex_index(&k).expect("bandwidth matches");
            full[idx] += amp;
        }
    }
    let coeffs = torus.from_complex(&full);
    SpectralField::new(torus, coeffs)
}

/// Translate a torus field by `shift` in lattice coordinates.
pub fn torus_shift(u: &SpectralField, shift: &[f64]) -> Result<SpectralField> {
    if u.domain().kind() != DomainKind::SkewTorus {
        return Err(NshError::NotATorus);
    }
    let basis = u.basis();
    let mut out = u.coeffs().to_vec();
    for (slot, mode) in basis.modes().iter().enumerate() {
        if mode.kind != crate::spectral::ModeKind::Cos {
            continue;
        }
        // u(y - s): cos(θ - φ) = cos θ cos φ + sin θ sin φ
        let phi: f64 = 2.0 * std::f64::consts::PI * mode.index.iter().zip(shift).map(|(&k, s)| k as f64 * s).sum::<f64>();
        let (a, b) = (u.coeffs()[slot], u.coeffs()[slot + 1]);
        out[slot] = a * phi.cos() - b * phi.sin();
        out[slot + 1] = a * phi.sin() + b * phi.cos();
    }
    SpectralField::new(basis.clone(), out)
}

/// `L₂` norms of the residual `r = (Δ+1)²u − αu − βu² + u³`, relative to
/// `‖(Δ+1)²u − αu‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Nonlinearity projected onto the resolved modes (dealiased).
    pub absolute: f64,
    pub relative: f64,
    /// Full strong residual, including the part of `−βu² + u³` above the bandwidth.
    pub strong_absolute: f64,
    pub strong_relative: f64,
}

/// Strong residual on a torus, integrated exactly on a grid fine enough for
/// the degree-six integrand.
pub fn residual_entire(u: &SpectralField, p: &Params) -> Result<ResidualReport> {
    if u.domain().kind() != DomainKind::SkewTorus {
        return Err(NshError::NotATorus);
    }
    strong_residual(u, p)
}

/// Strong residual of a box field (Neumann conditions hold mode by mode).
pub fn residual_box(u: &SpectralField, p: &Params) -> Result<ResidualReport> {
    if u.domain().kind() != DomainKind::NeumannBox {
        return Err(NshError::NotABox);
    }
    strong_residual(u, p)
}

fn strong_residual(u: &SpectralField, p: &Params) -> Result<ResidualReport> {
    let basis = u.basis();
    let fine: Vec<usize> = basis
        .bandwidth()
        .iter()
        .zip(basis.grid_shape())
        .map(|(&b, &m)| match basis.domain().kind() {
            DomainKind::NeumannBox => m.max(3 * b + 1),
            DomainKind::SkewTorus => m.max(6 * b + 1),
        })
        .collect();
    let fb: Arc<Basis> = Basis::with_bandwidths(basis.domain().clone(), basis.bandwidth(), Some(&fine))?;
    let lin: Vec<f64> = u
        .coeffs()
        .iter()
        .zip(&basis.eigen_table().mu)
        .map(|(c, &m)| p.symbol(m) * c)
        .collect();
    let lin_grid = fb.synthesize(&lin);
    let ugrid = fb.synthesize(u.coeffs());
    let beta = p.beta();
    let w = fb.quadrature_weight();
    let r2: f64 = w * lin_grid
        .iter()
        .zip(&ugrid)
        .map(|(l, &x)| {
            let r = l + x * x * (x - beta);
            r * r
        })
        .sum::<f64>();
    let lin_norm = lin.iter().map(|x| x * x).sum::<f64>().sqrt();
    let strong_absolute = r2.max(0.0).sqrt();
    let absolute = crate::functionals::gradient_de(u, p).l2_norm_sq().sqrt();
    let rel = |a: f64| if lin_norm > 0.0 { a / lin_norm } else { a };
    Ok(ResidualReport {
        absolute,
        relative: rel(absolute),
        strong_absolute,
        strong_relative: rel(strong_absolute),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport {
    pub counts: Vec<usize>,
    pub copies: usize,
    pub base_energy: f64,
    pub assembled_energy: f64,
    /// `|E_assembled − copies·E_base| / |copies·E_base|`
    pub additivity_error: f64,
    /// Energy of the period cell divided by `2ⁿ E_base`, minus one.
    pub cell_additivity_error: f64,
    /// Max deviation of the assembled grid restricted to the base box.
    pub restriction_error: f64,
    /// Max mirror-value mismatch across internal interfaces, relative to `max |u|`.
    pub evenness_error: f64,
    /// Max normal derivative on interfaces and outer walls, relative to the RMS gradient.
    pub normal_derivative_error: f64,
    pub base_residual: ResidualReport,
    pub cell_residual: ResidualReport,
}

fn unravel(flat: usize, shape: &[usize]) -> Vec<usize> {
    let st = strides(shape);
    (0..shape.len()).map(|a| (flat / st[a]) % shape[a]).collect()
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    strides(shape).iter().zip(idx).map(|(s, i)| s * i).sum()
}

/// Reflect, then check restriction, evenness, Neumann conditions, energy
/// additivity and the residual of the period cell.
pub fn tiling_report(u: &SpectralField, p: &Params, counts: &[usize]) -> Result<(ReflectionTiling, SpectralField, TilingReport)> {
    let tiling = reflect_extend(u, counts)?;
    let cell = periodic_cell(u)?;
    let base_shape = u.basis().grid_shape().to_vec();
    let big_shape = tiling.assembled.basis().grid_shape().to_vec();
    let base = u.to_grid();
    let big = tiling.assembled.to_grid();
    let scale = base.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);

    let mut restriction_error = 0.0f64;
    for (flat, &v) in base.iter().enumerate() {
        let j = unravel(flat, &base_shape);
        restriction_error = restriction_error.max((big[ravel(&j, &big_shape)] - v).abs() / scale);
    }

    let mut evenness_error = 0.0f64;
    for (flat, &v) in big.iter().enumerate() {
        let mut j = unravel(flat, &big_shape);
        for a in 0..j.len() {
            let m = base_shape[a];
            let cell = j[a] / m;
            // mirror across the interface at the right end of this copy
            if cell + 1 < counts[a] {
                let orig = j[a];
                j[a] = 2 * (cell + 1) * m - 1 - orig;
                evenness_error = evenness_error.max((big[ravel(&j, &big_shape)] - v).abs() / scale);
                j[a] = orig;
            }
        }
    }

    let lengths = u.domain().lengths().unwrap();
    let grad_rms = (u
        .coeffs()
        .iter()
        .zip(&u.basis().eigen_table().mu)
        .map(|(c, m)| m * c * c)
        .sum::<f64>()
        / u.domain().volume())
    .sqrt()
    .max(f64::MIN_POSITIVE);
    let mut normal_derivative_error = 0.0f64;
    let n = lengths.len();
    let samples = 5usize;
    for a in 0..n {
        for wall in 0..=counts[a] {
            let total = samples.pow(n as u32 - 1);
            for s in 0..total {
                let mut x = vec![0.0; n];
                let mut rem = s;
                for b in 0..n {
                    if b == a {
                        x[b] = wall as f64 * lengths[a];
                    } else {
                        let t = (rem % samples) as f64 + 0.37;
                        rem /= samples;
                        x[b] = t / samples as f64 * lengths[b] * counts[b] as f64;
                    }
                }
                let (_, g) = tiling.assembled.value_and_gradient(&x);
                normal_derivative_error = normal_derivative_error.max(g[a].abs() / grad_rms);
            }
        }
    }

    let base_energy = Moments::of(u, p).energy(p);
    let copies = tiling.copies() as f64;
    let assembled_energy = Moments::of(&tiling.assembled, p).energy(p);
    let cell_energy = Moments::of(&cell, p).energy(p);
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
    let report = TilingReport {
        counts: counts.to_vec(),
        copies: tiling.copies(),
        base_energy,
        assembled_energy,
        additivity_error: rel(assembled_energy, copies * base_energy),
        cell_additivity_error: rel(cell_energy, 2f64.powi(n as i32) * base_energy),
        restriction_error,
        evenness_error,
        normal_derivative_error,
        base_residual: residual_box(u, p)?,
        cell_residual: residual_entire(&cell, p)?,
    };
    Ok((tiling, cell, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p() -> Params {
        Params::new(-1.0, 4.0).unwrap()
    }

    #[test]
    fn constant_extends_to_constant() {
        let b = Basis::new(DomainSpec::neumann_box(&[PI, 2.0], 1.0).unwrap(), 4).unwrap();
        let u = SpectralField::constant(b, 1.0);
        let t = reflect_extend(&u, &[2, 3]).unwrap();
        assert!(t.assembled.to_grid().iter().all(|v| (v - 1.0).abs() < 1e-13));
        let cell = periodic_cell(&u).unwrap();
        assert!(cell.to_grid().iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn cosine_extends_to_itself() {
        let b = Basis::new(DomainSpec::neumann_box(&[PI], 1.0).unwrap(), 6).unwrap();
        let u = SpectralField::from_fn(b, |x| x[0].cos()).unwrap();
        let t = reflect_extend(&u, &[2]).unwrap();
        let pts = t.assembled.basis().grid_points();
        for (x, v) in pts.iter().zip(t.assembled.to_grid()) {
            assert!((v - x[0].cos()).abs() < 1e-13);
        }
        let cell = periodic_cell(&u).unwrap();
        for (x, v) in cell.basis().grid_points().iter().zip(cell.to_grid()) {
            assert!((v - x[0].cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn c_plus_has_zero_residual() {
        let pp = p();
        let cp = 2.0 + 2f64.sqrt();
        let d = DomainSpec::skew_torus(&[vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]], 3.0).unwrap();
        let b = Basis::new(d, 3).unwrap();
        let r = residual_entire(&SpectralField::constant(b.clone(), cp), &pp).unwrap();
        assert!(r.relative < 1e-12 && r.strong_relative < 1e-12, "{r:?}");
        assert_eq!(residual_entire(&SpectralField::zeros(b), &pp).unwrap().absolute, 0.0);
        let bx = Basis::new(DomainSpec::neumann_box(&[1.0], 1.0).unwrap(), 2).unwrap();
        assert_eq!(residual_entire(&SpectralField::zeros(bx), &pp), Err(NshError::NotATorus));
    }

    #[test]
    fn residual_of_a_non_solution_matches_direct_quadrature() {
        let pp = p();
        let b = Basis::new(DomainSpec::neumann_box(&[2.0 * PI], 1.0).unwrap(), 4).unwrap();
        let u = SpectralField::from_fn(b, |x| 0.3 + (0.5 * x[0]).cos()).unwrap();
        let r = residual_box(&u, &pp).unwrap();
        // (Δ+1)² cos(x/2) = (1 - 1/4)² cos(x/2)
        let f = |x: f64| {
            let v = 0.3 + (0.5 * x).cos();
            let lin = (1.0 - pp.alpha()) * 0.3 + (0.5625 - pp.alpha()) * (0.5 * x).cos();
            lin - pp.beta() * v * v + v * v * v
        };
        let m = 20000;
        let h = 2.0 * PI / m as f64;
        let direct: f64 = (0..m).map(|j| f((j as f64 + 0.5) * h).powi(2) * h).sum::<f64>().sqrt();
        assert!((r.strong_absolute - direct).abs() < 1e-8 * direct);
        assert!(r.absolute <= r.strong_absolute);
    }

    #[test]
    fn rejects_torus_and_bad_counts() {
        let d = DomainSpec::skew_torus(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        let t = SpectralField::zeros(Basis::new(d, 2).unwrap());
        assert!(matches!(reflect_extend(&t, &[2, 2]), Err(NshError::NotABox)));
        let b = SpectralField::zeros(Basis::new(DomainSpec::neumann_box(&[1.0, 1.0], 1.0).unwrap(), 2).unwrap());
        assert!(matches!(reflect_extend(&b, &[0, 2]), Err(NshError::InvalidCounts)));
    }

    #[test]
    fn shift_preserves_energy() {
        let pp = p();
        let d = DomainSpec::skew_torus(&[vec![5.0, 0.0], vec![2.5, 4.0]], 1.0).unwrap();
        let b = Basis::new(d, 3).unwrap();
        let u = SpectralField::from_fn(b, |x| 0.5 + (x[0] * 1.2566370614359172).cos() * 0.7).unwrap();
        let s = torus_shift(&u, &[0.3, 0.1]).unwrap();
        let (e0, e1) = (Moments::of(&u, &pp).energy(&pp), Moments::of(&s, &pp).energy(&pp));
        assert!((e0 - e1).abs() < 1e-12 * e0.abs());
        let back = torus_shift(&s, &[-0.3, -0.1]).unwrap();
        for (a, b) in back.coeffs().iter().zip(u.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
