//! Eigenbases of the Laplacian and the collocation transforms between grid
//! values and coefficients.
//!
//! Boxes use tensor products of L2-orthonormal Neumann cosines. Tori use the
//! real Fourier basis `{1, cos θ_k, sin θ_k}` with `θ_k = 2π k·y` over one
//! half of the dual lattice, which is the Hermitian-symmetric complex
//! expansion written in real form. In both cases the basis is L2-orthonormal
//! and diagonalizes `Δ`, so the quadratic part of the energy is diagonal.
//!
//! Collocation grids are sized so that the quadrature integrates products of
//! four band-limited fields exactly: box midpoint grids need `M >= 2N+1`
//! points per axis, uniform torus grids need `M >= 4N+1`.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{NshError, Result};

/// Default per-axis bandwidth for a given dimension.
pub fn default_bandwidth(dim: usize) -> usize {
    match dim {
        1 => 64,
        2 => 32,
        _ => 16,
    }
}

/// Minimum number of collocation points per axis for exact quartic quadrature.
pub fn minimum_grid(kind: DomainKind, bandwidth: usize) -> usize {
    match kind {
        DomainKind::NeumannBox => 2 * bandwidth + 1,
        DomainKind::SkewTorus => 4 * bandwidth + 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    /// Tensor-product Neumann cosine (boxes).
    Cosine,
    /// Constant mode on a torus.
    Constant,
    /// `cos(2π k·y)` on a torus.
    Cos,
    /// `sin(2π k·y)` on a torus.
    Sin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Per-axis mode index (nonnegative on boxes, signed on tori).
    pub index: Vec<i64>,
    pub kind: ModeKind,
}

/// Laplacian eigenvalue and L2 normalization of every coefficient slot.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTable {
    pub mu: Vec<f64>,
    pub norm: Vec<f64>,
}

#[derive(Debug)]
enum Kernel {
    Box {
        synth: Vec<Vec<f64>>,
        analysis: Vec<Vec<f64>>,
    },
    Torus {
        synth: Vec<Vec<Complex64>>,
        analysis: Vec<Vec<Complex64>>,
        full_shape: Vec<usize>,
        /// (positive full index, negative full index, cos slot, sin slot)
        pairs: Vec<(usize, usize, usize, usize)>,
        zero_index: usize,
        inverse_transpose: DMatrix<f64>,
    },
}

/// A truncated eigenbasis together with its collocation grid.
#[derive(Debug)]
pub struct Basis {
    domain: DomainSpec,
    bandwidth: Vec<usize>,
    grid: Vec<usize>,
    modes: Vec<Mode>,
    eigen: EigenTable,
    weight: f64,
    kernel: Kernel,
}

/// Row-major strides for a shape.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// Multiply `mat` (rows x shape[axis], row-major) into `input` along `axis`.
fn apply_axis<T>(input: &[T], shape: &[usize], axis: usize, mat: &[T], rows: usize) -> Vec<T>
where
    T: Copy + Zero + Mul<Output = T> + AddAssign,
{
    let cols = shape[axis];
    debug_assert_eq!(mat.len(), rows * cols);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![T::zero(); outer * rows * inner];
    for o in 0..outer {
        let src = &input[o * cols * inner..(o + 1) * cols * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        if inner == 1 {
            for r in 0..rows {
                let row = &mat[r * cols..(r + 1) * cols];
                let mut acc = T::zero();
                for c in 0..cols {
                    acc += row[c] * src[c];
                }
                dst[r] = acc;
            }
        } else {
            for r in 0..rows {
                let d = &mut dst[r * inner..(r + 1) * inner];
                for c in 0..cols {
                    let m = mat[r * cols + c];
                    let s = &src[c * inner..(c + 1) * inner];
                    for (di, si) in d.iter_mut().zip(s) {
                        *di += m * *si;
                    }
                }
            }
        }
    }
    out
}

fn apply_all<T>(mut data: Vec<T>, mut shape: Vec<usize>, mats: &[Vec<T>], rows: &[usize]) -> Vec<T>
where
    T: Copy + Zero + Mul<Output = T> + AddAssign,
{
    for axis in 0..shape.len() {
        data = apply_axis(&data, &shape, axis, &mats[axis], rows[axis]);
        shape[axis] = rows[axis];
    }
    data
}

impl Basis {
    /// Uniform bandwidth `N` on every axis with the minimal exact grid.
    pub fn new(domain: DomainSpec, bandwidth: usize) -> Result<Arc<Self>> {
        let n = domain.dim();
        Self::with_bandwidths(domain, &vec![bandwidth; n], None)
    }

    /// Per-axis bandwidths and (optionally) per-axis grid sizes.
    pub fn with_bandwidths(
        domain: DomainSpec,
        bandwidth: &[usize],
        grid: Option<&[usize]>,
    ) -> Result<Arc<Self>> {
        let n = domain.dim();
        if bandwidth.len() != n {
            return Err(NshError::LengthMismatch {
                expected: n,
                got: bandwidth.len(),
            });
        }
        if bandwidth.contains(&0) {
            return Err(NshError::ZeroBandwidth);
        }
        let kind = domain.kind();
        let grid: Vec<usize> = match grid {
            Some(g) => {
                if g.len() != n {
                    return Err(NshError::LengthMismatch {
                        expected: n,
                        got: g.len(),
                    });
                }
                g.to_vec()
            }
            None => bandwidth.iter().map(|&b| minimum_grid(kind, b)).collect(),
        };
        for axis in 0..n {
            let required = minimum_grid(kind, bandwidth[axis]);
            if grid[axis] < required {
                return Err(NshError::GridTooSmall {
                    axis,
                    points: grid[axis],
                    bandwidth: bandwidth[axis],
                    required,
                });
            }
        }
        let basis = match kind {
            DomainKind::NeumannBox => Self::build_box(domain, bandwidth.to_vec(), grid),
            DomainKind::SkewTorus => Self::build_torus(domain, bandwidth.to_vec(), grid),
        };
        Ok(Arc::new(basis))
    }

    fn build_box(domain: DomainSpec, bandwidth: Vec<usize>, grid: Vec<usize>) -> Self {
        let lengths = domain.lengths().unwrap();
        let n = domain.dim();
        let shape: Vec<usize> = bandwidth.iter().map(|b| b + 1).collect();
        let total: usize = shape.iter().product();
        let st = strides(&shape);
        let mut modes = Vec::with_capacity(total);
        let mut mu = Vec::with_capacity(total);
        let mut norm = Vec::with_capacity(total);
        for flat in 0..total {
            let index: Vec<i64> = (0..n).map(|a| ((flat / st[a]) % shape[a]) as i64).collect();
            let m: f64 = index
                .iter()
                .zip(&lengths)
                .map(|(&k, &l)| (k as f64 * PI / l).powi(2))
                .sum();
            let nm: f64 = index
                .iter()
                .zip(&lengths)
                .map(|(&k, &l)| if k == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() })
                .product();
            modes.push(Mode {
                index,
                kind: ModeKind::Cosine,
            });
            mu.push(m);
            norm.push(nm);
        }
        let mut synth = Vec::with_capacity(n);
        let mut analysis = Vec::with_capacity(n);
        for a in 0..n {
            let (l, m, k) = (lengths[a], grid[a], shape[a]);
            let mut s = vec![0.0; m * k];
            let mut w = vec![0.0; k * m];
            for j in 0..m {
                let x = (j as f64 + 0.5) * l / m as f64;
                for kk in 0..k {
                    let phi = if kk == 0 {
                        (1.0 / l).sqrt()
                    } else {
                        (2.0 / l).sqrt() * (kk as f64 * PI * x / l).cos()
                    };
                    s[j * k + kk] = phi;
                    w[kk * m + j] = phi * l / m as f64;
                }
            }
            synth.push(s);
            analysis.push(w);
        }
        let weight = domain.volume() / grid.iter().product::<usize>() as f64;
        Self {
            domain,
            bandwidth,
            grid,
            modes,
            eigen: EigenTable { mu, norm },
            weight,
            kernel: Kernel::Box { synth, analysis },
        }
    }

    fn build_torus(domain: DomainSpec, bandwidth: Vec<usize>, grid: Vec<usize>) -> Self {
        let n = domain.dim();
        let a = domain.generator_matrix();
        let inv_t = a
            .clone()
            .try_inverse()
            .expect("generator matrix validated nonsingular")
            .transpose();
        let vol = domain.volume();
        let full_shape: Vec<usize> = bandwidth.iter().map(|b| 2 * b + 1).collect();
        let full_total: usize = full_shape.iter().product();
        let st = strides(&full_shape);
        let signed = |flat: usize| -> Vec<i64> {
            (0..n)
                .map(|ax| ((flat / st[ax]) % full_shape[ax]) as i64 - bandwidth[ax] as i64)
                .collect()
        };
        let flat_of = |k: &[i64]| -> usize {
            (0..n)
                .map(|ax| (k[ax] + bandwidth[ax] as i64) as usize * st[ax])
                .sum()
        };
        let mu_of = |k: &[i64]| -> f64 {
            let kv = nalgebra::DVector::from_iterator(n, k.iter().map(|&x| x as f64));
            let wave = &inv_t * kv * (2.0 * PI);
            wave.norm_squared()
        };
        let zero_index = flat_of(&vec![0; n]);
        let mut modes = vec![Mode {
            index: vec![0; n],
            kind: ModeKind::Constant,
        }];
        let mut mu = vec![0.0];
        let mut norm = vec![1.0 / vol.sqrt()];
        let mut pairs = Vec::new();
        for flat in 0..full_total {
            let k = signed(flat);
            let first = k.iter().copied().find(|&x| x != 0);
            if !matches!(first, Some(f) if f > 0) {
                continue;
            }
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            let m = mu_of(&k);
            let cos_slot = modes.len();
            modes.push(Mode {
                index: k.clone(),
                kind: ModeKind::Cos,
            });
            modes.push(Mode {
                index: k,
                kind: ModeKind::Sin,
            });
            mu.push(m);
            mu.push(m);
            norm.push((2.0 / vol).sqrt());
            norm.push((2.0 / vol).sqrt());
            pairs.push((flat, flat_of(&neg), cos_slot, cos_slot + 1));
        }
        let mut synth = Vec::with_capacity(n);
        let mut analysis = Vec::with_capacity(n);
        for ax in 0..n {
            let (m, k) = (grid[ax], full_shape[ax]);
            let mut s = vec![Complex64::zero(); m * k];
            let mut w = vec![Complex64::zero(); k * m];
            for j in 0..m {
                for kk in 0..k {
                    let kv = kk as f64 - bandwidth[ax] as f64;
                    let theta = 2.0 * PI * kv * j as f64 / m as f64;
                    let e = Complex64::new(theta.cos(), theta.sin());
                    s[j * k + kk] = e;
                    w[kk * m + j] = e.conj() / m as f64;
                }
            }
            synth.push(s);
            analysis.push(w);
        }
        let weight = vol / grid.iter().product::<usize>() as f64;
        Self {
            domain,
            bandwidth,
            grid,
            modes,
            eigen: EigenTable { mu, norm },
            weight,
            kernel: Kernel::Torus {
                synth,
                analysis,
                full_shape,
                pairs,
                zero_index,
                inverse_transpose: inv_t,
            },
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn bandwidth(&self) -> &[usize] {
        &self.bandwidth
    }

    pub fn grid_shape(&self) -> &[usize] {
        &self.grid
    }

    /// Number of coefficient slots.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn grid_len(&self) -> usize {
        self.grid.iter().product()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigen_table(&self) -> &EigenTable {
        &self.eigen
    }

    /// Quadrature weight of every grid point (uniform).
    pub fn quadrature_weight(&self) -> f64 {
        self.weight
    }

    /// True if both bases describe the same discretization.
    pub fn same_as(&self, other: &Basis) -> bool {
        std::ptr::eq(self, other)
            || (self.domain == other.domain
                && self.bandwidth == other.bandwidth
                && self.grid == other.grid)
    }

    /// Physical coordinates of grid point with multi-index `j`.
    pub fn grid_point(&self, j: &[usize]) -> Vec<f64> {
        match &self.kernel {
            Kernel::Box { .. } => {
                let l = self.domain.lengths().unwrap();
                (0..self.dim())
                    .map(|a| (j[a] as f64 + 0.5) * l[a] / self.grid[a] as f64)
                    .collect()
            }
            Kernel::Torus { .. } => {
                let a = self.domain.generator_matrix();
                let y = nalgebra::DVector::from_iterator(
                    self.dim(),
                    (0..self.dim()).map(|ax| j[ax] as f64 / self.grid[ax] as f64),
                );
                (a * y).iter().copied().collect()
            }
        }
    }

    /// Coordinates of every grid point in row-major order.
    pub fn grid_points(&self) -> Vec<Vec<f64>> {
        let st = strides(&self.grid);
        (0..self.grid_len())
            .map(|flat| {
                let j: Vec<usize> = (0..self.dim())
                    .map(|a| (flat / st[a]) % self.grid[a])
                    .collect();
                self.grid_point(&j)
            })
            .collect()
    }

    /// Coefficients to grid values.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.len());
        match &self.kernel {
            Kernel::Box { synth, .. } => {
                let shape: Vec<usize> = self.bandwidth.iter().map(|b| b + 1).collect();
                apply_all(coeffs.to_vec(), shape, synth, &self.grid)
            }
            Kernel::Torus {
                synth, full_shape, ..
            } => {
                let full = self.to_complex(coeffs);
                apply_all(full, full_shape.clone(), synth, &self.grid)
                    .into_iter()
                    .map(|z| z.re)
                    .collect()
            }
        }
    }

    /// Grid values to coefficients: the exact L2 projection for band-limited
    /// products up to the quadrature's degree.
    pub fn analyze(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.grid_len());
        match &self.kernel {
            Kernel::Box { analysis, .. } => {
                let rows: Vec<usize> = self.bandwidth.iter().map(|b| b + 1).collect();
                apply_all(values.to_vec(), self.grid.clone(), analysis, &rows)
            }
            Kernel::Torus {
                analysis,
                full_shape,
                ..
            } => {
                let z: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                let full = apply_all(z, self.grid.clone(), analysis, full_shape);
                self.from_complex(&full)
            }
        }
    }

    /// Real torus coefficients to the Hermitian-symmetric complex array
    /// `u = Σ c_k exp(2πi k·y)`, indexed over `k_i ∈ [-N_i, N_i]` row-major.
    pub fn to_complex(&self, coeffs: &[f64]) -> Vec<Complex64> {
        match &self.kernel {
            Kernel::Torus {
                full_shape,
                pairs,
                zero_index,
                ..
            } => {
                let vol = self.domain.volume();
                let mut full = vec![Complex64::zero(); full_shape.iter().product()];
                full[*zero_index] = Complex64::new(coeffs[0] / vol.sqrt(), 0.0);
                let s = 1.0 / (2.0 * vol).sqrt();
                for &(pos, neg, c, si) in pairs {
                    let z = Complex64::new(coeffs[c] * s, -coeffs[si] * s);
                    full[pos] = z;
                    full[neg] = z.conj();
                }
                full
            }
            Kernel::Box { .. } => panic!("complex representation is defined on tori only"),
        }
    }

    /// Inverse of [`Basis::to_complex`]; the anti-Hermitian part is discarded.
    pub fn from_complex(&self, full: &[Complex64]) -> Vec<f64> {
        match &self.kernel {
            Kernel::Torus {
                pairs, zero_index, ..
            } => {
                let vol = self.domain.volume();
                let mut out = vec![0.0; self.len()];
                out[0] = full[*zero_index].re * vol.sqrt();
                let s = (2.0 * vol).sqrt();
                for &(pos, neg, c, si) in pairs {
                    let z = (full[pos] + full[neg].conj()) * 0.5;
                    out[c] = z.re * s;
                    out[si] = -z.im * s;
                }
                out
            }
            Kernel::Box { .. } => panic!("complex representation is defined on tori only"),
        }
    }

    /// Position (flat index) of multi-index `k` in the complex array of a torus basis.
    pub fn complex_index(&self, k: &[i64]) -> Option<usize> {
        match &self.kernel {
            Kernel::Torus { full_shape, .. } => {
                let st = strides(full_shape);
                let mut flat = 0;
                for a in 0..self.dim() {
                    let b = self.bandwidth[a] as i64;
                    if k[a].abs() > b {
                        return None;
                    }
                    flat += (k[a] + b) as usize * st[a];
                }
                Some(flat)
            }
            Kernel::Box { .. } => None,
        }
    }

    pub fn complex_len(&self) -> usize {
        match &self.kernel {
            Kernel::Torus { full_shape, .. } => full_shape.iter().product(),
            Kernel::Box { .. } => 0,
        }
    }

    /// Wave vector `∇θ` of a torus slot (zero on boxes).
    pub(crate) fn wave_vector(&self, slot: usize) -> Vec<f64> {
        match &self.kernel {
            Kernel::Torus {
                inverse_transpose, ..
            } => {
                let k = &self.modes[slot].index;
                let kv = nalgebra::DVector::from_iterator(self.dim(), k.iter().map(|&x| x as f64));
                (inverse_transpose * kv * (2.0 * PI)).iter().copied().collect()
            }
            Kernel::Box { .. } => vec![0.0; self.dim()],
        }
    }

    /// Value and gradient of the basis function in `slot` at point `x`.
    pub(crate) fn basis_value_gradient(&self, slot: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let mode = &self.modes[slot];
        let n = self.dim();
        match &self.kernel {
            Kernel::Box { .. } => {
                let l = self.domain.lengths().unwrap();
                let mut vals = vec![0.0; n];
                let mut ders = vec![0.0; n];
                for a in 0..n {
                    let k = mode.index[a] as f64;
                    if mode.index[a] == 0 {
                        vals[a] = (1.0 / l[a]).sqrt();
                        ders[a] = 0.0;
                    } else {
                        let c = (2.0 / l[a]).sqrt();
                        let w = k * PI / l[a];
                        vals[a] = c * (w * x[a]).cos();
                        ders[a] = -c * w * (w * x[a]).sin();
                    }
                }
                let value: f64 = vals.iter().product();
                let grad = (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| if a == b { ders[b] } else { vals[b] })
                            .product()
                    })
                    .collect();
                (value, grad)
            }
            Kernel::Torus { .. } => {
                let vol = self.domain.volume();
                if mode.kind == ModeKind::Constant {
                    return (1.0 / vol.sqrt(), vec![0.0; n]);
                }
                let wave = self.wave_vector(slot);
                let theta: f64 = wave.iter().zip(x).map(|(w, xi)| w * xi).sum();
                let c = (2.0 / vol).sqrt();
                let (val, dval) = match mode.kind {
                    ModeKind::Cos => (c * theta.cos(), -c * theta.sin()),
                    _ => (c * theta.sin(), c * theta.cos()),
                };
                (val, wave.iter().map(|w| w * dval).collect())
            }
        }
    }
}

/// `((μ−1)² − α) / (μ² + μ + 1)`, the ratio of `Q` to the `W²₂` norm on one mode.
pub fn norm_ratio(mu: f64, p: &crate::params::Params) -> f64 {
    p.symbol(mu) / (mu * mu + mu + 1.0)
}

/// Extreme values `(c, C)` of [`norm_ratio`] over the represented modes, so
/// that `c‖u‖²_{W²₂} <= Q[u] <= C‖u‖²_{W²₂}` for every field in the basis.
pub fn norm_equivalence_constants(basis: &Basis, p: &crate::params::Params) -> (f64, f64) {
    basis
        .eigen_table()
        .mu
        .iter()
        .map(|&m| norm_ratio(m, p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}
