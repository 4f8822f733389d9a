//! The energy and its companion functionals, and the closed-form analysis of
//! fibrations `t ↦ E[tv]`.
//!
//! Everything on a ray depends on three numbers only: `Q[v]`, `∫v³` and
//! `∫v⁴`. [`Moments`] carries them, so the fibration algebra is shared by
//! field-level calls and direct moment-level checks.

use serde::{Deserialize, Serialize};

use crate::error::{NshError, Result};
use crate::field::SpectralField;
use crate::params::Params;
use crate::report::InequalityCheck;

/// Relative discriminant below which a fibration is reported degenerate.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;

/// `Q[v]`, `∫v³` and `∫v⁴` of a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub q: f64,
    pub cubic: f64,
    pub quartic: f64,
}

impl Moments {
    pub fn new(q: f64, cubic: f64, quartic: f64) -> Self {
        Self { q, cubic, quartic }
    }

    pub fn of(u: &SpectralField, p: &Params) -> Self {
        let w = u.basis().quadrature_weight();
        let grid = u.to_grid();
        let (mut c3, mut c4) = (0.0, 0.0);
        for &x in &grid {
            let x2 = x * x;
            c3 += x2 * x;
            c4 += x2 * x2;
        }
        Self {
            q: u.quadratic_form(p),
            cubic: w * c3,
            quartic: w * c4,
        }
    }

    /// Moments of `t v`.
    pub fn scaled(&self, t: f64) -> Self {
        let t2 = t * t;
        Self {
            q: t2 * self.q,
            cubic: t2 * t * self.cubic,
            quartic: t2 * t2 * self.quartic,
        }
    }

    pub fn energy(&self, p: &Params) -> f64 {
        0.5 * self.q - p.beta() * self.cubic / 3.0 + 0.25 * self.quartic
    }

    /// `L = dE[u]u`.
    pub fn l_value(&self, p: &Params) -> f64 {
        self.q - p.beta() * self.cubic + self.quartic
    }

    /// `H = dL[u]u`.
    pub fn h_value(&self, p: &Params) -> f64 {
        2.0 * self.q - 3.0 * p.beta() * self.cubic + 4.0 * self.quartic
    }

    /// `K₀ = E − L/2`.
    pub fn k0(&self, p: &Params) -> f64 {
        p.beta() * self.cubic / 6.0 - 0.25 * self.quartic
    }

    /// `K₁ = L − H/2`.
    pub fn k1(&self, p: &Params) -> f64 {
        0.5 * p.beta() * self.cubic - self.quartic
    }

    /// Scale-invariant ratio `∫v³ / (Q ∫v⁴)^{1/2}`.
    pub fn i_value(&self) -> f64 {
        if self.cubic == 0.0 {
            0.0
        } else {
            self.cubic / (self.q * self.quartic).sqrt()
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            cubic: -self.cubic,
            ..*self
        }
    }
}

pub fn energy_e(u: &SpectralField, p: &Params) -> f64 {
    Moments::of(u, p).energy(p)
}

pub fn functional_l(u: &SpectralField, p: &Params) -> f64 {
    Moments::of(u, p).l_value(p)
}

pub fn functional_h(u: &SpectralField, p: &Params) -> f64 {
    Moments::of(u, p).h_value(p)
}

pub fn functional_k0(u: &SpectralField, p: &Params) -> f64 {
    Moments::of(u, p).k0(p)
}

pub fn functional_k1(u: &SpectralField, p: &Params) -> f64 {
    Moments::of(u, p).k1(p)
}

/// Coefficient-space Riesz representer of `dE[u]`, i.e. component `j` is
/// `((μ_j − 1)² − α) c_j + ⟨−βu² + u³, v_j⟩`.
pub fn gradient_de(u: &SpectralField, p: &Params) -> SpectralField {
    let basis = u.basis();
    let beta = p.beta();
    let nonlinear: Vec<f64> = u
        .to_grid()
        .iter()
        .map(|&x| x * x * (x - beta))
        .collect();
    let proj = basis.analyze(&nonlinear);
    let mu = &basis.eigen_table().mu;
    let g = u
        .coeffs()
        .iter()
        .zip(mu)
        .zip(&proj)
        .map(|((c, &m), n)| p.symbol(m) * c + n)
        .collect();
    SpectralField::from_parts(basis.clone(), g)
}

/// Ratio of the dual Q-norm of `dE[u]` to the Q-norm of `u`.
pub fn relative_gradient_residual(u: &SpectralField, p: &Params) -> f64 {
    let g = gradient_de(u, p);
    let mu = &u.basis().eigen_table().mu;
    let dual: f64 = g
        .coeffs()
        .iter()
        .zip(mu)
        .map(|(gj, &m)| gj * gj / p.symbol(m))
        .sum();
    let q = u.quadratic_form(p);
    if q == 0.0 {
        dual.sqrt()
    } else {
        (dual / q).sqrt()
    }
}

/// `I[v]`; zero when `∫v³ = 0`.
pub fn functional_i(v: &SpectralField, p: &Params) -> Result<f64> {
    if v.is_zero() {
        return Err(NshError::ZeroField);
    }
    Ok(Moments::of(v, p).i_value())
}

/// `f(s) = (1 + 3w)/(1 + w)³` with `w = sqrt(1 − s⁻²)`, for `s >= 1`.
pub fn f_of_s(s: f64) -> f64 {
    let w = ((s - 1.0) * (s + 1.0)).max(0.0).sqrt() / s;
    (1.0 + 3.0 * w) / (1.0 + w).powi(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Monotonous,
    Degenerate,
    NonMonotonous,
}

/// Closed-form description of the fibration of a sign-normalized direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibrationData {
    /// `Q[v]`
    pub q: f64,
    /// `∫v³` after sign normalization.
    pub b0: f64,
    /// `∫v⁴`
    pub d: f64,
    /// `β ∫v³`
    pub b: f64,
    pub beta: f64,
    pub i_value: f64,
    /// `β I / 2`
    pub s: f64,
    pub classification: Classification,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    /// Ridge scaling factor (smaller Nehari root).
    pub ridge_t: Option<f64>,
    /// The input had `∫v³ < 0` and was negated.
    pub sign_flipped: bool,
    /// `H[t₁v] < 0 < H[t₂v]` when non-monotonous (vacuously true otherwise).
    pub sign_conditions_hold: bool,
}

impl FibrationData {
    pub fn from_moments(m: Moments, p: &Params) -> Result<Self> {
        if !(m.q > 0.0) {
            return Err(NshError::ZeroField);
        }
        let sign_flipped = m.cubic < 0.0;
        let m = if sign_flipped { m.negated() } else { m };
        let beta = p.beta();
        let (q, b0, d) = (m.q, m.cubic, m.quartic);
        let b = beta * b0;
        let i_value = m.i_value();
        let s = 0.5 * beta * i_value;
        let mut out = Self {
            q,
            b0,
            d,
            b,
            beta,
            i_value,
            s,
            classification: Classification::Monotonous,
            t1: None,
            t2: None,
            ridge_t: None,
            sign_flipped,
            sign_conditions_hold: true,
        };
        if b0 == 0.0 {
            return Ok(out);
        }
        let disc = b * b - 4.0 * q * d;
        let rel = disc / (b * b + 4.0 * q * d);
        if rel.abs() <= DEGENERATE_TOLERANCE {
            let t = (q / d).sqrt();
            out.classification = Classification::Degenerate;
            out.t1 = Some(t);
            out.t2 = Some(t);
            out.ridge_t = Some(t);
        } else if rel > 0.0 {
            let root = disc.sqrt();
            let t1 = 2.0 * q / (b + root);
            let t2 = (b + root) / (2.0 * d);
            out.classification = Classification::NonMonotonous;
            out.t1 = Some(t1);
            out.t2 = Some(t2);
            out.ridge_t = Some(t1);
            out.sign_conditions_hold = out.h_at(t1) < 0.0 && out.h_at(t2) > 0.0;
        }
        Ok(out)
    }

    fn moments(&self) -> Moments {
        Moments::new(self.q, self.b0, self.d)
    }

    fn params(&self) -> Params {
        Params::new(-1.0, self.beta).expect("beta validated at construction")
    }

    /// `φ_v(t) = E[tv]` (independent of α once `Q` is known).
    pub fn energy_at(&self, t: f64) -> f64 {
        self.moments().scaled(t).energy(&self.params())
    }

    pub fn l_at(&self, t: f64) -> f64 {
        self.moments().scaled(t).l_value(&self.params())
    }

    pub fn h_at(&self, t: f64) -> f64 {
        self.moments().scaled(t).h_value(&self.params())
    }

    /// `f(s)` when `s >= 1`.
    pub fn f_s(&self) -> Option<f64> {
        (self.s >= 1.0).then(|| f_of_s(self.s))
    }

    /// Ridge energy from `(1/(3β²)) Q³/(∫v³)² f(βI/2)`, when defined.
    pub fn ridge_energy(&self) -> Option<f64> {
        match self.classification {
            Classification::Monotonous => None,
            _ => Some(
                self.q.powi(3) / (3.0 * self.beta * self.beta * self.b0 * self.b0)
                    * f_of_s(self.s.max(1.0)),
            ),
        }
    }
}

/// Classify the fibration of `v` (negating `v` first when `∫v³ < 0`).
pub fn fibration_classify(v: &SpectralField, p: &Params) -> Result<FibrationData> {
    if v.is_zero() {
        return Err(NshError::ZeroField);
    }
    FibrationData::from_moments(Moments::of(v, p), p)
}

/// Ridge scaling factor and energy on the ridge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeEnergy {
    pub ridge_t: f64,
    /// From the closed-form expression.
    pub formula: f64,
    /// `E[t̃v]` evaluated directly from the quartic.
    pub direct: f64,
}

pub fn ridge_energy_from_moments(m: Moments, p: &Params) -> Result<RidgeEnergy> {
    let fib = FibrationData::from_moments(m, p)?;
    if fib.classification != Classification::NonMonotonous {
        return Err(NshError::NotNonMonotonous(match fib.classification {
            Classification::Degenerate => "degenerate",
            _ => "monotonous",
        }));
    }
    let t = fib.ridge_t.unwrap();
    Ok(RidgeEnergy {
        ridge_t: t,
        formula: fib.ridge_energy().unwrap(),
        direct: fib.energy_at(t),
    })
}

pub fn ridge_energy_formula(v: &SpectralField, p: &Params) -> Result<RidgeEnergy> {
    if v.is_zero() {
        return Err(NshError::ZeroField);
    }
    ridge_energy_from_moments(Moments::of(v, p), p)
}

/// Lower bounds on the energy near zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub classification: Classification,
    /// `E[v] >= Q[v]/18` for monotonous fibrations.
    pub monotone: Option<InequalityCheck>,
    /// `min_t E[t w] − Q[t w]/12` over `t ∈ {0, 0.1, …, 1}` with `w` the ridge point.
    pub ridge: Option<InequalityCheck>,
}

impl CoercivityReport {
    pub fn passed(&self) -> bool {
        self.monotone.as_ref().is_none_or(|c| c.passed) && self.ridge.as_ref().is_none_or(|c| c.passed)
    }
}

pub fn coercivity_from_moments(m: Moments, p: &Params) -> Result<CoercivityReport> {
    let fib = FibrationData::from_moments(m, p)?;
    let mut report = CoercivityReport {
        classification: fib.classification,
        monotone: None,
        ridge: None,
    };
    match fib.classification {
        Classification::Monotonous => {
            let e = fib.energy_at(1.0);
            report.monotone = Some(InequalityCheck::at_least(
                "energy >= Q/18 (monotonous)",
                e,
                fib.q / 18.0,
                1e-12,
                fib.q,
            ));
        }
        _ => {
            let tr = fib.ridge_t.unwrap();
            let qw = fib.q * tr * tr;
            let mut worst: Option<InequalityCheck> = None;
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                let e = fib.energy_at(t * tr);
                let check = InequalityCheck::at_least(
                    "energy >= Q/12 along the ridge segment",
                    e,
                    qw * t * t / 12.0,
                    1e-12,
                    qw,
                );
                if worst.as_ref().is_none_or(|w| check.slack < w.slack) {
                    worst = Some(check);
                }
            }
            report.ridge = worst;
        }
    }
    Ok(report)
}

pub fn coercivity_check(v: &SpectralField, p: &Params) -> Result<CoercivityReport> {
    if v.is_zero() {
        return Err(NshError::ZeroField);
    }
    coercivity_from_moments(Moments::of(v, p), p)
}

/// Flat diagnostic record for one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibrationDiagnostics {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub classification: Classification,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub ridge_t: Option<f64>,
    #[serde(rename = "I")]
    pub i: f64,
    pub s: f64,
    pub f_s: Option<f64>,
    #[serde(rename = "E_ridge")]
    pub e_ridge: Option<f64>,
    pub slack_monotone: Option<f64>,
    pub slack_ridge: Option<f64>,
}

impl FibrationDiagnostics {
    pub fn new(fib: &FibrationData, coercivity: &CoercivityReport) -> Self {
        Self {
            q: fib.q,
            b0: fib.b0,
            d: fib.d,
            classification: fib.classification,
            t1: fib.t1,
            t2: fib.t2,
            ridge_t: fib.ridge_t,
            i: fib.i_value,
            s: fib.s,
            f_s: fib.f_s(),
            e_ridge: fib.ridge_energy(),
            slack_monotone: coercivity.monotone.as_ref().map(|c| c.slack),
            slack_ridge: coercivity.ridge.as_ref().map(|c| c.slack),
        }
    }

    pub fn of(v: &SpectralField, p: &Params) -> Result<Self> {
        let fib = fibration_classify(v, p)?;
        let m = Moments::new(fib.q, fib.b0, fib.d);
        Ok(Self::new(&fib, &coercivity_from_moments(m, p)?))
    }
}
