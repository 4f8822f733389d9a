//! Minimization of the energy over the ridge of the Nehari manifold.
//!
//! A direction `v` with a non-monotonous fibration has a unique ridge point
//! `t̃(v) v`, and `G(v) = E[t̃(v) v]` is homogeneous of degree zero. The
//! solver minimizes `G` on the unit sphere of `Q` with nonlinear conjugate
//! gradients, starting from several structured and random directions.
//!
//! By the envelope theorem `∇G(v) = t̃ dE[t̃v]`, so the gradient costs one
//! transform pair per evaluation, and its dual-`Q` norm divided by `t̃²`
//! is exactly the relative stationarity residual of the ridge point.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bump::{build_plateau_bump, inradius};
use crate::domain::DomainKind;
use crate::domain::DomainSpec;
use crate::equilibria::{constant_solutions, random_smooth_field, sobolev_constant, start_rng, SobolevOptions};
use crate::error::{NshError, Result};
use crate::field::SpectralField;
use crate::functionals::{
    fibration_classify, relative_gradient_residual, Classification, FibrationData, Moments,
};
use crate::optimize::{minimize_on_sphere, Eval, IterationRecord, SphereOptions, StopReason};
use crate::params::Params;
use crate::report::InequalityCheck;
use crate::spectral::{Basis, ModeKind};

/// Threshold on the energy fraction of an axis for the dependence verdict.
pub const AXIS_DEPENDENCE_THRESHOLD: f64 = 1e-3;

/// Scale `v` onto its ridge point. Negative `∫v³` is handled by projecting `−v`.
pub fn ridge_project(v: &SpectralField, p: &Params) -> Result<(f64, SpectralField)> {
    if v.is_zero() {
        return Err(NshError::ZeroField);
    }
    let fib = FibrationData::from_moments(Moments::of(v, p), p)?;
    match fib.classification {
        Classification::Monotonous => Err(NshError::NotNonMonotonous("monotonous")),
        _ => {
            let t = fib.ridge_t.unwrap();
            let sign = if fib.sign_flipped { -1.0 } else { 1.0 };
            Ok((t, v.scaled(sign * t)))
        }
    }
}

/// The reduced functional on coefficient vectors.
pub struct ReducedFunctional<'a> {
    basis: &'a Arc<Basis>,
    params: Params,
    symbol: Vec<f64>,
}

impl<'a> ReducedFunctional<'a> {
    pub fn new(basis: &'a Arc<Basis>, params: Params) -> Self {
        let symbol = basis.eigen_table().mu.iter().map(|&m| params.symbol(m)).collect();
        Self { basis, params, symbol }
    }

    pub fn metric(&self) -> &[f64] {
        &self.symbol
    }

    /// Ridge factor (signed by the cubic moment) of `x`, if the fibration is non-monotonous.
    fn ridge(&self, x: &[f64], grid: &[f64]) -> Option<(f64, Moments)> {
        let w = self.basis.quadrature_weight();
        let q: f64 = x.iter().zip(&self.symbol).map(|(c, s)| s * c * c).sum();
        let (mut c3, mut c4) = (0.0, 0.0);
        for &u in grid {
            let u2 = u * u;
            c3 += u2 * u;
            c4 += u2 * u2;
        }
        let m = Moments::new(q, w * c3, w * c4);
        let fib = FibrationData::from_moments(m, &self.params).ok()?;
        if fib.classification != Classification::NonMonotonous {
            return None;
        }
        let sign = if fib.sign_flipped { -1.0 } else { 1.0 };
        Some((sign * fib.ridge_t.unwrap(), m))
    }

    pub fn value(&self, x: &[f64]) -> Option<f64> {
        let grid = self.basis.synthesize(x);
        let (t, m) = self.ridge(x, &grid)?;
        Some(m.scaled(t).energy(&self.params))
    }
}

impl crate::optimize::SphereObjective for ReducedFunctional<'_> {
    fn eval(&self, x: &[f64]) -> Option<Eval> {
        let grid = self.basis.synthesize(x);
        let (t, m) = self.ridge(x, &grid)?;
        let beta = self.params.beta();
        let (t2, t3) = (t * t, t * t * t);
        let nonlinear: Vec<f64> = grid.iter().map(|&u| u * u * (t3 * u - beta * t2)).collect();
        let proj = self.basis.analyze(&nonlinear);
        // dE[U] with U = t x, then multiplied by t.
        let grad: Vec<f64> = x
            .iter()
            .zip(&self.symbol)
            .zip(&proj)
            .map(|((c, s), n)| t * (s * t * c + n))
            .collect();
        let dual: f64 = grad.iter().zip(&self.symbol).map(|(g, s)| g * g / s).sum();
        let qu = m.q * t2;
        Some(Eval {
            value: m.scaled(t).energy(&self.params),
            residual: dual.sqrt() / (t.abs() * qu.sqrt()),
            grad,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartKind {
    PlateauBump { radius: f64 },
    Stripe { axis: usize, slot: usize },
    ThreeWave { angle: f64 },
    Noise,
    Supplied { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStatus {
    Discarded,
    Converged,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartReport {
    pub index: usize,
    pub start: StartKind,
    pub status: StartStatus,
    pub initial_classification: Option<Classification>,
    pub energy: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct NehariOptions {
    pub starts: usize,
    pub seed: u64,
    pub sphere: SphereOptions,
    /// Additional starting directions tried after the generated ones.
    pub extra_starts: Vec<SpectralField>,
    /// `H[U] <= -h_tolerance Q[U]` is required to certify `U` off the ridge end.
    pub h_tolerance: f64,
}

impl Default for NehariOptions {
    fn default() -> Self {
        Self {
            starts: 12,
            seed: 0,
            sphere: SphereOptions::default(),
            extra_starts: Vec::new(),
            h_tolerance: 1e-8,
        }
    }
}

/// Values of `S₂, S₃, S₄` used by the inequality checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SobolevValues {
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "S3")]
    pub s3: f64,
    #[serde(rename = "S4")]
    pub s4: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
    /// `S₄⁴/12`, the energy floor that would hold if `U` sat at the ridge end.
    pub ridge_end_energy_floor: Option<f64>,
    pub all_passed: bool,
}

impl InequalityReport {
    pub fn get(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Relative tolerance for the inequality suite.
pub const INEQUALITY_TOLERANCE: f64 = 1e-10;

/// Inequality suite for a ridge point `u`.
pub fn verify_solution(u: &SpectralField, p: &Params, constants: Option<&SobolevValues>, h_tolerance: f64) -> InequalityReport {
    let m = Moments::of(u, p);
    let q = m.q;
    let mut checks = vec![
        InequalityCheck::at_most("nehari_residual", m.l_value(p).abs(), 1e-8 * q, 0.0, q),
        InequalityCheck::at_most("ridge_side", m.h_value(p), -h_tolerance * q, 0.0, q),
    ];
    let fib = FibrationData::from_moments(m, p).ok();
    let mut worst: Option<InequalityCheck> = None;
    let ts = (1..=10).map(|i| i as f64 / 10.0).chain([0.25, 0.75]);
    for t in ts {
        let mt = m.scaled(t);
        let c = InequalityCheck::at_least("coercivity_segment", mt.energy(p), mt.q / 12.0, INEQUALITY_TOLERANCE, q);
        if worst.as_ref().is_none_or(|w| c.slack < w.slack) {
            worst = Some(c);
        }
    }
    checks.extend(worst);
    if let Some(f) = &fib {
        checks.push(InequalityCheck::at_most(
            "energy_matches_formula",
            (f.ridge_energy().unwrap_or(f64::NAN) - m.energy(p)).abs(),
            0.0,
            INEQUALITY_TOLERANCE,
            m.energy(p).abs(),
        ));
    }
    let mut floor = None;
    if let Some(s) = constants {
        let beta = p.beta();
        let l4 = m.quartic.powf(0.25);
        checks.push(InequalityCheck::at_least(
            "l4_lower_bound",
            l4,
            s.s2 * s.s4 / beta,
            INEQUALITY_TOLERANCE,
            l4,
        ));
        let e = m.energy(p);
        checks.push(InequalityCheck::at_most(
            "energy_upper_bound",
            e,
            s.s3.powi(6) / (3.0 * beta * beta),
            INEQUALITY_TOLERANCE,
            e.abs(),
        ));
        floor = Some(s.s4.powi(4) / 12.0);
    }
    let all_passed = checks.iter().all(|c| c.passed);
    InequalityReport {
        checks,
        ridge_end_energy_floor: floor,
        all_passed,
    }
}

/// Energy fraction of the modes that vary along each axis.
pub fn axis_dependence(u: &SpectralField, p: &Params) -> Vec<f64> {
    let basis = u.basis();
    let q = u.quadratic_form(p);
    let mu = &basis.eigen_table().mu;
    (0..basis.dim())
        .map(|a| {
            if q == 0.0 {
                return 0.0;
            }
            basis
                .modes()
                .iter()
                .zip(u.coeffs())
                .zip(mu)
                .filter(|((m, _), _)| m.index[a] != 0)
                .map(|((_, c), &m)| p.symbol(m) * c * c)
                .sum::<f64>()
                / q
        })
        .collect()
}

/// Lower bound for the energy per unit length of a field that does not
/// depend on one axis, from constants of the cross-section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileCheck {
    pub axis: usize,
    /// `S₂'² S₄'⁴ / (12 β²)` on the cross-section.
    pub profile_bound: f64,
    /// `E[U] / L_axis`
    pub energy_per_length: f64,
    /// Independence of this axis is ruled out.
    pub excludes_independence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrreducibilityReport {
    pub axis_dependence: Vec<f64>,
    pub axis_verdict: Vec<bool>,
    /// `‖U − mean U‖ / ‖U‖` in `L₂`.
    pub constant_test: f64,
    pub energy: f64,
    pub e_c_minus: Option<f64>,
    pub below_c_minus: Option<bool>,
    /// `E[c₋] >= (1−α)³ |Ω| / (6β²)`
    pub c_minus_growth: Option<InequalityCheck>,
    pub bump_bound: Option<f64>,
    pub below_bump_bound: Option<bool>,
    pub profile: Vec<ProfileCheck>,
}

#[derive(Clone, Debug, Default)]
pub struct IrreducibilityOptions {
    /// Ridge energy of a test function supported in a ball inside the domain.
    pub bump_bound: Option<f64>,
    /// Compute cross-section constants for the profile-energy check (boxes in 2D or 3D).
    pub profile_bandwidth: Option<usize>,
}

pub fn irreducibility_diagnostics(u: &SpectralField, p: &Params, opts: &IrreducibilityOptions) -> Result<IrreducibilityReport> {
    let dep = axis_dependence(u, p);
    let verdict = dep.iter().map(|&d| d > AXIS_DEPENDENCE_THRESHOLD).collect();
    let norm = u.l2_norm_sq().sqrt();
    let mut centered = u.coeffs().to_vec();
    centered[0] = 0.0;
    let constant_test = if norm == 0.0 {
        0.0
    } else {
        centered.iter().map(|c| c * c).sum::<f64>().sqrt() / norm
    };
    let energy = Moments::of(u, p).energy(p);
    let domain = u.domain();
    let cs = constant_solutions(p, domain).ok();
    let c_minus_growth = cs.map(|c| {
        let a = 1.0 - p.alpha();
        InequalityCheck::at_least(
            "c_minus_growth",
            c.e_minus,
            a.powi(3) * c.volume / (6.0 * p.beta() * p.beta()),
            INEQUALITY_TOLERANCE,
            c.e_minus.abs(),
        )
    });
    let mut profile = Vec::new();
    if let (Some(bw), Some(lengths)) = (opts.profile_bandwidth, domain.lengths()) {
        if lengths.len() >= 2 {
            for axis in 0..lengths.len() {
                let cross: Vec<f64> = lengths
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != axis)
                    .map(|(_, &l)| l)
                    .collect();
                let b = Basis::new(DomainSpec::neumann_box(&cross, 1.0)?, bw)?;
                let sopts = SobolevOptions::default();
                let s2 = sobolev_constant(&b, p, 2, &sopts)?.value;
                let s4 = sobolev_constant(&b, p, 4, &sopts)?.value;
                let bound = s2 * s2 * s4.powi(4) / (12.0 * p.beta() * p.beta());
                let per = energy / lengths[axis];
                profile.push(ProfileCheck {
                    axis,
                    profile_bound: bound,
                    energy_per_length: per,
                    excludes_independence: per < bound,
                });
            }
        }
    }
    Ok(IrreducibilityReport {
        axis_dependence: dep,
        axis_verdict: verdict,
        constant_test,
        energy,
        e_c_minus: cs.map(|c| c.e_minus),
        below_c_minus: cs.map(|c| energy < c.e_minus),
        c_minus_growth,
        bump_bound: opts.bump_bound,
        below_bump_bound: opts.bump_bound.map(|b| energy <= b),
        profile,
    })
}

/// Project a rear-slope field `u` (`L <= 0`, `H <= 0`, `K₁ >= 0`) onto the
/// ridge or its end: returns `t* ∈ (0, 1]` and `t* u`.
pub fn pullback(u: &SpectralField, p: &Params) -> Result<(f64, SpectralField)> {
    if u.is_zero() {
        return Err(NshError::ZeroField);
    }
    let m = Moments::of(u, p);
    let tol = 1e-12 * m.q;
    let (l, h, k1) = (m.l_value(p), m.h_value(p), m.k1(p));
    if l > tol || h > tol || k1 < -tol {
        return Err(NshError::NotInRearSlope(format!("L = {l:e}, H = {h:e}, K1 = {k1:e}")));
    }
    if l.abs() <= tol {
        return Ok((1.0, u.clone()));
    }
    let fib = FibrationData::from_moments(m, p)?;
    let t = fib
        .t1
        .ok_or_else(|| NshError::NotInRearSlope("fibration has no Nehari point".into()))?;
    Ok((t, u.scaled(t)))
}

/// Deterministic starting direction for multistart index `index`.
pub fn start_direction(basis: &Arc<Basis>, p: &Params, seed: u64, index: usize) -> (StartKind, Result<SpectralField>) {
    let n = basis.dim();
    let mut rng = start_rng(seed, 100, index as u64);
    if index == 0 {
        let r = inradius(basis) + 0.5;
        return (StartKind::PlateauBump { radius: r }, build_plateau_bump(basis, r));
    }
    let volume = basis.domain().volume();
    // Zero-mean smooth noise with the same Q as the unit constant.
    let unit_noise = |rng: &mut rand_chacha::ChaCha20Rng| {
        let mut c = random_smooth_field(basis, p, rng).into_coeffs();
        c[0] = 0.0;
        let f = SpectralField::from_parts(basis.clone(), c);
        f.scaled(((1.0 - p.alpha()) * volume / f.quadratic_form(p)).sqrt())
    };
    let cycle = (index - 1) / 4;
    match (index - 1) % 4 {
        0 => {
            let axis = cycle % n;
            let slot = stripe_slot(basis, axis);
            let mut c = SpectralField::constant(basis.clone(), 0.5).into_coeffs();
            c[slot] += (0.5 * volume).sqrt();
            let f = SpectralField::from_parts(basis.clone(), c);
            let noise = unit_noise(&mut rng);
            (StartKind::Stripe { axis, slot }, f.add_scaled(0.05, &noise))
        }
        1 if n >= 2 => {
            let angle: f64 = rng.random::<f64>() * 2.0 * PI / 3.0;
            let shift: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
            let raw = SpectralField::from_fn(basis.clone(), |x| {
                0.3 + (0..3)
                    .map(|j| {
                        let th = angle + 2.0 * PI * j as f64 / 3.0;
                        (th.cos() * (x[0] - shift[0]) + th.sin() * (x[1] - shift[1])).cos()
                    })
                    .sum::<f64>()
            });
            // Band-pass around the critical wavenumber to remove boundary ringing.
            let f = raw.map(|raw| {
                let mu = &basis.eigen_table().mu;
                let c = raw
                    .coeffs()
                    .iter()
                    .zip(mu)
                    .enumerate()
                    .map(|(j, (c, &m))| if j == 0 { *c } else { c * (-4.0 * (m - 1.0) * (m - 1.0)).exp() })
                    .collect();
                SpectralField::from_parts(basis.clone(), c)
            });
            (StartKind::ThreeWave { angle }, f)
        }
        _ => {
            let f = unit_noise(&mut rng);
            let one = SpectralField::constant(basis.clone(), 1.0);
            (StartKind::Noise, one.add_scaled(0.5, &f))
        }
    }
}

/// Single-axis mode with eigenvalue closest to 1.
fn stripe_slot(basis: &Basis, axis: usize) -> usize {
    let mu = &basis.eigen_table().mu;
    basis
        .modes()
        .iter()
        .enumerate()
        .filter(|(_, m)| {
            matches!(m.kind, ModeKind::Cosine | ModeKind::Cos)
                && m.index[axis] != 0
                && m.index.iter().enumerate().all(|(i, &k)| i == axis || k == 0)
        })
        .min_by(|a, b| (mu[a.0] - 1.0).abs().total_cmp(&(mu[b.0] - 1.0).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct NehariResult {
    #[serde(skip)]
    pub u: SpectralField,
    pub domain_kind: DomainKind,
    pub alpha: f64,
    pub beta: f64,
    pub energy: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "L")]
    pub l_value: f64,
    #[serde(rename = "H")]
    pub h_value: f64,
    pub nehari_residual: f64,
    pub gradient_residual: f64,
    pub converged: bool,
    pub ridge_end_flag: bool,
    pub best_start: usize,
    pub starts: Vec<StartReport>,
    pub inequalities: InequalityReport,
    pub irreducibility: IrreducibilityReport,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub history: Vec<IterationRecord>,
}

struct Run {
    report: StartReport,
    x: Option<Vec<f64>>,
    history: Vec<IterationRecord>,
}

fn run_start(
    obj: &ReducedFunctional<'_>,
    index: usize,
    kind: StartKind,
    start: Result<SpectralField>,
    sphere: &SphereOptions,
) -> Run {
    let discarded = |note: String, cls: Option<Classification>| Run {
        report: StartReport {
            index,
            start: kind.clone(),
            status: StartStatus::Discarded,
            initial_classification: cls,
            energy: None,
            residual: None,
            iterations: 0,
            note: Some(note),
        },
        x: None,
        history: Vec::new(),
    };
    let v = match start {
        Ok(v) if !v.is_zero() => v,
        Ok(_) => return discarded("zero start".into(), None),
        Err(e) => return discarded(e.to_string(), None),
    };
    let cls = FibrationData::from_moments(Moments::of(&v, &obj.params), &obj.params)
        .ok()
        .map(|f| f.classification);
    if cls != Some(Classification::NonMonotonous) {
        return discarded("start fibration is not non-monotonous".into(), cls);
    }
    let r = minimize_on_sphere(obj, obj.metric(), v.coeffs(), sphere);
    if r.reason == StopReason::InfeasibleStart {
        return discarded("start rejected by the objective".into(), cls);
    }
    let status = if r.converged() { StartStatus::Converged } else { StartStatus::NotConverged };
    Run {
        report: StartReport {
            index,
            start: kind,
            status,
            initial_classification: cls,
            energy: Some(r.value),
            residual: Some(r.residual),
            iterations: r.iterations,
            note: (r.reason != StopReason::Converged).then(|| format!("{:?}", r.reason)),
        },
        x: Some(r.x),
        history: r.history,
    }
}

/// Fibration class of every generated start direction, without optimizing.
pub fn classify_starts(basis: &Arc<Basis>, p: &Params, opts: &NehariOptions) -> Vec<StartReport> {
    (0..opts.starts)
        .map(|i| {
            let (start, f) = start_direction(basis, p, opts.seed, i);
            let (cls, note) = match f.and_then(|v| fibration_classify(&v, p)) {
                Ok(fib) => (Some(fib.classification), None),
                Err(e) => (None, Some(e.to_string())),
            };
            StartReport {
                index: i,
                start,
                status: StartStatus::Discarded,
                initial_classification: cls,
                energy: None,
                residual: None,
                iterations: 0,
                note,
            }
        })
        .collect()
}

/// Ridge energy `E[t̃v]` of a plateau bump. It bounds the ridge minimum from
/// above on every domain that contains the bump, whatever its size.
pub fn bump_energy_bound(basis: &Arc<Basis>, p: &Params, r: f64, inner: f64, outer: f64) -> Result<f64> {
    let v = crate::bump::build_plateau_bump_with(basis, r, inner, outer)?;
    Ok(crate::functionals::ridge_energy_formula(&v, p)?.direct)
}

/// Multistart ridge minimization.
pub fn minimize_ridge(basis: &Arc<Basis>, p: &Params, opts: &NehariOptions) -> Result<NehariResult> {
    minimize_ridge_with(basis, p, opts, None, &IrreducibilityOptions::default())
}

pub fn minimize_ridge_with(
    basis: &Arc<Basis>,
    p: &Params,
    opts: &NehariOptions,
    constants: Option<&SobolevValues>,
    irr: &IrreducibilityOptions,
) -> Result<NehariResult> {
    let obj = ReducedFunctional::new(basis, *p);
    let mut warnings = Vec::new();
    if let Some(s) = constants {
        let b0 = crate::equilibria::beta0(p, s.s3, s.s4);
        if p.beta() <= b0 {
            warnings.push(format!("beta = {} is not above the existence threshold {b0}", p.beta()));
        }
    }
    let mut jobs: Vec<(usize, StartKind, Result<SpectralField>)> = (0..opts.starts)
        .map(|i| {
            let (k, f) = start_direction(basis, p, opts.seed, i);
            (i, k, f)
        })
        .collect();
    for (j, f) in opts.extra_starts.iter().enumerate() {
        let f = if f.basis().same_as(basis) { Ok(f.clone()) } else { Err(NshError::BasisMismatch) };
        jobs.push((opts.starts + j, StartKind::Supplied { index: j }, f));
    }
    let runs: Vec<Run> = jobs
        .into_par_iter()
        .map(|(i, k, f)| run_start(&obj, i, k, f, &opts.sphere))
        .collect();

    let pick = |want: StartStatus| {
        runs.iter()
            .filter(|r| r.report.status == want)
            .min_by(|a, b| a.report.energy.unwrap().total_cmp(&b.report.energy.unwrap()))
    };
    let best = pick(StartStatus::Converged).or_else(|| pick(StartStatus::NotConverged));
    let Some(best) = best else {
        return Err(NshError::EmptyManifold { starts: runs.len() });
    };
    let x = best.x.clone().unwrap();
    let v = SpectralField::from_parts(basis.clone(), x);
    let (_, u) = ridge_project(&v, p)?;
    let m = Moments::of(&u, p);
    let converged = best.report.status == StartStatus::Converged;
    if !converged {
        warnings.push("no start met the stopping criteria; best unconverged run reported".into());
    }
    let ridge_end_flag = m.h_value(p) > -opts.h_tolerance * m.q;
    if ridge_end_flag {
        warnings.push("H[U] is not safely negative; U may sit at the end of the ridge".into());
    }
    let inequalities = verify_solution(&u, p, constants, opts.h_tolerance);
    let irreducibility = irreducibility_diagnostics(&u, p, irr)?;
    Ok(NehariResult {
        domain_kind: basis.domain().kind(),
        alpha: p.alpha(),
        beta: p.beta(),
        energy: m.energy(p),
        q: m.q,
        l_value: m.l_value(p),
        h_value: m.h_value(p),
        nehari_residual: m.l_value(p).abs() / m.q,
        gradient_residual: relative_gradient_residual(&u, p),
        converged,
        ridge_end_flag,
        best_start: best.report.index,
        starts: runs.iter().map(|r| r.report.clone()).collect(),
        inequalities,
        irreducibility,
        warnings,
        history: best.history.clone(),
        u,
    })
}
