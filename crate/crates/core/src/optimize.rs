//! Nonlinear conjugate gradients on an ellipsoid `Σ w_j x_j² = 1`.
//!
//! The objectives minimized here are homogeneous of degree zero, so every
//! ray is a single point; optimizing on the ellipsoid removes that flat
//! direction. The metric `w` also acts as a diagonal preconditioner.

use serde::{Deserialize, Serialize};

/// One evaluation of an objective.
#[derive(Clone, Debug)]
pub struct Eval {
    pub value: f64,
    /// Gradient in plain coefficient coordinates.
    pub grad: Vec<f64>,
    /// Stationarity measure used by the stopping test.
    pub residual: f64,
}

pub trait SphereObjective {
    /// `None` marks the point as infeasible (treated as `+∞`).
    fn eval(&self, x: &[f64]) -> Option<Eval>;
}

impl<F: Fn(&[f64]) -> Option<Eval>> SphereObjective for F {
    fn eval(&self, x: &[f64]) -> Option<Eval> {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereOptions {
    pub max_iter: usize,
    /// Relative decrease over `window` iterations below which the run is stalled.
    pub window: usize,
    pub decrease_tol: f64,
    /// A stall only counts as convergence if the residual is below this.
    pub residual_tol: f64,
    /// Keep per-iteration records.
    pub record: bool,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            window: 25,
            decrease_tol: 1e-12,
            residual_tol: 1e-6,
            record: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub value: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// No descent step could be found and the residual is still large.
    LineSearchFailed,
    InfeasibleStart,
}

#[derive(Clone, Debug)]
pub struct SphereResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub reason: StopReason,
    pub history: Vec<IterationRecord>,
}

impl SphereResult {
    pub fn converged(&self) -> bool {
        self.reason == StopReason::Converged
    }
}

fn wdot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

fn normalize(w: &[f64], x: &mut [f64]) -> bool {
    let n = wdot(w, x, x).sqrt();
    if !(n.is_finite() && n > 0.0) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

/// Remove the component along `x` in the `w` metric.
fn to_tangent(w: &[f64], x: &[f64], d: &mut [f64]) {
    let c = wdot(w, x, d);
    d.iter_mut().zip(x).for_each(|(d, x)| *d -= c * x);
}

/// Minimize `obj` over `{x : Σ w x² = 1}` starting from `x0` (which is rescaled).
pub fn minimize_on_sphere(
    obj: &impl SphereObjective,
    w: &[f64],
    x0: &[f64],
    opts: &SphereOptions,
) -> SphereResult {
    let mut x = x0.to_vec();
    let fail = |x: Vec<f64>| SphereResult {
        x,
        value: f64::INFINITY,
        residual: f64::INFINITY,
        iterations: 0,
        reason: StopReason::InfeasibleStart,
        history: Vec::new(),
    };
    if !normalize(w, &mut x) {
        return fail(x);
    }
    let Some(mut cur) = obj.eval(&x) else {
        return fail(x);
    };

    let mut history = Vec::new();
    let mut values = vec![cur.value];
    let mut prev_value: Option<f64> = None;
    let mut prev_pg: Option<Vec<f64>> = None;
    let mut prev_gnorm2 = 0.0;
    let mut dir: Vec<f64> = Vec::new();
    let mut last_slope = 0.0;
    let mut last_step = 0.0;
    let mut reason = StopReason::MaxIterations;
    let mut iter = 0;

    if opts.record {
        history.push(IterationRecord { iter: 0, value: cur.value, residual: cur.residual, step: 0.0 });
    }

    while iter < opts.max_iter {
        // Preconditioned tangent gradient.
        let mut pg: Vec<f64> = cur.grad.iter().zip(w).map(|(g, w)| g / w).collect();
        to_tangent(w, &x, &mut pg);
        let gnorm2 = wdot(w, &pg, &pg);
        if gnorm2 == 0.0 {
            reason = StopReason::Converged;
            break;
        }

        // Polak–Ribière+ with automatic restart.
        let mut d: Vec<f64> = pg.iter().map(|g| -g).collect();
        if let Some(ppg) = &prev_pg {
            let mut diff: Vec<f64> = pg.iter().zip(ppg).map(|(a, b)| a - b).collect();
            to_tangent(w, &x, &mut diff);
            let beta = (wdot(w, &pg, &diff) / prev_gnorm2).max(0.0);
            if beta > 0.0 && !dir.is_empty() {
                let mut old = dir.clone();
                to_tangent(w, &x, &mut old);
                d.iter_mut().zip(&old).for_each(|(d, o)| *d += beta * o);
            }
        }
        let mut slope = wdot(w, &pg, &d);
        if !(slope < 0.0) {
            d = pg.iter().map(|g| -g).collect();
            slope = -gnorm2;
        }
        let dnorm = wdot(w, &d, &d).sqrt();

        let mut tau = match prev_value {
            Some(pv) if last_slope < 0.0 => {
                let guess = 2.02 * (cur.value - pv) / slope;
                let alt = last_step * last_slope / slope;
                let g = if guess.is_finite() && guess > 0.0 { guess } else { alt };
                g.max(1e-3 * alt)
            }
            _ => 0.1 / dnorm,
        };
        tau = tau.min(1.0 / dnorm);
        if !(tau.is_finite() && tau > 0.0) {
            tau = 0.1 / dnorm;
        }

        let mut accepted: Option<(Vec<f64>, Eval, f64)> = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(x, d)| x + tau * d).collect();
            if normalize(w, &mut trial) {
                if let Some(e) = obj.eval(&trial) {
                    if e.value <= cur.value + 1e-4 * tau * slope {
                        accepted = Some((trial, e, tau));
                        break;
                    }
                    // Approximate Wolfe test for steps lost in rounding of the value.
                    let new_slope: f64 = e.grad.iter().zip(&d).map(|(g, d)| g * d).sum();
                    if e.value <= cur.value
                        && new_slope >= 0.9 * slope
                        && new_slope <= -0.9998 * slope
                    {
                        accepted = Some((trial, e, tau));
                        break;
                    }
                    let denom = 2.0 * (e.value - cur.value - slope * tau);
                    let q = if denom > 0.0 { -slope * tau * tau / denom } else { 0.5 * tau };
                    tau = q.clamp(0.1 * tau, 0.5 * tau);
                    continue;
                }
            }
            tau *= 0.5;
        }

        let Some((nx, ne, step)) = accepted else {
            if prev_pg.is_some() {
                // Retry once from steepest descent.
                prev_pg = None;
                prev_value = None;
                dir.clear();
                continue;
            }
            reason = if cur.residual <= opts.residual_tol {
                StopReason::Converged
            } else {
                StopReason::LineSearchFailed
            };
            break;
        };

        iter += 1;
        prev_value = Some(cur.value);
        prev_pg = Some(pg);
        prev_gnorm2 = gnorm2;
        last_slope = slope;
        last_step = step;
        dir = d;
        x = nx;
        cur = ne;
        values.push(cur.value);
        if opts.record {
            history.push(IterationRecord { iter, value: cur.value, residual: cur.residual, step });
        }

        if cur.residual <= opts.residual_tol && values.len() > opts.window {
            let old = values[values.len() - 1 - opts.window];
            let decrease = old - cur.value;
            if decrease <= opts.decrease_tol * cur.value.abs().max(f64::MIN_POSITIVE) {
                reason = StopReason::Converged;
                break;
            }
        }
    }

    SphereResult {
        x,
        value: cur.value,
        residual: cur.residual,
        iterations: iter,
        reason,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rayleigh quotient `xᵀAx / xᵀx` with diagonal `A`: the minimum is the smallest entry.
    fn rayleigh(a: Vec<f64>) -> impl Fn(&[f64]) -> Option<Eval> {
        move |x: &[f64]| {
            let n: f64 = x.iter().map(|v| v * v).sum();
            let num: f64 = x.iter().zip(&a).map(|(v, a)| a * v * v).sum();
            let r = num / n;
            let grad: Vec<f64> = x.iter().zip(&a).map(|(v, a)| 2.0 * (a - r) * v / n).collect();
            let residual = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            Some(Eval { value: r, grad, residual })
        }
    }

    #[test]
    fn finds_smallest_eigenvalue() {
        let a: Vec<f64> = (0..20).map(|i| 1.0 + (i as f64 - 7.0).powi(2)).collect();
        let w = vec![1.0; 20];
        let x0: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * i as f64).collect();
        let opts = SphereOptions { residual_tol: 1e-7, decrease_tol: 1e-13, ..Default::default() };
        let r = minimize_on_sphere(&rayleigh(a), &w, &x0, &opts);
        assert!(r.converged(), "{:?}", r.reason);
        assert!((r.value - 1.0).abs() < 1e-10);
        let n: f64 = r.x.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn values_never_increase() {
        let a: Vec<f64> = (0..10).map(|i| (i as f64 + 1.0).sqrt()).collect();
        let r = minimize_on_sphere(&rayleigh(a), &[1.0; 10], &[1.0; 10], &SphereOptions::default());
        for pair in r.history.windows(2) {
            assert!(pair[1].value <= pair[0].value);
        }
    }

    #[test]
    fn infeasible_start_is_reported() {
        let obj = |_: &[f64]| None;
        let r = minimize_on_sphere(&obj, &[1.0; 3], &[1.0, 0.0, 0.0], &SphereOptions::default());
        assert_eq!(r.reason, StopReason::InfeasibleStart);
        let r = minimize_on_sphere(&rayleigh(vec![1.0; 3]), &[1.0; 3], &[0.0; 3], &SphereOptions::default());
        assert_eq!(r.reason, StopReason::InfeasibleStart);
    }
}
