//! Damped Newton, path continuation toward the real axis, and tanh-sinh
//! quadrature.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::AnalyticError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Step shrink factor used when a full step does not reduce the residual.
    pub damping: f64,
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// A square polynomial system in the unknowns `y`, depending on a point `z`
/// of the upper half-plane, whose solution determines a Cauchy transform.
pub trait ComplexSystem: Sync {
    fn dim(&self) -> usize;
    /// Residual entries, each divided by the magnitude of its terms.
    fn scaled_residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64>;
    fn residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64>;
    fn jacobian(&self, z: Complex64, y: &[Complex64]) -> DMatrix<Complex64>;
    /// Starting point for `|z|` large.
    fn seed(&self, z: Complex64) -> Vec<Complex64>;
    /// The Cauchy transform value carried by a solution.
    fn cauchy(&self, y: &[Complex64]) -> Complex64;
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub y: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

pub fn newton<S: ComplexSystem + ?Sized>(
    sys: &S,
    z: Complex64,
    start: &[Complex64],
    opts: &NewtonOptions,
) -> Result<NewtonResult, AnalyticError> {
    let mut y = start.to_vec();
    let mut res = max_norm(&sys.scaled_residual(z, &y));
    for it in 0..opts.max_iter {
        if res <= opts.tol {
            return Ok(NewtonResult {
                y,
                iterations: it,
                residual: res,
            });
        }
        let f = DVector::from_vec(sys.residual(z, &y));
        let Some(step) = sys.jacobian(z, &y).lu().solve(&f) else {
            return Err(AnalyticError::NonConvergence {
                iterations: it,
                residual: res,
            });
        };
        let mut t = 1.0;
        let mut best: Option<(Vec<Complex64>, f64)> = None;
        for _ in 0..40 {
            let trial: Vec<Complex64> = y.iter().zip(step.iter()).map(|(a, d)| a - d * t).collect();
            let r = max_norm(&sys.scaled_residual(z, &trial));
            if r.is_finite() && best.as_ref().is_none_or(|(_, b)| r < *b) {
                best = Some((trial, r));
            }
            if r < res {
                break;
            }
            t *= opts.damping;
        }
        match best {
            Some((trial, r)) => {
                y = trial;
                res = r;
            }
            None => {
                return Err(AnalyticError::NonConvergence {
                    iterations: it,
                    residual: res,
                })
            }
        }
    }
    if res <= opts.tol {
        Ok(NewtonResult {
            y,
            iterations: opts.max_iter,
            residual: res,
        })
    } else {
        Err(AnalyticError::NonConvergence {
            iterations: opts.max_iter,
            residual: res,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOptions {
    /// Imaginary parts, relative to `max(x, floor)`, at which `G` is recorded.
    pub eps_ladder: Vec<f64>,
    pub richardson: bool,
    pub newton: NewtonOptions,
    /// Imaginary part the path starts from.
    pub start_height: f64,
    /// Ratio between consecutive heights before any refinement.
    pub step_ratio: f64,
    /// Maximum number of step bisections at a suspected branch jump.
    pub max_refinements: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            eps_ladder: vec![1e-2, 1e-3, 1e-4],
            richardson: true,
            newton: NewtonOptions::default(),
            start_height: 1e3,
            step_ratio: 0.25,
            max_refinements: 12,
        }
    }
}

/// How the `ε → 0` limit was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMethod {
    /// Newton at the real point, started from the smallest `ε`.
    Polished,
    /// Linear extrapolation from the two smallest `ε`.
    Richardson,
    /// The value at the smallest `ε`.
    SmallestEps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValue {
    pub x: f64,
    /// `−Im G / π` in the limit.
    pub density: f64,
    /// `G(x + i0)` in the limit.
    pub cauchy: Complex64,
    /// `(ε, −Im G(x + iε·scale) / π)` along the ladder.
    pub ladder: Vec<(f64, f64)>,
    pub method: LimitMethod,
}

/// Checks a continuation step from height `old_h` to `new_h` against bounds
/// every Cauchy transform of a probability measure obeys: `Im G < 0`,
/// `|G| ≤ 1/η` and `|G'| ≤ 1/η²`.
fn jump_suspected(old: Complex64, new: Complex64, old_h: f64, new_h: f64) -> bool {
    let slack = 1.0 + 1e-6;
    new.im >= 0.0
        || new.norm() > slack / new_h
        || (new - old).norm() > slack * (1.0 / new_h - 1.0 / old_h) + 1e-12 * new.norm()
}

/// Follows the physical solution from `x + i·start_height` straight down to
/// the real point `x`, recording `G` at each ladder height.
pub fn boundary_value<S: ComplexSystem + ?Sized>(
    sys: &S,
    x: f64,
    opts: &ContinuationOptions,
) -> Result<BoundaryValue, AnalyticError> {
    let scale = x.abs().max(1e-300);
    if !opts.eps_ladder.iter().any(|&e| e > 0.0) {
        return Err(AnalyticError::EmptyLadder);
    }
    let mut ladder: Vec<f64> = opts.eps_ladder.iter().copied().filter(|&e| e > 0.0).collect();
    ladder.sort_by(|a, b| b.total_cmp(a));
    let top = opts.start_height.max(10.0 * x.abs());
    let z0 = Complex64::new(x, top);
    let mut y = newton(sys, z0, &sys.seed(z0), &opts.newton)?.y;
    let g0 = sys.cauchy(&y);
    if g0.im >= 0.0 || g0.norm() > (1.0 + 1e-6) / top {
        return Err(AnalyticError::BranchJump { x, height: top });
    }
    let mut eta = top;
    let mut records = Vec::with_capacity(ladder.len());
    let mut ys = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let target = eps * scale;
        while eta > target {
            let mut ratio = opts.step_ratio;
            let mut refinements = 0;
            loop {
                let next = (eta * ratio).max(target);
                let z = Complex64::new(x, next);
                let attempt = newton(sys, z, &y, &opts.newton);
                // slow convergence is tolerated only after a few refinements
                let ok = match &attempt {
                    Ok(r) => {
                        (r.iterations <= 30 || refinements >= 3)
                            && !jump_suspected(sys.cauchy(&y), sys.cauchy(&r.y), eta, next)
                    }
                    Err(_) => false,
                };
                if ok {
                    y = attempt.unwrap().y;
                    eta = next;
                    break;
                }
                refinements += 1;
                if refinements > opts.max_refinements {
                    return match attempt {
                        Err(e) => Err(e),
                        Ok(_) => Err(AnalyticError::BranchJump { x, height: next }),
                    };
                }
                ratio = ratio.sqrt();
            }
        }
        let g = sys.cauchy(&y);
        records.push((eps, -g.im / std::f64::consts::PI));
        ys.push(y.clone());
    }

    let last_y = ys.last().expect("non-empty ladder");
    let g_last = sys.cauchy(last_y);
    let richardson = if opts.richardson && records.len() >= 2 {
        let n = records.len();
        let (e1, d1) = records[n - 2];
        let (e2, d2) = records[n - 1];
        Some((e1 * d2 - e2 * d1) / (e1 - e2))
    } else {
        None
    };
    let polished = newton(sys, Complex64::new(x, 0.0), last_y, &opts.newton).ok();
    if let Some(p) = polished {
        let g0 = sys.cauchy(&p.y);
        let close = (g0 - g_last).norm() <= 0.05 * g_last.norm() + 1e-12;
        if close && g0.im <= 1e-12 * g0.norm() {
            return Ok(BoundaryValue {
                x,
                density: (-g0.im / std::f64::consts::PI).max(0.0),
                cauchy: Complex64::new(g0.re, g0.im.min(0.0)),
                ladder: records,
                method: LimitMethod::Polished,
            });
        }
    }
    let (density, method) = match richardson {
        Some(d) => (d.max(0.0), LimitMethod::Richardson),
        None => (records.last().unwrap().1.max(0.0), LimitMethod::SmallestEps),
    };
    Ok(BoundaryValue {
        x,
        density,
        cauchy: g_last,
        ladder: records,
        method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub values: Vec<f64>,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub evaluations: usize,
}

/// Tanh-sinh quadrature of a vector-valued integrand on `[a, b]`.
///
/// Nodes are measured from the nearer endpoint, so points very close to an
/// endpoint keep full relative accuracy; the integrand is never called at the
/// endpoints themselves. Levels halve the step until successive estimates
/// agree to `tol` (relative to the largest component) or `max_level` is hit.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64, max_level: usize) -> Quadrature
where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    const T_MAX: f64 = 4.5;
    let half = std::f64::consts::FRAC_PI_2;
    let width = b - a;
    let node = |t: f64| -> Option<(f64, f64)> {
        let u = half * t.sinh();
        let w = half * t.cosh() / u.cosh().powi(2) * width / 2.0;
        // distance from the nearer endpoint, without cancellation
        let d = width / (1.0 + (2.0 * u.abs()).exp());
        let x = if t < 0.0 { a + d } else { b - d };
        (d > 0.0 && w > 0.0 && x > a && x < b).then_some((x, w))
    };
    let eval_sum = |ts: Vec<f64>| -> (Vec<f64>, usize) {
        let pts: Vec<(f64, f64)> = ts.into_iter().filter_map(node).collect();
        let vals: Vec<Vec<f64>> = pts.par_iter().map(|&(x, _)| f(x)).collect();
        let mut sum: Vec<f64> = Vec::new();
        for ((_, w), v) in pts.iter().zip(&vals) {
            if sum.is_empty() {
                sum = vec![0.0; v.len()];
            }
            for (s, vi) in sum.iter_mut().zip(v) {
                *s += w * vi;
            }
        }
        (sum, pts.len())
    };

    let mut h = 0.5;
    let n0 = (T_MAX / h) as i64;
    let (mut acc, mut evals) = eval_sum((-n0..=n0).map(|k| k as f64 * h).collect());
    let mut estimate: Vec<f64> = acc.iter().map(|s| s * h).collect();
    let mut error = f64::INFINITY;
    for _ in 1..=max_level {
        h /= 2.0;
        let n = (T_MAX / h) as i64;
        let (new, ev) = eval_sum((-n..=n).filter(|k| k % 2 != 0).map(|k| k as f64 * h).collect());
        evals += ev;
        if acc.is_empty() {
            acc = new;
        } else {
            for (s, v) in acc.iter_mut().zip(&new) {
                *s += v;
            }
        }
        let next: Vec<f64> = acc.iter().map(|s| s * h).collect();
        let scale = next.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        error = next
            .iter()
            .zip(&estimate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        estimate = next;
        if error <= tol * scale {
            break;
        }
    }
    Quadrature {
        values: estimate,
        error,
        evaluations: evals,
    }
}

pub fn tanh_sinh_scalar<F>(f: F, a: f64, b: f64, tol: f64, max_level: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync,
{
    let q = tanh_sinh(|x| vec![f(x)], a, b, tol, max_level);
    (q.values.first().copied().unwrap_or(0.0), q.error)
}
