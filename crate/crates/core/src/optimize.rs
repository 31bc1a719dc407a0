//! BFGS with a strong-Wolfe line search and seeded multi-start.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use crate::random::{seeded, uniform_params};
use crate::{Error, Result};

/// A scalar cost over real parameters.
///
/// The default gradient is a central finite difference; implementors with
/// a cheaper route override [`Objective::cost_and_gradient`].
pub trait Objective {
    fn cost(&self, x: &[f64]) -> f64;

    /// Returns `f(x)` and writes `∇f(x)` into `grad`.
    fn cost_and_gradient(&self, x: &[f64], step: f64, grad: &mut [f64]) -> f64 {
        central_difference(|p| self.cost(p), x, step, grad);
        self.cost(x)
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for F {
    fn cost(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// `grad_i = (f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64, grad: &mut [f64]) {
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + step;
        let fp = f(&p);
        p[i] = x[i] - step;
        let fm = f(&p);
        p[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * step);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptOptions {
    /// Stop when `‖∇f‖_∞` falls below this.
    pub gtol: f64,
    pub max_iter: usize,
    /// Finite-difference step.
    pub fd_step: f64,
    /// Total number of starts, the first being the caller's initial point.
    pub restarts: usize,
    /// Half-width of the uniform initial distribution.
    pub init_scale: f64,
    /// Half-width of the uniform distribution for later starts.
    pub restart_scale: f64,
    pub seed: u64,
    /// Skip remaining starts once a run reaches this cost.
    pub target_cost: Option<f64>,
    /// Cap on `‖Δθ‖_∞` per line-search trial.
    pub max_step: Option<f64>,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            max_iter: 2000,
            fd_step: 1e-6,
            restarts: 5,
            init_scale: 0.1,
            restart_scale: core::f64::consts::PI,
            seed: 0,
            target_cost: None,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost after each accepted step of the winning run, starting with the
    /// initial cost.
    pub cost_history: Vec<f64>,
}

/// Starting points for every start: the first drawn from
/// `(−init_scale, init_scale)`, the rest from `(−restart_scale, restart_scale)`,
/// each from its own seeded stream.
pub fn restart_inits(n: usize, opts: &OptOptions) -> Vec<Vec<f64>> {
    (0..opts.restarts.max(1))
        .map(|k| {
            let scale = if k == 0 { opts.init_scale } else { opts.restart_scale };
            let mut rng = seeded(opts.seed.wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            uniform_params(&mut rng, n, scale)
        })
        .collect()
}

/// Multi-start BFGS. The first start is `init`; later starts are the seeded
/// draws of [`restart_inits`]. Returns the best run.
pub fn minimize<O: Objective + ?Sized>(obj: &O, init: &[f64], opts: &OptOptions) -> Result<OptResult> {
    let mut inits = restart_inits(init.len(), opts);
    inits[0] = init.to_vec();
    let mut best: Option<OptResult> = None;
    for x0 in inits {
        let run = minimize_from(obj, &x0, opts)?;
        let done = opts.target_cost.is_some_and(|t| run.best_cost <= t);
        if best.as_ref().is_none_or(|b| run.best_cost < b.best_cost) {
            best = Some(run);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one start"))
}

/// Pick the best of several finished runs (ties go to the earliest).
pub fn best_of(runs: Vec<OptResult>) -> Option<OptResult> {
    runs.into_iter().reduce(|a, b| if b.best_cost < a.best_cost { b } else { a })
}

/// Single-start BFGS.
pub fn minimize_from<O: Objective + ?Sized>(obj: &O, init: &[f64], opts: &OptOptions) -> Result<OptResult> {
    minimize_observed(obj, init, opts, &mut |_, _| {})
}

/// [`minimize_from`], calling `on_step(params, cost)` at the start point and
/// after every accepted step.
pub fn minimize_observed<O: Objective + ?Sized>(
    obj: &O,
    init: &[f64],
    opts: &OptOptions,
    on_step: &mut dyn FnMut(&[f64], f64),
) -> Result<OptResult> {
    let n = init.len();
    let mut x = init.to_vec();
    let mut g = vec![0.0; n];
    let mut f = obj.cost_and_gradient(&x, opts.fd_step, &mut g);
    check_finite(f, 0)?;
    on_step(&x, f);
    let mut history = vec![f];
    if n == 0 {
        return Ok(OptResult { best_params: x, best_cost: f, iterations: 0, converged: true, cost_history: history });
    }
    let mut h = identity(n);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if inf_norm(&g) < opts.gtol {
            converged = true;
            break;
        }
        let mut p = mat_vec(&h, &g);
        p.iter_mut().for_each(|v| *v = -*v);
        if dot(&p, &g) >= 0.0 {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
        }
        let mut alpha0 = if fresh { (1.0 / inf_norm(&g)).min(1.0) } else { 1.0 };
        let mut alpha_max = f64::INFINITY;
        if let Some(cap) = opts.max_step {
            alpha_max = cap / inf_norm(&p);
            alpha0 = alpha0.min(alpha_max);
        }
        let step = line_search(obj, &x, f, &g, &p, alpha0, alpha_max, opts.fd_step, iterations)?;
        let Some((alpha, f_new, g_new)) = step else {
            if fresh {
                break;
            }
            h = identity(n);
            fresh = true;
            continue;
        };
        iterations += 1;
        let s: Vec<f64> = p.iter().map(|v| alpha * v).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        x.iter_mut().zip(&s).for_each(|(xi, si)| *xi += si);
        let decreased = f_new < f;
        f = f_new;
        g = g_new;
        history.push(f);
        on_step(&x, f);
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if fresh {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &s, &y, sy);
            fresh = false;
        }
        if !decreased && inf_norm(&s) == 0.0 {
            break;
        }
    }
    Ok(OptResult { best_params: x, best_cost: f, iterations, converged, cost_history: history })
}

fn check_finite(f: f64, iteration: usize) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteCost { value: f, iteration })
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

type Trial = (f64, f64, Vec<f64>);

/// Strong-Wolfe line search (bracketing then zoom). `None` when no
/// acceptable step is found.
#[allow(clippy::too_many_arguments)]
fn line_search<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    p: &[f64],
    alpha0: f64,
    alpha_max: f64,
    fd_step: f64,
    iteration: usize,
) -> Result<Option<Trial>> {
    let d0 = dot(g0, p);
    let eval = |alpha: f64| -> Result<(f64, f64, Vec<f64>)> {
        let xt: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + alpha * b).collect();
        let mut g = vec![0.0; x.len()];
        let f = obj.cost_and_gradient(&xt, fd_step, &mut g);
        check_finite(f, iteration)?;
        let d = dot(&g, p);
        Ok((f, d, g))
    };
    let mut prev: (f64, f64, f64) = (0.0, f0, d0);
    let mut alpha = alpha0;
    for i in 0..30 {
        let (f, d, g) = eval(alpha)?;
        if f > f0 + C1 * alpha * d0 || (i > 0 && f >= prev.1) {
            return zoom(&eval, f0, d0, prev, (alpha, f, d));
        }
        if d.abs() <= -C2 * d0 {
            return Ok(Some((alpha, f, g)));
        }
        if d >= 0.0 {
            return zoom(&eval, f0, d0, (alpha, f, d), prev);
        }
        if alpha >= alpha_max {
            return Ok(Some((alpha, f, g)));
        }
        prev = (alpha, f, d);
        alpha = (2.0 * alpha).min(alpha_max);
    }
    Ok(None)
}

fn zoom(
    eval: &dyn Fn(f64) -> Result<(f64, f64, Vec<f64>)>,
    f0: f64,
    d0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
) -> Result<Option<Trial>> {
    for _ in 0..40 {
        let alpha = interpolate(lo, hi);
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1.0) {
            break;
        }
        let (f, d, g) = eval(alpha)?;
        if f > f0 + C1 * alpha * d0 || f >= lo.1 {
            hi = (alpha, f, d);
        } else {
            if d.abs() <= -C2 * d0 {
                return Ok(Some((alpha, f, g)));
            }
            if d * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, f, d);
        }
    }
    // Accept the best sufficient-decrease point if Wolfe curvature never held.
    if lo.0 > 0.0 && lo.1 < f0 {
        let (f, _, g) = eval(lo.0)?;
        return Ok(Some((lo.0, f, g)));
    }
    Ok(None)
}

/// Cubic interpolation minimizer between two points, safeguarded to the
/// middle 80% of the bracket.
fn interpolate(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (x0, f0, d0) = a;
    let (x1, f1, d1) = b;
    let lo = x0.min(x1);
    let hi = x0.max(x1);
    let width = hi - lo;
    let d1c = d0 + d1 - 3.0 * (f0 - f1) / (x0 - x1);
    let disc = d1c * d1c - d0 * d1;
    let mid = 0.5 * (lo + hi);
    if !(disc >= 0.0) {
        return mid;
    }
    let d2 = (x1 - x0).signum() * disc.sqrt();
    let t = x1 - (x1 - x0) * (d1 + d2 - d1c) / (d1 - d0 + 2.0 * d2);
    if t.is_finite() && t > lo + 0.1 * width && t < hi - 0.1 * width {
        t
    } else {
        mid
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64]) -> Vec<f64> {
    h.chunks_exact(v.len()).map(|row| dot(row, v)).collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`, `ρ = 1 / yᵀs`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates;
    use crate::qcore::StateVector;

    fn single(opts: OptOptions) -> OptOptions {
        OptOptions { restarts: 1, ..opts }
    }

    #[test]
    fn quadratic_from_three() {
        let r = minimize(&|x: &[f64]| x[0] * x[0], &[3.0], &single(OptOptions::default())).unwrap();
        assert!(r.best_params[0].abs() < 1e-6);
        assert!(r.best_cost < 1e-12);
    }

    #[test]
    fn ry_overlap_returns_to_zero() {
        let cost = |x: &[f64]| {
            let s = gates::ry(x[0]).apply(&StateVector::zero(1)).unwrap();
            1.0 - s.amplitudes()[0].norm_sqr()
        };
        let r = minimize(&cost, &[0.3], &single(OptOptions::default())).unwrap();
        let theta = r.best_params[0].rem_euclid(4.0 * core::f64::consts::PI);
        let dist = theta.min(4.0 * core::f64::consts::PI - theta);
        assert!(dist < 1e-4, "θ = {theta}");
        assert!(r.best_cost < 1e-10);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(&f, &[-1.0, 1.0], &single(OptOptions::default())).unwrap();
        assert!(r.best_cost < 1e-8, "cost {}", r.best_cost);
    }

    #[test]
    fn history_is_monotone() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2) + x[2].powi(4);
        let r = minimize_from(&f, &[-1.2, 1.0, 0.5], &OptOptions::default()).unwrap();
        assert!(r.cost_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*r.cost_history.last().unwrap(), r.best_cost);
        assert!((f(&r.best_params) - r.best_cost).abs() < 1e-10);
    }

    #[test]
    fn non_finite_cost_aborts() {
        let f = |x: &[f64]| if x[0] < 0.5 { f64::NAN } else { x[0] };
        assert!(matches!(minimize_from(&f, &[0.0], &OptOptions::default()), Err(Error::NonFiniteCost { .. })));
    }

    #[test]
    fn restarts_escape_local_minimum() {
        // Double well with the deeper minimum near x = −2.
        let f = |x: &[f64]| (x[0] * x[0] - 4.0).powi(2) / 16.0 + 0.3 * x[0] + 0.6;
        let one = minimize(&f, &[1.0], &single(OptOptions::default())).unwrap();
        let many = minimize(&f, &[1.0], &OptOptions { restart_scale: 3.0, seed: 2, ..OptOptions::default() }).unwrap();
        assert!(one.best_params[0] > 0.0);
        assert!(many.best_params[0] < 0.0);
        assert!(many.best_cost < one.best_cost);
    }

    #[test]
    fn restart_inits_are_reproducible() {
        let opts = OptOptions { seed: 9, ..OptOptions::default() };
        assert_eq!(restart_inits(4, &opts), restart_inits(4, &opts));
        assert!(restart_inits(4, &opts)[0].iter().all(|v| v.abs() < 0.1));
    }
}
