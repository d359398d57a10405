//! Unconstrained minimization: limited-memory BFGS or steepest descent,
//! both driven by a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Lbfgs,
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub method: Method,
    /// Correction pairs kept by L-BFGS.
    pub history: usize,
    pub max_iterations: usize,
    /// Stop once the gradient's Euclidean norm falls to this value.
    pub gradient_tolerance: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            method: Method::Lbfgs,
            history: 10,
            max_iterations: 500,
            gradient_tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    /// No step along the search direction decreased the function enough;
    /// usually the optimum has been reached to machine precision.
    LineSearchFailed,
}

/// State after one accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Trial {
    step: f64,
    value: f64,
    slope: f64,
    x: Vec<f64>,
    gradient: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;
const CURVATURE: f64 = 0.9;
const MAX_EVALUATIONS: usize = 40;

/// Finds a step along `direction` satisfying the strong Wolfe conditions,
/// or failing that the best Armijo-satisfying step seen.
fn line_search<F>(f: &mut F, x: &[f64], value: f64, gradient: &[f64], direction: &[f64], initial: f64) -> Option<Trial>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let slope0 = dot(gradient, direction);
    if slope0 >= 0.0 || !slope0.is_finite() {
        return None;
    }
    let mut evaluate = |step: f64| {
        let point: Vec<f64> = x.iter().zip(direction).map(|(xi, di)| xi + step * di).collect();
        let (v, g) = f(&point);
        let v = if v.is_finite() { v } else { f64::INFINITY };
        Trial {
            step,
            value: v,
            slope: dot(&g, direction),
            x: point,
            gradient: g,
        }
    };
    let sufficient = |t: &Trial| t.value <= value + ARMIJO * t.step * slope0;
    let curvature = |t: &Trial| t.slope.abs() <= -CURVATURE * slope0;

    let origin = Trial {
        step: 0.0,
        value,
        slope: slope0,
        x: x.to_vec(),
        gradient: gradient.to_vec(),
    };
    let mut prev = origin;
    let mut step = initial;
    let mut evaluations = 0;
    let (mut lo, mut hi) = loop {
        let trial = evaluate(step);
        evaluations += 1;
        if !sufficient(&trial) || (prev.step > 0.0 && trial.value >= prev.value) {
            break (prev, trial);
        }
        if curvature(&trial) {
            return Some(trial);
        }
        if trial.slope >= 0.0 {
            break (trial, prev);
        }
        if evaluations >= MAX_EVALUATIONS {
            return Some(trial);
        }
        step *= 2.0;
        prev = trial;
    };

    // Zoom: `lo` satisfies Armijo with the lowest value so far.
    while evaluations < MAX_EVALUATIONS {
        let (a, b) = (lo.step, hi.step);
        let width = (b - a).abs();
        if width <= 1e-16 * a.abs().max(1.0) {
            break;
        }
        // Minimizer of the quadratic through lo's value and slope and hi's value.
        let denom = 2.0 * (hi.value - lo.value - lo.slope * (b - a));
        let mut candidate = if denom.is_finite() && denom > 0.0 {
            a - lo.slope * (b - a) * (b - a) / denom
        } else {
            0.5 * (a + b)
        };
        let (min, max) = (a.min(b), a.max(b));
        if !(min + 0.1 * width..=max - 0.1 * width).contains(&candidate) {
            candidate = 0.5 * (a + b);
        }
        let trial = evaluate(candidate);
        evaluations += 1;
        if !sufficient(&trial) || trial.value >= lo.value {
            hi = trial;
        } else {
            if curvature(&trial) {
                return Some(trial);
            }
            if trial.slope * (hi.step - lo.step) >= 0.0 {
                hi = lo;
            }
            lo = trial;
        }
    }
    (lo.step > 0.0).then_some(lo)
}

/// Minimizes `f`, which returns the value and gradient at a point.
/// `observer` sees every accepted iteration.
pub fn minimize<F, O>(mut f: F, x0: Vec<f64>, options: &MinimizeOptions, mut observer: O) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
    O: FnMut(&Progress),
{
    let mut x = x0;
    let (mut value, mut gradient) = f(&x);
    let mut gradient_norm = norm(&gradient);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut last_step = 1.0;

    for iteration in 0..options.max_iterations {
        if gradient_norm <= options.gradient_tolerance {
            return Minimum {
                x,
                value,
                gradient_norm,
                iterations: iteration,
                stop: StopReason::GradientTolerance,
            };
        }

        let (direction, initial) = match options.method {
            Method::Lbfgs if !history.is_empty() => (lbfgs_direction(&gradient, &history), 1.0),
            Method::Lbfgs => (gradient.iter().map(|g| -g).collect(), 1.0 / gradient_norm),
            Method::GradientDescent => {
                let initial = if iteration == 0 {
                    1.0 / gradient_norm
                } else {
                    2.0 * last_step
                };
                (gradient.iter().map(|g| -g).collect(), initial)
            }
        };

        let Some(trial) = line_search(&mut f, &x, value, &gradient, &direction, initial) else {
            return Minimum {
                x,
                value,
                gradient_norm,
                iterations: iteration,
                stop: StopReason::LineSearchFailed,
            };
        };

        if options.method == Method::Lbfgs {
            let s: Vec<f64> = trial.x.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = trial.gradient.iter().zip(&gradient).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * norm(&s) * norm(&y) {
                if history.len() == options.history.max(1) {
                    history.pop_front();
                }
                history.push_back((s, y, 1.0 / sy));
            }
        }

        last_step = trial.step;
        x = trial.x;
        value = trial.value;
        gradient = trial.gradient;
        gradient_norm = norm(&gradient);
        observer(&Progress {
            iteration: iteration + 1,
            value,
            gradient_norm,
            step: trial.step,
        });
    }

    let stop = if gradient_norm <= options.gradient_tolerance {
        StopReason::GradientTolerance
    } else {
        StopReason::MaxIterations
    };
    Minimum {
        x,
        value,
        gradient_norm,
        iterations: options.max_iterations,
        stop,
    }
}

/// Two-loop recursion: `-H g` with the scaled-identity initial Hessian.
fn lbfgs_direction(gradient: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = gradient.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    let (s, y, _) = history.back().expect("non-empty history");
    let gamma = dot(s, y) / dot(y, y);
    for qi in q.iter_mut() {
        *qi *= gamma;
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}
