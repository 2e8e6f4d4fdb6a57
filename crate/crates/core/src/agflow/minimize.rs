use super::energy::{StreamEnergy, StreamFunction};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Schedule and optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub eps_start: f64,
    pub eps_factor: f64,
    pub eps_count: usize,
    pub max_iter: usize,
    /// Stop when `‖∇E‖ / √(cell area)` falls below this.
    pub grad_tol: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Step shrink factor in `(0, 1)`.
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Number of stored curvature pairs; 0 gives plain gradient descent.
    pub memory: usize,
    /// Initial noise amplitude in units of the cell size.
    pub noise: f64,
    pub seed: u64,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            eps_start: 0.2,
            eps_factor: 0.5,
            eps_count: 5,
            max_iter: 10000,
            grad_tol: 1e-6,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            memory: 16,
            noise: 0.01,
            seed: 1,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.eps_start > 0.0 && self.eps_start.is_finite()) {
            return bad("eps_start must be positive");
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0) {
            return bad("eps_factor must lie in (0, 1) so the schedule decreases");
        }
        if self.eps_count == 0 {
            return bad("eps_count must be at least 1");
        }
        if !(self.grad_tol > 0.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("tolerances must be positive and armijo below 1");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || self.max_backtracks == 0 {
            return bad("backtrack must lie in (0, 1) with at least one trial");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise must be nonnegative");
        }
        Ok(())
    }

    /// `ε_k = eps_start · eps_factor^k`.
    pub fn schedule(&self) -> Vec<f64> {
        (0..self.eps_count).map(|k| self.eps_start * self.eps_factor.powi(k as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    GradientTolerance,
    IterationCap,
    /// No trial step lowered the energy; it sits at rounding level.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub stream: StreamFunction,
    /// Initial state followed by every accepted step.
    pub trace: Vec<TraceStep>,
    pub stop: StopReason,
}

impl MinimizeOutcome {
    pub fn energy(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.energy)
    }

    pub fn grad_norm(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.grad_norm)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L-BFGS descent on the free values of `u0` at fixed `ε`.
///
/// Every accepted step strictly lowers the energy and satisfies the Armijo
/// condition; a direction that is not a descent direction resets the memory.
pub fn minimize_stream(u0: &StreamFunction, eps: f64, config: &MinimizeConfig) -> Result<MinimizeOutcome> {
    config.validate()?;
    let f = StreamEnergy::new(u0, eps)?;
    let scale = f.cell_area().sqrt();
    let mut x = f.free_values(u0);
    let (mut e, mut g) = f.value_grad(&x);
    if !e.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { iteration: 0 });
    }
    let norm = |g: &[f64]| dot(g, g).sqrt() / scale;
    let mut trace = vec![TraceStep { iteration: 0, energy: e, grad_norm: norm(&g), step: 0.0 }];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stop = StopReason::IterationCap;

    for it in 1..=config.max_iter {
        if norm(&g) <= config.grad_tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        let mut d = two_loop(&g, &pairs);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            pairs.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut t = if pairs.is_empty() { (1.0 / dot(&d, &d).sqrt()).min(1.0) * scale } else { 1.0 };
        let mut accepted = None;
        let mut all_nonfinite = true;
        for _ in 0..config.max_backtracks {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let et = f.value(&xt);
            if et.is_finite() {
                all_nonfinite = false;
                if et < e && et <= e + config.armijo * t * slope {
                    accepted = Some((xt, et));
                    break;
                }
            }
            t *= config.backtrack;
        }
        let Some((xn, _)) = accepted else {
            if all_nonfinite {
                return Err(Error::BlowUp { iteration: it });
            }
            stop = StopReason::Stalled;
            break;
        };
        let (en, gn) = f.value_grad(&xn);
        if !(en < e) {
            // rounding disagreement between the two energy paths
            stop = StopReason::Stalled;
            break;
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if config.memory > 0 && sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if pairs.len() == config.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        e = en;
        g = gn;
        trace.push(TraceStep { iteration: it, energy: e, grad_norm: norm(&g), step: t });
    }
    if stop == StopReason::IterationCap && norm(&g) <= config.grad_tol {
        stop = StopReason::GradientTolerance;
    }
    Ok(MinimizeOutcome { stream: f.stream_with(&x), trace, stop })
}

/// `-H g` from the stored pairs, with the usual `sᵀy/yᵀy` initial scaling.
fn two_loop(g: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alpha = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alpha.push(a);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alpha.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
