use super::kernel::TestKernel;
use crate::quad::adaptive_split;
use std::f64::consts::FRAC_PI_2;

const TOL: f64 = 1e-13;

/// `G(e^{iα}, e^{iθ}) = ∫_{θ-π/2}^{θ+π/2} φ′(t - α) sin t dt`.
pub fn g_func(phi: &TestKernel, alpha: f64, theta: f64) -> f64 {
    let (a, b) = (theta - FRAC_PI_2, theta + FRAC_PI_2);
    let breaks = phi.seams_in(a, b, alpha);
    adaptive_split(|t| phi.dphi(t - alpha) * t.sin(), a, b, &breaks, TOL, TOL)
}

/// `H(e^{iθ}, e^{iα}) = φ(α) cos(θ + α) + ∫₀^α φ(t) sin(θ + t) dt`.
pub fn h_func(phi: &TestKernel, theta: f64, alpha: f64) -> f64 {
    let (lo, hi) = if alpha >= 0.0 { (0.0, alpha) } else { (alpha, 0.0) };
    let breaks = phi.seams_in(lo, hi, 0.0);
    phi.phi(alpha) * (theta + alpha).cos() + adaptive_split(|t| phi.phi(t) * (theta + t).sin(), 0.0, alpha, &breaks, TOL, TOL)
}

/// `|½(G(iz, e^{iβ}z) - G(iz, z)) - H(z, e^{iβ})|` for `z = e^{iθ}`.
pub fn gh_identity_check(phi: &TestKernel, theta: f64, beta: f64) -> f64 {
    let a = theta + FRAC_PI_2;
    let lhs = 0.5 * (g_func(phi, a, theta + beta) - g_func(phi, a, theta));
    (lhs - h_func(phi, theta, beta)).abs()
}

/// `sup_θ |H(e^{iθ}, e^{iα})| / |α|^γ` over the given α values (θ sampled on `n_theta` points).
pub fn h_bound_ratio(phi: &TestKernel, gamma: f64, alphas: &[f64], n_theta: usize) -> f64 {
    let mut best: f64 = 0.0;
    for &a in alphas {
        for k in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            best = best.max(h_func(phi, th, a).abs() / a.abs().powf(gamma));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin2_spot_value() {
        let k = TestKernel::sin2();
        let lhs = 0.5 * (g_func(&k, FRAC_PI_2, FRAC_PI_2) - g_func(&k, FRAC_PI_2, 0.0));
        assert!((lhs - 2.0 / 3.0).abs() < 1e-12);
        assert!((h_func(&k, 0.0, FRAC_PI_2) - 2.0 / 3.0).abs() < 1e-12);
    }
}
