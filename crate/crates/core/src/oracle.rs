//! Closed-form ground truth for standard weights.
//!
//! The std family (alpha+1)(1-r^2)^alpha has an exactly known kernel,
//! Beta-function moments, kappa, the classical boundedness criterion
//! (beta+1) < p (alpha+1), and the Forelli-Rudin growth integral for kernel
//! norms. Every acceptance test checks the generic machinery against these.

use crate::error::{Error, Result};
use crate::special::ln_beta;
use num_complex::Complex64;

/// Three-way outcome of the strict standard-weight criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Criterion {
    Holds,
    Fails,
    Boundary,
}

/// Moment of the std weight: w_x = (alpha+1) B(x+1, alpha+1) / 2.
pub fn std_moment(alpha: f64, x: f64) -> f64 {
    assert!(alpha > -1.0 && x >= 0.0);
    0.5 * (alpha + 1.0) * ln_beta(x + 1.0, alpha + 1.0).exp()
}

/// Moment of the pow weight (1-r)^alpha: int r^{2x+1}(1-r)^alpha dr.
pub fn pow_moment(alpha: f64, x: f64) -> f64 {
    assert!(alpha > -1.0 && x >= 0.0);
    ln_beta(2.0 * x + 2.0, alpha + 1.0).exp()
}

/// Kernel of the std weight: (1 - z conj(a))^{-(2+alpha)}, principal branch.
pub fn std_kernel(alpha: f64, a: Complex64, z: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) - z * a.conj();
    w.powf(-(2.0 + alpha))
}

/// n-th z-derivative of the std kernel:
/// conj(a)^n (2+alpha)(3+alpha)...(n+1+alpha) (1 - z conj(a))^{-(2+alpha+n)}.
pub fn std_kernel_deriv(alpha: f64, a: Complex64, z: Complex64, n: u32) -> Complex64 {
    let mut factor = 1.0;
    for j in 0..n {
        factor *= 2.0 + alpha + j as f64;
    }
    let w = Complex64::new(1.0, 0.0) - z * a.conj();
    a.conj().powu(n) * factor * w.powf(-(2.0 + alpha + n as f64))
}

/// Strict criterion (beta+1) < p (alpha+1); equality is Boundary.
pub fn std_verdict(alpha: f64, beta: f64, p: f64) -> Criterion {
    let lhs = beta + 1.0;
    let rhs = p * (alpha + 1.0);
    if (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0) {
        Criterion::Boundary
    } else if lhs < rhs {
        Criterion::Holds
    } else {
        Criterion::Fails
    }
}

/// kappa of the std/pow family: 1/(alpha+1).
pub fn std_kappa(alpha: f64) -> f64 {
    assert!(alpha > -1.0);
    1.0 / (alpha + 1.0)
}

/// Forelli-Rudin comparand for pow-family pairs:
/// int_0^{|a|} vhat(t) / (what(t)^p (1-t)^p) dt with what, vhat of
/// (1-r)^alpha and (1-r)^beta. The near-logarithmic exponent is evaluated via
/// expm1 so the formula is uniform in the exponent.
pub fn forelli_rudin(alpha: f64, beta: f64, p: f64, a_abs: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a_abs) {
        return Err(Error::Precondition(format!("|a| must lie in [0,1), got {a_abs}")));
    }
    if a_abs == 0.0 {
        return Ok(0.0);
    }
    let pref = (alpha + 1.0).powf(p) / (beta + 1.0);
    // integrand = pref (1-t)^e with e = beta+1 - p(alpha+2)
    let e = beta + 1.0 - p * (alpha + 2.0);
    let l = (-a_abs).ln_1p(); // ln(1-|a|)
    let value = if (e + 1.0).abs() < 1e-14 {
        -l
    } else {
        -((e + 1.0) * l).exp_m1() / (e + 1.0)
    };
    Ok(pref * value)
}
