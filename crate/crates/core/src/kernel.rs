//! Reproducing-kernel coefficient series, pointwise and derivative
//! evaluation, circle means M_p, weighted Bergman norms, and the comparand
//! integrals whose ratios against measured quantities verify the kernel
//! growth asymptotics.
//!
//! The kernel of the weighted space with radial weight w is the power series
//!
//! ```text
//! B_a(z) = sum_n (z conj(a))^n / (2 w_n),      w_n = int_0^1 r^{2n+1} w dr,
//! ```
//!
//! so everything reduces to the moment sequence. Truncation is certified:
//! for doubling weights 1/w_n grows at most like a power n^gamma, and the
//! tail after term n is bounded by a geometric majorant once
//! x ((n+2)/(n+1))^{gamma+1+N} < 1.

use crate::error::{Error, Result};
use crate::quad::{self, IntegralOutcome, SupConfig, SupVerdict};
use crate::weights::RadialWeight;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// Evaluation thresholds; defaults match the crate-wide conventions.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KernelConfig {
    /// largest admissible |a||z| (and r|a| for means)
    pub x_max: f64,
    /// relative truncation tolerance for pointwise series
    pub series_tol: f64,
    /// relative agreement required between successive theta refinements
    pub mean_tol: f64,
    /// relative tolerance of the radial norm quadrature
    pub norm_tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { x_max: 0.999999, series_tol: 1e-10, mean_tol: 1e-7, norm_tol: 1e-8 }
    }
}

/// Highest supported derivative order.
pub const MAX_DERIV: u32 = 4;

/// Precomputed kernel Taylor coefficients c_n = 1/(2 w_n).
#[derive(Clone)]
pub struct KernelCoeffs {
    weight: RadialWeight,
    coeffs: Vec<f64>,
    growth: f64,
    cfg: KernelConfig,
}

impl std::fmt::Debug for KernelCoeffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KernelCoeffs({}, n_max={}, growth={:.3})", self.weight.spec(), self.n_max(), self.growth)
    }
}

/// Terms needed for relative tolerance `tol` at argument product `x`, for a
/// coefficient growth exponent `growth` and derivative order `n_deriv`.
pub fn suggested_terms(x: f64, growth: f64, n_deriv: u32, tol: f64) -> usize {
    let s = (1.0 - x).max(1e-9);
    let g = growth + 1.0 + n_deriv as f64;
    let n = (g * (1.0 / s).ln() + (1.0 / tol).ln()) / -x.max(0.1).ln();
    (1.5 * n) as usize + 64
}

pub fn kernel_coeffs(w: &RadialWeight, n_max: usize) -> Result<KernelCoeffs> {
    kernel_coeffs_with(w, n_max, KernelConfig::default())
}

pub fn kernel_coeffs_with(w: &RadialWeight, n_max: usize, cfg: KernelConfig) -> Result<KernelCoeffs> {
    if n_max < 1 {
        return Err(Error::Precondition("kernel series needs n_max >= 1".into()));
    }
    let moments: Vec<Result<f64>> = (0..=n_max)
        .into_par_iter()
        .map(|n| w.moment(n as f64))
        .collect();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    for (n, m) in moments.into_iter().enumerate() {
        let m = m?;
        if !(m.is_finite() && m > 0.0) || m < 1e-300 {
            return Err(Error::numeric(
                format!("moment underflow at n={n} for {}", w.spec()),
                m,
            ));
        }
        coeffs.push(1.0 / (2.0 * m));
    }
    // moments are strictly decreasing for any weight with mass, so the
    // coefficients must not decrease; small slack absorbs quadrature noise
    for n in 1..coeffs.len() {
        if coeffs[n] < coeffs[n - 1] * (1.0 - 1e-3) {
            return Err(Error::Domain(format!(
                "kernel coefficients decrease at n={n} for {} (c={} < {})",
                w.spec(),
                coeffs[n],
                coeffs[n - 1]
            )));
        }
    }
    // growth exponent: max pairwise slope of log c against log n over a
    // geometric index ladder
    let mut idx: Vec<usize> = Vec::new();
    let mut i = 1usize;
    while i <= n_max {
        idx.push(i);
        i *= 2;
    }
    if *idx.last().unwrap_or(&0) != n_max {
        idx.push(n_max);
    }
    let mut growth = 0.0f64;
    for (ai, &na) in idx.iter().enumerate() {
        for &nb in idx.iter().skip(ai + 1) {
            let slope = (coeffs[nb] / coeffs[na]).ln() / (((nb + 1) as f64) / ((na + 1) as f64)).ln();
            growth = growth.max(slope);
        }
    }
    Ok(KernelCoeffs { weight: w.clone(), coeffs, growth, cfg })
}

impl KernelCoeffs {
    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn growth_exponent(&self) -> f64 {
        self.growth
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    /// N-th z-derivative of B_a at z, summed to a certified relative tail
    /// bound below `tol`.
    pub fn eval(&self, a: Complex64, z: Complex64, n_deriv: u32, tol: f64) -> Result<Complex64> {
        if n_deriv > MAX_DERIV {
            return Err(Error::Precondition(format!(
                "derivative order {n_deriv} > {MAX_DERIV} not supported"
            )));
        }
        let x = a.norm() * z.norm();
        if x > self.cfg.x_max {
            return Err(Error::Precondition(format!(
                "|a||z| = {x} exceeds x_max = {}",
                self.cfg.x_max
            )));
        }
        let nd = n_deriv as usize;
        let t = z * a.conj();
        let g = self.growth + 1.0 + n_deriv as f64;

        let mut sum = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0); // t^(n - nd)
        let mut falling = 1.0f64; // n(n-1)...(n-nd+1)
        for j in 0..nd {
            falling *= (nd - j) as f64;
        }
        let mut n = nd;
        loop {
            if n > self.n_max() {
                return Err(Error::Truncation {
                    n_max: self.n_max(),
                    suggested: suggested_terms(x, self.growth, n_deriv, tol),
                });
            }
            let c = self.coeffs[n] * falling;
            let term = c * pw;
            sum += term;
            let mag = c * x.powi((n - nd) as i32);
            let rho = x * (((n + 2) as f64) / ((n + 1) as f64)).powf(g);
            if n >= nd + 4 && rho < 1.0 {
                let tail = mag * rho / (1.0 - rho);
                if tail <= tol * sum.norm().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            // advance n -> n+1
            pw *= t;
            falling = if nd == 0 {
                1.0
            } else {
                falling * ((n + 1) as f64) / ((n + 1 - nd) as f64)
            };
            n += 1;
        }
        Ok(a.conj().powu(n_deriv) * sum)
    }

    /// M_p^p(r, (B_a)^(N)). Exact coefficient sums for p = 2; theta sampling
    /// (trapezoid via FFT, point count doubled until stable) otherwise.
    pub fn circle_mean(&self, a: Complex64, r: f64, p: f64, n_deriv: u32) -> Result<f64> {
        self.check_mean_args(a, r, p, n_deriv)?;
        if p == 2.0 {
            self.mean_coefficient_sum(a.norm(), r, n_deriv)
        } else {
            self.theta_mean(a, r, p, n_deriv)
        }
    }

    fn check_mean_args(&self, a: Complex64, r: f64, p: f64, n_deriv: u32) -> Result<()> {
        if n_deriv > MAX_DERIV {
            return Err(Error::Precondition(format!("derivative order {n_deriv} > {MAX_DERIV}")));
        }
        if !(p > 0.0) {
            return Err(Error::Precondition(format!("circle mean needs p > 0, got {p}")));
        }
        if !(0.0..=1.0).contains(&r) || r * a.norm() > self.cfg.x_max {
            return Err(Error::Precondition(format!(
                "radius product r|a| = {} out of range (x_max {})",
                r * a.norm(),
                self.cfg.x_max
            )));
        }
        Ok(())
    }

    /// Exact M_2^2 via Parseval on the coefficient series.
    fn mean_coefficient_sum(&self, t: f64, r: f64, n_deriv: u32) -> Result<f64> {
        let nd = n_deriv as usize;
        let y = (t * r) * (t * r);
        let g = 2.0 * (self.growth + 1.0 + n_deriv as f64);
        let t2n = t.powi(2 * nd as i32); // t^{2n} with the r-free part split off
        let mut falling = 1.0f64;
        for j in 0..nd {
            falling *= (nd - j) as f64;
        }
        let mut sum = 0.0;
        let mut pw = 1.0f64; // y^(n - nd)
        let mut n = nd;
        loop {
            if n > self.n_max() {
                return Err(Error::Truncation {
                    n_max: self.n_max(),
                    suggested: suggested_terms(t * r, self.growth, n_deriv, self.cfg.series_tol),
                });
            }
            let c = self.coeffs[n] * falling;
            let term = c * c * pw * t2n;
            sum += term;
            let rho = y * (((n + 2) as f64) / ((n + 1) as f64)).powf(g);
            if n >= nd + 4 && rho < 1.0 {
                let tail = term.abs() * rho / (1.0 - rho);
                if tail <= self.cfg.series_tol * sum.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            pw *= y;
            falling = if nd == 0 { 1.0 } else { falling * ((n + 1) as f64) / ((n + 1 - nd) as f64) };
            n += 1;
        }
        Ok(sum)
    }

    /// M_p^p by uniform theta sampling: the coefficient vector is folded
    /// modulo the point count and transformed, which evaluates the truncated
    /// series exactly at the sample points; the point count doubles until two
    /// successive refinements agree.
    pub fn theta_mean(&self, a: Complex64, r: f64, p: f64, n_deriv: u32) -> Result<f64> {
        self.check_mean_args(a, r, p, n_deriv)?;
        let t = a.norm();
        let x = t * r;
        let nd = n_deriv as usize;
        if x == 0.0 {
            let c = self.coeffs[nd] * (1..=nd).map(|j| j as f64).product::<f64>();
            return Ok((c * t.powi(nd as i32)).powf(p));
        }

        // coefficient prefix b_j = c_{j+nd} P(j+nd, nd) t^{j+nd} r^j
        let g = self.growth + 1.0 + n_deriv as f64;
        let mut b: Vec<f64> = Vec::new();
        let mut falling = 1.0f64;
        for j in 0..nd {
            falling *= (nd - j) as f64;
        }
        let mut pw = t.powi(nd as i32);
        let mut bsum = 0.0;
        let mut n = nd;
        loop {
            if n > self.n_max() {
                return Err(Error::Truncation {
                    n_max: self.n_max(),
                    suggested: suggested_terms(x, self.growth, n_deriv, self.cfg.series_tol),
                });
            }
            let bj = self.coeffs[n] * falling * pw;
            b.push(bj);
            bsum += bj.abs();
            let rho = x * (((n + 2) as f64) / ((n + 1) as f64)).powf(g);
            if n >= nd + 4 && rho < 1.0 && bj.abs() * rho / (1.0 - rho) <= 1e-3 * self.cfg.mean_tol * bsum {
                break;
            }
            pw *= x;
            falling = if nd == 0 { 1.0 } else { falling * ((n + 1) as f64) / ((n + 1 - nd) as f64) };
            n += 1;
        }

        let mut m = 64usize.max((16.0 / (1.0 - x)).ceil() as usize).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let mut prev = theta_mean_fft(&b, p, m, &mut planner);
        loop {
            m *= 2;
            if m > (1 << 22) {
                return Err(Error::numeric(
                    format!("theta sampling did not stabilize below {} points", 1 << 22),
                    f64::NAN,
                ));
            }
            let cur = theta_mean_fft(&b, p, m, &mut planner);
            if (cur - prev).abs() <= self.cfg.mean_tol * cur.abs().max(f64::MIN_POSITIVE) {
                return Ok(cur);
            }
            prev = cur;
        }
    }

    /// ||(B_a)^(N)||^p in the weighted space of `v`: p-th power norm,
    /// computed as 2 int_0^1 M_p^p(s, .) s v(s) ds by radial quadrature.
    pub fn bergman_norm(&self, a: Complex64, v: &RadialWeight, p: f64, n_deriv: u32) -> Result<f64> {
        if a.norm() > self.cfg.x_max {
            return Err(Error::Precondition(format!(
                "|a| = {} exceeds x_max = {}",
                a.norm(),
                self.cfg.x_max
            )));
        }
        let f = |u: f64| match self.circle_mean(a, 1.0 - u, p, n_deriv) {
            Ok(mean) => 2.0 * mean * (1.0 - u) * v.eval_s(u),
            Err(_) => f64::NAN,
        };
        match quad::integrate_full(&f, 0.0, 1.0, self.cfg.norm_tol)? {
            IntegralOutcome::Converged(q) => Ok(q.value),
            IntegralOutcome::Diverged => Err(Error::Domain("norm integral diverges".into())),
            IntegralOutcome::Ambiguous { achieved, .. } => {
                Err(Error::numeric("norm quadrature did not converge", achieved))
            }
        }
    }
}

fn theta_mean_fft(b: &[f64], p: f64, m: usize, planner: &mut FftPlanner<f64>) -> f64 {
    let mut bins = vec![Complex64::new(0.0, 0.0); m];
    for (j, bj) in b.iter().enumerate() {
        bins[j % m].re += bj;
    }
    let fft = planner.plan_fft_inverse(m);
    fft.process(&mut bins);
    let sum: f64 = bins.iter().map(|v| v.norm().powf(p)).sum();
    sum / m as f64
}

// ---------------------------------------------------------------------------
// comparand integrals
// ---------------------------------------------------------------------------

/// int_0^upper dt / (what(t)^p (1-t)^{p(N+1)}), the circle-mean comparand.
pub fn mean_comparand(w: &RadialWeight, p: f64, n_deriv: u32, upper: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&upper) {
        return Err(Error::Precondition(format!("comparand upper limit {upper} not in [0,1)")));
    }
    if upper == 0.0 {
        return Ok(0.0);
    }
    let e = p * (n_deriv as f64 + 1.0);
    let f = |u: f64| (-p * w.tail_s(u).unwrap_or(f64::NAN).ln() - e * u.ln()).exp();
    let q = quad::integrate(f, 1.0 - upper, 1.0, tol)?;
    Ok(q.value)
}

/// int_0^{|a|} vhat(t) / (what(t)^p (1-t)^{p(N+1)}) dt, the norm comparand.
pub fn norm_comparand(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    n_deriv: u32,
    a_abs: f64,
    tol: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&a_abs) {
        return Err(Error::Precondition(format!("comparand upper limit {a_abs} not in [0,1)")));
    }
    if a_abs == 0.0 {
        return Ok(0.0);
    }
    let e = p * (n_deriv as f64 + 1.0);
    let f = |u: f64| {
        (v.tail_s(u).unwrap_or(f64::NAN).ln() - p * omega.tail_s(u).unwrap_or(f64::NAN).ln() - e * u.ln()).exp()
    };
    let q = quad::integrate(f, 1.0 - a_abs, 1.0, tol)?;
    Ok(q.value)
}

/// The pointwise comparand vhat(a) / (what(a)^p (1-|a|)^{p(N+1)-1}).
pub fn local_comparand(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    n_deriv: u32,
    a_abs: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&a_abs) {
        return Err(Error::Precondition(format!("|a| = {a_abs} not in [0,1)")));
    }
    let s = 1.0 - a_abs;
    let e = p * (n_deriv as f64 + 1.0) - 1.0;
    Ok((v.tail_s(s)?.ln() - p * omega.tail_s(s)?.ln() - e * s.ln()).exp())
}

// ---------------------------------------------------------------------------
// ratio scans
// ---------------------------------------------------------------------------

/// Limit path for the two-parameter asymptotics: either a = r = 1 - 2^-k or
/// the off-diagonal r = 1 - 2(1-|a|).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ScanPath {
    Diagonal,
    OffDiagonal,
}

impl ScanPath {
    /// (|a|, r) at grid level k. Off-diagonal shifts r one level up, so both
    /// points stay exactly on the dyadic grid.
    pub fn point(&self, grid: &crate::quad::DyadicGrid, k: u32) -> (f64, f64) {
        match self {
            ScanPath::Diagonal => (grid.r(k), grid.r(k)),
            ScanPath::OffDiagonal => (grid.r(k), if k > 1 { grid.r(k - 1) } else { 0.0 }),
        }
    }
}

/// Two-sided verdicts for measured/comparand and its reciprocal; the
/// equivalence claim passes only when both directions are Bounded.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RatioScan {
    pub ratios: Vec<f64>,
    pub upper: SupVerdict,
    pub lower: SupVerdict,
}

impl RatioScan {
    pub fn comparable(&self) -> bool {
        self.upper.verdict == crate::quad::Verdict::Bounded
            && self.lower.verdict == crate::quad::Verdict::Bounded
    }
}

/// Scan measured(k)/comparand(k) over the grid, in parallel, and judge both
/// directions.
pub fn ratio_scan(
    measured: impl Fn(u32) -> Result<f64> + Sync,
    comparand: impl Fn(u32) -> Result<f64> + Sync,
    cfg: &SupConfig,
) -> Result<RatioScan> {
    let levels: Vec<u32> = cfg.grid.levels().collect();
    let pairs: Vec<Result<(f64, f64)>> = levels
        .par_iter()
        .map(|&k| Ok((measured(k)?, comparand(k)?)))
        .collect();
    let mut ratios = Vec::with_capacity(levels.len());
    for p in pairs {
        let (m, c) = p?;
        if !(m > 0.0 && c > 0.0) {
            return Err(Error::Domain(format!("ratio scan needs positive values, got {m}/{c}")));
        }
        ratios.push(m / c);
    }
    let inv: Vec<f64> = ratios.iter().map(|v| 1.0 / v).collect();
    Ok(RatioScan {
        upper: SupVerdict::from_values(&ratios, cfg),
        lower: SupVerdict::from_values(&inv, cfg),
        ratios,
    })
}

// ---------------------------------------------------------------------------
// coefficient polynomials and the Littlewood-Paley identity
// ---------------------------------------------------------------------------

/// An analytic polynomial given by its Taylor coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPoly(pub Vec<f64>);

impl CoeffPoly {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Lp1Check {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Both sides of ||f||^2 = 4 ||f'||^2_* + w(D) |f(0)|^2 on the coefficient
/// level, computed by independent routes: the left side uses the moments of
/// w, the right side the quadrature moments of the associated weight w*.
pub fn lp1_check(f: &CoeffPoly, w: &RadialWeight) -> Result<Lp1Check> {
    let mut lhs = 0.0;
    for (n, c) in f.0.iter().enumerate() {
        lhs += c * c * 2.0 * w.moment(n as f64)?;
    }
    let mut rhs = w.area_mass()? * f.0[0] * f.0[0];
    for (n, c) in f.0.iter().enumerate().skip(1) {
        let x = n as f64 - 1.0;
        let star_moment = quad::integrate(
            |s: f64| ((2.0 * x + 1.0) * (-s).ln_1p()).exp() * w.star(1.0 - s).unwrap_or(f64::NAN),
            0.0,
            1.0,
            w.tol().max(1e-11),
        )?
        .value;
        rhs += 4.0 * (n as f64) * (n as f64) * c * c * 2.0 * star_moment;
    }
    let rel_err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(Lp1Check { lhs, rhs, rel_err })
}
