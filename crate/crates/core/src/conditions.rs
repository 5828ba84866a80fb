//! Evaluators and verdicts for the integral boundedness conditions, the
//! self-improving exponent window, and the kappa criterion.
//!
//! Every condition is a supremum over r in (0,1) of a prefactor times inner
//! integrals of the two weights. The scans share one piece of machinery: the
//! inner integrals over [0, r_k] and [r_k, 1] are accumulated incrementally
//! across the dyadic grid (segments between consecutive levels plus the two
//! stubs), and prefactors are assembled in log space so deep probe levels
//! never underflow.

use crate::error::{Error, Result};
use crate::quad::{self, DyadicGrid, IntegralOutcome, SupConfig, SupVerdict, Verdict};
use crate::weights::{self, KappaEstimate, RadialWeight, WeightClass};
use rayon::prelude::*;
use std::str::FromStr;

/// Identifiers of the implemented conditions. The `T4*` family characterizes
/// boundedness of the weighted projection for p > 1, `T5*` the p = 1 case,
/// `EImpr` is the self-improving tail form valid for p >= 1, `C2*` are the
/// kernel-growth localization conditions with derivative order N, `L9*` the
/// regularity characterizations with auxiliary exponent a = 2, and
/// `KappaCrit` the kappa-ratio criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ConditionId {
    T4c,
    T4d,
    T4e,
    T4f,
    T4g,
    EImpr,
    T5c,
    T5d,
    C2mean,
    C2norm,
    L9ii,
    L9iii,
    L9iv,
    KappaCrit,
}

pub const ALL_CONDITIONS: [ConditionId; 14] = [
    ConditionId::T4c,
    ConditionId::T4d,
    ConditionId::T4e,
    ConditionId::T4f,
    ConditionId::T4g,
    ConditionId::EImpr,
    ConditionId::T5c,
    ConditionId::T5d,
    ConditionId::C2mean,
    ConditionId::C2norm,
    ConditionId::L9ii,
    ConditionId::L9iii,
    ConditionId::L9iv,
    ConditionId::KappaCrit,
];

impl std::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConditionId::T4c => "T4c",
            ConditionId::T4d => "T4d",
            ConditionId::T4e => "T4e",
            ConditionId::T4f => "T4f",
            ConditionId::T4g => "T4g",
            ConditionId::EImpr => "EImpr",
            ConditionId::T5c => "T5c",
            ConditionId::T5d => "T5d",
            ConditionId::C2mean => "C2mean",
            ConditionId::C2norm => "C2norm",
            ConditionId::L9ii => "L9ii",
            ConditionId::L9iii => "L9iii",
            ConditionId::L9iv => "L9iv",
            ConditionId::KappaCrit => "KappaCrit",
        };
        f.write_str(s)
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        for id in ALL_CONDITIONS {
            if s.eq_ignore_ascii_case(&id.to_string()) {
                return Ok(id);
            }
        }
        Err(Error::parse(s, "unknown condition id"))
    }
}

/// Options shared by the condition evaluators.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CondConfig {
    pub sup: SupConfig,
    /// relative tolerance of the inner quadratures
    pub tol: f64,
    /// derivative order for the C2 conditions
    pub n_deriv: u32,
    /// auxiliary exponent for the L9 conditions
    pub lemma9_alpha: f64,
}

impl Default for CondConfig {
    fn default() -> Self {
        CondConfig { sup: SupConfig::default(), tol: 1e-10, n_deriv: 0, lemma9_alpha: 2.0 }
    }
}

// ---------------------------------------------------------------------------
// incremental grid integrals
// ---------------------------------------------------------------------------

/// I(k) = int over [s_k, 1] of g (the s-side image of int_0^{r_k} in r).
fn prefix_integrals(g: &(dyn Fn(f64) -> f64 + Sync), grid: &DyadicGrid, tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.depth as usize);
    let mut acc = seg_value(g, grid.s(1), 1.0, tol)?;
    out.push(acc);
    for k in 1..grid.depth {
        acc += seg_value(g, grid.s(k + 1), grid.s(k), tol)?;
        out.push(acc);
    }
    Ok(out)
}

/// T(k) = int over (0, s_k] of g (the image of int_{r_k}^1); +inf when the
/// stub at 0 diverges. An ambiguous stub keeps its partial value: it only
/// occurs within a hair of a critical exponent and the trend engine sees the
/// structure either way.
fn suffix_integrals(g: &(dyn Fn(f64) -> f64 + Sync), grid: &DyadicGrid, tol: f64) -> Result<Vec<f64>> {
    let deepest = grid.s(grid.depth);
    let stub = match quad::integrate_full(g, 0.0, deepest, tol)? {
        IntegralOutcome::Converged(q) => q.value,
        IntegralOutcome::Diverged => f64::INFINITY,
        IntegralOutcome::Ambiguous { partial, .. } => partial,
    };
    let mut vals = vec![0.0; grid.depth as usize];
    vals[grid.depth as usize - 1] = stub;
    for k in (1..grid.depth).rev() {
        let seg = seg_value(g, grid.s(k + 1), grid.s(k), tol)?;
        vals[k as usize - 1] = vals[k as usize] + seg;
    }
    Ok(vals)
}

fn seg_value(g: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64, tol: f64) -> Result<f64> {
    match quad::integrate_full(&|u| g(u), lo, hi, tol)? {
        IntegralOutcome::Converged(q) => Ok(q.value),
        IntegralOutcome::Diverged => Ok(f64::INFINITY),
        IntegralOutcome::Ambiguous { achieved, .. } => Err(Error::numeric(
            format!("condition segment ({lo:.3e},{hi:.3e}) did not converge"),
            achieved,
        )),
    }
}

type LnFn<'a> = Box<dyn Fn(f64) -> f64 + Sync + 'a>;

/// ln of a weight value, NaN-safe (negative or vanishing values poison the
/// level, surfacing as a domain error downstream).
fn ln_val(w: &RadialWeight, s: f64) -> f64 {
    w.eval_s(s).ln()
}

fn ln_tail(w: &RadialWeight, s: f64) -> Result<f64> {
    Ok(w.tail_s(s)?.ln())
}

struct CondScan<'a> {
    /// ln of the positive prefactor at level k
    pre_ln: LnFn<'a>,
    /// (integrand in s, exponent, from-zero?) factors
    factors: Vec<(LnFn<'a>, f64, bool)>,
}

impl<'a> CondScan<'a> {
    fn values(&self, grid: &DyadicGrid, tol: f64) -> Result<Vec<f64>> {
        let mut integral_sets: Vec<Vec<f64>> = Vec::with_capacity(self.factors.len());
        for (g_ln, _, from_zero) in &self.factors {
            let g = |u: f64| g_ln(u).exp();
            let vals = if *from_zero {
                prefix_integrals(&g, grid, tol)?
            } else {
                suffix_integrals(&g, grid, tol)?
            };
            integral_sets.push(vals);
        }
        let mut out = Vec::with_capacity(grid.depth as usize);
        for k in grid.levels() {
            let i = (k - 1) as usize;
            let mut ln_f = (self.pre_ln)(grid.s(k));
            let mut infinite = false;
            for ((_, power, _), vals) in self.factors.iter().zip(&integral_sets) {
                let v = vals[i];
                if v.is_infinite() {
                    if *power > 0.0 {
                        infinite = true;
                    } else {
                        ln_f = f64::NEG_INFINITY;
                    }
                } else if v <= 0.0 {
                    ln_f = if *power > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
                } else {
                    ln_f += power * v.ln();
                }
            }
            out.push(if infinite { f64::INFINITY } else { ln_f.exp() });
        }
        Ok(out)
    }
}

/// Grid values of the condition's supremand F(r_k).
pub fn condition_values(
    id: ConditionId,
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    cfg: &CondConfig,
) -> Result<Vec<f64>> {
    check_p(id, p)?;
    condition_values_any_p(id, omega, v, p, cfg)
}

/// As `condition_values` without the exponent-range gate: the exponent
/// window legitimately probes below the public range.
fn condition_values_any_p(
    id: ConditionId,
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    cfg: &CondConfig,
) -> Result<Vec<f64>> {
    let grid = cfg.sup.grid;
    check_positive(omega, v, id, &grid)?;
    let pp = p / (p - 1.0); // only used when p > 1
    let nd = cfg.n_deriv as f64;
    let scan = match id {
        ConditionId::T4c => CondScan {
            pre_ln: Box::new(move |s| {
                ln_tail(v, s).unwrap_or(f64::NAN) / p - ln_tail(omega, s).unwrap_or(f64::NAN)
            }),
            factors: vec![(
                Box::new(move |u| pp * (ln_val(omega, u) - ln_val(v, u)) + ln_val(v, u)),
                1.0 / pp,
                false,
            )],
        },
        ConditionId::T4d => CondScan {
            pre_ln: Box::new(move |s| {
                p * ln_val(omega, s) + (p - 1.0) * s.ln() - ln_val(v, s)
            }),
            factors: vec![(
                Box::new(move |u| ln_val(v, u) - p * ln_val(omega, u) - p * u.ln()),
                1.0,
                true,
            )],
        },
        ConditionId::T4e => CondScan {
            pre_ln: Box::new(|_| 0.0),
            factors: vec![
                (
                    Box::new(move |u| ln_val(v, u) - p * ln_val(omega, u) - p * u.ln()),
                    1.0 / p,
                    true,
                ),
                (
                    Box::new(move |u| pp * (ln_val(omega, u) - ln_val(v, u)) + ln_val(v, u)),
                    1.0 / pp,
                    false,
                ),
            ],
        },
        ConditionId::T4f => CondScan {
            pre_ln: Box::new(move |s| {
                ln_tail(v, s).unwrap_or(f64::NAN) / p - ln_tail(omega, s).unwrap_or(f64::NAN)
            }),
            factors: vec![(
                Box::new(move |u| ln_val(omega, u) - (u.ln() + ln_val(v, u)) / p),
                1.0,
                false,
            )],
        },
        ConditionId::T4g => CondScan {
            pre_ln: Box::new(move |s| {
                ln_val(omega, s) + s.ln() / pp - ln_val(v, s) / p
            }),
            factors: vec![(
                Box::new(move |u| ln_val(v, u) / p - ln_val(omega, u) - (1.0 + 1.0 / pp) * u.ln()),
                1.0,
                true,
            )],
        },
        ConditionId::EImpr => CondScan {
            pre_ln: Box::new(move |s| {
                p * ln_tail(omega, s).unwrap_or(f64::NAN) - ln_tail(v, s).unwrap_or(f64::NAN)
            }),
            factors: vec![(
                Box::new(move |u| {
                    ln_tail(v, u).unwrap_or(f64::NAN) - p * ln_tail(omega, u).unwrap_or(f64::NAN) - u.ln()
                }),
                1.0,
                true,
            )],
        },
        ConditionId::T5c => CondScan {
            pre_ln: Box::new(move |s| ln_val(omega, s) - ln_val(v, s)),
            factors: vec![(
                Box::new(move |u| {
                    ln_tail(v, u).unwrap_or(f64::NAN) - ln_tail(omega, u).unwrap_or(f64::NAN) - u.ln()
                }),
                1.0,
                true,
            )],
        },
        ConditionId::T5d => CondScan {
            pre_ln: Box::new(move |s| {
                ln_tail(v, s).unwrap_or(f64::NAN) - ln_tail(omega, s).unwrap_or(f64::NAN)
            }),
            factors: vec![(
                Box::new(move |u| ln_val(omega, u) - ln_val(v, u) - u.ln()),
                1.0,
                false,
            )],
        },
        ConditionId::C2mean => CondScan {
            pre_ln: Box::new(move |s| {
                p * ln_tail(omega, s).unwrap_or(f64::NAN) + (p * (nd + 1.0) - 1.0) * s.ln()
            }),
            factors: vec![(
                Box::new(move |u| -p * ln_tail(omega, u).unwrap_or(f64::NAN) - p * (nd + 1.0) * u.ln()),
                1.0,
                true,
            )],
        },
        ConditionId::C2norm => CondScan {
            pre_ln: Box::new(move |s| {
                p * ln_tail(omega, s).unwrap_or(f64::NAN) + (p * (nd + 1.0) - 1.0) * s.ln()
                    - ln_tail(v, s).unwrap_or(f64::NAN)
            }),
            factors: vec![(
                Box::new(move |u| {
                    ln_tail(v, u).unwrap_or(f64::NAN)
                        - p * ln_tail(omega, u).unwrap_or(f64::NAN)
                        - p * (nd + 1.0) * u.ln()
                }),
                1.0,
                true,
            )],
        },
        ConditionId::L9ii | ConditionId::L9iii | ConditionId::L9iv | ConditionId::KappaCrit => {
            return Err(Error::Precondition(format!(
                "{id} has no grid supremand; evaluate through eval_condition"
            )))
        }
    };
    scan.values(&grid, cfg.tol)
}

fn check_p(id: ConditionId, p: f64) -> Result<()> {
    let ok = match id {
        ConditionId::T4c | ConditionId::T4d | ConditionId::T4e | ConditionId::T4f | ConditionId::T4g => p > 1.0,
        ConditionId::EImpr | ConditionId::KappaCrit => p >= 1.0,
        ConditionId::T5c | ConditionId::T5d => true, // p ignored
        ConditionId::C2mean | ConditionId::C2norm => p > 0.0,
        ConditionId::L9ii | ConditionId::L9iii | ConditionId::L9iv => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{id} requires a larger exponent than p = {p}")))
    }
}

fn check_positive(omega: &RadialWeight, v: &RadialWeight, id: ConditionId, grid: &DyadicGrid) -> Result<()> {
    for k in [1, grid.depth / 2 + 1, grid.depth] {
        let s = grid.s(k);
        for (w, name) in [(omega, "omega"), (v, "v")] {
            let val = w.eval_s(s);
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::Domain(format!(
                    "{id}: weight {name} = {} is not strictly positive at s = {s:.3e}",
                    w.spec()
                )));
            }
        }
    }
    Ok(())
}

/// Evaluate one condition to a sup verdict.
pub fn eval_condition(
    id: ConditionId,
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    cfg: &CondConfig,
) -> Result<SupVerdict> {
    match id {
        ConditionId::L9ii | ConditionId::L9iii | ConditionId::L9iv => {
            let rep = lemma9_check(omega, cfg.lemma9_alpha, cfg)?;
            let sub = match id {
                ConditionId::L9ii => &rep.ii,
                ConditionId::L9iii => &rep.iii,
                _ => &rep.iv,
            };
            Ok(SupVerdict {
                verdict: match sub.holds {
                    Some(true) => Verdict::Bounded,
                    Some(false) => Verdict::Divergent,
                    None => Verdict::Inconclusive,
                },
                sup_value: sub.sup_value,
                argmax_level: 0,
                tail_slope: f64::NAN,
            })
        }
        ConditionId::KappaCrit => {
            check_p(id, p)?;
            let kc = kappa_criterion(omega, v, p, cfg)?;
            Ok(SupVerdict {
                verdict: if kc.boundary {
                    Verdict::Inconclusive
                } else if kc.holds {
                    Verdict::Bounded
                } else {
                    Verdict::Divergent
                },
                sup_value: kc.ratio,
                argmax_level: 0,
                tail_slope: f64::NAN,
            })
        }
        _ => {
            let values = condition_values(id, omega, v, p, cfg)?;
            Ok(SupVerdict::from_values(&values, &cfg.sup))
        }
    }
}

// ---------------------------------------------------------------------------
// pair reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Overall {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionOutcome {
    pub id: ConditionId,
    pub verdict: SupVerdict,
    pub deepened: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KappaCriterion {
    pub ratio: f64,
    pub margin: f64,
    pub holds: bool,
    pub boundary: bool,
    pub kappa_omega: KappaEstimate,
    pub kappa_v: KappaEstimate,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionReport {
    pub schema: u32,
    pub omega: String,
    pub v: String,
    pub p: f64,
    pub n_deriv: u32,
    pub grid_depth: u32,
    pub warnings: Vec<String>,
    /// kappa ratio sits at p within its margin: the strict criterion cannot
    /// be certified either way
    pub boundary: bool,
    pub kappa: Option<KappaCriterion>,
    pub conditions: Vec<ConditionOutcome>,
    /// agreement[i][j] = the verdicts of conditions i and j do not conflict
    pub agreement: Vec<Vec<bool>>,
    pub overall: Overall,
}

/// Conditions applicable to a pair at exponent p when none are requested.
pub fn default_conditions(p: f64) -> Vec<ConditionId> {
    if p > 1.0 {
        vec![
            ConditionId::T4c,
            ConditionId::T4d,
            ConditionId::T4e,
            ConditionId::T4f,
            ConditionId::T4g,
            ConditionId::EImpr,
        ]
    } else {
        vec![ConditionId::T5c, ConditionId::T5d, ConditionId::EImpr]
    }
}

/// Evaluate the requested conditions (default set when empty), fill the
/// agreement matrix and the overall verdict. Inconclusive verdicts trigger
/// one deepened re-evaluation. Disagreements are reported, never resolved.
pub fn check_pair(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    ids: &[ConditionId],
    cfg: &CondConfig,
) -> Result<ConditionReport> {
    if p < 1.0 {
        return Err(Error::Precondition(format!("check needs p >= 1, got {p}")));
    }
    let ids: Vec<ConditionId> = if ids.is_empty() { default_conditions(p) } else { ids.to_vec() };

    let mut warnings = Vec::new();
    for (w, name) in [(omega, "omega"), (v, "v")] {
        match weights::classify(w, &cfg.sup) {
            Ok(rep) if rep.class == WeightClass::Regular => {}
            Ok(rep) => warnings.push(format!("{name} = {} classifies as {:?}, not Regular", w.spec(), rep.class)),
            Err(e) => warnings.push(format!("classification of {name} failed: {e}")),
        }
    }

    let kappa = match kappa_criterion(omega, v, p, cfg) {
        Ok(k) => Some(k),
        Err(e) => {
            warnings.push(format!("kappa criterion unavailable: {e}"));
            None
        }
    };
    let boundary = kappa.as_ref().map(|k| k.boundary).unwrap_or(false);
    if boundary {
        warnings.push(
            "kappa ratio equals p within its margin; the strict criterion cannot be certified numerically"
                .to_string(),
        );
    }

    let outcomes: Vec<Result<ConditionOutcome>> = ids
        .par_iter()
        .map(|&id| {
            let first = eval_condition(id, omega, v, p, cfg)?;
            if first.verdict == Verdict::Inconclusive {
                let deeper = CondConfig {
                    sup: SupConfig {
                        grid: DyadicGrid::new(cfg.sup.grid.depth * 3 / 2),
                        ..cfg.sup
                    },
                    ..*cfg
                };
                let second = eval_condition(id, omega, v, p, &deeper)?;
                Ok(ConditionOutcome { id, verdict: second, deepened: true })
            } else {
                Ok(ConditionOutcome { id, verdict: first, deepened: false })
            }
        })
        .collect();
    let mut conditions = Vec::with_capacity(ids.len());
    for o in outcomes {
        conditions.push(o?);
    }

    let n = conditions.len();
    let mut agreement = vec![vec![true; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (conditions[i].verdict.verdict, conditions[j].verdict.verdict);
            agreement[i][j] = !((a == Verdict::Bounded && b == Verdict::Divergent)
                || (a == Verdict::Divergent && b == Verdict::Bounded));
        }
    }

    let any_bounded = conditions.iter().any(|c| c.verdict.verdict == Verdict::Bounded);
    let any_divergent = conditions.iter().any(|c| c.verdict.verdict == Verdict::Divergent);
    let overall = match (any_bounded, any_divergent) {
        (true, false) => Overall::Bounded,
        (false, true) => Overall::Unbounded,
        _ => Overall::Inconclusive,
    };

    Ok(ConditionReport {
        schema: 1,
        omega: omega.spec().to_string(),
        v: v.spec().to_string(),
        p,
        n_deriv: cfg.n_deriv,
        grid_depth: cfg.sup.grid.depth,
        warnings,
        boundary,
        kappa,
        conditions,
        agreement,
        overall,
    })
}

/// kappa_omega / kappa_v against p, with a margin from the extrapolation
/// error bars. `holds` demands the strict inequality beyond the margin;
/// `boundary` flags a ratio indistinguishable from p.
pub fn kappa_criterion(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    cfg: &CondConfig,
) -> Result<KappaCriterion> {
    let ko = weights::kappa(omega, &cfg.sup)?;
    let kv = weights::kappa(v, &cfg.sup)?;
    let ratio = ko.value / kv.value;
    let sigma = ratio.abs() * (ko.error / ko.value.abs() + kv.error / kv.value.abs());
    let margin = (4.0 * sigma + 1e-9).clamp(1e-4, 0.05 * p);
    Ok(KappaCriterion {
        ratio,
        margin,
        holds: ratio < p - margin,
        boundary: (ratio - p).abs() <= margin,
        kappa_omega: ko,
        kappa_v: kv,
    })
}

// ---------------------------------------------------------------------------
// exponent window
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExponentWindow {
    pub m: f64,
    pub big_m: f64,
}

const WINDOW_PROBE_DEPTH: u32 = 96;

/// Self-improvement window of the EImpr condition at exponent p: `m` is the
/// supremum of admissible decrements delta (sup condition still holds at
/// p - delta), `big_m` the infimum of delta making the full tail integral
/// converge. Bisection brackets each transition; a structural refinement
/// (1/sup is asymptotically linear in the exponent; the tail's panel-decay
/// exponent is linear too) then pins the critical exponent well below the
/// grid resolution.
pub fn exponent_window(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    cfg: &CondConfig,
) -> Result<ExponentWindow> {
    let probe_cfg = CondConfig {
        sup: SupConfig { grid: DyadicGrid::new(WINDOW_PROBE_DEPTH), ..cfg.sup },
        ..*cfg
    };
    let at = |q: f64| -> Result<SupVerdict> {
        let values = condition_values_any_p(ConditionId::EImpr, omega, v, q, &probe_cfg)?;
        Ok(SupVerdict::from_values(&values, &probe_cfg.sup))
    };
    let holds_at = |q: f64| -> Result<bool> { Ok(at(q)?.verdict == Verdict::Bounded) };

    if !holds_at(p)? {
        return Err(Error::Precondition(format!(
            "the tail-ratio condition does not hold at p = {p}; no window exists"
        )));
    }

    // --- m: sup-condition bisection + 1/sup refinement -------------------
    let mut lo = 0.0; // holds
    let mut hi = p; // fails (the exponent collapses)
    while hi - lo > (1e-3f64).min(0.02 * p) {
        let mid = 0.5 * (lo + hi);
        if holds_at(p - mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q_coarse = p - 0.5 * (lo + hi);
    let mut m = p - q_coarse;
    // refine: on the held side the plateau scales like c/(q - q*), so 1/sup
    // is linear in q and its root is the critical exponent
    let dq = (0.06 * p).max(4.0 * (hi - lo));
    let s1 = at(q_coarse + dq)?;
    let s2 = at(q_coarse + 2.0 * dq)?;
    if s1.verdict == Verdict::Bounded && s2.verdict == Verdict::Bounded {
        let (y1, y2) = (1.0 / s1.sup_value, 1.0 / s2.sup_value);
        if y2 > y1 && y1 > 0.0 {
            let root = (q_coarse + dq) - y1 * dq / (y2 - y1);
            if (root - q_coarse).abs() <= 2.0 * dq {
                m = (p - root).clamp(1e-6, p - 1e-6);
            }
        }
    }

    // --- M: tail-convergence bisection + decay-exponent secant -----------
    let tail_exponent = |q: f64| -> Result<f64> {
        quad::tail_decay_exponent(
            |u: f64| {
                (v.tail_s(u).unwrap_or(f64::NAN).ln() - q * omega.tail_s(u).unwrap_or(f64::NAN).ln()
                    - u.ln())
                .exp()
            },
            0.5,
            240,
        )
    };
    let converges_at = |q: f64| -> Result<bool> { Ok(tail_exponent(q)? > 0.0) };

    // delta = p - q; integral converges for small q (large delta)
    let mut lo_q = 1e-6; // converges
    let mut hi_q = p; // diverges (holds at p means the inner integral blows at r -> 1)
    if !converges_at(lo_q)? {
        return Err(Error::numeric("tail integral diverges even at exponent ~0", f64::NAN));
    }
    while hi_q - lo_q > (1e-3f64).min(0.02 * p) {
        let mid = 0.5 * (lo_q + hi_q);
        if converges_at(mid)? {
            lo_q = mid;
        } else {
            hi_q = mid;
        }
    }
    let mut big_m = p - 0.5 * (lo_q + hi_q);
    // refine: the measured decay exponent is linear in q; secant for its root
    let dqm = (0.05 * p).max(4.0 * (hi_q - lo_q));
    let q1 = (0.5 * (lo_q + hi_q) - dqm).max(1e-6);
    let q2 = 0.5 * (lo_q + hi_q) + dqm;
    let (e1, e2) = (tail_exponent(q1)?, tail_exponent(q2)?);
    if (e2 - e1).abs() > 1e-9 {
        let root = q1 - e1 * (q2 - q1) / (e2 - e1);
        if (root - 0.5 * (lo_q + hi_q)).abs() <= 2.0 * dqm {
            big_m = (p - root).clamp(1e-6, p - 1e-6);
        }
    }

    Ok(ExponentWindow { m, big_m })
}

// ---------------------------------------------------------------------------
// Hardy-type integral
// ---------------------------------------------------------------------------

/// K(r) = int_0^r dt / (what(t)(1-t)).
pub fn hardy_k(omega: &RadialWeight, r: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Precondition(format!("hardy integral needs r in [0,1), got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let q = quad::integrate(
        |u: f64| (-(omega.tail_s(u).unwrap_or(f64::NAN).ln()) - u.ln()).exp(),
        1.0 - r,
        1.0,
        tol,
    )?;
    Ok(q.value)
}

// ---------------------------------------------------------------------------
// regularity characterizations (auxiliary exponent a)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct SubCheck {
    /// None when the sub-check could not be evaluated
    pub holds: Option<bool>,
    pub sup_value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Lemma9Report {
    pub schema: u32,
    pub weight: String,
    pub alpha: f64,
    pub ii: SubCheck,
    pub iii: SubCheck,
    pub iv: SubCheck,
}

/// Check the three derived-weight characterizations of regularity at
/// auxiliary exponent a > 1: (ii) psi~ of w1 = w^{1-a}(1-r)^{-a} compares to
/// 1-r both ways; (iii) local comparability plus the mixed product bound;
/// (iv) w2 = (w(1-r))^{-1/a} w is itself regular.
pub fn lemma9_check(w: &RadialWeight, alpha: f64, cfg: &CondConfig) -> Result<Lemma9Report> {
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("auxiliary exponent must be > 1, got {alpha}")));
    }
    let grid = cfg.sup.grid;
    check_positive(w, w, ConditionId::L9ii, &grid)?;

    let wc = w.clone();
    let a = alpha;
    let w1 = RadialWeight::from_fn(format!("n1[a={a}]({})", w.spec()), move |s| {
        ((1.0 - a) * wc.eval_s(s).ln() - a * s.ln()).exp()
    })
    .with_tol(w.tol());
    let wc = w.clone();
    let w2 = RadialWeight::from_fn(format!("n2[a={a}]({})", w.spec()), move |s| {
        ((-1.0 / a) * (wc.eval_s(s).ln() + s.ln()) + wc.eval_s(s).ln()).exp()
    })
    .with_tol(w.tol());

    // (ii): psi~_{w1}(r)/(1-r) bounded above and below
    let ii = (|| -> Result<SubCheck> {
        let mut vals = Vec::with_capacity(grid.depth as usize);
        for k in grid.levels() {
            vals.push(w1.psi_tilde(grid.r(k))? / grid.s(k));
        }
        let up = SupVerdict::from_values(&vals, &cfg.sup);
        let inv: Vec<f64> = vals.iter().map(|v| 1.0 / v).collect();
        let dn = SupVerdict::from_values(&inv, &cfg.sup);
        let holds = up.verdict == Verdict::Bounded && dn.verdict == Verdict::Bounded;
        Ok(SubCheck {
            holds: Some(holds),
            sup_value: up.sup_value,
            detail: format!("upper {:?}, lower {:?}", up.verdict, dn.verdict),
        })
    })();

    // (iii): local comparability probe plus sup of the mixed product
    let iii = (|| -> Result<SubCheck> {
        for k in 1..grid.depth {
            let (r, s) = (grid.r(k), grid.s(k));
            let samples = [w.eval_r(r), w.eval_r(r + 0.25 * s), w.eval_r(r + 0.5 * s)];
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for v in samples {
                if !(v.is_finite() && v > 0.0) {
                    return Ok(SubCheck {
                        holds: Some(false),
                        sup_value: f64::NAN,
                        detail: format!("weight not positive near r = {r}"),
                    });
                }
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi / lo > 50.0 {
                return Ok(SubCheck {
                    holds: Some(false),
                    sup_value: hi / lo,
                    detail: format!("local comparability fails at level {k} (ratio {})", hi / lo),
                });
            }
        }
        let mut vals = Vec::with_capacity(grid.depth as usize);
        for k in grid.levels() {
            let (r, s) = (grid.r(k), grid.s(k));
            let t1 = w1.psi_tilde(r)? / s;
            let t2 = w.psi(r)? / s;
            vals.push(t1 * t2.powf(alpha - 1.0));
        }
        let sup = SupVerdict::from_values(&vals, &cfg.sup);
        Ok(SubCheck {
            holds: Some(sup.verdict == Verdict::Bounded),
            sup_value: sup.sup_value,
            detail: format!("mixed product {:?}", sup.verdict),
        })
    })();

    // (iv): classify the companion weight
    let iv = match weights::classify(&w2, &cfg.sup) {
        Ok(rep) => SubCheck {
            holds: Some(rep.class == WeightClass::Regular),
            sup_value: rep.regularity_ratio_range.1,
            detail: format!("companion weight classifies {:?}", rep.class),
        },
        Err(e) => SubCheck { holds: None, sup_value: f64::NAN, detail: format!("classification failed: {e}") },
    };

    let pack = |r: Result<SubCheck>| match r {
        Ok(s) => s,
        Err(e) => SubCheck { holds: None, sup_value: f64::NAN, detail: format!("{e}") },
    };

    Ok(Lemma9Report {
        schema: 1,
        weight: w.spec().to_string(),
        alpha,
        ii: pack(ii),
        iii: pack(iii),
        iv,
    })
}
