//! Radial weight families on the unit disc and their derived functionals.
//!
//! A weight is stored through its boundary-distance profile s -> w(1-s),
//! s in (0,1], which keeps every evaluation near r = 1 cancellation-free.
//! The derived quantities follow the usual conventions:
//!
//! ```text
//! tail      what(r)   = int_r^1 w(s) ds
//! head                = int_0^r w(s) ds
//! star      w*(r)     = int_r^1 w(s) log(s/r) s ds          (r > 0)
//! moment    w_x       = int_0^1 r^{2x+1} w(r) dr
//! psi       psi(r)    = what(r) / w(r)
//! psi~                = head(r) / w(r)
//! kappa               = lim_{r->1} psi(r)/(1-r)
//! ```
//!
//! Families `std` and `pow` carry exact closed forms for the tail and the
//! moments; `log` (depth 0) and `reglog` (integer log exponent) carry exact
//! tails. Everything else goes through boundary-aware quadrature.

use crate::error::{Error, Result};
use crate::quad::{self, extrapolate_limit, DyadicGrid, IntegralOutcome, SupConfig, SupVerdict, Verdict};
use crate::special::ln_beta;
use std::fmt;
use std::sync::Arc;

/// Default relative quadrature tolerance for weight functionals.
pub const DEFAULT_TOL: f64 = 1e-10;

type EvalFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Family metadata, kept for closed-form dispatch and report echoes.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum FamilyKind {
    /// (alpha+1) (1-r^2)^alpha, alpha > -1; kernel is exactly (1-z conj(a))^{-(2+alpha)}
    Std { alpha: f64 },
    /// (1-r)^alpha, alpha > -1
    Pow { alpha: f64 },
    /// nested-log weight, rapidly increasing for alpha > 1:
    /// 1 / ((1-r) L_1 ... L_depth L_{depth+1}^alpha) with L_1 = log(e/(1-r)), L_{n+1} = 1 + log L_n
    Log { alpha: f64, depth: u32 },
    /// (1-r)^a log(e/(1-r))^b, a > -1
    RegLog { a: f64, b: f64 },
    /// exp(-c/(1-r)), c > 0; integrable but not doubling
    Exp { c: f64 },
    Tabulated,
    Derived,
}

struct Inner {
    family: FamilyKind,
    spec: String,
    normalized: bool,
    tol: f64,
    /// s -> w(1-s), s in (0,1]
    eval: EvalFn,
    /// s -> what(1-s), exact
    tail_cf: Option<EvalFn>,
    /// x -> w_x, exact
    moment_cf: Option<EvalFn>,
    /// valid s range; evaluations outside return NaN (tabulated weights)
    s_domain: (f64, f64),
}

/// A radial weight; cheap to clone, immutable after construction.
#[derive(Clone)]
pub struct RadialWeight(Arc<Inner>);

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({})", self.0.spec)
    }
}

/// L_1 = 1 + log(1/s) = log(e/(1-r)).
fn log_l1(s: f64) -> f64 {
    1.0 - s.ln()
}

fn nested_logs(s: f64, depth: u32) -> f64 {
    // product L_1 .. L_depth
    let mut l = log_l1(s);
    let mut prod = 1.0;
    for _ in 0..depth {
        prod *= l;
        l = 1.0 + l.ln();
    }
    prod
}

fn nested_log_top(s: f64, depth: u32) -> f64 {
    // L_{depth+1}
    let mut l = log_l1(s);
    for _ in 0..depth {
        l = 1.0 + l.ln();
    }
    l
}

/// Generalized binomial coefficient recurrence for the std tail series.
fn std_tail_series(alpha: f64, s: f64) -> f64 {
    // int_0^s u^a (2-u)^a du = 2^a sum_j C(a,j) (-1/2)^j s^{a+1+j} / (a+1+j)
    let mut coef = 1.0; // C(alpha, j)
    let mut sum = 0.0;
    let mut s_pow = s.powf(alpha + 1.0);
    for j in 0..400 {
        let jf = j as f64;
        if j > 0 {
            coef *= (alpha - jf + 1.0) / jf;
            s_pow *= s;
        }
        let term = coef * (-0.5f64).powi(j as i32) * s_pow / (alpha + 1.0 + jf);
        sum += term;
        if j > 2 && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    (alpha + 1.0) * 2.0f64.powf(alpha) * sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom_u32(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl RadialWeight {
    fn new(inner: Inner) -> Self {
        RadialWeight(Arc::new(inner))
    }

    /// Parse a weight spec: `family ':' key '=' value (',' key '=' value)*`.
    ///
    /// Families: std|pow|log|reglog|exp|tabulated. All families accept
    /// `norm=1` to rescale the total mass int_0^1 w to 1.
    pub fn parse(spec: &str) -> Result<RadialWeight> {
        let spec = spec.trim();
        let (family, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse(spec, "expected `family:key=value[,...]`"))?;
        let mut keys: Vec<(String, String)> = Vec::new();
        for piece in rest.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::parse(piece, "empty key=value entry"));
            }
            let (k, v) = piece
                .split_once('=')
                .ok_or_else(|| Error::parse(piece, "expected `key=value`"))?;
            keys.push((k.trim().to_string(), v.trim().to_string()));
        }
        let get_num = |name: &str| -> Result<Option<f64>> {
            for (k, v) in &keys {
                if k == name {
                    return v
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::parse(v.clone(), format!("not a number for key `{name}`")));
                }
            }
            Ok(None)
        };
        let known = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &keys {
                if !allowed.contains(&k.as_str()) && k != "norm" {
                    return Err(Error::parse(k.clone(), format!("unknown key for family `{family}`")));
                }
            }
            Ok(())
        };

        let w = match family {
            "std" => {
                known(&["a"])?;
                let alpha =
                    get_num("a")?.ok_or_else(|| Error::parse(spec, "std needs key a"))?;
                if alpha <= -1.0 {
                    return Err(Error::Domain(format!("std exponent must be > -1, got {alpha}")));
                }
                Self::std(alpha)
            }
            "pow" => {
                known(&["a"])?;
                let alpha =
                    get_num("a")?.ok_or_else(|| Error::parse(spec, "pow needs key a"))?;
                if alpha <= -1.0 {
                    return Err(Error::Domain(format!("pow exponent must be > -1, got {alpha}")));
                }
                Self::pow(alpha)
            }
            "log" => {
                known(&["a", "n"])?;
                let alpha =
                    get_num("a")?.ok_or_else(|| Error::parse(spec, "log needs key a"))?;
                if alpha <= 1.0 {
                    return Err(Error::Domain(format!(
                        "log family needs a > 1 for integrability, got {alpha}"
                    )));
                }
                let depth = get_num("n")?.unwrap_or(0.0);
                if depth < 0.0 || depth.fract() != 0.0 || depth > 8.0 {
                    return Err(Error::Domain(format!("log depth must be an integer in 0..=8, got {depth}")));
                }
                Self::log_family(alpha, depth as u32)
            }
            "reglog" => {
                known(&["a", "b"])?;
                let a = get_num("a")?.ok_or_else(|| Error::parse(spec, "reglog needs key a"))?;
                if a <= -1.0 {
                    return Err(Error::Domain(format!("reglog exponent a must be > -1, got {a}")));
                }
                let b = get_num("b")?.unwrap_or(0.0);
                Self::reglog(a, b)
            }
            "exp" => {
                known(&["c"])?;
                let c = get_num("c")?.ok_or_else(|| Error::parse(spec, "exp needs key c"))?;
                if c <= 0.0 {
                    return Err(Error::Domain(format!("exp rate must be > 0, got {c}")));
                }
                Self::exp_family(c)
            }
            "tabulated" => {
                let path = keys
                    .iter()
                    .find(|(k, _)| k == "file")
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| Error::parse(spec, "tabulated needs key file"))?;
                for (k, _) in &keys {
                    if k != "file" && k != "norm" {
                        return Err(Error::parse(k.clone(), "unknown key for family `tabulated`"));
                    }
                }
                Self::tabulated_from_csv(&path)?
            }
            other => return Err(Error::parse(other, "unknown weight family")),
        };

        let norm = get_num("norm")?.unwrap_or(0.0);
        if norm != 0.0 && norm != 1.0 {
            return Err(Error::parse(format!("norm={norm}"), "norm must be 0 or 1"));
        }
        let w = if norm == 1.0 { w.normalize()? } else { w };
        Ok(w.relabel(spec))
    }

    pub fn std(alpha: f64) -> RadialWeight {
        assert!(alpha > -1.0);
        RadialWeight::new(Inner {
            family: FamilyKind::Std { alpha },
            spec: format!("std:a={alpha}"),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| (alpha + 1.0) * (s * (2.0 - s)).powf(alpha)),
            tail_cf: Some(Box::new(move |s| std_tail_series(alpha, s))),
            moment_cf: Some(Box::new(move |x| {
                0.5 * (alpha + 1.0) * ln_beta(x + 1.0, alpha + 1.0).exp()
            })),
            s_domain: (0.0, 1.0),
        })
    }

    pub fn pow(alpha: f64) -> RadialWeight {
        assert!(alpha > -1.0);
        RadialWeight::new(Inner {
            family: FamilyKind::Pow { alpha },
            spec: format!("pow:a={alpha}"),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| s.powf(alpha)),
            tail_cf: Some(Box::new(move |s| s.powf(alpha + 1.0) / (alpha + 1.0))),
            moment_cf: Some(Box::new(move |x| ln_beta(2.0 * x + 2.0, alpha + 1.0).exp())),
            s_domain: (0.0, 1.0),
        })
    }

    pub fn log_family(alpha: f64, depth: u32) -> RadialWeight {
        assert!(alpha > 1.0);
        let tail = if depth == 0 {
            let a = alpha;
            Some(Box::new(move |s: f64| log_l1(s).powf(1.0 - a) / (a - 1.0)) as EvalFn)
        } else {
            None
        };
        RadialWeight::new(Inner {
            family: FamilyKind::Log { alpha, depth },
            spec: if depth == 0 { format!("log:a={alpha}") } else { format!("log:a={alpha},n={depth}") },
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| {
                1.0 / (s * nested_logs(s, depth) * nested_log_top(s, depth).powf(alpha))
            }),
            tail_cf: tail,
            moment_cf: None,
            s_domain: (0.0, 1.0),
        })
    }

    pub fn reglog(a: f64, b: f64) -> RadialWeight {
        assert!(a > -1.0);
        // exact tail when b is a nonnegative integer
        let tail = if b >= 0.0 && b.fract() == 0.0 && b <= 20.0 {
            let bi = b as u32;
            Some(Box::new(move |s: f64| {
                let l = log_l1(s);
                let mut sum = 0.0;
                for j in 0..=bi {
                    sum += binom_u32(bi, j)
                        * l.powi((bi - j) as i32)
                        * factorial(j)
                        / (a + 1.0).powi(j as i32 + 1);
                }
                s.powf(a + 1.0) * sum
            }) as EvalFn)
        } else {
            None
        };
        RadialWeight::new(Inner {
            family: FamilyKind::RegLog { a, b },
            spec: format!("reglog:a={a},b={b}"),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| s.powf(a) * log_l1(s).powf(b)),
            tail_cf: tail,
            moment_cf: None,
            s_domain: (0.0, 1.0),
        })
    }

    pub fn exp_family(c: f64) -> RadialWeight {
        assert!(c > 0.0);
        RadialWeight::new(Inner {
            family: FamilyKind::Exp { c },
            spec: format!("exp:c={c}"),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| (-c / s).exp()),
            tail_cf: None,
            moment_cf: None,
            s_domain: (0.0, 1.0),
        })
    }

    /// Wrap an arbitrary boundary-distance profile s -> w(1-s).
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> RadialWeight {
        RadialWeight::new(Inner {
            family: FamilyKind::Derived,
            spec: label.into(),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(f),
            tail_cf: None,
            moment_cf: None,
            s_domain: (0.0, 1.0),
        })
    }

    /// CSV with header `s,omega`, interpolated by monotone cubics in log s.
    /// Evaluation outside the tabulated s range returns NaN, which downstream
    /// quadrature reports as an error: extrapolation is forbidden.
    pub fn tabulated_from_csv(path: &str) -> Result<RadialWeight> {
        let text = std::fs::read_to_string(path)?;
        Self::tabulated_from_text(&text, &format!("tabulated:file={path}"))
    }

    pub fn tabulated_from_text(text: &str, label: &str) -> Result<RadialWeight> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse("<empty>", "empty CSV"))?;
        let header_norm: String = header.split(',').map(|h| h.trim().to_lowercase()).collect::<Vec<_>>().join(",");
        if header_norm != "s,omega" {
            return Err(Error::parse(header, "CSV header must be `s,omega`"));
        }
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for line in lines {
            let mut it = line.split(',');
            let s: f64 = it
                .next()
                .ok_or_else(|| Error::parse(line, "missing s column"))?
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, "bad s value"))?;
            let w: f64 = it
                .next()
                .ok_or_else(|| Error::parse(line, "missing omega column"))?
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, "bad omega value"))?;
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::Domain(format!("tabulated s must lie in (0,1], got {s}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Domain(format!("tabulated omega must be finite and >= 0, got {w}")));
            }
            pts.push((s, w));
        }
        if pts.len() < 4 {
            return Err(Error::Domain("tabulated weight needs at least 4 rows".into()));
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (s_min, s_max) = (pts[0].0, pts[pts.len() - 1].0);
        let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let interp = Pchip::new(&xs, &ys)?;
        Ok(RadialWeight::new(Inner {
            family: FamilyKind::Tabulated,
            spec: label.to_string(),
            normalized: false,
            tol: DEFAULT_TOL,
            eval: Box::new(move |s| {
                if s < s_min || s > s_max {
                    f64::NAN
                } else {
                    interp.eval(s.ln()).max(0.0)
                }
            }),
            tail_cf: None,
            moment_cf: None,
            s_domain: (s_min, s_max),
        }))
    }

    /// Rebuild around the same profile with a scale factor and fresh
    /// metadata. A scale other than 1 demotes the family to Derived: closed
    /// forms still apply (scaled), but family-specific identities such as the
    /// std kernel closed form no longer do.
    fn rebuild(&self, spec: String, tol: f64, scale: f64, normalized: bool) -> RadialWeight {
        let family = if scale == 1.0 { self.0.family.clone() } else { FamilyKind::Derived };
        let p_eval = self.clone();
        let p_tail = self.clone();
        let p_mom = self.clone();
        RadialWeight::new(Inner {
            family,
            spec,
            normalized,
            tol,
            eval: Box::new(move |s| scale * (p_eval.0.eval)(s)),
            tail_cf: self.0.tail_cf.as_ref().map(|_| {
                Box::new(move |s: f64| scale * (p_tail.0.tail_cf.as_ref().unwrap())(s)) as EvalFn
            }),
            moment_cf: self.0.moment_cf.as_ref().map(|_| {
                Box::new(move |x: f64| scale * (p_mom.0.moment_cf.as_ref().unwrap())(x)) as EvalFn
            }),
            s_domain: self.0.s_domain,
        })
    }

    fn relabel(self, spec: &str) -> RadialWeight {
        self.rebuild(spec.to_string(), self.0.tol, 1.0, self.0.normalized)
    }

    pub fn family(&self) -> &FamilyKind {
        &self.0.family
    }

    pub fn spec(&self) -> &str {
        &self.0.spec
    }

    pub fn is_normalized(&self) -> bool {
        self.0.normalized
    }

    pub fn tol(&self) -> f64 {
        self.0.tol
    }

    pub fn s_domain(&self) -> (f64, f64) {
        self.0.s_domain
    }

    pub fn with_tol(&self, tol: f64) -> RadialWeight {
        assert!(tol > 0.0);
        self.rebuild(self.0.spec.clone(), tol, 1.0, self.0.normalized)
    }

    /// w(1-s) for s in (0,1].
    pub fn eval_s(&self, s: f64) -> f64 {
        (self.0.eval)(s)
    }

    /// w(r) for r in [0,1).
    pub fn eval_r(&self, r: f64) -> f64 {
        self.eval_s(1.0 - r)
    }

    /// Positive rescaling c*w. Class membership and kappa are invariant.
    pub fn scale(&self, c: f64) -> RadialWeight {
        assert!(c > 0.0 && c.is_finite());
        self.rebuild(format!("scale({c})*{}", self.0.spec), self.0.tol, c, false)
    }

    /// Rescale so that int_0^1 w = 1.
    pub fn normalize(&self) -> Result<RadialWeight> {
        let mass = self.mass()?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("mass {mass} not normalizable")));
        }
        Ok(self.rebuild(format!("norm({})", self.0.spec), self.0.tol, 1.0 / mass, true))
    }

    /// Total mass int_0^1 w(s) ds = what(0).
    pub fn mass(&self) -> Result<f64> {
        self.tail(0.0)
    }

    /// what(r) = int_r^1 w; closed form when the family has one.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Precondition(format!("tail needs r in [0,1), got {r}")));
        }
        self.tail_s(1.0 - r)
    }

    /// Tail in boundary-distance form: int over distance (0, s].
    pub fn tail_s(&self, s: f64) -> Result<f64> {
        if let Some(cf) = &self.0.tail_cf {
            return Ok(cf(s));
        }
        integral_value(|u| self.eval_s(u), 0.0, s, self.0.tol, "tail integral")
    }

    /// head(r) = int_0^r w.
    pub fn head(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Precondition(format!("head needs r in [0,1), got {r}")));
        }
        let s = 1.0 - r;
        integral_value(|u| self.eval_s(u), s, 1.0, self.0.tol, "head integral")
    }

    /// w*(r) = int_r^1 w(t) log(t/r) t dt for r in (0,1).
    pub fn star(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("associated weight needs r in (0,1), got {r}")));
        }
        let s = 1.0 - r;
        // log(t/r) with t = 1-u: log1p((s-u)/r), positive integrand throughout
        integral_value(
            |u| self.eval_s(u) * ((s - u) / r).ln_1p() * (1.0 - u),
            0.0,
            s,
            self.0.tol,
            "associated weight integral",
        )
    }

    /// w_x = int_0^1 r^{2x+1} w(r) dr, x >= 0.
    pub fn moment(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Precondition(format!("moment needs x >= 0, got {x}")));
        }
        if let Some(cf) = &self.0.moment_cf {
            return Ok(cf(x));
        }
        let e = 2.0 * x + 1.0;
        integral_value(
            |s: f64| (e * (-s).ln_1p()).exp() * self.eval_s(s),
            0.0,
            1.0,
            self.0.tol,
            "moment integral",
        )
    }

    /// w(D) = 2 int_0^1 s w(s) ds.
    pub fn area_mass(&self) -> Result<f64> {
        Ok(2.0 * self.moment(0.0)?)
    }

    /// psi(r) = what(r)/w(r).
    pub fn psi(&self, r: f64) -> Result<f64> {
        let w = self.eval_r(r);
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!("weight vanishes at r={r}; psi undefined")));
        }
        Ok(self.tail(r)? / w)
    }

    /// psi~(r) = head(r)/w(r).
    pub fn psi_tilde(&self, r: f64) -> Result<f64> {
        let w = self.eval_r(r);
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!("weight vanishes at r={r}; psi~ undefined")));
        }
        Ok(self.head(r)? / w)
    }

    /// Pointwise (1-r)^beta w(r). Pow stays closed-form; anything else is a
    /// derived weight whose integrability is probed.
    pub fn shift(&self, beta: f64) -> Result<RadialWeight> {
        if let FamilyKind::Pow { alpha } = self.0.family {
            let a2 = alpha + beta;
            if a2 <= -1.0 {
                return Err(Error::Domain(format!("shift makes pow exponent {a2} <= -1")));
            }
            return Ok(RadialWeight::pow(a2));
        }
        let p = self.clone();
        let w = RadialWeight::from_fn(format!("shift({beta})*{}", self.0.spec), move |s| {
            s.powf(beta) * p.eval_s(s)
        })
        .with_tol(self.0.tol);
        match w.mass() {
            Ok(m) if m.is_finite() && m > 0.0 => Ok(w),
            Ok(m) => Err(Error::Domain(format!("shifted weight has mass {m}"))),
            Err(Error::Domain(d)) => Err(Error::Domain(format!("shifted weight not integrable: {d}"))),
            Err(e) => Err(e),
        }
    }
}

/// Finite value of an integral, accepting model-converged outcomes with
/// their honest error estimate (log-scale tails cannot reach arbitrary
/// tolerances in f64; ratios of such values are still accurate).
fn integral_value(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, what: &str) -> Result<f64> {
    match quad::integrate_full(&f, a, b, tol)? {
        IntegralOutcome::Converged(q) => Ok(q.value),
        IntegralOutcome::Diverged => Err(Error::Domain(format!("{what} diverges"))),
        IntegralOutcome::Ambiguous { achieved, .. } => {
            Err(Error::numeric(format!("{what} did not converge"), achieved))
        }
    }
}

/// V_{p'}(r) = (w(r)/v(r))^{p'} v(r), p' = p/(p-1), as an evaluator-backed weight.
pub fn transform_v(omega: &RadialWeight, v: &RadialWeight, p: f64) -> Result<RadialWeight> {
    if p <= 1.0 {
        return Err(Error::Domain(format!("transform needs p > 1, got {p}")));
    }
    let pp = p / (p - 1.0);
    for k in 1..=40u32 {
        let s = 2.0f64.powi(-(k as i32));
        let vv = v.eval_s(s);
        if !(vv.is_finite() && vv > 0.0) && s >= v.s_domain().0 {
            return Err(Error::Domain(format!("v vanishes at s={s}; V transform undefined")));
        }
    }
    let om = omega.clone();
    let vv = v.clone();
    Ok(RadialWeight::from_fn(
        format!("V[p'={pp:.6}]({}, {})", omega.spec(), v.spec()),
        move |s| {
            let w = om.eval_s(s);
            let vs = vv.eval_s(s);
            (w / vs).powf(pp) * vs
        },
    )
    .with_tol(omega.tol()))
}

// ---------------------------------------------------------------------------
// monotone cubic interpolation (tabulated weights)
// ---------------------------------------------------------------------------

/// Fritsch-Carlson monotone slopes for a cubic Hermite interpolant.
pub(crate) fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::Domain("interpolation needs >= 3 points".into()));
    }
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("interpolation abscissas must be strictly increasing".into()));
        }
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut ms = vec![0.0; n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            ms[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            ms[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    ms[0] = edge_slope(h[0], h[1], d[0], d[1]);
    ms[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    Ok(ms)
}

pub(crate) fn pchip_eval(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(n - 2),
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * ms[i] + h01 * ys[i + 1] + h11 * h * ms[i + 1]
}

struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl Pchip {
    fn new(xs: &[f64], ys: &[f64]) -> Result<Pchip> {
        let ms = pchip_slopes(xs, ys)?;
        Ok(Pchip { xs: xs.to_vec(), ys: ys.to_vec(), ms })
    }

    fn eval(&self, x: f64) -> f64 {
        pchip_eval(&self.xs, &self.ys, &self.ms, x)
    }
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightClass {
    Regular,
    RapidlyIncreasing,
    DoublingOnly,
    NonDoubling,
    Inconclusive,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DoublingReport {
    /// max over the grid of what(r)/what((1+r)/2)
    pub constant: f64,
    /// max pairwise exponent log(what(r)/what(t)) / log((1-r)/(1-t))
    pub exponent: f64,
    pub ok: bool,
    pub trend: Verdict,
    /// deepest level with a representable tail (tails underflow for very
    /// thin weights; never silently treated as zero)
    pub levels_used: u32,
    pub truncated: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KappaEstimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassificationReport {
    pub schema: u32,
    pub weight: String,
    pub class: WeightClass,
    pub doubling_constant: Option<f64>,
    pub doubling_exponent: Option<f64>,
    pub regularity_ratio_range: (f64, f64),
    pub kappa: Option<KappaEstimate>,
    pub grid_depth: u32,
    pub truncated_depth: Option<u32>,
    pub notes: Vec<String>,
}

/// Regular-class ratio-range bound: max/min of psi(r)/(1-r) over the grid.
pub const REGULAR_RANGE_BOUND: f64 = 1e3;
/// Tolerance factor operationalizing "essentially increasing".
pub const ESSENTIAL_MONOTONE_SLACK: f64 = 1.05;

/// Doubling constant and exponent estimates over the dyadic grid.
pub fn doubling_report(w: &RadialWeight, cfg: &SupConfig) -> Result<DoublingReport> {
    let depth = cfg.grid.depth;
    // tails at levels 0..=depth (level 0 is r=0)
    let mut tails: Vec<f64> = Vec::with_capacity(depth as usize + 1);
    let mut truncated = false;
    for k in 0..=depth {
        let s = if k == 0 { 1.0 } else { cfg.grid.s(k) };
        if s < w.s_domain().0 {
            truncated = true;
            break;
        }
        match w.tail_s(s) {
            Ok(t) if t.is_finite() && t > 1e-300 => tails.push(t),
            Ok(_) => {
                truncated = true;
                break;
            }
            Err(Error::Domain(d)) => return Err(Error::Domain(d)),
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }
    if tails.len() < 7 {
        return Err(Error::numeric(
            format!("doubling probe for {} has only {} usable levels", w.spec(), tails.len()),
            f64::NAN,
        ));
    }
    let ratios: Vec<f64> = tails.windows(2).map(|t| t[0] / t[1]).collect();
    let constant = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut exponent = f64::NEG_INFINITY;
    for j in 0..tails.len() {
        for k in (j + 1)..tails.len() {
            let e = (tails[j] / tails[k]).ln() / ((k - j) as f64 * std::f64::consts::LN_2);
            exponent = exponent.max(e);
        }
    }
    let sub = SupConfig { grid: DyadicGrid::new(ratios.len() as u32), ..*cfg };
    let trend = SupVerdict::from_values(&ratios, &sub).verdict;
    Ok(DoublingReport {
        constant,
        exponent,
        ok: trend == Verdict::Bounded,
        trend,
        levels_used: tails.len() as u32 - 1,
        truncated,
    })
}

/// Class decision per the ratio psi(r)/(1-r) and the doubling trend.
pub fn classify(w: &RadialWeight, cfg: &SupConfig) -> Result<ClassificationReport> {
    let mut notes = Vec::new();
    let base = |class: WeightClass, notes: Vec<String>| ClassificationReport {
        schema: 1,
        weight: w.spec().to_string(),
        class,
        doubling_constant: None,
        doubling_exponent: None,
        regularity_ratio_range: (f64::NAN, f64::NAN),
        kappa: None,
        grid_depth: cfg.grid.depth,
        truncated_depth: None,
        notes,
    };

    let doubling = match doubling_report(w, cfg) {
        Ok(d) => d,
        Err(Error::Domain(d)) => {
            notes.push(format!("tail integral diverges: {d}"));
            return Ok(base(WeightClass::Inconclusive, notes));
        }
        Err(e) => {
            notes.push(format!("doubling probe failed: {e}"));
            return Ok(base(WeightClass::Inconclusive, notes));
        }
    };
    let levels = doubling.levels_used.min(cfg.grid.depth);
    if doubling.truncated {
        notes.push(format!("grid truncated to {} levels (tail underflow)", levels));
    }

    match doubling.trend {
        Verdict::Divergent => {
            let mut rep = base(WeightClass::NonDoubling, notes);
            rep.truncated_depth = doubling.truncated.then_some(levels);
            return Ok(rep);
        }
        Verdict::Inconclusive => {
            let mut rep = base(WeightClass::Inconclusive, notes);
            rep.doubling_constant = Some(doubling.constant);
            rep.doubling_exponent = Some(doubling.exponent);
            rep.truncated_depth = doubling.truncated.then_some(levels);
            return Ok(rep);
        }
        Verdict::Bounded => {}
    }

    // psi(r_k)/(1-r_k) over usable levels
    let mut ratios: Vec<f64> = Vec::with_capacity(levels as usize);
    for k in 1..=levels {
        let r = cfg.grid.r(k);
        match w.psi(r) {
            Ok(p) => ratios.push(p / cfg.grid.s(k)),
            Err(e) => {
                notes.push(format!("psi failed at level {k}: {e}"));
                break;
            }
        }
    }
    if ratios.len() < 7 {
        let mut rep = base(WeightClass::Inconclusive, notes);
        rep.doubling_constant = Some(doubling.constant);
        rep.doubling_exponent = Some(doubling.exponent);
        return Ok(rep);
    }
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let sub = SupConfig { grid: DyadicGrid::new(ratios.len() as u32), ..*cfg };
    let upper = SupVerdict::from_values(&ratios, &sub).verdict;
    let inv: Vec<f64> = ratios.iter().map(|v| 1.0 / v).collect();
    let lower = SupVerdict::from_values(&inv, &sub).verdict;

    let mid = ratios.len() / 2;
    let essentially_increasing = ratios[mid..]
        .windows(2)
        .all(|w| w[1] >= w[0] / ESSENTIAL_MONOTONE_SLACK);

    // "bounded below" is a range statement: the inverse-ratio trend alone is
    // too strict for ratios converging slowly from above (reglog weights)
    let class = if upper == Verdict::Bounded
        && lower != Verdict::Divergent
        && rmin > 0.0
        && rmax / rmin <= REGULAR_RANGE_BOUND
    {
        WeightClass::Regular
    } else if upper == Verdict::Divergent && essentially_increasing {
        WeightClass::RapidlyIncreasing
    } else if upper == Verdict::Bounded || lower == Verdict::Divergent {
        // bounded above but collapsing below, or ratio range too wide
        WeightClass::DoublingOnly
    } else {
        WeightClass::Inconclusive
    };

    let kappa = if class == WeightClass::Regular {
        match extrapolate_limit(&ratios) {
            Ok((value, error)) => Some(KappaEstimate { value, error }),
            Err(e) => {
                notes.push(format!("kappa extrapolation failed: {e}"));
                None
            }
        }
    } else {
        None
    };

    Ok(ClassificationReport {
        schema: 1,
        weight: w.spec().to_string(),
        class,
        doubling_constant: Some(doubling.constant),
        doubling_exponent: Some(doubling.exponent),
        regularity_ratio_range: (rmin, rmax),
        kappa,
        grid_depth: cfg.grid.depth,
        truncated_depth: doubling.truncated.then_some(levels),
        notes,
    })
}

/// kappa = lim psi(r)/(1-r), for regular weights with a converging limit.
/// Returns the extrapolated limit with the last-increment error estimate.
pub fn kappa(w: &RadialWeight, cfg: &SupConfig) -> Result<KappaEstimate> {
    let rep = classify(w, cfg)?;
    if rep.class != WeightClass::Regular {
        return Err(Error::NonConvergent {
            msg: format!(
                "kappa needs a Regular weight; {} classified {:?} with ratio range {:?}",
                w.spec(),
                rep.class,
                rep.regularity_ratio_range
            ),
            tail: vec![rep.regularity_ratio_range.0, rep.regularity_ratio_range.1],
        });
    }
    rep.kappa.ok_or_else(|| Error::NonConvergent {
        msg: format!("kappa extrapolation did not converge for {}", w.spec()),
        tail: vec![rep.regularity_ratio_range.0, rep.regularity_ratio_range.1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn cfg() -> SupConfig {
        SupConfig::default()
    }

    #[test]
    fn parse_family_examples() {
        // constant weight with closed forms
        let w = RadialWeight::parse("pow:a=0").unwrap();
        assert_abs_diff_eq!(w.eval_r(0.3), 1.0);
        assert_abs_diff_eq!(w.tail(0.5).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(w.moment(3.0).unwrap(), 1.0 / 8.0, max_relative = 1e-12);

        // std:a=1 -> 2(1-r^2); value at 0.5 is 1.5
        let w = RadialWeight::parse("std:a=1").unwrap();
        assert_relative_eq!(w.eval_r(0.5), 1.5, max_relative = 1e-14);
        assert_relative_eq!(w.mass().unwrap(), 4.0 / 3.0, max_relative = 1e-12);

        // log:a=2 -> (1-r)^{-1} log(e/(1-r))^{-2}
        let w = RadialWeight::parse("log:a=2").unwrap();
        let s: f64 = 0.25;
        let expect = 1.0 / (s * (1.0 - s.ln()).powi(2));
        assert_relative_eq!(w.eval_s(s), expect, max_relative = 1e-14);
    }

    #[test]
    fn parse_errors_name_tokens() {
        match RadialWeight::parse("pow:b=1") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "b"),
            other => panic!("expected parse error, got {other:?}"),
        }
        match RadialWeight::parse("nope:a=1") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "nope"),
            other => panic!("expected parse error, got {other:?}"),
        }
        match RadialWeight::parse("pow:a=zzz") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "zzz"),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(RadialWeight::parse("pow:a=-2"), Err(Error::Domain(_))));
        assert!(matches!(RadialWeight::parse("std:a=-1"), Err(Error::Domain(_))));
        assert!(matches!(RadialWeight::parse("log:a=1"), Err(Error::Domain(_))));
        assert!(matches!(RadialWeight::parse("exp:c=0"), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_examples() {
        let w = RadialWeight::parse("pow:a=0").unwrap();
        assert_relative_eq!(w.tail(0.5).unwrap(), 0.5, max_relative = 1e-13);
        // std:a=1: what(r) = 2(1-r)^2(2+r)/3
        let w = RadialWeight::parse("std:a=1").unwrap();
        assert_relative_eq!(w.tail(0.5).unwrap(), 0.4166666666666667, max_relative = 1e-12);
        let w = RadialWeight::parse("pow:a=1").unwrap();
        assert_relative_eq!(w.tail(0.0).unwrap(), 0.5, max_relative = 1e-13);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        // closed forms agree with quadrature to 1e-8 on a probe grid; the
        // pure log family tail only converges through the power-tail model
        // (f64 cannot sample below e^-745), so it is held to 1e-3 instead
        for spec in ["std:a=0", "std:a=1", "std:a=2.5", "pow:a=0", "pow:a=1", "pow:a=2.5", "log:a=2", "reglog:a=0,b=2"] {
            let w = RadialWeight::parse(spec).unwrap();
            let tol = if spec.starts_with("log") { 1e-3 } else { 1e-8 };
            for k in [1u32, 4, 10, 20, 30] {
                let s = 2.0f64.powi(-(k as i32));
                let cf = w.tail_s(s).unwrap();
                let q = match quad::integrate_full(&|u| w.eval_s(u), 0.0, s, 1e-12).unwrap() {
                    IntegralOutcome::Converged(q) => q.value,
                    other => panic!("{spec} tail quadrature: {other:?}"),
                };
                assert_relative_eq!(cf, q, max_relative = tol);
            }
            if matches!(w.family(), FamilyKind::Std { .. } | FamilyKind::Pow { .. }) {
                for x in [0.0, 1.0, 2.0, 7.5] {
                    let cf = w.moment(x).unwrap();
                    let e = 2.0 * x + 1.0;
                    let q = quad::integrate(|s: f64| (e * (-s).ln_1p()).exp() * w.eval_s(s), 0.0, 1.0, 1e-12)
                        .unwrap()
                        .value;
                    assert_relative_eq!(cf, q, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn star_examples() {
        let w = RadialWeight::parse("pow:a=0").unwrap();
        // closed form: w*(r) = (r^2-1)/4 - log(r)/2; at 0.5: log(2)/2 - (1-r^2)/4
        assert_relative_eq!(w.star(0.5).unwrap(), 0.5f64.ln().abs() / 2.0 - 0.1875, max_relative = 1e-9);
        // ratio w*/(what (1-r)) -> 1/2 at the boundary
        let r = 1.0 - 2.0f64.powi(-20);
        let ratio = w.star(r).unwrap() / (w.tail(r).unwrap() * (1.0 - r));
        assert!(ratio > 0.4 && ratio < 0.6, "ratio {ratio}");
        // positivity deep in
        let v = RadialWeight::parse("std:a=1").unwrap().star(0.999999).unwrap();
        assert!(v > 0.0 && v.is_finite());
        assert!(matches!(w.star(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn moment_examples() {
        let w = RadialWeight::parse("pow:a=0").unwrap();
        assert_relative_eq!(w.moment(2.0).unwrap(), 1.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(w.moment(0.0).unwrap(), 0.5, max_relative = 1e-12);
        let w = RadialWeight::parse("std:a=1").unwrap();
        assert_relative_eq!(w.moment(0.0).unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn psi_examples() {
        let w = RadialWeight::parse("pow:a=0").unwrap();
        assert_relative_eq!(w.psi(0.5).unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(w.psi_tilde(0.5).unwrap(), 0.5, max_relative = 1e-10);
        let w = RadialWeight::parse("pow:a=1").unwrap();
        assert_relative_eq!(w.psi(0.5).unwrap(), 0.25, max_relative = 1e-12);
        // log:a=2: psi(r)/(1-r) = log(e/(1-r)) exactly
        let w = RadialWeight::parse("log:a=2").unwrap();
        let s = 2.0f64.powi(-20);
        let want = 1.0 + 20.0 * std::f64::consts::LN_2;
        assert_relative_eq!(w.psi(1.0 - s).unwrap() / s, want, max_relative = 1e-9);
    }

    #[test]
    fn doubling_examples() {
        let d = doubling_report(&RadialWeight::parse("pow:a=0").unwrap(), &cfg()).unwrap();
        assert_relative_eq!(d.constant, 2.0, max_relative = 1e-12);
        assert_relative_eq!(d.exponent, 1.0, max_relative = 1e-10);
        assert!(d.ok);

        let d = doubling_report(&RadialWeight::parse("pow:a=1").unwrap(), &cfg()).unwrap();
        assert_relative_eq!(d.constant, 4.0, max_relative = 1e-12);
        assert_relative_eq!(d.exponent, 2.0, max_relative = 1e-10);

        let d = doubling_report(&RadialWeight::parse("exp:c=1").unwrap(), &cfg()).unwrap();
        assert!(!d.ok);
        assert!(d.truncated, "exp tails underflow at depth");
    }

    #[test]
    fn classify_examples() {
        let rep = classify(&RadialWeight::parse("pow:a=0").unwrap(), &cfg()).unwrap();
        assert_eq!(rep.class, WeightClass::Regular);
        assert_relative_eq!(rep.regularity_ratio_range.0, 1.0, max_relative = 1e-9);
        assert_relative_eq!(rep.regularity_ratio_range.1, 1.0, max_relative = 1e-9);

        let rep = classify(&RadialWeight::parse("log:a=2").unwrap(), &cfg()).unwrap();
        assert_eq!(rep.class, WeightClass::RapidlyIncreasing);

        let rep = classify(&RadialWeight::parse("exp:c=1").unwrap(), &cfg()).unwrap();
        assert_eq!(rep.class, WeightClass::NonDoubling);
        assert!(rep.doubling_constant.is_none());
    }

    #[test]
    fn kappa_examples() {
        let k = kappa(&RadialWeight::parse("pow:a=1").unwrap(), &cfg()).unwrap();
        assert_relative_eq!(k.value, 0.5, max_relative = 1e-9);
        let k = kappa(&RadialWeight::parse("pow:a=0").unwrap(), &cfg()).unwrap();
        assert_relative_eq!(k.value, 1.0, max_relative = 1e-12);
        let k = kappa(&RadialWeight::parse("std:a=2").unwrap(), &cfg()).unwrap();
        assert_abs_diff_eq!(k.value, 1.0 / 3.0, epsilon = 1e-6);
        assert!(k.error < 1e-5);
        // non-regular weight refuses with the ratio range attached
        match kappa(&RadialWeight::parse("log:a=2").unwrap(), &cfg()) {
            Err(Error::NonConvergent { tail, .. }) => assert_eq!(tail.len(), 2),
            other => panic!("expected NonConvergent, got {other:?}"),
        }
    }

    #[test]
    fn classify_scale_invariant() {
        let w = RadialWeight::parse("std:a=1").unwrap();
        let r0 = classify(&w, &cfg()).unwrap();
        for c in [1e-6, 1.0, 1e6] {
            let rep = classify(&w.scale(c), &cfg()).unwrap();
            assert_eq!(rep.class, r0.class);
            let k = rep.kappa.unwrap();
            assert_relative_eq!(k.value, r0.kappa.as_ref().unwrap().value, max_relative = 1e-9);
        }
    }

    #[test]
    fn transform_examples() {
        let v = RadialWeight::parse("pow:a=0").unwrap();
        let om = RadialWeight::parse("pow:a=1").unwrap();
        let t = transform_v(&om, &v, 2.0).unwrap();
        for r in [0.0, 0.3, 0.9, 0.999] {
            assert_relative_eq!(t.eval_r(r), (1.0f64 - r).powi(2), max_relative = 1e-12);
        }
        // identity when omega = v
        let t = transform_v(&v, &v, 3.0).unwrap();
        for r in [0.1, 0.7] {
            assert_relative_eq!(t.eval_r(r), v.eval_r(r), max_relative = 1e-13);
        }
        assert!(matches!(transform_v(&om, &v, 1.0), Err(Error::Domain(_))));
        // involution: (omega/V)^p V = v pointwise
        let p = 2.5;
        let om = RadialWeight::parse("std:a=1").unwrap();
        let v = RadialWeight::parse("pow:a=0.5").unwrap();
        let big_v = transform_v(&om, &v, p).unwrap();
        for i in 1..=100 {
            let r = i as f64 / 101.0;
            let back = (om.eval_r(r) / big_v.eval_r(r)).powf(p) * big_v.eval_r(r);
            assert_relative_eq!(back, v.eval_r(r), max_relative = 1e-12);
        }
    }

    #[test]
    fn shift_examples() {
        let w = RadialWeight::parse("pow:a=0").unwrap().shift(1.0).unwrap();
        assert!(matches!(w.family(), FamilyKind::Pow { alpha } if *alpha == 1.0));
        let w = RadialWeight::parse("pow:a=1").unwrap().shift(-1.0).unwrap();
        assert!(matches!(w.family(), FamilyKind::Pow { alpha } if *alpha == 0.0));
        // displayed integral of the shifted std:a=1 weight at beta=2 is 0.6;
        // the beta=1 shift has area mass 7/15
        let w2 = RadialWeight::parse("std:a=1").unwrap().shift(2.0).unwrap();
        assert_relative_eq!(w2.mass().unwrap(), 0.6, max_relative = 1e-10);
        let w1 = RadialWeight::parse("std:a=1").unwrap().shift(1.0).unwrap();
        assert_relative_eq!(w1.area_mass().unwrap(), 7.0 / 15.0, max_relative = 1e-10);
        // non-integrable shift is rejected
        assert!(matches!(
            RadialWeight::parse("pow:a=0").unwrap().shift(-1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn area_mass_examples() {
        assert_relative_eq!(RadialWeight::parse("pow:a=0").unwrap().area_mass().unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(RadialWeight::parse("pow:a=1").unwrap().area_mass().unwrap(), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(RadialWeight::parse("std:a=0").unwrap().area_mass().unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn normalization_flag() {
        let w = RadialWeight::parse("std:a=1,norm=1").unwrap();
        assert!(w.is_normalized());
        assert_relative_eq!(w.mass().unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn moment_tail_comparison_bounded() {
        // doubling families: moment(w,x) / what(1-1/x) stays in a fixed
        // interval with max/min <= 16 over x = 2^k, k = 0..=20
        for spec in ["pow:a=0", "pow:a=1", "pow:a=2", "std:a=0", "std:a=1", "std:a=2", "log:a=2", "reglog:a=0,b=2"] {
            let w = RadialWeight::parse(spec).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 0..=20u32 {
                let x = 2.0f64.powi(k as i32);
                let m = w.moment(x).unwrap();
                let s = 1.0 / x;
                let t = w.tail_s(s).unwrap();
                let ratio = m / t;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(hi / lo <= 16.0, "{spec}: C/c = {}", hi / lo);
        }
    }

    #[test]
    fn star_tail_comparison_bounded() {
        // w*(r) / (what(r)(1-r)) bounded over r = 1-2^-k, k <= 30
        for spec in ["pow:a=0", "pow:a=1", "std:a=2", "log:a=2"] {
            let w = RadialWeight::parse(spec).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 1..=30u32 {
                let s = 2.0f64.powi(-(k as i32));
                let ratio = w.star(1.0 - s).unwrap() / (w.tail_s(s).unwrap() * s);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(lo > 0.05 && hi < 1.5, "{spec}: [{lo}, {hi}]");
        }
    }

    #[test]
    fn moment_star_identity() {
        // w_n = 4 n^2 w*_{n-1} exactly, both sides by independent routes
        for spec in ["pow:a=0", "std:a=1"] {
            let w = RadialWeight::parse(spec).unwrap();
            for n in [1u32, 2, 5, 16, 64] {
                let lhs = w.moment(n as f64).unwrap();
                let x = n as f64 - 1.0;
                let star_m = quad::integrate(
                    |s: f64| ((2.0 * x + 1.0) * (-s).ln_1p()).exp() * w.star(1.0 - s).unwrap(),
                    0.0,
                    1.0,
                    1e-11,
                )
                .unwrap()
                .value;
                let rhs = 4.0 * (n as f64).powi(2) * star_m;
                assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn tabulated_roundtrip_and_range() {
        let dir = std::env::temp_dir().join("bergman_core_test_tab");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.csv");
        let mut text = String::from("s,omega\n");
        for k in 0..60 {
            let s = 1.0 * 0.7f64.powi(k);
            text.push_str(&format!("{s:.17e},{:.17e}\n", s.powf(1.0))); // pow:a=1 samples
        }
        std::fs::write(&path, &text).unwrap();
        let w = RadialWeight::parse(&format!("tabulated:file={}", path.display())).unwrap();
        for s in [0.9, 0.5, 0.01, 1e-6] {
            assert_relative_eq!(w.eval_s(s), s, max_relative = 2e-3);
        }
        // outside the table: NaN evaluation surfaces as quadrature error
        assert!(w.eval_s(1e-12).is_nan());
        let e = quad::integrate(|u| w.eval_s(u), 0.0, 0.5, 1e-8);
        assert!(e.is_err());
    }
}
