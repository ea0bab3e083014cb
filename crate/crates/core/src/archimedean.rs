//! Archimedean copulas `C(u,v) = ψ(φ(u) + φ(v))`: generators, the Markov
//! kernel `D⁻ψ(φ(u)+φ(v)) / D⁻ψ(φ(u))`, and classification through
//! log-convexity of ψ, −D⁻ψ and ψ''.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::copula::{Copula, GridConfig, Label};
use crate::error::{Error, Result};
use crate::properties::{check_si, check_tp2, log_convexity_test, Tp2Method};
use crate::verdict::{Method, Status, Tolerances, Verdict, Witness};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const LN2: f64 = std::f64::consts::LN_2;
const VALIDATION_POINTS: usize = 1000;
const CRITERION_POINTS: usize = 2001;
/// Relative jump size that counts as a discontinuity of D⁻ψ.
const TOL_JUMP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Generic,
    TwiceDifferentiable,
    /// Declared, never inferred.
    CompletelyMonotone,
}

/// What a caller supplies to [`make_generator`]; at least one of `phi` and
/// `psi` is required.
#[derive(Clone, Default)]
pub struct GeneratorInput {
    pub label: Option<Label>,
    pub phi: Option<RealFn>,
    pub psi: Option<RealFn>,
    pub d_minus_psi: Option<RealFn>,
    pub psi_second: Option<RealFn>,
    /// Overrides the numeric estimate of φ(0) (∞ for strict generators).
    pub phi_at_zero: Option<f64>,
    pub smoothness: Option<Smoothness>,
    /// Points `x` where D⁻ψ is known to jump.
    pub d_minus_psi_jumps: Vec<f64>,
}

/// A validated generator with its co-generator and left derivative.
#[derive(Clone)]
pub struct GeneratorSpec {
    label: Label,
    phi: RealFn,
    psi: RealFn,
    d_minus_psi: RealFn,
    d_minus_psi_closed: bool,
    psi_second: Option<RealFn>,
    phi_at_zero: f64,
    normalized: bool,
    smoothness: Smoothness,
    jumps: Vec<f64>,
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSpec")
            .field("label", &self.label)
            .field("phi_at_zero", &self.phi_at_zero)
            .field("normalized", &self.normalized)
            .field("smoothness", &self.smoothness)
            .field("jumps", &self.jumps)
            .finish_non_exhaustive()
    }
}

impl GeneratorSpec {
    pub fn phi(&self, t: f64) -> f64 {
        if t >= 1.0 {
            0.0
        } else if t <= 0.0 {
            self.phi_at_zero
        } else {
            (self.phi)(t)
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else if x >= self.phi_at_zero {
            0.0
        } else {
            (self.psi)(x)
        }
    }

    pub fn d_minus_psi(&self, x: f64) -> f64 {
        if x > self.phi_at_zero {
            0.0
        } else {
            (self.d_minus_psi)(x)
        }
    }

    /// ψ'' in closed form when supplied, else a central second difference
    /// for declared twice-differentiable generators.
    pub fn psi_second(&self, x: f64) -> Option<f64> {
        if let Some(f) = &self.psi_second {
            return Some(f(x));
        }
        if self.smoothness == Smoothness::Generic {
            return None;
        }
        let h = (1e-4 * (1.0 + x)).min(x / 2.0);
        Some((self.psi(x + h) - 2.0 * self.psi(x) + self.psi(x - h)) / (h * h))
    }

    pub fn phi_at_zero(&self) -> f64 {
        self.phi_at_zero
    }

    pub fn is_strict(&self) -> bool {
        self.phi_at_zero == f64::INFINITY
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn has_closed_d_minus_psi(&self) -> bool {
        self.d_minus_psi_closed
    }

    pub fn d_minus_psi_jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    /// The generator `k φ`, which induces the same copula.
    pub fn scaled(&self, k: f64) -> Result<GeneratorSpec> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {k}")));
        }
        let s = self.clone();
        let (phi, psi, dpsi) = (s.phi.clone(), s.psi.clone(), s.d_minus_psi.clone());
        let psi_second = s
            .psi_second
            .clone()
            .map(|f| -> RealFn { Arc::new(move |x| f(x / k) / (k * k)) });
        Ok(GeneratorSpec {
            label: s.label.clone().with("scale", k),
            phi: Arc::new(move |t| k * phi(t)),
            psi: Arc::new(move |x| psi(x / k)),
            d_minus_psi: Arc::new(move |x| dpsi(x / k) / k),
            d_minus_psi_closed: s.d_minus_psi_closed,
            psi_second,
            phi_at_zero: k * s.phi_at_zero,
            normalized: (k * (s.phi)(0.5) - 1.0).abs() <= 1e-10,
            smoothness: s.smoothness,
            jumps: s.jumps.iter().map(|x| k * x).collect(),
        })
    }
}

/// Largest `x` bracket step before we give up and call the root infinite.
const X_CAP: f64 = 1e300;
/// A co-generator without a zero below this is treated as strict (beyond
/// it, closed forms typically overflow into spurious zeros).
const ZERO_SEARCH_CAP: f64 = 1e12;

/// `inf { x >= 0 : ψ(x) <= t }` by doubling and bisection.
fn invert_psi(psi: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    invert_psi_capped(psi, t, X_CAP)
}

fn invert_psi_capped(psi: &dyn Fn(f64) -> f64, t: f64, cap: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while psi(hi) > t {
        hi *= 2.0;
        if hi > cap {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `t` with `φ(t) = x` for decreasing φ on [0, 1].
fn invert_phi(phi: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Backward difference with one Richardson step.
fn backward_derivative(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    if x <= 0.0 {
        let h = 1e-7;
        return (f(h) - f(0.0)) / h;
    }
    let h = (1e-7_f64).max(1e-7 * x).min(x);
    let d = |h: f64| (f(x) - f(x - h)) / h;
    2.0 * d(h / 2.0) - d(h)
}

/// Slopes of consecutive samples must be non-decreasing (convexity) and
/// the values must decrease.
fn check_convex_decreasing(f: &dyn Fn(f64) -> f64, xs: &[f64], strictly: bool, what: &str) -> Result<()> {
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        if !y.is_finite() {
            return Err(Error::Validation {
                at: x,
                reason: format!("{what} is not finite"),
            });
        }
        if i > 0 {
            let dec = y - ys[i - 1];
            if dec > 1e-12 * (1.0 + y.abs()) || (strictly && dec >= 0.0) {
                return Err(Error::Validation {
                    at: x,
                    reason: format!("{what} is not {}decreasing", if strictly { "strictly " } else { "" }),
                });
            }
        }
    }
    let slopes: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    for (i, w) in slopes.windows(2).enumerate() {
        if w[1] - w[0] < -1e-9 * (1.0 + w[0].abs()) {
            return Err(Error::Validation {
                at: xs[i + 1],
                reason: format!("{what} is not convex"),
            });
        }
    }
    Ok(())
}

/// Completes and validates a generator. Missing φ or ψ is obtained by
/// monotone bisection; missing D⁻ψ by a Richardson-extrapolated backward
/// difference.
pub fn make_generator(input: GeneratorInput) -> Result<GeneratorSpec> {
    let GeneratorInput {
        label,
        phi,
        psi,
        d_minus_psi,
        psi_second,
        phi_at_zero,
        smoothness,
        d_minus_psi_jumps,
    } = input;
    let label = label.unwrap_or_else(|| Label::new("archimedean"));
    let t_grid: Vec<f64> = (1..=VALIDATION_POINTS)
        .map(|i| i as f64 / VALIDATION_POINTS as f64)
        .collect();

    let (phi, psi, phi_at_zero): (RealFn, RealFn, f64) = match (phi, psi) {
        (None, None) => {
            return Err(Error::InvalidParameter("a generator needs phi or psi".into()));
        }
        (Some(phi), psi) => {
            if phi(1.0).abs() > 1e-12 {
                return Err(Error::Validation {
                    at: 1.0,
                    reason: format!("phi(1) must be 0, got {}", phi(1.0)),
                });
            }
            check_convex_decreasing(&*phi, &t_grid, true, "phi")?;
            let p0 = phi_at_zero.unwrap_or_else(|| phi(0.0));
            let psi = psi.unwrap_or_else(|| {
                let phi = phi.clone();
                Arc::new(move |x: f64| if x >= p0 { 0.0 } else { invert_phi(&*phi, x) })
            });
            (phi, psi, p0)
        }
        (None, Some(psi)) => {
            let p0 = phi_at_zero.unwrap_or_else(|| {
                // smallest zero of ψ, if it has one within reach
                let z = invert_psi_capped(&*psi, 0.0, ZERO_SEARCH_CAP);
                if z.is_finite() && psi(z) == 0.0 {
                    z
                } else {
                    f64::INFINITY
                }
            });
            let upper = if p0.is_finite() {
                p0
            } else {
                invert_psi(&*psi, 1e-3).min(1e12)
            };
            let xs: Vec<f64> = std::iter::once(0.0)
                .chain((0..VALIDATION_POINTS).map(|i| {
                    let lo = (upper * 1e-9).max(1e-12);
                    lo * (upper / lo).powf(i as f64 / (VALIDATION_POINTS - 1) as f64)
                }))
                .collect();
            if (psi(0.0) - 1.0).abs() > 1e-12 {
                return Err(Error::Validation {
                    at: 0.0,
                    reason: format!("psi(0) must be 1, got {}", psi(0.0)),
                });
            }
            check_convex_decreasing(&*psi, &xs, false, "psi")?;
            let phi: RealFn = {
                let psi = psi.clone();
                Arc::new(move |t: f64| if t <= 0.0 { p0 } else { invert_psi(&*psi, t) })
            };
            (phi, psi, p0)
        }
    };

    let d_minus_psi_closed = d_minus_psi.is_some();
    let d_minus_psi = d_minus_psi.unwrap_or_else(|| {
        let psi = psi.clone();
        Arc::new(move |x: f64| {
            let f = |y: f64| if y >= phi_at_zero { 0.0 } else { psi(y) };
            backward_derivative(&f, x)
        })
    });

    for &t in std::iter::once(&1e-6).chain(&t_grid) {
        let back = psi(phi(t));
        if (back - t).abs() > 1e-10 {
            return Err(Error::Validation {
                at: t,
                reason: format!("psi(phi(t)) = {back} does not recover t"),
            });
        }
    }
    let normalized = (phi(0.5) - 1.0).abs() <= 1e-10;
    let mut jumps = d_minus_psi_jumps;
    jumps.sort_by(f64::total_cmp);
    Ok(GeneratorSpec {
        label,
        phi,
        psi,
        d_minus_psi,
        d_minus_psi_closed,
        psi_second,
        phi_at_zero,
        normalized,
        smoothness: smoothness.unwrap_or(Smoothness::Generic),
        jumps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArchFamily {
    /// `ψ(x) = exp(-x^{1/α} log 2)`, α >= 1.
    Gumbel {
        alpha: f64,
    },
    Pi,
    W,
    /// `ψ(x) = (x + sqrt(1 + x²))^{-1/10}`: TP2 but not MK-TP2.
    Spreeuw,
}

/// Built-in generators with exact φ, ψ, D⁻ψ and ψ''.
pub fn builtin_archimedean(family: ArchFamily) -> Result<GeneratorSpec> {
    let spec = |label, phi: RealFn, psi: RealFn, dpsi: RealFn, psi2: Option<RealFn>, p0, smooth, jumps| GeneratorSpec {
        label,
        normalized: (phi(0.5) - 1.0).abs() <= 1e-10,
        phi,
        psi,
        d_minus_psi: dpsi,
        d_minus_psi_closed: true,
        psi_second: psi2,
        phi_at_zero: p0,
        smoothness: smooth,
        jumps,
    };
    Ok(match family {
        ArchFamily::Gumbel { alpha } => {
            if !(alpha >= 1.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter(format!("gumbel needs alpha >= 1, got {alpha}")));
            }
            let a = alpha;
            let psi = move |x: f64| (-x.powf(1.0 / a) * LN2).exp();
            let c = LN2 / a;
            spec(
                Label::new("gumbel").with("alpha", a),
                Arc::new(move |t: f64| (-t.ln() / LN2).powf(a)),
                Arc::new(psi),
                Arc::new(move |x: f64| -c * x.powf(1.0 / a - 1.0) * psi(x)),
                Some(Arc::new(move |x: f64| {
                    psi(x) * (c * c * x.powf(2.0 / a - 2.0) - c * (1.0 / a - 1.0) * x.powf(1.0 / a - 2.0))
                })),
                f64::INFINITY,
                Smoothness::CompletelyMonotone,
                vec![],
            )
        }
        ArchFamily::Pi => spec(
            Label::new("pi"),
            Arc::new(|t: f64| -t.ln() / LN2),
            Arc::new(|x: f64| (-x * LN2).exp()),
            Arc::new(|x: f64| -LN2 * (-x * LN2).exp()),
            Some(Arc::new(|x: f64| LN2 * LN2 * (-x * LN2).exp())),
            f64::INFINITY,
            Smoothness::CompletelyMonotone,
            vec![],
        ),
        ArchFamily::W => spec(
            Label::new("w"),
            Arc::new(|t: f64| 1.0 - t),
            Arc::new(|x: f64| (1.0 - x).max(0.0)),
            Arc::new(|x: f64| if x <= 1.0 { -1.0 } else { 0.0 }),
            None,
            1.0,
            Smoothness::Generic,
            vec![1.0],
        ),
        ArchFamily::Spreeuw => spec(
            Label::new("spreeuw"),
            Arc::new(|t: f64| (-10.0 * t.ln()).sinh()),
            Arc::new(|x: f64| (-x.asinh() / 10.0).exp()),
            Arc::new(|x: f64| -(-x.asinh() / 10.0).exp() / (10.0 * (1.0 + x * x).sqrt())),
            Some(Arc::new(|x: f64| {
                let s = 1.0 + x * x;
                let psi = (-x.asinh() / 10.0).exp();
                psi / (100.0 * s) + psi * x / (10.0 * s.powf(1.5))
            })),
            f64::INFINITY,
            Smoothness::TwiceDifferentiable,
            vec![],
        ),
    })
}

/// `f⁰(u) = ψ(φ(0) − φ(u))`, the lower edge of the zero region of a
/// non-strict copula; 0 for strict generators.
pub fn zero_level(spec: &GeneratorSpec, u: f64) -> f64 {
    if spec.is_strict() {
        0.0
    } else {
        spec.psi(spec.phi_at_zero - spec.phi(u))
    }
}

/// `K(u, [0, v])`.
pub fn arch_kernel(spec: &GeneratorSpec, u: f64, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Ok(0.0);
    }
    if u <= 0.0 || u >= 1.0 || v >= 1.0 {
        return Ok(1.0);
    }
    let xu = spec.phi(u);
    let xv = spec.phi(v);
    if !spec.is_strict() && xu + xv > spec.phi_at_zero {
        return Ok(0.0);
    }
    let den = spec.d_minus_psi(xu);
    if den == 0.0 {
        return Err(Error::Numerical(format!(
            "D⁻ψ(φ({u})) = 0 for {}; the generator contradicts its strictness",
            spec.label
        )));
    }
    Ok((spec.d_minus_psi(xu + xv) / den).clamp(0.0, 1.0))
}

/// The copula induced by a generator.
#[derive(Debug, Clone)]
pub struct Archimedean {
    pub spec: Arc<GeneratorSpec>,
}

impl Archimedean {
    pub fn new(spec: GeneratorSpec) -> Self {
        Archimedean { spec: Arc::new(spec) }
    }
}

impl Copula for Archimedean {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return v.min(1.0);
        }
        if v >= 1.0 {
            return u;
        }
        self.spec.psi(self.spec.phi(u) + self.spec.phi(v))
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        arch_kernel(&self.spec, u, v).unwrap_or(f64::NAN)
    }

    /// `ψ''(φ(u)+φ(v)) / (ψ'(φ(u)) ψ'(φ(v)))`, for strict generators with a
    /// closed-form ψ''.
    fn density(&self, u: f64, v: f64) -> Option<f64> {
        if !self.has_density() {
            return None;
        }
        let s = &self.spec;
        let (xu, xv) = (s.phi(u), s.phi(v));
        Some(s.psi_second(xu + xv)? / (s.d_minus_psi(xu) * s.d_minus_psi(xv)))
    }

    fn has_density(&self) -> bool {
        self.spec.is_strict() && self.spec.psi_second.is_some()
    }

    fn label(&self) -> Label {
        self.spec.label.clone()
    }

    fn kernel_jumps_in_u(&self, v: f64) -> Vec<f64> {
        let s = &self.spec;
        let mut out = Vec::new();
        if !s.is_strict() {
            out.push(zero_level(s, v));
        }
        let xv = s.phi(v);
        for &x in &s.jumps {
            out.push(s.psi(x));
            if x > xv {
                out.push(s.psi(x - xv));
            }
        }
        out.retain(|&u| u > 0.0 && u < 1.0);
        out
    }
}

/// Classification by the generator criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchReport {
    pub strict: bool,
    pub d_minus_psi_continuous: Verdict,
    /// ψ log-convex ⟺ TP2 ⟺ LTD.
    pub tp2_ltd: Verdict,
    /// −D⁻ψ log-convex ⟺ MK-TP2 ⟺ SI.
    pub mktp2_si: Verdict,
    /// ψ'' log-convex ⟺ d-TP2.
    pub dtp2: Verdict,
}

/// `x = φ(t)` for a uniform t-grid on [margin, 1 − margin], ascending.
fn criterion_points(spec: &GeneratorSpec, grid: &GridConfig) -> Vec<f64> {
    let (lo, hi) = (grid.margin, 1.0 - grid.margin);
    let n = CRITERION_POINTS;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| spec.phi(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect();
    xs.reverse();
    xs.dedup_by(|b, a| !(*b > *a));
    xs
}

/// Looks for a jump of D⁻ψ: declared jumps short-circuit; otherwise a
/// point fails when the relative gap `|D⁻ψ(x+δ) − D⁻ψ(x−δ)|` stays above
/// the threshold for δ = 1e-3, 1e-4, 1e-5 (scaled by x below 1).
pub fn scan_dminus_psi_continuity(spec: &GeneratorSpec, grid: &GridConfig) -> Result<Verdict> {
    grid.validate()?;
    if let Some(&x) = spec.jumps.first() {
        let (l, r) = (spec.d_minus_psi(x), spec.d_minus_psi(x * (1.0 + 1e-9) + 1e-12));
        return Ok(Verdict::analytic(
            Status::Fails,
            Some(Witness::Points {
                xs: vec![x],
                values: vec![l, r],
                defect: (r - l).abs(),
            }),
            format!("declared discontinuity of D⁻ψ at x = {x}"),
            "D⁻ψ discontinuous, so the copula is not SI",
        ));
    }
    let xs = criterion_points(spec, grid);
    let mut worst: Option<Witness> = None;
    for &x in &xs {
        let scale = x.min(1.0);
        let gaps: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&d| {
                let d = d * scale;
                let (a, b) = (spec.d_minus_psi(x - d), spec.d_minus_psi(x + d));
                (b - a).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            })
            .collect();
        let persists = gaps.iter().all(|&g| g > TOL_JUMP) && gaps[2] > 0.5 * gaps[0];
        if persists && worst.as_ref().is_none_or(|w| gaps[2] > w.defect()) {
            worst = Some(Witness::Points {
                xs: vec![x],
                values: vec![spec.d_minus_psi(x - 1e-5 * scale), spec.d_minus_psi(x + 1e-5 * scale)],
                defect: gaps[2],
            });
        }
    }
    let detail = format!("jump scan of D⁻ψ on {} points", xs.len());
    Ok(match worst {
        Some(w) => Verdict::analytic(
            Status::Fails,
            Some(w),
            detail,
            "numeric jump of D⁻ψ persists as δ shrinks",
        ),
        None => {
            let mut v = Verdict::analytic(Status::Holds, None, detail, "no persistent jump found");
            v.certificate.method = Method::Grid;
            v.certificate.grid = Some(grid.clone());
            v
        }
    })
}

fn as_criterion(mut v: Verdict, detail: &str) -> Verdict {
    v.certificate.method = Method::Analytic;
    v.certificate.detail = format!("{detail}: {}", v.certificate.detail);
    v
}

fn grid_witness_or_note(v: Result<Verdict>) -> (Option<Witness>, String) {
    match v {
        Ok(v) if v.status == Status::Fails => (v.witness, String::new()),
        Ok(_) => (None, "no grid witness at this resolution".to_string()),
        Err(e) => (None, format!("grid witness unavailable: {e}")),
    }
}

/// Runs the generator criteria on `x = φ(t)` sample points.
///
/// Non-strict generators fail TP2 and SI outright (the kernel vanishes
/// below the zero-level curve); a grid witness is attached when one is
/// found at the given resolution.
pub fn classify_archimedean(spec: &GeneratorSpec, grid: &GridConfig) -> Result<ArchReport> {
    grid.validate()?;
    let tol = Tolerances::from(grid);
    let continuity = scan_dminus_psi_continuity(spec, grid)?;
    if !spec.is_strict() {
        let c = Archimedean::new(spec.clone());
        let (tw, tnote) = grid_witness_or_note(check_tp2(&c, grid, Tp2Method::Direct));
        let (sw, snote) = grid_witness_or_note(check_si(&c, grid));
        let reason = "non-strict generator: the kernel vanishes below the zero-level curve";
        let join = |n: String| {
            if n.is_empty() {
                reason.to_string()
            } else {
                format!("{reason}; {n}")
            }
        };
        return Ok(ArchReport {
            strict: false,
            d_minus_psi_continuous: continuity,
            tp2_ltd: Verdict::analytic(Status::Fails, tw, "non-strict generator", join(tnote)),
            mktp2_si: Verdict::analytic(Status::Fails, sw, "non-strict generator", join(snote)),
            dtp2: Verdict::not_applicable("non-strict generator: d-TP2 would imply MK-TP2, which fails"),
        });
    }

    let xs = criterion_points(spec, grid);
    let tp2_ltd = as_criterion(log_convexity_test(&|x| spec.psi(x), &xs, tol)?, "ψ log-convex");
    let mktp2_si = if continuity.status == Status::Fails {
        Verdict::analytic(
            Status::Fails,
            continuity.witness.clone(),
            "D⁻ψ discontinuous",
            "a jump of D⁻ψ rules out SI and hence MK-TP2",
        )
    } else {
        let mut v = as_criterion(
            log_convexity_test(&|x| -spec.d_minus_psi(x), &xs, tol)?,
            "−D⁻ψ log-convex",
        );
        if !spec.d_minus_psi_closed && v.status != Status::Holds {
            v.note = format!("{} (D⁻ψ by finite differences)", v.note).trim().to_string();
        }
        v
    };
    let dtp2 = match spec.smoothness {
        Smoothness::Generic => Verdict::not_applicable("generator not declared twice differentiable"),
        _ => match log_convexity_test(&|x| spec.psi_second(x).unwrap_or(f64::NAN), &xs, tol) {
            Ok(v) => as_criterion(v, "ψ'' log-convex"),
            Err(Error::Domain { x, value }) => Verdict::analytic(
                Status::Inconclusive,
                None,
                "ψ'' log-convex",
                format!("ψ''({x}) = {value} is not positive"),
            ),
            Err(e) => return Err(e),
        },
    };
    Ok(ArchReport {
        strict: true,
        d_minus_psi_continuous: continuity,
        tp2_ltd,
        mktp2_si,
        dtp2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::cdf_u_derivative;

    fn gumbel(a: f64) -> GeneratorSpec {
        builtin_archimedean(ArchFamily::Gumbel { alpha: a }).unwrap()
    }

    #[test]
    fn make_generator_w_and_pi() {
        let w = make_generator(GeneratorInput {
            phi: Some(Arc::new(|t| 1.0 - t)),
            ..Default::default()
        })
        .unwrap();
        assert!(!w.is_strict());
        assert_eq!(w.phi_at_zero(), 1.0);
        assert!((w.psi(0.3) - 0.7).abs() < 1e-12);
        assert_eq!(w.psi(1.5), 0.0);
        let pi = make_generator(GeneratorInput {
            phi: Some(Arc::new(|t: f64| -t.ln() / LN2)),
            ..Default::default()
        })
        .unwrap();
        assert!(pi.is_strict());
        assert!(pi.is_normalized());
    }

    #[test]
    fn make_generator_from_spreeuw_psi() {
        let s = make_generator(GeneratorInput {
            psi: Some(Arc::new(|x: f64| (x + (1.0 + x * x).sqrt()).powf(-0.1))),
            ..Default::default()
        })
        .unwrap();
        assert!(s.is_strict());
        assert!(!s.is_normalized());
        // numeric D⁻ψ against the closed form
        let exact = builtin_archimedean(ArchFamily::Spreeuw).unwrap();
        for x in [0.1, 1.0, 5.0] {
            let (a, b) = (s.d_minus_psi(x), exact.d_minus_psi(x));
            assert!((a - b).abs() < 1e-7, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn make_generator_rejects_concave_phi() {
        let err = make_generator(GeneratorInput {
            phi: Some(Arc::new(|t: f64| 1.0 - t * t)),
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::Validation { .. }), "{err}");
        assert!(make_generator(GeneratorInput::default()).is_err());
    }

    #[test]
    fn builtin_values() {
        let g1 = Archimedean::new(gumbel(1.0));
        assert!((g1.cdf(0.3, 0.5) - 0.15).abs() < 1e-15);
        assert!((gumbel(2.0).phi(0.5) - 1.0).abs() < 1e-15);
        let s = builtin_archimedean(ArchFamily::Spreeuw).unwrap();
        assert!((s.psi(1.0) - 0.915_635_097_636_622_2).abs() < 1e-12);
        assert!((s.phi(s.psi(1.0)) - 1.0).abs() < 1e-12);
        assert!(builtin_archimedean(ArchFamily::Gumbel { alpha: 0.5 }).is_err());
    }

    #[test]
    fn zero_level_values() {
        let w = builtin_archimedean(ArchFamily::W).unwrap();
        assert!((zero_level(&w, 0.3) - 0.7).abs() < 1e-15);
        assert_eq!(zero_level(&w, 0.5), 0.5);
        let sq = make_generator(GeneratorInput {
            phi: Some(Arc::new(|t: f64| (1.0 - t) * (1.0 - t))),
            ..Default::default()
        })
        .unwrap();
        assert!((zero_level(&sq, 0.5) - (1.0 - 0.75_f64.sqrt())).abs() < 1e-10);
        assert_eq!(zero_level(&gumbel(2.0), 0.3), 0.0);
    }

    #[test]
    fn kernel_values() {
        assert!((arch_kernel(&gumbel(1.0), 0.4, 0.7).unwrap() - 0.7).abs() < 1e-14);
        let k = arch_kernel(&gumbel(2.0), 0.5, 0.5).unwrap();
        assert!((k - 2f64.powf(0.5 - 2f64.sqrt())).abs() < 1e-12);
        let c = Archimedean::new(gumbel(2.0));
        assert!((cdf_u_derivative(&c, 0.5, 0.5, 1e-6) - k).abs() < 1e-6);
        let w = builtin_archimedean(ArchFamily::W).unwrap();
        assert_eq!(arch_kernel(&w, 0.3, 0.5).unwrap(), 0.0);
        assert_eq!(arch_kernel(&w, 0.3, 0.8).unwrap(), 1.0);
    }

    #[test]
    fn kernel_reports_degenerate_strict_generator() {
        let mut g = gumbel(2.0);
        g.d_minus_psi = Arc::new(|_| 0.0);
        assert!(matches!(arch_kernel(&g, 0.5, 0.5), Err(Error::Numerical(_))));
    }

    #[test]
    fn continuity_scan() {
        let grid = GridConfig::default();
        assert!(scan_dminus_psi_continuity(&gumbel(2.0), &grid).unwrap().holds());
        assert!(
            scan_dminus_psi_continuity(&builtin_archimedean(ArchFamily::Pi).unwrap(), &grid)
                .unwrap()
                .holds()
        );
        let v = scan_dminus_psi_continuity(&builtin_archimedean(ArchFamily::W).unwrap(), &grid).unwrap();
        assert!(v.fails());
        match v.witness.unwrap() {
            Witness::Points { xs, .. } => assert_eq!(xs, vec![1.0]),
            _ => panic!(),
        }
    }

    #[test]
    fn classify_examples() {
        let grid = GridConfig::default();
        let r = classify_archimedean(&gumbel(2.0), &grid).unwrap();
        assert!(r.tp2_ltd.holds() && r.mktp2_si.holds() && r.dtp2.holds(), "{r:?}");
        let r = classify_archimedean(&builtin_archimedean(ArchFamily::Spreeuw).unwrap(), &grid).unwrap();
        assert!(r.tp2_ltd.holds());
        assert!(r.mktp2_si.fails());
        assert!(matches!(r.mktp2_si.witness, Some(Witness::Points { ref xs, .. }) if xs.len() == 3));
        let r = classify_archimedean(&builtin_archimedean(ArchFamily::W).unwrap(), &grid).unwrap();
        assert!(!r.strict && r.mktp2_si.fails() && r.tp2_ltd.fails());
        assert!(r.mktp2_si.witness.is_some());
    }

    #[test]
    fn scaling_preserves_verdicts() {
        let grid = GridConfig::default();
        for spec in [gumbel(1.5), builtin_archimedean(ArchFamily::Spreeuw).unwrap()] {
            let a = classify_archimedean(&spec, &grid).unwrap();
            let b = classify_archimedean(&spec.scaled(3.0).unwrap(), &grid).unwrap();
            assert_eq!(a.tp2_ltd.status, b.tp2_ltd.status);
            assert_eq!(a.mktp2_si.status, b.mktp2_si.status);
            assert_eq!(a.dtp2.status, b.dtp2.status);
        }
    }
}
