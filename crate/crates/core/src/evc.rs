//! Extreme value copulas `C(u,v) = (uv)^{A(h(u,v))}` with
//! `h(u,v) = log u / log(uv)`, their Markov kernel `(C/u) F_A(h)`, the
//! MK-TP2 decision tree and the explicit counterexample constructions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::archimedean::RealFn;
use crate::copula::{Copula, GridConfig, Label, Rectangle};
use crate::error::{Error, Result};
use crate::properties::{counterexample_search, log_concavity_test, Property, SearchBudget};
use crate::verdict::{Method, Status, Tolerances, Verdict, Witness};

const VALIDATION_POINTS: usize = 1000;
const R_TEST_POINTS: usize = 2001;
/// Trichotomy tolerance on D⁺A(0).
const TOL_BRANCH: f64 = 1e-8;
/// Size of a D⁺A increment that counts as a jump.
const TOL_JUMP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PickandsSmoothness {
    Generic,
    /// Three times differentiable on `(t_star, 1)`.
    C3Interior,
}

/// Input to [`validate_pickands`].
#[derive(Clone)]
pub struct PickandsInput {
    pub label: Label,
    pub a: RealFn,
    pub d_plus_a: Option<RealFn>,
    /// Closed-form `F_A'` on `(t_star, 1)`, used by the differential criterion.
    pub fa_prime: Option<RealFn>,
    /// Points where D⁺A jumps; `None` when unknown.
    pub jumps: Option<Vec<f64>>,
    pub smoothness: PickandsSmoothness,
    /// Exact value of t*, if known.
    pub t_star: Option<f64>,
}

impl PickandsInput {
    pub fn new(label: Label, a: RealFn) -> Self {
        PickandsInput {
            label,
            a,
            d_plus_a: None,
            fa_prime: None,
            jumps: None,
            smoothness: PickandsSmoothness::Generic,
            t_star: None,
        }
    }
}

/// A validated Pickands dependence function.
#[derive(Clone)]
pub struct PickandsSpec {
    label: Label,
    a: RealFn,
    d_plus_a: RealFn,
    d_plus_closed: bool,
    fa_prime: Option<RealFn>,
    jumps: Vec<f64>,
    jumps_declared: bool,
    smoothness: PickandsSmoothness,
    t_star: f64,
}

impl fmt::Debug for PickandsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PickandsSpec")
            .field("label", &self.label)
            .field("jumps", &self.jumps)
            .field("jumps_declared", &self.jumps_declared)
            .field("smoothness", &self.smoothness)
            .field("t_star", &self.t_star)
            .finish_non_exhaustive()
    }
}

impl PickandsSpec {
    pub fn a(&self, t: f64) -> f64 {
        (self.a)(t.clamp(0.0, 1.0))
    }

    pub fn d_plus_a(&self, t: f64) -> f64 {
        (self.d_plus_a)(t.clamp(0.0, 1.0))
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    /// Whether the jump set was declared rather than detected numerically.
    pub fn jumps_declared(&self) -> bool {
        self.jumps_declared
    }

    pub fn smoothness(&self) -> PickandsSmoothness {
        self.smoothness
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn has_closed_derivative(&self) -> bool {
        self.d_plus_closed
    }

    /// `F_A'`, closed form when available, else a central difference.
    pub fn fa_prime(&self, t: f64) -> f64 {
        if let Some(f) = &self.fa_prime {
            return f(t);
        }
        let h = 1e-6_f64.min(t / 2.0).min((1.0 - t) / 2.0);
        (cap_function(self, t + h) - cap_function(self, t - h)) / (2.0 * h)
    }

    /// Plateau tolerance for F_A: tight with a closed-form derivative.
    fn fa_tol(&self) -> f64 {
        if self.d_plus_closed {
            1e-12
        } else {
            1e-6
        }
    }
}

/// Right difference with one Richardson step.
fn forward_derivative(f: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-7;
    if t + h > 1.0 {
        let d = |h: f64| (f(t) - f(t - h)) / h;
        return 2.0 * d(h / 2.0) - d(h);
    }
    let d = |h: f64| (f(t + h) - f(t)) / h;
    2.0 * d(h / 2.0) - d(h)
}

/// Locates jumps of a non-decreasing function by bisecting every grid
/// interval whose increment exceeds the threshold, then confirming that
/// the gap persists for δ = 1e-3, 1e-4, 1e-5.
fn detect_jumps(d: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let n = VALIDATION_POINTS;
    let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| d(t)).collect();
    let mut out: Vec<f64> = Vec::new();
    for i in 0..n {
        if vals[i + 1] - vals[i] <= TOL_JUMP {
            continue;
        }
        let (mut a, mut b) = (ts[i], ts[i + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if d(mid) - d(a) >= d(b) - d(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        let t = b;
        let gaps: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&dl| d((t + dl).min(1.0)) - d((t - dl).max(0.0)))
            .collect();
        let persists = gaps.iter().all(|&g| g > TOL_JUMP) && gaps[2] > 0.5 * gaps[0];
        if persists && t > 0.0 && t < 1.0 && out.last().is_none_or(|&l| t - l > 1e-6) {
            out.push(t);
        }
    }
    out
}

/// Checks the Pickands axioms on a grid and completes the spec.
pub fn validate_pickands(input: PickandsInput) -> Result<PickandsSpec> {
    let PickandsInput {
        label,
        a,
        d_plus_a,
        fa_prime,
        jumps,
        smoothness,
        t_star,
    } = input;
    let bad = |at: f64, reason: String| Err(Error::Validation { at, reason });
    for t in [0.0, 1.0] {
        if (a(t) - 1.0).abs() > 1e-12 {
            return bad(t, format!("A({t}) must be 1, got {}", a(t)));
        }
    }
    let d_plus_closed = d_plus_a.is_some();
    let d_plus_a: RealFn = d_plus_a.unwrap_or_else(|| {
        let a = a.clone();
        Arc::new(move |t: f64| forward_derivative(&*a, t))
    });
    let n = VALIDATION_POINTS;
    let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let slope_tol = if d_plus_closed { 1e-12 } else { 1e-6 };
    let mut prev = f64::NEG_INFINITY;
    for &t in &ts[..n] {
        let d = d_plus_a(t);
        if !(-1.0 - slope_tol..=1.0 + slope_tol).contains(&d) {
            return bad(t, format!("D⁺A({t}) = {d} lies outside [-1, 1]"));
        }
        if d < prev - slope_tol {
            return bad(t, "D⁺A is not non-decreasing".into());
        }
        prev = d;
    }
    let vals: Vec<f64> = ts.iter().map(|&t| a(t)).collect();
    for (&t, &v) in ts.iter().zip(&vals) {
        if !(v.is_finite() && v <= 1.0 + 1e-12 && v >= t.max(1.0 - t) - 1e-12) {
            return bad(t, format!("A({t}) = {v} violates max(t, 1-t) <= A <= 1"));
        }
    }
    for i in 1..n {
        if vals[i - 1] - 2.0 * vals[i] + vals[i + 1] < -1e-9 {
            return bad(ts[i], "A is not convex".into());
        }
    }

    let t_star = match t_star {
        Some(ts) => ts,
        None => estimate_t_star(&*d_plus_a, &ts),
    };
    for i in 0..=200 {
        let t = t_star * i as f64 / 200.0;
        if (a(t) - (1.0 - t)).abs() > 1e-10 {
            return bad(t, format!("A must equal 1 - t on [0, t*] with t* = {t_star}"));
        }
    }
    let (jumps, jumps_declared) = match jumps {
        Some(mut j) => {
            j.sort_by(f64::total_cmp);
            (j, true)
        }
        None => (detect_jumps(&*d_plus_a), false),
    };
    Ok(PickandsSpec {
        label,
        a,
        d_plus_a,
        d_plus_closed,
        fa_prime,
        jumps,
        jumps_declared,
        smoothness,
        t_star,
    })
}

/// sup of the initial segment on which D⁺A is within 1e-6 of -1, refined by
/// bisection between the bracketing grid points.
fn estimate_t_star(d: &dyn Fn(f64) -> f64, ts: &[f64]) -> f64 {
    let on = |t: f64| (d(t) + 1.0).abs() <= 1e-6;
    if !on(0.0) {
        return 0.0;
    }
    let Some(k) = ts.iter().position(|&t| !on(t)) else {
        return 1.0;
    };
    let (mut lo, mut hi) = (ts[k - 1], ts[k]);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if on(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - ts[0] < 1e-9 {
        0.0
    } else {
        hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PickandsFamily {
    /// `(t^α + (1-t)^α)^{1/α}`, α >= 1.
    Gumbel { alpha: f64 },
    /// `1 - βt` below `α/(α+β)`, `1 - α(1-t)` above.
    MarshallOlkin { alpha: f64, beta: f64 },
    /// `θt² - θt + 1`, θ in [0, 1].
    TawnSymmetric { theta: f64 },
    /// `1 - (θ+κ)t + θt² + κt³`.
    TawnMixed { theta: f64, kappa: f64 },
    /// `(2/3) log(t^{3/2} + (1-t)^{3/2}) + 1`.
    LogExample,
    /// Piecewise A with F_A = 0, 7/16, t(2-t).
    JumpExample,
}

/// Built-in Pickands functions with exact derivatives, jump sets and t*.
pub fn builtin_pickands(family: PickandsFamily) -> Result<PickandsSpec> {
    let invalid = |msg: String| Err(Error::InvalidParameter(msg));
    let input = match family {
        PickandsFamily::Gumbel { alpha } => {
            if !(alpha >= 1.0 && alpha.is_finite()) {
                return invalid(format!("evc-gumbel needs alpha >= 1, got {alpha}"));
            }
            let al = alpha;
            let s = move |t: f64| t.powf(al) + (1.0 - t).powf(al);
            PickandsInput {
                label: Label::new("evc-gumbel").with("alpha", al),
                a: Arc::new(move |t| s(t).powf(1.0 / al)),
                d_plus_a: Some(Arc::new(move |t: f64| {
                    if al == 1.0 {
                        return 0.0;
                    }
                    (t.powf(al - 1.0) - (1.0 - t).powf(al - 1.0)) * s(t).powf(1.0 / al - 1.0)
                })),
                fa_prime: Some(Arc::new(move |t: f64| {
                    // A'' = (α-1) (t(1-t))^{α-2} S^{1/α-2}
                    (1.0 - t) * (al - 1.0) * (t * (1.0 - t)).powf(al - 2.0) * s(t).powf(1.0 / al - 2.0)
                })),
                jumps: Some(vec![]),
                smoothness: PickandsSmoothness::C3Interior,
                t_star: Some(0.0),
            }
        }
        PickandsFamily::MarshallOlkin { alpha, beta } => {
            let unit = |x: f64| (0.0..=1.0).contains(&x);
            if !unit(alpha) || !unit(beta) {
                return invalid(format!(
                    "mo needs alpha, beta in [0, 1], got alpha={alpha}, beta={beta}"
                ));
            }
            let (al, be) = (alpha, beta);
            let kink = if al + be > 0.0 { al / (al + be) } else { 1.0 };
            let has_jump = al > 0.0 && be > 0.0;
            PickandsInput {
                label: Label::new("mo").with("alpha", al).with("beta", be),
                a: Arc::new(move |t| if t < kink { 1.0 - be * t } else { 1.0 - al * (1.0 - t) }),
                d_plus_a: Some(Arc::new(move |t| if t < kink { -be } else { al })),
                fa_prime: Some(Arc::new(|_| 0.0)),
                jumps: Some(if has_jump { vec![kink] } else { vec![] }),
                smoothness: if be == 1.0 || !has_jump {
                    PickandsSmoothness::C3Interior
                } else {
                    PickandsSmoothness::Generic
                },
                t_star: Some(if be == 1.0 { kink } else { 0.0 }),
            }
        }
        PickandsFamily::TawnSymmetric { theta } => {
            if !(0.0..=1.0).contains(&theta) {
                return invalid(format!("tawn-sym needs theta in [0, 1], got {theta}"));
            }
            let th = theta;
            PickandsInput {
                label: Label::new("tawn-sym").with("theta", th),
                a: Arc::new(move |t| th * t * t - th * t + 1.0),
                d_plus_a: Some(Arc::new(move |t| 2.0 * th * t - th)),
                fa_prime: Some(Arc::new(move |t| (1.0 - t) * 2.0 * th)),
                jumps: Some(vec![]),
                smoothness: PickandsSmoothness::C3Interior,
                t_star: Some(0.0),
            }
        }
        PickandsFamily::TawnMixed { theta, kappa } => {
            let (th, ka) = (theta, kappa);
            let checks = [
                (th >= 0.0, "theta >= 0"),
                (th + 3.0 * ka >= 0.0, "theta + 3 kappa >= 0"),
                (th + ka <= 1.0 + 1e-12, "theta + kappa <= 1"),
                (th + 2.0 * ka <= 1.0 + 1e-12, "theta + 2 kappa <= 1"),
            ];
            if let Some((_, what)) = checks.iter().find(|(ok, _)| !ok) {
                return invalid(format!("tawn-mix needs {what}, got theta={th}, kappa={ka}"));
            }
            PickandsInput {
                label: Label::new("tawn-mix").with("theta", th).with("kappa", ka),
                a: Arc::new(move |t| 1.0 - (th + ka) * t + th * t * t + ka * t * t * t),
                d_plus_a: Some(Arc::new(move |t| -(th + ka) + 2.0 * th * t + 3.0 * ka * t * t)),
                fa_prime: Some(Arc::new(move |t| (1.0 - t) * (2.0 * th + 6.0 * ka * t))),
                jumps: Some(vec![]),
                smoothness: PickandsSmoothness::C3Interior,
                t_star: Some(0.0),
            }
        }
        PickandsFamily::LogExample => {
            let s = |t: f64| t.powf(1.5) + (1.0 - t).powf(1.5);
            PickandsInput {
                label: Label::new("evc-log"),
                a: Arc::new(move |t| (2.0 / 3.0) * s(t).ln() + 1.0),
                d_plus_a: Some(Arc::new(move |t: f64| (t.sqrt() - (1.0 - t).sqrt()) / s(t))),
                fa_prime: Some(Arc::new(move |t: f64| {
                    let q = t * (1.0 - t);
                    (1.0 - t) / (s(t) * s(t)) * (1.0 + 4.0 * q - 2.0 * q.sqrt()) / (2.0 * q.sqrt())
                })),
                jumps: Some(vec![]),
                smoothness: PickandsSmoothness::C3Interior,
                t_star: Some(0.0),
            }
        }
        PickandsFamily::JumpExample => PickandsInput {
            label: Label::new("evc-jump"),
            a: Arc::new(|t| {
                if t < 0.125 {
                    1.0 - t
                } else if t < 0.25 {
                    15.0 / 16.0 - t / 2.0
                } else {
                    0.75 + (t - 0.5) * (t - 0.5)
                }
            }),
            d_plus_a: Some(Arc::new(|t| {
                if t < 0.125 {
                    -1.0
                } else if t < 0.25 {
                    -0.5
                } else {
                    2.0 * (t - 0.5)
                }
            })),
            fa_prime: Some(Arc::new(|t| if t < 0.25 { 0.0 } else { 2.0 - 2.0 * t })),
            jumps: Some(vec![0.125]),
            smoothness: PickandsSmoothness::Generic,
            t_star: Some(0.125),
        },
    };
    validate_pickands(input)
}

/// `F_A(t) = A(t) + (1 - t) D⁺A(t)`, with `F_A(1) = 1`.
pub fn cap_function(spec: &PickandsSpec, t: f64) -> f64 {
    if t >= 1.0 {
        return 1.0;
    }
    let t = t.max(0.0);
    (spec.a(t) + (1.0 - t) * spec.d_plus_a(t)).max(0.0)
}

/// `log u / log(uv)`.
pub fn h_map(u: f64, v: f64) -> f64 {
    let lu = u.ln();
    lu / (lu + v.ln())
}

/// `f_t(u) = u^{(1-t)/t}`, the level curve `h = t`.
pub fn contour(t: f64, u: f64) -> f64 {
    u.powf((1.0 - t) / t)
}

/// Every quantity of the kernel formula at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvcEval {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub a: f64,
    pub f: f64,
    pub c: f64,
    pub k: f64,
}

/// Evaluates `h`, `A`, `F_A`, `C` and `K` at an interior point.
pub fn evc_eval(spec: &PickandsSpec, u: f64, v: f64) -> EvcEval {
    let (lu, lv) = (u.ln(), v.ln());
    let t = lu / (lu + lv);
    let a = spec.a(t);
    let f = cap_function(spec, t);
    let log_c = a * (lu + lv);
    let c = log_c.exp();
    let k = if f == 0.0 { 0.0 } else { (log_c - lu).exp() * f };
    EvcEval { u, v, t, a, f, c, k }
}

pub fn evc_cdf(spec: &PickandsSpec, u: f64, v: f64) -> f64 {
    if u <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return v.min(1.0);
    }
    if v >= 1.0 {
        return u;
    }
    evc_eval(spec, u, v).c
}

pub fn evc_kernel(spec: &PickandsSpec, u: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v >= 1.0 || u <= 0.0 || u >= 1.0 {
        return 1.0;
    }
    evc_eval(spec, u, v).k.clamp(0.0, 1.0)
}

/// The copula induced by a Pickands function.
#[derive(Debug, Clone)]
pub struct Evc {
    pub spec: Arc<PickandsSpec>,
}

impl Evc {
    pub fn new(spec: PickandsSpec) -> Self {
        Evc { spec: Arc::new(spec) }
    }
}

impl Copula for Evc {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        evc_cdf(&self.spec, u, v)
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        evc_kernel(&self.spec, u, v)
    }

    fn label(&self) -> Label {
        self.spec.label.clone()
    }

    /// `u` with `h(u, v) = t_j` for every jump `t_j` of D⁺A.
    fn kernel_jumps_in_u(&self, v: f64) -> Vec<f64> {
        self.spec
            .jumps
            .iter()
            .filter(|&&t| t > 0.0 && t < 1.0)
            .map(|&t| v.powf(t / (1.0 - t)))
            .collect()
    }
}

/// Product of the `h`-differences along the rectangle; identically 1.
pub fn cross_ratio_identity_check(a: f64, rect: &Rectangle) -> f64 {
    let Rectangle { u1, u2, v1, v2 } = *rect;
    let (h11, h12, h21, h22) = (h_map(u1, v1), h_map(u1, v2), h_map(u2, v1), h_map(u2, v2));
    u1.powf(a * (h11 - h12)) * v1.powf(a * (h11 - h21)) * u2.powf(a * (h22 - h21)) * v2.powf(a * (h22 - h12))
}

/// Auxiliary quantities of the gradient construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousWitnessAux {
    pub beta_a: f64,
    pub alpha: f64,
    pub g_alpha: f64,
    pub g_beta: f64,
    pub gamma_alpha: f64,
}

/// A rectangle violating MK-TP2 with its kernel values
/// `[K11, K12, K21, K22]` and cross-ratio `K11 K22 / (K12 K21)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructedWitness {
    pub construction: String,
    pub witness: Witness,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<ContinuousWitnessAux>,
}

fn kernel_quad(spec: &PickandsSpec, r: &Rectangle) -> [f64; 4] {
    [
        evc_kernel(spec, r.u1, r.v1),
        evc_kernel(spec, r.u1, r.v2),
        evc_kernel(spec, r.u2, r.v1),
        evc_kernel(spec, r.u2, r.v2),
    ]
}

fn cross_ratio(k: &[f64; 4]) -> f64 {
    k[0] * k[3] / (k[1] * k[2])
}

fn finish(
    spec: &PickandsSpec,
    rect: Rectangle,
    construction: &str,
    grid: &GridConfig,
    aux: Option<ContinuousWitnessAux>,
) -> Result<ConstructedWitness> {
    rect.validate()?;
    let k = kernel_quad(spec, &rect);
    let ratio = cross_ratio(&k);
    if !(ratio < 1.0 - grid.tol_strict) {
        return Err(Error::SearchFailed(format!(
            "{construction}: best rectangle {rect:?} has cross-ratio {ratio}"
        )));
    }
    Ok(ConstructedWitness {
        construction: construction.to_string(),
        witness: Witness::Rect {
            rect,
            values: k.to_vec(),
            defect: k[1] * k[2] - k[0] * k[3],
        },
        ratio,
        aux,
    })
}

/// Counterexample at a jump `t_r` of F_A with F_A positive and continuous on
/// `[t_l, t_r)`.
pub fn construct_witness_jump(
    spec: &PickandsSpec,
    t_l: f64,
    t_r: f64,
    grid: &GridConfig,
) -> Result<ConstructedWitness> {
    if spec.jumps.is_empty() {
        return Err(Error::Precondition("F_A has no declared or detected jump".into()));
    }
    if !(0.0 < t_l && t_l < t_r && t_r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t_l < t_r < 1, got t_l={t_l}, t_r={t_r}"
        )));
    }
    let left = t_r - 1e-12;
    let y = cap_function(spec, left);
    let delta = cap_function(spec, t_r) - y;
    if delta <= spec.fa_tol() {
        return Err(Error::Precondition(format!("F_A does not jump at t_r = {t_r}")));
    }
    if !(cap_function(spec, t_l) > 0.0 && y > 0.0) {
        return Err(Error::Precondition(format!(
            "F_A must be positive on [t_l, t_r) = [{t_l}, {t_r}), F_A(t_l) = {}",
            cap_function(spec, t_l)
        )));
    }
    if spec.jumps.iter().any(|&j| j >= t_l && j < t_r - 1e-12) {
        return Err(Error::Precondition(format!("F_A is not continuous on [{t_l}, {t_r})")));
    }
    let eps = 0.5 * delta * y / (delta + y);
    // smallest t in [t_l, t_r) with F_A(t) >= y - eps
    let t_star = if cap_function(spec, t_l) >= y - eps {
        t_l
    } else {
        let (mut lo, mut hi) = (t_l, left);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if cap_function(spec, mid) >= y - eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    let u1 = 0.5_f64;
    let mut v2 = contour(t_r, u1);
    // the corner (u1, v2) must land on the upper side of the jump
    for _ in 0..64 {
        if h_map(u1, v2) >= t_r {
            break;
        }
        v2 = v2.next_up();
    }
    let t_m = 0.5 * (t_star + t_r);
    let u_hi = v2.powf(t_m / (1.0 - t_m));
    let v_lo = u_hi.powf((1.0 - t_star) / t_star);
    let mut best: Option<(f64, Rectangle)> = None;
    for i in 1..=60 {
        let u2 = u1 + (u_hi - u1) * 2f64.powf(-(i as f64) / 2.0);
        for j in 1..=60 {
            let v1 = v2 - (v2 - v_lo) * 2f64.powf(-(j as f64) / 2.0);
            let r = Rectangle { u1, u2, v1, v2 };
            if r.validate().is_err() || u2 <= u1 || v1 >= v2 {
                continue;
            }
            let ratio = cross_ratio(&kernel_quad(spec, &r));
            if ratio.is_finite() && best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, r));
            }
        }
    }
    let (_, rect) = best.ok_or_else(|| Error::SearchFailed("no admissible rectangle near the jump".into()))?;
    finish(spec, rect, "jump", grid, None)
}

/// `sup argmin_γ A(1/(1+γ))` over `(1e-6, 1e6)`.
fn beta_a(spec: &PickandsSpec) -> f64 {
    let f = |lg: f64| spec.a(1.0 / (1.0 + lg.exp()));
    let (lo, hi) = (1e-6_f64.ln(), 1e6_f64.ln());
    let n = 2000;
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let mut k = 0;
    for i in 1..=n {
        if f(xs[i]) < f(xs[k]) {
            k = i;
        }
    }
    let (mut a, mut b) = (xs[k.saturating_sub(1)], xs[(k + 1).min(n)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
        if b - a < 1e-14 {
            break;
        }
    }
    let mut best = 0.5 * (a + b);
    if f(xs[k]) < f(best) {
        best = xs[k];
    }
    // rightward plateau scan for the supremum of the argmin set
    let m = f(best);
    let tol = 4.0 * f64::EPSILON * m.abs().max(1.0);
    let mut hi_p = best;
    let mut step = 1e-3;
    while hi_p < hi && f((hi_p + step).min(hi)) <= m + tol {
        hi_p = (hi_p + step).min(hi);
        step *= 2.0;
    }
    let mut upper = (hi_p + step).min(hi);
    let mut lo_p = hi_p;
    if upper > hi_p && f(upper) > m + tol {
        for _ in 0..100 {
            let mid = 0.5 * (lo_p + upper);
            if f(mid) <= m + tol {
                lo_p = mid;
            } else {
                upper = mid;
            }
        }
    } else {
        lo_p = upper;
    }
    lo_p.exp()
}

/// Counterexample for `D⁺A(0) ∈ (-1, 0)` with continuous D⁺A.
pub fn construct_witness_gradient(spec: &PickandsSpec, grid: &GridConfig) -> Result<ConstructedWitness> {
    let d0 = spec.d_plus_a(0.0);
    if !(d0 > -1.0 + TOL_BRANCH && d0 < -TOL_BRANCH) {
        return Err(Error::Precondition(format!("need D⁺A(0) in (-1, 0), got {d0}")));
    }
    if !spec.jumps.is_empty() {
        return Err(Error::Precondition(
            "D⁺A must be continuous; use the jump construction".into(),
        ));
    }
    let beta = beta_a(spec);
    let alpha = beta / 2.0;
    let g = |x: f64| (1.0 + x) * spec.a(1.0 / (1.0 + x)) - x;
    let (fa_b, fa_a) = (
        cap_function(spec, 1.0 / (1.0 + beta)),
        cap_function(spec, 1.0 / (1.0 + alpha)),
    );
    let (g_alpha, g_beta) = (g(alpha), g(beta));
    let gamma = (fa_b / fa_a).ln() / (g_alpha - g_beta);
    let aux = ContinuousWitnessAux {
        beta_a: beta,
        alpha,
        g_alpha,
        g_beta,
        gamma_alpha: gamma,
    };
    if !(gamma < 0.0 && gamma.is_finite()) {
        return Err(Error::SearchFailed(format!(
            "gamma_alpha = {gamma} is not negative (beta_A = {beta})"
        )));
    }
    let u1 = (gamma / 2.0).exp();
    let (v1, v2) = (u1.powf(beta), u1.powf(alpha));
    let mut best: Option<(f64, Rectangle)> = None;
    let mut n = 2.0_f64;
    while n <= 1e8 {
        let u2 = 1.0 - 1.0 / n.ceil();
        if u2 > u1 {
            let r = Rectangle { u1, u2, v1, v2 };
            let ratio = cross_ratio(&kernel_quad(spec, &r));
            if ratio.is_finite() && best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, r));
            }
        }
        n *= 1.25;
    }
    let (ratio, rect) = best.ok_or_else(|| {
        Error::SearchFailed(format!(
            "no u2 above u1 = {u1} (beta_A = {beta}, gamma_alpha = {gamma})"
        ))
    })?;
    finish(spec, rect, "gradient", grid, Some(aux)).map_err(|_| {
        Error::SearchFailed(format!(
            "gradient construction: beta_A = {beta}, gamma_alpha = {gamma}, last ratio = {ratio}"
        ))
    })
}

/// Counterexample for `F_A = c ∈ (0, 1)` on `[t1, t2]`.
pub fn construct_witness_constant(
    spec: &PickandsSpec,
    t1: f64,
    t2: f64,
    c: f64,
    grid: &GridConfig,
) -> Result<ConstructedWitness> {
    let tol = spec.fa_tol();
    if !(0.0 < t1 && t1 < t2 && t2 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t1 < t2 < 1, got t1={t1}, t2={t2}"
        )));
    }
    if !(c > tol && c < 1.0 - tol) {
        return Err(Error::Precondition(format!("plateau value {c} is not in (0, 1)")));
    }
    if (spec.d_plus_a(0.0) + 1.0).abs() > TOL_BRANCH {
        return Err(Error::Precondition(format!(
            "need D⁺A(0) = -1, got {}",
            spec.d_plus_a(0.0)
        )));
    }
    for i in 0..=100 {
        let t = t1 + (t2 - t1) * i as f64 / 100.0;
        let f = cap_function(spec, t);
        if (f - c).abs() > tol {
            return Err(Error::Precondition(format!(
                "F_A({t}) = {f} is not constant {c} on [{t1}, {t2}]"
            )));
        }
    }
    if let Some(j) = spec.jumps.iter().find(|&&j| j > t1 && j < 1.0) {
        return Err(Error::Precondition(format!(
            "F_A jumps at {j} inside [t1, 1); use the jump construction"
        )));
    }
    // stay off the plateau's left edge, where F_A may jump
    let t1 = t1 + 1e-3 * (t2 - t1);
    let t2 = {
        let (mut lo, mut hi) = (t2, 1.0 - 1e-12);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if cap_function(spec, mid) <= c + tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let mid = 0.5 * (t1 + t2);
    let a = spec.d_plus_a(mid);
    let b = spec.a(mid) - a * mid;

    let kk = ((1.0 - t2) / t2).powi(2) * t1 / (1.0 - t1);
    let s1 = 1.0 / (1.0 + kk);
    let gap = |t: f64| a * t + b - t.max(1.0 - t);
    let s2 = {
        let steps = 10_000;
        let mut prev = t2;
        let mut root = 1.0;
        for i in 1..=steps {
            let t = t2 + (1.0 - t2) * i as f64 / steps as f64;
            if gap(t) <= 0.0 {
                let (mut lo, mut hi) = (prev, t);
                for _ in 0..100 {
                    let m = 0.5 * (lo + hi);
                    if gap(m) > 0.0 {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                root = hi;
                break;
            }
            prev = t;
        }
        root
    };
    let s = 0.5 * (t2 + s1.min(s2));
    let fs = cap_function(spec, s);
    if !(fs > c + tol) {
        return Err(Error::SearchFailed(format!(
            "F_A(s) = {fs} is not above the plateau value {c} at s = {s}"
        )));
    }
    let lo_e = (1.0 - s) / s * t2 / (1.0 - t2);
    let hi_e = (1.0 - t2) / t2 * t1 / (1.0 - t1);
    if !(lo_e > hi_e) {
        return Err(Error::SearchFailed(format!("no admissible u2 interval at s = {s}")));
    }
    let u_min = (c / fs).powf(2.0 * s);
    let mut u1 = 0.5 * (u_min + 1.0);
    let mut last = f64::NAN;
    for _ in 0..30 {
        let u2 = u1.powf(0.5 * (lo_e + hi_e));
        let rect = Rectangle {
            u1,
            u2,
            v1: contour(t1, u2),
            v2: contour(s, u1),
        };
        if rect.validate().is_ok() {
            last = cross_ratio(&kernel_quad(spec, &rect));
            if last < 1.0 - grid.tol_strict {
                return finish(spec, rect, "constant", grid, None);
            }
        }
        u1 = 0.5 * (u1 + 1.0);
    }
    Err(Error::SearchFailed(format!(
        "constant construction: inequality a+b < u1^(1/2s) F_A(s) never produced a ratio below 1 (last {last})"
    )))
}

/// Which part of the decision tree produced the MK-TP2 verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvcBranch {
    /// D⁺A(0) = 0: the copula is Π.
    Independence,
    /// D⁺A(0) ∈ (-1, 0).
    InteriorSlope,
    /// D⁺A(0) = -1 with two or more jumps.
    TwoJumps,
    /// D⁺A(0) = -1, one jump past the end of the initial 1 - t segment.
    JumpAfterSegment,
    /// F_A constant in (0, 1) on an interval.
    Plateau,
    /// Non-increasing `t(1-t) F_A'/F_A`.
    DifferentialCriterion,
    /// Direct grid falsification.
    GridSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvcReport {
    pub d_plus_a_at_zero: f64,
    pub t_star: f64,
    pub jumps: Vec<f64>,
    pub jumps_declared: bool,
    pub branch: EvcBranch,
    pub mktp2: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_test: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructedWitness>,
    /// Every EVC is TP2 and SI (hence LTD and PQD).
    pub tp2: bool,
    pub si: bool,
    pub notes: Vec<String>,
}

/// `r(t) = t(1-t) F_A'(t) / F_A(t)`.
pub fn r_function(spec: &PickandsSpec, t: f64) -> f64 {
    t * (1.0 - t) * spec.fa_prime(t) / cap_function(spec, t)
}

/// Non-increasingness of `r` on a 2001-point grid of
/// `(t* + margin, 1 - margin)`; increments up to `tol_eq (1 + |r|)` pass.
pub fn r_test(spec: &PickandsSpec, grid: &GridConfig) -> Verdict {
    let (lo, hi) = (spec.t_star + grid.margin, 1.0 - grid.margin);
    let n = R_TEST_POINTS;
    let ts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let rs: Vec<f64> = ts.iter().map(|&t| r_function(spec, t)).collect();
    let mut worst: Option<Witness> = None;
    for i in 0..n - 1 {
        let d = (rs[i + 1] - rs[i]) / (1.0 + rs[i].abs());
        if d.is_finite() && worst.as_ref().is_none_or(|w| d > w.defect()) {
            worst = Some(Witness::Points {
                xs: vec![ts[i], ts[i + 1]],
                values: vec![rs[i], rs[i + 1]],
                defect: d,
            });
        }
    }
    let tol = Tolerances {
        tol_eq: grid.tol_eq,
        tol_strict: grid.tol_eq,
    };
    let mut v = Verdict::from_defects(worst, tol, format!("monotonicity of t(1-t)F_A'/F_A on {n} points"));
    v.certificate.method = Method::Analytic;
    v
}

/// Finds the longest run of grid points on `(t*, 1)` over which F_A stays
/// constant with a value in (0, 1).
fn find_plateau(spec: &PickandsSpec, grid: &GridConfig) -> Option<(f64, f64, f64)> {
    let n = R_TEST_POINTS;
    let (lo, hi) = (spec.t_star.max(grid.margin), 1.0 - grid.margin);
    let ts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = ts.iter().map(|&t| cap_function(spec, t)).collect();
    let tol = spec.fa_tol();
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    for i in 1..=n {
        let same = i < n && (fs[i] - fs[start]).abs() <= tol;
        if !same {
            let len = i - 1 - start;
            let c = fs[start];
            if len >= 1 && c > tol && c < 1.0 - tol && best.is_none_or(|(a, b)| len > b - a) {
                best = Some((start, i - 1));
            }
            start = i;
        }
    }
    best.map(|(a, b)| (ts[a], ts[b], fs[a]))
}

fn log_concavity_note(spec: &PickandsSpec, grid: &GridConfig) -> Option<String> {
    let tol = Tolerances::from(grid);
    let pts = |a: f64, b: f64| -> Vec<f64> { (0..=1000).map(|i| a + (b - a) * i as f64 / 1000.0).collect() };
    let f = |t: f64| cap_function(spec, t);
    let lo = spec.t_star.max(grid.margin) + 1e-9;
    let describe = |r: Result<Verdict>| match r {
        Ok(v) => format!("{:?}", v.status).to_lowercase(),
        Err(e) => format!("n/a ({e})"),
    };
    let left = if lo < 0.5 {
        describe(log_concavity_test(&f, &pts(lo, 0.5), tol))
    } else {
        "empty range".to_string()
    };
    let right = describe(log_concavity_test(&f, &pts(0.5, 1.0 - grid.margin), tol));
    Some(format!(
        "F_A log-concave on [t*, 1/2]: {left} (necessary for TP2 of F_A∘h there); \
         on [1/2, 1): {right} (sufficient for TP2 of F_A∘h there only)"
    ))
}

fn analytic_holds(detail: &str, note: &str) -> Verdict {
    Verdict::analytic(Status::Holds, None, detail, note)
}

fn fails_with(cw: ConstructedWitness, detail: &str) -> Verdict {
    let note = format!("{} construction, cross-ratio {}", cw.construction, cw.ratio);
    Verdict::analytic(Status::Fails, Some(cw.witness), detail, note)
}

/// The MK-TP2 decision tree on D⁺A(0), the jump set, plateaus of F_A and
/// the differential criterion, falling back to grid falsification.
pub fn classify_evc(spec: &PickandsSpec, grid: &GridConfig) -> Result<EvcReport> {
    grid.validate()?;
    let d0 = spec.d_plus_a(0.0);
    let mut report = EvcReport {
        d_plus_a_at_zero: d0,
        t_star: spec.t_star,
        jumps: spec.jumps.clone(),
        jumps_declared: spec.jumps_declared,
        branch: EvcBranch::Independence,
        mktp2: Verdict::not_applicable(""),
        r_test: None,
        construction: None,
        tp2: true,
        si: true,
        notes: Vec::new(),
    };
    if !spec.jumps_declared && !spec.jumps.is_empty() {
        report
            .notes
            .push(format!("jumps of D⁺A detected numerically at {:?}", spec.jumps));
    }
    let evc = Evc::new(spec.clone());
    let search = |report: &mut EvcReport, why: &str| -> Result<Verdict> {
        let v = counterexample_search(&evc, Property::Mktp2, grid, &SearchBudget::default())?;
        Ok(match v.status {
            Status::Fails => v,
            _ => {
                report
                    .notes
                    .push(format!("{why}; no violating rectangle found by grid search"));
                let mut v = v;
                v.status = Status::Inconclusive;
                v.witness = None;
                v
            }
        })
    };
    // a failing branch without a witness is downgraded
    let from_construction =
        |report: &mut EvcReport, res: Result<ConstructedWitness>, detail: &str| -> Result<Verdict> {
            match res {
                Ok(cw) => {
                    let v = fails_with(cw.clone(), detail);
                    report.construction = Some(cw);
                    Ok(v)
                }
                Err(e) => {
                    report.notes.push(format!("construction failed: {e}"));
                    let mut v = search(report, detail)?;
                    if v.status != Status::Fails {
                        v.note = format!("{detail}, but no witness was found");
                    }
                    Ok(v)
                }
            }
        };

    if d0.abs() <= TOL_BRANCH {
        report.branch = EvcBranch::Independence;
        report.mktp2 = analytic_holds("D⁺A(0) = 0", "A ≡ 1, the copula is Π");
        return Ok(report);
    }
    if d0 > -1.0 + TOL_BRANCH {
        report.branch = EvcBranch::InteriorSlope;
        let detail = "D⁺A(0) in (-1, 0)";
        let res = match spec.jumps.first() {
            Some(&t_r) => construct_witness_jump(spec, t_r / 2.0, t_r, grid),
            None => construct_witness_gradient(spec, grid),
        };
        report.mktp2 = from_construction(&mut report, res, detail)?;
        return Ok(report);
    }

    if spec.jumps.len() >= 2 {
        report.branch = EvcBranch::TwoJumps;
        let res = construct_witness_jump(spec, spec.jumps[0], spec.jumps[1], grid);
        report.mktp2 = from_construction(&mut report, res, "D⁺A(0) = -1 with two jumps of D⁺A")?;
        return Ok(report);
    }
    if let [t_j] = spec.jumps[..] {
        if spec.t_star < t_j - 1e-9 {
            report.branch = EvcBranch::JumpAfterSegment;
            let res = construct_witness_jump(spec, 0.5 * (spec.t_star + t_j), t_j, grid);
            report.mktp2 = from_construction(&mut report, res, "one jump of D⁺A after A departs from 1 - t")?;
            return Ok(report);
        }
    }
    report.notes.extend(log_concavity_note(spec, grid));
    if let Some((t1, t2, c)) = find_plateau(spec, grid) {
        report.branch = EvcBranch::Plateau;
        let res = construct_witness_constant(spec, t1, t2, c, grid);
        report.mktp2 = from_construction(&mut report, res, &format!("F_A = {c} on [{t1}, {t2}]"))?;
        return Ok(report);
    }
    if spec.smoothness == PickandsSmoothness::C3Interior {
        let r = r_test(spec, grid);
        report.r_test = Some(r.clone());
        if r.status == Status::Holds {
            report.branch = EvcBranch::DifferentialCriterion;
            report.mktp2 = analytic_holds("t(1-t)F_A'/F_A non-increasing on (t*, 1)", "F_A∘h is TP2, hence MK-TP2");
            return Ok(report);
        }
        report
            .notes
            .push("t(1-t)F_A'/F_A increases somewhere, so F_A∘h is not TP2".into());
    }
    report.branch = EvcBranch::GridSearch;
    report.mktp2 = search(&mut report, "F_A∘h TP2 is sufficient but not known to be necessary")?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archimedean::{arch_kernel, builtin_archimedean, ArchFamily};

    fn bp(f: PickandsFamily) -> PickandsSpec {
        builtin_pickands(f).unwrap()
    }

    #[test]
    fn validate_examples() {
        let pi = validate_pickands(PickandsInput::new(Label::new("one"), Arc::new(|_| 1.0))).unwrap();
        assert_eq!(pi.t_star(), 0.0);
        assert!(pi.d_plus_a(0.3).abs() < 1e-6);
        let m = validate_pickands(PickandsInput::new(Label::new("m"), Arc::new(|t: f64| t.max(1.0 - t)))).unwrap();
        assert!((m.t_star() - 0.5).abs() < 1e-6, "{}", m.t_star());
        assert_eq!(m.jumps().len(), 1);
        assert!((m.jumps()[0] - 0.5).abs() < 1e-6);
        let err = validate_pickands(PickandsInput::new(
            Label::new("tawn"),
            Arc::new(|t: f64| 1.5 * t * t - 1.5 * t + 1.0),
        ))
        .unwrap_err();
        match err {
            Error::Validation { at, reason } => {
                assert_eq!(at, 0.0);
                assert!(reason.contains("D⁺A"), "{reason}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn builtin_cap_values() {
        let mo = bp(PickandsFamily::MarshallOlkin { alpha: 1.0, beta: 1.0 });
        assert_eq!(cap_function(&mo, 0.2), 0.0);
        assert_eq!(cap_function(&mo, 0.6), 1.0);
        let tw = bp(PickandsFamily::TawnSymmetric { theta: 1.0 });
        assert!((cap_function(&tw, 0.5) - 0.75).abs() < 1e-15);
        let j = bp(PickandsFamily::JumpExample);
        assert!((cap_function(&j, 0.2) - 7.0 / 16.0).abs() < 1e-15);
        let g = bp(PickandsFamily::Gumbel { alpha: 2.0 });
        assert!((cap_function(&g, 0.5) - 0.5f64.sqrt()).abs() < 1e-15);
        let l = bp(PickandsFamily::LogExample);
        assert!((cap_function(&l, 0.5) - 0.768_951).abs() < 1e-6);
        assert!(builtin_pickands(PickandsFamily::TawnMixed { theta: 1.0, kappa: 0.5 }).is_err());
        assert!(builtin_pickands(PickandsFamily::Gumbel { alpha: 0.9 }).is_err());
    }

    #[test]
    fn log_example_r_values() {
        let l = bp(PickandsFamily::LogExample);
        assert!((r_function(&l, 0.1) - 0.474).abs() < 1e-3, "{}", r_function(&l, 0.1));
        assert!((r_function(&l, 0.2) - 0.505).abs() < 1e-3, "{}", r_function(&l, 0.2));
        // the closed-form F_A' agrees with a difference of F_A
        let h = 1e-6;
        let fd = (cap_function(&l, 0.3 + h) - cap_function(&l, 0.3 - h)) / (2.0 * h);
        assert!((fd - l.fa_prime(0.3)).abs() < 1e-7);
    }

    #[test]
    fn kernel_and_cdf_values() {
        let one = validate_pickands(PickandsInput {
            d_plus_a: Some(Arc::new(|_| 0.0)),
            ..PickandsInput::new(Label::new("one"), Arc::new(|_| 1.0))
        })
        .unwrap();
        assert!((evc_kernel(&one, 0.4, 0.7) - 0.7).abs() < 1e-15);
        let m = bp(PickandsFamily::MarshallOlkin { alpha: 1.0, beta: 1.0 });
        assert!((evc_cdf(&m, 0.3, 0.5) - 0.3).abs() < 1e-15);
        let g = bp(PickandsFamily::Gumbel { alpha: 2.0 });
        let expected = 0.25f64.powf(0.5f64.sqrt()) / 0.5 * 0.5f64.sqrt();
        assert!((evc_kernel(&g, 0.5, 0.5) - expected).abs() < 1e-14);
        assert!((expected - 0.530_633_048_967_315).abs() < 1e-12);
        let arch = builtin_archimedean(ArchFamily::Gumbel { alpha: 2.0 }).unwrap();
        assert!((arch_kernel(&arch, 0.5, 0.5).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn h_and_contour() {
        assert_eq!(h_map(0.5, 0.5), 0.5);
        assert!((h_map(0.25, 0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(contour(0.5, 0.37), 0.37);
        for &(t, u) in &[(0.2, 0.3), (0.7, 0.9), (0.45, 0.05)] {
            assert!((h_map(u, contour(t, u)) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_ratio_identity_examples() {
        let r = Rectangle::new(0.3, 0.6, 0.4, 0.7).unwrap();
        assert!((cross_ratio_identity_check(1.0, &r) - 1.0).abs() < 1e-12);
        assert_eq!(cross_ratio_identity_check(0.0, &r), 1.0);
        let r = Rectangle::new(0.1, 0.2, 0.8, 0.9).unwrap();
        assert!((cross_ratio_identity_check(-2.5, &r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_witness_tawn() {
        let grid = GridConfig::default();
        let spec = bp(PickandsFamily::TawnSymmetric { theta: 0.2 });
        let w = construct_witness_gradient(&spec, &grid).unwrap();
        let aux = w.aux.unwrap();
        assert!((aux.beta_a - 1.0).abs() < 1e-6, "{aux:?}");
        let expected_gamma = (0.95_f64 / (1.0 - 0.2 / 9.0)).ln() / (0.2 / 6.0);
        assert!((aux.gamma_alpha - expected_gamma).abs() < 1e-5, "{aux:?}");
        assert!((aux.gamma_alpha + 0.8647).abs() < 1e-3);
        let r = w.witness.rect().unwrap();
        assert!((r.u1 - 0.6490).abs() < 1e-3);
        assert!(cross_ratio(&kernel_quad(&spec, &r)) < 1.0 - 1e-6);
        assert!(construct_witness_gradient(&bp(PickandsFamily::TawnSymmetric { theta: 0.5 }), &grid).is_ok());
        assert!(matches!(
            construct_witness_gradient(&bp(PickandsFamily::TawnSymmetric { theta: 0.0 }), &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn jump_witness_mo() {
        let grid = GridConfig::default();
        let spec = bp(PickandsFamily::MarshallOlkin { alpha: 0.5, beta: 0.5 });
        let w = construct_witness_jump(&spec, 0.25, 0.5, &grid).unwrap();
        assert!(w.ratio < 1.0 - 1e-6);
        let r = w.witness.rect().unwrap();
        assert!(cross_ratio(&kernel_quad(&spec, &r)) < 1.0 - 1e-6);
        // F_A vanishes left of the jump-example's jump
        assert!(matches!(
            construct_witness_jump(&bp(PickandsFamily::JumpExample), 0.0625, 0.125, &grid),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            construct_witness_jump(&bp(PickandsFamily::TawnSymmetric { theta: 0.2 }), 0.2, 0.4, &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_witness_jump_example() {
        let grid = GridConfig::default();
        let spec = bp(PickandsFamily::JumpExample);
        let w = construct_witness_constant(&spec, 0.125, 0.25, 7.0 / 16.0, &grid).unwrap();
        assert!(cross_ratio(&kernel_quad(&spec, &w.witness.rect().unwrap())) < 1.0 - 1e-6);
        let mo = bp(PickandsFamily::MarshallOlkin { alpha: 0.5, beta: 0.5 });
        assert!(construct_witness_constant(&mo, 0.3, 0.4, 0.5, &grid).is_err());
    }

    #[test]
    fn classify_examples() {
        let grid = GridConfig::default();
        let cases = [
            (
                PickandsFamily::TawnSymmetric { theta: 0.2 },
                Status::Fails,
                EvcBranch::InteriorSlope,
            ),
            (
                PickandsFamily::TawnSymmetric { theta: 1.0 },
                Status::Holds,
                EvcBranch::DifferentialCriterion,
            ),
            (
                PickandsFamily::TawnSymmetric { theta: 0.0 },
                Status::Holds,
                EvcBranch::Independence,
            ),
            (
                PickandsFamily::MarshallOlkin { alpha: 0.7, beta: 1.0 },
                Status::Holds,
                EvcBranch::DifferentialCriterion,
            ),
            (PickandsFamily::JumpExample, Status::Fails, EvcBranch::Plateau),
            (PickandsFamily::LogExample, Status::Fails, EvcBranch::GridSearch),
        ];
        for (f, status, branch) in cases {
            let r = classify_evc(&bp(f), &grid).unwrap();
            assert_eq!((r.mktp2.status, r.branch), (status, branch), "{f:?}: {r:?}");
            if status == Status::Fails {
                assert!(r.mktp2.witness.is_some());
            }
        }
    }
}
