//! Grid-based certification and falsification of the positive-dependence
//! properties, plus the reusable one-dimensional shape tests.
//!
//! Every scan reports the *defect* of its worst candidate: the amount by
//! which the defining inequality is violated (positive means violated).
//! Witness `values` follow the order documented on each check so a witness
//! can be re-evaluated from scratch with [`rect_defect`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{Copula, GridConfig, Rectangle};
use crate::error::{Error, Result};
use crate::verdict::{Status, Tolerances, Verdict, Witness, Worst};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Pqd,
    Ltd,
    Si,
    Tp2,
    Mktp2,
    Dtp2,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Pqd,
        Property::Ltd,
        Property::Si,
        Property::Tp2,
        Property::Mktp2,
        Property::Dtp2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Property::Pqd => "pqd",
            Property::Ltd => "ltd",
            Property::Si => "si",
            Property::Tp2 => "tp2",
            Property::Mktp2 => "mktp2",
            Property::Dtp2 => "dtp2",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown property `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tp2Method {
    /// Cross-products of the distribution function on adjacent cells.
    #[default]
    Direct,
    /// Monotonicity of `v -> K(u, v) / C(u, v)` for every `u`.
    KernelRatio,
}

/// Evaluates `f` on the grid, rows indexed by `u`.
fn eval_matrix(us: &[f64], vs: &[f64], f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = us.par_iter().map(|&u| vs.iter().map(|&v| f(u, v)).collect()).collect();
    for (i, row) in rows.iter().enumerate() {
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite value at (u, v) = ({}, {})",
                us[i], vs[j]
            )));
        }
    }
    Ok(rows)
}

fn rect_witness(rect: Rectangle, values: Vec<f64>, defect: f64) -> Witness {
    Witness::Rect { rect, values, defect }
}

/// Defect of `property` on one rectangle, evaluated directly from the
/// copula. Returns `(defect, values)` with the same conventions as the
/// grid scans:
///
/// * pqd `(u1, ·, v1, ·)`: `u1 v1 - C(u1, v1)`; values `[C, uv]`
/// * ltd `(u1, u2, v1, ·)`: `C(u2,v1)/u2 - C(u1,v1)/u1`; values are the two ratios
/// * si `(u1, u2, v1, ·)`: `K(u2,v1) - K(u1,v1)`; values are the two kernels
/// * tp2 / mktp2 / dtp2: `f12 f21 - f11 f22` for `f` = cdf / kernel / density;
///   values `[f11, f12, f21, f22]` with `fij = f(ui, vj)`
pub fn rect_defect(c: &dyn Copula, property: Property, rect: &Rectangle) -> Result<(f64, Vec<f64>)> {
    rect.validate()?;
    let Rectangle { u1, u2, v1, v2 } = *rect;
    let quad = |f: &dyn Fn(f64, f64) -> f64| {
        let (a, b, cc, d) = (f(u1, v1), f(u1, v2), f(u2, v1), f(u2, v2));
        (b * cc - a * d, vec![a, b, cc, d])
    };
    Ok(match property {
        Property::Pqd => {
            let cv = c.cdf(u1, v1);
            let pi = u1 * v1;
            (pi - cv, vec![cv, pi])
        }
        Property::Ltd => {
            let a = c.cdf(u1, v1) / u1;
            let b = c.cdf(u2, v1) / u2;
            (b - a, vec![a, b])
        }
        Property::Si => {
            let a = c.kernel(u1, v1);
            let b = c.kernel(u2, v1);
            (b - a, vec![a, b])
        }
        Property::Tp2 => quad(&|u, v| c.cdf(u, v)),
        Property::Mktp2 => quad(&|u, v| c.kernel(u, v)),
        Property::Dtp2 => {
            if !c.has_density() {
                return Err(Error::NotApplicable(format!("{} has no density", c.label())));
            }
            quad(&|u, v| c.density(u, v).unwrap_or(f64::NAN))
        }
    })
}

/// `C >= Π` on every grid point.
pub fn check_pqd(c: &dyn Copula, grid: &GridConfig) -> Result<Verdict> {
    Ok(Verdict::from_scan(scan_pqd(c, grid)?, grid, "pointwise C(u,v) - uv"))
}

fn scan_pqd(c: &dyn Copula, grid: &GridConfig) -> Result<Option<Witness>> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let cm = eval_matrix(&us, &vs, |u, v| c.cdf(u, v))?;
    let mut worst = Worst::default();
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            let pi = u * v;
            let val = cm[i][j];
            worst.offer(pi - val, || {
                rect_witness(
                    Rectangle {
                        u1: u,
                        u2: u,
                        v1: v,
                        v2: v,
                    },
                    vec![val, pi],
                    pi - val,
                )
            });
        }
    }
    Ok(worst.best)
}

/// Largest increase `f[k] - f[i]` over `i < k` along one line.
fn worst_increase(values: &[f64]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    let mut min_idx = 0;
    for k in 1..values.len() {
        let d = values[k] - values[min_idx];
        if best.is_none_or(|(_, _, b)| d > b) {
            best = Some((min_idx, k, d));
        }
        if values[k] < values[min_idx] {
            min_idx = k;
        }
    }
    best
}

/// `u -> C(u, v) / u` non-increasing along every grid line.
pub fn check_ltd(c: &dyn Copula, grid: &GridConfig) -> Result<Verdict> {
    Ok(Verdict::from_scan(
        scan_ltd(c, grid)?,
        grid,
        "u -> C(u,v)/u monotonicity per v-line",
    ))
}

fn scan_ltd(c: &dyn Copula, grid: &GridConfig) -> Result<Option<Witness>> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let cm = eval_matrix(&us, &vs, |u, v| c.cdf(u, v) / u)?;
    Ok(scan_u_monotone(&us, &vs, &cm))
}

/// `u -> K(u, v)` non-increasing along every grid line.
pub fn check_si(c: &dyn Copula, grid: &GridConfig) -> Result<Verdict> {
    Ok(Verdict::from_scan(
        scan_si(c, grid)?,
        grid,
        "u -> K(u,v) monotonicity per v-line",
    ))
}

fn scan_si(c: &dyn Copula, grid: &GridConfig) -> Result<Option<Witness>> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let km = eval_matrix(&us, &vs, |u, v| c.kernel(u, v))?;
    Ok(scan_u_monotone(&us, &vs, &km))
}

fn scan_u_monotone(us: &[f64], vs: &[f64], m: &[Vec<f64>]) -> Option<Witness> {
    let mut worst = Worst::default();
    for (j, &v) in vs.iter().enumerate() {
        let line: Vec<f64> = m.iter().map(|row| row[j]).collect();
        if let Some((i, k, d)) = worst_increase(&line) {
            worst.offer(d, || {
                rect_witness(
                    Rectangle {
                        u1: us[i],
                        u2: us[k],
                        v1: v,
                        v2: v,
                    },
                    vec![line[i], line[k]],
                    d,
                )
            });
        }
    }
    worst.best
}

/// Cross-products `f12 f21 - f11 f22` over adjacent cells.
fn scan_adjacent(us: &[f64], vs: &[f64], m: &[Vec<f64>]) -> Option<Witness> {
    let mut worst = Worst::default();
    for i in 0..us.len() - 1 {
        for j in 0..vs.len() - 1 {
            let (a, b, c, d) = (m[i][j], m[i][j + 1], m[i + 1][j], m[i + 1][j + 1]);
            let defect = b * c - a * d;
            worst.offer(defect, || {
                rect_witness(
                    Rectangle {
                        u1: us[i],
                        u2: us[i + 1],
                        v1: vs[j],
                        v2: vs[j + 1],
                    },
                    vec![a, b, c, d],
                    defect,
                )
            });
        }
    }
    worst.best
}

/// TP2 of the distribution function.
///
/// With [`Tp2Method::KernelRatio`] the defect is measured on `log(K/C)`
/// and the witness is the segment `(u, u, v1, v2)` with values
/// `[K/C at v1, K/C at v2]`.
pub fn check_tp2(c: &dyn Copula, grid: &GridConfig, method: Tp2Method) -> Result<Verdict> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    match method {
        Tp2Method::Direct => {
            let cm = eval_matrix(&us, &vs, |u, v| c.cdf(u, v))?;
            Ok(Verdict::from_scan(
                scan_adjacent(&us, &vs, &cm),
                grid,
                "adjacent-cell cross-products of C",
            ))
        }
        Tp2Method::KernelRatio => {
            let cm = eval_matrix(&us, &vs, |u, v| c.cdf(u, v))?;
            let km = eval_matrix(&us, &vs, |u, v| c.kernel(u, v))?;
            let mut worst = Worst::default();
            for (i, &u) in us.iter().enumerate() {
                if let Some(j) = cm[i].iter().position(|&x| x <= 0.0) {
                    return Err(Error::Domain { x: u, value: cm[i][j] });
                }
                let ratio: Vec<f64> = km[i].iter().zip(&cm[i]).map(|(k, cv)| k / cv).collect();
                let logs: Vec<f64> = ratio.iter().map(|r| -r.ln()).collect();
                // a decrease of log(K/C) is an increase of its negation
                if let Some((j, l, d)) = worst_increase(&logs) {
                    worst.offer(d, || {
                        rect_witness(
                            Rectangle {
                                u1: u,
                                u2: u,
                                v1: vs[j],
                                v2: vs[l],
                            },
                            vec![ratio[j], ratio[l]],
                            d,
                        )
                    });
                }
            }
            Ok(Verdict::from_scan(
                worst.best,
                grid,
                "v -> K(u,v)/C(u,v) monotonicity per u-line",
            ))
        }
    }
}

fn dyadic_spans(n: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |s| Some(s * 2))
        .take_while(|&s| s < n)
        .collect()
}

fn scan_mktp2(c: &dyn Copula, grid: &GridConfig) -> Result<Option<Witness>> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let km = eval_matrix(&us, &vs, |u, v| c.kernel(u, v))?;
    let (nu, nv) = (us.len(), vs.len());
    let mut worst = Worst::default();
    for &su in &dyadic_spans(nu) {
        for &sv in &dyadic_spans(nv) {
            for i in 0..nu - su {
                for j in 0..nv - sv {
                    let k21 = km[i + su][j];
                    if k21 <= grid.tol_eq {
                        continue;
                    }
                    let (k11, k12, k22) = (km[i][j], km[i][j + sv], km[i + su][j + sv]);
                    let defect = k12 * k21 - k11 * k22;
                    if defect > worst.current() {
                        worst.offer(defect, || {
                            rect_witness(
                                Rectangle {
                                    u1: us[i],
                                    u2: us[i + su],
                                    v1: vs[j],
                                    v2: vs[j + sv],
                                },
                                vec![k11, k12, k21, k22],
                                defect,
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(worst.best)
}

/// Coordinate search that moves the corners of a failing rectangle to
/// increase its defect. Only strict improvements are kept.
fn refine_rect(c: &dyn Copula, property: Property, start: &Witness, step0: f64, tol_eq: f64) -> Witness {
    let Some(mut rect) = start.rect() else {
        return start.clone();
    };
    let mut best = start.clone();
    let mut step = step0;
    for _ in 0..6 {
        for coord in 0..4 {
            for k in -8i32..=8 {
                if k == 0 {
                    continue;
                }
                let mut r = rect;
                let delta = step * k as f64 / 8.0;
                match coord {
                    0 => r.u1 += delta,
                    1 => r.u2 += delta,
                    2 => r.v1 += delta,
                    _ => r.v2 += delta,
                }
                if r.validate().is_err() || r.u1 == r.u2 || r.v1 == r.v2 {
                    continue;
                }
                if property == Property::Mktp2 && c.kernel(r.u2, r.v1) <= tol_eq {
                    continue;
                }
                if let Ok((d, values)) = rect_defect(c, property, &r) {
                    if d.is_finite() && d > best.defect() {
                        best = rect_witness(r, values, d);
                        rect = r;
                    }
                }
            }
        }
        step /= 4.0;
    }
    best
}

/// TP2 of the Markov kernel over adjacent and dyadic-span rectangles with
/// `K(u2, v1) > tol_eq`. A failing rectangle is refined locally before it
/// is reported.
pub fn check_mktp2(c: &dyn Copula, grid: &GridConfig) -> Result<Verdict> {
    let worst = scan_mktp2(c, grid)?;
    let detail = "kernel cross-products over adjacent and dyadic-span rectangles";
    let mut verdict = Verdict::from_scan(worst.clone(), grid, detail);
    if verdict.status == Status::Fails {
        let w = worst.expect("fails implies a witness");
        let step = grid_step(grid);
        let refined = refine_rect(c, Property::Mktp2, &w, step, grid.tol_eq);
        if refined.defect() > w.defect() {
            verdict.certificate.max_defect = refined.defect();
            verdict.note = "witness refined locally from the worst grid rectangle".to_string();
            verdict.witness = Some(refined);
        }
    }
    Ok(verdict)
}

fn grid_step(grid: &GridConfig) -> f64 {
    let us = grid.u_axis();
    us[1] - us[0]
}

/// TP2 of the density over adjacent cells.
pub fn check_dtp2(c: &dyn Copula, grid: &GridConfig) -> Result<Verdict> {
    Ok(Verdict::from_scan(
        scan_dtp2(c, grid)?,
        grid,
        "adjacent-cell cross-products of the density",
    ))
}

fn scan_dtp2(c: &dyn Copula, grid: &GridConfig) -> Result<Option<Witness>> {
    if !c.has_density() {
        return Err(Error::NotApplicable(format!(
            "{} is not absolutely continuous",
            c.label()
        )));
    }
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let dm = eval_matrix(&us, &vs, |u, v| c.density(u, v).unwrap_or(f64::NAN))?;
    Ok(scan_adjacent(&us, &vs, &dm))
}

/// Runs the grid check for one property.
pub fn check(c: &dyn Copula, property: Property, grid: &GridConfig) -> Result<Verdict> {
    match property {
        Property::Pqd => check_pqd(c, grid),
        Property::Ltd => check_ltd(c, grid),
        Property::Si => check_si(c, grid),
        Property::Tp2 => check_tp2(c, grid, Tp2Method::Direct),
        Property::Mktp2 => check_mktp2(c, grid),
        Property::Dtp2 => check_dtp2(c, grid),
    }
}

fn scan(c: &dyn Copula, property: Property, grid: &GridConfig) -> Result<Option<Witness>> {
    match property {
        Property::Pqd => scan_pqd(c, grid),
        Property::Ltd => scan_ltd(c, grid),
        Property::Si => scan_si(c, grid),
        Property::Tp2 => {
            grid.validate()?;
            let (us, vs) = (grid.u_axis(), grid.v_axis());
            let cm = eval_matrix(&us, &vs, |u, v| c.cdf(u, v))?;
            Ok(scan_adjacent(&us, &vs, &cm))
        }
        Property::Mktp2 => scan_mktp2(c, grid),
        Property::Dtp2 => scan_dtp2(c, grid),
    }
}

/// Evaluates a single rectangle and wraps the result as a verdict.
pub fn check_rect(c: &dyn Copula, property: Property, rect: &Rectangle, tol: Tolerances) -> Result<Verdict> {
    let (defect, values) = rect_defect(c, property, rect)?;
    let w = rect_witness(*rect, values, defect);
    let mut v = Verdict::from_defects(Some(w), tol, format!("{property} defect on the given rectangle"));
    if v.status == Status::Holds {
        v.note = "no violation on the given rectangle".to_string();
    }
    Ok(v)
}

fn triple_scan(f: &dyn Fn(f64) -> f64, points: &[f64], tol: Tolerances, concave: bool) -> Result<Verdict> {
    if points.len() < 3 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "need at least 3 strictly increasing sample points".into(),
        ));
    }
    let values: Vec<f64> = points.iter().map(|&x| f(x)).collect();
    for (&x, &value) in points.iter().zip(&values) {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain { x, value });
        }
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mut worst = Worst::default();
    for k in 1..points.len() - 1 {
        let (x0, x1, x2) = (points[k - 1], points[k], points[k + 1]);
        let chord = ((x2 - x1) * logs[k - 1] + (x1 - x0) * logs[k + 1]) / (x2 - x0);
        let defect = if concave { chord - logs[k] } else { logs[k] - chord };
        worst.offer(defect, || Witness::Points {
            xs: vec![x0, x1, x2],
            values: vec![values[k - 1], values[k], values[k + 1]],
            defect,
        });
    }
    let kind = if concave { "concavity" } else { "convexity" };
    Ok(Verdict::from_defects(
        worst.best,
        tol,
        format!("log-{kind} midpoint test on {} points", points.len()),
    ))
}

/// Log-convexity of a positive function on a sorted sample: for every
/// consecutive triple, `log f(x1)` must not exceed the chord through the
/// outer two points.
pub fn log_convexity_test(f: &dyn Fn(f64) -> f64, points: &[f64], tol: Tolerances) -> Result<Verdict> {
    triple_scan(f, points, tol, false)
}

/// Mirror of [`log_convexity_test`].
pub fn log_concavity_test(f: &dyn Fn(f64) -> f64, points: &[f64], tol: Tolerances) -> Result<Verdict> {
    triple_scan(f, points, tol, true)
}

/// 2-increasingness of `g` over adjacent grid cells whose four corners all
/// satisfy `domain` and have finite values. Witness values are
/// `[g11, g12, g21, g22]`; the defect is `-(g22 - g12 - g21 + g11)`.
pub fn two_increasing_test(
    g: &(dyn Fn(f64, f64) -> f64 + Sync),
    grid: &GridConfig,
    domain: Option<&(dyn Fn(f64, f64) -> bool + Sync)>,
) -> Result<Verdict> {
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let gm: Vec<Vec<f64>> = us
        .par_iter()
        .map(|&u| {
            vs.iter()
                .map(|&v| match domain {
                    Some(d) if !d(u, v) => f64::NAN,
                    _ => g(u, v),
                })
                .collect()
        })
        .collect();
    let mut worst = Worst::default();
    for i in 0..us.len() - 1 {
        for j in 0..vs.len() - 1 {
            let (a, b, c, d) = (gm[i][j], gm[i][j + 1], gm[i + 1][j], gm[i + 1][j + 1]);
            if ![a, b, c, d].iter().all(|x| x.is_finite()) {
                continue;
            }
            let defect = -(d - b - c + a);
            worst.offer(defect, || {
                rect_witness(
                    Rectangle {
                        u1: us[i],
                        u2: us[i + 1],
                        v1: vs[j],
                        v2: vs[j + 1],
                    },
                    vec![a, b, c, d],
                    defect,
                )
            });
        }
    }
    Ok(Verdict::from_scan(worst.best, grid, "adjacent rectangle increments"))
}

/// Resolutions of the coarse-to-fine counterexample search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Full-square scans, coarsest first.
    pub full: Vec<usize>,
    /// Resolution of the final zoom around the worst candidate.
    pub zoom: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            full: vec![64, 256],
            zoom: 1024,
        }
    }
}

fn zoom_region(w: &Witness, pad: f64, margin: f64) -> Option<Rectangle> {
    let r = w.rect()?;
    let lo = margin;
    let hi = 1.0 - margin;
    let mut z = Rectangle {
        u1: (r.u1 - pad).max(lo),
        u2: (r.u2 + pad).min(hi),
        v1: (r.v1 - pad).max(lo),
        v2: (r.v2 + pad).min(hi),
    };
    if z.u1 >= z.u2 {
        z.u2 = (z.u1 + pad).min(hi);
    }
    if z.v1 >= z.v2 {
        z.v2 = (z.v1 + pad).min(hi);
    }
    (z.u1 < z.u2 && z.v1 < z.v2).then_some(z)
}

/// Coarse-to-fine falsification: full scans at each `budget.full`
/// resolution, then a zoomed scan around the worst candidate. Returns the
/// most violating witness found, or Holds at the finest full resolution.
pub fn counterexample_search(
    c: &dyn Copula,
    property: Property,
    base: &GridConfig,
    budget: &SearchBudget,
) -> Result<Verdict> {
    let mut best: Option<Witness> = None;
    let mut last_grid = base.clone();
    let take = |cand: Option<Witness>, best: &mut Option<Witness>| {
        if let Some(w) = cand {
            if best.as_ref().is_none_or(|b| w.defect() > b.defect()) {
                *best = Some(w);
            }
        }
    };
    for &n in &budget.full {
        let g = GridConfig {
            n_u: n,
            n_v: n,
            region: None,
            ..base.clone()
        };
        take(scan(c, property, &g)?, &mut best);
        last_grid = g;
    }
    if let Some(w) = best.clone() {
        let pad = 4.0 * (1.0 - 2.0 * base.margin) / budget.full.last().copied().unwrap_or(64) as f64;
        if let Some(region) = zoom_region(&w, pad, base.margin) {
            let g = GridConfig {
                n_u: budget.zoom,
                n_v: budget.zoom,
                region: Some(region),
                ..base.clone()
            };
            take(scan(c, property, &g)?, &mut best);
        }
    }
    let mut verdict = Verdict::from_scan(best, &last_grid, format!("coarse-to-fine {property} search"));
    verdict.certificate.detail = format!(
        "coarse-to-fine {property} search: full scans at {:?}, zoom at {}",
        budget.full, budget.zoom
    );
    if verdict.status == Status::Holds {
        verdict.note = format!("holds within search budget {:?} + zoom {}", budget.full, budget.zoom);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_baseline, make_fgm, make_frechet, make_gaussian, Baseline};

    fn g64() -> GridConfig {
        GridConfig::with_resolution(64)
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.as_str().parse::<Property>().unwrap(), p);
        }
        assert!("foo".parse::<Property>().is_err());
    }

    #[test]
    fn pqd_examples() {
        let w = make_baseline(Baseline::W);
        let v = check_pqd(&w, &GridConfig::with_resolution(65)).unwrap();
        assert_eq!(v.status, Status::Fails);
        let r = v.witness.unwrap().rect().unwrap();
        assert!((r.u1 - 0.5).abs() < 1e-12 && (r.v1 - 0.5).abs() < 1e-12);
        assert!(check_pqd(&make_baseline(Baseline::Pi), &g64()).unwrap().holds());
        let neg = make_gaussian(-0.5).unwrap();
        let v = check_pqd(&neg, &GridConfig::with_resolution(65)).unwrap();
        assert!(v.fails());
        let r = v.witness.unwrap().rect().unwrap();
        assert!((r.u1 - 0.5).abs() < 1e-12 && (r.v1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ltd_examples() {
        assert!(check_ltd(&make_baseline(Baseline::M), &g64()).unwrap().holds());
        assert!(check_ltd(&make_fgm(0.5).unwrap(), &g64()).unwrap().holds());
        assert!(check_ltd(&make_fgm(-0.5).unwrap(), &g64()).unwrap().fails());
    }

    #[test]
    fn si_examples() {
        assert!(check_si(&make_frechet(0.5, 0.0).unwrap(), &g64()).unwrap().holds());
        assert!(check_si(&make_frechet(0.5, 0.25).unwrap(), &g64()).unwrap().fails());
        assert!(check_si(&make_baseline(Baseline::Pi), &g64()).unwrap().holds());
    }

    #[test]
    fn tp2_examples() {
        let pi = make_baseline(Baseline::Pi);
        assert!(check_tp2(&pi, &g64(), Tp2Method::Direct).unwrap().holds());
        assert!(check_tp2(&pi, &g64(), Tp2Method::KernelRatio).unwrap().holds());
        let g = make_gaussian(0.5).unwrap();
        assert!(check_tp2(&g, &g64(), Tp2Method::Direct).unwrap().holds());
        assert!(check_tp2(&g, &g64(), Tp2Method::KernelRatio).unwrap().holds());
        assert!(check_tp2(&make_gaussian(-0.5).unwrap(), &g64(), Tp2Method::Direct)
            .unwrap()
            .fails());
    }

    #[test]
    fn kernel_ratio_rejects_interior_zeros() {
        let w = make_baseline(Baseline::W);
        assert!(matches!(
            check_tp2(&w, &g64(), Tp2Method::KernelRatio),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn mktp2_examples() {
        let v = check_mktp2(&make_frechet(0.5, 0.0).unwrap(), &g64()).unwrap();
        assert!(v.fails());
        let w = v.witness.unwrap();
        let (d, _) = rect_defect(&make_frechet(0.5, 0.0).unwrap(), Property::Mktp2, &w.rect().unwrap()).unwrap();
        assert_eq!(d, w.defect());
        assert!(check_mktp2(&make_baseline(Baseline::M), &g64()).unwrap().holds());
        assert!(check_mktp2(&make_baseline(Baseline::Pi), &g64()).unwrap().holds());
    }

    #[test]
    fn dtp2_examples() {
        assert!(check_dtp2(&make_fgm(0.5).unwrap(), &g64()).unwrap().holds());
        assert!(check_dtp2(&make_fgm(-0.2).unwrap(), &g64()).unwrap().fails());
        assert!(matches!(
            check_dtp2(&make_baseline(Baseline::M), &g64()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn log_shape_tests() {
        let xs: Vec<f64> = (0..201).map(|i| -3.0 + 0.03 * i as f64).collect();
        let tol = Tolerances::default();
        assert!(log_convexity_test(&|x: f64| x.exp(), &xs, tol).unwrap().holds());
        assert!(log_concavity_test(&|_| 1.0, &xs, tol).unwrap().holds());
        let v = log_concavity_test(&|x: f64| (x * x).exp(), &xs, tol).unwrap();
        assert!(v.fails());
        match v.witness.unwrap() {
            Witness::Points { xs, .. } => assert_eq!(xs.len(), 3),
            _ => panic!("expected a triple"),
        }
        assert!(log_convexity_test(&|x: f64| (-x * x).exp(), &xs, tol).unwrap().fails());
        assert!(matches!(
            log_convexity_test(&|x: f64| x, &xs, tol),
            Err(Error::Domain { .. })
        ));
        assert!(log_convexity_test(&|x: f64| x.exp(), &[1.0, 0.5, 2.0], tol).is_err());
    }

    #[test]
    fn two_increasing_examples() {
        assert!(two_increasing_test(&|u, v| u * v, &g64(), None).unwrap().holds());
        let g = make_gaussian(0.5).unwrap();
        let logc = move |u: f64, v: f64| g.cdf(u, v).ln();
        assert!(two_increasing_test(&logc, &g64(), None).unwrap().holds());
        assert!(two_increasing_test(&|u, v| -u * v, &g64(), None).unwrap().fails());
        // a domain that excludes everything leaves nothing to violate
        assert!(two_increasing_test(&|u, v| -u * v, &g64(), Some(&|_, _| false))
            .unwrap()
            .holds());
    }

    #[test]
    fn worst_increase_finds_global_pair() {
        assert_eq!(
            worst_increase(&[3.0, 1.0, 2.0, 0.5, 2.5]).map(|t| (t.0, t.1)),
            Some((3, 4))
        );
        let (_, _, d) = worst_increase(&[3.0, 2.0, 1.0]).unwrap();
        assert!(d < 0.0);
    }

    #[test]
    fn search_finds_w_violation_near_centre() {
        let w = make_baseline(Baseline::W);
        let v = counterexample_search(&w, Property::Pqd, &GridConfig::default(), &SearchBudget::default()).unwrap();
        assert!(v.fails());
        let r = v.witness.unwrap().rect().unwrap();
        assert!((r.u1 - 0.5).abs() < 0.01 && (r.v1 - 0.5).abs() < 0.01);
    }
}
