//! The copula capability and the geometric types shared by every check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family name plus parameters, used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "{{{}}}", parts.join(","))?;
        }
        Ok(())
    }
}

/// A bivariate copula, exposed through its distribution function and a
/// version of its Markov kernel `K_C(u, [0, v])`.
///
/// At kernel jump points every family uses the right-continuous version, so
/// grid checks are deterministic.
pub trait Copula: Send + Sync {
    fn cdf(&self, u: f64, v: f64) -> f64;

    /// `K_C(u, [0, v])`.
    fn kernel(&self, u: f64, v: f64) -> f64;

    /// Lebesgue density, for absolutely continuous families only.
    fn density(&self, _u: f64, _v: f64) -> Option<f64> {
        None
    }

    fn has_density(&self) -> bool {
        false
    }

    fn label(&self) -> Label;

    /// Points `u` in (0,1) at which `u -> kernel(u, v)` may jump.
    fn kernel_jumps_in_u(&self, _v: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl<C: Copula + ?Sized> Copula for Box<C> {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        (**self).cdf(u, v)
    }
    fn kernel(&self, u: f64, v: f64) -> f64 {
        (**self).kernel(u, v)
    }
    fn density(&self, u: f64, v: f64) -> Option<f64> {
        (**self).density(u, v)
    }
    fn has_density(&self) -> bool {
        (**self).has_density()
    }
    fn label(&self) -> Label {
        (**self).label()
    }
    fn kernel_jumps_in_u(&self, v: f64) -> Vec<f64> {
        (**self).kernel_jumps_in_u(v)
    }
}

/// `[u1, u2] x [v1, v2]` with `0 < u1 <= u2 < 1` and `0 < v1 <= v2 < 1`.
///
/// Degenerate rectangles (`u1 == u2` or `v1 == v2`) carry point and segment
/// witnesses of the PQD, LTD and SI checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl Rectangle {
    pub fn new(u1: f64, u2: f64, v1: f64, v2: f64) -> Result<Self> {
        let r = Rectangle { u1, u2, v1, v2 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |a: f64, b: f64| 0.0 < a && a <= b && b < 1.0;
        if ok(self.u1, self.u2) && ok(self.v1, self.v2) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "rectangle must satisfy 0 < u1 <= u2 < 1 and 0 < v1 <= v2 < 1, got {self:?}"
            )))
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u1 <= u && u <= self.u2 && self.v1 <= v && v <= self.v2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    /// Uniform in `log(x / (1 - x))`, denser near the boundary.
    Logit,
}

/// Resolution, margins and tolerances for every grid-based check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n_u: usize,
    pub n_v: usize,
    pub margin: f64,
    /// Defects at or below this are rounding noise.
    pub tol_eq: f64,
    /// Defects above this are genuine violations.
    pub tol_strict: f64,
    pub spacing: Spacing,
    /// Restricts the grid to a sub-box (corners included); `margin` is then ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Rectangle>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_u: 256,
            n_v: 256,
            margin: 0.005,
            tol_eq: 1e-12,
            tol_strict: 1e-9,
            spacing: Spacing::Uniform,
            region: None,
        }
    }
}

impl GridConfig {
    pub fn with_resolution(n: usize) -> Self {
        GridConfig {
            n_u: n,
            n_v: n,
            ..Default::default()
        }
    }

    pub fn with_region(mut self, region: Rectangle) -> Self {
        self.region = Some(region);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_u < 2 || self.n_v < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "margin must lie in (0, 0.5), got {}",
                self.margin
            )));
        }
        if !(self.tol_eq >= 0.0 && self.tol_strict >= self.tol_eq) {
            return Err(Error::InvalidParameter(format!(
                "need tol_strict >= tol_eq >= 0, got tol_strict={} tol_eq={}",
                self.tol_strict, self.tol_eq
            )));
        }
        if let Some(r) = &self.region {
            r.validate()?;
            if r.u1 == r.u2 || r.v1 == r.v2 {
                return Err(Error::InvalidParameter("grid region must have positive area".into()));
            }
        }
        Ok(())
    }

    pub fn u_axis(&self) -> Vec<f64> {
        match &self.region {
            Some(r) => axis(r.u1, r.u2, self.n_u, self.spacing),
            None => axis(self.margin, 1.0 - self.margin, self.n_u, self.spacing),
        }
    }

    pub fn v_axis(&self) -> Vec<f64> {
        match &self.region {
            Some(r) => axis(r.v1, r.v2, self.n_v, self.spacing),
            None => axis(self.margin, 1.0 - self.margin, self.n_v, self.spacing),
        }
    }
}

fn axis(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let last = (n - 1) as f64;
    let mut pts: Vec<f64> = match spacing {
        Spacing::Uniform => (0..n).map(|i| lo + (hi - lo) * (i as f64 / last)).collect(),
        Spacing::Logit => {
            let logit = |x: f64| (x / (1.0 - x)).ln();
            let (a, b) = (logit(lo), logit(hi));
            (0..n)
                .map(|i| {
                    let z = a + (b - a) * (i as f64 / last);
                    1.0 / (1.0 + (-z).exp())
                })
                .collect()
        }
    };
    // pin the endpoints exactly so region corners are grid points
    pts[0] = lo;
    pts[n - 1] = hi;
    pts
}

/// Central finite difference of `u -> cdf(u, v)`.
pub fn cdf_u_derivative(c: &dyn Copula, u: f64, v: f64, h: f64) -> f64 {
    (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h)
}

/// Tanh-sinh quadrature of `u -> kernel(u, v)` over (0,1), split at the
/// kernel's jump points. Abscissae stay strictly inside each piece, so jumps
/// and steep boundary layers do not degrade the result.
pub fn kernel_integral(c: &dyn Copula, v: f64) -> f64 {
    let mut cuts: Vec<f64> = c
        .kernel_jumps_in_u(v)
        .into_iter()
        .filter(|&x| x > 0.0 && x < 1.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(1.0);
    let f = |u: f64| c.kernel(u, v);
    edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| adaptive_de(&f, w[0], w[1], 1e-12, 24))
        .sum()
}

/// Bisects wherever the double-exponential error estimate misses the target,
/// which isolates interior kinks.
fn adaptive_de(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    if out.error_estimate <= tol || depth == 0 {
        return out.integral;
    }
    let m = 0.5 * (a + b);
    adaptive_de(f, a, m, 0.5 * tol, depth - 1) + adaptive_de(f, m, b, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_hits_margins() {
        let g = GridConfig::default();
        let ax = g.u_axis();
        assert_eq!(ax.len(), 256);
        assert_eq!(ax[0], 0.005);
        assert_eq!(ax[255], 0.995);
        assert!(ax.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn logit_axis_is_denser_at_edges() {
        let g = GridConfig {
            spacing: Spacing::Logit,
            ..GridConfig::with_resolution(101)
        };
        let ax = g.u_axis();
        assert!(ax[1] - ax[0] < ax[51] - ax[50]);
        assert!((ax[50] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn region_includes_corners() {
        let g = GridConfig::with_resolution(200).with_region(Rectangle::new(0.9, 0.95, 0.5, 0.6).unwrap());
        assert_eq!(g.u_axis()[0], 0.9);
        assert_eq!(g.u_axis()[199], 0.95);
        assert_eq!(g.v_axis()[199], 0.6);
    }

    #[test]
    fn rejects_bad_config() {
        let mut g = GridConfig::default();
        g.margin = 0.5;
        assert!(g.validate().is_err());
        let mut g = GridConfig::default();
        g.tol_eq = 1e-6;
        assert!(g.validate().is_err());
        assert!(Rectangle::new(0.5, 0.4, 0.1, 0.2).is_err());
        assert!(Rectangle::new(0.0, 0.4, 0.1, 0.2).is_err());
    }
}
