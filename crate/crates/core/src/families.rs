//! Baseline and closed-form copula families: Π, M, W, Fréchet, FGM, Gaussian.

use crate::copula::{Copula, Label};
use crate::error::{Error, Result};
use crate::normal::{bivariate_normal_cdf, bivariate_normal_pdf, std_normal_cdf, std_normal_pdf, std_normal_quantile};

const TOL_EQ: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Pi,
    M,
    W,
}

/// Π, M or W as a Fréchet mixture with a single unit weight.
pub fn make_baseline(name: Baseline) -> Frechet {
    let (alpha, beta) = match name {
        Baseline::Pi => (0.0, 0.0),
        Baseline::M => (1.0, 0.0),
        Baseline::W => (0.0, 1.0),
    };
    Frechet {
        alpha,
        beta,
        baseline: Some(name),
    }
}

pub fn make_frechet(alpha: f64, beta: f64) -> Result<Frechet> {
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    if !unit(alpha) || !unit(beta) || alpha + beta > 1.0 + TOL_EQ {
        return Err(Error::InvalidParameter(format!(
            "frechet needs alpha, beta in [0,1] with alpha + beta <= 1, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(Frechet {
        alpha,
        beta,
        baseline: None,
    })
}

pub fn make_fgm(theta: f64) -> Result<Fgm> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("fgm needs |theta| <= 1, got {theta}")));
    }
    Ok(Fgm { theta })
}

pub fn make_gaussian(rho: f64) -> Result<Gaussian> {
    if !(rho > -1.0 && rho < 1.0) || rho == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian needs rho in (-1,0) or (0,1), got {rho} (use pi for rho = 0)"
        )));
    }
    Ok(Gaussian {
        rho,
        scale: (1.0 - rho * rho).sqrt(),
    })
}

fn pi_cdf(u: f64, v: f64) -> f64 {
    u * v
}

fn m_cdf(u: f64, v: f64) -> f64 {
    u.min(v)
}

fn w_cdf(u: f64, v: f64) -> f64 {
    (u + v - 1.0).max(0.0)
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `alpha M + (1 - alpha - beta) Π + beta W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frechet {
    pub alpha: f64,
    pub beta: f64,
    baseline: Option<Baseline>,
}

impl Frechet {
    fn pi_weight(&self) -> f64 {
        1.0 - self.alpha - self.beta
    }
}

impl Copula for Frechet {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        match self.baseline {
            Some(Baseline::Pi) => return pi_cdf(u, v),
            Some(Baseline::M) => return m_cdf(u, v),
            Some(Baseline::W) => return w_cdf(u, v),
            None => {}
        }
        self.alpha * m_cdf(u, v) + self.pi_weight() * pi_cdf(u, v) + self.beta * w_cdf(u, v)
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        match self.baseline {
            Some(Baseline::Pi) => return v,
            Some(Baseline::M) => return indicator(v >= u),
            Some(Baseline::W) => return indicator(v >= 1.0 - u),
            None => {}
        }
        self.alpha * indicator(v >= u) + self.pi_weight() * v + self.beta * indicator(v >= 1.0 - u)
    }

    fn density(&self, _u: f64, _v: f64) -> Option<f64> {
        self.has_density().then_some(1.0)
    }

    fn has_density(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    fn label(&self) -> Label {
        match self.baseline {
            Some(Baseline::Pi) => Label::new("pi"),
            Some(Baseline::M) => Label::new("m"),
            Some(Baseline::W) => Label::new("w"),
            None => Label::new("frechet").with("alpha", self.alpha).with("beta", self.beta),
        }
    }

    fn kernel_jumps_in_u(&self, v: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.alpha > 0.0 {
            out.push(v);
        }
        if self.beta > 0.0 {
            out.push(1.0 - v);
        }
        out
    }
}

/// Farlie–Gumbel–Morgenstern: `uv + θ uv (1-u)(1-v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fgm {
    pub theta: f64,
}

impl Copula for Fgm {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        u * v + self.theta * u * v * (1.0 - u) * (1.0 - v)
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        v + self.theta * v * (1.0 - v) * (1.0 - 2.0 * u)
    }

    fn density(&self, u: f64, v: f64) -> Option<f64> {
        Some(1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v))
    }

    fn has_density(&self) -> bool {
        true
    }

    fn label(&self) -> Label {
        Label::new("fgm").with("theta", self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub rho: f64,
    scale: f64,
}

fn quantile_or_inf(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        std_normal_quantile(p).expect("p in (0,1)")
    }
}

impl Copula for Gaussian {
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
        bivariate_normal_cdf(quantile_or_inf(u), quantile_or_inf(v), self.rho)
    }

    fn kernel(&self, u: f64, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        if u <= 0.0 || u >= 1.0 {
            // limiting conditional law is degenerate at ∓∞; any version is valid on a null set
            return 1.0;
        }
        let x = quantile_or_inf(u);
        let y = quantile_or_inf(v);
        std_normal_cdf((y - self.rho * x) / self.scale)
    }

    fn density(&self, u: f64, v: f64) -> Option<f64> {
        let x = quantile_or_inf(u);
        let y = quantile_or_inf(v);
        Some(bivariate_normal_pdf(x, y, self.rho) / (std_normal_pdf(x) * std_normal_pdf(y)))
    }

    fn has_density(&self) -> bool {
        true
    }

    fn label(&self) -> Label {
        Label::new("gaussian").with("rho", self.rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::cdf_u_derivative;

    #[test]
    fn baseline_values() {
        assert_eq!(make_baseline(Baseline::Pi).cdf(0.3, 0.5), 0.3 * 0.5);
        assert_eq!(make_baseline(Baseline::M).kernel(0.3, 0.5), 1.0);
        assert_eq!(make_baseline(Baseline::M).kernel(0.5, 0.5), 1.0);
        assert_eq!(make_baseline(Baseline::M).kernel(0.6, 0.5), 0.0);
        assert_eq!(make_baseline(Baseline::W).cdf(0.5, 0.5), 0.0);
        assert_eq!(make_baseline(Baseline::W).kernel(0.3, 0.7), 1.0);
    }

    #[test]
    fn frechet_reductions_and_kernel() {
        assert_eq!(make_frechet(0.0, 0.0).unwrap().kernel(0.4, 0.7), 0.7);
        assert_eq!(make_frechet(1.0, 0.0).unwrap().cdf(0.3, 0.5), 0.3);
        let c = make_frechet(0.5, 0.0).unwrap();
        assert!((c.kernel(0.4, 0.7) - 0.85).abs() < 1e-15);
        assert!((cdf_u_derivative(&c, 0.4, 0.7, 1e-6) - 0.85).abs() < 1e-6);
        assert!(make_frechet(0.7, 0.4).is_err());
        assert!(make_frechet(-0.1, 0.0).is_err());
    }

    #[test]
    fn fgm_kernel_and_density() {
        let c0 = make_fgm(0.0).unwrap();
        for &(u, v) in &[(0.1, 0.2), (0.5, 0.9), (0.8, 0.3)] {
            assert_eq!(c0.kernel(u, v), v);
        }
        let c1 = make_fgm(1.0).unwrap();
        assert_eq!(c1.kernel(0.0, 0.5), 0.75);
        // one-sided difference at the boundary
        let h = 1e-7;
        let fd = (c1.cdf(h, 0.5) - c1.cdf(0.0, 0.5)) / h;
        assert!((fd - 0.75).abs() < 1e-6);
        assert_eq!(c1.density(0.5, 0.5), Some(1.0));
        assert!(make_fgm(1.5).is_err());
    }

    #[test]
    fn gaussian_values() {
        let c = make_gaussian(0.5).unwrap();
        assert!((c.kernel(0.5, 0.5) - 0.5).abs() < 1e-15);
        let expected = 0.25 + 0.5_f64.asin() / (2.0 * std::f64::consts::PI);
        assert!((c.cdf(0.5, 0.5) - expected).abs() < 1e-12);
        assert!((expected - 1.0 / 3.0).abs() < 1e-12);
        let neg = make_gaussian(-0.5).unwrap();
        assert!(neg.cdf(0.5, 0.5) < 0.25);
        assert!(make_gaussian(0.0).is_err());
        assert!(make_gaussian(1.0).is_err());
    }

    #[test]
    fn gaussian_cdf_matches_two_dim_quadrature() {
        // midpoint rule on the copula density over [0,0.3]x[0,0.6]
        let c = make_gaussian(0.5).unwrap();
        let n = 600;
        let (a, b) = (0.3, 0.6);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let u = a * (i as f64 + 0.5) / n as f64;
                let v = b * (j as f64 + 0.5) / n as f64;
                acc += c.density(u, v).unwrap();
            }
        }
        acc *= a * b / (n * n) as f64;
        assert!((acc - c.cdf(a, b)).abs() < 1e-4, "{acc} vs {}", c.cdf(a, b));
    }
}
