//! Outcomes of property checks.

use serde::{Deserialize, Serialize};

use crate::copula::{GridConfig, Rectangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
    NotApplicable,
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A rectangle (possibly degenerate, for point and segment witnesses) with
    /// the evaluated values in the order documented by the producing check.
    Rect {
        rect: Rectangle,
        values: Vec<f64>,
        defect: f64,
    },
    /// Sample points of a one-dimensional criterion (triples for
    /// log-convexity, a single location for jump scans).
    Points {
        xs: Vec<f64>,
        values: Vec<f64>,
        defect: f64,
    },
}

impl Witness {
    pub fn defect(&self) -> f64 {
        match self {
            Witness::Rect { defect, .. } | Witness::Points { defect, .. } => *defect,
        }
    }

    pub fn rect(&self) -> Option<Rectangle> {
        match self {
            Witness::Rect { rect, .. } => Some(*rect),
            Witness::Points { .. } => None,
        }
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `grid` for numeric scans, `analytic` for criterion-based decisions.
    pub method: Method,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Largest defect seen; `<= tol_eq` for a clean Holds.
    pub max_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_eq: f64,
    pub tol_strict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_eq: 1e-12,
            tol_strict: 1e-9,
        }
    }
}

impl From<&GridConfig> for Tolerances {
    fn from(g: &GridConfig) -> Self {
        Tolerances {
            tol_eq: g.tol_eq,
            tol_strict: g.tol_strict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub certificate: Certificate,
    pub note: String,
}

impl Verdict {
    /// Classifies the worst defect found by a scan: `> tol_strict` fails,
    /// `(tol_eq, tol_strict]` is inconclusive, anything else holds.
    pub fn from_scan(worst: Option<Witness>, grid: &GridConfig, detail: impl Into<String>) -> Verdict {
        let mut v = Verdict::from_defects(worst, Tolerances::from(grid), detail);
        if v.status == Status::Holds {
            v.note = format!("holds at {}x{} grid", grid.n_u, grid.n_v);
        }
        v.certificate.grid = Some(grid.clone());
        v
    }

    /// Same classification for scans that are not over a copula grid.
    pub fn from_defects(worst: Option<Witness>, tol: Tolerances, detail: impl Into<String>) -> Verdict {
        let max_defect = worst.as_ref().map_or(f64::NEG_INFINITY, Witness::defect);
        let status = if max_defect > tol.tol_strict {
            Status::Fails
        } else if max_defect > tol.tol_eq {
            Status::Inconclusive
        } else {
            Status::Holds
        };
        let note = match status {
            Status::Holds => "holds at the sampled resolution".to_string(),
            Status::Fails => String::new(),
            Status::Inconclusive => "worst defect lies between tol_eq and tol_strict".to_string(),
            Status::NotApplicable => unreachable!(),
        };
        Verdict {
            status,
            witness: if status == Status::Holds { None } else { worst },
            certificate: Certificate {
                method: Method::Grid,
                detail: detail.into(),
                grid: None,
                max_defect: max_defect.max(0.0),
            },
            note,
        }
    }

    pub fn analytic(
        status: Status,
        witness: Option<Witness>,
        detail: impl Into<String>,
        note: impl Into<String>,
    ) -> Verdict {
        let max_defect = witness.as_ref().map_or(0.0, Witness::defect);
        Verdict {
            status,
            witness,
            certificate: Certificate {
                method: Method::Analytic,
                detail: detail.into(),
                grid: None,
                max_defect,
            },
            note: note.into(),
        }
    }

    pub fn not_applicable(reason: impl Into<String>) -> Verdict {
        let reason = reason.into();
        Verdict {
            status: Status::NotApplicable,
            witness: None,
            certificate: Certificate {
                method: Method::Analytic,
                detail: "not applicable".to_string(),
                grid: None,
                max_defect: 0.0,
            },
            note: reason,
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

/// Keeps the worst defect, preferring the earliest candidate on ties so scans
/// are order-deterministic.
#[derive(Debug, Default)]
pub(crate) struct Worst {
    pub best: Option<Witness>,
}

impl Worst {
    pub fn offer(&mut self, defect: f64, make: impl FnOnce() -> Witness) {
        if !defect.is_finite() {
            return;
        }
        let better = match &self.best {
            None => true,
            Some(w) => defect > w.defect(),
        };
        if better {
            self.best = Some(make());
        }
    }

    pub fn current(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, Witness::defect)
    }
}
