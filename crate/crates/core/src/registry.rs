//! Named families, parameter parsing and property routing shared by the CLI
//! and the test suites.

use std::collections::BTreeMap;

use crate::archimedean::{builtin_archimedean, classify_archimedean, ArchFamily, ArchReport, Archimedean};
use crate::copula::{Copula, GridConfig};
use crate::error::{Error, Result};
use crate::evc::{builtin_pickands, classify_evc, Evc, EvcReport, PickandsFamily};
use crate::families::{make_baseline, make_fgm, make_frechet, make_gaussian, Baseline};
use crate::properties::{check, counterexample_search, Property, SearchBudget};
use crate::verdict::{Status, Verdict};

/// Family names accepted by [`build`].
pub const FAMILIES: &[&str] = &[
    "pi",
    "m",
    "w",
    "frechet",
    "fgm",
    "gaussian",
    "gumbel",
    "spreeuw",
    "evc-gumbel",
    "mo",
    "tawn-sym",
    "tawn-mix",
    "evc-log",
    "evc-jump",
];

pub enum Family {
    Plain(Box<dyn Copula>),
    Archimedean(Archimedean),
    Evc(Evc),
}

pub struct Built {
    pub name: String,
    pub family: Family,
}

impl Built {
    pub fn copula(&self) -> &dyn Copula {
        match &self.family {
            Family::Plain(c) => c.as_ref(),
            Family::Archimedean(a) => a,
            Family::Evc(e) => e,
        }
    }
}

/// Parses `key=value[,key=value]`; decimal point only.
pub fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))?;
        let x: f64 = v
            .trim()
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| Error::InvalidParameter(format!("'{v}' is not a finite decimal number")))?;
        if out.insert(k.trim().to_string(), x).is_some() {
            return Err(Error::InvalidParameter(format!("parameter '{k}' given twice")));
        }
    }
    Ok(out)
}

struct Params<'a> {
    family: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        self.map
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs parameter '{key}'", self.family)))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!(
                "{} does not take parameter '{k}' (expected {allowed:?})",
                self.family
            ))),
            None => Ok(()),
        }
    }
}

pub fn build(name: &str, params: &BTreeMap<String, f64>) -> Result<Built> {
    let p = Params {
        family: name,
        map: params,
    };
    let plain = |c: Box<dyn Copula>| Family::Plain(c);
    let family = match name {
        "pi" | "m" | "w" => {
            p.only(&[])?;
            let b = match name {
                "pi" => Baseline::Pi,
                "m" => Baseline::M,
                _ => Baseline::W,
            };
            plain(Box::new(make_baseline(b)))
        }
        "frechet" => {
            p.only(&["alpha", "beta"])?;
            plain(Box::new(make_frechet(
                p.get("alpha", Some(0.0))?,
                p.get("beta", Some(0.0))?,
            )?))
        }
        "fgm" => {
            p.only(&["theta"])?;
            plain(Box::new(make_fgm(p.get("theta", None)?)?))
        }
        "gaussian" => {
            p.only(&["rho"])?;
            plain(Box::new(make_gaussian(p.get("rho", None)?)?))
        }
        "gumbel" => {
            p.only(&["alpha"])?;
            let spec = builtin_archimedean(ArchFamily::Gumbel {
                alpha: p.get("alpha", None)?,
            })?;
            Family::Archimedean(Archimedean::new(spec))
        }
        "spreeuw" => {
            p.only(&[])?;
            Family::Archimedean(Archimedean::new(builtin_archimedean(ArchFamily::Spreeuw)?))
        }
        _ => {
            let pf = match name {
                "evc-gumbel" => {
                    p.only(&["alpha"])?;
                    PickandsFamily::Gumbel {
                        alpha: p.get("alpha", None)?,
                    }
                }
                "mo" => {
                    p.only(&["alpha", "beta"])?;
                    PickandsFamily::MarshallOlkin {
                        alpha: p.get("alpha", None)?,
                        beta: p.get("beta", None)?,
                    }
                }
                "tawn-sym" => {
                    p.only(&["theta"])?;
                    PickandsFamily::TawnSymmetric {
                        theta: p.get("theta", None)?,
                    }
                }
                "tawn-mix" => {
                    p.only(&["theta", "kappa"])?;
                    PickandsFamily::TawnMixed {
                        theta: p.get("theta", None)?,
                        kappa: p.get("kappa", None)?,
                    }
                }
                "evc-log" => {
                    p.only(&[])?;
                    PickandsFamily::LogExample
                }
                "evc-jump" => {
                    p.only(&[])?;
                    PickandsFamily::JumpExample
                }
                _ => return Err(Error::UnknownFamily(name.to_string())),
            };
            Family::Evc(Evc::new(builtin_pickands(pf)?))
        }
    };
    Ok(Built {
        name: name.to_string(),
        family,
    })
}

/// Verdicts for every property plus the family-specific report.
#[derive(Debug, Clone)]
pub struct Classification {
    pub entries: Vec<(Property, Verdict)>,
    pub archimedean: Option<ArchReport>,
    pub evc: Option<EvcReport>,
}

impl Classification {
    pub fn get(&self, p: Property) -> &Verdict {
        &self
            .entries
            .iter()
            .find(|(q, _)| *q == p)
            .expect("all properties present")
            .1
    }
}

fn grid_verdict(c: &dyn Copula, p: Property, grid: &GridConfig) -> Result<Verdict> {
    match check(c, p, grid) {
        Err(Error::NotApplicable(msg)) => Ok(Verdict::not_applicable(msg)),
        r => r,
    }
}

fn implied(by: &str) -> Verdict {
    Verdict::analytic(Status::Holds, None, format!("implied by {by}"), "")
}

/// Routes Archimedean families through the generator criteria, EVCs through
/// the Pickands decision tree and everything else through grid checks.
pub fn classify(built: &Built, grid: &GridConfig) -> Result<Classification> {
    grid.validate()?;
    let c = built.copula();
    match &built.family {
        Family::Plain(_) => {
            let entries = Property::ALL
                .iter()
                .map(|&p| Ok((p, grid_verdict(c, p, grid)?)))
                .collect::<Result<_>>()?;
            Ok(Classification {
                entries,
                archimedean: None,
                evc: None,
            })
        }
        Family::Archimedean(a) => {
            let r = classify_archimedean(&a.spec, grid)?;
            let pqd = if r.tp2_ltd.holds() {
                implied("LTD")
            } else {
                grid_verdict(c, Property::Pqd, grid)?
            };
            let entries = vec![
                (Property::Pqd, pqd),
                (Property::Ltd, r.tp2_ltd.clone()),
                (Property::Si, r.mktp2_si.clone()),
                (Property::Tp2, r.tp2_ltd.clone()),
                (Property::Mktp2, r.mktp2_si.clone()),
                (Property::Dtp2, r.dtp2.clone()),
            ];
            Ok(Classification {
                entries,
                archimedean: Some(r),
                evc: None,
            })
        }
        Family::Evc(e) => {
            let r = classify_evc(&e.spec, grid)?;
            let entries = vec![
                (Property::Pqd, implied("TP2")),
                (Property::Ltd, implied("TP2")),
                (
                    Property::Si,
                    Verdict::analytic(Status::Holds, None, "extreme value copula", "every EVC is SI"),
                ),
                (
                    Property::Tp2,
                    Verdict::analytic(Status::Holds, None, "extreme value copula", "every EVC is TP2"),
                ),
                (Property::Mktp2, r.mktp2.clone()),
                (
                    Property::Dtp2,
                    Verdict::not_applicable("no density is exposed for extreme value copulas"),
                ),
            ];
            Ok(Classification {
                entries,
                archimedean: None,
                evc: Some(r),
            })
        }
    }
}

/// A single property, using the analytic route where one exists.
pub fn check_property(built: &Built, property: Property, grid: &GridConfig) -> Result<Verdict> {
    match built.family {
        Family::Plain(_) => grid_verdict(built.copula(), property, grid),
        _ => Ok(classify(built, grid)?.get(property).clone()),
    }
}

/// A violating rectangle for `property`: the EVC constructions when they
/// apply, else a grid search. Errors with `NotApplicable` when the property
/// holds analytically.
pub fn witness(built: &Built, property: Property, grid: &GridConfig) -> Result<Verdict> {
    let v = check_property(built, property, grid)?;
    match v.status {
        Status::Holds if v.certificate.method == crate::verdict::Method::Analytic => {
            Err(Error::NotApplicable(format!(
                "{property} holds analytically for {}: {}",
                built.copula().label(),
                v.certificate.detail
            )))
        }
        Status::NotApplicable => Err(Error::NotApplicable(v.note)),
        Status::Fails if v.witness.as_ref().and_then(|w| w.rect()).is_some() => Ok(v),
        _ => {
            let s = counterexample_search(built.copula(), property, grid, &SearchBudget::default())?;
            if s.status == Status::Holds {
                return Err(Error::NotApplicable(format!(
                    "{property} holds on every searched grid for {}",
                    built.copula().label()
                )));
            }
            Ok(s)
        }
    }
}
