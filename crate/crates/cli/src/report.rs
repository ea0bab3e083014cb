use std::collections::BTreeMap;

use copula_dep::archimedean::ArchReport;
use copula_dep::evc::EvcReport;
use copula_dep::verdict::{Certificate, Method};
use copula_dep::{GridConfig, Label, Property, Status, Verdict, Witness};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Entry {
    pub property: Property,
    pub status: Status,
    pub method: Method,
    pub certificate: Certificate,
    pub witness: Option<Witness>,
    pub note: String,
}

impl Entry {
    pub fn new(property: Property, v: Verdict) -> Self {
        Entry {
            property,
            status: v.status,
            method: v.certificate.method,
            certificate: v.certificate,
            witness: v.witness,
            note: v.note,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub family: String,
    pub label: Label,
    pub params: BTreeMap<String, f64>,
    pub grid: GridConfig,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archimedean: Option<ArchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evc: Option<EvcReport>,
    /// Wall-clock time, only with `--timing` so reports stay reproducible.
    pub timing_ms: Option<f64>,
}

impl Report {
    /// One line per entry for stderr.
    pub fn summary(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                let method = match e.method {
                    Method::Analytic => "analytic",
                    Method::Grid => "grid",
                };
                format!("{}: {:?} ({method})", e.property, e.status)
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}
