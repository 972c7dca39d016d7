//! Serializable summary of the invariants of a string link.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stringlink::StringLink;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub monomial: Vec<usize>,
    /// Arbitrary-precision integer in decimal.
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandEntry {
    pub strand: usize,
    pub longitude: String,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuEntry {
    pub indices: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema_version: u32,
    pub n: usize,
    pub braid: String,
    pub strands: Vec<StrandEntry>,
    pub mu: Vec<MuEntry>,
    pub borromean: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coordinates: Option<Vec<String>>,
}

/// All `μ(i, j)` with `i ≠ j`.
pub fn pairwise_indices(n: usize) -> Vec<Vec<usize>> {
    (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| vec![i, j]))
        .collect()
}

impl InvariantReport {
    /// Builds the report; `mu` selects the μ's to tabulate, defaulting to
    /// every pairwise linking number.
    pub fn build(link: &StringLink, mu: Option<&[Vec<usize>]>) -> Result<Self> {
        let inv = link.invariants()?;
        let n = link.n();
        let strands = (1..=n)
            .map(|i| {
                Ok(StrandEntry {
                    strand: i,
                    longitude: link.longitude(i)?.to_string(),
                    terms: inv
                        .entry(i)
                        .terms()
                        .map(|(m, c)| Term {
                            monomial: m.indices().to_vec(),
                            coefficient: c.to_string(),
                        })
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let selection = match mu {
            Some(sel) => sel.to_vec(),
            None => pairwise_indices(n),
        };
        let mu = selection
            .into_iter()
            .map(|idx| {
                Ok(MuEntry {
                    value: link.mu(&idx)?.to_string(),
                    indices: idx,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let borromean = link.is_borromean()?;
        let coordinates = if borromean {
            Some(
                link.borromean_coordinates()?
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
            )
        } else {
            None
        };
        Ok(InvariantReport {
            schema_version: SCHEMA_VERSION,
            n,
            braid: link.rep().to_string(),
            strands,
            mu,
            borromean,
            coordinates,
        })
    }

    /// Plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "braid: {}", self.braid);
        for s in &self.strands {
            let _ = writeln!(out, "strand {}: longitude {}", s.strand, s.longitude);
            let terms: Vec<String> = s
                .terms
                .iter()
                .map(|t| {
                    let m: String = t.monomial.iter().map(|i| format!("X{i}")).collect();
                    format!(
                        "{}{}",
                        t.coefficient,
                        if m.is_empty() {
                            String::new()
                        } else {
                            format!("*{m}")
                        }
                    )
                })
                .collect();
            let _ = writeln!(out, "  expansion: {}", terms.join(" + "));
        }
        for m in &self.mu {
            let idx: Vec<String> = m.indices.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "mu({}) = {}", idx.join(","), m.value);
        }
        let _ = writeln!(out, "borromean: {}", self.borromean);
        if let Some(c) = &self.coordinates {
            let _ = writeln!(out, "coordinates: [{}]", c.join(", "));
        }
        out
    }
}
