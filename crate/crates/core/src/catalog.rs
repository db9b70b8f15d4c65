//! Batch classification of branching data: the certifier and the monodromy
//! oracle run side by side on every datum.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::branch_data::BranchDatum;
use crate::lift::{
    search_certificate, verify_certificate, ExceptionalityCertificate, SearchConfig,
};
use crate::monodromy::{find_witness, verify_witness, MonodromyWitness, OracleResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CatalogVerdict {
    Realizable,
    ExceptionalCertified,
    /// Exhaustive search found no cover and no certificate was found.
    ExceptionalOracle,
    Unknown,
}

impl CatalogVerdict {
    pub const ALL: [CatalogVerdict; 4] = [
        CatalogVerdict::Realizable,
        CatalogVerdict::ExceptionalCertified,
        CatalogVerdict::ExceptionalOracle,
        CatalogVerdict::Unknown,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CatalogVerdict::Realizable => "REALIZABLE",
            CatalogVerdict::ExceptionalCertified => "EXCEPTIONAL_CERTIFIED",
            CatalogVerdict::ExceptionalOracle => "EXCEPTIONAL_ORACLE",
            CatalogVerdict::Unknown => "UNKNOWN",
        }
    }
}

/// Wall-clock microseconds per stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub certify_us: u64,
    pub oracle_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogRow {
    pub datum: BranchDatum,
    pub verdict: CatalogVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<MonodromyWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ExceptionalityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// A certificate and a realizing witness for the same datum. This would
/// contradict the lifting argument, so it is always reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contradiction {
    pub datum: BranchDatum,
    pub certificate: ExceptionalityCertificate,
    pub witness: MonodromyWitness,
}

/// Classifies one datum. Both stages always run so that a contradiction
/// cannot go unnoticed.
pub fn classify(
    datum: &BranchDatum,
    config: &SearchConfig,
    budget: Option<u64>,
) -> Result<CatalogRow, Box<Contradiction>> {
    let t0 = Instant::now();
    let certificate = search_certificate(datum, config);
    let t1 = Instant::now();
    let oracle = find_witness(datum, budget);
    let t2 = Instant::now();
    let timings = Some(Timings {
        certify_us: (t1 - t0).as_micros() as u64,
        oracle_us: (t2 - t1).as_micros() as u64,
    });

    if let Some(c) = &certificate {
        debug_assert!(verify_certificate(c));
    }
    let row = match (oracle, certificate) {
        (OracleResult::Realizable(witness), Some(certificate)) => {
            return Err(Box::new(Contradiction {
                datum: datum.clone(),
                certificate,
                witness,
            }))
        }
        (OracleResult::Realizable(witness), None) => {
            debug_assert!(verify_witness(datum, &witness.perms));
            CatalogRow {
                datum: datum.clone(),
                verdict: CatalogVerdict::Realizable,
                witness: Some(witness),
                certificate: None,
                timings,
            }
        }
        (_, Some(certificate)) => CatalogRow {
            datum: datum.clone(),
            verdict: CatalogVerdict::ExceptionalCertified,
            witness: None,
            certificate: Some(certificate),
            timings,
        },
        (OracleResult::Unrealizable, None) => CatalogRow {
            datum: datum.clone(),
            verdict: CatalogVerdict::ExceptionalOracle,
            witness: None,
            certificate: None,
            timings,
        },
        (OracleResult::Unknown { .. }, None) => CatalogRow {
            datum: datum.clone(),
            verdict: CatalogVerdict::Unknown,
            witness: None,
            certificate: None,
            timings,
        },
    };
    Ok(row)
}

/// Verdict counts per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CatalogSummary {
    pub by_degree: BTreeMap<u32, BTreeMap<CatalogVerdict, usize>>,
    pub contradictions: usize,
}

impl CatalogSummary {
    pub fn record(&mut self, row: &CatalogRow) {
        *self
            .by_degree
            .entry(row.datum.degree())
            .or_default()
            .entry(row.verdict)
            .or_default() += 1;
    }

    pub fn count(&self, degree: u32, verdict: CatalogVerdict) -> usize {
        self.by_degree
            .get(&degree)
            .and_then(|m| m.get(&verdict))
            .copied()
            .unwrap_or(0)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!("{:>6}", "degree");
        for v in CatalogVerdict::ALL {
            out.push_str(&format!(" {:>22}", v.label()));
        }
        out.push('\n');
        for &d in self.by_degree.keys() {
            out.push_str(&format!("{d:>6}"));
            for v in CatalogVerdict::ALL {
                out.push_str(&format!(" {:>22}", self.count(d, v)));
            }
            out.push('\n');
        }
        if self.contradictions > 0 {
            out.push_str(&format!("contradictions: {}\n", self.contradictions));
        }
        out
    }
}
