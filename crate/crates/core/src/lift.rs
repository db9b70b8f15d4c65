//! Certifying branching data as exceptional.
//!
//! If a branched cover with datum `Π` existed, pulling back a spherical metric
//! with cone angles `2πβᵢ` at the branch points would give a spherical metric
//! with cone angle `2πΠᵢʲβᵢ` at every preimage. So an admissible `β` whose
//! lift `β·Π` is inadmissible shows that no cover realizes `Π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{decide_admissible, AdmissibilityVerdict, AngleVector};
use crate::branch_data::{BranchDatum, ValidationReport};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("angle vector has {beta} entries but the datum has {rows} rows")]
    LengthMismatch { beta: usize, rows: usize },
    #[error("datum is not valid: {}", .0.violations.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidDatum(ValidationReport),
}

/// `β·Π`: every part `Πᵢʲ` times `βᵢ`, row-major.
pub fn lift_angles(beta: &AngleVector, datum: &BranchDatum) -> Result<AngleVector, LiftError> {
    if beta.len() != datum.branch_points() {
        return Err(LiftError::LengthMismatch {
            beta: beta.len(),
            rows: datum.branch_points(),
        });
    }
    let lifted = datum
        .rows()
        .iter()
        .zip(beta.entries())
        .flat_map(|(row, &b)| row.parts().iter().map(move |&p| Rational::from(p) * b))
        .collect();
    Ok(AngleVector::new(lifted).expect("products of positive numbers"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalityCertificate {
    pub datum: BranchDatum,
    pub beta: AngleVector,
    pub base_verdict: AdmissibilityVerdict,
    pub lifted: AngleVector,
    pub lifted_verdict: AdmissibilityVerdict,
}

/// Why a single candidate `β` does not certify anything.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refusal {
    /// `β` itself is not admissible, so the argument never starts.
    BaseNotAdmissible(AdmissibilityVerdict),
    /// The lift is admissible; this proves nothing either way.
    LiftAdmissible {
        lifted: AngleVector,
        verdict: AdmissibilityVerdict,
    },
}

impl Refusal {
    pub fn reason(&self) -> &'static str {
        match self {
            Refusal::BaseNotAdmissible(_) => "base β not admissible",
            Refusal::LiftAdmissible { .. } => "lift admissible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Certified(Box<ExceptionalityCertificate>),
    Refused(Box<Refusal>),
}

impl Certification {
    pub fn certificate(self) -> Option<ExceptionalityCertificate> {
        match self {
            Certification::Certified(c) => Some(*c),
            Certification::Refused(_) => None,
        }
    }
}

fn try_candidate(datum: &BranchDatum, beta: &AngleVector) -> Certification {
    let base_verdict = decide_admissible(beta);
    if !base_verdict.admissible {
        return Certification::Refused(Box::new(Refusal::BaseNotAdmissible(base_verdict)));
    }
    let lifted = lift_angles(beta, datum).expect("length checked by caller");
    let lifted_verdict = decide_admissible(&lifted);
    if lifted_verdict.admissible {
        return Certification::Refused(Box::new(Refusal::LiftAdmissible {
            lifted,
            verdict: lifted_verdict,
        }));
    }
    Certification::Certified(Box::new(ExceptionalityCertificate {
        datum: datum.clone(),
        beta: beta.clone(),
        base_verdict,
        lifted,
        lifted_verdict,
    }))
}

/// Tries a single witness `β` against `datum`.
pub fn certify_exceptional(
    datum: &BranchDatum,
    beta: &AngleVector,
) -> Result<Certification, LiftError> {
    let report = datum.validate();
    if !report.ok {
        return Err(LiftError::InvalidDatum(report));
    }
    if beta.len() != datum.branch_points() {
        return Err(LiftError::LengthMismatch {
            beta: beta.len(),
            rows: datum.branch_points(),
        });
    }
    Ok(try_candidate(datum, beta))
}

/// Re-derives every field of a certificate from its datum and `β`.
pub fn verify_certificate(cert: &ExceptionalityCertificate) -> bool {
    match certify_exceptional(&cert.datum, &cert.beta) {
        Ok(Certification::Certified(fresh)) => *fresh == *cert,
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_denominator: u32,
    pub max_numerator: u32,
    pub extra_candidates: Vec<AngleVector>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_denominator: 6,
            max_numerator: 6,
            extra_candidates: Vec::new(),
        }
    }
}

/// Distinct rearrangements of `v`, lexicographic in the order of `v`'s values.
fn arrangements(v: &[Rational]) -> Vec<Vec<Rational>> {
    let mut cur = v.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    loop {
        let n = cur.len();
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Witness shapes used for the known exceptional families, in every row
/// arrangement.
pub fn family_candidates(datum: &BranchDatum) -> Vec<AngleVector> {
    let n = datum.branch_points();
    let d = datum.degree();
    if n == 0 {
        return Vec::new();
    }
    let half = Rational::new(1, 2);
    let mut shapes: Vec<Vec<Rational>> = vec![vec![half; n]];
    if n >= 2 {
        let mut v = vec![Rational::new(2, 3); n];
        v[0] = half;
        shapes.push(v);
    }
    for r in 2..=d {
        let divides_a_row = datum
            .rows()
            .iter()
            .any(|row| row.parts().iter().all(|&p| p % r == 0));
        if divides_a_row && n >= 2 {
            let mut v = vec![Rational::new(1, r.into()); n];
            v[0] = Rational::ONE;
            shapes.push(v);
        }
    }
    let mut out = Vec::new();
    for shape in shapes {
        // Keep the shape's own order first, then every other arrangement.
        let mut arr = vec![shape.clone()];
        arr.extend(arrangements(&shape).into_iter().filter(|a| *a != shape));
        for a in arr {
            let v = AngleVector::new(a).expect("positive entries");
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Distinct values `p/q` with `1 ≤ p ≤ max_num`, `1 ≤ q ≤ max_den`, sorted.
fn grid_values(max_num: u32, max_den: u32) -> Vec<Rational> {
    let mut vals: Vec<Rational> = (1..=max_den)
        .flat_map(|q| (1..=max_num).map(move |p| Rational::new(p.into(), q.into())))
        .collect();
    vals.sort();
    vals.dedup();
    vals
}

/// Grid vectors whose largest reduced denominator is exactly `level`, in
/// lexicographic order.
fn grid_level(vals: &[Rational], n: usize, level: i128) -> Vec<AngleVector> {
    let allowed: Vec<Rational> = vals
        .iter()
        .copied()
        .filter(|v| v.denom() <= level)
        .collect();
    if allowed.is_empty() || n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        if idx.iter().any(|&i| allowed[i].denom() == level) {
            let v = idx.iter().map(|&i| allowed[i]).collect();
            out.push(AngleVector::new(v).expect("positive grid values"));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < allowed.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Looks for a certifying `β`: family witnesses, then `extra_candidates`, then
/// the rational grid ordered by largest denominator. Deterministic; `None`
/// says nothing about realizability.
pub fn search_certificate(
    datum: &BranchDatum,
    config: &SearchConfig,
) -> Option<ExceptionalityCertificate> {
    if !datum.is_valid() {
        return None;
    }
    let n = datum.branch_points();
    let first = |cands: &[AngleVector]| {
        cands
            .par_iter()
            .filter(|c| c.len() == n)
            .find_map_first(|c| try_candidate(datum, c).certificate())
    };
    if let Some(c) = first(&family_candidates(datum)) {
        return Some(c);
    }
    if let Some(c) = first(&config.extra_candidates) {
        return Some(c);
    }
    let vals = grid_values(config.max_numerator, config.max_denominator);
    for level in 1..=i128::from(config.max_denominator) {
        if let Some(c) = first(&grid_level(&vals, n, level)) {
            return Some(c);
        }
    }
    None
}
