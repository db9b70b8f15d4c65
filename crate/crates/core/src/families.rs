//! Infinite families of exceptional data together with the angle vector that
//! certifies each of them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::AngleVector;
use crate::branch_data::{BranchDatum, Partition};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum FamilyId {
    /// `[(k₁,k₂), (2^k), (2^k)]`, degree 2k.
    P2K_A,
    /// `[(2^k), (2^{j₁}, 2k−2j₁), (2^{j₂}, 2k−2j₂)]`, degree 2k.
    P2K_B,
    /// `[(k−2, 2^{k+1}), (3^k), (3^k)]`, degree 3k with k odd.
    P3K,
    /// `[(2k−1, 1^{(r−2)k+1}), (r^k), (r^k)]`, degree rk.
    PRK_A,
    /// `[(j₁, j₂, 1^{(r−2)k}), (r^k), (r^k)]`, degree rk.
    PRK_B,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "P2K_A" => Ok(FamilyId::P2K_A),
            "P2K_B" => Ok(FamilyId::P2K_B),
            "P3K" => Ok(FamilyId::P3K),
            "PRK_A" => Ok(FamilyId::PRK_A),
            "PRK_B" => Ok(FamilyId::PRK_B),
            _ => Err(FamilyError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("{family}: {message}")]
    Params { family: FamilyId, message: String },
    #[error("{0} is prime")]
    Prime(u32),
    #[error("degree {0} is below 4, no composite instance exists")]
    TooSmall(u32),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyInstance {
    pub family_id: FamilyId,
    pub params: Vec<u32>,
    pub datum: BranchDatum,
    pub recommended_beta: AngleVector,
}

fn row(parts: impl IntoIterator<Item = u32>) -> Partition {
    Partition::new(parts.into_iter().collect()).expect("generated rows are non-empty and positive")
}

fn repeat(value: u32, count: u32) -> impl Iterator<Item = u32> {
    std::iter::repeat_n(value, count as usize)
}

fn instance(
    family_id: FamilyId,
    params: Vec<u32>,
    degree: u32,
    rows: Vec<Partition>,
    beta: Vec<Rational>,
) -> FamilyInstance {
    FamilyInstance {
        family_id,
        params,
        datum: BranchDatum::new(degree, rows).expect("degree and rows are non-empty"),
        recommended_beta: AngleVector::new(beta).expect("positive witness"),
    }
}

fn check(family: FamilyId, ok: bool, message: impl FnOnce() -> String) -> Result<(), FamilyError> {
    if ok {
        Ok(())
    } else {
        Err(FamilyError::Params {
            family,
            message: message(),
        })
    }
}

/// Degree-2k family. Variant A takes `(k₁, k₂)`, variant B takes `(j₁, j₂)`.
pub fn family_2k(
    k: u32,
    variant: Variant,
    params: (u32, u32),
) -> Result<FamilyInstance, FamilyError> {
    let half = Rational::new(1, 2);
    let (a, b) = params;
    match variant {
        Variant::A => {
            let id = FamilyId::P2K_A;
            check(id, k >= 2, || format!("needs k ≥ 2, got {k}"))?;
            check(id, a >= 1 && b >= 1 && a + b == 2 * k && a != b, || {
                format!(
                    "needs k₁ + k₂ = {} with k₁ ≠ k₂ both ≥ 1, got ({a}, {b})",
                    2 * k
                )
            })?;
            Ok(instance(
                id,
                vec![k, a, b],
                2 * k,
                vec![row([a, b]), row(repeat(2, k)), row(repeat(2, k))],
                vec![half; 3],
            ))
        }
        Variant::B => {
            let id = FamilyId::P2K_B;
            check(id, k >= 3, || format!("needs k ≥ 3, got {k}"))?;
            check(id, a >= 1 && b >= 1 && a + b == k && a != b, || {
                format!("needs j₁ + j₂ = {k} with j₁ ≠ j₂ both ≥ 1, got ({a}, {b})")
            })?;
            Ok(instance(
                id,
                vec![k, a, b],
                2 * k,
                vec![
                    row(repeat(2, k)),
                    row(repeat(2, a).chain([2 * k - 2 * a])),
                    row(repeat(2, b).chain([2 * k - 2 * b])),
                ],
                vec![half; 3],
            ))
        }
    }
}

/// Degree-3k family for odd `k ≥ 3`.
pub fn family_3k(k: u32) -> Result<FamilyInstance, FamilyError> {
    let id = FamilyId::P3K;
    check(id, k >= 3 && k % 2 == 1, || {
        format!("needs odd k ≥ 3, got {k}")
    })?;
    Ok(instance(
        id,
        vec![k],
        3 * k,
        vec![
            row([k - 2].into_iter().chain(repeat(2, k + 1))),
            row(repeat(3, k)),
            row(repeat(3, k)),
        ],
        vec![
            Rational::new(1, 2),
            Rational::new(2, 3),
            Rational::new(2, 3),
        ],
    ))
}

/// Degree-rk family. Variant B takes `(j₁, j₂)`; variant A ignores `params`.
pub fn family_rk(
    r: u32,
    k: u32,
    variant: Variant,
    params: Option<(u32, u32)>,
) -> Result<FamilyInstance, FamilyError> {
    let id = match variant {
        Variant::A => FamilyId::PRK_A,
        Variant::B => FamilyId::PRK_B,
    };
    check(id, r >= 2 && k >= 2, || {
        format!("needs r ≥ 2 and k ≥ 2, got r={r}, k={k}")
    })?;
    let beta = vec![
        Rational::ONE,
        Rational::new(1, r.into()),
        Rational::new(1, r.into()),
    ];
    let (first, params) = match variant {
        Variant::A => (
            row([2 * k - 1].into_iter().chain(repeat(1, (r - 2) * k + 1))),
            vec![r, k],
        ),
        Variant::B => {
            let (a, b) = params.ok_or_else(|| FamilyError::Params {
                family: id,
                message: "variant B needs (j₁, j₂)".into(),
            })?;
            check(id, a >= 1 && b >= 1 && a + b == 2 * k && a != b, || {
                format!(
                    "needs j₁ + j₂ = {} with j₁ ≠ j₂ both ≥ 1, got ({a}, {b})",
                    2 * k
                )
            })?;
            (
                row([a, b].into_iter().chain(repeat(1, (r - 2) * k))),
                vec![r, k, a, b],
            )
        }
    };
    Ok(instance(
        id,
        params,
        r * k,
        vec![first, row(repeat(r, k)), row(repeat(r, k))],
        beta,
    ))
}

fn smallest_prime_factor(d: u32) -> u32 {
    (2..)
        .find(|p| d.is_multiple_of(*p) || p * p > d)
        .filter(|p| d.is_multiple_of(*p))
        .unwrap_or(d)
}

/// One exceptional instance for every composite degree.
pub fn nonprime_witness(d: u32) -> Result<FamilyInstance, FamilyError> {
    if d < 4 {
        return Err(FamilyError::TooSmall(d));
    }
    let p = smallest_prime_factor(d);
    if p == d {
        return Err(FamilyError::Prime(d));
    }
    if d.is_multiple_of(2) {
        let k = d / 2;
        family_2k(k, Variant::A, (k + 1, k - 1))
    } else {
        family_rk(p, d / p, Variant::A, None)
    }
}

/// Every family instance of degree `d`, over all parameter choices. Ordered
/// pairs `(j₁, j₂)` and `(k₁, k₂)` are both listed.
pub fn all_instances(d: u32) -> Vec<FamilyInstance> {
    let mut out = Vec::new();
    if d.is_multiple_of(2) {
        let k = d / 2;
        for a in 1..2 * k {
            if let Ok(i) = family_2k(k, Variant::A, (a, 2 * k - a)) {
                out.push(i);
            }
        }
        for a in 1..k {
            if let Ok(i) = family_2k(k, Variant::B, (a, k - a)) {
                out.push(i);
            }
        }
    }
    if d.is_multiple_of(3) {
        if let Ok(i) = family_3k(d / 3) {
            out.push(i);
        }
    }
    for r in 2..=d {
        if !d.is_multiple_of(r) {
            continue;
        }
        let k = d / r;
        if let Ok(i) = family_rk(r, k, Variant::A, None) {
            out.push(i);
        }
        for a in 1..2 * k {
            if let Ok(i) = family_rk(r, k, Variant::B, Some((a, 2 * k - a))) {
                out.push(i);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch_data::parse_datum;
    use crate::lift::certify_exceptional;

    fn dt(s: &str) -> BranchDatum {
        parse_datum(s).unwrap()
    }

    #[test]
    fn family_2k_examples() {
        let i = family_2k(2, Variant::A, (3, 1)).unwrap();
        assert_eq!(i.datum, dt("4: 3,1 | 2,2 | 2,2"));
        let i = family_2k(3, Variant::B, (1, 2)).unwrap();
        assert_eq!(i.datum, dt("6: 2,2,2 | 4,2 | 2,2,2"));
        assert!(family_2k(2, Variant::B, (1, 1)).is_err());
        assert!(family_2k(3, Variant::A, (3, 3)).is_err());
    }

    #[test]
    fn family_3k_examples() {
        assert_eq!(
            family_3k(3).unwrap().datum,
            dt("9: 2,2,2,2,1 | 3,3,3 | 3,3,3")
        );
        assert_eq!(
            family_3k(5).unwrap().datum,
            dt("15: 3,2,2,2,2,2,2 | 3,3,3,3,3 | 3,3,3,3,3")
        );
        assert!(family_3k(4).is_err());
        assert!(family_3k(1).is_err());
    }

    #[test]
    fn family_rk_examples() {
        assert_eq!(
            family_rk(2, 2, Variant::A, None).unwrap().datum,
            dt("4: 3,1 | 2,2 | 2,2")
        );
        assert_eq!(
            family_rk(3, 2, Variant::A, None).unwrap().datum,
            dt("6: 3,1,1,1 | 3,3 | 3,3")
        );
        assert_eq!(
            family_rk(2, 3, Variant::B, Some((2, 4))).unwrap().datum,
            dt("6: 4,2 | 2,2,2 | 2,2,2")
        );
        assert!(family_rk(2, 3, Variant::B, Some((3, 3))).is_err());
        assert!(family_rk(1, 3, Variant::A, None).is_err());
    }

    #[test]
    fn nonprime_examples() {
        assert_eq!(nonprime_witness(4).unwrap().datum, dt("4: 3,1 | 2,2 | 2,2"));
        let i = nonprime_witness(9).unwrap();
        assert_eq!(i.family_id, FamilyId::PRK_A);
        assert_eq!(i.datum, dt("9: 5,1,1,1,1 | 3,3,3 | 3,3,3"));
        assert_eq!(nonprime_witness(7), Err(FamilyError::Prime(7)));
        assert_eq!(nonprime_witness(3), Err(FamilyError::TooSmall(3)));
    }

    #[test]
    fn every_instance_is_valid_and_certified() {
        for d in 2..=30 {
            for inst in all_instances(d) {
                assert!(inst.datum.is_valid(), "{:?} {}", inst.family_id, inst.datum);
                let cert = certify_exceptional(&inst.datum, &inst.recommended_beta)
                    .unwrap()
                    .certificate();
                assert!(cert.is_some(), "{:?} {}", inst.family_id, inst.datum);
            }
        }
    }

    #[test]
    fn family_id_parsing() {
        assert_eq!("p2k-a".parse::<FamilyId>().unwrap(), FamilyId::P2K_A);
        assert_eq!("PRK_B".parse::<FamilyId>().unwrap(), FamilyId::PRK_B);
        assert!("P4K".parse::<FamilyId>().is_err());
    }
}
