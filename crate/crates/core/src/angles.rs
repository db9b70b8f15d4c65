//! Cone-angle vectors and the admissibility test for spherical conical
//! metrics on the sphere.
//!
//! An entry `β` of an [`AngleVector`] is a cone angle divided by `2π`, so `β = 1`
//! is a smooth point. [`decide_admissible`] strips the smooth points and then
//! runs the Gauss–Bonnet check, the holonomy (odd-lattice distance) check and
//! the four admissibility cases in a fixed order.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{Rational, RationalParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AngleVector(Vec<Rational>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("cone angle entry {index} is {value}, entries must be positive")]
    NonPositive { index: usize, value: Rational },
    #[error("entry {index}: {source}")]
    Parse {
        index: usize,
        source: RationalParseError,
    },
    #[error("invalid JSON angle list: {0}")]
    Json(String),
    #[error("an angle vector must not be empty")]
    Empty,
    #[error("entry {index} is {value}, outside the open interval (0, 1)")]
    OutsideUnitInterval { index: usize, value: Rational },
    #[error("at least two entries are required, got {0}")]
    TooShort(usize),
}

impl AngleVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, AngleError> {
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, x)| !x.is_positive()) {
            return Err(AngleError::NonPositive { index, value });
        }
        Ok(AngleVector(entries))
    }

    /// Vector of `len` copies of `value`.
    pub fn constant(value: Rational, len: usize) -> Result<Self, AngleError> {
        AngleVector::new(vec![value; len])
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `β − 1⃗`.
    pub fn shifted(&self) -> Vec<Rational> {
        self.0.iter().map(|&b| b - Rational::ONE).collect()
    }
}

impl fmt::Display for AngleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Parses `1/2,2/3,2/3` or a JSON list such as `["1/2", "2/3", "2/3"]`.
pub fn parse_angles(text: &str) -> Result<AngleVector, AngleError> {
    let text = text.trim();
    let entries: Vec<Rational> = if text.starts_with('[') {
        serde_json::from_str(text).map_err(|e| AngleError::Json(e.to_string()))?
    } else {
        if text.is_empty() {
            return Err(AngleError::Empty);
        }
        text.split(',')
            .enumerate()
            .map(|(index, tok)| {
                tok.parse()
                    .map_err(|source| AngleError::Parse { index, source })
            })
            .collect::<Result<_, _>>()?
    };
    AngleVector::new(entries)
}

impl FromStr for AngleVector {
    type Err = AngleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_angles(s)
    }
}

impl<'de> Deserialize<'de> for AngleVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<Rational>::deserialize(deserializer)?;
        AngleVector::new(entries).map_err(serde::de::Error::custom)
    }
}

/// Drops every entry equal to 1 (smooth points), keeping order.
pub fn strip_units(beta: &AngleVector) -> AngleVector {
    AngleVector(
        beta.0
            .iter()
            .copied()
            .filter(|&b| b != Rational::ONE)
            .collect(),
    )
}

/// `2 + Σ(βᵢ − 1)`, i.e. area / 2π of a spherical metric with these angles.
pub fn gauss_bonnet_margin(beta: &AngleVector) -> Rational {
    Rational::from_integer(2) + beta.shifted().into_iter().sum::<Rational>()
}

/// Nearest point of the odd-sum integer lattice in ℓ¹ distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddLatticeResult {
    pub distance: Rational,
    pub nearest: Vec<i128>,
}

/// ℓ¹ distance from `x` to the set of integer vectors with odd coordinate sum.
///
/// Round every coordinate; if the rounded sum is even, move the coordinate
/// with the cheapest parity flip (`1 − 2f` for fractional distance `f`) to its
/// other neighbouring integer. Ties at `f = 1/2` round down and cost nothing
/// to flip.
pub fn l1_distance_to_odd_lattice(x: &[Rational]) -> Result<OddLatticeResult, AngleError> {
    if x.is_empty() {
        return Err(AngleError::Empty);
    }
    let half = Rational::new(1, 2);
    let mut nearest = Vec::with_capacity(x.len());
    let mut other = Vec::with_capacity(x.len());
    let mut flip_cost = Vec::with_capacity(x.len());
    let mut distance = Rational::ZERO;
    for &xi in x {
        let lo = xi.floor();
        let frac = xi - Rational::from_integer(lo);
        let (near, far, f) = if frac <= half {
            (lo, lo + 1, frac)
        } else {
            (lo + 1, lo, Rational::ONE - frac)
        };
        nearest.push(near);
        other.push(far);
        flip_cost.push(Rational::ONE - f - f);
        distance = distance + f;
    }
    let parity: i128 = nearest.iter().fold(0, |acc, z| acc ^ (z & 1));
    if parity == 0 {
        let (i, cost) = flip_cost
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .expect("non-empty");
        distance = distance + *cost;
        nearest[i] = other[i];
    }
    Ok(OddLatticeResult { distance, nearest })
}

/// Largest `η` such that every `value / η` is a positive integer.
pub fn rational_gcd(values: &[Rational]) -> Rational {
    assert!(!values.is_empty(), "rational_gcd of an empty list");
    let (num, den) = values.iter().fold((0i128, 1i128), |(g, l), v| {
        assert!(v.is_positive(), "rational_gcd needs positive values");
        (g.gcd(&v.numer()), l.lcm(&v.denom()))
    });
    Rational::new(num, den)
}

/// Witness for the coaxial conditions of admissibility case D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoaxialWitness {
    /// One sign per non-integer entry, in the order those entries appear.
    pub signs: Vec<i8>,
    pub k_prime: u64,
    pub k_double_prime: u64,
    pub eta: Rational,
    pub b: Vec<u64>,
}

/// Searches sign vectors (+1 before −1, first non-integer entry most
/// significant) for one satisfying the coaxial conditions.
///
/// `beta` is expected to be unit-stripped and to contain both integer and
/// non-integer entries; `None` otherwise.
pub fn coaxial_check(beta: &AngleVector) -> Option<CoaxialWitness> {
    let n = beta.len() as i128;
    let (non_int, ints): (Vec<Rational>, Vec<Rational>) =
        beta.0.iter().partition(|b| !b.is_integer());
    let m = non_int.len();
    if m == 0 || ints.is_empty() {
        return None;
    }
    assert!(m < 63, "too many non-integer entries for sign enumeration");
    let int_sum: i128 = ints.iter().map(|b| b.numer()).sum();
    let int_max: i128 = ints.iter().map(|b| b.numer()).max().expect("non-empty");

    for mask in 0u64..(1u64 << m) {
        let signs: Vec<i8> = (0..m)
            .map(|i| if mask >> (m - 1 - i) & 1 == 0 { 1 } else { -1 })
            .collect();
        let k1 = non_int
            .iter()
            .zip(&signs)
            .map(|(&b, &s)| if s > 0 { b } else { -b })
            .sum::<Rational>();
        let Some(k1) = k1.to_integer().filter(|&k| k >= 0) else {
            continue;
        };
        let k2 = int_sum - n - k1 + 2;
        if k2 < 0 || k2.is_odd() {
            continue;
        }
        let ones = usize::try_from(k1 + k2).expect("count of unit entries fits in usize");
        let mut scaled = non_int.clone();
        scaled.extend(std::iter::repeat_n(Rational::ONE, ones));
        let eta = rational_gcd(&scaled);
        let b: Vec<u64> = scaled
            .iter()
            .map(|&v| {
                let q = (v / eta).to_integer().expect("η divides every entry");
                u64::try_from(q).expect("positive multiple")
            })
            .collect();
        let b_sum: u128 = b.iter().map(|&x| u128::from(x)).sum();
        if 2 * int_max as u128 <= b_sum {
            return Some(CoaxialWitness {
                signs,
                k_prime: k1 as u64,
                k_double_prime: k2 as u64,
                eta,
                b,
            });
        }
    }
    None
}

/// Which admissibility case applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdmissibleCase {
    /// Holonomy distance strictly greater than 1.
    A,
    /// Two equal non-integer angles (a football).
    B,
    /// Distance exactly 1, all angles integer, balanced.
    C,
    /// Distance exactly 1, mixed angles, coaxial conditions hold.
    D,
    /// Every angle is 1: the round sphere.
    #[serde(rename = "EMPTY")]
    Empty,
    /// Not admissible.
    #[serde(rename = "NONE")]
    None,
}

impl fmt::Display for AdmissibleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AdmissibleCase::A => "A",
            AdmissibleCase::B => "B",
            AdmissibleCase::C => "C",
            AdmissibleCase::D => "D",
            AdmissibleCase::Empty => "EMPTY",
            AdmissibleCase::None => "NONE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "VerdictWire", try_from = "VerdictWire")]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub case: AdmissibleCase,
    /// Odd-lattice distance of the stripped `β − 1⃗`; absent only for EMPTY.
    pub lattice: Option<OddLatticeResult>,
    pub coaxial_witness: Option<CoaxialWitness>,
    pub reason: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct VerdictWire {
    admissible: bool,
    case: AdmissibleCase,
    distance: Option<Rational>,
    nearest: Option<Vec<i128>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coaxial_witness: Option<CoaxialWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

impl From<AdmissibilityVerdict> for VerdictWire {
    fn from(v: AdmissibilityVerdict) -> Self {
        let (distance, nearest) = match v.lattice {
            Some(l) => (Some(l.distance), Some(l.nearest)),
            None => (None, None),
        };
        VerdictWire {
            admissible: v.admissible,
            case: v.case,
            distance,
            nearest,
            coaxial_witness: v.coaxial_witness,
            reason: v.reason,
        }
    }
}

impl TryFrom<VerdictWire> for AdmissibilityVerdict {
    type Error = String;
    fn try_from(w: VerdictWire) -> Result<Self, String> {
        let lattice = match (w.distance, w.nearest) {
            (Some(distance), Some(nearest)) => Some(OddLatticeResult { distance, nearest }),
            (None, None) => None,
            _ => return Err("`distance` and `nearest` must be given together".into()),
        };
        Ok(AdmissibilityVerdict {
            admissible: w.admissible,
            case: w.case,
            lattice,
            coaxial_witness: w.coaxial_witness,
            reason: w.reason,
        })
    }
}

impl AdmissibilityVerdict {
    fn admit(case: AdmissibleCase, lattice: Option<OddLatticeResult>) -> Self {
        AdmissibilityVerdict {
            admissible: true,
            case,
            lattice,
            coaxial_witness: None,
            reason: None,
        }
    }

    fn reject(lattice: Option<OddLatticeResult>, reason: String) -> Self {
        AdmissibilityVerdict {
            admissible: false,
            case: AdmissibleCase::None,
            lattice,
            coaxial_witness: None,
            reason: Some(reason),
        }
    }
}

/// Decides whether a spherical conical metric on the sphere with cone angles
/// `2πβᵢ` exists.
pub fn decide_admissible(beta: &AngleVector) -> AdmissibilityVerdict {
    let stripped = strip_units(beta);
    if stripped.is_empty() {
        return AdmissibilityVerdict::admit(AdmissibleCase::Empty, None);
    }
    let shifted = stripped.shifted();
    let lattice = l1_distance_to_odd_lattice(&shifted).expect("non-empty");

    if stripped.len() == 1 {
        let b = stripped.0[0];
        return AdmissibilityVerdict::reject(
            Some(lattice),
            format!("a single cone point of angle 2π·{b} cannot exist on the sphere"),
        );
    }

    let margin = gauss_bonnet_margin(beta);
    if !margin.is_positive() {
        return AdmissibilityVerdict::reject(
            Some(lattice),
            format!("Gauss-Bonnet fails: 2 + Σ(β−1) = {margin} ≤ 0"),
        );
    }

    let distance = lattice.distance;
    if distance < Rational::ONE {
        return AdmissibilityVerdict::reject(
            Some(lattice),
            format!("holonomy condition fails: odd-lattice distance {distance} < 1"),
        );
    }
    if distance > Rational::ONE {
        return AdmissibilityVerdict::admit(AdmissibleCase::A, Some(lattice));
    }

    let entries = stripped.entries();
    let all_integer = entries.iter().all(Rational::is_integer);
    let any_integer = entries.iter().any(Rational::is_integer);

    if entries.len() == 2 && entries[0] == entries[1] && !all_integer {
        return AdmissibilityVerdict::admit(AdmissibleCase::B, Some(lattice));
    }
    if all_integer {
        let max = shifted.iter().max().copied().expect("non-empty");
        let sum: Rational = shifted.iter().sum();
        if max + max <= sum {
            return AdmissibilityVerdict::admit(AdmissibleCase::C, Some(lattice));
        }
        return AdmissibilityVerdict::reject(
            Some(lattice),
            format!(
                "distance 1 with integer angles but 2·max(β−1) = {} > Σ(β−1) = {sum}",
                max + max
            ),
        );
    }
    if any_integer {
        if let Some(witness) = coaxial_check(&stripped) {
            let mut v = AdmissibilityVerdict::admit(AdmissibleCase::D, Some(lattice));
            v.coaxial_witness = Some(witness);
            return v;
        }
        return AdmissibilityVerdict::reject(
            Some(lattice),
            "distance 1 with mixed angles and no sign choice satisfies the coaxial conditions"
                .into(),
        );
    }
    let reason = if entries.len() == 2 {
        "distance 1 with two unequal angles (football angles must agree)".to_string()
    } else {
        "distance 1 with no integer angle".to_string()
    };
    AdmissibilityVerdict::reject(Some(lattice), reason)
}

/// Closed-form criterion for angle vectors with every entry in (0, 1).
pub fn troyanov_admissible(beta: &AngleVector) -> Result<bool, AngleError> {
    let entries = beta.entries();
    if entries.len() < 2 {
        return Err(AngleError::TooShort(entries.len()));
    }
    if let Some((index, &value)) = entries
        .iter()
        .enumerate()
        .find(|(_, b)| !(b.is_positive() && **b < Rational::ONE))
    {
        return Err(AngleError::OutsideUnitInterval { index, value });
    }
    let n = entries.len();
    if n == 2 {
        return Ok(entries[0] == entries[1]);
    }
    if gauss_bonnet_margin(beta) <= Rational::ZERO {
        return Ok(false);
    }
    let total: Rational = entries.iter().sum();
    let two = Rational::from_integer(2);
    let slack = Rational::from_integer(n as i128 - 2);
    Ok(entries.iter().all(|&b| {
        let cap = if b + b < two { b + b } else { two };
        cap + slack > total
    }))
}
