//! Branching data `(d, Π)` for covers of the sphere by the sphere.
//!
//! A [`BranchDatum`] is a degree together with one [`Partition`] of that degree
//! per branching point. Parts equal to 1 (unramified preimages) are always
//! written out, so every row sums to the degree.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Non-empty multiset of positive integers, stored non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("a partition needs at least one part")]
    Empty,
    #[error("parts must be positive")]
    ZeroPart,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Empty);
        }
        if parts.contains(&0) {
            return Err(PartitionError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of parts (preimages of the branching point).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn largest(&self) -> u32 {
        self.0[0]
    }

    /// Σ (part − 1).
    pub fn defect(&self) -> u64 {
        self.0.iter().map(|&p| u64::from(p - 1)).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.largest() == 1
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(deserializer)?;
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Degree plus one partition per branching point.
///
/// Parts inside each row are always sorted; the row order is kept as given so
/// that an angle vector can be paired with rows positionally. Use
/// [`BranchDatum::canonical`] when comparing data up to row reordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BranchDatum {
    degree: u32,
    rows: Vec<Partition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("a datum needs at least one row")]
    NoRows,
}

impl BranchDatum {
    pub fn new(degree: u32, rows: Vec<Partition>) -> Result<Self, DatumError> {
        if degree == 0 {
            return Err(DatumError::ZeroDegree);
        }
        if rows.is_empty() {
            return Err(DatumError::NoRows);
        }
        Ok(BranchDatum { degree, rows })
    }

    /// Convenience constructor from raw part lists. Panics on empty rows or
    /// zero parts; meant for literals in tests and generators.
    pub fn from_parts(degree: u32, rows: &[&[u32]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| Partition::new(r.to_vec()).expect("valid partition literal"))
            .collect();
        BranchDatum::new(degree, rows).expect("valid datum literal")
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn rows(&self) -> &[Partition] {
        &self.rows
    }

    /// Number of branching points `n`.
    pub fn branch_points(&self) -> usize {
        self.rows.len()
    }

    /// Total number of preimages Σℓᵢ.
    pub fn total_parts(&self) -> usize {
        self.rows.iter().map(Partition::len).sum()
    }

    /// Same datum with rows sorted lexicographically non-increasing.
    pub fn canonical(&self) -> BranchDatum {
        let mut rows = self.rows.clone();
        rows.sort_unstable_by(|a, b| b.cmp(a));
        BranchDatum {
            degree: self.degree,
            rows,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] >= w[1])
    }

    /// Equality up to reordering rows.
    pub fn equivalent(&self, other: &BranchDatum) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_datum(self.degree, &self.rows)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    #[serde(rename = "row-sum")]
    RowSum,
    #[serde(rename = "has-branching-part")]
    HasBranchingPart,
    #[serde(rename = "defect-equals-2d-minus-2")]
    DefectEquals2dMinus2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub message: String,
    pub row: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Σ over all parts of (part − 1).
pub fn total_defect(rows: &[Partition]) -> u64 {
    rows.iter().map(Partition::defect).sum()
}

/// Checks the degree-sum, branching-part and Riemann–Hurwitz constraints for a
/// sphere-to-sphere cover.
pub fn validate_datum(degree: u32, rows: &[Partition]) -> ValidationReport {
    let mut violations = Vec::new();
    let d = u64::from(degree);
    for (i, row) in rows.iter().enumerate() {
        if row.sum() != d {
            violations.push(Violation {
                constraint: Constraint::RowSum,
                message: format!("row {i} ({row}) sums to {}, expected {d}", row.sum()),
                row: Some(i),
            });
        }
        if row.is_trivial() {
            violations.push(Violation {
                constraint: Constraint::HasBranchingPart,
                message: format!("row {i} ({row}) has no part greater than 1"),
                row: Some(i),
            });
        }
    }
    let defect = total_defect(rows);
    let expected = (2 * d).saturating_sub(2);
    if defect != expected {
        violations.push(Violation {
            constraint: Constraint::DefectEquals2dMinus2,
            message: format!("total defect is {defect}, Riemann-Hurwitz requires {expected}"),
            row: None,
        });
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

type PartitionMemo = HashMap<(u32, u32), Vec<Vec<u32>>>;

fn partitions_bounded(n: u32, max_part: u32, memo: &mut PartitionMemo) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let max_part = max_part.min(n);
    if let Some(hit) = memo.get(&(n, max_part)) {
        return hit.clone();
    }
    let mut out = Vec::new();
    for first in (1..=max_part).rev() {
        for tail in partitions_bounded(n - first, first, memo) {
            let mut p = Vec::with_capacity(tail.len() + 1);
            p.push(first);
            p.extend(tail);
            out.push(p);
        }
    }
    memo.insert((n, max_part), out.clone());
    out
}

/// All partitions of `n` in reverse-lexicographic order, `(n)` first.
pub fn partitions(n: u32) -> Vec<Partition> {
    let mut memo = PartitionMemo::new();
    partitions_bounded(n, n, &mut memo)
        .into_iter()
        .map(Partition)
        .collect()
}

/// Iterator over every valid datum of degree `d` with `n` rows, each exactly
/// once up to reordering rows. Rows come out lexicographically non-increasing.
pub struct DatumEnumerator {
    degree: u32,
    target: u64,
    // Branching partitions of d, lexicographically decreasing.
    candidates: Vec<Partition>,
    // Non-decreasing indices into `candidates`; None once exhausted.
    indices: Option<Vec<usize>>,
}

impl DatumEnumerator {
    fn advance(&mut self) {
        let Some(idx) = self.indices.as_mut() else {
            return;
        };
        let m = self.candidates.len();
        let mut pos = idx.len();
        while pos > 0 {
            pos -= 1;
            if idx[pos] + 1 < m {
                let v = idx[pos] + 1;
                for slot in &mut idx[pos..] {
                    *slot = v;
                }
                return;
            }
        }
        self.indices = None;
    }
}

impl Iterator for DatumEnumerator {
    type Item = BranchDatum;

    fn next(&mut self) -> Option<BranchDatum> {
        loop {
            let idx = self.indices.as_ref()?;
            let defect: u64 = idx.iter().map(|&i| self.candidates[i].defect()).sum();
            let hit = (defect == self.target).then(|| BranchDatum {
                degree: self.degree,
                rows: idx.iter().map(|&i| self.candidates[i].clone()).collect(),
            });
            self.advance();
            if hit.is_some() {
                return hit;
            }
        }
    }
}

/// Enumerates all valid data of degree `d` with exactly `n` branching points.
pub fn enumerate_data(d: u32, n: usize) -> DatumEnumerator {
    let candidates: Vec<Partition> = if d >= 2 {
        partitions(d)
            .into_iter()
            .filter(|p| !p.is_trivial())
            .collect()
    } else {
        Vec::new()
    };
    let indices = (n > 0 && !candidates.is_empty()).then(|| vec![0; n]);
    DatumEnumerator {
        degree: d,
        target: 2 * u64::from(d) - 2,
        candidates,
        indices,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at offset {pos}: unexpected `{token}`: {message}")]
    Unexpected {
        pos: usize,
        token: String,
        message: String,
    },
    #[error("at offset {pos}: unexpected end of input, {message}")]
    Eof { pos: usize, message: String },
    #[error("invalid JSON datum: {0}")]
    Json(String),
    #[error(transparent)]
    Datum(#[from] DatumError),
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn number(&mut self, what: &str) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || matches!(c, ',' | '|' | ':'))
            .unwrap_or(rest.len());
        if len == 0 {
            return match rest.chars().next() {
                None => Err(ParseError::Eof {
                    pos: start,
                    message: format!("expected {what}"),
                }),
                Some(c) => Err(ParseError::Unexpected {
                    pos: start,
                    token: c.to_string(),
                    message: format!("expected {what}"),
                }),
            };
        }
        let token = &rest[..len];
        let value: u32 = token.parse().map_err(|_| ParseError::Unexpected {
            pos: start,
            token: token.to_string(),
            message: format!("expected {what}"),
        })?;
        if value == 0 {
            return Err(ParseError::Unexpected {
                pos: start,
                token: token.to_string(),
                message: format!("{what} must be positive"),
            });
        }
        self.pos += len;
        Ok(value)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => Err(ParseError::Unexpected {
                pos: self.pos,
                token: got.to_string(),
                message: format!("expected `{c}`"),
            }),
            None => Err(ParseError::Eof {
                pos: self.pos,
                message: format!("expected `{c}`"),
            }),
        }
    }
}

#[derive(Deserialize)]
struct DatumJson {
    degree: u32,
    rows: Vec<Vec<u32>>,
}

/// Parses `d: p,p,... | p,p,... | ...` or `{"degree": d, "rows": [[...], ...]}`.
///
/// Parts are sorted within each row; row order is preserved. No validation of
/// the Riemann–Hurwitz constraints happens here.
pub fn parse_datum(text: &str) -> Result<BranchDatum, ParseError> {
    if text.trim_start().starts_with('{') {
        let raw: DatumJson =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        let rows = raw
            .rows
            .into_iter()
            .map(|r| Partition::new(r).map_err(|e| ParseError::Json(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(BranchDatum::new(raw.degree, rows)?);
    }

    let mut tok = Tokens { text, pos: 0 };
    let degree = tok.number("a degree")?;
    tok.expect(':')?;
    let mut rows = Vec::new();
    loop {
        let mut parts = vec![tok.number("a part")?];
        while tok.peek() == Some(',') {
            tok.pos += 1;
            parts.push(tok.number("a part")?);
        }
        rows.push(Partition::new(parts).expect("parts are positive and non-empty"));
        match tok.peek() {
            None => break,
            Some('|') => tok.pos += 1,
            Some(c) => {
                return Err(ParseError::Unexpected {
                    pos: tok.pos,
                    token: c.to_string(),
                    message: "expected `,` or `|`".into(),
                })
            }
        }
    }
    Ok(BranchDatum::new(degree, rows)?)
}

pub fn format_datum(datum: &BranchDatum) -> String {
    datum.to_string()
}

impl fmt::Display for BranchDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.degree)?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl FromStr for BranchDatum {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_datum(s)
    }
}

impl<'de> Deserialize<'de> for BranchDatum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Json { degree: u32, rows: Vec<Partition> },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => parse_datum(&s).map_err(serde::de::Error::custom),
            Repr::Json { degree, rows } => {
                BranchDatum::new(degree, rows).map_err(serde::de::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(text: &str) -> BranchDatum {
        parse_datum(text).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(d("2: 2 | 2").is_valid());
        assert!(d("4: 3,1 | 2,2 | 2,2").is_valid());

        let report = d("4: 2,2 | 2,2").validate();
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0].constraint,
            Constraint::DefectEquals2dMinus2
        );
    }

    #[test]
    fn degree_one_is_never_branched() {
        let report = d("1: 1").validate();
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.constraint == Constraint::HasBranchingPart && v.row == Some(0)));
        assert_eq!(BranchDatum::new(1, vec![]), Err(DatumError::NoRows));
    }

    #[test]
    fn row_sum_violation_names_the_row() {
        let report = d("4: 3,1 | 2,1 | 2,2").validate();
        let v: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.constraint == Constraint::RowSum)
            .collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].row, Some(1));
    }

    #[test]
    fn defect_examples() {
        assert_eq!(total_defect(d("2: 2 | 2").rows()), 2);
        assert_eq!(total_defect(d("3: 1,1,1").rows()), 0);
        assert_eq!(total_defect(d("4: 3,1 | 2,2 | 2,2").rows()), 6);
    }

    #[test]
    fn partitions_in_reverse_lex_order() {
        let p: Vec<Vec<u32>> = partitions(4).into_iter().map(|p| p.0).collect();
        assert_eq!(
            p,
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
        let counts: Vec<usize> = (1..=12).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
    }

    #[test]
    fn enumerate_small_cases() {
        let e: Vec<_> = enumerate_data(2, 2).collect();
        assert_eq!(e, vec![d("2: 2 | 2")]);
        let e: Vec<_> = enumerate_data(3, 2).collect();
        assert_eq!(e, vec![d("3: 3 | 3")]);
        assert_eq!(enumerate_data(2, 3).count(), 0);
        assert_eq!(enumerate_data(1, 1).count(), 0);
    }

    #[test]
    fn enumerated_rows_are_canonical() {
        for datum in enumerate_data(6, 3) {
            assert!(datum.is_canonical(), "{datum}");
            assert!(datum.is_valid(), "{datum}");
        }
    }

    #[test]
    fn parse_text_forms() {
        let x = d("4: 3,1 | 2,2 | 2,2");
        assert_eq!(x, BranchDatum::from_parts(4, &[&[3, 1], &[2, 2], &[2, 2]]));
        assert_eq!(d("4: 1,3 | 2,2 | 2,2"), x);
        assert_eq!(d("  4 :3 ,1|2,2|  2 , 2 "), x);
        assert_eq!(x.to_string(), "4: 3,1 | 2,2 | 2,2");
    }

    #[test]
    fn parse_json_form() {
        let x = d(r#"{"degree": 4, "rows": [[1,3],[2,2],[2,2]]}"#);
        assert_eq!(x, d("4: 3,1 | 2,2 | 2,2"));
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"degree":4,"rows":[[3,1],[2,2],[2,2]]}"#);
        let back: BranchDatum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_datum("4: 3,x") {
            Err(ParseError::Unexpected { pos, token, .. }) => {
                assert_eq!(pos, 5);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_datum("4: 3,"), Err(ParseError::Eof { .. })));
        assert!(matches!(
            parse_datum("4 3"),
            Err(ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_datum("4: 3,0"),
            Err(ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_datum("0: 1"),
            Err(ParseError::Unexpected { .. })
        ));
    }
}
