//! Brute-force realizability oracle.
//!
//! A datum `(d, Π)` with `n` rows is realized by a branched cover of the sphere
//! iff there are permutations `σ₁, …, σₙ ∈ S_d` with `cycle_type(σᵢ) = Πᵢ`,
//! `σ₁·σ₂···σₙ = 1` and `⟨σ₁, …, σₙ⟩` transitive. [`find_witness`] searches for
//! such a tuple exhaustively.
//!
//! Products compose left to right: `(σ·τ)(x) = τ(σ(x))`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::branch_data::{BranchDatum, Partition};

/// A bijection on `{0, …, d−1}`, printed 1-based in cycle notation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("not a bijection on 1..{0}")]
    NotBijective(usize),
    #[error("degree {0} exceeds the supported maximum of 255")]
    TooLarge(usize),
    #[error("cycle notation `{text}`: {message}")]
    Notation { text: String, message: String },
    #[error("cycle type sums to {sum}, expected {degree}")]
    TypeMismatch { sum: u64, degree: usize },
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        assert!(d <= 255, "degree above 255");
        Permutation {
            images: (0..d as u8).collect(),
        }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermutationError> {
        let d = images.len();
        if d > 255 {
            return Err(PermutationError::TooLarge(d));
        }
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(PermutationError::NotBijective(d));
            }
        }
        Ok(Permutation {
            images: images.into_iter().map(|i| i as u8).collect(),
        })
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)` on `d` symbols.
    /// Fixed points may be omitted; `()` is the identity.
    pub fn from_cycles(d: usize, text: &str) -> Result<Self, PermutationError> {
        let err = |message: &str| PermutationError::Notation {
            text: text.to_string(),
            message: message.to_string(),
        };
        if d > 255 {
            return Err(PermutationError::TooLarge(d));
        }
        let mut images: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let inner_end = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')'))
                .ok_or_else(|| err("expected a parenthesized cycle"))?;
            let inner = &rest[1..=inner_end];
            rest = rest[inner_end + 2..].trim_start();
            let cycle: Vec<usize> = inner
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| match s.parse::<usize>() {
                    Ok(v) if (1..=d).contains(&v) => Ok(v - 1),
                    _ => Err(err(&format!("`{s}` is not a symbol in 1..{d}"))),
                })
                .collect::<Result<_, _>>()?;
            for (k, &x) in cycle.iter().enumerate() {
                if std::mem::replace(&mut touched[x], true) {
                    return Err(err(&format!("symbol {} appears twice", x + 1)));
                }
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of `x` (0-based).
    pub fn apply(&self, x: usize) -> usize {
        usize::from(self.images[x])
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| usize::from(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| usize::from(x) == i)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[usize::from(x)])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[usize::from(x)] = i as u8;
        }
        Permutation { images: inv }
    }

    /// Cycles in order of their smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            f.write_str("(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Multiset of cycle lengths including fixed points.
pub fn cycle_type(p: &Permutation) -> Partition {
    let lens = p.cycles().iter().map(|c| c.len() as u32).collect();
    Partition::new(lens).expect("a permutation on at least one symbol")
}

fn check_type(t: &Partition, d: usize) -> Result<(), PermutationError> {
    if t.sum() != d as u64 {
        return Err(PermutationError::TypeMismatch {
            sum: t.sum(),
            degree: d,
        });
    }
    if d > 255 {
        return Err(PermutationError::TooLarge(d));
    }
    Ok(())
}

/// Cycles on consecutive blocks `1..t₁`, `t₁+1..t₁+t₂`, …
pub fn canonical_of_type(t: &Partition, d: usize) -> Result<Permutation, PermutationError> {
    check_type(t, d)?;
    let mut images = Vec::with_capacity(d);
    let mut start = 0;
    for &len in t.parts() {
        let len = len as usize;
        for k in 0..len {
            images.push(start + (k + 1) % len);
        }
        start += len;
    }
    Permutation::from_images(images)
}

/// `d! / (∏ parts · ∏ multiplicity!)`, or `None` if `d!` overflows `u128`.
pub fn class_size(t: &Partition) -> Option<u128> {
    let d = t.sum() as u128;
    let mut size = (1..=d).try_fold(1u128, |acc, k| acc.checked_mul(k))?;
    let parts = t.parts();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        let mult = (j - i) as u128;
        size /= (parts[i] as u128).pow(mult as u32);
        size /= (1..=mult).product::<u128>();
        i = j;
    }
    Some(size)
}

/// Every permutation of a fixed cycle type, each exactly once.
///
/// A permutation is encoded by the sequence of its cycle lengths (ordered by
/// smallest element) and a word listing each cycle from its smallest element.
/// Length sequences run over the distinct rearrangements of the type; for each,
/// words are produced in lexicographic order.
pub struct ConjugacyClassIter {
    lengths: Vec<usize>,
    is_start: Vec<bool>,
    word: Vec<usize>,
    used: Vec<bool>,
    fresh: bool,
    done: bool,
}

/// Iterator over the conjugacy class of cycle type `t` in `S_d`.
pub fn conjugacy_class_iter(
    t: &Partition,
    d: usize,
) -> Result<ConjugacyClassIter, PermutationError> {
    check_type(t, d)?;
    let mut lengths: Vec<usize> = t.parts().iter().map(|&p| p as usize).collect();
    lengths.sort_unstable();
    let mut it = ConjugacyClassIter {
        lengths,
        is_start: vec![false; d],
        word: Vec::new(),
        used: vec![false; d],
        fresh: true,
        done: false,
    };
    it.reset_word();
    Ok(it)
}

fn next_multiset_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl ConjugacyClassIter {
    fn reset_word(&mut self) {
        let d = self.used.len();
        self.is_start.iter_mut().for_each(|s| *s = false);
        let mut pos = 0;
        for &len in &self.lengths {
            self.is_start[pos] = true;
            pos += len;
        }
        self.word = (0..d).collect();
        self.used.iter_mut().for_each(|u| *u = true);
    }

    fn fill_from(&mut self, from: usize) {
        let mut next_free = 0;
        for p in from..self.word.len() {
            while self.used[next_free] {
                next_free += 1;
            }
            self.word[p] = next_free;
            self.used[next_free] = true;
        }
    }

    fn advance_word(&mut self) -> bool {
        let d = self.word.len();
        for p in (0..d).rev() {
            let current = self.word[p];
            self.used[current] = false;
            if self.is_start[p] {
                continue;
            }
            if let Some(e) = (current + 1..d).find(|&e| !self.used[e]) {
                self.word[p] = e;
                self.used[e] = true;
                self.fill_from(p + 1);
                return true;
            }
        }
        false
    }

    fn current(&self) -> Permutation {
        let mut images = vec![0u8; self.word.len()];
        let mut pos = 0;
        for &len in &self.lengths {
            let block = &self.word[pos..pos + len];
            for k in 0..len {
                images[block[k]] = block[(k + 1) % len] as u8;
            }
            pos += len;
        }
        Permutation { images }
    }
}

impl Iterator for ConjugacyClassIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.current());
        }
        if !self.advance_word() {
            if !next_multiset_permutation(&mut self.lengths) {
                self.done = true;
                return None;
            }
            self.reset_word();
        }
        Some(self.current())
    }
}

/// Whether the group generated by `perms` acts transitively on `d` symbols.
pub fn is_transitive(perms: &[Permutation], d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let mut seen = vec![false; d];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(x) = stack.pop() {
        for p in perms {
            let y = p.apply(x);
            if !seen[y] {
                seen[y] = true;
                reached += 1;
                stack.push(y);
            }
        }
    }
    reached == d
}

/// Permutations realizing a datum, one per row in row order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyWitness {
    pub degree: usize,
    pub perms: Vec<Permutation>,
}

impl MonodromyWitness {
    /// Cycle notation strings, one per permutation.
    pub fn to_notation(&self) -> Vec<String> {
        self.perms.iter().map(Permutation::to_string).collect()
    }

    pub fn from_notation(degree: usize, cycles: &[String]) -> Result<Self, PermutationError> {
        let perms = cycles
            .iter()
            .map(|c| Permutation::from_cycles(degree, c))
            .collect::<Result<_, _>>()?;
        Ok(MonodromyWitness { degree, perms })
    }
}

impl Serialize for MonodromyWitness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_notation().serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Realizable(MonodromyWitness),
    /// The whole search space was exhausted.
    Unrealizable,
    /// The node budget ran out first.
    Unknown {
        nodes: u64,
    },
}

impl OracleResult {
    pub fn label(&self) -> &'static str {
        match self {
            OracleResult::Realizable(_) => "realizable",
            OracleResult::Unrealizable => "unrealizable",
            OracleResult::Unknown { .. } => "unknown",
        }
    }
}

fn product(perms: &[Permutation], d: usize) -> Permutation {
    perms
        .iter()
        .fold(Permutation::identity(d), |acc, p| acc.then(p))
}

/// Independent check of the three witness conditions.
pub fn verify_witness(datum: &BranchDatum, perms: &[Permutation]) -> bool {
    let d = datum.degree() as usize;
    perms.len() == datum.branch_points()
        && perms.iter().all(|p| p.degree() == d)
        && perms
            .iter()
            .zip(datum.rows())
            .all(|(p, row)| &cycle_type(p) == row)
        && product(perms, d).is_identity()
        && is_transitive(perms, d)
}

struct Search<'a> {
    d: usize,
    rows: &'a [Partition],
    derived: usize,
    free: Vec<usize>,
    slots: Vec<Option<Permutation>>,
    nodes: u64,
    budget: Option<u64>,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> Result<Step, PermutationError> {
        if depth == self.free.len() {
            return Ok(self.close());
        }
        let row = self.free[depth];
        for p in conjugacy_class_iter(&self.rows[row], self.d)? {
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Ok(Step::OutOfBudget);
            }
            self.slots[row] = Some(p);
            match self.run(depth + 1)? {
                Step::Exhausted => {}
                other => return Ok(other),
            }
        }
        self.slots[row] = None;
        Ok(Step::Exhausted)
    }

    /// Derives the remaining permutation from the cyclic product and checks it.
    fn close(&mut self) -> Step {
        let n = self.rows.len();
        let mut prod = Permutation::identity(self.d);
        for k in 1..n {
            let idx = (self.derived + k) % n;
            prod = prod.then(self.slots[idx].as_ref().expect("assigned"));
        }
        let last = prod.inverse();
        if cycle_type(&last) != self.rows[self.derived] {
            return Step::Exhausted;
        }
        self.slots[self.derived] = Some(last);
        let perms: Vec<Permutation> = self.slots.iter().flatten().cloned().collect();
        if is_transitive(&perms, self.d) {
            Step::Found
        } else {
            self.slots[self.derived] = None;
            Step::Exhausted
        }
    }
}

/// Exhaustive search for a monodromy witness.
///
/// The row with the largest conjugacy class is derived from the others via
/// the product relation, the next largest is pinned to its block
/// representative (everything is up to simultaneous conjugation), and the
/// remaining rows are enumerated. `budget` caps the number of enumerated
/// candidates; `None` searches to completion.
pub fn find_witness(datum: &BranchDatum, budget: Option<u64>) -> OracleResult {
    let d = datum.degree() as usize;
    let rows = datum.rows();
    if rows.iter().any(|r| r.sum() != d as u64) || d > 255 {
        return OracleResult::Unrealizable;
    }
    let n = rows.len();
    if n == 1 {
        let p = canonical_of_type(&rows[0], d).expect("row sums to d");
        return if p.is_identity() && is_transitive(std::slice::from_ref(&p), d) {
            OracleResult::Realizable(MonodromyWitness {
                degree: d,
                perms: vec![p],
            })
        } else {
            OracleResult::Unrealizable
        };
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| class_size(&rows[i]).unwrap_or(u128::MAX));
    let derived = order[n - 1];
    let pinned = order[n - 2];
    let free: Vec<usize> = order[..n - 2].to_vec();

    let mut slots = vec![None; n];
    slots[pinned] = Some(canonical_of_type(&rows[pinned], d).expect("row sums to d"));
    let mut search = Search {
        d,
        rows,
        derived,
        free,
        slots,
        nodes: 0,
        budget,
    };
    match search.run(0).expect("rows checked above") {
        Step::Found => OracleResult::Realizable(MonodromyWitness {
            degree: d,
            perms: search
                .slots
                .into_iter()
                .map(|p| p.expect("filled"))
                .collect(),
        }),
        Step::Exhausted => OracleResult::Unrealizable,
        Step::OutOfBudget => OracleResult::Unknown {
            nodes: search.nodes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch_data::{parse_datum, partitions};
    use std::collections::HashSet;

    fn perm(d: usize, s: &str) -> Permutation {
        Permutation::from_cycles(d, s).unwrap()
    }

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(cycle_type(&Permutation::identity(4)), part(&[1, 1, 1, 1]));
        assert_eq!(cycle_type(&perm(4, "(1 2)(3 4)")), part(&[2, 2]));
        assert_eq!(cycle_type(&perm(4, "(1 2 3)")), part(&[3, 1]));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            canonical_of_type(&part(&[2, 2]), 4).unwrap(),
            perm(4, "(1 2)(3 4)")
        );
        assert_eq!(
            canonical_of_type(&part(&[3, 1]), 4).unwrap(),
            perm(4, "(1 2 3)")
        );
        assert_eq!(
            canonical_of_type(&part(&[5]), 5).unwrap().to_string(),
            "(1 2 3 4 5)"
        );
        assert!(canonical_of_type(&part(&[3]), 4).is_err());
    }

    #[test]
    fn notation_round_trip() {
        let p = perm(5, "(3 1)(2 5 4)");
        assert_eq!(p.to_string(), "(1 3)(2 5 4)");
        assert_eq!(perm(5, &p.to_string()), p);
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::from_cycles(3, "(1 4)").is_err());
        assert!(Permutation::from_cycles(3, "(1 2)(2 3)").is_err());
        assert!(Permutation::from_cycles(3, "1 2").is_err());
    }

    #[test]
    fn class_examples() {
        assert_eq!(conjugacy_class_iter(&part(&[2, 2]), 4).unwrap().count(), 3);
        assert_eq!(conjugacy_class_iter(&part(&[3, 1]), 4).unwrap().count(), 8);
        let ids: Vec<_> = conjugacy_class_iter(&part(&[1, 1, 1]), 3)
            .unwrap()
            .collect();
        assert_eq!(ids, vec![Permutation::identity(3)]);
    }

    #[test]
    fn classes_are_distinct_and_typed() {
        for d in 1..=6 {
            let mut all = HashSet::new();
            for t in partitions(d) {
                for p in conjugacy_class_iter(&t, d as usize).unwrap() {
                    assert_eq!(cycle_type(&p), t);
                    assert!(all.insert(p));
                }
            }
            let factorial: usize = (1..=d as usize).product();
            assert_eq!(all.len(), factorial);
        }
    }

    #[test]
    fn transitivity_examples() {
        assert!(is_transitive(&[perm(2, "(1 2)")], 2));
        assert!(!is_transitive(&[perm(4, "(1 2)(3 4)")], 4));
        assert!(is_transitive(
            &[perm(4, "(1 2)(3 4)"), perm(4, "(1 3)(2 4)")],
            4
        ));
    }

    #[test]
    fn oracle_examples() {
        let fig = parse_datum("2: 2 | 2").unwrap();
        match find_witness(&fig, None) {
            OracleResult::Realizable(w) => {
                assert_eq!(w.to_notation(), vec!["(1 2)", "(1 2)"]);
                assert!(verify_witness(&fig, &w.perms));
            }
            other => panic!("{other:?}"),
        }

        let klein = parse_datum("4: 2,2 | 2,2 | 2,2").unwrap();
        match find_witness(&klein, None) {
            OracleResult::Realizable(w) => assert!(verify_witness(&klein, &w.perms)),
            other => panic!("{other:?}"),
        }
        let hand = [
            perm(4, "(1 2)(3 4)"),
            perm(4, "(1 3)(2 4)"),
            perm(4, "(1 4)(2 3)"),
        ];
        assert!(verify_witness(&klein, &hand));

        let bad = parse_datum("4: 3,1 | 2,2 | 2,2").unwrap();
        assert_eq!(find_witness(&bad, None), OracleResult::Unrealizable);
    }

    #[test]
    fn budget_trips_to_unknown() {
        let datum = parse_datum("6: 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1 | 2,1,1,1,1").unwrap();
        assert!(datum.is_valid());
        assert!(matches!(
            find_witness(&datum, Some(3)),
            OracleResult::Unknown { .. }
        ));
    }

    #[test]
    fn verify_rejects_bad_tuples() {
        let fig = parse_datum("2: 2 | 2").unwrap();
        assert!(verify_witness(&fig, &[perm(2, "(1 2)"), perm(2, "(1 2)")]));
        assert!(!verify_witness(&fig, &[perm(2, "(1 2)"), perm(2, "()")]));
        assert!(!verify_witness(&fig, &[perm(2, "(1 2)")]));

        let two_copies = parse_datum("4: 2,2 | 2,2").unwrap();
        let p = perm(4, "(1 2)(3 4)");
        assert!(!is_transitive(&[p.clone(), p.clone()], 4));
        assert!(!verify_witness(&two_copies, &[p.clone(), p]));
    }

    #[test]
    fn riemann_hurwitz_on_witnesses() {
        for d in 2..=5 {
            for datum in crate::branch_data::enumerate_data(d, 3) {
                if let OracleResult::Realizable(w) = find_witness(&datum, None) {
                    let total: usize = w.perms.iter().map(|p| d as usize - p.cycle_count()).sum();
                    assert_eq!(total, 2 * d as usize - 2);
                }
            }
        }
    }
}
