//! The built-in spaces: Cantor space by digits, Cantor space by prefixes,
//! and the unit interval by rational intervals.
//!
//! Interval generators follow the subspace convention: `(0, b)` contains 0
//! and `(a, 1)` contains 1, so `(a, b)` denotes `(a, b) ∩ [0, 1]` read in the
//! subspace topology. Without it no finite join could cover the endpoints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::presentation::{Presentation, SpaceError};
use crate::runtime::{Computation, Fault, GeneralizedPoint, Progress, SemiDecider};
use crate::syntax::{
    FormalMachine, FormalMeet, GeneratorId, Polarity, RationalInterval, Relation, SpaceTag, Word,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpaceKind {
    CantorDigits,
    CantorPrefix,
    UnitInterval,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 3] = [
        SpaceKind::CantorDigits,
        SpaceKind::CantorPrefix,
        SpaceKind::UnitInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::CantorDigits => "cantor-digits",
            SpaceKind::CantorPrefix => "cantor-prefix",
            SpaceKind::UnitInterval => "interval",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceKind {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, SpaceError> {
        SpaceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SpaceError::UnknownSpace(s.to_string()))
    }
}

pub fn covers(space: SpaceKind, m: &FormalMachine) -> Result<bool, SpaceError> {
    space.covers(m)
}

pub fn positive(space: SpaceKind, b: &FormalMeet) -> Result<bool, SpaceError> {
    space.positive(b)
}

/// `p_F` for a finite explicit `F`.
pub fn generalized_point(f: BTreeSet<GeneratorId>) -> GeneralizedPoint {
    GeneralizedPoint::finite(f)
}

impl Presentation for SpaceKind {
    fn tag(&self) -> SpaceTag {
        match self {
            SpaceKind::CantorDigits => SpaceTag::CANTOR_DIGITS,
            SpaceKind::CantorPrefix => SpaceTag::CANTOR_PREFIX,
            SpaceKind::UnitInterval => SpaceTag::INTERVAL,
        }
    }

    fn generator(&self, index: u64) -> GeneratorId {
        match self {
            SpaceKind::CantorDigits => GeneratorId::Digit {
                index: index / 2,
                polarity: Polarity::from_bit(index % 2 == 1),
            },
            SpaceKind::CantorPrefix => GeneratorId::Prefix(Word::unrank(index)),
            SpaceKind::UnitInterval => GeneratorId::Interval(interval_generator(index)),
        }
    }

    fn index_of(&self, g: &GeneratorId) -> Option<u64> {
        match (self, g) {
            (SpaceKind::CantorDigits, GeneratorId::Digit { index, polarity }) => {
                index.checked_mul(2)?.checked_add(u64::from(polarity.bit()))
            }
            (SpaceKind::CantorPrefix, GeneratorId::Prefix(w)) if w.len() < 64 => Some(w.rank()),
            (SpaceKind::UnitInterval, GeneratorId::Interval(iv)) => interval_index(iv),
            _ => None,
        }
    }

    fn precedes(&self, a: &GeneratorId, b: &GeneratorId) -> bool {
        match (self, a, b) {
            // ℓ_q ≤ ℓ_p when p is a prefix of q
            (SpaceKind::CantorPrefix, GeneratorId::Prefix(q), GeneratorId::Prefix(p)) => {
                p.is_prefix_of(q)
            }
            _ => a == b,
        }
    }

    fn up_closure(&self, f: &BTreeSet<GeneratorId>) -> BTreeSet<GeneratorId> {
        match self {
            SpaceKind::CantorPrefix => f
                .iter()
                .flat_map(|g| match g {
                    GeneratorId::Prefix(w) => (0..=w.len())
                        .map(|k| GeneratorId::Prefix(w.prefix(k)))
                        .collect(),
                    other => vec![other.clone()],
                })
                .collect(),
            _ => f.clone(),
        }
    }

    fn relations(&self, gens: &[GeneratorId]) -> Vec<Relation> {
        let has = |g: &GeneratorId| gens.contains(g);
        let one = |g: &GeneratorId| FormalMachine::generator(g.clone());
        let both = |a: &GeneratorId, b: &GeneratorId| {
            FormalMachine::from_branches(vec![vec![a.clone(), b.clone()]]).expect("one space")
        };
        let either = |a: &GeneratorId, b: &GeneratorId| {
            FormalMachine::from_branches(vec![vec![a.clone()], vec![b.clone()]]).expect("one space")
        };
        let mut out = Vec::new();
        match self {
            SpaceKind::CantorDigits => {
                for g in gens {
                    if let GeneratorId::Digit {
                        index,
                        polarity: Polarity::Zero,
                    } = g
                    {
                        let u = GeneratorId::u(*index);
                        if has(&u) {
                            out.push(Relation::eq(both(g, &u), FormalMachine::bottom()));
                            out.push(Relation::eq(either(g, &u), FormalMachine::top()));
                        }
                    }
                }
            }
            SpaceKind::CantorPrefix => {
                let words: Vec<&Word> = gens
                    .iter()
                    .filter_map(|g| {
                        if let GeneratorId::Prefix(w) = g {
                            Some(w)
                        } else {
                            None
                        }
                    })
                    .collect();
                for (i, p) in words.iter().enumerate() {
                    let gp = GeneratorId::Prefix((*p).clone());
                    if p.is_empty() {
                        out.push(Relation::eq(one(&gp), FormalMachine::top()));
                    }
                    let (g0, g1) = (
                        GeneratorId::Prefix(p.child(false)),
                        GeneratorId::Prefix(p.child(true)),
                    );
                    if has(&g0) && has(&g1) {
                        out.push(Relation::eq(either(&g0, &g1), one(&gp)));
                    }
                    for q in &words[i + 1..] {
                        let gq = GeneratorId::Prefix((*q).clone());
                        if p.is_prefix_of(q) {
                            out.push(Relation::eq(both(&gp, &gq), one(&gq)));
                        } else if q.is_prefix_of(p) {
                            out.push(Relation::eq(both(&gp, &gq), one(&gp)));
                        } else {
                            out.push(Relation::eq(both(&gp, &gq), FormalMachine::bottom()));
                        }
                    }
                }
            }
            SpaceKind::UnitInterval => {
                let ivs: Vec<&RationalInterval> = gens
                    .iter()
                    .filter_map(|g| {
                        if let GeneratorId::Interval(iv) = g {
                            Some(iv)
                        } else {
                            None
                        }
                    })
                    .collect();
                let whole =
                    RationalInterval::new(BigRational::zero(), BigRational::one()).expect("unit");
                if ivs.contains(&&whole) {
                    out.push(Relation::eq(
                        one(&GeneratorId::Interval(whole)),
                        FormalMachine::top(),
                    ));
                }
                for (i, a) in ivs.iter().enumerate() {
                    for b in &ivs[i + 1..] {
                        let (ga, gb) = (
                            GeneratorId::Interval((*a).clone()),
                            GeneratorId::Interval((*b).clone()),
                        );
                        let lo = a.lo().max(b.lo()).clone();
                        let hi = a.hi().min(b.hi()).clone();
                        match RationalInterval::new(lo, hi) {
                            Err(_) => {
                                out.push(Relation::eq(both(&ga, &gb), FormalMachine::bottom()))
                            }
                            Ok(cap) if ivs.contains(&&cap) => out.push(Relation::eq(
                                both(&ga, &gb),
                                one(&GeneratorId::Interval(cap)),
                            )),
                            Ok(_) => {}
                        }
                        // overlapping intervals join to their hull
                        if a.lo().max(b.lo()) < a.hi().min(b.hi()) {
                            let hull = RationalInterval::new(
                                a.lo().min(b.lo()).clone(),
                                a.hi().max(b.hi()).clone(),
                            )
                            .expect("hull of valid intervals");
                            if ivs.contains(&&hull) {
                                out.push(Relation::eq(
                                    either(&ga, &gb),
                                    one(&GeneratorId::Interval(hull)),
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn covers(&self, m: &FormalMachine) -> Result<bool, SpaceError> {
        self.check_machine(m)?;
        Ok(match self {
            SpaceKind::CantorDigits => digits_cover(m),
            SpaceKind::CantorPrefix => prefix_cover(m),
            SpaceKind::UnitInterval => interval_cover(m),
        })
    }

    fn positive(&self, b: &FormalMeet) -> Result<bool, SpaceError> {
        b.iter().try_for_each(|g| self.check_generator(g))?;
        Ok(match self {
            SpaceKind::CantorDigits => digit_constraints(b).is_some(),
            SpaceKind::CantorPrefix => longest_prefix(b).is_some(),
            SpaceKind::UnitInterval => interval_meet(b).is_some(),
        })
    }

    fn basic_cover(&self, n: u64) -> Option<Vec<FormalMeet>> {
        let n = usize::try_from(n).ok().filter(|&n| n < 32)?;
        match self {
            SpaceKind::CantorDigits => {
                Some(Word::all_of_length(n).map(|w| digit_meet(&w)).collect())
            }
            SpaceKind::CantorPrefix => Some(
                Word::all_of_length(n)
                    .map(|w| FormalMeet::singleton(GeneratorId::Prefix(w)))
                    .collect(),
            ),
            SpaceKind::UnitInterval => None,
        }
    }

    fn basic_positive(&self, i: u64) -> Option<FormalMeet> {
        match self {
            SpaceKind::CantorDigits => Some(digit_meet(&Word::unrank(i))),
            SpaceKind::CantorPrefix => {
                Some(FormalMeet::singleton(GeneratorId::Prefix(Word::unrank(i))))
            }
            SpaceKind::UnitInterval => None,
        }
    }
}

/// The meet fixing the first `|w|` digits to `w`.
fn digit_meet(w: &Word) -> FormalMeet {
    FormalMeet::new(
        w.bits()
            .iter()
            .enumerate()
            .map(|(i, &b)| GeneratorId::Digit {
                index: i as u64,
                polarity: Polarity::from_bit(b),
            }),
    )
    .expect("digit generators")
}

/// The digit assignment a meet imposes, or `None` if it asks for both values somewhere.
fn digit_constraints(b: &FormalMeet) -> Option<BTreeMap<u64, bool>> {
    let mut out = BTreeMap::new();
    for g in b.iter() {
        if let GeneratorId::Digit { index, polarity } = g {
            if *out.entry(*index).or_insert(polarity.bit()) != polarity.bit() {
                return None;
            }
        }
    }
    Some(out)
}

/// A cover fails exactly when some point falsifies every branch. Picking one
/// literal per branch is a clause of the conjunctive normal form; the search
/// looks for a clause without a complementary pair.
fn digits_cover(m: &FormalMachine) -> bool {
    let branches: Vec<Vec<(u64, bool)>> = m
        .branches()
        .iter()
        .map(|b| {
            b.iter()
                .filter_map(|g| match g {
                    GeneratorId::Digit { index, polarity } => Some((*index, polarity.bit())),
                    _ => None,
                })
                .collect()
        })
        .collect();
    fn escape(branches: &[Vec<(u64, bool)>], assigned: &mut BTreeMap<u64, bool>) -> bool {
        let Some((first, rest)) = branches.split_first() else {
            return true;
        };
        if first.iter().any(|(i, v)| assigned.get(i) == Some(&!v)) {
            return escape(rest, assigned);
        }
        for &(i, v) in first {
            if assigned.contains_key(&i) {
                continue;
            }
            assigned.insert(i, !v);
            let found = escape(rest, assigned);
            assigned.remove(&i);
            if found {
                return true;
            }
        }
        false
    }
    !escape(&branches, &mut BTreeMap::new())
}

/// The longest word of a meet of prefix generators, or `None` if two are incomparable.
fn longest_prefix(b: &FormalMeet) -> Option<Word> {
    let mut longest = Word::empty();
    for g in b.iter() {
        if let GeneratorId::Prefix(w) = g {
            if !w.comparable(&longest) {
                return None;
            }
            if w.len() > longest.len() {
                longest = w.clone();
            }
        }
    }
    Some(longest)
}

/// Padding every word to the common length `N` covers all `2^N` words exactly
/// when the cylinders, after removing those inside a shorter one, have total
/// measure one. The count is done with exact integers instead of listing words.
fn prefix_cover(m: &FormalMachine) -> bool {
    let words: BTreeSet<Word> = m.branches().iter().filter_map(longest_prefix).collect();
    let minimal: Vec<&Word> = words
        .iter()
        .filter(|w| !words.iter().any(|v| v != *w && v.is_prefix_of(w)))
        .collect();
    let Some(n) = minimal.iter().map(|w| w.len()).max() else {
        return false;
    };
    let total: BigUint = minimal
        .iter()
        .map(|w| BigUint::one() << (n - w.len()))
        .sum();
    total == BigUint::one() << n
}

/// An interval under the subspace convention: `lo == 0` includes 0, `hi == 1` includes 1.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Span {
    lo: BigRational,
    hi: BigRational,
}

impl Span {
    fn contains(&self, x: &BigRational) -> bool {
        (self.lo < *x || (self.lo.is_zero() && x.is_zero()))
            && (*x < self.hi || (self.hi.is_one() && x.is_one()))
    }
}

/// Intersection of a meet of intervals; the empty meet is all of `[0, 1]`.
fn interval_meet(b: &FormalMeet) -> Option<Span> {
    let mut span = Span {
        lo: BigRational::zero(),
        hi: BigRational::one(),
    };
    for g in b.iter() {
        if let GeneratorId::Interval(iv) = g {
            if *iv.lo() > span.lo {
                span.lo = iv.lo().clone();
            }
            if *iv.hi() < span.hi {
                span.hi = iv.hi().clone();
            }
        }
    }
    (span.lo < span.hi).then_some(span)
}

/// Endpoint chaining: start from spans containing 0, then keep extending the
/// reach `r` with spans that contain `r`.
fn interval_cover(m: &FormalMachine) -> bool {
    let spans: Vec<Span> = m.branches().iter().filter_map(interval_meet).collect();
    let mut reach: Option<BigRational> = None;
    for s in spans.iter().filter(|s| s.lo.is_zero()) {
        if reach.as_ref().is_none_or(|r| s.hi > *r) {
            reach = Some(s.hi.clone());
        }
    }
    let Some(mut reach) = reach else {
        return false;
    };
    loop {
        if reach.is_one() {
            return true;
        }
        let next = spans
            .iter()
            .filter(|s| s.lo < reach && s.hi > reach)
            .map(|s| &s.hi)
            .max()
            .cloned();
        match next {
            Some(r) => reach = r,
            None => return false,
        }
    }
}

fn farey_points(q: u64) -> Vec<BigRational> {
    let mut pts: Vec<BigRational> = (1..=q)
        .flat_map(|d| (0..=d).filter(move |n| n.gcd(&d) == 1).map(move |n| (n, d)))
        .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Intervals whose larger endpoint denominator is exactly `q`, sorted by `(lo, hi)`.
fn interval_level(q: u64) -> Vec<RationalInterval> {
    let pts = farey_points(q);
    let q = BigInt::from(q);
    let mut out = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if *a.denom() == q || *b.denom() == q {
                out.push(
                    RationalInterval::new(a.clone(), b.clone()).expect("ordered Farey points"),
                );
            }
        }
    }
    out
}

/// Number of points with denominator at most `q`, and the offset of level `q`.
fn level_offset(q: u64) -> u64 {
    let below: u64 = 1 + (1..q).map(euler_phi).sum::<u64>();
    pairs(below)
}

/// Enumerates intervals by the largest denominator of their endpoints:
/// `(0,1), (0,1/2), (1/2,1), (0,1/3), ...`.
pub fn interval_generator(index: u64) -> RationalInterval {
    let mut points = 1u64;
    let mut q = 1u64;
    loop {
        let offset = pairs(points);
        points += euler_phi(q);
        if index < pairs(points) {
            let level = interval_level(q);
            return level[(index - offset) as usize].clone();
        }
        q += 1;
    }
}

pub fn interval_index(iv: &RationalInterval) -> Option<u64> {
    let q = iv.lo().denom().max(iv.hi().denom());
    let q = u64::try_from(q).ok()?;
    let level = interval_level(q);
    let pos = level.iter().position(|x| x == iv)? as u64;
    Some(level_offset(q) + pos)
}

/// An infinite binary sequence with a limit on how far it may be read.
#[derive(Clone)]
pub struct StreamPoint {
    digits: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    budget: u64,
}

impl StreamPoint {
    /// `budget` is the number of leading digits that may be read.
    pub fn new(digits: impl Fn(u64) -> bool + Send + Sync + 'static, budget: u64) -> Self {
        StreamPoint {
            digits: Arc::new(digits),
            budget,
        }
    }

    /// `prefix` followed by `tail` forever.
    pub fn eventually_constant(prefix: &Word, tail: bool, budget: u64) -> Self {
        let bits = prefix.bits().to_vec();
        StreamPoint::new(
            move |i| bits.get(i as usize).copied().unwrap_or(tail),
            budget,
        )
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn digit(&self, index: u64) -> Result<bool, Fault> {
        if index < self.budget {
            Ok((self.digits)(index))
        } else {
            Err(Fault::StreamBudget {
                index,
                budget: self.budget,
            })
        }
    }
}

impl fmt::Debug for StreamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: String = (0..self.budget.min(8))
            .map(|i| if (self.digits)(i) { '1' } else { '0' })
            .collect();
        write!(f, "StreamPoint({shown}.., budget {})", self.budget)
    }
}

#[derive(Clone, Debug)]
pub enum ConcretePoint {
    Stream(StreamPoint),
    Rational(BigRational),
}

impl ConcretePoint {
    pub fn rational(n: i64, d: i64) -> Self {
        ConcretePoint::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

/// Reads `word.len()` digits, one per unit of fuel, comparing against `word`.
struct PrefixCheck {
    point: StreamPoint,
    word: Word,
    read: usize,
}

impl Computation for PrefixCheck {
    fn advance(&mut self, budget: u64) -> Progress {
        let start = self.read;
        if self.word.is_empty() {
            return if budget == 0 {
                Progress::Running
            } else {
                Progress::Halted { used: 1 }
            };
        }
        loop {
            if self.read == self.word.len() {
                return Progress::Halted {
                    used: (self.read - start) as u64,
                };
            }
            if (self.read - start) as u64 == budget {
                return Progress::Running;
            }
            let i = self.read;
            self.read += 1;
            match self.point.digit(i as u64) {
                Err(fault) => {
                    return Progress::Aborted {
                        used: (self.read - start) as u64,
                        fault,
                    }
                }
                Ok(b) if b != self.word.bits()[i] => return Progress::Diverged,
                Ok(_) => {}
            }
        }
    }
}

/// A one-unit check decided up front.
fn decided(result: Result<bool, Fault>) -> SemiDecider {
    match result {
        Ok(true) => SemiDecider::halting(),
        Ok(false) => SemiDecider::never(),
        Err(fault) => SemiDecider::new(move || Box::new(Failing(Some(fault.clone())))),
    }
}

struct Failing(Option<Fault>);

impl Computation for Failing {
    fn advance(&mut self, budget: u64) -> Progress {
        match (budget, self.0.take()) {
            (0, f) => {
                self.0 = f;
                Progress::Running
            }
            (_, Some(fault)) => Progress::Aborted { used: 1, fault },
            (_, None) => Progress::Diverged,
        }
    }
}

/// `i_X(x)`: the generalized point halting on the generators that contain `x`.
///
/// Digit generators cost one stream read, prefix generators one read per
/// digit of the word, interval generators one exact comparison. Generators
/// of another space never halt.
pub fn point_embed(space: SpaceKind, x: &ConcretePoint) -> GeneralizedPoint {
    let x = x.clone();
    GeneralizedPoint::new(move |g| match (space, &x, g) {
        (
            SpaceKind::CantorDigits,
            ConcretePoint::Stream(s),
            GeneratorId::Digit { index, polarity },
        ) => decided(s.digit(*index).map(|b| b == polarity.bit())),
        (SpaceKind::CantorPrefix, ConcretePoint::Stream(s), GeneratorId::Prefix(w)) => {
            let (s, w) = (s.clone(), w.clone());
            SemiDecider::new(move || {
                Box::new(PrefixCheck {
                    point: s.clone(),
                    word: w.clone(),
                    read: 0,
                })
            })
        }
        (SpaceKind::UnitInterval, ConcretePoint::Rational(r), GeneratorId::Interval(iv)) => {
            decided(Ok(span_of(iv).contains(r)))
        }
        _ => SemiDecider::never(),
    })
}

fn span_of(iv: &RationalInterval) -> Span {
    Span {
        lo: iv.lo().clone(),
        hi: iv.hi().clone(),
    }
}

/// Denotational membership `x ∈ m`, reading the stream directly.
pub fn contains(space: SpaceKind, m: &FormalMachine, x: &ConcretePoint) -> Result<bool, Fault> {
    let in_gen = |g: &GeneratorId| -> Result<bool, Fault> {
        Ok(match (space, x, g) {
            (
                SpaceKind::CantorDigits,
                ConcretePoint::Stream(s),
                GeneratorId::Digit { index, polarity },
            ) => s.digit(*index)? == polarity.bit(),
            (SpaceKind::CantorPrefix, ConcretePoint::Stream(s), GeneratorId::Prefix(w)) => {
                for (i, &b) in w.bits().iter().enumerate() {
                    if s.digit(i as u64)? != b {
                        return Ok(false);
                    }
                }
                true
            }
            (SpaceKind::UnitInterval, ConcretePoint::Rational(r), GeneratorId::Interval(iv)) => {
                span_of(iv).contains(r)
            }
            _ => false,
        })
    };
    for b in m.branches() {
        let mut all = true;
        for g in b.iter() {
            if !in_gen(g)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Sample points that separate the generators in `gens`.
///
/// For the Cantor spaces these are the `2^depth` words of length `depth`
/// followed by zeros; for the interval, every endpoint and every midpoint
/// between consecutive endpoints.
pub fn dense_family(
    space: SpaceKind,
    gens: &BTreeSet<GeneratorId>,
    depth: usize,
) -> Vec<ConcretePoint> {
    match space {
        SpaceKind::CantorDigits | SpaceKind::CantorPrefix => Word::all_of_length(depth)
            .map(|w| {
                ConcretePoint::Stream(StreamPoint::eventually_constant(
                    &w,
                    false,
                    depth as u64 + 1,
                ))
            })
            .collect(),
        SpaceKind::UnitInterval => {
            let mut ends: BTreeSet<BigRational> = [BigRational::zero(), BigRational::one()].into();
            for g in gens {
                if let GeneratorId::Interval(iv) = g {
                    ends.insert(iv.lo().clone());
                    ends.insert(iv.hi().clone());
                }
            }
            let ends: Vec<BigRational> = ends.into_iter().collect();
            let two = BigRational::from_integer(BigInt::from(2));
            let mids = ends.windows(2).map(|w| (&w[0] + &w[1]) / &two);
            let mut pts: Vec<BigRational> = ends.iter().cloned().chain(mids).collect();
            pts.sort();
            pts.into_iter().map(ConcretePoint::Rational).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::GeneratorId as G;
    use proptest::prelude::*;

    fn m(b: Vec<Vec<G>>) -> FormalMachine {
        FormalMachine::from_branches(b).unwrap()
    }

    #[test]
    fn cover_examples() {
        let d = SpaceKind::CantorDigits;
        assert!(d.covers(&m(vec![vec![G::z(0)], vec![G::u(0)]])).unwrap());
        assert!(!d.covers(&m(vec![vec![G::z(0)], vec![G::u(1)]])).unwrap());
        assert!(d
            .covers(&m(vec![
                vec![G::z(0), G::z(1)],
                vec![G::z(0), G::u(1)],
                vec![G::u(0)]
            ]))
            .unwrap());
        let p = SpaceKind::CantorPrefix;
        assert!(p
            .covers(&m(vec![vec![G::prefix("0")], vec![G::prefix("1")]]))
            .unwrap());
        assert!(!p.covers(&m(vec![vec![G::prefix("0")]])).unwrap());
        assert!(p.covers(&m(vec![vec![G::prefix("")]])).unwrap());
        let i = SpaceKind::UnitInterval;
        assert!(i
            .covers(&m(vec![
                vec![G::interval((0, 1), (2, 3))],
                vec![G::interval((1, 3), (1, 1))]
            ]))
            .unwrap());
        assert!(!i
            .covers(&m(vec![
                vec![G::interval((0, 1), (1, 2))],
                vec![G::interval((1, 2), (1, 1))]
            ]))
            .unwrap());
        for s in SpaceKind::ALL {
            assert!(s.covers(&FormalMachine::top()).unwrap());
            assert!(!s.covers(&FormalMachine::bottom()).unwrap());
        }
    }

    #[test]
    fn positive_examples() {
        let meet = |g: Vec<G>| FormalMeet::new(g).unwrap();
        assert!(positive(SpaceKind::CantorDigits, &meet(vec![G::z(0), G::u(1)])).unwrap());
        assert!(!positive(SpaceKind::CantorDigits, &meet(vec![G::z(0), G::u(0)])).unwrap());
        assert!(!positive(
            SpaceKind::UnitInterval,
            &meet(vec![
                G::interval((0, 1), (1, 4)),
                G::interval((3, 4), (1, 1))
            ])
        )
        .unwrap());
        assert!(positive(
            SpaceKind::CantorPrefix,
            &meet(vec![G::prefix("0"), G::prefix("01")])
        )
        .unwrap());
        assert!(!positive(
            SpaceKind::CantorPrefix,
            &meet(vec![G::prefix("00"), G::prefix("01")])
        )
        .unwrap());
    }

    #[test]
    fn mismatch_is_an_error() {
        let err = SpaceKind::CantorDigits
            .covers(&FormalMachine::generator(G::prefix("0")))
            .unwrap_err();
        assert!(matches!(err, SpaceError::Mismatch { .. }));
        assert!("reals".parse::<SpaceKind>().is_err());
        assert_eq!(
            "interval".parse::<SpaceKind>().unwrap(),
            SpaceKind::UnitInterval
        );
    }

    #[test]
    fn interval_enumeration_prefix() {
        let got: Vec<String> = (0..7)
            .map(|i| G::Interval(interval_generator(i)).to_string())
            .collect();
        assert_eq!(
            got,
            [
                "i(0,1)",
                "i(0,1/2)",
                "i(1/2,1)",
                "i(0,1/3)",
                "i(0,2/3)",
                "i(1/3,1/2)",
                "i(1/3,2/3)"
            ]
        );
        for i in 0..300 {
            assert_eq!(interval_index(&interval_generator(i)), Some(i));
        }
    }

    #[test]
    fn enumerations_are_inverse() {
        for s in SpaceKind::ALL {
            for i in 0..200 {
                assert_eq!(s.index_of(&s.generator(i)), Some(i), "{s} {i}");
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let s = StreamPoint::eventually_constant(&"010".parse().unwrap(), false, 16);
        let x = ConcretePoint::Stream(s);
        let d = point_embed(SpaceKind::CantorDigits, &x);
        assert!(d.query(&G::z(0)).run(5).is_halted());
        assert!(d.query(&G::u(1)).run(5).is_halted());
        assert!(!d.query(&G::u(0)).run(1000).is_halted());
        let p = point_embed(SpaceKind::CantorPrefix, &x);
        assert_eq!(
            p.query(&G::prefix("01")).run(5),
            crate::runtime::Outcome::Halted { step: 2 }
        );
        assert!(!p.query(&G::prefix("1")).run(1000).is_halted());
        let half = point_embed(SpaceKind::UnitInterval, &ConcretePoint::rational(1, 2));
        assert!(half.query(&G::interval((1, 3), (2, 3))).run(1).is_halted());
        assert!(!half
            .query(&G::interval((0, 1), (1, 4)))
            .run(1000)
            .is_halted());
        let zero = point_embed(SpaceKind::UnitInterval, &ConcretePoint::rational(0, 1));
        assert!(zero.query(&G::interval((0, 1), (1, 4))).run(1).is_halted());
    }

    #[test]
    fn stream_budget_aborts() {
        let x = ConcretePoint::Stream(StreamPoint::new(|_| false, 2));
        let d = point_embed(SpaceKind::CantorDigits, &x);
        assert!(matches!(
            d.query(&G::z(5)).run(10),
            crate::runtime::Outcome::Aborted { .. }
        ));
        let p = point_embed(SpaceKind::CantorPrefix, &x);
        assert!(matches!(
            p.query(&G::prefix("000")).run(10),
            crate::runtime::Outcome::Aborted { step: 3, .. }
        ));
        assert!(contains(
            SpaceKind::CantorDigits,
            &FormalMachine::generator(G::z(3)),
            &x
        )
        .is_err());
    }

    #[test]
    fn prefix_relations_include_top() {
        let gens: Vec<G> = (0..3)
            .map(|i| SpaceKind::CantorPrefix.generator(i))
            .collect();
        let rels = SpaceKind::CantorPrefix.relations(&gens);
        assert!(rels.contains(&Relation::eq(
            FormalMachine::generator(G::prefix("")),
            FormalMachine::top()
        )));
        assert_eq!(rels.len(), 5);
    }

    fn digit_machine() -> impl Strategy<Value = FormalMachine> {
        let g = (0u64..3, any::<bool>()).prop_map(|(i, b)| if b { G::u(i) } else { G::z(i) });
        prop::collection::vec(prop::collection::vec(g, 0..3), 0..5).prop_map(m)
    }

    proptest! {
        #[test]
        fn covers_is_monotone(a in digit_machine(), b in digit_machine()) {
            let s = SpaceKind::CantorDigits;
            if s.covers(&a).unwrap() {
                prop_assert!(s.covers(&crate::syntax::join(&a, &b).unwrap()).unwrap());
            }
        }
    }
}
