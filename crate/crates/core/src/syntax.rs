//! Formal machines: joins of finite meets of generators.
//!
//! A [`FormalMachine`] is the finite syntactic object `⋁_i ⋀_{g ∈ J_i} g`.
//! Branches and generators have set semantics, so duplicate generators and
//! duplicate branches disappear on construction. [`normalize`] additionally
//! applies absorption (`g ∨ (g ∧ h) = g`).

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Identifier of the presentation a generator belongs to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceTag(Cow<'static, str>);

impl SpaceTag {
    pub const CANTOR_DIGITS: SpaceTag = SpaceTag(Cow::Borrowed("cantor-digits"));
    pub const CANTOR_PREFIX: SpaceTag = SpaceTag(Cow::Borrowed("cantor-prefix"));
    pub const INTERVAL: SpaceTag = SpaceTag(Cow::Borrowed("interval"));

    pub fn new(name: impl Into<String>) -> Self {
        SpaceTag(Cow::Owned(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("incompatible presentations: `{0}` and `{1}`")]
    Incompatible(SpaceTag, SpaceTag),
    #[error("invalid interval ({lo}, {hi}): endpoints must satisfy 0 <= lo < hi <= 1")]
    InvalidInterval { lo: BigRational, hi: BigRational },
}

/// Which digit value a digit generator asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Zero,
    One,
}

impl Polarity {
    pub fn bit(self) -> bool {
        self == Polarity::One
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Polarity::One
        } else {
            Polarity::Zero
        }
    }

    pub fn flip(self) -> Self {
        Self::from_bit(!self.bit())
    }
}

/// A finite binary word, ordered length-lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn new(bits: Vec<bool>) -> Self {
        Word(bits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ≼ other`: `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut bits = self.0.clone();
        bits.push(bit);
        Word(bits)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// Position of the word in the length-lexicographic enumeration `ε, 0, 1, 00, ...`.
    pub fn rank(&self) -> u64 {
        let mut rank = 1u64;
        for &b in &self.0 {
            rank = rank * 2 + u64::from(b);
        }
        rank - 1
    }

    pub fn unrank(index: u64) -> Word {
        let n = index + 1;
        let width = 63 - n.leading_zeros();
        Word((0..width).rev().map(|i| (n >> i) & 1 == 1).collect())
    }

    /// All words of exactly `len` bits, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        (0u64..1 << len)
            .map(move |code| Word((0..len).rev().map(|i| (code >> i) & 1 == 1).collect()))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("`{other}` is not a binary digit")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// An open rational interval `(lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, SyntaxError> {
        if lo < BigRational::zero() || hi > BigRational::one() || lo >= hi {
            return Err(SyntaxError::InvalidInterval { lo, hi });
        }
        Ok(RationalInterval { lo, hi })
    }

    /// Convenience constructor from small fractions `lo_n/lo_d`, `hi_n/hi_d`.
    pub fn from_fractions(lo: (i64, i64), hi: (i64, i64)) -> Result<Self, SyntaxError> {
        Self::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// A generator of a presented frame.
///
/// The derived order is the canonical serialization order: digit generators
/// by `(index, polarity)`, prefix generators length-lexicographically and
/// interval generators by `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorId {
    /// `z_n` (digit `n` is 0) or `u_n` (digit `n` is 1).
    Digit { index: u64, polarity: Polarity },
    /// `ℓ_p`: sequences with prefix `p`.
    Prefix(Word),
    /// A rational interval of `[0, 1]`.
    Interval(RationalInterval),
    /// A generator of a user-supplied presentation.
    Opaque { space: SpaceTag, index: u64 },
}

impl GeneratorId {
    pub fn z(index: u64) -> Self {
        GeneratorId::Digit {
            index,
            polarity: Polarity::Zero,
        }
    }

    pub fn u(index: u64) -> Self {
        GeneratorId::Digit {
            index,
            polarity: Polarity::One,
        }
    }

    pub fn prefix(word: &str) -> Self {
        GeneratorId::Prefix(word.parse().expect("binary word"))
    }

    pub fn interval(lo: (i64, i64), hi: (i64, i64)) -> Self {
        GeneratorId::Interval(RationalInterval::from_fractions(lo, hi).expect("valid interval"))
    }

    pub fn space_tag(&self) -> SpaceTag {
        match self {
            GeneratorId::Digit { .. } => SpaceTag::CANTOR_DIGITS,
            GeneratorId::Prefix(_) => SpaceTag::CANTOR_PREFIX,
            GeneratorId::Interval(_) => SpaceTag::INTERVAL,
            GeneratorId::Opaque { space, .. } => space.clone(),
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::Digit {
                index,
                polarity: Polarity::Zero,
            } => write!(f, "z{index}"),
            GeneratorId::Digit {
                index,
                polarity: Polarity::One,
            } => write!(f, "u{index}"),
            GeneratorId::Prefix(w) => write!(f, "l\"{w}\""),
            GeneratorId::Interval(iv) => {
                f.write_str("i(")?;
                fmt_rational(iv.lo(), f)?;
                f.write_str(",")?;
                fmt_rational(iv.hi(), f)?;
                f.write_str(")")
            }
            GeneratorId::Opaque { index, .. } => write!(f, "g{index}"),
        }
    }
}

fn merge_tag(acc: &mut Option<SpaceTag>, tag: SpaceTag) -> Result<(), SyntaxError> {
    match acc {
        None => {
            *acc = Some(tag);
            Ok(())
        }
        Some(existing) if *existing == tag => Ok(()),
        Some(existing) => Err(SyntaxError::Incompatible(existing.clone(), tag)),
    }
}

/// A finite formal meet `⋀ J`. The empty meet is `⊤`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalMeet(BTreeSet<GeneratorId>);

impl FormalMeet {
    pub fn top() -> Self {
        FormalMeet(BTreeSet::new())
    }

    pub fn new(generators: impl IntoIterator<Item = GeneratorId>) -> Result<Self, SyntaxError> {
        let set: BTreeSet<_> = generators.into_iter().collect();
        let mut tag = None;
        for g in &set {
            merge_tag(&mut tag, g.space_tag())?;
        }
        Ok(FormalMeet(set))
    }

    pub fn singleton(g: GeneratorId) -> Self {
        FormalMeet(BTreeSet::from([g]))
    }

    pub fn generators(&self) -> &BTreeSet<GeneratorId> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &GeneratorId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, g: &GeneratorId) -> bool {
        self.0.contains(g)
    }

    pub fn is_subset(&self, other: &FormalMeet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn space_tag(&self) -> Option<SpaceTag> {
        self.0.iter().next().map(GeneratorId::space_tag)
    }

    fn union(&self, other: &FormalMeet) -> FormalMeet {
        FormalMeet(self.0.union(&other.0).cloned().collect())
    }
}

impl fmt::Display for FormalMeet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("T");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A finite formal join of finite formal meets. The empty join is `⊥`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalMachine(BTreeSet<FormalMeet>);

impl FormalMachine {
    pub fn bottom() -> Self {
        FormalMachine(BTreeSet::new())
    }

    pub fn top() -> Self {
        FormalMachine(BTreeSet::from([FormalMeet::top()]))
    }

    pub fn generator(g: GeneratorId) -> Self {
        FormalMachine(BTreeSet::from([FormalMeet::singleton(g)]))
    }

    /// Builds a machine from branches without normalizing.
    pub fn new(branches: impl IntoIterator<Item = FormalMeet>) -> Result<Self, SyntaxError> {
        let set: BTreeSet<_> = branches.into_iter().collect();
        let mut tag = None;
        for b in &set {
            if let Some(t) = b.space_tag() {
                merge_tag(&mut tag, t)?;
            }
        }
        Ok(FormalMachine(set))
    }

    /// Shorthand for tests and examples: each inner vector is one branch.
    pub fn from_branches(branches: Vec<Vec<GeneratorId>>) -> Result<Self, SyntaxError> {
        let meets = branches
            .into_iter()
            .map(FormalMeet::new)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(meets)
    }

    pub fn branches(&self) -> &BTreeSet<FormalMeet> {
        &self.0
    }

    pub fn is_bottom(&self) -> bool {
        self.0.is_empty()
    }

    pub fn space_tag(&self) -> Option<SpaceTag> {
        self.0.iter().find_map(FormalMeet::space_tag)
    }

    /// Largest branch size.
    pub fn width(&self) -> usize {
        self.0.iter().map(FormalMeet::len).max().unwrap_or(0)
    }

    pub fn generators(&self) -> BTreeSet<GeneratorId> {
        self.0.iter().flat_map(|b| b.iter().cloned()).collect()
    }
}

impl fmt::Display for FormalMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("F");
        }
        let multi = self.0.len() > 1;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            if multi && b.len() > 1 {
                write!(f, "({b})")?;
            } else {
                write!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

/// A relation `lhs = rhs` or `lhs <= rhs` of a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: FormalMachine,
    pub rhs: FormalMachine,
    pub kind: RelationKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    Equality,
    Inequality,
}

impl Relation {
    pub fn eq(lhs: FormalMachine, rhs: FormalMachine) -> Self {
        Relation {
            lhs,
            rhs,
            kind: RelationKind::Equality,
        }
    }

    pub fn leq(lhs: FormalMachine, rhs: FormalMachine) -> Self {
        Relation {
            lhs,
            rhs,
            kind: RelationKind::Inequality,
        }
    }
}

/// Absorption normal form: drops every branch that strictly contains another.
pub fn normalize(m: &FormalMachine) -> FormalMachine {
    let branches: Vec<&FormalMeet> = m.0.iter().collect();
    let kept = branches
        .iter()
        .filter(|b| !branches.iter().any(|a| a.len() < b.len() && a.is_subset(b)))
        .map(|b| (*b).clone())
        .collect();
    FormalMachine(kept)
}

fn check_compatible(a: &FormalMachine, b: &FormalMachine) -> Result<(), SyntaxError> {
    match (a.space_tag(), b.space_tag()) {
        (Some(x), Some(y)) if x != y => Err(SyntaxError::Incompatible(x, y)),
        _ => Ok(()),
    }
}

/// Distributes `a ∧ b` into a join of meets and normalizes.
pub fn meet(a: &FormalMachine, b: &FormalMachine) -> Result<FormalMachine, SyntaxError> {
    check_compatible(a, b)?;
    let branches =
        a.0.iter()
            .flat_map(|x| b.0.iter().map(move |y| x.union(y)))
            .collect();
    Ok(normalize(&FormalMachine(branches)))
}

pub fn join(a: &FormalMachine, b: &FormalMachine) -> Result<FormalMachine, SyntaxError> {
    check_compatible(a, b)?;
    let branches = a.0.union(&b.0).cloned().collect();
    Ok(normalize(&FormalMachine(branches)))
}

/// Syntactic `m ∈ ⊠F`: some branch of `m` lies entirely inside `F`.
pub fn box_contains(m: &FormalMachine, f: &BTreeSet<GeneratorId>) -> bool {
    m.0.iter().any(|b| b.0.is_subset(f))
}
