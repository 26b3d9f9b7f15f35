//! Universal and existential quantification over presented spaces.
//!
//! `forall` enumerates finite families `S` of finite sets of generators. A
//! family whose join of meets covers the space becomes one group of the
//! dovetail, running `test_box(mp, p_F)` for every `F ∈ S`; the quantifier
//! halts as soon as every test of some group has halted. `exists` does the
//! same with single positive meets.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::presentation::{Presentation, SpaceError};
use crate::runtime::{
    evaluate_fuel_bound, test_box, Computation, Dovetail, GeneralizedPoint, GroupSource,
    MachineProcess, OpaqueMachine, Outcome, Progress, Pulled, SemiDecider,
};
use crate::spaces::SpaceKind;
use crate::syntax::{normalize, FormalMachine, FormalMeet, GeneratorId, Word};

/// Default fuel budget for command-line runs.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Largest supported generator index (families are bitmasks over 64 bits).
pub const GENERATOR_INDEX_LIMIT: u64 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("max generator index {0} exceeds the supported limit of {GENERATOR_INDEX_LIMIT}")]
    GeneratorCap(u64),
    #[error("enumeration of {count} candidate families exceeds the cap of {cap}")]
    Overflow { count: u128, cap: u128 },
    #[error("generator {0} lies outside the enumeration caps")]
    OutsideCaps(GeneratorId),
}

/// Bounds on the enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Generators with a larger enumeration index are never used.
    pub max_generator_index: u64,
    /// Families with more members are never tried.
    pub max_family_size: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_generator_index: 15,
            max_family_size: 8,
        }
    }
}

/// Which families the quantifiers try.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Every finite family (resp. meet), in order of weight.
    #[default]
    Exhaustive,
    /// The space's cofinal basic covers (resp. dense basic positives).
    Basic,
}

/// A family as bitmasks: bit `i` of a member means generator `i` is in it.
pub type IndexFamily = Vec<u64>;

/// Weight of a finite set of generators: one plus the sum of `index + 1`.
pub fn set_weight(mask: u64) -> u64 {
    1 + (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .sum::<u64>()
}

/// The finite sets of generators with indices up to `max_index`, by weight
/// and then by mask, produced one weight level at a time.
#[derive(Clone)]
struct WeightedSets {
    max_index: u64,
    sets: Vec<(u64, u64)>,
    level: u64,
    max_weight: u64,
}

impl WeightedSets {
    fn new(max_index: u64) -> Self {
        let max_weight = 1 + (max_index + 1) * (max_index + 2) / 2;
        WeightedSets {
            max_index,
            sets: Vec::new(),
            level: 0,
            max_weight,
        }
    }

    /// Appends the sets of weight `level + 1`.
    fn grow(&mut self) {
        self.level += 1;
        let mut masks = Vec::new();
        fn collect(next: u64, max: u64, left: u64, mask: u64, out: &mut Vec<u64>) {
            if left == 0 {
                out.push(mask);
                return;
            }
            for i in next..=max {
                if i + 1 > left {
                    break;
                }
                collect(i + 1, max, left - (i + 1), mask | 1 << i, out);
            }
        }
        collect(0, self.max_index, self.level - 1, 0, &mut masks);
        masks.sort_unstable();
        self.sets.extend(masks.into_iter().map(|m| (self.level, m)));
    }
}

/// Every finite family of finite sets of generators.
///
/// Families come in order of total weight (the sum of their members'
/// [`set_weight`]), then lexicographically on their members listed by
/// `(weight, mask)`. Each weight level is finite, so the order is a
/// surjective enumeration. With generators `0..=3` the first families are
/// `{}`, `{∅}`, `{{0}}`, `{∅, {0}}`, `{{1}}`.
#[derive(Clone)]
pub struct SubsetEnumeration {
    sets: WeightedSets,
    max_size: usize,
    weight: u64,
    stack: Vec<usize>,
    sum: u64,
    fresh: bool,
    done: bool,
}

impl SubsetEnumeration {
    pub fn new(caps: Caps) -> Self {
        SubsetEnumeration {
            sets: WeightedSets::new(caps.max_generator_index.min(GENERATOR_INDEX_LIMIT)),
            max_size: caps.max_family_size,
            weight: 0,
            stack: Vec::new(),
            sum: 0,
            fresh: true,
            done: false,
        }
    }

    /// Total weight of the level currently being enumerated.
    pub fn weight(&self) -> u64 {
        self.weight
    }

    fn emit(&self) -> IndexFamily {
        self.stack.iter().map(|&p| self.sets.sets[p].1).collect()
    }

    fn fits(&self, pos: usize) -> bool {
        pos < self.sets.sets.len() && self.sets.sets[pos].0 <= self.weight - self.sum
    }

    /// Next family of the current weight, by depth-first search over
    /// increasing position sequences.
    fn next_in_level(&mut self) -> Option<IndexFamily> {
        if self.fresh {
            self.fresh = false;
            if self.weight == 0 {
                return Some(Vec::new());
            }
        }
        loop {
            let child = self.stack.last().map_or(0, |p| p + 1);
            if self.stack.len() < self.max_size && self.fits(child) {
                self.stack.push(child);
                self.sum += self.sets.sets[child].0;
            } else {
                loop {
                    let p = self.stack.pop()?;
                    self.sum -= self.sets.sets[p].0;
                    if self.fits(p + 1) {
                        self.stack.push(p + 1);
                        self.sum += self.sets.sets[p + 1].0;
                        break;
                    }
                }
            }
            if self.sum == self.weight {
                return Some(self.emit());
            }
        }
    }

    /// Position of `family` in the enumeration and the largest family size up
    /// to it, if it is reached within the caps.
    pub fn locate(caps: Caps, family: &[u64]) -> Option<(u64, usize)> {
        let mut target: IndexFamily = family.to_vec();
        target.sort_unstable_by_key(|&f| (set_weight(f), f));
        target.dedup();
        let weight: u64 = target.iter().map(|&f| set_weight(f)).sum();
        let mut e = SubsetEnumeration::new(caps);
        let (mut index, mut widest) = (0u64, 0usize);
        while let Some(s) = e.next() {
            if e.weight > weight {
                return None;
            }
            widest = widest.max(s.len());
            if s == target {
                return Some((index, widest));
            }
            index += 1;
        }
        None
    }

    pub fn index_of(caps: Caps, family: &[u64]) -> Option<u64> {
        Self::locate(caps, family).map(|(i, _)| i)
    }
}

impl Iterator for SubsetEnumeration {
    type Item = IndexFamily;

    fn next(&mut self) -> Option<IndexFamily> {
        while !self.done {
            if let Some(s) = self.next_in_level() {
                return Some(s);
            }
            self.weight += 1;
            if self.weight > self.sets.max_weight.saturating_mul(self.max_size as u64) {
                self.done = true;
                break;
            }
            while self.sets.level < self.weight.min(self.sets.max_weight) {
                self.sets.grow();
            }
            self.stack.clear();
            self.sum = 0;
            self.fresh = true;
        }
        None
    }
}

/// Every finite set of generators, by [`set_weight`] and then by mask.
#[derive(Clone)]
pub struct MeetEnumeration {
    sets: WeightedSets,
    next: usize,
}

impl MeetEnumeration {
    pub fn new(caps: Caps) -> Self {
        MeetEnumeration {
            sets: WeightedSets::new(caps.max_generator_index.min(GENERATOR_INDEX_LIMIT)),
            next: 0,
        }
    }

    pub fn index_of(caps: Caps, meet: u64) -> Option<u64> {
        let weight = set_weight(meet);
        MeetEnumeration::new(caps)
            .take_while(|&m| set_weight(m) <= weight)
            .position(|m| m == meet)
            .map(|i| i as u64)
    }
}

impl Iterator for MeetEnumeration {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next >= self.sets.sets.len() {
            if self.sets.level >= self.sets.max_weight {
                return None;
            }
            self.sets.grow();
        }
        self.next += 1;
        Some(self.sets.sets[self.next - 1].1)
    }
}

/// The truncation of the open of covers: families passing the cover guard.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverFamily {
    members: Vec<Vec<FormalMeet>>,
    closures: Vec<Vec<BTreeSet<GeneratorId>>>,
}

impl CoverFamily {
    pub fn members(&self) -> &[Vec<FormalMeet>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_family(&self, family: &[FormalMeet]) -> bool {
        let mut sorted = family.to_vec();
        sorted.sort();
        sorted.dedup();
        self.members.contains(&sorted)
    }

    /// `m ∈ ⋁_{S} ⋀_{F ∈ S} ⊠F`.
    pub fn accepts(&self, m: &FormalMachine) -> bool {
        self.closures
            .iter()
            .any(|s| s.iter().all(|f| crate::syntax::box_contains(m, f)))
    }
}

/// Outcome of a quantifier run together with what made it halt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<W> {
    pub outcome: Outcome,
    /// The family or meet whose tests all halted.
    pub witness: Option<W>,
    /// The enumeration ran out within the caps, so no later halt is possible.
    pub exhausted: bool,
}

/// The quantifiers for one presentation, schedule and set of caps.
#[derive(Clone)]
pub struct Quantifier {
    space: Arc<dyn Presentation>,
    gens: Arc<Vec<GeneratorId>>,
    caps: Caps,
    schedule: Schedule,
}

impl Quantifier {
    pub fn new(space: SpaceKind) -> Self {
        Self::with_presentation(Arc::new(space), Caps::default(), Schedule::Exhaustive)
            .expect("default caps are valid")
    }

    pub fn with_presentation(
        space: Arc<dyn Presentation>,
        caps: Caps,
        schedule: Schedule,
    ) -> Result<Self, QuantError> {
        if caps.max_generator_index > GENERATOR_INDEX_LIMIT {
            return Err(QuantError::GeneratorCap(caps.max_generator_index));
        }
        if schedule == Schedule::Basic
            && (space.basic_cover(0).is_none() || space.basic_positive(0).is_none())
        {
            return Err(SpaceError::Unsupported {
                space: space.tag(),
                operation: "the basic schedule",
            }
            .into());
        }
        let gens = (0..=caps.max_generator_index)
            .map(|i| space.generator(i))
            .collect();
        Ok(Quantifier {
            space,
            gens: Arc::new(gens),
            caps,
            schedule,
        })
    }

    pub fn with_caps(self, caps: Caps) -> Result<Self, QuantError> {
        Self::with_presentation(self.space, caps, self.schedule)
    }

    pub fn with_schedule(self, schedule: Schedule) -> Result<Self, QuantError> {
        Self::with_presentation(self.space, self.caps, schedule)
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn presentation(&self) -> &dyn Presentation {
        self.space.as_ref()
    }

    fn meet_of(&self, mask: u64) -> FormalMeet {
        FormalMeet::new(
            (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.gens[i].clone()),
        )
        .expect("one presentation")
    }

    fn point_for(&self, meet: &FormalMeet) -> GeneralizedPoint {
        GeneralizedPoint::finite(self.space.up_closure(meet.generators()))
    }

    fn mask_of(&self, meet: &FormalMeet) -> Result<u64, QuantError> {
        meet.iter().try_fold(0u64, |acc, g| {
            self.space.check_generator(g)?;
            match self.space.index_of(g) {
                Some(i) if i <= self.caps.max_generator_index => Ok(acc | 1 << i),
                _ => Err(QuantError::OutsideCaps(g.clone())),
            }
        })
    }

    fn forall_source(&self, mp: &MachineProcess) -> ForallSource {
        ForallSource {
            q: self.clone(),
            mp: mp.clone(),
            families: SubsetEnumeration::new(self.caps),
            basic_next: 0,
        }
    }

    fn exists_source(&self, mp: &MachineProcess) -> ExistsSource {
        ExistsSource {
            q: self.clone(),
            mp: mp.clone(),
            meets: MeetEnumeration::new(self.caps),
            basic_next: 0,
        }
    }

    /// Semi-decides whether `mp` halts on every point of the space.
    pub fn forall(&self, mp: &MachineProcess) -> SemiDecider {
        let q = self.clone();
        let mp = mp.clone();
        SemiDecider::new(move || Box::new(Dovetail::new(q.forall_source(&mp))))
    }

    /// Semi-decides whether `mp` halts on some point of the space.
    pub fn exists(&self, mp: &MachineProcess) -> SemiDecider {
        let q = self.clone();
        let mp = mp.clone();
        SemiDecider::new(move || Box::new(Dovetail::new(q.exists_source(&mp))))
    }

    pub fn run_forall(&self, mp: &MachineProcess, fuel: u64) -> Report<Vec<FormalMeet>> {
        run_report(Dovetail::new(self.forall_source(mp)), fuel)
    }

    pub fn run_exists(&self, mp: &MachineProcess, fuel: u64) -> Report<FormalMeet> {
        run_report(Dovetail::new(self.exists_source(mp)), fuel)
    }

    /// Fuel within which `forall(compile(m))` halts, if `m` covers.
    ///
    /// The family of `m`'s own branches is a witness at some index `T`. Its
    /// tests start in round `T` and each needs at most `E` units, one per
    /// round, so everything is decided by round `R = T + E + 1`. Round `r`
    /// costs one pull plus at most `M·(r+1)` child units, `M` the largest
    /// family size so far, giving `R + M·R(R+1)/2`.
    pub fn forall_fuel_bound(&self, m: &FormalMachine) -> Result<Option<u64>, QuantError> {
        let normal = normalize(m);
        if !self.space.covers(&normal)? {
            return Ok(None);
        }
        let family: IndexFamily = normal
            .branches()
            .iter()
            .map(|b| self.mask_of(b))
            .collect::<Result<_, _>>()?;
        let Some((t, widest)) = SubsetEnumeration::locate(self.caps, &family) else {
            return Ok(None);
        };
        Ok(Some(round_bound(
            t,
            evaluate_fuel_bound(&normal),
            widest.max(1) as u64,
        )))
    }

    /// Fuel within which `exists(compile(m))` halts, if some branch is positive.
    pub fn exists_fuel_bound(&self, m: &FormalMachine) -> Result<Option<u64>, QuantError> {
        let normal = normalize(m);
        let mut best: Option<u64> = None;
        for b in normal.branches() {
            if self.space.positive(b)? {
                let mask = self.mask_of(b)?;
                if let Some(t) = MeetEnumeration::index_of(self.caps, mask) {
                    best = Some(best.map_or(t, |x| x.min(t)));
                }
            }
        }
        Ok(best.map(|t| round_bound(t, evaluate_fuel_bound(&normal), 1)))
    }

    /// The families within `gen_bound` generators and `size_bound` members
    /// that cover the space. The empty set is not used as a member.
    pub fn cover_open(
        &self,
        gen_bound: u64,
        size_bound: usize,
        cap: u128,
    ) -> Result<CoverFamily, QuantError> {
        if gen_bound > GENERATOR_INDEX_LIMIT + 1 {
            return Err(QuantError::GeneratorCap(gen_bound));
        }
        let sets = (1u128 << gen_bound) - 1;
        let mut count = 1u128;
        let mut binom = 1u128;
        for k in 1..=(size_bound as u128).min(sets) {
            binom = binom.saturating_mul(sets - k + 1) / k;
            count = count.saturating_add(binom);
        }
        if count > cap {
            return Err(QuantError::Overflow { count, cap });
        }
        let gens: Vec<GeneratorId> = (0..gen_bound).map(|i| self.space.generator(i)).collect();
        let meet_of = |mask: u64| {
            FormalMeet::new(
                (0..gen_bound)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| gens[i as usize].clone()),
            )
            .expect("one presentation")
        };
        let mut members = Vec::new();
        for k in 1..=size_bound {
            for family in (1..1u64 << gen_bound).combinations(k) {
                let meets: Vec<FormalMeet> = family.into_iter().map(meet_of).collect();
                let m = FormalMachine::new(meets.iter().cloned()).expect("one presentation");
                if self.space.covers(&m)? {
                    let mut sorted = meets;
                    sorted.sort();
                    members.push(sorted);
                }
            }
        }
        members.sort();
        let closures = members
            .iter()
            .map(|s| {
                s.iter()
                    .map(|f| self.space.up_closure(f.generators()))
                    .collect()
            })
            .collect();
        Ok(CoverFamily { members, closures })
    }
}

fn round_bound(t: u64, e: u64, m: u64) -> u64 {
    let r = t + e + 1;
    r.saturating_add(m.saturating_mul(r.saturating_mul(r + 1) / 2))
}

fn run_report<S: GroupSource>(mut d: Dovetail<S>, fuel: u64) -> Report<S::Tag>
where
    S::Tag: Clone,
{
    let outcome = Outcome::after(d.advance(fuel), fuel);
    Report {
        witness: d.winner().cloned(),
        exhausted: d.source_exhausted(),
        outcome,
    }
}

struct ForallSource {
    q: Quantifier,
    mp: MachineProcess,
    families: SubsetEnumeration,
    basic_next: u64,
}

impl ForallSource {
    fn group(&self, family: Vec<FormalMeet>) -> Pulled<Vec<FormalMeet>> {
        let children = family
            .iter()
            .map(|f| test_box(&self.mp, &self.q.point_for(f)).start())
            .collect();
        Pulled::Group(family, children)
    }
}

impl GroupSource for ForallSource {
    type Tag = Vec<FormalMeet>;

    fn pull(&mut self) -> Pulled<Vec<FormalMeet>> {
        match self.q.schedule {
            Schedule::Exhaustive => {
                let Some(masks) = self.families.next() else {
                    return Pulled::Exhausted;
                };
                let family: Vec<FormalMeet> =
                    masks.into_iter().map(|f| self.q.meet_of(f)).collect();
                let m = FormalMachine::new(family.iter().cloned()).expect("one presentation");
                if self
                    .q
                    .space
                    .covers(&m)
                    .expect("generators come from the presentation")
                {
                    self.group(family)
                } else {
                    Pulled::Skip
                }
            }
            Schedule::Basic => {
                let n = self.basic_next;
                self.basic_next += 1;
                match self.q.space.basic_cover(n) {
                    Some(family) if family.len() <= self.q.caps.max_family_size => {
                        self.group(family)
                    }
                    _ => Pulled::Exhausted,
                }
            }
        }
    }
}

struct ExistsSource {
    q: Quantifier,
    mp: MachineProcess,
    meets: MeetEnumeration,
    basic_next: u64,
}

impl GroupSource for ExistsSource {
    type Tag = FormalMeet;

    fn pull(&mut self) -> Pulled<FormalMeet> {
        let meet = match self.q.schedule {
            Schedule::Exhaustive => {
                let Some(mask) = self.meets.next() else {
                    return Pulled::Exhausted;
                };
                let meet = self.q.meet_of(mask);
                if !self
                    .q
                    .space
                    .positive(&meet)
                    .expect("generators come from the presentation")
                {
                    return Pulled::Skip;
                }
                meet
            }
            Schedule::Basic => {
                let i = self.basic_next;
                self.basic_next += 1;
                match self.q.space.basic_positive(i) {
                    Some(meet) => meet,
                    None => return Pulled::Exhausted,
                }
            }
        };
        let child = test_box(&self.mp, &self.q.point_for(&meet)).start();
        Pulled::Group(meet, vec![child])
    }
}

/// `forall` with the default caps and the exhaustive schedule.
pub fn forall(space: SpaceKind, mp: &MachineProcess) -> SemiDecider {
    Quantifier::new(space).forall(mp)
}

/// `exists` with the default caps and the exhaustive schedule.
pub fn exists(space: SpaceKind, mp: &MachineProcess) -> SemiDecider {
    Quantifier::new(space).exists(mp)
}

/// [`Quantifier::cover_open`] with default caps and an enumeration cap of `2^24` families.
pub fn cover_open(
    space: SpaceKind,
    gen_bound: u64,
    size_bound: usize,
) -> Result<CoverFamily, QuantError> {
    Quantifier::new(space).cover_open(gen_bound, size_bound, 1 << 24)
}

/// A predicate on words of a fixed length.
pub type WordPredicate = Arc<dyn Fn(&Word) -> bool + Send + Sync>;

/// Runs a predicate on the first `depth` digits of a point of prefix Cantor
/// space: it reads digit `k` by racing the queries `ℓ_{w0}` and `ℓ_{w1}`.
/// Denotes `⋁ { ℓ_w : |w| = depth, accept(w) }`.
struct WordReader {
    depth: usize,
    accept: WordPredicate,
}

impl OpaqueMachine for WordReader {
    fn apply(&self, point: &GeneralizedPoint) -> SemiDecider {
        let (depth, accept, point) = (self.depth, Arc::clone(&self.accept), point.clone());
        SemiDecider::new(move || {
            Box::new(Reading {
                depth,
                accept: Arc::clone(&accept),
                point: point.clone(),
                word: Word::empty(),
                race: None,
                turn: false,
            })
        })
    }
}

struct Reading {
    depth: usize,
    accept: WordPredicate,
    point: GeneralizedPoint,
    word: Word,
    race: Option<[Option<Box<dyn Computation>>; 2]>,
    turn: bool,
}

impl Computation for Reading {
    fn advance(&mut self, budget: u64) -> Progress {
        let mut used = 0;
        while used < budget {
            used += 1;
            if self.word.len() == self.depth {
                return if (self.accept)(&self.word) {
                    Progress::Halted { used }
                } else {
                    Progress::Diverged
                };
            }
            let word = &self.word;
            let point = &self.point;
            let race = self.race.get_or_insert_with(|| {
                [false, true]
                    .map(|b| Some(point.query(&GeneratorId::Prefix(word.child(b))).start()))
            });
            if race[0].is_none() && race[1].is_none() {
                return Progress::Diverged;
            }
            let mut side = usize::from(self.turn);
            if race[side].is_none() {
                side = 1 - side;
            }
            self.turn = !self.turn;
            match race[side].as_mut().expect("live side").advance(1) {
                Progress::Halted { .. } => {
                    self.word = self.word.child(side == 1);
                    self.race = None;
                }
                Progress::Running => {}
                Progress::Diverged => race[side] = None,
                Progress::Aborted { fault, .. } => return Progress::Aborted { used, fault },
            }
        }
        Progress::Running
    }
}

/// Result of [`cantor_search_with_fuel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    Found(Word),
    NoWitness,
    /// Neither side halted within the fuel.
    Undecided,
}

/// Report of a search run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub result: SearchResult,
    pub fuel_used: u64,
}

/// Searches `2^depth` words through the quantifiers on prefix Cantor space.
///
/// `exists` over the machine accepting `pred` and `forall` over the machine
/// accepting its negation run side by side, alternating in slices of fuel;
/// exactly one of them halts. Both use the basic schedule, and `forall` only
/// tries the uniform covers up to `depth`, which is complete because the
/// predicate reads no further.
pub fn cantor_search_with_fuel(pred: WordPredicate, depth: usize, fuel: u64) -> SearchReport {
    const SLICE: u64 = 4096;
    let yes = MachineProcess::opaque(WordReader {
        depth,
        accept: Arc::clone(&pred),
    });
    let no = MachineProcess::opaque(WordReader {
        depth,
        accept: Arc::new(move |w: &Word| !pred(w)),
    });
    let caps = Caps {
        max_generator_index: 0,
        max_family_size: 1usize << depth.min(40),
    };
    let q = Quantifier::with_presentation(Arc::new(SpaceKind::CantorPrefix), caps, Schedule::Basic)
        .expect("prefix space has basic families");
    let mut some = Dovetail::new(q.exists_source(&yes));
    let mut all = Dovetail::new(q.forall_source(&no));
    let (mut all_done, mut used) = (false, 0u64);
    while used < fuel {
        let slice = SLICE.min(fuel - used);
        match some.advance(slice) {
            Progress::Halted { used: u } => {
                let w = match some.winner().and_then(|m| m.iter().next().cloned()) {
                    Some(GeneratorId::Prefix(w)) => w.prefix(depth),
                    _ => unreachable!("basic positives are single prefixes"),
                };
                return SearchReport {
                    result: SearchResult::Found(w),
                    fuel_used: used + u,
                };
            }
            Progress::Aborted { .. } => unreachable!("finite points do not fault"),
            _ => used += slice,
        }
        if !all_done && used < fuel {
            let slice = SLICE.min(fuel - used);
            match all.advance(slice) {
                Progress::Halted { used: u } => {
                    return SearchReport {
                        result: SearchResult::NoWitness,
                        fuel_used: used + u,
                    };
                }
                Progress::Diverged => all_done = true,
                _ => used += slice,
            }
        }
    }
    SearchReport {
        result: SearchResult::Undecided,
        fuel_used: fuel,
    }
}

/// Some word of length `depth` satisfying `pred`, or `None` if there is none.
pub fn cantor_search(
    pred: impl Fn(&Word) -> bool + Send + Sync + 'static,
    depth: usize,
) -> Option<Word> {
    match cantor_search_with_fuel(Arc::new(pred), depth, u64::MAX).result {
        SearchResult::Found(w) => Some(w),
        SearchResult::NoWitness => None,
        SearchResult::Undecided => unreachable!("one side halts on every predicate"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::compile;
    use crate::syntax::GeneratorId as G;

    fn m(b: Vec<Vec<G>>) -> FormalMachine {
        FormalMachine::from_branches(b).unwrap()
    }

    #[test]
    fn enumeration_order() {
        let caps = Caps {
            max_generator_index: 3,
            max_family_size: 8,
        };
        let all: Vec<IndexFamily> = SubsetEnumeration::new(caps).collect();
        // all families of at most 8 of the 16 subsets
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        assert_eq!(all.len() as u64, (0..=8).map(|k| binom(16, k)).sum::<u64>());
        assert_eq!(&all[..5], &[vec![], vec![0], vec![1], vec![0, 1], vec![2]]);
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        for (i, s) in all.iter().enumerate().step_by(37) {
            assert_eq!(SubsetEnumeration::index_of(caps, s), Some(i as u64));
        }
        let meets: Vec<u64> = MeetEnumeration::new(caps).collect();
        assert_eq!(meets.len(), 16);
        assert_eq!(&meets[..6], &[0, 1, 2, 3, 4, 5]);
        assert_eq!(meets.iter().collect::<BTreeSet<_>>().len(), 16);
    }

    #[test]
    fn forall_examples() {
        let d = SpaceKind::CantorDigits;
        assert!(forall(d, &compile(&m(vec![vec![G::z(0)], vec![G::u(0)]])))
            .run(10_000)
            .is_halted());
        assert!(!forall(d, &compile(&m(vec![vec![G::z(0)]])))
            .run(100_000)
            .is_halted());
        let i = SpaceKind::UnitInterval;
        let cover = m(vec![
            vec![G::interval((0, 1), (2, 3))],
            vec![G::interval((1, 3), (1, 1))],
        ]);
        let bound = Quantifier::new(i)
            .forall_fuel_bound(&cover)
            .unwrap()
            .unwrap();
        assert!(forall(i, &compile(&cover)).run(bound).is_halted());
    }

    #[test]
    fn exists_examples() {
        let d = SpaceKind::CantorDigits;
        assert!(!exists(d, &compile(&m(vec![vec![G::z(0), G::u(0)]])))
            .run(100_000)
            .is_halted());
        let z5 = m(vec![vec![G::z(5)]]);
        let bound = Quantifier::new(d).exists_fuel_bound(&z5).unwrap().unwrap();
        assert!(exists(d, &compile(&z5)).run(bound).is_halted());
        let i = SpaceKind::UnitInterval;
        let empty = m(vec![vec![
            G::interval((0, 1), (1, 4)),
            G::interval((3, 4), (1, 1)),
        ]]);
        assert!(!exists(i, &compile(&empty)).run(100_000).is_halted());
    }

    #[test]
    fn cover_open_examples() {
        let d = cover_open(SpaceKind::CantorDigits, 2, 2).unwrap();
        assert!(d.contains_family(&[
            FormalMeet::singleton(G::z(0)),
            FormalMeet::singleton(G::u(0))
        ]));
        for s in SpaceKind::ALL {
            assert!(cover_open(s, 0, 3).unwrap().is_empty());
        }
        let p = cover_open(SpaceKind::CantorPrefix, 3, 2).unwrap();
        assert!(p.contains_family(&[
            FormalMeet::singleton(G::prefix("0")),
            FormalMeet::singleton(G::prefix("1"))
        ]));
        assert!(matches!(
            Quantifier::new(SpaceKind::CantorDigits).cover_open(6, 6, 1000),
            Err(QuantError::Overflow { .. })
        ));
    }

    #[test]
    fn search_examples() {
        let w = cantor_search(|w: &Word| w.bits()[0] != w.bits()[1], 2).unwrap();
        assert!(w.to_string() == "01" || w.to_string() == "10");
        assert_eq!(cantor_search(|_: &Word| false, 3), None);
        assert_eq!(cantor_search(|_: &Word| true, 1).map(|w| w.len()), Some(1));
        assert_eq!(cantor_search(|_: &Word| true, 0), Some(Word::empty()));
    }

    #[test]
    fn basic_schedule_unsupported_for_interval() {
        let q = Quantifier::new(SpaceKind::UnitInterval).with_schedule(Schedule::Basic);
        assert!(matches!(
            q,
            Err(QuantError::Space(SpaceError::Unsupported { .. }))
        ));
    }
}
