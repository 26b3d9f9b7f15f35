//! Fuel-indexed semi-deciders and the dovetailing runtime for machines.
//!
//! A [`SemiDecider`] is a recipe for a [`Computation`]: a deterministic
//! process that consumes fuel one unit at a time and may eventually halt.
//! `run(fuel)` replays the computation from scratch, so the answer at a
//! given fuel never depends on earlier calls and is monotone in fuel.
//!
//! Cost model: one fuel unit is one advancement of one basic query, plus one
//! unit for every slot pulled from an enumeration. A computation that knows
//! it can never halt reports [`Progress::Diverged`]; schedulers keep charging
//! it one unit per round but no longer step it.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{normalize, FormalMachine, FormalMeet, GeneratorId};

/// Raised by a basic query that cannot answer within its resources.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("stream query at index {index} exceeds the evaluation budget of {budget} digits")]
    StreamBudget { index: u64, budget: u64 },
}

/// Result of a bounded run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Halted after consuming exactly `step` units.
    Halted { step: u64 },
    /// No halt within `fuel` units. Not a negative answer.
    Suspended { fuel: u64 },
    /// A basic query faulted after `step` units.
    Aborted { step: u64, fault: Fault },
}

impl Outcome {
    pub fn is_halted(&self) -> bool {
        matches!(self, Outcome::Halted { .. })
    }

    /// The outcome of a single `advance(fuel)` from a fresh start.
    pub(crate) fn after(progress: Progress, fuel: u64) -> Outcome {
        match progress {
            Progress::Halted { used } => Outcome::Halted { step: used },
            Progress::Running | Progress::Diverged => Outcome::Suspended { fuel },
            Progress::Aborted { used, fault } => Outcome::Aborted { step: used, fault },
        }
    }

    pub fn fuel_used(&self) -> u64 {
        match self {
            Outcome::Halted { step } | Outcome::Aborted { step, .. } => *step,
            Outcome::Suspended { fuel } => *fuel,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Halted { step } => write!(f, "HALTED({step})"),
            Outcome::Suspended { fuel } => write!(f, "SUSPENDED({fuel})"),
            Outcome::Aborted { step, fault } => write!(f, "ABORTED({step}): {fault}"),
        }
    }
}

/// What a single `advance` call achieved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Progress {
    /// Halted after `used` units of this call's budget.
    Halted {
        used: u64,
    },
    /// The whole budget was consumed without halting.
    Running,
    /// Will never halt. Sticky: later calls report `Diverged` again.
    Diverged,
    Aborted {
        used: u64,
        fault: Fault,
    },
}

/// A resumable process that consumes fuel.
pub trait Computation: Send {
    fn advance(&mut self, budget: u64) -> Progress;
}

/// A map into Sierpiński space, observed through fuel-bounded runs.
#[derive(Clone)]
pub struct SemiDecider(Arc<dyn Fn() -> Box<dyn Computation> + Send + Sync>);

impl SemiDecider {
    pub fn new(start: impl Fn() -> Box<dyn Computation> + Send + Sync + 'static) -> Self {
        SemiDecider(Arc::new(start))
    }

    /// Halts on its first unit of fuel.
    pub fn halting() -> Self {
        Self::after(1)
    }

    /// Halts after exactly `steps` units (`steps >= 1`).
    pub fn after(steps: u64) -> Self {
        assert!(steps >= 1, "a halt costs at least one unit");
        SemiDecider::new(move || Box::new(Countdown { remaining: steps }))
    }

    /// Never halts; recognized as divergent after one unit.
    pub fn never() -> Self {
        SemiDecider::new(|| Box::new(Never))
    }

    pub fn start(&self) -> Box<dyn Computation> {
        (self.0)()
    }

    pub fn run(&self, fuel: u64) -> Outcome {
        Outcome::after(self.start().advance(fuel), fuel)
    }
}

impl fmt::Debug for SemiDecider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SemiDecider(..)")
    }
}

struct Countdown {
    remaining: u64,
}

impl Computation for Countdown {
    fn advance(&mut self, budget: u64) -> Progress {
        if budget >= self.remaining {
            let used = self.remaining;
            self.remaining = 0;
            Progress::Halted { used }
        } else {
            self.remaining -= budget;
            Progress::Running
        }
    }
}

struct Never;

impl Computation for Never {
    fn advance(&mut self, budget: u64) -> Progress {
        if budget == 0 {
            Progress::Running
        } else {
            Progress::Diverged
        }
    }
}

/// A point of `Σ^G`: a semi-decider for every generator.
#[derive(Clone)]
pub struct GeneralizedPoint(Arc<dyn Fn(&GeneratorId) -> SemiDecider + Send + Sync>);

impl GeneralizedPoint {
    pub fn new(query: impl Fn(&GeneratorId) -> SemiDecider + Send + Sync + 'static) -> Self {
        GeneralizedPoint(Arc::new(query))
    }

    /// `p_F` for a finite explicit `F`: halts in one step on members, never otherwise.
    pub fn finite(members: BTreeSet<GeneratorId>) -> Self {
        GeneralizedPoint::new(move |g| {
            if members.contains(g) {
                SemiDecider::halting()
            } else {
                SemiDecider::never()
            }
        })
    }

    pub fn query(&self, g: &GeneratorId) -> SemiDecider {
        (self.0)(g)
    }
}

impl fmt::Debug for GeneralizedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GeneralizedPoint(..)")
    }
}

/// One entry of a branch enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchSlot {
    Branch(FormalMeet),
    /// Nothing at this index; later indices may still carry branches.
    Skip,
    /// No branches at this or any later index.
    End,
}

/// A total map from indices to branch slots.
pub trait BranchEnumeration: Send + Sync {
    fn slot(&self, index: u64) -> BranchSlot;
}

impl BranchEnumeration for Vec<FormalMeet> {
    fn slot(&self, index: u64) -> BranchSlot {
        usize::try_from(index)
            .ok()
            .and_then(|i| self.get(i))
            .map_or(BranchSlot::End, |b| BranchSlot::Branch(b.clone()))
    }
}

/// A machine known only through its behaviour on generalized points.
pub trait OpaqueMachine: Send + Sync {
    fn apply(&self, point: &GeneralizedPoint) -> SemiDecider;
}

#[derive(Clone)]
enum Repr {
    Enumerated(Arc<dyn BranchEnumeration>),
    Opaque(Arc<dyn OpaqueMachine>),
}

/// A point of machine space as a running process.
#[derive(Clone)]
pub struct MachineProcess {
    repr: Repr,
    source: Option<FormalMachine>,
}

impl MachineProcess {
    /// A machine given by a (possibly infinite) enumeration of branches.
    pub fn enumerated(branches: impl BranchEnumeration + 'static) -> Self {
        MachineProcess {
            repr: Repr::Enumerated(Arc::new(branches)),
            source: None,
        }
    }

    pub fn opaque(machine: impl OpaqueMachine + 'static) -> Self {
        MachineProcess {
            repr: Repr::Opaque(Arc::new(machine)),
            source: None,
        }
    }

    pub fn source(&self) -> Option<&FormalMachine> {
        self.source.as_ref()
    }

    /// The branch slot at `index`, or `None` for opaque machines.
    pub fn branch(&self, index: u64) -> Option<BranchSlot> {
        match &self.repr {
            Repr::Enumerated(e) => Some(e.slot(index)),
            Repr::Opaque(_) => None,
        }
    }
}

impl fmt::Debug for MachineProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Some(m) => write!(f, "MachineProcess({m})"),
            None => f.write_str("MachineProcess(..)"),
        }
    }
}

/// Lists the branches of `normalize(m)` in canonical order, then ends.
pub fn compile(m: &FormalMachine) -> MachineProcess {
    let normal = normalize(m);
    let branches: Vec<FormalMeet> = normal.branches().iter().cloned().collect();
    MachineProcess {
        repr: Repr::Enumerated(Arc::new(branches)),
        source: Some(normal),
    }
}

/// `ẽv(mp, x)`: dovetails the branches of `mp` against the queries of `x`.
///
/// Round `i` pulls slot `i` (one unit), then gives one unit to every started
/// branch's unfinished queries. Halts as soon as one branch has all of its
/// queries halted.
pub fn evaluate(mp: &MachineProcess, x: &GeneralizedPoint) -> SemiDecider {
    match &mp.repr {
        Repr::Opaque(machine) => machine.apply(x),
        Repr::Enumerated(branches) => {
            let branches = Arc::clone(branches);
            let x = x.clone();
            SemiDecider::new(move || {
                Box::new(Dovetail::new(BranchSource {
                    branches: Arc::clone(&branches),
                    point: x.clone(),
                    next: 0,
                }))
            })
        }
    }
}

/// `test(mp ∈ ⊠F)` given the generalized point for `F`.
pub fn test_box(mp: &MachineProcess, f: &GeneralizedPoint) -> SemiDecider {
    evaluate(mp, f)
}

/// Fuel after which `evaluate(compile(m), p_F)` has halted whenever it ever will,
/// for finite explicit `F`: `k + s·k(k+1)/2` for `k` branches of size at most `s`.
///
/// Branch `i` is started in round `i` and all its queries answer in that
/// round, so round `j` costs at most `1 + (j+1)·s` units.
pub fn evaluate_fuel_bound(m: &FormalMachine) -> u64 {
    let normal = normalize(m);
    let k = normal.branches().len() as u64;
    let s = normal.width() as u64;
    (k + s * k * (k + 1) / 2).max(1)
}

/// Result of pulling one slot from a [`GroupSource`].
pub(crate) enum Pulled<T> {
    /// A group of child computations that succeeds when all of them halt.
    Group(T, Vec<Box<dyn Computation>>),
    Skip,
    Exhausted,
}

/// Supplies the groups of a dovetail, one per round.
pub(crate) trait GroupSource: Send {
    type Tag: Send;
    fn pull(&mut self) -> Pulled<Self::Tag>;
}

struct BranchSource {
    branches: Arc<dyn BranchEnumeration>,
    point: GeneralizedPoint,
    next: u64,
}

impl GroupSource for BranchSource {
    type Tag = ();

    fn pull(&mut self) -> Pulled<()> {
        let slot = self.branches.slot(self.next);
        self.next += 1;
        match slot {
            BranchSlot::Branch(b) => {
                Pulled::Group((), b.iter().map(|g| self.point.query(g).start()).collect())
            }
            BranchSlot::Skip => Pulled::Skip,
            BranchSlot::End => Pulled::Exhausted,
        }
    }
}

struct GroupState<T> {
    tag: T,
    pending: usize,
    doomed: bool,
}

struct Child {
    group: usize,
    run: Box<dyn Computation>,
}

enum Phase {
    Pull,
    Sweep(usize),
    Idle(u64),
}

/// Round-robin scheduler over groups of child computations.
///
/// Each round: pull one slot (one unit, until the source is exhausted), give
/// one unit to every live child in start order, then charge one unit for
/// every child known to diverge.
pub(crate) struct Dovetail<S: GroupSource> {
    source: S,
    exhausted: bool,
    groups: Vec<GroupState<S::Tag>>,
    live: VecDeque<Child>,
    diverged: u64,
    phase: Phase,
    winner: Option<usize>,
}

impl<S: GroupSource> Dovetail<S> {
    pub(crate) fn new(source: S) -> Self {
        Dovetail {
            source,
            exhausted: false,
            groups: Vec::new(),
            live: VecDeque::new(),
            diverged: 0,
            phase: Phase::Pull,
            winner: None,
        }
    }

    /// Tag of the group that completed, once halted.
    pub(crate) fn winner(&self) -> Option<&S::Tag> {
        self.winner.map(|i| &self.groups[i].tag)
    }

    pub(crate) fn source_exhausted(&self) -> bool {
        self.exhausted
    }

    fn hopeless(&self) -> bool {
        self.exhausted && self.live.iter().all(|c| self.groups[c.group].doomed)
    }
}

impl<S: GroupSource> Computation for Dovetail<S> {
    fn advance(&mut self, budget: u64) -> Progress {
        if self.winner.is_some() {
            return Progress::Halted { used: 0 };
        }
        let mut used = 0u64;
        loop {
            if used == budget {
                return Progress::Running;
            }
            match self.phase {
                Phase::Pull => {
                    if self.exhausted {
                        if self.hopeless() {
                            return Progress::Diverged;
                        }
                    } else {
                        used += 1;
                        match self.source.pull() {
                            Pulled::Group(tag, children) => {
                                let group = self.groups.len();
                                self.groups.push(GroupState {
                                    tag,
                                    pending: children.len(),
                                    doomed: false,
                                });
                                if children.is_empty() {
                                    self.winner = Some(group);
                                    return Progress::Halted { used };
                                }
                                self.live
                                    .extend(children.into_iter().map(|run| Child { group, run }));
                            }
                            Pulled::Skip => {}
                            Pulled::Exhausted => {
                                self.exhausted = true;
                                if self.hopeless() {
                                    return Progress::Diverged;
                                }
                            }
                        }
                    }
                    self.phase = Phase::Sweep(self.live.len());
                }
                Phase::Sweep(0) => self.phase = Phase::Idle(self.diverged),
                Phase::Sweep(remaining) => {
                    self.phase = Phase::Sweep(remaining - 1);
                    used += 1;
                    let mut child = self.live.pop_front().expect("sweep within live queue");
                    match child.run.advance(1) {
                        Progress::Halted { .. } => {
                            let g = &mut self.groups[child.group];
                            g.pending -= 1;
                            if g.pending == 0 && !g.doomed {
                                self.winner = Some(child.group);
                                return Progress::Halted { used };
                            }
                        }
                        Progress::Running => self.live.push_back(child),
                        Progress::Diverged => {
                            self.groups[child.group].doomed = true;
                            self.diverged += 1;
                        }
                        Progress::Aborted { fault, .. } => {
                            return Progress::Aborted { used, fault }
                        }
                    }
                }
                Phase::Idle(remaining) => {
                    let take = remaining.min(budget - used);
                    used += take;
                    self.phase = if take == remaining {
                        Phase::Pull
                    } else {
                        Phase::Idle(remaining - take)
                    };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{FormalMachine, GeneratorId};
    use proptest::prelude::*;

    fn z(n: u64) -> GeneratorId {
        GeneratorId::z(n)
    }
    fn u(n: u64) -> GeneratorId {
        GeneratorId::u(n)
    }
    fn machine(b: Vec<Vec<GeneratorId>>) -> FormalMachine {
        FormalMachine::from_branches(b).unwrap()
    }
    fn p(members: &[GeneratorId]) -> GeneralizedPoint {
        GeneralizedPoint::finite(members.iter().cloned().collect())
    }

    #[test]
    fn basic_deciders() {
        assert_eq!(SemiDecider::halting().run(1), Outcome::Halted { step: 1 });
        assert_eq!(
            SemiDecider::halting().run(0),
            Outcome::Suspended { fuel: 0 }
        );
        assert_eq!(SemiDecider::after(5).run(4), Outcome::Suspended { fuel: 4 });
        assert_eq!(SemiDecider::after(5).run(9), Outcome::Halted { step: 5 });
        assert_eq!(
            SemiDecider::never().run(1000),
            Outcome::Suspended { fuel: 1000 }
        );
    }

    #[test]
    fn compile_lists_normal_branches() {
        let mp = compile(&machine(vec![vec![z(0)], vec![u(0)]]));
        assert_eq!(
            mp.branch(0),
            Some(BranchSlot::Branch(FormalMeet::singleton(z(0))))
        );
        assert_eq!(
            mp.branch(1),
            Some(BranchSlot::Branch(FormalMeet::singleton(u(0))))
        );
        assert_eq!(mp.branch(2), Some(BranchSlot::End));
        assert_eq!(
            compile(&FormalMachine::bottom()).branch(0),
            Some(BranchSlot::End)
        );
        let absorbed = compile(&machine(vec![vec![z(0)], vec![z(0), u(1)]]));
        assert_eq!(
            absorbed.branch(0),
            Some(BranchSlot::Branch(FormalMeet::singleton(z(0))))
        );
        assert_eq!(absorbed.branch(1), Some(BranchSlot::End));
    }

    #[test]
    fn test_box_examples() {
        let mp = compile(&machine(vec![vec![z(0), z(1)], vec![u(2)]]));
        assert!(test_box(&mp, &p(&[z(0), z(1)])).run(100).is_halted());
        assert!(test_box(&mp, &p(&[u(2)])).run(100).is_halted());
        assert!(!test_box(&mp, &p(&[z(0)])).run(1_000_000).is_halted());
    }

    #[test]
    fn bottom_never_halts() {
        let mp = compile(&FormalMachine::bottom());
        assert_eq!(
            evaluate(&mp, &p(&[z(0), u(0)])).run(10_000),
            Outcome::Suspended { fuel: 10_000 }
        );
        let mut c = evaluate(&mp, &p(&[])).start();
        assert_eq!(c.advance(5), Progress::Diverged);
    }

    #[test]
    fn top_halts_immediately() {
        let mp = compile(&FormalMachine::top());
        assert_eq!(evaluate(&mp, &p(&[])).run(10), Outcome::Halted { step: 1 });
    }

    #[test]
    fn resumed_advance_matches_single_run() {
        let m = machine(vec![vec![z(0), u(1)], vec![z(1), z(2)], vec![u(0)]]);
        let point = p(&[u(0)]);
        let whole = evaluate(&compile(&m), &point).run(1000);
        let mut c = evaluate(&compile(&m), &point).start();
        let mut used = 0;
        let resumed = loop {
            match c.advance(1) {
                Progress::Halted { used: u } => break Outcome::Halted { step: used + u },
                Progress::Running => used += 1,
                other => panic!("unexpected {other:?}"),
            }
        };
        assert_eq!(whole, resumed);
    }

    #[test]
    fn skip_slots_still_cost_fuel() {
        struct Sparse;
        impl BranchEnumeration for Sparse {
            fn slot(&self, index: u64) -> BranchSlot {
                if index == 7 {
                    BranchSlot::Branch(FormalMeet::top())
                } else {
                    BranchSlot::Skip
                }
            }
        }
        let mp = MachineProcess::enumerated(Sparse);
        assert_eq!(evaluate(&mp, &p(&[])).run(100), Outcome::Halted { step: 8 });
        assert!(mp.source().is_none());
    }

    fn arb_gen() -> impl Strategy<Value = GeneratorId> {
        (0u64..3, any::<bool>()).prop_map(|(i, b)| if b { u(i) } else { z(i) })
    }

    fn arb_machine() -> impl Strategy<Value = FormalMachine> {
        prop::collection::vec(prop::collection::vec(arb_gen(), 0..4), 0..5)
            .prop_map(|b| FormalMachine::from_branches(b).unwrap())
    }

    proptest! {
        #[test]
        fn fuel_monotone(m in arb_machine(), f in prop::collection::btree_set(arb_gen(), 0..6), a in 0u64..60, b in 0u64..60) {
            let d = evaluate(&compile(&m), &GeneralizedPoint::finite(f));
            let (lo, hi) = (a.min(b), a.max(b));
            if let Outcome::Halted { step } = d.run(lo) {
                prop_assert_eq!(d.run(hi), Outcome::Halted { step });
            }
            prop_assert_eq!(d.run(hi), d.run(hi));
        }

        #[test]
        fn sufficient_fuel_matches_box(m in arb_machine(), f in prop::collection::btree_set(arb_gen(), 0..6)) {
            let d = evaluate(&compile(&m), &GeneralizedPoint::finite(f.clone()));
            let bound = evaluate_fuel_bound(&m);
            prop_assert_eq!(d.run(bound).is_halted(), crate::syntax::box_contains(&m, &f));
        }
    }
}
