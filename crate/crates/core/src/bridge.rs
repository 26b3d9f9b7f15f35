//! Between machines and opens: the quotient `q` sending a machine to the
//! open it verifies, and for Cantor space a section `s` choosing a machine
//! for every open.
//!
//! Opens of Cantor space are given as semi-deciders on partial functions
//! `ℕ ⇀ 2`. The section runs the open on the finite partial function `f_E`
//! of every consistent finite set `E` of digit generators and keeps `⋀E`
//! whenever it halts. The construction relies on Cantor space being locally
//! compact; spaces that are not admit no such total section, and none is
//! offered for the other presentations.
//!
//! Equality of opens is not decidable, so the laws are checked by sampling
//! points at a fixed fuel.

use std::fmt;
use std::sync::Arc;

use num_integer::Roots;

use crate::presentation::SpaceError;
use crate::runtime::{
    evaluate, BranchEnumeration, BranchSlot, Computation, Fault, MachineProcess, Outcome, Progress,
    SemiDecider,
};
use crate::spaces::{point_embed, ConcretePoint, SpaceKind, StreamPoint};
use crate::syntax::{FormalMeet, GeneratorId, Polarity, Word};

/// A point of the dcpo of partial functions `ℕ ⇀ 2`.
#[derive(Clone)]
pub struct PartialFunctionPoint {
    assignment: Arc<dyn Fn(u64) -> Result<Option<bool>, Fault> + Send + Sync>,
}

impl PartialFunctionPoint {
    pub fn new(
        assignment: impl Fn(u64) -> Result<Option<bool>, Fault> + Send + Sync + 'static,
    ) -> Self {
        PartialFunctionPoint {
            assignment: Arc::new(assignment),
        }
    }

    /// The total function of a stream.
    pub fn total(stream: &StreamPoint) -> Self {
        let s = stream.clone();
        PartialFunctionPoint::new(move |n| s.digit(n).map(Some))
    }

    /// `f_E`: 0 where `z_n ∈ E`, 1 where `u_n ∈ E`, undefined elsewhere.
    pub fn from_meet(e: &FormalMeet) -> Self {
        let digits: Vec<(u64, bool)> = e
            .iter()
            .filter_map(|g| match g {
                GeneratorId::Digit { index, polarity } => Some((*index, polarity.bit())),
                _ => None,
            })
            .collect();
        PartialFunctionPoint::new(move |n| {
            Ok(digits.iter().find(|(i, _)| *i == n).map(|(_, b)| *b))
        })
    }

    pub fn digit(&self, n: u64) -> Result<Option<bool>, Fault> {
        (self.assignment)(n)
    }
}

impl fmt::Debug for PartialFunctionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: String = (0..8)
            .map(|n| match self.digit(n) {
                Ok(Some(false)) => '0',
                Ok(Some(true)) => '1',
                Ok(None) => '_',
                Err(_) => '!',
            })
            .collect();
        write!(f, "PartialFunctionPoint({shown}..)")
    }
}

/// An open of Cantor space, as a monotone semi-decider on partial functions.
#[derive(Clone)]
pub struct OpenPredicate(Arc<dyn Fn(&PartialFunctionPoint) -> SemiDecider + Send + Sync>);

impl OpenPredicate {
    /// The caller guarantees monotonicity: halting on `f` implies halting on every extension of `f`.
    pub fn new(u: impl Fn(&PartialFunctionPoint) -> SemiDecider + Send + Sync + 'static) -> Self {
        OpenPredicate(Arc::new(u))
    }

    pub fn always() -> Self {
        OpenPredicate::new(|_| SemiDecider::halting())
    }

    pub fn never() -> Self {
        OpenPredicate::new(|_| SemiDecider::never())
    }

    /// Reads digits `0..depth` in order, one unit each, then halts iff `accept`
    /// holds. Stalls forever on an undefined digit.
    pub fn cylinders(depth: usize, accept: impl Fn(&Word) -> bool + Send + Sync + 'static) -> Self {
        let accept: Arc<dyn Fn(&Word) -> bool + Send + Sync> = Arc::new(accept);
        OpenPredicate::new(move |f| {
            let (f, accept) = (f.clone(), Arc::clone(&accept));
            SemiDecider::new(move || {
                Box::new(Cylinders {
                    f: f.clone(),
                    depth,
                    accept: Arc::clone(&accept),
                    read: Vec::new(),
                })
            })
        })
    }

    /// Halts when some digit among `0..depth` is defined and equal to `bit`.
    pub fn some_digit_is(depth: u64, bit: bool) -> Self {
        OpenPredicate::new(move |f| {
            let f = f.clone();
            SemiDecider::new(move || {
                Box::new(Scan {
                    f: f.clone(),
                    depth,
                    bit,
                    next: 0,
                })
            })
        })
    }

    pub fn apply(&self, f: &PartialFunctionPoint) -> SemiDecider {
        (self.0)(f)
    }
}

impl fmt::Debug for OpenPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OpenPredicate(..)")
    }
}

struct Cylinders {
    f: PartialFunctionPoint,
    depth: usize,
    accept: Arc<dyn Fn(&Word) -> bool + Send + Sync>,
    read: Vec<bool>,
}

impl Computation for Cylinders {
    fn advance(&mut self, budget: u64) -> Progress {
        for used in 1..=budget {
            if self.read.len() == self.depth {
                return if (self.accept)(&Word::new(self.read.clone())) {
                    Progress::Halted { used }
                } else {
                    Progress::Diverged
                };
            }
            match self.f.digit(self.read.len() as u64) {
                Ok(Some(b)) => self.read.push(b),
                Ok(None) => return Progress::Diverged,
                Err(fault) => return Progress::Aborted { used, fault },
            }
        }
        Progress::Running
    }
}

struct Scan {
    f: PartialFunctionPoint,
    depth: u64,
    bit: bool,
    next: u64,
}

impl Computation for Scan {
    fn advance(&mut self, budget: u64) -> Progress {
        for used in 1..=budget {
            if self.next == self.depth {
                return Progress::Diverged;
            }
            let n = self.next;
            self.next += 1;
            match self.f.digit(n) {
                Ok(Some(b)) if b == self.bit => return Progress::Halted { used },
                Ok(_) => {}
                Err(fault) => return Progress::Aborted { used, fault },
            }
        }
        Progress::Running
    }
}

/// An element of `Σ^X`, observed on concrete points.
#[derive(Clone)]
pub struct OpenOnX(Arc<dyn Fn(&ConcretePoint) -> SemiDecider + Send + Sync>);

impl OpenOnX {
    pub fn new(accept: impl Fn(&ConcretePoint) -> SemiDecider + Send + Sync + 'static) -> Self {
        OpenOnX(Arc::new(accept))
    }

    pub fn accept(&self, x: &ConcretePoint) -> SemiDecider {
        (self.0)(x)
    }
}

impl fmt::Debug for OpenOnX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OpenOnX(..)")
    }
}

/// `q(mp)`: the open `x ↦ ẽv(mp, i_X(x))`.
pub fn quotient_q(mp: &MachineProcess, space: SpaceKind) -> OpenOnX {
    let mp = mp.clone();
    OpenOnX::new(move |x| evaluate(&mp, &point_embed(space, x)))
}

/// The `j`-th consistent finite set of digit generators.
///
/// `j` written in base 3, least significant digit first, lists digit `n` as
/// undefined (0), zero (1) or one (2); the leading base-3 digit is nonzero,
/// so this is a bijection onto the finite partial assignments.
pub fn consistent_meet(mut j: u64) -> FormalMeet {
    let mut gens = Vec::new();
    let mut n = 0u64;
    while j > 0 {
        match j % 3 {
            1 => gens.push(GeneratorId::Digit {
                index: n,
                polarity: Polarity::Zero,
            }),
            2 => gens.push(GeneratorId::Digit {
                index: n,
                polarity: Polarity::One,
            }),
            _ => {}
        }
        j /= 3;
        n += 1;
    }
    FormalMeet::new(gens).expect("digit generators")
}

/// Inverse of the Cantor pairing `(j, n) ↦ (j+n)(j+n+1)/2 + n`.
fn unpair(k: u64) -> (u64, u64) {
    let mut w = ((8 * u128::from(k) + 1).sqrt() as u64 - 1) / 2;
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    let n = k - w * (w + 1) / 2;
    (w - n, n)
}

struct Section {
    u: OpenPredicate,
}

impl BranchEnumeration for Section {
    /// Slot `⟨j, n⟩` holds `⋀E_j` if `u(f_{E_j})` halts at exactly step `n`.
    fn slot(&self, index: u64) -> BranchSlot {
        let (j, n) = unpair(index);
        if n == 0 {
            return BranchSlot::Skip;
        }
        let e = consistent_meet(j);
        match self.u.apply(&PartialFunctionPoint::from_meet(&e)).run(n) {
            Outcome::Halted { step } if step == n => BranchSlot::Branch(e),
            _ => BranchSlot::Skip,
        }
    }
}

/// `s(u) = ⋁ { ⋀E : E consistent, u(f_E) halts }` as an enumerated machine.
pub fn section_s_cantor(u: &OpenPredicate) -> MachineProcess {
    MachineProcess::enumerated(Section { u: u.clone() })
}

/// The section where it exists.
pub fn section_s(space: SpaceKind, u: &OpenPredicate) -> Result<MachineProcess, SpaceError> {
    match space {
        SpaceKind::CantorDigits => Ok(section_s_cantor(u)),
        other => Err(SpaceError::Unsupported {
            space: crate::presentation::Presentation::tag(&other),
            operation: "the section s",
        }),
    }
}

/// One sampled point of [`check_section_laws`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleCheck {
    /// `u` on the total function of the point.
    pub direct: Outcome,
    /// `ẽv(s(u), i(x))`.
    pub through_section: Outcome,
    /// `q(s(u))(x)`.
    pub through_quotient: Outcome,
}

impl SampleCheck {
    pub fn passed(&self) -> bool {
        let h = self.direct.is_halted();
        let clean = |o: &Outcome| !matches!(o, Outcome::Aborted { .. });
        clean(&self.direct)
            && clean(&self.through_section)
            && clean(&self.through_quotient)
            && self.through_section.is_halted() == h
            && self.through_quotient.is_halted() == h
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionReport {
    pub samples: Vec<SampleCheck>,
}

impl SectionReport {
    pub fn all_passed(&self) -> bool {
        self.samples.iter().all(SampleCheck::passed)
    }
}

/// Compares `u`, `ẽv ∘ (s × X)` and `q ∘ s` on each stream sample at `fuel`.
///
/// The fuel has to be enough for the machine side to reach the branch that
/// witnesses `u`; the direct side usually halts much earlier.
pub fn check_section_laws(u: &OpenPredicate, samples: &[StreamPoint], fuel: u64) -> SectionReport {
    let s = section_s_cantor(u);
    let q = quotient_q(&s, SpaceKind::CantorDigits);
    let samples = samples
        .iter()
        .map(|x| {
            let point = ConcretePoint::Stream(x.clone());
            SampleCheck {
                direct: u.apply(&PartialFunctionPoint::total(x)).run(fuel),
                through_section: evaluate(&s, &point_embed(SpaceKind::CantorDigits, &point))
                    .run(fuel),
                through_quotient: q.accept(&point).run(fuel),
            }
        })
        .collect();
    SectionReport { samples }
}
