//! Presented frames `⟨G | R⟩` as seen by the quantifiers.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{FormalMachine, FormalMeet, GeneratorId, Relation, SpaceTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("generator {generator} does not belong to space {space}")]
    Mismatch {
        space: SpaceTag,
        generator: GeneratorId,
    },
    #[error("{operation} is not supported for space {space}")]
    Unsupported {
        space: SpaceTag,
        operation: &'static str,
    },
    #[error("unknown space {0:?} (expected cantor-digits, cantor-prefix or interval)")]
    UnknownSpace(String),
}

/// A countable generator universe with relations and exact deciders for
/// covers (`⋁ ⋀ = ⊤`) and positivity (`⋀ ≠ ⊥`).
pub trait Presentation: Send + Sync {
    fn tag(&self) -> SpaceTag;

    /// Total injective enumeration of the generators.
    fn generator(&self, index: u64) -> GeneratorId;

    /// Inverse of [`Presentation::generator`] on its image.
    fn index_of(&self, g: &GeneratorId) -> Option<u64>;

    /// Strict order `a ≤ b` between generators, for poset presentations.
    fn precedes(&self, _a: &GeneratorId, _b: &GeneratorId) -> bool {
        false
    }

    /// Closes a finite set upward in the generator order.
    ///
    /// A point that lies in `g` lies in every generator above `g`, so the
    /// generalized point tested for `F` is that of its up-closure.
    fn up_closure(&self, f: &BTreeSet<GeneratorId>) -> BTreeSet<GeneratorId> {
        f.clone()
    }

    /// The defining relations that only mention generators from `gens`.
    fn relations(&self, gens: &[GeneratorId]) -> Vec<Relation>;

    fn covers(&self, m: &FormalMachine) -> Result<bool, SpaceError>;

    fn positive(&self, b: &FormalMeet) -> Result<bool, SpaceError>;

    /// `n`-th member of a cofinal sequence of finite covers, if the space has one.
    fn basic_cover(&self, _n: u64) -> Option<Vec<FormalMeet>> {
        None
    }

    /// `i`-th member of a sequence of positive meets dense below every positive open.
    fn basic_positive(&self, _i: u64) -> Option<FormalMeet> {
        None
    }

    fn check_generator(&self, g: &GeneratorId) -> Result<(), SpaceError> {
        if g.space_tag() == self.tag() {
            Ok(())
        } else {
            Err(SpaceError::Mismatch {
                space: self.tag(),
                generator: g.clone(),
            })
        }
    }

    fn check_machine(&self, m: &FormalMachine) -> Result<(), SpaceError> {
        m.branches()
            .iter()
            .flat_map(|b| b.iter())
            .try_for_each(|g| self.check_generator(g))
    }
}
