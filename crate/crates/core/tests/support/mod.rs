#![allow(dead_code)]

pub mod golden;

use machine_space::presentation::Presentation;
use machine_space::spaces::SpaceKind;
use machine_space::syntax::{FormalMachine, FormalMeet, GeneratorId, Word};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// A random machine over the first `gens` generators of `space`, with up to
/// `branches` branches of 1 to `width` generators each.
pub fn random_machine(
    rng: &mut impl Rng,
    space: SpaceKind,
    gens: u64,
    branches: usize,
    width: usize,
) -> FormalMachine {
    let k = rng.gen_range(0..=branches);
    let bs = (0..k).map(|_| {
        let s = rng.gen_range(1..=width);
        (0..s)
            .map(|_| space.generator(rng.gen_range(0..gens)))
            .collect::<Vec<_>>()
    });
    FormalMachine::from_branches(bs.collect()).unwrap()
}

pub fn machine_from_pool(pool: &[GeneratorId], branch_masks: &[u32]) -> FormalMachine {
    let branches = branch_masks.iter().map(|&mask| {
        FormalMeet::new(
            (0..pool.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pool[i].clone()),
        )
        .unwrap()
    });
    FormalMachine::new(branches).unwrap()
}

pub fn word_index(w: &Word) -> usize {
    w.bits().iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

fn any_branch(m: &FormalMachine, holds: impl Fn(&GeneratorId) -> bool) -> bool {
    m.branches().iter().any(|b| b.iter().all(&holds))
}

/// Covers on digit Cantor space by trying every assignment of the digits
/// the machine mentions.
pub fn digits_cover_oracle(m: &FormalMachine) -> bool {
    let n = m
        .branches()
        .iter()
        .flat_map(|b| b.iter())
        .map(|g| match g {
            GeneratorId::Digit { index, .. } => *index as usize + 1,
            _ => panic!("not a digit generator"),
        })
        .max()
        .unwrap_or(0);
    (0u64..1 << n).all(|x| {
        any_branch(m, |g| match g {
            GeneratorId::Digit { index, polarity } => (x >> index & 1 == 1) == polarity.bit(),
            _ => false,
        })
    })
}

/// Covers on prefix Cantor space by padding every branch to words of the
/// longest length mentioned.
pub fn prefix_cover_oracle(m: &FormalMachine) -> bool {
    let n = m
        .branches()
        .iter()
        .flat_map(|b| b.iter())
        .map(|g| match g {
            GeneratorId::Prefix(w) => w.len(),
            _ => panic!("not a prefix generator"),
        })
        .max()
        .unwrap_or(0);
    Word::all_of_length(n).all(|x| {
        any_branch(m, |g| match g {
            GeneratorId::Prefix(w) => w.is_prefix_of(&x),
            _ => false,
        })
    })
}

/// Membership of `x` in an interval generator; the ends 0 and 1 are closed.
pub fn interval_member(g: &GeneratorId, x: &BigRational) -> bool {
    match g {
        GeneratorId::Interval(iv) => {
            let (lo, hi) = (iv.lo(), iv.hi());
            (lo < x || (lo.is_zero() && x.is_zero())) && (x < hi || (hi.is_one() && x.is_one()))
        }
        _ => false,
    }
}

/// Covers on the unit interval by checking every endpoint and every
/// midpoint between consecutive endpoints.
pub fn interval_cover_oracle(m: &FormalMachine) -> bool {
    let mut ends = vec![BigRational::zero(), BigRational::one()];
    for g in m.branches().iter().flat_map(|b| b.iter()) {
        if let GeneratorId::Interval(iv) = g {
            ends.push(iv.lo().clone());
            ends.push(iv.hi().clone());
        }
    }
    ends.sort();
    ends.dedup();
    let two = BigRational::from_integer(2.into());
    let mids: Vec<BigRational> = ends.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
    ends.iter()
        .chain(&mids)
        .all(|x| any_branch(m, |g| interval_member(g, x)))
}

pub fn cover_oracle(space: SpaceKind, m: &FormalMachine) -> bool {
    match space {
        SpaceKind::CantorDigits => digits_cover_oracle(m),
        SpaceKind::CantorPrefix => prefix_cover_oracle(m),
        SpaceKind::UnitInterval => interval_cover_oracle(m),
    }
}
