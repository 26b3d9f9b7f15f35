mod support;

use std::collections::BTreeSet;

use machine_space::presentation::Presentation;
use machine_space::quantifier::{Caps, Quantifier, Schedule};
use machine_space::runtime::{compile, evaluate};
use machine_space::spaces::{contains, covers, dense_family, point_embed, positive, SpaceKind};
use machine_space::syntax::{box_contains, join, meet, normalize, FormalMachine, GeneratorId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space() -> impl Strategy<Value = SpaceKind> {
    prop::sample::select(SpaceKind::ALL.to_vec())
}

fn cantor() -> impl Strategy<Value = SpaceKind> {
    prop::sample::select(vec![SpaceKind::CantorDigits, SpaceKind::CantorPrefix])
}

fn machine(rng: &mut ChaCha8Rng, space: SpaceKind) -> FormalMachine {
    support::random_machine(rng, space, 4, 4, 3)
}

fn gen_set(rng: &mut ChaCha8Rng, space: SpaceKind) -> BTreeSet<GeneratorId> {
    (0..6)
        .filter(|_| rng.gen_bool(0.5))
        .map(|i| space.generator(i))
        .collect()
}

fn small() -> Caps {
    Caps {
        max_generator_index: 3,
        ..Caps::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_preserves_meaning(space in space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = machine(&mut rng, space);
        let n = normalize(&m);
        prop_assert_eq!(normalize(&n), n.clone());
        prop_assert_eq!(covers(space, &m).unwrap(), covers(space, &n).unwrap());
        for _ in 0..8 {
            let f = gen_set(&mut rng, space);
            prop_assert_eq!(box_contains(&m, &f), box_contains(&n, &f));
        }
    }

    #[test]
    fn meet_and_join_are_monotone(space in space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (machine(&mut rng, space), machine(&mut rng, space));
        let f = gen_set(&mut rng, space);
        if box_contains(&a, &f) && box_contains(&b, &f) {
            prop_assert!(box_contains(&meet(&a, &b).unwrap(), &f));
        }
        if box_contains(&a, &f) {
            prop_assert!(box_contains(&join(&a, &b).unwrap(), &f));
        }
        if covers(space, &a).unwrap() {
            prop_assert!(covers(space, &join(&a, &b).unwrap()).unwrap());
        }
    }

    #[test]
    fn evaluate_agrees_with_membership(space in space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = machine(&mut rng, space);
        let mp = compile(&m);
        for x in dense_family(space, &m.generators(), 3) {
            let want = contains(space, &m, &x).unwrap();
            let got = evaluate(&mp, &point_embed(space, &x)).run(10_000);
            prop_assert_eq!(got.is_halted(), want, "{} at {:?}: {}", m, x, got);
        }
    }

    #[test]
    fn exists_halts_iff_some_branch_is_positive(space in space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = machine(&mut rng, space);
        let q = Quantifier::new(space).with_caps(small()).unwrap();
        let inhabited = normalize(&m).branches().iter().any(|b| positive(space, b).unwrap());
        let bound = q.exists_fuel_bound(&m).unwrap();
        prop_assert_eq!(bound.is_some(), inhabited);
        let r = q.run_exists(&compile(&m), bound.unwrap_or(100_000));
        prop_assert_eq!(r.outcome.is_halted(), inhabited, "{}: {}", m, r.outcome);
        if let Some(w) = r.witness {
            prop_assert!(positive(space, &w).unwrap());
        }
    }

    #[test]
    fn basic_schedule_matches_covers_and_positivity(space in cantor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = machine(&mut rng, space);
        let mp = compile(&m);
        let basic = Quantifier::new(space).with_schedule(Schedule::Basic).unwrap();
        let c = covers(space, &m).unwrap();
        prop_assert_eq!(basic.run_forall(&mp, 200_000).outcome.is_halted(), c, "{}", m);
        let inhabited = normalize(&m).branches().iter().any(|b| positive(space, b).unwrap());
        prop_assert_eq!(basic.run_exists(&mp, 200_000).outcome.is_halted(), inhabited, "{}", m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_open_grows_with_bounds(space in space(), g in 1u64..4, s in 1usize..3) {
        let q = Quantifier::new(space);
        let smaller = q.cover_open(g, s, 1 << 20).unwrap();
        let larger = q.cover_open(g + 1, s + 1, 1 << 20).unwrap();
        for family in smaller.members() {
            prop_assert!(larger.contains_family(family));
            let m = FormalMachine::new(family.iter().cloned()).unwrap();
            prop_assert!(covers(space, &m).unwrap());
        }
        prop_assert!(larger.len() >= smaller.len());
    }
}
