//! Rotation digraphs checked against stable matchings found by trying every
//! perfect matching.

mod common;

use std::collections::BTreeSet;

use common::{as_matching, eliminated, random_instance, stable_by_permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotaposet::instance::{is_stable, Instance};
use rotaposet::rotation::{
    all_stable_matchings_bruteforce, downset_from_matching, matching_from_downset, rotation_digraph,
};

fn check(inst: &Instance) {
    let stable = stable_by_permutation(inst);
    let dg = rotation_digraph(inst);
    let p = dg.len();
    let reach = dg.dag().reachability();

    let sets: Vec<Vec<usize>> = stable.iter().map(|w| eliminated(inst, &dg, w)).collect();
    let distinct: BTreeSet<&Vec<usize>> = sets.iter().collect();
    assert_eq!(distinct.len(), stable.len(), "matchings share an eliminated set");

    let mut downsets = BTreeSet::new();
    dg.dag().for_each_downset::<()>(|z| {
        downsets.insert(z.to_vec());
        std::ops::ControlFlow::Continue(())
    });
    assert_eq!(downsets, sets.iter().cloned().collect::<BTreeSet<_>>());

    for (a, row) in reach.iter().enumerate() {
        for b in (0..p).filter(|&b| b != a) {
            let implied = sets.iter().all(|s| !s.contains(&b) || s.contains(&a));
            assert_eq!(implied, row[b], "precedence {a} -> {b}");
        }
    }

    for (wives, z) in stable.iter().zip(&sets) {
        let mu = as_matching(wives);
        assert!(is_stable(inst, &mu).unwrap());
        assert_eq!(matching_from_downset(inst, &dg, z).unwrap(), mu);
        assert_eq!(downset_from_matching(inst, &dg, &mu).unwrap(), *z);
    }

    let mut library: Vec<Vec<Option<usize>>> =
        all_stable_matchings_bruteforce(inst).unwrap().iter().map(|m| m.wives().to_vec()).collect();
    let mut ours: Vec<Vec<Option<usize>>> = stable.iter().map(|w| w.iter().map(|&x| Some(x)).collect()).collect();
    library.sort();
    ours.sort();
    assert_eq!(library, ours);
}

#[test]
fn random_instances_up_to_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..150 {
        let n = 1 + i % 6;
        check(&random_instance(n, &mut rng));
    }
}

#[test]
fn random_instances_of_seven() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        check(&random_instance(7, &mut rng));
    }
}

#[test]
fn latin_square_instance() {
    // Every man's list is a cyclic shift, every woman's the reverse shift:
    // many stable matchings, a long antichain of rotations.
    let n = 6;
    let men = (0..n).map(|m| (0..n).map(|j| (m + j) % n).collect()).collect();
    let women = (0..n).map(|w| (0..n).map(|j| (w + 1 + j) % n).collect()).collect();
    check(&Instance::new(men, women).unwrap());
}
