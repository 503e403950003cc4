mod common;

use common::{brute_iso, f2, random_corpus, sublevel_family};
use obspers_core::calculus::persistent_rank;
use obspers_core::library::{lambda_module, rectangle, single_cell};
use obspers_core::limits::{
    cauchy_limit, dyadic_chain, partition, precompact_probe, probe_grid, probe_normalize, probe_pairs, support_box,
    uniform_bounds_report, CauchyChain, PairOutcome,
};
use obspers_core::metric::{verify, Interleaving};
use obspers_core::rational::{int, rat};
use obspers_core::{Fp, SearchBudget, StepModule};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn dyadic_chains_certify() {
    for v in random_corpus(7, 4) {
        let chain = dyadic_chain(&v, 3).unwrap();
        let lim = cauchy_limit(&chain).unwrap();
        assert_eq!(lim.tails, vec![rat(7, 4), rat(3, 4), rat(1, 4), int(0)]);
        for (k, c) in lim.certificates.iter().enumerate() {
            assert_eq!(c.eps, lim.tails[k]);
            assert!(verify(&lim.limit, &chain.terms[k], c.eps, &c.f, &c.g).unwrap().is_ok());
        }
    }
}

#[test]
fn broken_link_is_reported() {
    let v = random_corpus(8, 1).pop().unwrap();
    let mut chain = dyadic_chain(&v, 2).unwrap();
    chain.links[1].eps = int(0);
    if v.restrict_extend(chain.terms[1].grid()).unwrap() != v.restrict_extend(chain.terms[2].grid()).unwrap() {
        assert!(chain.check().is_err());
    }
    assert!(CauchyChain::new(vec![], vec![]).is_err());
}

#[test]
fn constant_chain_with_identity_links() {
    let v = single_cell(f2(), &[int(0), int(0)], int(2)).unwrap();
    let chain = CauchyChain::new(vec![v.clone(); 3], vec![Interleaving::identity(&v); 2]).unwrap();
    let lim = cauchy_limit(&chain).unwrap();
    assert!(lim.tails.iter().all(|t| *t == int(0)));
    assert_eq!(lim.limit, v);
}

#[test]
fn probe_is_permutation_invariant() {
    let f = Fp::new(5).unwrap();
    let mut family: Vec<StepModule> = (1..5).map(|l| lambda_module(f, l).unwrap()).collect();
    family.push(family[0].clone());
    family.push(family[2].clone());
    let b = SearchBudget::for_prime(5);
    let base = precompact_probe(&family, int(1), &b).unwrap();
    assert_eq!(base.class_count(), Some(4));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        family.shuffle(&mut rng);
        assert_eq!(precompact_probe(&family, int(1), &b).unwrap().class_count(), Some(4));
    }
}

#[test]
fn partition_brackets_budget_pairs() {
    // 0~1 known, 2 vs anything unknown
    let outcomes: Vec<_> = probe_pairs(3)
        .into_iter()
        .map(|(i, j)| ((i, j), if (i, j) == (0, 1) { PairOutcome::Iso } else { PairOutcome::Budget }))
        .collect();
    let r = partition(3, &outcomes);
    assert_eq!((r.class_count_min, r.class_count_max), (1, 2));
    assert_eq!(r.class_count(), None);
}

/// Probe classes of lower-star `H_0` modules on a fixed path agree with an
/// independent iso oracle on the normalized modules.
#[test]
fn sublevel_family_probe_matches_oracle() {
    let family = sublevel_family(12, 12);
    let delta = int(1);
    let grid = probe_grid(&family, delta).unwrap();
    let normal: Vec<StepModule> = family.iter().map(|v| probe_normalize(v, delta, &grid).unwrap()).collect();
    let report = precompact_probe(&family, delta, &SearchBudget::for_prime(2)).unwrap();
    for i in 0..family.len() {
        for j in 0..family.len() {
            assert_eq!(report.labels[i] == report.labels[j], brute_iso(&normal[i], &normal[j]), "{i} {j}");
        }
    }
}

#[test]
fn support_and_rank_bounds() {
    let f = f2();
    let a = rectangle(f, &[int(0), int(0)], &[Some(int(1)), Some(int(1))]).unwrap();
    let b = rectangle(f, &[int(2), rat(1, 2)], &[None, None]).unwrap();
    let s = support_box(&a).unwrap();
    assert_eq!(s.lower, vec![int(0), int(0)]);
    assert_eq!(s.upper, vec![Some(int(1)), Some(int(1))]);
    let u = uniform_bounds_report(&[a.clone(), b.clone()], &[rat(1, 2), int(1), int(5)]).unwrap();
    let sb = u.support.unwrap();
    assert_eq!(sb.lower, vec![int(0), int(0)]);
    assert_eq!(sb.upper, vec![None, None]);
    assert_eq!(u.ranks, vec![(rat(1, 2), 1), (int(1), 1), (int(5), 1)]);
    assert_eq!(persistent_rank(&a, int(1)).unwrap(), 0);
    assert!(support_box(&StepModule::zero(f, 2)).is_none());
}
