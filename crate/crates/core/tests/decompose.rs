mod common;

use common::{f2, random_sums, scramble};
use obspers_core::decompose::{decompose, endo_algebra, iso_classes, iso_test, same_iso_multiset, split_once};
use obspers_core::library::{grid3_indecomposables, three_lines};
use obspers_core::{Fp, SearchBudget, StepModule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn library_parts_are_indecomposable_and_distinct() {
    let parts = grid3_indecomposables(f2()).unwrap();
    let b = SearchBudget::for_prime(2);
    for p in &parts {
        assert!(split_once(p, &b).unwrap().is_none());
    }
    let classes = iso_classes(&parts, &b).unwrap();
    let mut sorted = classes.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), parts.len());
}

#[test]
fn krull_schmidt_recovery() {
    let parts = grid3_indecomposables(f2()).unwrap();
    for (sum, chosen) in random_sums(17, 30, &parts) {
        for seed in [0u64, 99] {
            let b = SearchBudget::for_prime(2).with_seed(seed);
            let d = decompose(&sum, &b).unwrap();
            assert!(d.verify().unwrap());
            assert_eq!(d.summands.len(), chosen.len());
            assert!(same_iso_multiset(&d.summands, &chosen, &b).unwrap());
        }
    }
}

#[test]
fn scrambled_modules_are_isomorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = Fp::new(3).unwrap();
    let v = three_lines(f).unwrap();
    let vv = v.direct_sum(&v).unwrap();
    let w = scramble(&mut rng, &vv);
    let iso = iso_test(&vv, &w, &SearchBudget::for_prime(3)).unwrap().unwrap();
    assert!(iso.is_iso());
    assert!(iso.check_naturality().is_ok());
}

#[test]
fn iso_is_an_equivalence() {
    let parts = grid3_indecomposables(f2()).unwrap();
    let mut ms: Vec<StepModule> = random_sums(5, 8, &parts).into_iter().map(|(s, _)| s).collect();
    ms.extend(parts.iter().cloned());
    let b = SearchBudget::for_prime(2);
    let n = ms.len();
    let rel: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| iso_test(&ms[i], &ms[j], &b).unwrap().is_some()).collect()).collect();
    for i in 0..n {
        assert!(rel[i][i]);
        for j in 0..n {
            assert_eq!(rel[i][j], rel[j][i]);
            for k in 0..n {
                assert!(!(rel[i][j] && rel[j][k]) || rel[i][k]);
            }
        }
    }
}

#[test]
fn endomorphisms_of_a_sum() {
    // End(A ⊕ A) for an indecomposable with End(A) = k is 2×2 matrices
    let parts = grid3_indecomposables(f2()).unwrap();
    let a = &parts[2];
    assert_eq!(endo_algebra(a).unwrap().dim(), 1);
    let aa = a.direct_sum(a).unwrap();
    assert_eq!(endo_algebra(&aa).unwrap().dim(), 4);
}

#[test]
fn zero_module_has_no_summands() {
    let z = StepModule::zero(f2(), 2);
    let d = decompose(&z, &SearchBudget::for_prime(2)).unwrap();
    assert!(d.summands.is_empty());
    assert!(iso_test(&z, &z, &SearchBudget::for_prime(2)).unwrap().is_some());
}
