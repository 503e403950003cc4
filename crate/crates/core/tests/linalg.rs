mod common;

use common::rank_mod_p;
use obspers_core::rational::{format_rat, parse_rat};
use obspers_core::{Fp, Matrix, Rat};
use proptest::prelude::*;

fn arb_matrix() -> impl Strategy<Value = Matrix> {
    (prop::sample::select(vec![2u32, 3, 5, 7]), 0usize..6, 0usize..6).prop_flat_map(|(p, r, c)| {
        prop::collection::vec(0..p, r * c).prop_map(move |d| Matrix::from_vec(Fp::new(p).unwrap(), r, c, d).unwrap())
    })
}

fn as_i64(m: &Matrix) -> Vec<Vec<i64>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_matches_oracle(m in arb_matrix()) {
        prop_assert_eq!(m.rank(), rank_mod_p(&as_i64(&m), m.field().p() as i64));
    }

    #[test]
    fn rank_nullity(m in arb_matrix()) {
        let k = m.kernel_basis();
        prop_assert_eq!(k.cols(), m.cols() - m.rank());
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(k.rank(), k.cols());
    }

    #[test]
    fn rref_is_idempotent(m in arb_matrix()) {
        let r = m.reduce();
        prop_assert_eq!(r.rref.reduce().rref, r.rref.clone());
        prop_assert_eq!(r.pivots.len(), m.rank());
    }

    #[test]
    fn solve_round_trips(m in arb_matrix(), seed in any::<u64>()) {
        let f = m.field();
        let x = Matrix::from_fn(f, m.cols(), 1, |i, _| ((seed >> (i % 60)) as u32) % f.p());
        let b = m.mul(&x);
        let y = m.solve(&b).unwrap().expect("consistent by construction");
        prop_assert_eq!(m.mul(&y), b);
    }

    #[test]
    fn inverse_exists_iff_full_rank(m in arb_matrix()) {
        if m.is_square() {
            let inv = m.inverse();
            prop_assert_eq!(inv.is_some(), m.rank() == m.rows());
            if let Some(i) = inv {
                prop_assert!(m.mul(&i).is_identity());
                prop_assert!(i.mul(&m).is_identity());
            }
        } else {
            prop_assert!(m.inverse().is_none());
        }
    }

    #[test]
    fn complement_completes_a_basis(m in arb_matrix()) {
        let c = m.column_basis();
        let full = c.hstack(&c.complement_basis());
        prop_assert!(full.is_square());
        prop_assert!(full.is_invertible() || full.rows() == 0);
    }

    #[test]
    fn products_associate(a in arb_matrix(), s in any::<u64>()) {
        let f = a.field();
        let b = Matrix::from_fn(f, a.cols(), 3, |i, j| ((s >> ((i + j) % 60)) as u32) % f.p());
        let c = Matrix::from_fn(f, 3, 2, |i, j| ((s >> ((2 * i + j) % 60)) as u32 + 1) % f.p());
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = Rat::new(n, d);
        prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }
}

#[test]
fn field_arithmetic_small_primes() {
    for p in [2u32, 3, 5, 7, 11] {
        let f = Fp::new(p).unwrap();
        for a in 1..p {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.add(a, f.neg(a)), 0);
        }
    }
    assert!(Fp::new(4).is_err());
    assert!(Fp::new(1).is_err());
}

#[test]
fn rational_parsing() {
    assert_eq!(parse_rat("-3/6").unwrap(), Rat::new(-1, 2));
    assert_eq!(parse_rat("7").unwrap(), Rat::from_integer(7));
    assert!(parse_rat("1/0").is_err());
    assert!(parse_rat("x").is_err());
    assert_eq!(format_rat(&Rat::new(4, 2)), "2");
}
