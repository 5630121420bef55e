//! Randomized property tests for the exact-arithmetic kernels.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use centralizer_lab::interval::RatInterval;
use centralizer_lab::linalg::{integer_kernel, smith_normal_form};
use centralizer_lab::commutant::commutant_basis;
use centralizer_lab::sft::build_sft;
use centralizer_lab::spectral::spectrum_report;
use centralizer_lab::IntMatrix;

fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, n), n).prop_map(|rows| {
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        IntMatrix::from_i64(&refs)
    })
}

fn any_small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4).prop_flat_map(small_matrix)
}

fn rows_of(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j).clone()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (small_matrix(n), small_matrix(n)))) {
        let ab = &a * &b;
        prop_assert_eq!(ab.det(), a.det() * b.det());
    }

    #[test]
    fn cayley_hamilton(m in any_small_matrix()) {
        // p(M) = 0 for the characteristic polynomial p
        let p = m.charpoly();
        let n = m.dim();
        let mut acc = IntMatrix::zero(n);
        let mut power = IntMatrix::identity(n);
        for c in p.coeffs() {
            acc = &acc + &power.scale(c);
            power = &power * &m;
        }
        prop_assert_eq!(acc, IntMatrix::zero(n));
    }

    #[test]
    fn charpoly_constant_term_is_signed_det(m in any_small_matrix()) {
        let p = m.charpoly();
        let sign = if m.dim() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        prop_assert_eq!(p.coeffs()[0].clone(), sign * m.det());
    }

    #[test]
    fn kernel_vectors_annihilate(m in any_small_matrix()) {
        let rows = rows_of(&m);
        for v in integer_kernel(&rows) {
            prop_assert!(!v.iter().all(|c| c.is_zero()));
            for row in &rows {
                let dot: BigInt = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn smith_normal_form_verifies(m in any_small_matrix()) {
        let rows = rows_of(&m);
        let snf = smith_normal_form(&rows);
        prop_assert!(snf.verify(&rows));
        // divisibility chain d1 | d2 | ... on nonzero entries
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                prop_assert!(!w[0].is_zero());
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn commutant_basis_commutes(m in any_small_matrix()) {
        let lattice = commutant_basis(&m);
        prop_assert!(lattice.rank() >= 1);
        for b in lattice.basis() {
            prop_assert!(b.commutes_with(&m));
        }
        // the identity always lies in the lattice
        prop_assert!(lattice.contains(&IntMatrix::identity(m.dim())));
    }

    #[test]
    fn spectrum_multiplicities_sum_to_dim(m in small_matrix(2)) {
        let tol = BigRational::new(BigInt::one(), BigInt::from(1_000u64));
        if let Ok(report) = spectrum_report(&m, &tol) {
            let total: usize = report
                .enclosures
                .iter()
                .map(|e| e.root_count())
                .sum();
            prop_assert_eq!(total, m.dim());
            // entropy = sum of positive log-moduli is nonnegative
            prop_assert!(report.entropy.hi >= BigRational::zero());
        }
    }

    #[test]
    fn interval_mul_contains_products(
        (a_num, a_den, b_num, b_den, wa, wb) in
            (-50i64..=50, 1i64..=20, -50i64..=50, 1i64..=20, 0i64..=9, 0i64..=9)
    ) {
        let a = BigRational::new(BigInt::from(a_num), BigInt::from(a_den));
        let b = BigRational::new(BigInt::from(b_num), BigInt::from(b_den));
        let w = |k: i64| BigRational::new(BigInt::from(k), BigInt::from(10));
        let ia = RatInterval::new(&a - w(wa), &a + w(wa));
        let ib = RatInterval::new(&b - w(wb), &b + w(wb));
        prop_assert!(ia.mul(&ib).contains(&(&a * &b)));
        prop_assert!(ia.add(&ib).contains(&(&a + &b)));
        prop_assert!(ia.sub(&ib).contains(&(&a - &b)));
        prop_assert!(ia.abs().contains(&a.abs()));
    }

    #[test]
    fn trace_counts_periodic_words(
        rows in prop::collection::vec(prop::collection::vec(0u8..=1, 3), 3),
        n in 1usize..=5
    ) {
        if let Ok(s) = build_sft(&rows) {
            let t = s.transition_matrix();
            let tn = t.pow(n as i64).unwrap();
            let trace: BigInt = (0..t.dim()).map(|i| tn.get(i, i).clone()).sum();
            // period-n points = words of length n closing up cyclically
            let mut count = BigInt::zero();
            let k = s.alphabet_size();
            let mut word = vec![0u8; n];
            'outer: loop {
                if s.cyclic_word_allowed(&word) {
                    count += 1;
                }
                for i in (0..n).rev() {
                    if (word[i] as usize) + 1 < k {
                        word[i] += 1;
                        continue 'outer;
                    }
                    word[i] = 0;
                }
                break;
            }
            prop_assert_eq!(trace, count);
        }
    }

    #[test]
    fn unimodular_inverse_roundtrip(m in any_small_matrix()) {
        if m.det().abs() == BigInt::one() {
            let inv = m.inverse().unwrap();
            prop_assert_eq!(&m * &inv, IntMatrix::identity(m.dim()));
            prop_assert_eq!(&inv * &m, IntMatrix::identity(m.dim()));
        } else {
            prop_assert!(m.inverse().is_err() || m.det().abs() == BigInt::one());
        }
    }

}
