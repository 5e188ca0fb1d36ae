use proptest::prelude::*;
use twpatch::coeff::{mat_kernel, mat_solve, poly_mul_trunc, span, CoeffRing, Mat, TruncPoly};

/// Rings with at most 81 elements, as the exhaustive oracles require.
fn small_ring() -> impl Strategy<Value = CoeffRing> {
    prop_oneof![
        Just((3, 1)),
        Just((3, 2)),
        Just((3, 3)),
        Just((3, 4)),
        Just((5, 1)),
        Just((5, 2)),
        Just((7, 1))
    ]
    .prop_map(|(p, m)| CoeffRing::new(p, m).unwrap())
}

fn small_matrix() -> impl Strategy<Value = Mat> {
    (small_ring(), 1usize..=3, 1usize..=3).prop_flat_map(|(ring, rows, cols)| {
        prop::collection::vec(0..ring.modulus(), rows * cols)
            .prop_map(move |entries| Mat { ring, rows, cols, entries })
    })
}

/// Every vector of `R^n`, in lexicographic order.
fn all_vectors(ring: CoeffRing, n: usize) -> Vec<Vec<u64>> {
    let q = ring.modulus();
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % q;
                    k /= q;
                    d
                })
                .collect()
        })
        .collect()
}

fn exhaustive_feasible(ring: CoeffRing, n: usize) -> bool {
    (ring.modulus() as u128).pow(n as u32) <= 81u128.pow(2) * 9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_is_exact(m in small_matrix()) {
        prop_assume!(exhaustive_feasible(m.ring, m.cols));
        let gens = mat_kernel(&m);
        for g in &gens {
            prop_assert!(m.mul_vec(g).unwrap().iter().all(|&a| a == 0));
        }
        let h = span(m.ring, m.cols, &gens);
        for v in all_vectors(m.ring, m.cols) {
            let zero = m.mul_vec(&v).unwrap().iter().all(|&a| a == 0);
            prop_assert_eq!(zero, h.contains(&v));
        }
    }

    #[test]
    fn solve_agrees_with_search(m in small_matrix(), seed in any::<u64>()) {
        prop_assume!(exhaustive_feasible(m.ring, m.cols));
        let ring = m.ring;
        let b: Vec<u64> = (0..m.rows as u64).map(|i| (seed >> (8 * i)) % ring.modulus()).collect();
        let found = mat_solve(&m, &b).unwrap();
        let exists = all_vectors(ring, m.cols).into_iter().any(|v| m.mul_vec(&v).unwrap() == b);
        match found {
            Some(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), b),
            None => prop_assert!(!exists),
        }
    }

    #[test]
    fn truncated_product_is_commutative_and_associative(
        ring in small_ring(),
        bound in 1u32..=4,
        terms in prop::collection::vec((0u32..3, 0u32..3, 0i64..100), 0..6),
        terms2 in prop::collection::vec((0u32..3, 0u32..3, 0i64..100), 0..6),
        terms3 in prop::collection::vec((0u32..3, 0u32..3, 0i64..100), 0..6),
    ) {
        let build = |ts: &[(u32, u32, i64)]| {
            let mut p = TruncPoly::zero(ring, 2, bound);
            for &(i, j, c) in ts {
                p.add_term(vec![i, j], ring.from_i64(c));
            }
            p
        };
        let (a, b, c) = (build(&terms), build(&terms2), build(&terms3));
        prop_assert_eq!(poly_mul_trunc(&a, &b).unwrap(), poly_mul_trunc(&b, &a).unwrap());
        let left = poly_mul_trunc(&poly_mul_trunc(&a, &b).unwrap(), &c).unwrap();
        let right = poly_mul_trunc(&a, &poly_mul_trunc(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}
