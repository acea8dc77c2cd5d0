use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nontidy::gf2::{BitMatrix, BitVector};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BitMatrix {
    let data = (0..rows)
        .map(|_| BitVector::from_bits((0..cols).map(|_| rng.gen_bool(density))))
        .collect();
    BitMatrix::from_rows(cols, data).unwrap()
}

/// Rank by elimination on `u128` rows, for matrices up to 128 columns.
fn rank_oracle(m: &BitMatrix) -> usize {
    assert!(m.cols() <= 128);
    let mut rows: Vec<u128> = (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .filter(|&c| m.get(r, c))
                .fold(0u128, |acc, c| acc | 1 << c)
        })
        .collect();
    let mut rank = 0;
    for bit in 0..m.cols() {
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

#[test]
fn rank_equals_transpose_rank_up_to_200() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for size in [1, 5, 17, 64, 65, 130, 200] {
        for density in [0.05, 0.5] {
            let cols = rng.gen_range(1..=200);
            let m = random_matrix(&mut rng, size, cols, density);
            assert_eq!(m.rank(), m.transpose().rank(), "{size} rows");
        }
    }
    // low rank: product of thin factors
    let a = random_matrix(&mut rng, 200, 7, 0.5);
    let b = random_matrix(&mut rng, 7, 200, 0.5);
    let p = a.mul(&b).unwrap();
    assert!(p.rank() <= 7);
    assert_eq!(p.rank(), p.transpose().rank());
}

#[test]
fn rank_agrees_with_independent_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let rows = rng.gen_range(0..40);
        let cols = rng.gen_range(0..=128);
        let density = rng.gen_range(0.05..0.9);
        let m = random_matrix(&mut rng, rows, cols, density);
        assert_eq!(m.rank(), rank_oracle(&m));
    }
}

#[test]
fn triangle_boundary_has_rank_two() {
    let m = BitMatrix::from_bits(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
    assert_eq!(m.rank(), 2);
    let kernel = m.kernel_basis();
    assert_eq!(kernel.len(), 1);
    assert_eq!(kernel[0], BitVector::ones(3));
}

#[test]
fn width_mismatch_is_rejected() {
    let m = BitMatrix::identity(3);
    assert!(m.solve_in_span(&BitVector::zeros(4)).is_err());
    assert!(m.mul_vec(&BitVector::zeros(2)).is_err());
}

proptest! {
    #[test]
    fn kernel_plus_rank_is_rows(seed in any::<u64>(), rows in 0usize..70, cols in 0usize..70) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, rows, cols, 0.3);
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len() + m.rank(), rows);
        for x in &kernel {
            prop_assert!(m.combine_rows(x).unwrap().is_zero());
        }
        let k = BitMatrix::from_rows(rows, kernel.clone()).unwrap();
        prop_assert_eq!(k.rank(), kernel.len());
    }

    #[test]
    fn returned_solutions_verify(seed in any::<u64>(), rows in 1usize..60, cols in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, rows, cols, 0.3);
        // a reachable target
        let x = BitVector::from_bits((0..rows).map(|_| rng.gen_bool(0.5)));
        let target = m.combine_rows(&x).unwrap();
        let solution = m.solve_in_span(&target).unwrap().expect("target is in the span");
        prop_assert_eq!(m.combine_rows(&solution).unwrap(), target);
        // an arbitrary target
        let t = BitVector::from_bits((0..cols).map(|_| rng.gen_bool(0.5)));
        match m.solve_in_span(&t).unwrap() {
            Some(s) => prop_assert_eq!(m.combine_rows(&s).unwrap(), t),
            None => {
                let augmented = BitMatrix::from_rows(cols, (0..rows).map(|r| m.row(r).clone()).chain([t.clone()]).collect()).unwrap();
                prop_assert_eq!(augmented.rank(), m.rank() + 1);
            }
        }
    }

    #[test]
    fn row_permutation_keeps_rank(seed in any::<u64>(), rows in 1usize..50, cols in 1usize..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, rows, cols, 0.4);
        let mut order: Vec<usize> = (0..rows).collect();
        for i in (1..rows).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let permuted = BitMatrix::from_rows(cols, order.iter().map(|&r| m.row(r).clone()).collect()).unwrap();
        prop_assert_eq!(permuted.rank(), m.rank());
    }
}
