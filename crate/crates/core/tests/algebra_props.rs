//! Structural properties of the algebra, checked against an independent
//! sign oracle that multiplies blades by literally rewriting generator
//! words one adjacent swap at a time.

use cliffordlab::{BladeIndex, Multivector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multiplies two blades by concatenating their generator words and
/// normalizing with explicit adjacent transpositions (each flips the
/// sign) and cancellations e_j e_j = -1. No bit tricks anywhere.
fn word_oracle(a: BladeIndex, b: BladeIndex, n: usize) -> (f64, BladeIndex) {
    let mut word: Vec<usize> = (0..n)
        .filter(|j| a.0 & (1 << j) != 0)
        .chain((0..n).filter(|j| b.0 & (1 << j) != 0))
        .collect();
    let mut sign = 1.0;
    loop {
        // cancel the first adjacent equal pair, if any
        if let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| word[i] == word[i + 1]) {
            word.drain(i..i + 2);
            sign = -sign;
            continue;
        }
        // otherwise swap the first descent
        if let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| word[i] > word[i + 1]) {
            word.swap(i, i + 1);
            sign = -sign;
            continue;
        }
        break;
    }
    let mut mask = 0u32;
    for j in word {
        mask |= 1 << j;
    }
    (sign, BladeIndex(mask))
}

#[test]
fn blade_products_match_word_oracle() {
    for n in 1..=6usize {
        let blades = 1u32 << n;
        for a in 0..blades {
            for b in 0..blades {
                let pa = Multivector::basis_blade(n, BladeIndex(a)).unwrap();
                let pb = Multivector::basis_blade(n, BladeIndex(b)).unwrap();
                let product = &pa * &pb;
                let (sign, blade) = word_oracle(BladeIndex(a), BladeIndex(b), n);
                for idx in 0..blades {
                    let expect = if BladeIndex(idx) == blade { sign } else { 0.0 };
                    assert_eq!(
                        product.coeff(BladeIndex(idx)),
                        expect,
                        "blade product e_{{{a:b}}} e_{{{b:b}}} disagrees with word oracle at n={n}"
                    );
                }
            }
        }
    }
}

fn small_multivector(n: usize, rng: &mut ChaCha8Rng) -> Multivector {
    let mut m = Multivector::zero(n);
    for idx in 0..(1u32 << n) {
        m.set_coeff(BladeIndex(idx), rng.gen_range(-4i32..=4) as f64);
    }
    m
}

proptest! {
    #[test]
    fn associativity_exact_on_small_integers(seed in 0u64..2000, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = small_multivector(n, &mut rng);
        let b = small_multivector(n, &mut rng);
        let c = small_multivector(n, &mut rng);
        // products of small integers stay exactly representable
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn distributivity_exact_on_small_integers(seed in 0u64..2000, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = small_multivector(n, &mut rng);
        let b = small_multivector(n, &mut rng);
        let c = small_multivector(n, &mut rng);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }
}

#[test]
fn n1_is_the_complex_numbers() {
    // 1 <-> 1, e1 <-> i
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10_000 {
        let (a, b, c, d): (f64, f64, f64, f64) = (
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let mut p = Multivector::scalar(1, a);
        p.set_coeff(BladeIndex(1), b);
        let mut q = Multivector::scalar(1, c);
        q.set_coeff(BladeIndex(1), d);
        let prod = &p * &q;
        // (a + bi)(c + di) = (ac - bd) + (ad + bc) i
        assert_eq!(prod.coeff(BladeIndex(0)), a * c - b * d);
        assert_eq!(prod.coeff(BladeIndex(1)), a * d + b * c);
    }
}

fn quat_mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    // (w, x, y, z) Hamilton product
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

#[test]
fn n2_is_the_quaternions() {
    // 1 <-> 1, e1 <-> i, e2 <-> j, e1e2 <-> k
    let to_mv = |q: [f64; 4]| {
        let mut m = Multivector::scalar(2, q[0]);
        m.set_coeff(BladeIndex(0b01), q[1]);
        m.set_coeff(BladeIndex(0b10), q[2]);
        m.set_coeff(BladeIndex(0b11), q[3]);
        m
    };
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..10_000 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let lhs = &to_mv(p) * &to_mv(q);
        let rhs = to_mv(quat_mul(p, q));
        assert_eq!(lhs, rhs, "quaternion isomorphism broke for {p:?} * {q:?}");
    }
}

#[test]
fn basis_vectors_anticommute_and_square_to_minus_one() {
    for n in 1..=6usize {
        for i in 0..n {
            let ei = Multivector::basis_vector(n, i);
            assert_eq!(&ei * &ei, Multivector::scalar(n, -1.0));
            for j in 0..i {
                let ej = Multivector::basis_vector(n, j);
                let anti = &(&ei * &ej) + &(&ej * &ei);
                assert!(anti.is_zero(), "e{i} e{j} + e{j} e{i} != 0 at n={n}");
            }
        }
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let a = Multivector::one(2);
    let b = Multivector::one(3);
    assert!(a.checked_mul(&b).is_err());
    assert!(a.checked_add(&b).is_err());
}
