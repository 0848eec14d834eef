use num_bigint::BigInt;
use num_rational::BigRational;
use quadtower::multiquad::{mq_sqrt, MqElement, MultiquadField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const POOL: [u64; 12] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19];

fn random_field(rng: &mut StdRng) -> MultiquadField {
    loop {
        let n = rng.gen_range(1..=3);
        let gens: Vec<u64> = (0..n).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect();
        if let Ok(k) = MultiquadField::new(&gens) {
            return k;
        }
    }
}

#[test]
fn squares_of_random_elements_are_recognised() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let k = random_field(&mut rng);
        let beta = k.radicands().iter().fold(MqElement::zero(), |acc, &m| {
            let c = BigRational::new(BigInt::from(rng.gen_range(-100i64..=100)), BigInt::from(rng.gen_range(1i64..=100)));
            &acc + &MqElement::sqrt_of(m).scale(&c)
        });
        if beta.is_zero() {
            continue;
        }
        let root = mq_sqrt(&(&beta * &beta), &k).unwrap().expect("square not recognised");
        assert!(root == beta || root == -&beta, "{beta} in {k}");
    }
}

#[test]
fn non_squares_are_rejected() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let k = random_field(&mut rng);
        // a square times a prime not in k is never a square
        let beta = k.radicands().iter().fold(MqElement::integer(1), |acc, &m| {
            &acc + &MqElement::sqrt_of(m).scale_int(&BigInt::from(rng.gen_range(-20i64..=20)))
        });
        if beta.is_zero() {
            continue;
        }
        let a = (&beta * &beta).scale_int(&BigInt::from(23));
        assert_eq!(mq_sqrt(&a, &k).unwrap(), None);
    }
}
