use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use quadtower::arithmetic::{hilbert_support, hilbert_symbol, Place};

fn rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..=1000, 1i64..=1000)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn places(a: &BigRational, b: &BigRational, c: &BigRational) -> Vec<Place> {
    let mut v = hilbert_support(a, b).unwrap();
    v.extend(hilbert_support(a, c).unwrap());
    v.sort_by_key(|p| p.to_string());
    v.dedup();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn product_formula(a in rational(), b in rational()) {
        let prod: i32 = hilbert_support(&a, &b)
            .unwrap()
            .iter()
            .map(|v| i32::from(hilbert_symbol(&a, &b, v).unwrap()))
            .product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn symmetric_and_bimultiplicative(a in rational(), b in rational(), c in rational()) {
        for v in places(&a, &b, &c) {
            let ab = hilbert_symbol(&a, &b, &v).unwrap();
            prop_assert_eq!(ab, hilbert_symbol(&b, &a, &v).unwrap());
            let ac = hilbert_symbol(&a, &c, &v).unwrap();
            prop_assert_eq!(hilbert_symbol(&a, &(&b * &c), &v).unwrap(), ab * ac);
        }
    }

    #[test]
    fn norm_forms_are_trivial(a in rational(), x in rational()) {
        // (a, x^2 - a y^2)_v = 1 with y = 1 whenever x^2 != a
        let b = &x * &x - &a;
        prop_assume!(b != BigRational::from_integer(0.into()));
        for v in hilbert_support(&a, &b).unwrap() {
            prop_assert_eq!(hilbert_symbol(&a, &b, &v).unwrap(), 1);
        }
    }
}
