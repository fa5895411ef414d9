use ncf_core::measures::RandomSource;
use ncf_core::{Error, ExactRational, PrecisionReal, RealExpr};
use num_bigint::BigInt;
use proptest::prelude::*;

fn frac(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n.into(), d.into()).unwrap()
}

/// `r == n/d` by cross-multiplication.
fn equals(r: &ExactRational, n: BigInt, d: BigInt) -> bool {
    r.numer() * &d == n * r.denom()
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-(1i64 << 31)..-1, 1..(1i64 << 31)]
}

proptest! {
    #[test]
    fn rational_field_ops(a in -(1i64 << 31)..(1i64 << 31), b in nonzero(), c in -(1i64 << 31)..(1i64 << 31), d in nonzero()) {
        let (x, y) = (frac(a, b), frac(c, d));
        let big = |v: i64| BigInt::from(v);
        prop_assert!(equals(&(&x + &y), big(a) * big(d) + big(c) * big(b), big(b) * big(d)));
        prop_assert!(equals(&(&x - &y), big(a) * big(d) - big(c) * big(b), big(b) * big(d)));
        prop_assert!(equals(&(&x * &y), big(a) * big(c), big(b) * big(d)));
        if c != 0 {
            prop_assert!(equals(&x.checked_div(&y).unwrap(), big(a) * big(d), big(b) * big(c)));
        } else {
            prop_assert_eq!(x.checked_div(&y), Err(Error::DivisionByZero));
        }
        // Canonical form: positive denominator, coprime parts.
        let s = &x + &y;
        prop_assert!(s.denom() > &BigInt::from(0));
        prop_assert_eq!(num_integer::Integer::gcd(s.numer(), s.denom()) > BigInt::from(1), false);
    }

    #[test]
    fn rational_floor_ceil(a in any::<i64>(), b in nonzero()) {
        let x = frac(a, b);
        let f = ExactRational::from(x.floor());
        prop_assert!(f <= x && x < &f + &ExactRational::one());
        let c = ExactRational::from(x.ceil());
        prop_assert!(c >= x && x > &c - &ExactRational::one());
    }

    #[test]
    fn rational_text_roundtrip(a in any::<i64>(), b in nonzero()) {
        let x = frac(a, b);
        prop_assert_eq!(x.to_string().parse::<ExactRational>().unwrap(), x);
    }
}

#[test]
fn enclosures_contain_exact_results() {
    let mut rng = RandomSource::new(2024);
    let draw = |rng: &mut RandomSource| {
        let n = (rng.next_u64() >> 1) as i64 - (1i64 << 62);
        let d = (rng.next_u64() >> 2) as i64 + 1;
        frac(n, d)
    };
    for k in 0..10_000 {
        let prec = 64 + (k % 4) as u32 * 64;
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let (ex, ey) = (PrecisionReal::from_rational(&x, prec), PrecisionReal::from_rational(&y, prec));
        assert!(ex.add(&ey).contains(&(&x + &y)));
        assert!(ex.sub(&ey).contains(&(&x - &y)));
        assert!(ex.mul(&ey).contains(&(&x * &y)));
        if !ey.contains_zero() {
            assert!(ex.div(&ey).unwrap().contains(&x.checked_div(&y).unwrap()));
        }
        let ax = x.abs();
        let r = PrecisionReal::from_rational(&ax, prec).sqrt().unwrap();
        assert!(r.lo().pow(2) <= ax && ax <= r.hi().pow(2));
        match ex.floor_safe() {
            Ok(f) => {
                let f = ExactRational::from(f);
                assert!(f <= x && x < &f + &ExactRational::one());
            }
            Err(e) => assert_eq!(e, Error::AmbiguousFloor),
        }
        // Width shrinks with precision: 2^-prec relative, roughly.
        let w = ex.mul(&ey).width().to_f64();
        assert!(w <= ((&x * &y).abs().to_f64() + 1.0) * 2f64.powi(4 - prec as i32));
    }
}

#[test]
fn expression_enclosures() {
    for (text, value) in [
        ("(sqrt(15)-3)/2", 0.436_491_673_103_708_4),
        ("sqrt(2)", std::f64::consts::SQRT_2),
        ("1/3 + sqrt(4)", 2.0 + 1.0 / 3.0),
        ("-(sqrt(5)-1)/(-2)", 0.618_033_988_749_894_8),
    ] {
        let e: RealExpr = text.parse().unwrap();
        for prec in [64, 128, 512] {
            let enc = e.enclose(prec).unwrap();
            assert!((enc.to_f64() - value).abs() < 1e-15, "{text}");
            assert!(enc.width().to_f64() < 2f64.powi(8 - prec as i32));
        }
        let again: RealExpr = e.to_string().parse().unwrap();
        assert_eq!(again.enclose(128).unwrap(), e.enclose(128).unwrap());
    }
    assert_eq!("sqrt(-1)".parse::<RealExpr>().unwrap().enclose(64), Err(Error::NegativeSqrt));
    assert!("sqrt(2".parse::<RealExpr>().is_err());
}
