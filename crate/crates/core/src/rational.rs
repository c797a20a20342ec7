//! Small helpers around arbitrary-precision integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

pub fn floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - rat_int(&floor(r))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn to_i64(v: &Int) -> i64 {
    v.to_i64().expect("integer does not fit in 64 bits")
}

/// Best rational approximation of `x` whose denominator stays below `max_den`,
/// obtained from the continued-fraction expansion.
pub fn approx_f64(x: f64, max_den: i64) -> Rat {
    assert!(x.is_finite(), "cannot approximate a non-finite value");
    let neg = x < 0.0;
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (int(0), int(1), int(1), int(0));
    for _ in 0..64 {
        let a = y.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > int(max_den) {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let f = y - a;
        if f < 1e-15 {
            break;
        }
        y = 1.0 / f;
        if !y.is_finite() {
            break;
        }
    }
    if q1.is_zero() {
        return rat_int(&int(x.round() as i64));
    }
    let r = BigRational::new(p1, q1);
    if neg {
        -r
    } else {
        r
    }
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divide by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_slice(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Turn a rational vector into the primitive integer vector on the same ray.
pub fn primitive_from_rats(v: &[Rat]) -> Vec<i64> {
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<i64> = v.iter().map(|x| to_i64(&(x * rat_int(&l)).to_integer())).collect();
    primitive(&ints)
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_i64(a: &[i64], b: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if *x != 0 {
            s += y * rat(*x, 1);
        }
    }
    s
}

pub fn is_integral(r: &Rat) -> bool {
    r.is_integer()
}

pub fn abs_rat(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approximations_recover_short_decimals() {
        assert_eq!(approx_f64(-0.3, 1_000_000), rat(-3, 10));
        assert_eq!(approx_f64(0.125, 1_000_000), rat(1, 8));
        assert_eq!(approx_f64(2.0, 1_000_000), rat(2, 1));
    }

    #[test]
    fn floor_and_frac_of_negative_values() {
        assert_eq!(floor(&rat(-1, 2)), int(-1));
        assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[4, -6, 0]), vec![2, -3, 0]);
        assert_eq!(primitive_from_rats(&[rat(1, 2), rat(-1, 3)]), vec![3, -2]);
    }
}
