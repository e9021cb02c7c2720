use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// `m * 2^e`, kept with an odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        let mut d = Dyadic { m, e };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int(i: i64) -> Self {
        Dyadic::new(BigInt::from(i), 0)
    }

    fn normalize(&mut self) {
        if self.m.is_zero() {
            self.e = 0;
            return;
        }
        if let Some(tz) = self.m.trailing_zeros() {
            if tz > 0 {
                self.m >>= tz;
                self.e += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.m.sign_ord()
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.m.bits()
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { m: -&self.m, e: self.e }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.m * &o.m, self.e + o.e)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { m: self.m.clone(), e: self.e + k }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { m: self.m.abs(), e: self.e }
    }

    /// Round to at most `prec` significant bits, toward +inf if `up`, else toward -inf.
    pub fn round(&self, prec: u32, up: bool) -> Dyadic {
        let bits = self.m.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = (bits - prec as u64) as usize;
        let m = if up { -((-&self.m) >> s) } else { &self.m >> s };
        Dyadic::new(m, self.e + s as i64)
    }

    /// Nearest dyadic below (or above, if `up`) the rational `q`, with about `prec` bits.
    pub fn from_rational(q: &BigRational, prec: u32, up: bool) -> Dyadic {
        let n = q.numer();
        let d = q.denom();
        if n.is_zero() {
            return Dyadic::zero();
        }
        if let Some(k) = pow2_log(d) {
            return Dyadic::new(n.clone(), -(k as i64)).round(prec, up);
        }
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let (num, den) = if k >= 0 {
            (n << k as usize, d.clone())
        } else {
            (n.clone(), d << (-k) as usize)
        };
        let t = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
        Dyadic::new(t, -k).round(prec, up)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Dyadic {
        assert!(x.is_finite(), "non-finite value");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i64 << 52), exp - 1075)
        };
        Dyadic::new(BigInt::from(sign * m), e)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.e >= 0 {
            BigRational::from_integer(&self.m << self.e as usize)
        } else {
            BigRational::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    /// Conversion to double, truncating the mantissa to 64 bits.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (&self.m >> s as usize, self.e + s as i64)
        } else {
            (self.m.clone(), self.e)
        };
        ldexp(m.to_f64().unwrap_or(0.0), e)
    }

    /// Floor of log2 |x|, for non-zero values.
    pub fn log2_floor(&self) -> i64 {
        self.m.bits() as i64 - 1 + self.e
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == Ordering::Equal {
            return sa.cmp(&sb);
        }
        self.sub(other).signum()
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

fn pow2_log(d: &BigInt) -> Option<u64> {
    let tz = d.trailing_zeros()?;
    if d.bits() == tz + 1 {
        Some(tz)
    } else {
        None
    }
}

/// `x * 2^e` without overflow in the intermediate power.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_rounds_toward_negative_infinity() {
        let m = BigInt::from(-5);
        assert_eq!(&m >> 1usize, BigInt::from(-3));
    }

    #[test]
    fn rational_rounding_brackets() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let lo = Dyadic::from_rational(&q, 64, false);
        let hi = Dyadic::from_rational(&q, 64, true);
        assert!(lo.to_rational() < q && q < hi.to_rational());
        let w = hi.sub(&lo);
        assert!(w.log2_floor() <= -64);
        let nq = -q.clone();
        let nlo = Dyadic::from_rational(&nq, 64, false);
        assert!(nlo.to_rational() < nq);
    }

    #[test]
    fn f64_round_trip() {
        for &x in &[0.1, -2.5, 1e-300, 3.0e200, 0.61] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn ordering() {
        let a = Dyadic::from_f64(0.75);
        let b = Dyadic::from_f64(0.5);
        assert!(a > b);
        assert!(b.neg() > a.neg());
        assert_eq!(a.round(1, true), Dyadic::from_int(1));
        assert_eq!(a.round(1, false), Dyadic::from_f64(0.5));
    }
}
