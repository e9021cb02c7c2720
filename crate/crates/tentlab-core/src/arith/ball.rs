use super::dyadic::Dyadic;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::sync::Arc;

/// Shadows larger than this many bits (numerator plus denominator) are dropped.
pub const SHADOW_BITS: u64 = 2048;

/// Outward-rounded dyadic interval, optionally carrying the exact rational it encloses.
#[derive(Clone, Debug)]
pub struct Ball {
    lo: Dyadic,
    hi: Dyadic,
    exact: Option<Arc<BigRational>>,
    prec: u32,
}

impl Ball {
    pub fn point(d: Dyadic, prec: u32) -> Ball {
        Ball { lo: d.clone(), hi: d, exact: None, prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Ball {
        let lo = Dyadic::from_rational(q, prec, false);
        let hi = Dyadic::from_rational(q, prec, true);
        let exact = if lo == hi { None } else { Some(Arc::new(q.clone())) };
        Ball { lo, hi, exact, prec }
    }

    /// Interval `[lo, hi]` with no exact value attached.
    pub fn from_bounds(lo: Dyadic, hi: Dyadic, prec: u32) -> Ball {
        debug_assert!(lo <= hi);
        Ball { lo, hi, exact: None, prec }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value when known: a point ball or one carrying a shadow.
    pub fn exact_value(&self) -> Option<BigRational> {
        if self.is_point() {
            Some(self.lo.to_rational())
        } else {
            self.exact.as_deref().cloned()
        }
    }

    pub fn has_exact(&self) -> bool {
        self.is_point() || self.exact.is_some()
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid_f64(&self) -> f64 {
        if let Some(q) = &self.exact {
            return rational_to_f64(q);
        }
        self.lo.add(&self.hi).mul_pow2(-1).to_f64()
    }

    /// Same real at precision `prec`; only a known exact value can be tightened.
    pub fn with_precision(&self, prec: u32) -> Ball {
        match self.exact_value() {
            Some(q) if !self.is_point() => Ball::from_rational(&q, prec),
            _ => Ball { prec, ..self.clone() },
        }
    }

    fn finish(lo: Dyadic, hi: Dyadic, prec: u32, exact: impl FnOnce() -> Option<BigRational>) -> Ball {
        let lo = lo.round(prec, false);
        let hi = hi.round(prec, true);
        let exact = if lo == hi {
            None
        } else {
            exact().filter(|q| q.numer().bits() + q.denom().bits() <= SHADOW_BITS).map(Arc::new)
        };
        Ball { lo, hi, exact, prec }
    }

    fn both_exact(&self, o: &Ball) -> Option<(BigRational, BigRational)> {
        if self.has_exact() && o.has_exact() {
            Some((self.exact_value()?, o.exact_value()?))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        Ball::finish(self.lo.add(&o.lo), self.hi.add(&o.hi), prec, || {
            self.both_exact(o).map(|(a, b)| a + b)
        })
    }

    pub fn neg(&self) -> Ball {
        Ball {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            exact: self.exact.as_ref().map(|q| Arc::new(-(**q).clone())),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        let p = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        Ball::finish(lo, hi, prec, || self.both_exact(o).map(|(a, b)| a * b))
    }

    /// Quotient; `None` when the divisor interval contains zero.
    pub fn div(&self, o: &Ball) -> Option<Ball> {
        if o.contains_zero() {
            return None;
        }
        let prec = self.prec.max(o.prec);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                let l = div_round(a, b, prec, false);
                let h = div_round(a, b, prec, true);
                lo = Some(match lo {
                    Some(x) if x <= l => x,
                    _ => l,
                });
                hi = Some(match hi {
                    Some(x) if x >= h => x,
                    _ => h,
                });
            }
        }
        Some(Ball::finish(lo.unwrap(), hi.unwrap(), prec, || {
            self.both_exact(o).map(|(a, b)| a / b)
        }))
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() != Ordering::Greater && self.hi.signum() != Ordering::Less
    }

    /// Sign if decided.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.signum() == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        if self.hi.signum() == Ordering::Less {
            return Some(Ordering::Less);
        }
        self.exact_value().map(|q| q.numer().sign_cmp())
    }

    /// Order if decided.
    pub fn cmp(&self, o: &Ball) -> Option<Ordering> {
        if self.hi < o.lo {
            return Some(Ordering::Less);
        }
        if self.lo > o.hi {
            return Some(Ordering::Greater);
        }
        let (a, b) = self.both_exact(o)?;
        Some(a.cmp(&b))
    }

    /// Convex hull; keeps no exact value.
    pub fn hull(&self, o: &Ball) -> Ball {
        Ball {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            exact: None,
            prec: self.prec.max(o.prec),
        }
    }

    /// Upper bound on |x|.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

fn div_round(a: &Dyadic, b: &Dyadic, prec: u32, up: bool) -> Dyadic {
    if a.is_zero() {
        return Dyadic::zero();
    }
    // a/b = (ma/mb) 2^(ea-eb); scale ma so the quotient has prec+2 bits.
    let k = prec as i64 + 2 + b.bits() as i64 - a.bits() as i64;
    let k = k.max(0);
    let num = a.mantissa() << k as usize;
    let den = b.mantissa();
    let q = if up { num.div_ceil(den) } else { num.div_floor(den) };
    Dyadic::new(q, a.exponent() - b.exponent() - k).round(prec, up)
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    Dyadic::from_rational(q, 64, false).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn encloses_exact_values() {
        let a = Ball::from_rational(&q(1, 3), 64);
        let b = Ball::from_rational(&q(-2, 7), 64);
        for (r, v) in [
            (a.add(&b), q(1, 3) + q(-2, 7)),
            (a.mul(&b), q(1, 3) * q(-2, 7)),
            (a.div(&b).unwrap(), q(1, 3) / q(-2, 7)),
        ] {
            assert!(r.lo().to_rational() <= v && v <= r.hi().to_rational());
            assert_eq!(r.exact_value(), Some(v));
        }
    }

    #[test]
    fn exact_equality_through_shadows() {
        let a = Ball::from_rational(&q(1, 3), 64);
        let b = Ball::from_rational(&q(1, 6), 64);
        assert_eq!(a.cmp(&b.add(&b)), Some(Ordering::Equal));
        assert_eq!(a.sub(&b).sub(&b).sign(), Some(Ordering::Equal));
    }

    #[test]
    fn division_by_interval_containing_zero() {
        let a = Ball::from_rational(&q(1, 3), 64);
        let z = Ball::from_bounds(Dyadic::from_int(-1), Dyadic::from_int(1), 64);
        assert!(a.div(&z).is_none());
    }
}
