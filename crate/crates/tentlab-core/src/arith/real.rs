use super::ball::Ball;
use super::field::FieldElem;
use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// A real number: exact in Q(λ), or an outward-rounded interval.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(FieldElem),
    Ball(Ball),
}

impl Real {
    fn prec(&self) -> Option<u32> {
        match self {
            Real::Exact(_) => None,
            Real::Ball(b) => Some(b.prec()),
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Real::Exact(e) => e.to_ball(prec),
            Real::Ball(b) => b.clone(),
        }
    }

    fn binary(
        &self,
        o: &Real,
        fe: impl FnOnce(&FieldElem, &FieldElem) -> FieldElem,
        fb: impl FnOnce(&Ball, &Ball) -> Ball,
    ) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(fe(a, b)),
            (Real::Ball(a), Real::Ball(b)) => Real::Ball(fb(a, b)),
            (Real::Exact(a), Real::Ball(b)) => Real::Ball(fb(&a.to_ball(b.prec()), b)),
            (Real::Ball(a), Real::Exact(b)) => Real::Ball(fb(a, &b.to_ball(a.prec()))),
        }
    }

    pub fn div(&self, o: &Real) -> Result<Real> {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Ok(Real::Exact(a.div(b)?)),
            _ => {
                let p = self.prec().max(o.prec()).unwrap_or(256);
                let (a, b) = (self.to_ball(p), o.to_ball(p));
                a.div(&b).map(Real::Ball).ok_or(Error::PrecisionExhausted { bits: p })
            }
        }
    }

    /// Order when decided; `None` means the enclosures overlap without an exact verdict.
    pub fn cmp_real(&self, o: &Real) -> Option<Ordering> {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Some(a.cmp_value(b)),
            _ => {
                let p = self.prec().max(o.prec()).unwrap_or(256);
                self.to_ball(p).cmp(&o.to_ball(p))
            }
        }
    }

    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Real::Exact(e) => Some(e.sign()),
            Real::Ball(b) => b.sign(),
        }
    }

    /// True when the value is known exactly (an element of Q(λ) or a rational).
    pub fn is_exact(&self) -> bool {
        match self {
            Real::Exact(_) => true,
            Real::Ball(b) => b.has_exact(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(e) => e.to_f64(),
            Real::Ball(b) => b.mid_f64(),
        }
    }

    /// Width of the enclosure; zero when the value is known exactly.
    pub fn width_f64(&self) -> f64 {
        match self {
            Real::Exact(_) => 0.0,
            Real::Ball(b) if b.has_exact() => 0.0,
            Real::Ball(b) => b.width().to_f64(),
        }
    }

    /// Upper bound on |self - o| (zero only when provably equal).
    pub fn diff_bound(&self, o: &Real) -> f64 {
        let d = self - o;
        match &d {
            Real::Exact(e) => {
                if e.is_zero() {
                    0.0
                } else {
                    e.to_f64().abs()
                }
            }
            Real::Ball(b) => {
                if b.sign() == Some(Ordering::Equal) {
                    0.0
                } else {
                    let m = b.mag().to_f64();
                    m + m * 4.0 * f64::EPSILON
                }
            }
        }
    }

    /// Smallest enclosure containing both values.
    pub fn hull(&self, o: &Real) -> Real {
        if self.cmp_real(o) == Some(Ordering::Equal) {
            return self.clone();
        }
        let p = self.prec().max(o.prec()).unwrap_or(256);
        Real::Ball(self.to_ball(p).hull(&o.to_ball(p)))
    }

    pub fn with_precision(&self, prec: u32) -> Real {
        match self {
            Real::Exact(_) => self.clone(),
            Real::Ball(b) => Real::Ball(b.with_precision(prec)),
        }
    }

    pub fn as_field(&self) -> Option<&FieldElem> {
        match self {
            Real::Exact(e) => Some(e),
            Real::Ball(_) => None,
        }
    }

    pub fn lt(&self, o: &Real) -> Option<bool> {
        self.cmp_real(o).map(|c| c == Ordering::Less)
    }

    /// Convenience comparison used when ambiguity is impossible by construction.
    pub fn min_of(a: &Real, b: &Real) -> Real {
        match a.cmp_real(b) {
            Some(Ordering::Greater) => b.clone(),
            Some(_) => a.clone(),
            None => a.hull(b),
        }
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, o: &Real) -> Real {
        self.binary(o, |a, b| a.add(b), |a, b| a.add(b))
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, o: &Real) -> Real {
        self.binary(o, |a, b| a.sub(b), |a, b| a.sub(b))
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, o: &Real) -> Real {
        self.binary(o, |a, b| a.mul(b), |a, b| a.mul(b))
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(e) => Real::Exact(e.neg()),
            Real::Ball(b) => Real::Ball(b.neg()),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}
