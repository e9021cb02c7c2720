use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Dense univariate polynomial over Q, coefficients constant-first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut c: Vec<BigRational>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Poly {
        Poly::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn constant(q: BigRational) -> Poly {
        Poly::new(vec![q])
    }

    pub fn x() -> Poly {
        Poly::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.c.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        Poly::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        Poly::new(r)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::from_ints(&[1]);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut r = Poly::zero();
        for a in self.c.iter().rev() {
            r = r.mul(g).add(&Poly::constant(a.clone()));
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let t = &r[i] / &lead;
            for (j, dc) in d.c.iter().enumerate() {
                r[i - dd + j] -= &t * dc;
            }
            q[i - dd] = t;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `s*self ≡ g (mod m)`, g the monic gcd.
    pub fn gcd_inverse(&self, m: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Poly::zero(), Poly::from_ints(&[1]));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let l = r0.lead().cloned().unwrap_or_else(BigRational::one);
        (r0.scale(&l.recip()), s0.scale(&l.recip()).rem(m))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut r = BigRational::zero();
        for a in self.c.iter().rev() {
            r = r * x + a;
        }
        r
    }

    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        sign_of(&self.eval(x))
    }

    /// Integer primitive multiple with positive leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut v: Vec<BigInt> = self.c.iter().map(|x| (x * &l).to_integer()).collect();
        let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() {
            for x in v.iter_mut() {
                *x /= &g;
            }
        }
        if v.last().unwrap().is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
        v
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            seq.push(r);
        }
        seq.pop();
        seq
    }

    /// Distinct real roots in the half-open interval (lo, hi].
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = self.squarefree().sturm_sequence();
        let v = |x: &BigRational| sign_changes(seq.iter().map(|p| p.sign_at(x)));
        v(lo).saturating_sub(v(hi))
    }
}

fn sign_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut n = 0;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

pub(crate) fn sign_of(q: &BigRational) -> Ordering {
    if q.is_zero() {
        Ordering::Equal
    } else if q.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "({a})x")?,
                _ => write!(f, "({a})x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn factor_of_cubic() {
        let p = Poly::from_ints(&[1, 0, -2, 1]);
        let g = Poly::from_ints(&[-1, -1, 1]);
        let (quo, r) = p.div_rem(&g);
        assert!(r.is_zero());
        assert_eq!(quo, Poly::from_ints(&[-1, 1]));
        assert_eq!(p.gcd(&g), g);
    }

    #[test]
    fn sturm_counts() {
        let p = Poly::from_ints(&[1, 0, -2, 1]);
        assert_eq!(p.count_roots(&q(-10, 1), &q(10, 1)), 3);
        assert_eq!(p.count_roots(&q(16, 10), &q(17, 10)), 1);
        assert_eq!(p.count_roots(&q(1, 2), &q(1, 1)), 1);
        assert_eq!(p.count_roots(&q(1, 1), &q(3, 2)), 0);
        let sq = Poly::from_ints(&[-1, 1]).pow(3);
        assert_eq!(sq.count_roots(&q(0, 1), &q(2, 1)), 1);
    }

    #[test]
    fn modular_inverse() {
        let m = Poly::from_ints(&[-1, -1, 1]);
        let a = Poly::from_ints(&[2, 3]);
        let (g, s) = a.gcd_inverse(&m);
        assert_eq!(g, Poly::from_ints(&[1]));
        assert_eq!(a.mul(&s).rem(&m), Poly::from_ints(&[1]));
    }

    #[test]
    fn composition() {
        let p = Poly::from_ints(&[0, 0, 1]);
        let g = Poly::from_ints(&[1, 1]);
        assert_eq!(p.compose(&g), Poly::from_ints(&[1, 2, 1]));
    }
}
