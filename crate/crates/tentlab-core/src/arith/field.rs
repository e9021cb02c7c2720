use super::ball::Ball;
use super::dyadic::Dyadic;
use super::poly::{sign_of, Poly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Bits of the cached enclosure of the distinguished root.
const ENCL_BITS: u32 = 1024;

/// Q(λ) for a real root λ of an integer polynomial, pinned by an isolating interval.
pub struct NumberField {
    modulus: Poly,
    int_mod: Vec<BigInt>,
    lo: BigRational,
    hi: BigRational,
    bracket: (BigRational, BigRational),
    encl: (Dyadic, Dyadic),
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({} in [{}, {}])", self.modulus, self.lo, self.hi)
    }
}

impl NumberField {
    pub fn new(coeffs: &[BigInt], lo: BigRational, hi: BigRational) -> Result<Arc<NumberField>> {
        let p = Poly::from_bigints(coeffs);
        if p.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidParameter("polynomial must be non-constant".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidParameter("empty isolating interval".into()));
        }
        let p = p.squarefree();
        if p.sign_at(&lo) == Ordering::Equal || p.sign_at(&hi) == Ordering::Equal {
            return Err(Error::InvalidParameter("isolating interval endpoint is a root".into()));
        }
        let n = p.count_roots(&lo, &hi);
        if n != 1 {
            return Err(Error::InvalidParameter(format!(
                "isolating interval contains {n} roots"
            )));
        }
        let bracket = bisect(&p, &lo, &hi, ENCL_BITS + 8);
        let encl = (
            Dyadic::from_rational(&bracket.0, ENCL_BITS + 8, false),
            Dyadic::from_rational(&bracket.1, ENCL_BITS + 8, true),
        );
        let int_mod = p.primitive();
        Ok(Arc::new(NumberField { modulus: p, int_mod, lo, hi, bracket, encl }))
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.int_mod.len() - 1
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    /// Enclosure of λ with `prec`-bit endpoints.
    pub fn lambda_ball(&self, prec: u32) -> Ball {
        if prec <= ENCL_BITS {
            return Ball::from_bounds(self.encl.0.round(prec, false), self.encl.1.round(prec, true), prec);
        }
        let (l, h) = bisect(&self.modulus, &self.bracket.0, &self.bracket.1, prec + 8);
        Ball::from_bounds(
            Dyadic::from_rational(&l, prec + 8, false).round(prec, false),
            Dyadic::from_rational(&h, prec + 8, true).round(prec, true),
            prec,
        )
    }

    /// Whether λ is a root of `g`, where `g` divides the modulus.
    fn is_root_of_divisor(&self, g: &Poly) -> bool {
        g.degree().unwrap_or(0) > 0 && g.count_roots(&self.lo, &self.hi) > 0
    }

    fn reduce(&self, mut num: Vec<BigInt>, mut den: BigInt) -> (Vec<BigInt>, BigInt) {
        let d = self.degree();
        let l = &self.int_mod[d];
        while num.len() > d {
            let t = num.pop().unwrap();
            if t.is_zero() {
                continue;
            }
            let i = num.len();
            if !l.is_one() {
                for x in num.iter_mut() {
                    *x *= l;
                }
                den *= l;
            }
            for k in 0..d {
                num[i - d + k] -= &t * &self.int_mod[k];
            }
        }
        normalize(num, den)
    }
}

fn bisect(p: &Poly, lo: &BigRational, hi: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let s_lo = p.sign_at(lo);
    let (mut l, mut h) = (lo.clone(), hi.clone());
    let tol = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let two = BigRational::from_integer(2.into());
    while &h - &l > tol {
        let m = (&l + &h) / &two;
        match p.sign_at(&m) {
            Ordering::Equal => return (m.clone(), m),
            s if s == s_lo => l = m,
            _ => h = m,
        }
    }
    (l, h)
}

fn normalize(mut num: Vec<BigInt>, mut den: BigInt) -> (Vec<BigInt>, BigInt) {
    while num.last().is_some_and(|x| x.is_zero()) {
        num.pop();
    }
    if num.is_empty() {
        return (num, BigInt::one());
    }
    let g = num.iter().fold(den.clone(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        for x in num.iter_mut() {
            *x /= &g;
        }
        den /= &g;
    }
    if den.is_negative() {
        for x in num.iter_mut() {
            *x = -&*x;
        }
        den = -den;
    }
    (num, den)
}

/// Element of Q(λ): `(Σ num_i λ^i) / den` with `den > 0`.
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<NumberField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/{}", Poly::from_bigints(&self.num), self.den)
    }
}

impl FieldElem {
    pub fn from_rational(field: &Arc<NumberField>, q: &BigRational) -> FieldElem {
        let (num, den) = normalize(vec![q.numer().clone()], q.denom().clone());
        FieldElem { field: field.clone(), num, den }
    }

    pub fn generator(field: &Arc<NumberField>) -> FieldElem {
        let (num, den) = field.reduce(vec![BigInt::zero(), BigInt::one()], BigInt::one());
        FieldElem { field: field.clone(), num, den }
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &Poly) -> FieldElem {
        let l = p.coeffs().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = p.coeffs().iter().map(|x| (x * &l).to_integer()).collect();
        let (num, den) = field.reduce(num, l);
        FieldElem { field: field.clone(), num, den }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(
            self.num
                .iter()
                .map(|x| BigRational::new(x.clone(), self.den.clone()))
                .collect(),
        )
    }

    /// The value as a rational when the representation is constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    fn with(&self, num: Vec<BigInt>, den: BigInt) -> FieldElem {
        let (num, den) = self.field.reduce(num, den);
        FieldElem { field: self.field.clone(), num, den }
    }

    pub fn add(&self, o: &FieldElem) -> FieldElem {
        let n = self.num.len().max(o.num.len());
        let z = BigInt::zero();
        let num = (0..n)
            .map(|i| self.num.get(i).unwrap_or(&z) * &o.den + o.num.get(i).unwrap_or(&z) * &self.den)
            .collect();
        self.with(num, &self.den * &o.den)
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &FieldElem) -> FieldElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FieldElem) -> FieldElem {
        if self.num.is_empty() || o.num.is_empty() {
            return self.with(Vec::new(), BigInt::one());
        }
        let mut num = vec![BigInt::zero(); self.num.len() + o.num.len() - 1];
        for (i, a) in self.num.iter().enumerate() {
            for (j, b) in o.num.iter().enumerate() {
                num[i + j] += a * b;
            }
        }
        self.with(num, &self.den * &o.den)
    }

    pub fn mul_lambda(&self) -> FieldElem {
        let mut num = Vec::with_capacity(self.num.len() + 1);
        num.push(BigInt::zero());
        num.extend(self.num.iter().cloned());
        self.with(num, self.den.clone())
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let a = self.to_poly();
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = &self.field.modulus;
        let (g, s) = a.gcd_inverse(m);
        if g.degree() == Some(0) {
            return Ok(FieldElem::from_poly(&self.field, &s));
        }
        if self.field.is_root_of_divisor(&g) {
            return Err(Error::DivisionByZero);
        }
        // λ is a root of m/g, where self is a unit.
        let m2 = m.div_rem(&g).0;
        let (g2, s2) = a.gcd_inverse(&m2);
        debug_assert_eq!(g2.degree(), Some(0));
        Ok(FieldElem::from_poly(&self.field, &s2))
    }

    pub fn div(&self, o: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&o.inv()?))
    }

    fn eval_num(&self, prec: u32) -> Ball {
        let lam = self.field.lambda_ball(prec);
        let mut v = Ball::point(Dyadic::zero(), prec);
        for a in self.num.iter().rev() {
            v = v.mul(&lam).add(&Ball::point(Dyadic::new(a.clone(), 0), prec));
        }
        v
    }

    /// Enclosure at `prec` bits.
    pub fn to_ball(&self, prec: u32) -> Ball {
        if let Some(q) = self.as_rational() {
            return Ball::from_rational(&q, prec);
        }
        let extra = prec + 16 + self.den.bits() as u32;
        let v = self.eval_num(extra);
        let d = Ball::point(Dyadic::new(self.den.clone(), 0), extra);
        let q = v.div(&d).expect("positive denominator");
        Ball::from_bounds(q.lo().round(prec, false), q.hi().round(prec, true), prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ball(80).mid_f64()
    }

    /// Exact sign of the real value.
    pub fn sign(&self) -> Ordering {
        if let Some(q) = self.as_rational() {
            return sign_of(&q);
        }
        for prec in [96, 512, ENCL_BITS] {
            if let Some(s) = self.eval_num(prec).sign() {
                return s;
            }
        }
        let g = self.to_poly().gcd(&self.field.modulus);
        if self.field.is_root_of_divisor(&g) {
            return Ordering::Equal;
        }
        let mut prec = 2 * ENCL_BITS;
        loop {
            if let Some(s) = self.eval_num(prec).sign() {
                return s;
            }
            prec *= 2;
        }
    }

    pub fn cmp_value(&self, o: &FieldElem) -> Ordering {
        self.sub(o).sign()
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> Arc<NumberField> {
        let c: Vec<BigInt> = [-1, -1, 1].iter().map(|&x| BigInt::from(x)).collect();
        NumberField::new(&c, q(16, 10), q(17, 10)).unwrap()
    }

    #[test]
    fn golden_identities() {
        let k = golden();
        let l = FieldElem::generator(&k);
        let one = FieldElem::from_rational(&k, &q(1, 1));
        assert!(l.mul(&l).sub(&l).sub(&one).is_zero());
        let inv = l.inv().unwrap();
        assert!(inv.sub(&l.sub(&one)).is_zero());
        assert_eq!(l.cmp_value(&FieldElem::from_rational(&k, &q(1618, 1000))), Ordering::Greater);
        assert_eq!(l.cmp_value(&FieldElem::from_rational(&k, &q(1619, 1000))), Ordering::Less);
        assert!((l.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn reducible_modulus_still_decides() {
        // (λ-1)(λ²-λ-1): the root 1 lies outside the interval.
        let c: Vec<BigInt> = [1, 0, -2, 1].iter().map(|&x| BigInt::from(x)).collect();
        let k = NumberField::new(&c, q(16, 10), q(17, 10)).unwrap();
        let l = FieldElem::generator(&k);
        let one = FieldElem::from_rational(&k, &q(1, 1));
        let w = l.sub(&one);
        let golden_rel = l.mul(&l).sub(&l).sub(&one);
        assert!(golden_rel.is_zero());
        assert!(golden_rel.inv().is_err());
        let wi = w.inv().unwrap();
        assert!(wi.mul(&w).sub(&one).is_zero());
    }

    #[test]
    fn rejects_bad_interval() {
        let c: Vec<BigInt> = [1, 0, -2, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert!(NumberField::new(&c, q(-10, 1), q(10, 1)).is_err());
    }
}
