use crate::arith::{Real, SideClass};
use crate::error::{Error, Result};
use crate::ilim::Thread;
use crate::outside::{b_map, b_tilde_inverse, extreme_element, in_gamma, in_gamma_interior, CirclePoint, TentType};
use crate::tent::TentMap;
use serde::Serialize;
use std::cmp::Ordering;

/// A thread presented as f̂^k(e(y)).
#[derive(Clone, Debug, Serialize)]
pub struct ExtremeCert {
    pub y: CirclePoint,
    pub k: i64,
}

#[derive(Clone, Debug, Serialize)]
pub enum IdentKind {
    /// {f̂^r(e(x_u)), f̂^r(e(x̂_u))}.
    EI { r: i64, x: Real },
    EII,
    EIII,
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentClass {
    pub kind: IdentKind,
    pub members: Vec<Thread>,
}

/// Depth-r truncation of f̂^j(e(w)) for any integer j.
pub fn fhat_power_extreme(f: &TentMap, w: &CirclePoint, j: i64, r: usize) -> Result<Thread> {
    if j <= 0 {
        let mut z = w.clone();
        for _ in 0..(-j) {
            z = b_tilde_inverse(f, &z)?;
        }
        return extreme_element(f, &z, r);
    }
    let j = j as usize;
    let base = extreme_element(f, w, r.saturating_sub(j))?;
    let mut t = base;
    for _ in 0..j {
        t = t.fhat(f)?;
    }
    Ok(t.truncate(r))
}

/// Steps allowed for the forward B-orbit of y to reach γ̊.
pub const IDENT_HORIZON: usize = 4096;

fn mismatch(msg: &str, t: TentType) -> Error {
    Error::TypeMismatch(format!("{msg} is unavailable for {t:?}"))
}

/// The identification class of f̂^k(e(y)) at depth r.
pub fn identify_partner(f: &TentMap, tent_type: TentType, cert: &ExtremeCert, r: usize) -> Result<IdentClass> {
    let own = fhat_power_extreme(f, &cert.y, cert.k, r)?;
    let rational = tent_type != TentType::IrrationalOrUndecided;
    let n_return = if rational { first_return(f)? } else { None };
    let mut y = cert.y.clone();
    for s in 0..IDENT_HORIZON {
        if in_gamma_interior(f, &y)? {
            let x = y.x.clone();
            let r_shift = cert.k - s as i64;
            if f.side(&x) == SideClass::AtC {
                return Ok(IdentClass { kind: IdentKind::Trivial, members: vec![own] });
            }
            if let Some((n, z)) = &n_return {
                let zhat = f.one() - z;
                let is_z = x.cmp_real(z) == Some(Ordering::Equal);
                let is_zhat = x.cmp_real(&zhat) == Some(Ordering::Equal);
                if is_z || is_zhat {
                    if tent_type != TentType::RationalGeneral {
                        return Err(mismatch("EII", tent_type));
                    }
                    let rr = if is_zhat { r_shift } else { r_shift - *n as i64 };
                    return eii(f, rr, *n, r);
                }
            }
            let xh = f.one() - &x;
            let partner = fhat_power_extreme(f, &CirclePoint::upper(f, xh), r_shift, r)?;
            let lower_x = if x.cmp_real(f.c()) == Some(Ordering::Less) { x } else { f.one() - &x };
            return Ok(IdentClass { kind: IdentKind::EI { r: r_shift, x: lower_x }, members: vec![own, partner] });
        }
        if in_gamma(f, &y)? {
            // a or â_u: the endpoints of γ.
            if let Some((n, _)) = &n_return {
                if tent_type != TentType::RationalGeneral {
                    return Err(mismatch("EII", tent_type));
                }
                return eii(f, cert.k - s as i64 - *n as i64, *n, r);
            }
            return Ok(IdentClass { kind: IdentKind::EII, members: vec![own] });
        }
        if let Some((n, _)) = &n_return {
            if s == *n {
                let mut w = cert.y.clone();
                for _ in 0..*n {
                    w = b_map(f, &w)?;
                }
                if w.same_as(&cert.y) == Some(true) {
                    if !rational {
                        return Err(mismatch("EIII", tent_type));
                    }
                    return Ok(IdentClass { kind: IdentKind::EIII, members: eiii(f, &cert.y, *n, cert.k, r)? });
                }
            }
        }
        y = b_map(f, &y)?;
    }
    if rational {
        return Ok(IdentClass { kind: IdentKind::Trivial, members: vec![own] });
    }
    Ok(IdentClass { kind: IdentKind::EII, members: vec![own] })
}

/// First return time n and z = τ(B̃^n(a)).
fn first_return(f: &TentMap) -> Result<Option<(usize, Real)>> {
    let mut y = CirclePoint::lower(f, f.a().clone());
    for n in 1..=IDENT_HORIZON {
        y = crate::outside::b_tilde(f, &y)?;
        if in_gamma(f, &y)? {
            return Ok(Some((n, y.x)));
        }
    }
    Ok(None)
}

fn eii(f: &TentMap, rr: i64, n: usize, r: usize) -> Result<IdentClass> {
    let mut z = CirclePoint::lower(f, f.a().clone());
    for _ in 0..n {
        z = crate::outside::b_tilde(f, &z)?;
    }
    let zhat = CirclePoint::upper(f, f.one() - &z.x);
    let a = CirclePoint::lower(f, f.a().clone());
    let ahat = CirclePoint::upper(f, f.a_hat().clone());
    let members = vec![
        fhat_power_extreme(f, &zhat, rr, r)?,
        fhat_power_extreme(f, &a, rr + n as i64, r)?,
        fhat_power_extreme(f, &ahat, rr + n as i64, r)?,
    ];
    Ok(IdentClass { kind: IdentKind::EII, members })
}

fn eiii(f: &TentMap, y: &CirclePoint, n: usize, k: i64, r: usize) -> Result<Vec<Thread>> {
    (0..n as i64).map(|j| fhat_power_extreme(f, y, k + j, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;
    use crate::outside::{classify, Sheet};

    #[test]
    fn ei_pair_for_general_type() {
        let f = TentMap::new(&Parameter::parse("1.62").unwrap());
        let t = classify(&f, 100).unwrap().tent_type;
        assert_eq!(t, TentType::RationalGeneral);
        let x = f.param().ratio(41, 100);
        let cls = identify_partner(&f, t, &ExtremeCert { y: CirclePoint::upper(&f, x.clone()), k: 0 }, 10).unwrap();
        assert!(matches!(cls.kind, IdentKind::EI { r: 0, .. }));
        assert_eq!(cls.members.len(), 2);
        assert_eq!(cls.members[1].x0().cmp_real(&(f.one() - &x)), Some(Ordering::Equal));
    }

    #[test]
    fn eii_triple_for_zhat() {
        let f = TentMap::new(&Parameter::parse("1.62").unwrap());
        let (n, z) = first_return(&f).unwrap().unwrap();
        assert_eq!(n, 3);
        let zhat = CirclePoint::upper(&f, f.one() - &z);
        let cls = identify_partner(&f, TentType::RationalGeneral, &ExtremeCert { y: zhat, k: 0 }, 8).unwrap();
        assert!(matches!(cls.kind, IdentKind::EII));
        assert_eq!(cls.members.len(), 3);
        // f̂^n(e(a)) and f̂^n(e(â_u)) lie over z; the first member over ẑ.
        assert_eq!(cls.members[0].x0().cmp_real(&(f.one() - &z)), Some(Ordering::Equal));
        for m in &cls.members[1..] {
            assert_eq!(m.x0().cmp_real(&z), Some(Ordering::Equal));
        }
        assert_eq!(cls.members[1].exact_eq(&cls.members[2]), Some(false));
        assert!(identify_partner(&f, TentType::RationalNbt, &ExtremeCert { y: CirclePoint::upper(&f, f.one() - &z), k: 0 }, 8).is_err());
    }

    #[test]
    fn eiii_periodic_orbit() {
        let f = TentMap::new(&Parameter::parse("1.62").unwrap());
        // Π attracts backward orbits; read off its branch pattern, then solve for the periodic point exactly.
        let mut y = CirclePoint::lower(&f, f.param().ratio(7, 10));
        for _ in 0..60 {
            y = b_tilde_inverse(&f, &y).unwrap();
        }
        let (mut al, mut be) = (f.param().int(0), f.param().int(1));
        let mut z = y.clone();
        for _ in 0..3 {
            let left = z.sheet == Sheet::Lower && f.side(&z.x) != SideClass::Right;
            if left {
                al = f.lambda() * &al;
                be = f.lambda() * &be;
            } else {
                al = f.lambda() - &(f.lambda() * &al);
                be = &f.param().int(0) - &(f.lambda() * &be);
            }
            z = crate::outside::b_tilde(&f, &z).unwrap();
        }
        assert_eq!(z.sheet, y.sheet);
        let x = al.div(&(f.one() - &be)).unwrap();
        let p = CirclePoint::new(&f, x, y.sheet);
        let mut w = p.clone();
        for _ in 0..3 {
            w = b_map(&f, &w).unwrap();
        }
        assert_eq!(w.same_as(&p), Some(true));
        let cls = identify_partner(&f, TentType::RationalGeneral, &ExtremeCert { y: p, k: 0 }, 6).unwrap();
        assert!(matches!(cls.kind, IdentKind::EIII));
        assert_eq!(cls.members.len(), 3);
    }
}
