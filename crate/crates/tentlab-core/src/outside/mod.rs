//! The circle S of two glued copies of I, the outside maps B̃ and B, extreme elements and height.

mod height;
mod sweep;

pub use height::{
    classify, height, rotation_bracket, Classification, HeightKind, HeightResult, TentType, DEFAULT_HEIGHT_TOL_BITS,
};
pub use sweep::{sweep, sweep_values, SweepRow};

use crate::arith::{Real, SideClass};
use crate::error::{Error, Result};
use crate::ilim::Thread;
use crate::tent::TentMap;
use serde::Serialize;
use std::cmp::Ordering;

/// Which copy of I a circle point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sheet {
    Lower,
    Upper,
}

/// A point x_ℓ or x_u of S; a and b are stored on the lower copy.
#[derive(Clone, Debug, Serialize)]
pub struct CirclePoint {
    pub x: Real,
    pub sheet: Sheet,
}

impl CirclePoint {
    pub fn new(f: &TentMap, x: Real, sheet: Sheet) -> CirclePoint {
        let glued = sheet == Sheet::Upper
            && (x.cmp_real(f.a()) == Some(Ordering::Equal) || x.cmp_real(f.b()) == Some(Ordering::Equal));
        CirclePoint { x, sheet: if glued { Sheet::Lower } else { sheet } }
    }

    pub fn lower(f: &TentMap, x: Real) -> CirclePoint {
        CirclePoint::new(f, x, Sheet::Lower)
    }

    pub fn upper(f: &TentMap, x: Real) -> CirclePoint {
        CirclePoint::new(f, x, Sheet::Upper)
    }

    pub fn is_upper(&self) -> bool {
        self.sheet == Sheet::Upper
    }

    /// Provable equality as points of S.
    pub fn same_as(&self, o: &CirclePoint) -> Option<bool> {
        let eq = self.x.cmp_real(&o.x)? == Ordering::Equal;
        Some(eq && self.sheet == o.sheet)
    }

    /// Arclength chart t ∈ [0, 1): a at 0, the lower copy up to b at 1/2, the upper copy back to a.
    pub fn chart(&self, f: &TentMap) -> f64 {
        let (a, b, x) = (f.a().to_f64(), f.b().to_f64(), self.x.to_f64());
        match self.sheet {
            Sheet::Lower => (x - a) / (2.0 * (b - a)),
            Sheet::Upper => 0.5 + (b - x) / (2.0 * (b - a)),
        }
    }
}

/// A point of the universal cover of S.
#[derive(Clone, Debug, Serialize)]
pub struct LiftPoint {
    pub base: CirclePoint,
    pub winding: i64,
}

impl LiftPoint {
    pub fn value(&self, f: &TentMap) -> f64 {
        self.winding as f64 + self.base.chart(f)
    }
}

/// τ: S → I.
pub fn tau(y: &CirclePoint) -> &Real {
    &y.x
}

fn undecided(f: &TentMap) -> Error {
    Error::PrecisionExhausted { bits: f.param().precision() }
}

/// Whether y lies in γ = [â_u, a].
pub fn in_gamma(f: &TentMap, y: &CirclePoint) -> Result<bool> {
    match y.sheet {
        Sheet::Lower => match y.x.cmp_real(f.a()) {
            Some(o) => Ok(o == Ordering::Equal),
            None => Err(undecided(f)),
        },
        Sheet::Upper => match y.x.cmp_real(f.a_hat()) {
            Some(Ordering::Greater) => Ok(false),
            Some(_) => Ok(true),
            None => Err(undecided(f)),
        },
    }
}

/// Whether y lies in the open plateau γ̊ = (â_u, a).
pub fn in_gamma_interior(f: &TentMap, y: &CirclePoint) -> Result<bool> {
    if y.sheet == Sheet::Lower {
        return Ok(false);
    }
    match (y.x.cmp_real(f.a()), y.x.cmp_real(f.a_hat())) {
        (Some(Ordering::Greater), Some(Ordering::Less)) => Ok(true),
        (Some(_), Some(_)) => Ok(false),
        _ => Err(undecided(f)),
    }
}

/// B̃ together with the number of times the step wraps past a.
pub fn b_tilde_step(f: &TentMap, y: &CirclePoint) -> Result<(CirclePoint, i64)> {
    match y.sheet {
        Sheet::Lower => match f.side(&y.x) {
            SideClass::Left | SideClass::AtC => Ok((CirclePoint::lower(f, f.eval(&y.x)?), 0)),
            SideClass::Right => {
                let img = CirclePoint::upper(f, f.eval(&y.x)?);
                // b maps to a_u ≡ a_ℓ, completing a turn.
                let wrap = if img.sheet == Sheet::Lower && img.x.cmp_real(f.a()) == Some(Ordering::Equal) { 1 } else { 0 };
                Ok((img, wrap))
            }
            SideClass::Uncertain => Err(undecided(f)),
        },
        Sheet::Upper => match y.x.cmp_real(f.a_hat()) {
            Some(Ordering::Greater) => Ok((CirclePoint::lower(f, f.eval(&y.x)?), 1)),
            Some(_) => Err(Error::DomainError("B̃ is undefined on [â_u, a)".into())),
            None => Err(undecided(f)),
        },
    }
}

pub fn b_tilde(f: &TentMap, y: &CirclePoint) -> Result<CirclePoint> {
    b_tilde_step(f, y).map(|(p, _)| p)
}

/// B with its wrap count: constant f(a)_ℓ on γ.
pub fn b_step(f: &TentMap, y: &CirclePoint) -> Result<(CirclePoint, i64)> {
    if in_gamma(f, y)? {
        let wrap = if y.sheet == Sheet::Upper { 1 } else { 0 };
        return Ok((CirclePoint::lower(f, f.f_a().clone()), wrap));
    }
    b_tilde_step(f, y)
}

pub fn b_map(f: &TentMap, y: &CirclePoint) -> Result<CirclePoint> {
    b_step(f, y).map(|(p, _)| p)
}

pub fn b_tilde_inverse(f: &TentMap, y: &CirclePoint) -> Result<CirclePoint> {
    match y.sheet {
        Sheet::Upper => Ok(CirclePoint::lower(f, f.right_preimage(&y.x))),
        Sheet::Lower => {
            if y.x.cmp_real(f.b()) == Some(Ordering::Equal) {
                return Ok(CirclePoint::lower(f, f.c().clone()));
            }
            if f.has_left_preimage(&y.x)? {
                Ok(CirclePoint::lower(f, f.left_preimage(&y.x)))
            } else {
                Ok(CirclePoint::upper(f, f.right_preimage(&y.x)))
            }
        }
    }
}

/// Depth-r truncation of e(y) = ⟨τ(y), τ(B̃⁻¹y), τ(B̃⁻²y), ...⟩.
pub fn extreme_element(f: &TentMap, y: &CirclePoint, r: usize) -> Result<Thread> {
    let mut coords = Vec::with_capacity(r + 1);
    let mut z = y.clone();
    coords.push(z.x.clone());
    for _ in 0..r {
        z = b_tilde_inverse(f, &z)?;
        coords.push(z.x.clone());
    }
    Ok(Thread::new(coords))
}

/// Circle points B̃⁻ʲ(y), j = 0..=r.
pub fn backward_orbit(f: &TentMap, y: &CirclePoint, r: usize) -> Result<Vec<CirclePoint>> {
    let mut out = Vec::with_capacity(r + 1);
    let mut z = y.clone();
    out.push(z.clone());
    for _ in 0..r {
        z = b_tilde_inverse(f, &z)?;
        out.push(z.clone());
    }
    Ok(out)
}
