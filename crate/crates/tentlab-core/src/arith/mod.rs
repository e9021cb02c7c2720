//! Numeric backends: exact arithmetic in Q(λ) and outward-rounded dyadic intervals.

mod ball;
mod dyadic;
mod field;
mod param;
mod poly;
mod real;

pub use ball::Ball;
pub use dyadic::{ldexp, Dyadic};
pub use field::{FieldElem, NumberField};
pub use param::{parse_decimal, Backend, Parameter, DEFAULT_CAP, DEFAULT_PRECISION};
pub use poly::Poly;
pub use real::Real;

use serde::Serialize;
use std::cmp::Ordering;

/// Position of a point relative to the turning point c = 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SideClass {
    Left,
    Right,
    AtC,
    Uncertain,
}

/// Side of `x` relative to c; an exactly known input is retried at the precision cap.
pub fn classify_side(x: &Real, p: &Parameter) -> SideClass {
    let c = p.ratio(1, 2);
    let verdict = x.cmp_real(&c).or_else(|| {
        if x.is_exact() {
            x.with_precision(p.cap()).cmp_real(&c)
        } else {
            None
        }
    });
    match verdict {
        Some(Ordering::Less) => SideClass::Left,
        Some(Ordering::Greater) => SideClass::Right,
        Some(Ordering::Equal) => SideClass::AtC,
        None => SideClass::Uncertain,
    }
}
