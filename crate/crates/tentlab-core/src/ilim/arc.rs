use super::{reconstruct, Thread};
use crate::arith::Real;
use crate::error::{Error, Result};
use crate::tent::{unimodal_cmp, TentMap, Word, PC_CAP};
use serde::Serialize;
use std::cmp::Ordering;

/// A 0-flat arc: the threads over J sharing one branch word.
#[derive(Clone, Debug, Serialize)]
pub struct FlatArc {
    pub branch_word: Word,
    pub j_lo: Real,
    pub j_hi: Real,
    /// Threads over j_lo and j_hi.
    pub endpoint_threads: [Thread; 2],
    /// Index of the coordinate equal to c in each endpoint thread, when within depth.
    pub critical: [Option<usize>; 2],
}

impl FlatArc {
    pub fn depth(&self) -> usize {
        self.branch_word.len()
    }

    pub fn width(&self) -> Real {
        &self.j_hi - &self.j_lo
    }

    pub fn thread_over(&self, f: &TentMap, x: &Real) -> Result<Thread> {
        if x.cmp_real(&self.j_lo) == Some(Ordering::Less) || x.cmp_real(&self.j_hi) == Some(Ordering::Greater) {
            return Err(Error::DomainError(format!("{} lies outside the arc", x.to_f64())));
        }
        reconstruct(f, x, &self.branch_word)
    }
}

/// π_0^{-1}(K) at depth r as a bundle of 0-flat arcs over K.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroBox {
    pub j_lo: Real,
    pub j_hi: Real,
    pub depth: usize,
    pub arcs: Vec<FlatArc>,
    /// Number of post-critical points checked against K.
    pub pc_cap: usize,
}

#[derive(Clone, Copy)]
enum Bound {
    A,
    B,
    /// x_i = f(a) at this level.
    Crit(usize),
}

/// Continues a coordinate prefix downward along s.
fn extend(f: &TentMap, mut coords: Vec<Real>, s: &[u8], r: usize) -> Thread {
    while coords.len() <= r {
        let i = coords.len() - 1;
        let y = &coords[i];
        let next = if s[i] == 1 { f.right_preimage(y) } else { f.left_preimage(y) };
        coords.push(next);
    }
    coords.truncate(r + 1);
    Thread::new(coords)
}

/// The branch f_{s_k}: λy on 0, λ(1 − y) on 1.
fn branch(f: &TentMap, y: &Real, sym: u8) -> Real {
    if sym == 0 {
        f.lambda() * y
    } else {
        f.lambda() * &(f.one() - y)
    }
}

/// Coordinates x_0, …, x_i of the thread along s with x_i = f(a).
pub(crate) fn lift_fa(f: &TentMap, s: &[u8], i: usize) -> Vec<Real> {
    let mut v = vec![f.f_a().clone()];
    for k in (0..i).rev() {
        let next = branch(f, v.last().expect("nonempty"), s[k]);
        v.push(next);
    }
    v.reverse();
    v
}

fn endpoint(f: &TentMap, bound: Bound, s: &[u8], r: usize) -> (Thread, Option<usize>) {
    let (prefix, crit) = match bound {
        Bound::A => (vec![f.a().clone(), f.b().clone(), f.c().clone()], 2),
        Bound::B => (vec![f.b().clone(), f.c().clone()], 1),
        Bound::Crit(i) => {
            let mut v = lift_fa(f, s, i);
            v.extend([f.a().clone(), f.b().clone(), f.c().clone()]);
            (v, i + 3)
        }
    };
    let t = extend(f, prefix, s, r);
    (t, (crit <= r).then_some(crit))
}

fn undecided(f: &TentMap) -> Error {
    Error::PrecisionExhausted { bits: f.param().precision() }
}

/// The maximal 0-flat arc containing t.
pub fn flat_arc_through(f: &TentMap, t: &Thread) -> Result<FlatArc> {
    if let Some(i) = t.critical_index(f) {
        return Err(Error::DomainError(format!("coordinate {i} equals c")));
    }
    flat_arc_for_word(f, &t.branch_word(f)?)
}

/// The 0-flat arc of all threads following the branch word s.
pub fn flat_arc_for_word(f: &TentMap, word: &Word) -> Result<FlatArc> {
    let r = word.len();
    let s = word.symbols();
    let (mut lo, mut hi) = (f.a().clone(), f.b().clone());
    let (mut lo_src, mut hi_src) = (Bound::A, Bound::B);
    let mut sigma = 1i8;
    for i in 0..r {
        if s[i] == 0 {
            // x_0 at which x_i = f(a), following the affine branches of s.
            let v = lift_fa(f, s, i).swap_remove(0);
            if sigma > 0 {
                if v.cmp_real(&lo).ok_or_else(|| undecided(f))? == Ordering::Greater {
                    lo = v;
                    lo_src = Bound::Crit(i);
                }
            } else if v.cmp_real(&hi).ok_or_else(|| undecided(f))? == Ordering::Less {
                hi = v;
                hi_src = Bound::Crit(i);
            }
        } else {
            sigma = -sigma;
        }
    }
    if lo.cmp_real(&hi).ok_or_else(|| undecided(f))? == Ordering::Greater {
        return Err(Error::NotRealizable { level: r });
    }
    let (lt, lc) = endpoint(f, lo_src, s, r);
    let (ht, hc) = endpoint(f, hi_src, s, r);
    Ok(FlatArc { branch_word: word.clone(), j_lo: lo, j_hi: hi, endpoint_threads: [lt, ht], critical: [lc, hc] })
}

fn ordered(u: Real, v: Real) -> (Real, Real) {
    if u.cmp_real(&v) == Some(Ordering::Greater) {
        (v, u)
    } else {
        (u, v)
    }
}

fn box_dfs(
    f: &TentMap,
    ends: (Real, Real),
    word: &mut Vec<u8>,
    r: usize,
    out: &mut Vec<Word>,
) -> Result<()> {
    if word.len() == r {
        out.push(Word::from_symbols(word.clone()));
        return Ok(());
    }
    let (u, v) = ordered(ends.0.clone(), ends.1.clone());
    let lo_ok = f.has_left_preimage(&u)?;
    let hi_ok = f.has_left_preimage(&v)?;
    if lo_ok != hi_ok {
        return Err(Error::NotInY { index: word.len() + 3, cap: PC_CAP });
    }
    if lo_ok {
        word.push(0);
        box_dfs(f, (f.left_preimage(&ends.0), f.left_preimage(&ends.1)), word, r, out)?;
        word.pop();
    }
    word.push(1);
    box_dfs(f, (f.right_preimage(&ends.0), f.right_preimage(&ends.1)), word, r, out)?;
    word.pop();
    Ok(())
}

/// Decomposes π_0^{-1}(K) into 0-flat arcs at depth r, after checking K against the critical orbit.
pub fn zero_box(f: &TentMap, k_lo: &Real, k_hi: &Real, r: usize) -> Result<ZeroBox> {
    if k_lo.cmp_real(k_hi) == Some(Ordering::Greater)
        || k_lo.cmp_real(f.a()) == Some(Ordering::Less)
        || k_hi.cmp_real(f.b()) == Some(Ordering::Greater)
    {
        return Err(Error::DomainError("K must be an interval in I".into()));
    }
    if let Some(index) = f.pc_hit(k_lo, k_hi, PC_CAP) {
        return Err(Error::NotInY { index, cap: PC_CAP });
    }
    let mut words = Vec::new();
    box_dfs(f, (k_lo.clone(), k_hi.clone()), &mut Vec::with_capacity(r), r, &mut words)?;
    words.sort_by(|p, q| unimodal_cmp(p.symbols(), q.symbols()).to_ordering());
    let arcs = words
        .into_iter()
        .map(|w| {
            let lt = reconstruct(f, k_lo, &w)?;
            let ht = reconstruct(f, k_hi, &w)?;
            Ok(FlatArc { branch_word: w, j_lo: k_lo.clone(), j_hi: k_hi.clone(), endpoint_threads: [lt, ht], critical: [None, None] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroBox { j_lo: k_lo.clone(), j_hi: k_hi.clone(), depth: r, arcs, pc_cap: PC_CAP })
}
