use super::Thread;
use crate::arith::{Real, SideClass};
use crate::error::{Error, Result};
use crate::outside::{extreme_element, CirclePoint};
use crate::tent::{unimodal_cmp, TentMap, Word, PC_CAP};
use serde::Serialize;
use std::cmp::Ordering;

/// Default number of trailing levels a first difference must stay clear of.
pub const GUARD_BAND: usize = 8;

/// The set ⟨x, y_1, …, y_r⟩ of threads through a fixed depth-r thread.
#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    pub thread: Thread,
}

impl Cylinder {
    pub fn new(thread: Thread) -> Cylinder {
        Cylinder { thread }
    }

    pub fn depth(&self) -> usize {
        self.thread.depth()
    }

    /// Bound 2^-r on the diameter in the thread metric.
    pub fn diameter_bound(&self) -> f64 {
        0.5f64.powi(self.depth() as i32)
    }
}

/// The depth-r truncation of the π_0-fiber over x.
#[derive(Clone, Debug, Serialize)]
pub struct FiberApprox {
    pub x: Real,
    pub depth: usize,
    pub threads: Vec<Thread>,
    pub branch_words: Vec<Word>,
    /// Set when x is post-critical and the threads were left in enumeration order.
    pub unsorted: bool,
}

impl FiberApprox {
    pub fn len(&self) -> usize {
        self.threads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threads.is_empty()
    }

    /// Minimal and maximal threads in unimodal order.
    pub fn extremes(&self) -> Option<(&Thread, &Thread)> {
        Some((self.threads.first()?, self.threads.last()?))
    }
}

fn collect(
    f: &TentMap,
    coords: &mut Vec<Real>,
    word: &mut Vec<u8>,
    r: usize,
    hit_c: &mut bool,
    out: &mut Vec<(Thread, Word)>,
) -> Result<()> {
    if word.len() == r {
        out.push((Thread::new(coords.clone()), Word::from_symbols(word.clone())));
        return Ok(());
    }
    let y = coords.last().expect("nonempty").clone();
    for (x, s) in f.preimages(&y)? {
        if f.side(&x) == SideClass::AtC {
            *hit_c = true;
        }
        coords.push(x);
        word.push(s);
        collect(f, coords, word, r, hit_c, out)?;
        coords.pop();
        word.pop();
    }
    Ok(())
}

/// All depth-r threads over x, sorted by the unimodal order of their branch words.
pub fn fiber(f: &TentMap, x: &Real, r: usize) -> Result<FiberApprox> {
    let mut out = Vec::new();
    let mut hit_c = f.side(x) == SideClass::AtC;
    collect(f, &mut vec![x.clone()], &mut Vec::with_capacity(r), r, &mut hit_c, &mut out)?;
    let unsorted = hit_c || f.pc_hit(x, x, PC_CAP).is_some();
    if !unsorted {
        out.sort_by(|p, q| unimodal_cmp(p.1.symbols(), q.1.symbols()).to_ordering());
    }
    let (threads, branch_words) = out.into_iter().unzip();
    Ok(FiberApprox { x: x.clone(), depth: r, threads, branch_words, unsorted })
}

/// The unique thread over x with branch word s.
pub fn reconstruct(f: &TentMap, x: &Real, s: &Word) -> Result<Thread> {
    let mut coords = Vec::with_capacity(s.len() + 1);
    coords.push(x.clone());
    for (i, &sym) in s.symbols().iter().enumerate() {
        let y = &coords[i];
        let next = if y.cmp_real(f.b()) == Some(Ordering::Equal) {
            f.c().clone()
        } else if sym == 0 {
            if !f.has_left_preimage(y)? {
                return Err(Error::NotRealizable { level: i });
            }
            f.left_preimage(y)
        } else {
            f.right_preimage(y)
        };
        coords.push(next);
    }
    Ok(Thread::new(coords))
}

fn same_thread(f: &TentMap, t: &Thread, e: &Thread) -> Result<bool> {
    match t.exact_eq(e) {
        Some(v) => Ok(v),
        None => Ok(t.branch_word(f)? == e.branch_word(f)?),
    }
}

/// Tail test for consecutive fiber points with the default guard band.
pub fn consecutive(f: &TentMap, t1: &Thread, t2: &Thread) -> Result<bool> {
    consecutive_with_guard(f, t1, t2, GUARD_BAND)
}

/// Whether t1 and t2 are consecutive: below their first split both follow upper extremes.
pub fn consecutive_with_guard(f: &TentMap, t1: &Thread, t2: &Thread, guard: usize) -> Result<bool> {
    if t1.x0().cmp_real(t2.x0()) != Some(Ordering::Equal) {
        return Err(Error::DomainError("threads lie over different base points".into()));
    }
    if t1.depth() != t2.depth() {
        return Err(Error::DomainError(format!("depth mismatch {} vs {}", t1.depth(), t2.depth())));
    }
    let r = t1.depth();
    let Some(k) = t1.first_difference(t2) else {
        return Ok(false);
    };
    if k + guard > r {
        return Ok(false);
    }
    let (u, v) = (t1.tail(k), t2.tail(k));
    let eu = extreme_element(f, &CirclePoint::upper(f, u.x0().clone()), r - k)?;
    let ev = extreme_element(f, &CirclePoint::upper(f, v.x0().clone()), r - k)?;
    Ok(same_thread(f, &u, &eu)? && same_thread(f, &v, &ev)?)
}

/// Sorted fiber neighbours (i, i + 1) that pass the tail test.
pub fn consecutive_pairs(f: &TentMap, fib: &FiberApprox) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for i in 0..fib.threads.len().saturating_sub(1) {
        if consecutive(f, &fib.threads[i], &fib.threads[i + 1])? {
            out.push((i, i + 1));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Parameter;

    #[test]
    fn small_fibers() {
        let f = TentMap::new(&Parameter::golden());
        let fb = fiber(&f, f.b(), 1).unwrap();
        assert_eq!(fb.len(), 1);
        assert_eq!(fb.threads[0].coords()[1].cmp_real(f.c()), Some(Ordering::Equal));
        let x = f.param().ratio(3, 4);
        assert_eq!(fiber(&f, &x, 1).unwrap().len(), 2);
        let low = f.param().ratio(3, 10);
        assert!(low.cmp_real(f.f_a()) == Some(Ordering::Less));
        assert_eq!(
            reconstruct(&f, &low, &Word::parse("0").unwrap()).unwrap_err(),
            Error::NotRealizable { level: 0 }
        );
    }

    #[test]
    fn reconstruct_round_trip_and_extremes() {
        let f = TentMap::new(&Parameter::parse("1.83").unwrap());
        let x = f.param().ratio(71, 100);
        let fib = fiber(&f, &x, 12).unwrap();
        assert!(!fib.unsorted);
        for (t, w) in fib.threads.iter().zip(&fib.branch_words) {
            let back = reconstruct(&f, &x, w).unwrap();
            assert_eq!(back.exact_eq(t), Some(true));
            assert_eq!(&t.branch_word(&f).unwrap(), w);
        }
        let (lo, hi) = fib.extremes().unwrap();
        let el = extreme_element(&f, &CirclePoint::lower(&f, x.clone()), 12).unwrap();
        let eu = extreme_element(&f, &CirclePoint::upper(&f, x.clone()), 12).unwrap();
        assert_eq!(lo.exact_eq(&el), Some(true));
        assert_eq!(hi.exact_eq(&eu), Some(true));
        for w in fib.branch_words.windows(2) {
            assert_eq!(unimodal_cmp(w[0].symbols(), w[1].symbols()).to_ordering(), Ordering::Less);
        }
    }

    #[test]
    fn consecutive_tail_test() {
        let f = TentMap::new(&Parameter::parse("1.83").unwrap());
        let x = f.param().ratio(71, 100);
        let r = 14;
        let l = extreme_element(&f, &CirclePoint::upper(&f, f.left_preimage(&x)), r - 1).unwrap();
        let rr = extreme_element(&f, &CirclePoint::upper(&f, f.right_preimage(&x)), r - 1).unwrap();
        let t1 = l.fhat(&f).unwrap();
        let t2 = rr.fhat(&f).unwrap();
        assert!(consecutive(&f, &t1, &t2).unwrap());
        assert!(!consecutive(&f, &t1, &t1).unwrap());
        let fib = fiber(&f, &x, r).unwrap();
        let pairs = consecutive_pairs(&f, &fib).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.len() < fib.len() - 1);
    }
}
