use crate::arith::{Real, SideClass};
use crate::error::{Error, Result};
use crate::tent::{TentMap, Word};
use serde::Serialize;
use std::cmp::Ordering;

/// Finite backward orbit ⟨x_0, x_1, ..., x_r⟩ with f(x_{i+1}) = x_i, shallowest first.
#[derive(Clone, Debug, Serialize)]
pub struct Thread {
    coords: Vec<Real>,
}

impl Thread {
    pub fn new(coords: Vec<Real>) -> Thread {
        assert!(!coords.is_empty(), "a thread has at least one coordinate");
        Thread { coords }
    }

    pub fn point(x: Real) -> Thread {
        Thread { coords: vec![x] }
    }

    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[Real] {
        &self.coords
    }

    pub fn x0(&self) -> &Real {
        &self.coords[0]
    }

    pub fn deepest(&self) -> &Real {
        self.coords.last().unwrap()
    }

    pub fn get(&self, i: usize) -> Option<&Real> {
        self.coords.get(i)
    }

    pub fn push(&mut self, x: Real) {
        self.coords.push(x);
    }

    pub fn truncate(&self, r: usize) -> Thread {
        Thread { coords: self.coords[..(r + 1).min(self.coords.len())].to_vec() }
    }

    /// Coordinates from level k on.
    pub fn tail(&self, k: usize) -> Thread {
        Thread { coords: self.coords[k..].to_vec() }
    }

    /// f̂: prepend f(x_0).
    pub fn fhat(&self, f: &TentMap) -> Result<Thread> {
        let mut coords = Vec::with_capacity(self.coords.len() + 1);
        coords.push(f.eval(self.x0())?);
        coords.extend(self.coords.iter().cloned());
        Ok(Thread { coords })
    }

    /// f̂⁻¹: drop the first coordinate.
    pub fn fhat_inverse(&self) -> Result<Thread> {
        if self.depth() == 0 {
            return Err(Error::DomainError("f̂⁻¹ of a depth-0 thread".into()));
        }
        Ok(Thread { coords: self.coords[1..].to_vec() })
    }

    /// Symbol i is the side of x_{i+1}; a coordinate equal to c reads as 1.
    pub fn branch_word(&self, f: &TentMap) -> Result<Word> {
        let mut w = Word::new();
        for x in &self.coords[1..] {
            match f.side(x) {
                SideClass::Left => w.push(0),
                SideClass::Right | SideClass::AtC => w.push(1),
                SideClass::Uncertain => {
                    return Err(Error::PrecisionExhausted { bits: f.param().precision() })
                }
            }
        }
        Ok(w)
    }

    /// Index of the first coordinate equal to c, if any.
    pub fn critical_index(&self, f: &TentMap) -> Option<usize> {
        self.coords.iter().position(|x| f.side(x) == SideClass::AtC)
    }

    /// Largest coordinate-wise difference bound; equal depths required.
    pub fn max_gap(&self, o: &Thread) -> Result<f64> {
        if self.depth() != o.depth() {
            return Err(Error::DomainError(format!(
                "depth mismatch {} vs {}",
                self.depth(),
                o.depth()
            )));
        }
        Ok(self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a.diff_bound(b))
            .fold(0.0, f64::max))
    }

    /// Provable coordinate-wise equality (`None` when undecided).
    pub fn exact_eq(&self, o: &Thread) -> Option<bool> {
        if self.depth() != o.depth() {
            return Some(false);
        }
        let mut undecided = false;
        for (a, b) in self.coords.iter().zip(&o.coords) {
            match a.cmp_real(b) {
                Some(Ordering::Equal) => {}
                Some(_) => return Some(false),
                None => undecided = true,
            }
        }
        if undecided {
            None
        } else {
            Some(true)
        }
    }

    /// First index where the coordinates are provably different.
    pub fn first_difference(&self, o: &Thread) -> Option<usize> {
        self.coords
            .iter()
            .zip(&o.coords)
            .position(|(a, b)| matches!(a.cmp_real(b), Some(Ordering::Less | Ordering::Greater)))
    }

    /// Metric d(x, y) = Σ |x_i − y_i| / 2^i over the common depth.
    pub fn distance(&self, o: &Thread) -> f64 {
        self.coords
            .iter()
            .zip(&o.coords)
            .enumerate()
            .map(|(i, (a, b))| (a.to_f64() - b.to_f64()).abs() / 2f64.powi(i as i32))
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Real::to_f64).collect()
    }
}
