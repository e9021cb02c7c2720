use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

/// Finite 0/1 word; `ambiguous_tail` marks a prefix cut at an exact hit of c.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Word {
    symbols: Vec<u8>,
    ambiguous_tail: bool,
}

impl Word {
    pub fn new() -> Word {
        Word::default()
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Word {
        debug_assert!(symbols.iter().all(|&s| s < 2));
        Word { symbols, ambiguous_tail: false }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Word> {
        s.chars()
            .map(|ch| match ch {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()
            .map(Word::from_symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_ambiguous(&self) -> bool {
        self.ambiguous_tail
    }

    pub fn set_ambiguous(&mut self, v: bool) {
        self.ambiguous_tail = v;
    }

    pub fn push(&mut self, s: u8) {
        debug_assert!(s < 2);
        self.symbols.push(s);
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.symbols.get(i).copied()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::from_symbols(self.symbols[..n.min(self.len())].to_vec())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut s = self.symbols.clone();
        s.extend_from_slice(&o.symbols);
        Word { symbols: s, ambiguous_tail: o.ambiguous_tail }
    }

    /// Copy with the symbol at `i` flipped.
    pub fn flipped(&self, i: usize) -> Word {
        let mut w = self.clone();
        w.symbols[i] ^= 1;
        w
    }

    /// Parity of the number of ones.
    pub fn parity(&self) -> u8 {
        self.symbols.iter().fold(0, |acc, &s| acc ^ s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        if self.ambiguous_tail {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// Result of comparing two finite words in the unimodal order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnimodalOrd {
    Less,
    EqualAtDepth,
    Greater,
}

impl UnimodalOrd {
    pub fn to_ordering(self) -> Ordering {
        match self {
            UnimodalOrd::Less => Ordering::Less,
            UnimodalOrd::EqualAtDepth => Ordering::Equal,
            UnimodalOrd::Greater => Ordering::Greater,
        }
    }
}

/// Parity-lexicographic comparison at the first differing index.
pub fn unimodal_cmp(s: &[u8], t: &[u8]) -> UnimodalOrd {
    let mut parity = 0u8;
    for (&a, &b) in s.iter().zip(t) {
        parity ^= a;
        if a != b {
            return if parity == 0 { UnimodalOrd::Less } else { UnimodalOrd::Greater };
        }
    }
    UnimodalOrd::EqualAtDepth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_rule() {
        assert_eq!(unimodal_cmp(&[1, 0], &[1, 1]), UnimodalOrd::Greater);
        assert_eq!(unimodal_cmp(&[0, 0], &[0, 1]), UnimodalOrd::Less);
        assert_eq!(unimodal_cmp(&[0, 1], &[0, 1, 1]), UnimodalOrd::EqualAtDepth);
        assert_eq!(unimodal_cmp(&[1, 1, 0], &[1, 1, 1]), UnimodalOrd::Less);
    }

    #[test]
    fn display_and_parse() {
        let w = Word::parse("1011").unwrap();
        assert_eq!(w.to_string(), "1011");
        assert_eq!(w.parity(), 1);
        assert!(Word::parse("10a").is_none());
    }
}
