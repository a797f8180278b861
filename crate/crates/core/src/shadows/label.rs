use std::fmt;

use smallvec::{smallvec, SmallVec};

use super::ShadowError;

type Words = SmallVec<[u64; 1]>;

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

/// Contamination status of each shadow of a shadow set; a set bit means the
/// shadow may hide an undetected evader.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShadowLabel {
    len: usize,
    words: Words,
}

impl ShadowLabel {
    pub fn all_clear(len: usize) -> Self {
        ShadowLabel { len, words: smallvec![0; word_count(len)] }
    }

    pub fn all_contaminated(len: usize) -> Self {
        let mut l = Self::all_clear(len);
        for i in 0..len {
            l.set(i, true);
        }
        l
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut l = Self::all_clear(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            l.set(i, b);
        }
        l
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for label of length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, contaminated: bool) {
        assert!(i < self.len, "bit {i} out of range for label of length {}", self.len);
        let mask = 1u64 << (i % 64);
        if contaminated {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_all_clear(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_contaminated(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contaminated(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Every contaminated shadow of `self` is contaminated in `other`.
    /// Lengths must agree (unchecked).
    pub(crate) fn is_covered_by(&self, other: &ShadowLabel) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub(crate) fn or_assign(&mut self, other: &ShadowLabel) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `self` dominates `other` when they differ and every contaminated bit of
    /// `self` is also contaminated in `other`.
    pub fn dominates(&self, other: &ShadowLabel) -> Result<bool, ShadowError> {
        if self.len != other.len {
            return Err(ShadowError::LengthMismatch { expected: self.len, found: other.len });
        }
        Ok(self != other && self.is_covered_by(other))
    }
}

impl fmt::Display for ShadowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for ShadowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShadowLabel({self})")
    }
}

impl std::str::FromStr for ShadowLabel {
    type Err = ShadowError;

    /// Parses a 0/1 string, first character is shadow 0.
    fn from_str(s: &str) -> Result<Self, ShadowError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ShadowError::BadLabel(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ShadowLabel::from_bits(&bits))
    }
}

impl serde::Serialize for ShadowLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ShadowLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
