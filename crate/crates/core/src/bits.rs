//! Fixed-width binary vectors over at most 64 coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest dimension handled by the executable paths.
pub const MAX_DIM: usize = 64;

/// An `n`-bit vector in `{0,1}^n`. Coordinate `i` lives in bit `i` of `bits`.
///
/// Ordering is lexicographic over the coordinate sequence, i.e. the order of
/// the bitstring `f_1 f_2 ... f_n` read as a big-endian binary number.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinVector {
    bits: u64,
    len: u8,
}

#[inline]
pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

impl BinVector {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM, "dimension {len} exceeds {MAX_DIM}");
        BinVector { bits: 0, len: len as u8 }
    }

    /// Builds a vector from a raw word; bits above `len` must be clear.
    pub fn from_bits(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension {len} exceeds {MAX_DIM}"
            )));
        }
        if bits & !low_mask(len as u32) != 0 {
            return Err(Error::InvalidParameter(format!(
                "support of {bits:#x} exceeds {len} positions"
            )));
        }
        Ok(BinVector { bits, len: len as u8 })
    }

    pub(crate) fn from_bits_unchecked(bits: u64, len: usize) -> Self {
        debug_assert!(bits & !low_mask(len as u32) == 0);
        BinVector { bits, len: len as u8 }
    }

    pub fn from_coords(coords: &[bool]) -> Result<Self> {
        let bits = coords
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i));
        Self::from_bits(bits, coords.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len() && (self.bits >> i) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// True when the two supports do not intersect, i.e. the coordinate sum
    /// stays binary.
    pub fn is_disjoint(&self, other: &BinVector) -> bool {
        self.bits & other.bits == 0
    }

    /// Coordinate-wise sum of two vectors with disjoint supports.
    pub fn disjoint_sum(&self, other: &BinVector) -> Option<BinVector> {
        if self.len == other.len && self.is_disjoint(other) {
            Some(BinVector { bits: self.bits | other.bits, len: self.len })
        } else {
            None
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    fn lex_key(&self) -> u64 {
        // coordinate 0 becomes the most significant bit
        self.bits.reverse_bits()
    }
}

impl Ord for BinVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for BinVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.coords() {
            f.write_str(if c { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinVector({self})")
    }
}

impl FromStr for BinVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "bitstring contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(&coords)
    }
}
