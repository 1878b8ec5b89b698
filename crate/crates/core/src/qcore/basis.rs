use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Measurement outcome label `(s_0, ..., s_{N-1})`.
///
/// This is the single place where outcome strings and integer indices are converted: site 0
/// is the most significant digit, so for qubits the string `011` is index 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisString {
    digits: Vec<u8>,
    d: usize,
}

impl BasisString {
    pub fn new(digits: Vec<u8>, d: usize) -> Result<Self> {
        if !(2..=256).contains(&d) {
            return Err(Error::InvalidArgument(format!("local dimension {d} not in 2..=256")));
        }
        if let Some(&bad) = digits.iter().find(|&&x| x as usize >= d) {
            return Err(Error::InvalidArgument(format!("digit {bad} out of range for d = {d}")));
        }
        Ok(Self { digits, d })
    }

    /// Parse a string such as `"0110"`. Only single-character digits are supported.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|x| x as u8)
                    .ok_or_else(|| Error::Parse(format!("invalid digit '{c}' in basis string")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits, d)
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self { digits: vec![0; n], d }
    }

    pub fn decode(index: usize, n: usize, d: usize) -> Self {
        let mut digits = vec![0u8; n];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % d) as u8;
            rest /= d;
        }
        Self { digits, d }
    }

    pub fn encode(&self) -> usize {
        self.digits.iter().fold(0usize, |acc, &x| acc * self.d + x as usize)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// Bit mask of the sites where `self` and `other` differ (site `i` is bit `i`).
    pub fn difference_mask(&self, other: &Self) -> Result<u64> {
        check_same_len(self, other)?;
        Ok(self
            .digits
            .iter()
            .zip(&other.digits)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .fold(0u64, |m, (i, _)| m | (1 << i)))
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.digits {
            write!(f, "{}", char::from_digit(x as u32, 36).unwrap_or('?'))?;
        }
        Ok(())
    }
}

fn check_same_len(a: &BasisString, b: &BasisString) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis strings of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Hamming distance: number of sites at which the two strings differ.
pub fn hamming(s: &BasisString, t: &BasisString) -> Result<usize> {
    check_same_len(s, t)?;
    Ok(s.digits.iter().zip(&t.digits).filter(|(a, b)| a != b).count())
}

/// Subset of sites, stored as strictly increasing zero-based indices. The empty subset is
/// allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetIndex {
    members: Vec<usize>,
}

impl SubsetIndex {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate site in subset".into()));
        }
        if members.iter().any(|&m| m >= 64) {
            return Err(Error::InvalidArgument("subsets support at most 64 sites".into()));
        }
        Ok(Self { members })
    }

    pub fn empty() -> Self {
        Self { members: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        Self {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, &i| m | (1 << i))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn complement(&self, n: usize) -> Self {
        Self {
            members: (0..n).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.members.iter().find(|&&m| m >= n) {
            Some(&site) => Err(Error::SiteOutOfRange { site, n }),
            None => Ok(()),
        }
    }

    /// All `2^n` subsets of `n` sites, ordered by mask.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetIndex> {
        (0..1u64 << n).map(SubsetIndex::from_mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encoding_puts_first_site_most_significant() {
        let s = BasisString::parse("011", 2).unwrap();
        assert_eq!(s.encode(), 3);
        assert_eq!(BasisString::parse("100", 2).unwrap().encode(), 4);
        assert_eq!(BasisString::parse("21", 3).unwrap().encode(), 7);
    }

    #[test]
    fn hamming_examples() {
        let p = |s| BasisString::parse(s, 2).unwrap();
        assert_eq!(hamming(&p("000"), &p("011")).unwrap(), 2);
        assert_eq!(hamming(&p("0101"), &p("0101")).unwrap(), 0);
        assert_eq!(hamming(&p("00"), &p("11")).unwrap(), 2);
        assert!(hamming(&p("00"), &p("011")).is_err());
    }

    #[test]
    fn subset_rejects_duplicates_and_checks_range() {
        assert!(SubsetIndex::new(vec![1, 1]).is_err());
        let a = SubsetIndex::new(vec![2, 0]).unwrap();
        assert_eq!(a.members(), &[0, 2]);
        assert_eq!(a.mask(), 0b101);
        assert!(a.check_range(2).is_err());
        assert_eq!(a.complement(4).members(), &[1, 3]);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(n in 1usize..10, d in 2usize..5, seed in any::<u64>()) {
            let total = d.pow(n as u32);
            let index = (seed as usize) % total;
            let s = BasisString::decode(index, n, d);
            prop_assert_eq!(s.len(), n);
            prop_assert_eq!(s.encode(), index);
            let again = BasisString::parse(&s.to_string(), d).unwrap();
            prop_assert_eq!(again, s);
        }
    }
}
