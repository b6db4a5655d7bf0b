//! Sign vectors labeling the cycle's correlation inequalities and the
//! extremal nonsignalling boxes.
//!
//! A sign vector assigns +1 or -1 to each edge of the n-cycle. Odd-parity
//! vectors (an odd number of -1 entries) label the nonsignalling vertices
//! and the facets of the local set; even-parity vectors label the classically
//! correlated boxes obtained by flipping a single sign.

use std::fmt;

use crate::error::{Error, Result};

/// Parity of the number of -1 entries in a [`SignVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// A vector in {-1, +1}^n labeling one edge sign per cycle edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    /// Builds a sign vector from entries that must each be +1 or -1.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.len() < 3 {
            return Err(Error::CycleTooShort(signs.len()));
        }
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidVertexLabel(format!(
                "sign entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self { signs })
    }

    /// All +1 entries; even parity. Labels the perfectly correlated classical box.
    pub fn all_plus(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// The canonical odd-parity vector: +1 everywhere except -1 on edge n.
    pub fn canonical(n: usize) -> Result<Self> {
        let mut signs = vec![1i8; n];
        if n == 0 {
            return Err(Error::CycleTooShort(0));
        }
        signs[n - 1] = -1;
        Self::new(signs)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sign on edge `k` (1-based, cyclic edge (X_k, X_{k+1})).
    pub fn sign(&self, k: usize) -> Result<i8> {
        if k == 0 || k > self.signs.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.signs.len(),
            });
        }
        Ok(self.signs[k - 1])
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn parity(&self) -> Parity {
        if self.minus_count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    pub fn require_parity(&self, parity: Parity) -> Result<()> {
        if self.parity() != parity {
            return Err(Error::ParityMismatch {
                expected: parity.label(),
                got: self.parity().label(),
            });
        }
        Ok(())
    }

    /// The companion vector with the sign at edge `k` (1-based) flipped.
    /// Flipping at a -1 of an odd-parity vector yields the even-parity label
    /// of the matching classical box.
    pub fn companion(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.signs.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.signs.len(),
            });
        }
        let mut signs = self.signs.clone();
        signs[k - 1] = -signs[k - 1];
        Ok(Self { signs })
    }

    /// Position (1-based) of the first -1 entry, if any.
    pub fn first_minus(&self) -> Option<usize> {
        self.signs.iter().position(|&s| s < 0).map(|i| i + 1)
    }

    /// Entrywise product with another sign vector of the same length.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SignLength {
                expected: self.len(),
                got: other.len(),
            });
        }
        Self::new(
            self.signs
                .iter()
                .zip(&other.signs)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// Cyclic left shift: entry k of the result is entry k+offset of self.
    pub fn shifted(&self, offset: usize) -> Self {
        let n = self.signs.len();
        let signs = (0..n).map(|i| self.signs[(i + offset) % n]).collect();
        Self { signs }
    }

    /// All sign vectors of the given parity, in lexicographic order with
    /// -1 ordered before +1.
    pub fn enumerate(n: usize, parity: Parity) -> Vec<Self> {
        (0..(1usize << (n - 1)))
            .map(|index| Self::by_index(n, parity, index))
            .collect()
    }

    /// The `index`-th (0-based) sign vector of the given parity in the
    /// [`Self::enumerate`] order: the leading n-1 signs are the index bits
    /// (most significant first, 0 as -1), the last sign fixes the parity.
    pub fn by_index(n: usize, parity: Parity, index: usize) -> Self {
        debug_assert!(n >= 3 && index < (1 << (n - 1)));
        let mut signs: Vec<i8> = (0..n - 1)
            .map(|j| {
                if (index >> (n - 2 - j)) & 1 == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let minus = signs.iter().filter(|&&s| s < 0).count();
        let want_odd = parity == Parity::Odd;
        signs.push(if (minus % 2 == 1) == want_odd { 1 } else { -1 });
        Self { signs }
    }

    /// Compact label like `++-+`, used in reports and CSV output.
    pub fn label(&self) -> String {
        self.signs
            .iter()
            .map(|&s| if s > 0 { '+' } else { '-' })
            .collect()
    }

    pub fn parse(label: &str) -> Result<Self> {
        let signs: Vec<i8> = label
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidVertexLabel(format!(
                    "sign label may contain only '+' and '-', got {other:?}"
                ))),
            })
            .collect::<Result<_>>()?;
        Self::new(signs)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl TryFrom<String> for SignVector {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::parse(&value)
    }
}

impl From<SignVector> for String {
    fn from(value: SignVector) -> Self {
        value.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_counts_minus_entries() {
        let g = SignVector::new(vec![1, 1, -1, 1]).unwrap();
        assert_eq!(g.parity(), Parity::Odd);
        assert_eq!(g.minus_count(), 1);
        let g = SignVector::new(vec![-1, -1, -1, 1, 1]).unwrap();
        assert_eq!(g.parity(), Parity::Odd);
        let g = SignVector::all_plus(4).unwrap();
        assert_eq!(g.parity(), Parity::Even);
    }

    #[test]
    fn rejects_short_and_invalid_entries() {
        assert!(SignVector::new(vec![1, -1]).is_err());
        assert!(SignVector::new(vec![1, 0, 1]).is_err());
    }

    #[test]
    fn canonical_has_single_minus_at_the_end() {
        let g = SignVector::canonical(5).unwrap();
        assert_eq!(g.signs(), &[1, 1, 1, 1, -1]);
        assert_eq!(g.first_minus(), Some(5));
        assert_eq!(g.parity(), Parity::Odd);
    }

    #[test]
    fn companion_flips_one_sign() {
        let g = SignVector::canonical(4).unwrap();
        let c = g.companion(4).unwrap();
        assert_eq!(c.signs(), &[1, 1, 1, 1]);
        assert_eq!(c.parity(), Parity::Even);
        assert!(g.companion(5).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let odd = SignVector::enumerate(4, Parity::Odd);
        assert_eq!(odd.len(), 8);
        let even = SignVector::enumerate(4, Parity::Even);
        assert_eq!(even.len(), 8);
        // lexicographic with -1 before +1: the all-minus-but-one patterns come first
        assert_eq!(odd[0].label(), "---+");
        assert_eq!(odd.last().unwrap().label(), "+++-");
        let mut sorted = odd.clone();
        sorted.sort();
        assert_eq!(sorted, odd);
    }

    #[test]
    fn by_index_matches_enumeration() {
        for n in [3usize, 4, 6] {
            for parity in [Parity::Odd, Parity::Even] {
                let listed = SignVector::enumerate(n, parity);
                assert_eq!(listed.len(), 1 << (n - 1));
                for (i, g) in listed.iter().enumerate() {
                    assert_eq!(*g, SignVector::by_index(n, parity, i));
                    assert_eq!(g.parity(), parity);
                }
            }
        }
    }

    #[test]
    fn label_round_trip() {
        let g = SignVector::new(vec![1, -1, 1, 1, -1]).unwrap();
        assert_eq!(g.label(), "+-++-");
        assert_eq!(SignVector::parse("+-++-").unwrap(), g);
        assert!(SignVector::parse("+x+").is_err());
    }

    #[test]
    fn shift_and_product() {
        let g = SignVector::new(vec![1, 1, -1, 1]).unwrap();
        assert_eq!(g.shifted(2).signs(), &[-1, 1, 1, 1]);
        assert_eq!(g.shifted(4).signs(), g.signs());
        let p = g.product(&g).unwrap();
        assert_eq!(p.signs(), &[1, 1, 1, 1]);
    }
}
