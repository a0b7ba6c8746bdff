//! Braid words, permutations, and the named elements used throughout the
//! crate: Artin generators, basic twists, and the standard pure braid
//! generators.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * A word's letters are listed in temporal order: the first letter is the
//!   crossing at the top of the diagram.
//! * A positive letter `σ_i` crosses the strand at position `i` over the
//!   strand at position `i+1`, moving it one slot to the right.
//! * `permutation_image(w)(j)` is the starting position of the strand that
//!   ends at position `j`. With composition `(f·g)(x) = f(g(x))` this makes
//!   `permutation_image` a homomorphism:
//!   `permutation_image(concat(u, v)) = permutation_image(u) · permutation_image(v)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors raised by braid constructors and word manipulations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("generator index {index} out of range for {n} strands (need 1 <= index <= {})", n.saturating_sub(1))]
    IndexOutOfRange { n: usize, index: usize },
    #[error("strand counts differ: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("basic twist needs n >= a + r, got n = {n}, a = {a}, r = {r}")]
    TwistOutOfRange { n: usize, a: usize, r: usize },
    #[error("pure generator needs 1 <= i < j <= n, got i = {i}, j = {j}, n = {n}")]
    PureGenOutOfRange { n: usize, i: usize, j: usize },
    #[error("cannot parse braid letter {text:?}")]
    Parse { text: String },
    #[error("strand count must be at least 1")]
    EmptyBraid,
}

/// A permutation of `{1, …, n}`, stored 0-based.
///
/// `images[k]` is the image of `k` (both 0-based). Composition follows
/// `(f·g)(x) = f(g(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds from one-based images, checking bijectivity.
    pub fn from_one_based(images: &[usize]) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut v = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return None;
            }
            seen[x - 1] = true;
            v.push(x - 1);
        }
        Some(Permutation { images: v })
    }

    /// The transposition swapping `i` and `i+1` (one-based `i <= n-1`).
    pub fn adjacent_transposition(n: usize, i: usize) -> Self {
        debug_assert!(i >= 1 && i < n);
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i - 1, i);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    pub fn apply0(&self, x: usize) -> usize {
        self.images[x]
    }

    /// Image of a 1-based point.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1] + 1
    }

    /// `(self · other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (k, &x) in self.images.iter().enumerate() {
            images[x] = k;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &x)| k == x)
    }

    /// Parity: 0 for even, 1 for odd.
    pub fn parity(&self) -> u8 {
        let mut seen = vec![false; self.images.len()];
        let mut parity = 0u8;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            if len % 2 == 0 {
                parity ^= 1;
            }
        }
        parity
    }

    /// One-based image sequence, e.g. for serialization.
    pub fn one_based_images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    pub(crate) fn raw(&self) -> &[usize] {
        &self.images
    }

    pub(crate) fn from_raw(images: Vec<usize>) -> Self {
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, "]")
    }
}

/// A word in the Artin generators of `B_n`.
///
/// Letters are signed generator indices: `+i` for `σ_i`, `-i` for `σ_i⁻¹`.
/// The empty word is the identity braid. Words are kept unreduced; free
/// reduction is an explicit operation so that factorization traces stay
/// inspectable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i32>,
}

impl<'de> Deserialize<'de> for BraidWord {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            letters: Vec<i32>,
        }
        let raw = Raw::deserialize(deserializer)?;
        BraidWord::from_letters(raw.n, raw.letters).map_err(serde::de::Error::custom)
    }
}

impl BraidWord {
    /// The identity braid on `n` strands.
    pub fn identity(n: usize) -> Self {
        BraidWord {
            n,
            letters: Vec::new(),
        }
    }

    /// Builds a word from signed letters, validating every index.
    pub fn from_letters(n: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if n == 0 {
            return Err(BraidError::EmptyBraid);
        }
        for &l in &letters {
            let idx = l.unsigned_abs() as usize;
            if l == 0 || idx >= n {
                return Err(BraidError::IndexOutOfRange { n, index: idx });
            }
        }
        Ok(BraidWord { n, letters })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    /// Iterates `(index, sign)` pairs with `index` one-based.
    pub fn iter_letters(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.letters
            .iter()
            .map(|&l| (l.unsigned_abs() as usize, if l > 0 { 1 } else { -1 }))
    }

    pub(crate) fn push(&mut self, index: usize, sign: i8) {
        debug_assert!(index >= 1 && index < self.n);
        self.letters
            .push(if sign > 0 { index as i32 } else { -(index as i32) });
    }

    /// Word concatenation `self · other` (self happens first).
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.n != other.n {
            return Err(BraidError::StrandMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { n: self.n, letters })
    }

    /// The group inverse: letters reversed with signs flipped.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &BraidWord) -> Result<BraidWord, BraidError> {
        g.concat(self)?.concat(&g.inverse())
    }

    /// Cancels adjacent `σ_i σ_i⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if let Some(&last) = out.last() {
                if last == -l {
                    out.pop();
                    continue;
                }
            }
            out.push(l);
        }
        BraidWord {
            n: self.n,
            letters: out,
        }
    }

    /// The image under `B_n → S_n`, `σ_i ↦ (i, i+1)`.
    pub fn permutation_image(&self) -> Permutation {
        // image(l_1 … l_k) = s_{l_1} ∘ … ∘ s_{l_k}; composing on the right by
        // a transposition swaps two slots of the accumulated image vector.
        let mut images: Vec<usize> = (0..self.n).collect();
        for (i, _) in self.iter_letters() {
            images.swap(i - 1, i);
        }
        Permutation { images }
    }

    pub fn is_pure(&self) -> bool {
        self.permutation_image().is_identity()
    }

    /// Text form: whitespace-separated signed indices, e.g. `"+2 -1 +3"`.
    pub fn to_text(&self) -> String {
        self.letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("+{l}")
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the plain text form (signed integers only).
    pub fn parse(n: usize, text: &str) -> Result<BraidWord, BraidError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| BraidError::Parse {
                text: tok.to_string(),
            })?;
            letters.push(l);
        }
        BraidWord::from_letters(n, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            write!(f, "(empty)")
        } else {
            write!(f, "{}", self.to_text())
        }
    }
}

/// One-letter word `σ_i^{±1}` in `B_n`.
pub fn sigma(n: usize, i: usize, sign: i8) -> Result<BraidWord, BraidError> {
    if n == 0 {
        return Err(BraidError::EmptyBraid);
    }
    if i < 1 || i >= n {
        return Err(BraidError::IndexOutOfRange { n, index: i });
    }
    BraidWord::from_letters(n, vec![if sign >= 0 { i as i32 } else { -(i as i32) }])
}

/// The basic twist `Σ_{a;r} = σ_a σ_{a+1} … σ_{a+r−1}`: one strand crossing
/// over the `r` strands to its right. Valid in `B_n` when `n ≥ a + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasicTwist {
    pub a: usize,
    pub r: usize,
}

impl BasicTwist {
    pub fn new(a: usize, r: usize) -> Self {
        BasicTwist { a, r }
    }

    pub fn word(&self, n: usize) -> Result<BraidWord, BraidError> {
        basic_twist_word(n, self.a, self.r)
    }
}

/// Word for `Σ_{a;r}` in `B_n`.
pub fn basic_twist_word(n: usize, a: usize, r: usize) -> Result<BraidWord, BraidError> {
    if a < 1 || r < 1 || n < a + r {
        return Err(BraidError::TwistOutOfRange { n, a, r });
    }
    BraidWord::from_letters(n, (a..a + r).map(|i| i as i32).collect())
}

/// A power of a standard pure braid generator `A_{ij}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureBraidGen {
    pub i: usize,
    pub j: usize,
    pub exponent: i64,
}

impl PureBraidGen {
    pub fn word(&self, n: usize) -> Result<BraidWord, BraidError> {
        let base = pure_gen_word(n, self.i, self.j)?;
        let mut out = BraidWord::identity(n);
        let block = if self.exponent >= 0 {
            base
        } else {
            base.inverse()
        };
        for _ in 0..self.exponent.unsigned_abs() {
            out = out.concat(&block)?;
        }
        Ok(out)
    }
}

/// Word for the standard pure braid generator
/// `A_{ij} = (σ_{j−1} … σ_{i+1}) σ_i² (σ_{i+1}⁻¹ … σ_{j−1}⁻¹)`, the positive
/// band around marked points `i` and `j`.
pub fn pure_gen_word(n: usize, i: usize, j: usize) -> Result<BraidWord, BraidError> {
    if i < 1 || i >= j || j > n {
        return Err(BraidError::PureGenOutOfRange { n, i, j });
    }
    let mut letters: Vec<i32> = Vec::with_capacity(2 * (j - i));
    for k in ((i + 1)..j).rev() {
        letters.push(k as i32);
    }
    letters.push(i as i32);
    letters.push(i as i32);
    for k in (i + 1)..j {
        letters.push(-(k as i32));
    }
    BraidWord::from_letters(n, letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_bounds() {
        assert!(sigma(4, 1, 1).is_ok());
        assert!(sigma(4, 4, 1).is_err());
        assert_eq!(sigma(2, 1, -1).unwrap().to_text(), "-1");
    }

    #[test]
    fn basic_twist_expansion() {
        assert_eq!(basic_twist_word(4, 1, 2).unwrap().letters(), &[1, 2]);
        assert_eq!(basic_twist_word(2, 1, 1).unwrap().letters(), &[1]);
        assert_eq!(basic_twist_word(5, 2, 3).unwrap().letters(), &[2, 3, 4]);
        assert!(basic_twist_word(4, 2, 3).is_err());
        // exactly r letters, all positive
        for n in 2..8 {
            for a in 1..n {
                for r in 1..=(n - a) {
                    let w = basic_twist_word(n, a, r).unwrap();
                    assert_eq!(w.len(), r);
                    assert!(w.letters().iter().all(|&l| l > 0));
                }
            }
        }
    }

    #[test]
    fn pure_gen_expansion() {
        assert_eq!(pure_gen_word(3, 1, 2).unwrap().letters(), &[1, 1]);
        assert_eq!(pure_gen_word(3, 1, 3).unwrap().letters(), &[2, 1, 1, -2]);
        for n in 2..7 {
            for i in 1..n {
                for j in (i + 1)..=n {
                    assert!(pure_gen_word(n, i, j).unwrap().is_pure());
                }
            }
        }
    }

    #[test]
    fn inverse_involution() {
        let w = BraidWord::parse(4, "+1 -2 +3 +3").unwrap();
        assert_eq!(w.inverse().inverse(), w);
        assert_eq!(w.inverse().letters(), &[-3, -3, 2, -1]);
    }

    #[test]
    fn free_reduction_cancels() {
        let w = BraidWord::parse(3, "+1 +2 -2 -1 +1").unwrap();
        assert_eq!(w.free_reduce().letters(), &[1]);
        let w = BraidWord::parse(3, "+1 -1").unwrap();
        assert!(w.free_reduce().is_empty());
    }

    #[test]
    fn permutation_image_of_twist_is_cycle() {
        // Σ_{1;r} maps to the (r+1)-cycle 1→2→…→r+1→1.
        for r in 1..6 {
            let n = r + 2;
            let w = basic_twist_word(n, 1, r).unwrap();
            let p = w.permutation_image();
            for k in 1..=r {
                assert_eq!(p.apply(k), k + 1);
            }
            assert_eq!(p.apply(r + 1), 1);
            assert_eq!(p.apply(r + 2), r + 2);
        }
    }

    #[test]
    fn permutation_image_is_homomorphism() {
        let u = BraidWord::parse(5, "+1 +3 -2 +4").unwrap();
        let v = BraidWord::parse(5, "-4 +2 +2 -1").unwrap();
        let uv = u.concat(&v).unwrap();
        assert_eq!(
            uv.permutation_image(),
            u.permutation_image().compose(&v.permutation_image())
        );
    }

    #[test]
    fn three_cycle_from_twist_quotient() {
        // image(Σ_{1;r}⁻¹ Σ_{2;r}) is the 3-cycle (1, r+1, r+2).
        for r in 2..5 {
            let n = r + 3;
            let u = basic_twist_word(n, 1, r).unwrap().inverse();
            let v = basic_twist_word(n, 2, r).unwrap();
            let p = u.concat(&v).unwrap().permutation_image();
            assert_eq!(p.apply(1), r + 1);
            assert_eq!(p.apply(r + 1), r + 2);
            assert_eq!(p.apply(r + 2), 1);
            for k in 2..=r {
                assert_eq!(p.apply(k), k);
            }
        }
    }

    #[test]
    fn parity_of_cycles() {
        let p = BraidWord::parse(4, "+1").unwrap().permutation_image();
        assert_eq!(p.parity(), 1);
        let p = BraidWord::parse(4, "+1 +2").unwrap().permutation_image();
        assert_eq!(p.parity(), 0);
        assert_eq!(Permutation::identity(5).parity(), 0);
    }

    #[test]
    fn json_round_trip() {
        let w = BraidWord::parse(4, "+2 -1 +3").unwrap();
        let js = serde_json::to_string(&w).unwrap();
        assert_eq!(js, r#"{"n":4,"letters":[2,-1,3]}"#);
        let back: BraidWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<BraidWord>(r#"{"n":3,"letters":[4]}"#).is_err());
    }
}
