//! Constructive factorization of kernel elements into basic `(r+1)`-st
//! twists.
//!
//! The subgroup `Γ_n^r ≤ B_n` is generated by the basic twists `Σ_{a;r}`;
//! equivalently it consists of the braids admitting a diagram in which every
//! overcrossing passes over a multiple of `r` strands. For
//! `n ≥ n₀(r, n mod 3)` it equals `ker(φ_r)`, and the routines here make
//! that equality effective: every output is a [`TwistWord`] whose expansion
//! is certified equal to the input by the Garside normal form oracle.

mod embedding;
mod gcd;
mod kernel;
mod pure;

pub use embedding::{
    factor_standard_embedding, factor_standard_embedding_traced, FactorTrace, StandardEmbedding,
    TraceStep,
};
pub use gcd::{gcd_twist_word, GcdTwistWord};
pub use kernel::{factor_kernel, permutation_correction};
pub use pure::{
    factor_pure_kernel, factor_pure_kernel_word, pure_word_to_generators, triple_block_word,
    PureLetter, PureWord,
};

use crate::braid::{BraidError, BraidWord};
use crate::crossed_hom::CrossedHomError;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors from the factorization routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("strand count {n} is below the guaranteed threshold n0 = {n0} for r = {r}; pass force=true to attempt anyway")]
    BelowThreshold { n: usize, r: u64, n0: usize },
    #[error("the factorization needs n >= r*s strands, got n = {n}, r = {r}, s = {s}")]
    EmbeddingTooTight { n: usize, r: u64, s: usize },
    #[error("input word is not a pure braid")]
    NotPure,
    #[error("input word is not in ker(phi_r) for r = {r}")]
    NotInKernel { r: u64 },
    #[error("modulus r must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("for even r the triple parameters must have a+b+c even; got r = {r}, a+b+c = {sum}")]
    TripleParity { r: u64, sum: i64 },
    #[error("embedding targets must be distinct points in 1..={n}")]
    BadEmbedding { n: usize },
    #[error("no packet of {r} spare strands was available to borrow (n too small for this input)")]
    BorrowFailed { r: u64 },
    #[error("factorization produced a word that fails the equality oracle; this is a bug or a violated precondition")]
    CertificationFailed,
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    CrossedHom(#[from] CrossedHomError),
}

/// One factor `Σ_{start;width}^{sign}` of a twist word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistFactor {
    pub start: usize,
    pub width: usize,
    pub sign: i8,
}

impl TwistFactor {
    pub fn new(start: usize, width: usize, sign: i8) -> Self {
        TwistFactor { start, width, sign }
    }

    pub fn inverse(self) -> Self {
        TwistFactor {
            sign: -self.sign,
            ..self
        }
    }
}

impl fmt::Display for TwistFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{};{}]", self.start, self.width)?;
        if self.sign < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A word in basic twists `Σ_{a;r}^{±1}`.
///
/// Every factor produced by the algorithms in this module has width exactly
/// `r`; the width field exists so that wider twists (e.g. the long twist
/// `Σ_{1;n−1}`) can be represented when building elements by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistWord {
    pub n: usize,
    pub r: u64,
    pub factors: Vec<TwistFactor>,
}

impl TwistWord {
    pub fn empty(n: usize, r: u64) -> Self {
        TwistWord {
            n,
            r,
            factors: Vec::new(),
        }
    }

    pub fn push(&mut self, f: TwistFactor) {
        debug_assert!(f.start >= 1 && f.start + f.width <= self.n);
        self.factors.push(f);
    }

    /// Expands the factor sequence into a braid word.
    pub fn expand(&self) -> Result<BraidWord, BraidError> {
        let mut letters: Vec<i32> = Vec::new();
        for f in &self.factors {
            if f.start < 1 || f.width < 1 || f.start + f.width > self.n {
                return Err(BraidError::TwistOutOfRange {
                    n: self.n,
                    a: f.start,
                    r: f.width,
                });
            }
            if f.sign > 0 {
                for k in f.start..f.start + f.width {
                    letters.push(k as i32);
                }
            } else {
                for k in (f.start..f.start + f.width).rev() {
                    letters.push(-(k as i32));
                }
            }
        }
        BraidWord::from_letters(self.n, letters)
    }

    /// Checks that every factor fits: `start ≥ 1` and `start + width ≤ n`.
    pub fn all_factors_valid(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.start >= 1 && f.width >= 1 && f.start + f.width <= self.n)
    }

    /// Checks that every factor has width exactly `r`.
    pub fn all_widths_basic(&self) -> bool {
        self.factors.iter().all(|f| f.width == self.r as usize)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn extend(&mut self, other: &TwistWord) {
        debug_assert_eq!(self.n, other.n);
        self.factors.extend_from_slice(&other.factors);
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, t) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// The threshold `n₀(r, d)` above which `ker(φ_r) = Γ_n^r` is guaranteed,
/// where `d = n mod 3`:
///
/// * `n₀(1, ·) = 2`
/// * `n₀(2, ·) = 8`
/// * `n₀(r, d) = (6+d)·r` for odd `r`
/// * `n₀(r, d) = (12+d)·r` for even `r ≥ 4`
pub fn n0(r: u64, d: u64) -> u64 {
    debug_assert!(d < 3);
    match r {
        0 => 0,
        1 => 2,
        2 => 8,
        _ if r % 2 == 1 => (6 + d) * r,
        _ => (12 + d) * r,
    }
}

/// The threshold for a concrete strand count (`d = n mod 3`).
pub fn n0_for(r: u64, n: usize) -> usize {
    n0(r, (n % 3) as u64) as usize
}
