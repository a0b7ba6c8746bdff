//! The Euclidean construction inside the group generated by two adjacent
//! basic twists: from `Σ_{1;a}` and `Σ_{a+1;b}` one reaches `Σ_{1;gcd(a,b)}`.
//!
//! Everything rests on two word-level identities: `Σ_{p;q}·Σ_{p+q;w} =
//! Σ_{p;q+w}` (literally, as words) and the conjugation shift
//! `Σ_{1;a+b}^j Σ_{p;q} Σ_{1;a+b}^{-j} = Σ_{p+j;q}` while all indices stay
//! inside `[1, a+b]`. Subtractive Euclid then walks widths down to the gcd,
//! tracking every element as an explicit word in the two given twists.

use super::{FactorError, TwistFactor, TwistWord};
use crate::braid::BraidWord;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which of the two given twists a letter refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GcdAtom {
    /// `Σ_{1;a}`
    First,
    /// `Σ_{a+1;b}`
    Second,
}

/// A word in `Σ_{1;a}^{±1}` and `Σ_{a+1;b}^{±1}` equal to `Σ_{1;gcd(a,b)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdTwistWord {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub letters: Vec<(GcdAtom, i8)>,
}

impl GcdTwistWord {
    pub fn gcd(&self) -> usize {
        gcd(self.a, self.b)
    }

    /// The factor view: widths `a` and `b` twists.
    pub fn factors(&self) -> Vec<TwistFactor> {
        self.letters
            .iter()
            .map(|&(atom, sign)| match atom {
                GcdAtom::First => TwistFactor::new(1, self.a, sign),
                GcdAtom::Second => TwistFactor::new(self.a + 1, self.b, sign),
            })
            .collect()
    }

    pub fn expand(&self) -> Result<BraidWord, FactorError> {
        let tw = TwistWord {
            n: self.n,
            r: 0,
            factors: self.factors(),
        };
        Ok(tw.expand()?)
    }
}

impl fmt::Display for GcdTwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, &(atom, sign)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            match atom {
                GcdAtom::First => write!(f, "S[1;{}]", self.a)?,
                GcdAtom::Second => write!(f, "S[{};{}]", self.a + 1, self.b)?,
            }
            if sign < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

type AtomWord = Vec<(GcdAtom, i8)>;

fn inverse(w: &[(GcdAtom, i8)]) -> AtomWord {
    w.iter().rev().map(|&(a, s)| (a, -s)).collect()
}

/// `L^j · w · L^{-j}` where `L = Σ_{1;a+b} = First·Second`.
fn shift(j: i64, w: &[(GcdAtom, i8)]) -> AtomWord {
    let mut out = AtomWord::new();
    let l: AtomWord = vec![(GcdAtom::First, 1), (GcdAtom::Second, 1)];
    let li = inverse(&l);
    let (head, tail) = if j >= 0 { (&l, &li) } else { (&li, &l) };
    for _ in 0..j.unsigned_abs() {
        out.extend_from_slice(head);
    }
    out.extend_from_slice(w);
    for _ in 0..j.unsigned_abs() {
        out.extend_from_slice(tail);
    }
    out
}

fn reduce(mut w: AtomWord) -> AtomWord {
    let mut out = AtomWord::new();
    for lt in w.drain(..) {
        if let Some(&last) = out.last() {
            if last.0 == lt.0 && last.1 == -lt.1 {
                out.pop();
                continue;
            }
        }
        out.push(lt);
    }
    out
}

/// Builds an explicit word in `Σ_{1;a}` and `Σ_{a+1;b}` (and their
/// inverses) equal to `Σ_{1;gcd(a,b)}` in `B_n`. Requires `n ≥ a + b + 1`.
pub fn gcd_twist_word(n: usize, a: usize, b: usize) -> Result<GcdTwistWord, FactorError> {
    if a < 1 || b < 1 || n < a + b + 1 {
        return Err(FactorError::BadEmbedding { n });
    }
    // invariant: wx is a word for Σ_{1;x}, wy for Σ_{1;y}
    let mut x = a;
    let mut wx: AtomWord = vec![(GcdAtom::First, 1)];
    let mut y = b;
    // Σ_{1;b} = L^{-a} Σ_{a+1;b} L^{a}
    let mut wy: AtomWord = shift(-(a as i64), &[(GcdAtom::Second, 1)]);
    while x != y {
        if x < y {
            std::mem::swap(&mut x, &mut y);
            std::mem::swap(&mut wx, &mut wy);
        }
        // Σ_{1;x} = Σ_{1;y} · Σ_{y+1;x−y} as words, hence
        // Σ_{1;x−y} = L^{-y} (Σ_{1;y}^{-1} Σ_{1;x}) L^{y}
        let mut diff = inverse(&wy);
        diff.extend_from_slice(&wx);
        wx = reduce(shift(-(y as i64), &diff));
        x -= y;
    }
    Ok(GcdTwistWord {
        n,
        a,
        b,
        letters: reduce(wx),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::basic_twist_word;
    use crate::word_problem::equals;

    #[test]
    fn equal_arguments() {
        let w = gcd_twist_word(7, 3, 3).unwrap();
        assert_eq!(w.gcd(), 3);
        let target = basic_twist_word(7, 1, 3).unwrap();
        assert!(equals(&w.expand().unwrap(), &target).unwrap());
    }

    #[test]
    fn worked_cases() {
        // gcd(2,4) = 2 and gcd(2,3) = 1
        let w = gcd_twist_word(7, 2, 4).unwrap();
        assert!(equals(
            &w.expand().unwrap(),
            &basic_twist_word(7, 1, 2).unwrap()
        )
        .unwrap());
        let w = gcd_twist_word(6, 2, 3).unwrap();
        assert!(equals(
            &w.expand().unwrap(),
            &basic_twist_word(6, 1, 1).unwrap()
        )
        .unwrap());
    }

    #[test]
    fn bound_violation() {
        assert!(gcd_twist_word(5, 2, 3).is_err());
        assert!(gcd_twist_word(6, 2, 3).is_ok());
    }

    #[test]
    fn letters_use_only_the_two_atoms() {
        let w = gcd_twist_word(9, 3, 5).unwrap();
        assert_eq!(w.gcd(), 1);
        for f in w.factors() {
            assert!(
                (f.start == 1 && f.width == 3) || (f.start == 4 && f.width == 5),
                "unexpected factor {f}"
            );
        }
        assert!(equals(
            &w.expand().unwrap(),
            &basic_twist_word(9, 1, 1).unwrap()
        )
        .unwrap());
    }
}
