//! Canonical form and equality oracle for braid words.
//!
//! Elements are put into Garside left normal form `Δ^k · f_1 ⋯ f_m`, where
//! each `f_t` is a permutation braid (a positive braid in which every pair of
//! strands crosses at most once) and consecutive factors are left-weighted.
//! Two words represent the same element of `B_n` exactly when their normal
//! forms coincide, which is what certifies every factorization produced by
//! this crate.
//!
//! Permutation braids are identified with their permutations under the
//! convention of [`crate::braid`]: `π(j)` is the starting position of the
//! strand ending at slot `j` (0-based here). Appending `σ_i` on the right of
//! a simple element is legal iff `π(i) < π(i+1)`, and swaps those two slots;
//! stripping `σ_i` off the left is legal iff value `i` sits to the right of
//! value `i+1`, and swaps the two values.

use crate::braid::{BraidError, BraidWord, Permutation};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Garside left normal form `Δ^delta · factors`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    n: usize,
    delta: i64,
    factors: Vec<Permutation>,
}

impl NormalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta_power(&self) -> i64 {
        self.delta
    }

    pub fn factors(&self) -> &[Permutation] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.delta == 0 && self.factors.is_empty()
    }

    /// Canonical length (number of simple factors).
    pub fn canonical_length(&self) -> usize {
        self.factors.len()
    }

    /// The permutation image recovered from the normal form data.
    pub fn permutation_image(&self) -> Permutation {
        let mut p = if self.delta.rem_euclid(2) == 1 {
            half_twist_perm(self.n)
        } else {
            Permutation::identity(self.n)
        };
        for f in &self.factors {
            p = p.compose(f);
        }
        p
    }
}

impl Serialize for NormalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            delta: i64,
            factors: Vec<Vec<usize>>,
            #[serde(skip)]
            _m: std::marker::PhantomData<&'a ()>,
        }
        Raw {
            n: self.n,
            delta: self.delta,
            factors: self.factors.iter().map(|f| f.one_based_images()).collect(),
            _m: std::marker::PhantomData,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            delta: i64,
            factors: Vec<Vec<usize>>,
        }
        let raw = Raw::deserialize(d)?;
        let mut factors = Vec::with_capacity(raw.factors.len());
        for f in &raw.factors {
            let p = Permutation::from_one_based(f)
                .ok_or_else(|| serde::de::Error::custom("factor is not a permutation"))?;
            if p.degree() != raw.n {
                return Err(serde::de::Error::custom("factor degree mismatch"));
            }
            factors.push(p);
        }
        Ok(NormalForm {
            n: raw.n,
            delta: raw.delta,
            factors,
        })
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D^{}", self.delta)?;
        for p in &self.factors {
            write!(f, " . {p}")?;
        }
        Ok(())
    }
}

/// Permutation of the Garside element `Δ` (the half twist): `k ↦ n+1−k`.
fn half_twist_perm(n: usize) -> Permutation {
    Permutation::from_raw((0..n).rev().collect())
}

fn is_half_twist(img: &[usize]) -> bool {
    let n = img.len();
    img.iter().enumerate().all(|(k, &x)| x == n - 1 - k)
}

fn is_identity(img: &[usize]) -> bool {
    img.iter().enumerate().all(|(k, &x)| x == k)
}

/// `τ(π) = w0 ∘ π ∘ w0`, the flip automorphism on simple elements.
fn tau(img: &[usize]) -> Vec<usize> {
    let n = img.len();
    (0..n).map(|k| n - 1 - img[n - 1 - k]).collect()
}

/// Makes the adjacent pair `(a, b)` left-weighted by sliding initial letters
/// of `b` onto the end of `a` while that keeps `a` simple. Returns true if
/// anything moved.
fn rebalance(a: &mut Vec<usize>, b: &mut Vec<usize>) -> bool {
    let n = a.len();
    // positions of values in b
    let mut pos = vec![0usize; n];
    for (k, &v) in b.iter().enumerate() {
        pos[v] = k;
    }
    let mut moved = false;
    loop {
        let mut any = false;
        // generator index i (0-based slot/value pair i, i+1)
        for i in 0..n - 1 {
            // σ_{i+1} left-divides b  <=>  value i sits right of value i+1
            // a · σ_{i+1} stays simple <=>  a[i] < a[i+1]
            while pos[i] > pos[i + 1] && a[i] < a[i + 1] {
                a.swap(i, i + 1);
                let (pi, pj) = (pos[i], pos[i + 1]);
                b.swap(pi, pj);
                pos.swap(i, i + 1);
                any = true;
                moved = true;
            }
        }
        if !any {
            return moved;
        }
    }
}

/// Incrementally maintained left-weighted factor list.
///
/// Factors are appended one at a time; after each append a worklist of
/// dirty adjacent pairs is drained, re-enqueuing both neighbors whenever a
/// rebalance moves crossings. Identity factors migrate to the tail (an
/// identity absorbs its whole right neighbor) and are trimmed, so the live
/// prefix stays close to the canonical length of the running product.
struct Normalizer {
    factors: Vec<Vec<usize>>,
    dirty: std::collections::VecDeque<usize>,
    queued: Vec<bool>,
}

impl Normalizer {
    fn new() -> Self {
        Normalizer {
            factors: Vec::new(),
            dirty: std::collections::VecDeque::new(),
            queued: Vec::new(),
        }
    }

    fn enqueue(&mut self, j: usize) {
        if j + 1 < self.factors.len() {
            if self.queued.len() < self.factors.len() {
                self.queued.resize(self.factors.len(), false);
            }
            if !self.queued[j] {
                self.queued[j] = true;
                self.dirty.push_back(j);
            }
        }
    }

    fn push(&mut self, f: Vec<usize>) {
        if is_identity(&f) {
            return;
        }
        self.factors.push(f);
        if self.factors.len() >= 2 {
            self.enqueue(self.factors.len() - 2);
        }
        while let Some(j) = self.dirty.pop_front() {
            self.queued[j] = false;
            if j + 1 >= self.factors.len() {
                continue;
            }
            let (left, right) = self.factors.split_at_mut(j + 1);
            if rebalance(&mut left[j], &mut right[0]) {
                if j > 0 {
                    self.enqueue(j - 1);
                }
                self.enqueue(j + 1);
            }
        }
        while self.factors.last().map_or(false, |f| is_identity(f)) {
            self.factors.pop();
        }
    }
}

/// Computes the Garside left normal form of a word.
pub fn normal_form(w: &BraidWord) -> NormalForm {
    let n = w.n();
    if n == 1 {
        return NormalForm {
            n,
            delta: 0,
            factors: Vec::new(),
        };
    }
    // Δ-free rewriting: σ_i stays simple, σ_i⁻¹ = Δ⁻¹ · (Δ σ_i⁻¹). Moving all
    // Δ⁻¹ to the front twists each factor by τ once per negative letter that
    // occurs later in the word; τ² = id so only the parity matters.
    let neg_total: usize = w.iter_letters().filter(|&(_, s)| s < 0).count();
    let mut neg_after = neg_total;
    let w0: Vec<usize> = (0..n).rev().collect();

    // Greedy compaction: extend the current simple factor while legal, then
    // feed completed factors into the incremental normalizer.
    let mut norm = Normalizer::new();
    let mut cur: Option<Vec<usize>> = None;
    for (i, s) in w.iter_letters() {
        let i0 = i - 1;
        if s > 0 {
            // simple factor s_i, twisted by τ^{neg_after}: τ(σ_i) = σ_{n−i}
            let j0 = if neg_after % 2 == 1 { n - 2 - i0 } else { i0 };
            match cur {
                Some(ref mut c) if c[j0] < c[j0 + 1] => {
                    c.swap(j0, j0 + 1);
                }
                _ => {
                    if let Some(c) = cur.take() {
                        norm.push(c);
                    }
                    let mut f: Vec<usize> = (0..n).collect();
                    f.swap(j0, j0 + 1);
                    cur = Some(f);
                }
            }
        } else {
            neg_after -= 1;
            // factor (Δ σ_i⁻¹) has permutation w0 ∘ s_i, then τ^{neg_after}.
            let mut f = w0.clone();
            f.swap(i0, i0 + 1);
            if neg_after % 2 == 1 {
                f = tau(&f);
            }
            if let Some(c) = cur.take() {
                norm.push(c);
            }
            norm.push(f);
        }
    }
    if let Some(c) = cur.take() {
        norm.push(c);
    }
    let mut delta = -(neg_total as i64);
    let mut factors = norm.factors;

    // Δ factors have collected on the left.
    let lead = factors.iter().take_while(|f| is_half_twist(f)).count();
    if lead > 0 {
        factors.drain(..lead);
        delta += lead as i64;
    }
    debug_assert!(factors
        .iter()
        .all(|f| !is_identity(f) && !is_half_twist(f)));
    debug_assert!((1..factors.len()).all(|j| {
        let mut a = factors[j - 1].clone();
        let mut b = factors[j].clone();
        !rebalance(&mut a, &mut b)
    }));

    NormalForm {
        n,
        delta,
        factors: factors.into_iter().map(Permutation::from_raw).collect(),
    }
}

/// Equality oracle: do `u` and `v` represent the same element of `B_n`?
pub fn equals(u: &BraidWord, v: &BraidWord) -> Result<bool, BraidError> {
    if u.n() != v.n() {
        return Err(BraidError::StrandMismatch {
            left: u.n(),
            right: v.n(),
        });
    }
    Ok(normal_form(u) == normal_form(v))
}

/// Is the word the identity braid?
pub fn is_trivial(u: &BraidWord) -> bool {
    normal_form(u).is_trivial()
}
