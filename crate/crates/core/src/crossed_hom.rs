//! The winding-number crossed homomorphism `φ_r`, the virtual undercrossing
//! map `Υ_r = (M, v)`, the comparison map between their value modules, and
//! kernel membership.
//!
//! `φ_r: B_n → (Z/rZ)^n` is determined by `φ(σ_i) = e_{i+1}` together with
//! twisted additivity over words. Processing letters in temporal order the
//! update reads
//!
//! ```text
//! φ(w · σ_i^{±1}) = s_i · φ(w) + φ(σ_i^{±1}),     φ(σ_i) = e_{i+1},  φ(σ_i⁻¹) = −e_i,
//! ```
//!
//! equivalently `φ(uv) = image(v)⁻¹·φ(u) + φ(v)`. Concretely each positive
//! crossing adds `+1` at the position where its overcrossing strand ends up
//! at the bottom of the diagram, which is why every basic twist `Σ_{a;r}`
//! (one strand crossing over `r` strands) has `φ_r = r · e_k = 0`.
//!
//! `Υ_r` tracks the same data as an affine action over `(Z/rZ)^{n+1}`: at a
//! crossing the count vector of virtual strands between adjacent strands is
//! updated by `x ↦ M(σ_i^{±1}) x + v(σ_i^{±1})`, and applying the letters of
//! a word top to bottom composes these affine maps.

use crate::braid::{BraidError, BraidWord};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossedHomError {
    #[error("modulus must be at least 2 for this operation, got r = {0}")]
    ModulusTooSmall(u64),
    #[error("parity obstruction needs an even modulus, got r = {0}")]
    OddModulus(u64),
    #[error("arc index {index} out of range 1..={n}")]
    ArcOutOfRange { n: usize, index: usize },
    #[error(transparent)]
    Braid(#[from] BraidError),
}

/// An element of `(Z/rZ)^len` (or `Z^len` when `r = 0`).
///
/// Indexing is explicit to avoid off-by-one confusion between the two value
/// modules: vectors of length `n` are indexed `1..=n` (the `φ_r` side),
/// vectors of length `n+1` are indexed `0..=n` (the `Υ_r` side).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueVector {
    r: u64,
    first_index: usize,
    entries: Vec<i64>,
}

impl ResidueVector {
    pub fn zero_phi(n: usize, r: u64) -> Self {
        ResidueVector {
            r,
            first_index: 1,
            entries: vec![0; n],
        }
    }

    pub fn zero_upsilon(n: usize, r: u64) -> Self {
        ResidueVector {
            r,
            first_index: 0,
            entries: vec![0; n + 1],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    /// Entry at the module's own index convention.
    pub fn get(&self, index: usize) -> i64 {
        self.entries[index - self.first_index]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add_at(&mut self, index: usize, value: i64) {
        let k = index - self.first_index;
        self.entries[k] = reduce(self.entries[k] + value, self.r);
    }

    fn reduce_all(&mut self) {
        for x in &mut self.entries {
            *x = reduce(*x, self.r);
        }
    }

    /// Sum of entries mod 2.
    pub fn parity_sum(&self) -> u8 {
        (self.entries.iter().map(|&x| x.rem_euclid(2)).sum::<i64>() % 2) as u8
    }
}

impl fmt::Display for ResidueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        if self.r == 0 {
            write!(f, "] over Z")
        } else {
            write!(f, "] mod {}", self.r)
        }
    }
}

fn reduce(x: i64, r: u64) -> i64 {
    if r == 0 {
        x
    } else {
        x.rem_euclid(r as i64)
    }
}

/// Evaluates `φ_r` on a word (`r = 0` gives the integral values).
pub fn phi(u: &BraidWord, r: u64) -> ResidueVector {
    let n = u.n();
    let mut v = ResidueVector::zero_phi(n, r);
    for (i, s) in u.iter_letters() {
        v.entries.swap(i - 1, i);
        if s > 0 {
            v.entries[i] += 1; // +e_{i+1}
        } else {
            v.entries[i - 1] -= 1; // −e_i
        }
    }
    v.reduce_all();
    v
}

/// The `i`-th component of `φ_r(u)`: the mod-`r` winding number of the image
/// of the `i`-th standard arc.
pub fn phi_component(u: &BraidWord, i: usize, r: u64) -> Result<i64, CrossedHomError> {
    if i < 1 || i > u.n() {
        return Err(CrossedHomError::ArcOutOfRange { n: u.n(), index: i });
    }
    Ok(phi(u, r).get(i))
}

/// An element of `GL_{n+1}(Z/rZ) ⋉ (Z/rZ)^{n+1}`.
///
/// Group law `(M₁,v₁)·(M₂,v₂) = (M₁M₂, M₁v₂ + v₁)`; the affine action is
/// `x ↦ Mx + v`. Columns of `M` are stored densely; indices run `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpsilonElement {
    n: usize,
    r: u64,
    /// column-major: `cols[j][i]` is the matrix entry `M[i][j]`
    cols: Vec<Vec<i64>>,
    v: ResidueVector,
}

impl UpsilonElement {
    pub fn identity(n: usize, r: u64) -> Self {
        let dim = n + 1;
        let mut cols = vec![vec![0i64; dim]; dim];
        for (j, col) in cols.iter_mut().enumerate() {
            col[j] = 1;
        }
        UpsilonElement {
            n,
            r,
            cols,
            v: ResidueVector::zero_upsilon(n, r),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.r
    }

    pub fn translation(&self) -> &ResidueVector {
        &self.v
    }

    /// Matrix entry, indices in `0..=n`.
    pub fn matrix_entry(&self, row: usize, col: usize) -> i64 {
        self.cols[col][row]
    }

    pub fn matrix_is_identity(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(j, col)| col.iter().enumerate().all(|(i, &x)| x == i64::from(i == j)))
    }

    /// Affine action `x ↦ Mx + v`.
    pub fn act(&self, x: &ResidueVector) -> ResidueVector {
        debug_assert_eq!(x.len(), self.n + 1);
        let dim = self.n + 1;
        let mut out = vec![0i64; dim];
        for j in 0..dim {
            let xj = x.entries[j];
            if xj != 0 {
                for i in 0..dim {
                    out[i] += self.cols[j][i] * xj;
                }
            }
        }
        for i in 0..dim {
            out[i] = reduce(out[i] + self.v.entries[i], self.r);
        }
        ResidueVector {
            r: self.r,
            first_index: 0,
            entries: out,
        }
    }

    /// Left-multiplies by the image of a single letter:
    /// `self ← Υ(σ_i^{±1}) · self`.
    ///
    /// `Υ(σ_i) = (P_i, e_{i+1} − e_i)` and `Υ(σ_i⁻¹) = (P_i, e_{i−1} − e_i)`,
    /// where `P_i` is the identity with column `i` replaced by
    /// `e_{i−1} − e_i + e_{i+1}` (an involution).
    fn left_mul_letter(&mut self, i: usize, sign: i8) {
        let dim = self.n + 1;
        // M ← P_i · M: rows i−1 and i+1 gain the old row i, row i negates.
        for col in self.cols.iter_mut() {
            let mid = col[i];
            col[i - 1] = reduce(col[i - 1] + mid, self.r);
            col[i + 1] = reduce(col[i + 1] + mid, self.r);
            col[i] = reduce(-mid, self.r);
        }
        // v ← P_i · v + v_letter
        let mid = self.v.entries[i];
        self.v.entries[i - 1] += mid;
        self.v.entries[i + 1] += mid;
        self.v.entries[i] = -mid;
        if sign > 0 {
            self.v.entries[i + 1] += 1;
            self.v.entries[i] -= 1;
        } else {
            self.v.entries[i - 1] += 1;
            self.v.entries[i] -= 1;
        }
        for k in 0..dim {
            self.v.entries[k] = reduce(self.v.entries[k], self.r);
        }
    }
}

/// Evaluates `Υ_r` on a word. Requires `r ≥ 2` (the matrices live over
/// `Z/rZ`).
pub fn upsilon(u: &BraidWord, r: u64) -> Result<UpsilonElement, CrossedHomError> {
    if r < 2 {
        return Err(CrossedHomError::ModulusTooSmall(r));
    }
    let mut acc = UpsilonElement::identity(u.n(), r);
    // The element of a word is the composite of its letters applied in
    // temporal order, so each new letter multiplies on the left.
    for (i, s) in u.iter_letters() {
        acc.left_mul_letter(i, s);
    }
    Ok(acc)
}

/// The comparison map `f: (Z/rZ)^n → (Z/rZ)^{n+1}`, `e_i ↦ e_i − e_{i−1}`.
pub fn comparison_f(x: &ResidueVector) -> ResidueVector {
    debug_assert_eq!(x.first_index(), 1);
    let n = x.len();
    let mut out = ResidueVector::zero_upsilon(n, x.modulus());
    for i in 1..=n {
        let c = x.get(i);
        out.add_at(i, c);
        out.add_at(i - 1, -c);
    }
    out
}

/// Kernel membership: `φ_r(u) = 0`. Cross-checked against the translation
/// part of `Υ_r` in debug builds (the two kernels coincide).
pub fn in_kernel(u: &BraidWord, r: u64) -> Result<bool, CrossedHomError> {
    if r < 2 {
        return Err(CrossedHomError::ModulusTooSmall(r));
    }
    let ker = phi(u, r).is_zero();
    debug_assert_eq!(ker, upsilon(u, r)?.translation().is_zero());
    Ok(ker)
}

/// The parity obstruction `(sgn + s) ∘ φ_r` for even `r`: sign of the
/// permutation image plus the mod-2 coefficient sum of `φ_r`. Identically
/// zero on all of `B_n`.
pub fn parity_obstruction(u: &BraidWord, r: u64) -> Result<u8, CrossedHomError> {
    if r == 0 || r % 2 != 0 {
        return Err(CrossedHomError::OddModulus(r));
    }
    let sgn = u.permutation_image().parity();
    let s = phi(u, r).parity_sum();
    Ok((sgn + s) % 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{basic_twist_word, pure_gen_word, sigma, BraidWord};

    fn w(n: usize, text: &str) -> BraidWord {
        BraidWord::parse(n, text).unwrap()
    }

    fn e(n: usize, r: u64, idx: &[usize]) -> ResidueVector {
        let mut v = ResidueVector::zero_phi(n, r);
        for &i in idx {
            v.add_at(i, 1);
        }
        v
    }

    #[test]
    fn phi_on_generators() {
        assert_eq!(phi(&w(4, "+1"), 2), e(4, 2, &[2]));
        assert_eq!(phi(&w(3, "+1 +1"), 5), e(3, 5, &[1, 2]));
        assert!(phi(&w(4, "+1 +1 +1 +1"), 2).is_zero());
        assert!(phi(&BraidWord::identity(4), 3).is_zero());
        // integral values supported
        let v = phi(&w(3, "-1"), 0);
        assert_eq!(v.get(1), -1);
        assert_eq!(v.get(2), 0);
    }

    #[test]
    fn phi_kills_basic_twists() {
        for r in 2..=6u64 {
            for n in (r as usize + 1)..=(r as usize + 4) {
                for a in 1..=(n - r as usize) {
                    let t = basic_twist_word(n, a, r as usize).unwrap();
                    assert!(phi(&t, r).is_zero(), "phi(S_{{{a};{r}}}) != 0 in B_{n}");
                }
            }
        }
        // integrally: φ(Σ_{a;r}) = r · e_{a+r}
        let t = basic_twist_word(7, 2, 3).unwrap();
        let v = phi(&t, 0);
        assert_eq!(v.get(5), 3);
        assert_eq!(v.entries().iter().sum::<i64>(), 3);
    }

    #[test]
    fn phi_on_pure_generators() {
        for r in [2u64, 3, 4, 5] {
            for n in 2..=10usize {
                for i in 1..n {
                    for j in (i + 1)..=n {
                        let a = pure_gen_word(n, i, j).unwrap();
                        let v = phi(&a, r);
                        let mut expect = ResidueVector::zero_phi(n, r);
                        expect.add_at(i, 1);
                        expect.add_at(j, 1);
                        assert_eq!(v, expect, "phi(A_{{{i},{j}}}) in B_{n} mod {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_twisted_additivity() {
        // φ(concat(u,v)) = image(v)⁻¹·φ(u) + φ(v)
        let u = w(5, "+1 -3 +2 +4");
        let v = w(5, "-2 +3 +1 -4 +1");
        let r = 7u64;
        let lhs = phi(&u.concat(&v).unwrap(), r);
        let pv = v.permutation_image().inverse();
        let pu = phi(&u, r);
        let mut rhs = phi(&v, r);
        for i in 1..=5 {
            rhs.add_at(pv.apply(i), pu.get(i));
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn upsilon_generator_images() {
        // Υ(σ_1) = (P_1, e_2 − e_1) in B_3
        let u = upsilon(&w(3, "+1"), 5).unwrap();
        assert_eq!(u.translation().get(2), 1);
        assert_eq!(u.translation().get(1), 4);
        // P_1: column 1 replaced by e_0 − e_1 + e_2
        assert_eq!(u.matrix_entry(0, 1), 1);
        assert_eq!(u.matrix_entry(1, 1), 4);
        assert_eq!(u.matrix_entry(2, 1), 1);
        assert_eq!(u.matrix_entry(0, 0), 1);
        assert_eq!(u.matrix_entry(2, 2), 1);
        // identity on the empty word
        let id = upsilon(&BraidWord::identity(3), 4).unwrap();
        assert!(id.matrix_is_identity());
        assert!(id.translation().is_zero());
    }

    #[test]
    fn upsilon_sigma1_squared_v_part() {
        // v-part of Υ(σ_1²) in B_3 mod 2 is e_0 + e_2
        let u = upsilon(&w(3, "+1 +1"), 2).unwrap();
        let v = u.translation();
        assert_eq!(v.get(0), 1);
        assert_eq!(v.get(1), 0);
        assert_eq!(v.get(2), 1);
        assert_eq!(v.get(3), 0);
    }

    #[test]
    fn fig_trace_values() {
        // v(σ_1^k) mod 2 in B_4 for k = 0..4: the red numbers of the worked
        // σ_1⁴ factorization example.
        let expect: [&[i64]; 5] = [
            &[0, 0, 0, 0, 0],
            &[0, 1, 1, 0, 0],
            &[1, 0, 1, 0, 0],
            &[1, 1, 0, 0, 0],
            &[0, 0, 0, 0, 0],
        ];
        for k in 0..=4 {
            let word = BraidWord::from_letters(4, vec![1; k]).unwrap();
            let v = upsilon(&word, 2).unwrap();
            assert_eq!(v.translation().entries(), expect[k], "k = {k}");
        }
    }

    #[test]
    fn upsilon_respects_braid_relations() {
        for r in 2..=6u64 {
            for n in 3..=8usize {
                for i in 1..(n - 1) {
                    let a = w(n, &format!("+{i} +{} +{i}", i + 1));
                    let b = w(n, &format!("+{} +{i} +{}", i + 1, i + 1));
                    assert_eq!(upsilon(&a, r).unwrap(), upsilon(&b, r).unwrap());
                }
                for i in 1..n {
                    for j in (i + 2)..n {
                        let a = w(n, &format!("+{i} +{j}"));
                        let b = w(n, &format!("+{j} +{i}"));
                        assert_eq!(upsilon(&a, r).unwrap(), upsilon(&b, r).unwrap());
                    }
                }
                // inverses
                for i in 1..n {
                    let a = w(n, &format!("+{i} -{i}"));
                    let u = upsilon(&a, r).unwrap();
                    assert!(u.matrix_is_identity());
                    assert!(u.translation().is_zero());
                }
            }
        }
    }

    #[test]
    fn comparison_map_intertwines() {
        // f(φ(u)) = v-part of Υ(u)
        for (n, text) in [
            (3, "+1 +2"),
            (4, "+1 -2 +3 +1"),
            (5, "+4 -4 +2 +2 -1 +3"),
            (4, ""),
        ] {
            for r in 2..=5u64 {
                let u = w(n, text);
                let lhs = comparison_f(&phi(&u, r));
                let rhs = upsilon(&u, r).unwrap();
                assert_eq!(&lhs, rhs.translation(), "word {text:?} mod {r}");
            }
        }
        assert!(comparison_f(&ResidueVector::zero_phi(4, 3)).is_zero());
        // f(e_2) = e_2 − e_1
        let mut x = ResidueVector::zero_phi(3, 5);
        x.add_at(2, 1);
        let y = comparison_f(&x);
        assert_eq!(y.get(2), 1);
        assert_eq!(y.get(1), 4);
        assert_eq!(y.get(0), 0);
    }

    #[test]
    fn kernel_membership() {
        assert!(in_kernel(&w(4, "+1 +1 +1 +1"), 2).unwrap());
        assert!(!in_kernel(&w(4, "+1"), 2).unwrap());
        for r in 2..=5u64 {
            let t = basic_twist_word(8, 3, r as usize).unwrap();
            assert!(in_kernel(&t, r).unwrap());
        }
        assert!(in_kernel(&BraidWord::identity(3), 2).unwrap());
    }

    #[test]
    fn pure_kernel_elements_act_trivially() {
        // pure words in the kernel have M = I and v = 0
        let a = pure_gen_word(6, 1, 2).unwrap();
        let mut word = BraidWord::identity(6);
        for _ in 0..2 {
            word = word.concat(&a).unwrap();
        }
        let u = upsilon(&word, 2).unwrap();
        assert!(u.matrix_is_identity());
        assert!(u.translation().is_zero());
        // and the affine action fixes arbitrary vectors
        let mut x = ResidueVector::zero_upsilon(6, 2);
        x.add_at(0, 1);
        x.add_at(3, 1);
        assert_eq!(u.act(&x), x);
    }

    #[test]
    fn parity_obstruction_vanishes() {
        for r in [2u64, 4, 6] {
            for i in 1..4 {
                assert_eq!(parity_obstruction(&sigma(4, i, 1).unwrap(), r).unwrap(), 0);
            }
            assert_eq!(
                parity_obstruction(&w(5, "+1 -2 +3 +4 -1 +2 +2"), r).unwrap(),
                0
            );
            assert_eq!(parity_obstruction(&BraidWord::identity(2), 2).unwrap(), 0);
        }
        assert!(parity_obstruction(&w(3, "+1"), 3).is_err());
    }
}
