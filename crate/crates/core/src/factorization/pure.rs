//! Factoring pure kernel braids into basic twists.
//!
//! The pipeline: a pure braid is rewritten as a word in the standard pure
//! braid generators `A_{ij}`; an initial-segment normal form is then grown
//! letter by letter, and every rewriting step is an element of `ker(φ_r)`
//! supported on a few points of a standard embedding, which the packet
//! algorithm converts into basic twists. Three regimes:
//!
//! * `r = 2`: the normal form is a family of `A_{ab}^{±1}` with pairwise
//!   disjoint, un-nested supports; kernel-ness forces the family to cancel.
//! * `r` odd: strands are grouped into blocks of three (the last takes the
//!   remainder) and each block carries a triple element `A_{i;a,b,c}` whose
//!   `φ_r` is an arbitrary residue triple.
//! * `r ≥ 4` even: as for odd `r`, but a triple element needs an even
//!   parameter sum, so blocks of odd parameter sum are linked in pairs by a
//!   single `A_{ij}`; the links evolve exactly like the `r = 2` family at
//!   block granularity.

use super::embedding::{run_packet_algorithm, StandardEmbedding};
use super::{FactorError, TwistWord};
use crate::braid::{pure_gen_word, BraidWord};
use crate::crossed_hom::phi;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// One letter `A_{ij}^{±1}` of a pure braid word (`i < j`, 1-based strands).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureLetter {
    pub i: usize,
    pub j: usize,
    pub sign: i8,
}

impl PureLetter {
    pub fn new(i: usize, j: usize, sign: i8) -> Self {
        debug_assert!(i < j && sign != 0);
        PureLetter { i, j, sign }
    }

    pub fn inverse(self) -> Self {
        PureLetter {
            sign: -self.sign,
            ..self
        }
    }
}

/// A word in the standard pure braid generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureWord {
    pub n: usize,
    pub letters: Vec<PureLetter>,
}

impl PureWord {
    pub fn new(n: usize, letters: Vec<PureLetter>) -> Self {
        PureWord { n, letters }
    }

    pub fn expand(&self) -> Result<BraidWord, FactorError> {
        let mut out = BraidWord::identity(self.n);
        for lt in &self.letters {
            let base = pure_gen_word(self.n, lt.i, lt.j)?;
            let base = if lt.sign > 0 { base } else { base.inverse() };
            out = out.concat(&base)?;
        }
        Ok(out)
    }

    /// `φ_r` of the word: the pure restriction is a homomorphism, so this is
    /// just `Σ sign·(e_i + e_j)` reduced mod `r`.
    pub fn phi_vec(&self, r: u64) -> Vec<i64> {
        let mut v = vec![0i64; self.n];
        for lt in &self.letters {
            v[lt.i - 1] += i64::from(lt.sign);
            v[lt.j - 1] += i64::from(lt.sign);
        }
        if r > 0 {
            for x in &mut v {
                *x = x.rem_euclid(r as i64);
            }
        }
        v
    }

    pub fn free_reduce(&mut self) {
        let mut out: Vec<PureLetter> = Vec::with_capacity(self.letters.len());
        for &lt in &self.letters {
            if let Some(&last) = out.last() {
                if last.i == lt.i && last.j == lt.j && last.sign == -lt.sign {
                    out.pop();
                    continue;
                }
            }
            out.push(lt);
        }
        self.letters = out;
    }
}

fn free_reduce_letters(letters: Vec<PureLetter>) -> Vec<PureLetter> {
    let mut out: Vec<PureLetter> = Vec::with_capacity(letters.len());
    for lt in letters {
        if let Some(&last) = out.last() {
            if last.i == lt.i && last.j == lt.j && last.sign == -lt.sign {
                out.pop();
                continue;
            }
        }
        out.push(lt);
    }
    out
}

/// The upper band around `i < j`:
/// `σ_{j−1}⁻¹ ⋯ σ_{i+1}⁻¹ σ_i² σ_{i+1} ⋯ σ_{j−1}`, the mirror of `A_{ij}`
/// under the automorphism `σ_k ↦ σ_k⁻¹`.
///
/// The factorization machinery works with upper bands internally because
/// the packet algorithm keeps the supported strands on top of the spare
/// ones, and the inclusion of a standard subdisk consistent with that
/// layering sends sub-disk upper bands to ambient upper bands.
pub(crate) fn upper_gen_word(n: usize, i: usize, j: usize) -> Result<BraidWord, FactorError> {
    if i < 1 || i >= j || j > n {
        return Err(FactorError::BadEmbedding { n });
    }
    let mut letters: Vec<i32> = Vec::with_capacity(2 * (j - i));
    for k in ((i + 1)..j).rev() {
        letters.push(-(k as i32));
    }
    letters.push(i as i32);
    letters.push(i as i32);
    for k in (i + 1)..j {
        letters.push(k as i32);
    }
    Ok(BraidWord::from_letters(n, letters)?)
}

fn expand_upper(n: usize, letters: &[PureLetter]) -> Result<BraidWord, FactorError> {
    let mut out = BraidWord::identity(n);
    for lt in letters {
        let base = upper_gen_word(n, lt.i, lt.j)?;
        let base = if lt.sign > 0 { base } else { base.inverse() };
        out = out.concat(&base)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Conjugation of band generators by single Artin generators.
//
// The six nontrivial cases of σ_k^{±1} A_{ij} σ_k^{∓1} as short A-words,
// verified exhaustively against the normal form oracle in the tests. The
// upper-band table is obtained from the lower one through the mirror
// automorphism, which flips the conjugating sign and reverses the output.
// ---------------------------------------------------------------------------

fn conj_pos(k: usize, i: usize, j: usize) -> Vec<PureLetter> {
    if k == i && j == i + 1 {
        vec![PureLetter::new(i, j, 1)]
    } else if k + 1 == i {
        vec![
            PureLetter::new(i - 1, i, 1),
            PureLetter::new(i - 1, j, 1),
            PureLetter::new(i - 1, i, -1),
        ]
    } else if k == i {
        vec![PureLetter::new(i + 1, j, 1)]
    } else if k + 1 == j {
        vec![
            PureLetter::new(j - 1, j, 1),
            PureLetter::new(i, j - 1, 1),
            PureLetter::new(j - 1, j, -1),
        ]
    } else if k == j {
        vec![PureLetter::new(i, j + 1, 1)]
    } else {
        vec![PureLetter::new(i, j, 1)]
    }
}

fn conj_neg(k: usize, i: usize, j: usize) -> Vec<PureLetter> {
    if k == i && j == i + 1 {
        vec![PureLetter::new(i, j, 1)]
    } else if k + 1 == i {
        vec![PureLetter::new(i - 1, j, 1)]
    } else if k == i {
        vec![
            PureLetter::new(i, i + 1, -1),
            PureLetter::new(i + 1, j, 1),
            PureLetter::new(i, i + 1, 1),
        ]
    } else if k + 1 == j {
        vec![PureLetter::new(i, j - 1, 1)]
    } else if k == j {
        vec![
            PureLetter::new(j, j + 1, -1),
            PureLetter::new(i, j + 1, 1),
            PureLetter::new(j, j + 1, 1),
        ]
    } else {
        vec![PureLetter::new(i, j, 1)]
    }
}

/// `σ_k^{eps} · lt · σ_k^{-eps}` as an A-word (lower bands).
pub(crate) fn conjugate_letter(k: usize, eps: i8, lt: PureLetter) -> Vec<PureLetter> {
    let base = if eps > 0 {
        conj_pos(k, lt.i, lt.j)
    } else {
        conj_neg(k, lt.i, lt.j)
    };
    if lt.sign > 0 {
        base
    } else {
        base.into_iter().rev().map(PureLetter::inverse).collect()
    }
}

/// `σ_k^{eps} · lt · σ_k^{-eps}` for an upper-band letter, as upper bands.
///
/// With `m` the mirror automorphism `σ ↦ σ⁻¹` one has `U = m(A⁻¹)`, so the
/// conjugate is `m` of an inverted lower-band conjugation: reverse the
/// mirrored-case output and keep the signs.
pub(crate) fn conjugate_letter_upper(k: usize, eps: i8, lt: PureLetter) -> Vec<PureLetter> {
    let base = if eps > 0 {
        conj_neg(k, lt.i, lt.j)
    } else {
        conj_pos(k, lt.i, lt.j)
    };
    let base: Vec<PureLetter> = base.into_iter().rev().collect();
    if lt.sign > 0 {
        base
    } else {
        base.into_iter().rev().map(PureLetter::inverse).collect()
    }
}

fn conjugate_word(conj: &[usize], center: Vec<PureLetter>, upper: bool) -> Vec<PureLetter> {
    let mut cur = center;
    for &k in conj.iter().rev() {
        let mut next = Vec::with_capacity(cur.len());
        for lt in cur {
            if upper {
                next.extend(conjugate_letter_upper(k, 1, lt));
            } else {
                next.extend(conjugate_letter(k, 1, lt));
            }
        }
        cur = free_reduce_letters(next);
    }
    cur
}

/// Rewrites one lower-band letter `A_{ij}^{±1}` as a word in upper bands:
/// `A_{ij} = σ_{j−1} ⋯ σ_{i+1} · U_{i,i+1} · σ_{i+1}⁻¹ ⋯ σ_{j−1}⁻¹`.
fn lower_letter_to_upper(lt: PureLetter) -> Vec<PureLetter> {
    let conj: Vec<usize> = ((lt.i + 1)..lt.j).rev().collect();
    conjugate_word(&conj, vec![PureLetter::new(lt.i, lt.i + 1, lt.sign)], true)
}

fn lower_word_to_upper(letters: &[PureLetter]) -> Vec<PureLetter> {
    let mut out = Vec::new();
    for &lt in letters {
        out.extend(lower_letter_to_upper(lt));
    }
    free_reduce_letters(out)
}

/// A positive reduced word for the permutation braid with image vector
/// `img` (0-based "start of strand ending at slot" images).
fn simple_braid_word(img: &[usize]) -> Vec<usize> {
    let mut img = img.to_vec();
    let n = img.len();
    let mut peeled: Vec<usize> = Vec::new();
    loop {
        let mut done = true;
        for k in 0..n - 1 {
            if img[k] > img[k + 1] {
                peeled.push(k + 1);
                img.swap(k, k + 1);
                done = false;
            }
        }
        if done {
            break;
        }
    }
    peeled.reverse();
    peeled
}

/// Rewrites a pure braid word as a word in the generators `A_{ij}`.
///
/// Walks the word keeping the canonical permutation-braid lift of each
/// prefix permutation; a letter either extends the lift (and contributes
/// nothing) or backtracks it, in which case the telescoped piece is
/// `c σ_i^{±2} c⁻¹` for a permutation braid `c`, rewritten into `A`-letters
/// by iterated single-generator conjugation.
pub fn pure_word_to_generators(u: &BraidWord) -> Result<PureWord, FactorError> {
    Ok(PureWord {
        n: u.n(),
        letters: telescope(u, false)?,
    })
}

/// The same telescope producing upper-band letters (the machine-internal
/// alphabet).
fn telescope_upper(u: &BraidWord) -> Result<Vec<PureLetter>, FactorError> {
    telescope(u, true)
}

fn telescope(u: &BraidWord, upper: bool) -> Result<Vec<PureLetter>, FactorError> {
    if !u.is_pure() {
        return Err(FactorError::NotPure);
    }
    let n = u.n();
    let mut img: Vec<usize> = (0..n).collect();
    let mut letters: Vec<PureLetter> = Vec::new();
    for (i, s) in u.iter_letters() {
        let i0 = i - 1;
        let ascent = img[i0] < img[i0 + 1];
        if s > 0 {
            if ascent {
                img.swap(i0, i0 + 1);
            } else {
                img.swap(i0, i0 + 1);
                let conj = simple_braid_word(&img);
                let center = vec![PureLetter::new(i, i + 1, 1)];
                letters.extend(conjugate_word(&conj, center, upper));
            }
        } else if ascent {
            let conj = simple_braid_word(&img);
            let center = vec![PureLetter::new(i, i + 1, -1)];
            letters.extend(conjugate_word(&conj, center, upper));
            img.swap(i0, i0 + 1);
        } else {
            img.swap(i0, i0 + 1);
        }
    }
    Ok(free_reduce_letters(letters))
}

// ---------------------------------------------------------------------------
// Triple block elements.
// ---------------------------------------------------------------------------

fn minimal_abs_residue(x: i64, r: u64) -> i64 {
    let r = r as i64;
    let m = x.rem_euclid(r);
    if 2 * m > r {
        m - r
    } else {
        m
    }
}

/// A-letters for the triple element with `φ_r = a·e_i + b·e_{i+1} + c·e_{i+2}`.
fn triple_letters(i: usize, a: i64, b: i64, c: i64, r: u64) -> Result<Vec<PureLetter>, FactorError> {
    let (e1, e2, e3) = if r % 2 == 1 {
        let p = (r as i64 + 1) / 2;
        (
            minimal_abs_residue(p * (a + b - c), r),
            minimal_abs_residue(p * (a - b + c), r),
            minimal_abs_residue(p * (-a + b + c), r),
        )
    } else {
        let sum = a + b + c;
        if sum.rem_euclid(2) != 0 {
            return Err(FactorError::TripleParity { r, sum });
        }
        (
            minimal_abs_residue((a + b - c).div_euclid(2), r),
            minimal_abs_residue((a - b + c).div_euclid(2), r),
            minimal_abs_residue((-a + b + c).div_euclid(2), r),
        )
    };
    let mut out = Vec::new();
    for (pair, e) in [((i, i + 1), e1), ((i, i + 2), e2), ((i + 1, i + 2), e3)] {
        let sign = if e >= 0 { 1 } else { -1 };
        for _ in 0..e.unsigned_abs() {
            out.push(PureLetter::new(pair.0, pair.1, sign));
        }
    }
    Ok(out)
}

/// The pure braid word `A_{i;a,b,c}` with
/// `φ_r = a·e_i + b·e_{i+1} + c·e_{i+2}`, built from
/// `A_{i,i+1}, A_{i,i+2}, A_{i+1,i+2}` powers. Odd `r` uses the half-integer
/// trick `p = (r+1)/2`; even `r` requires `a + b + c` even and divides by
/// two directly.
pub fn triple_block_word(
    n: usize,
    i: usize,
    a: i64,
    b: i64,
    c: i64,
    r: u64,
) -> Result<BraidWord, FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
    }
    let letters = triple_letters(i, a, b, c, r)?;
    PureWord::new(n, letters).expand()
}

// ---------------------------------------------------------------------------
// Blocks of strands (for r >= 3).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Block {
    start: usize,
    len: usize,
}

fn make_blocks(n: usize) -> Vec<Block> {
    let k = (n / 3).max(1);
    let mut blocks = Vec::with_capacity(k);
    for b in 0..k {
        let start = 3 * b + 1;
        let len = if b + 1 == k { n - 3 * b } else { 3 };
        blocks.push(Block { start, len });
    }
    blocks
}

fn block_of(blocks: &[Block], strand: usize) -> usize {
    let b = (strand - 1) / 3;
    b.min(blocks.len() - 1)
}

/// Realization of one block's parameter vector as A-letters. Blocks of
/// length 4 and 5 are covered by two overlapping triples; for even `r` the
/// overlap coefficient fixes the parity of each triple's parameter sum.
fn block_element(block: Block, params: &[i64], r: u64) -> Result<Vec<PureLetter>, FactorError> {
    debug_assert_eq!(block.len, params.len());
    let s = block.start;
    match block.len {
        0 | 1 | 2 => {
            // degenerate blocks only arise for tiny n in force mode
            if params.iter().all(|&p| p % r as i64 == 0) {
                Ok(Vec::new())
            } else {
                Err(FactorError::BorrowFailed { r })
            }
        }
        3 => triple_letters(s, params[0], params[1], params[2], r),
        4 => {
            let c1 = if r % 2 == 1 {
                params[2]
            } else {
                (params[0] + params[1]).rem_euclid(2)
            };
            let mut out = triple_letters(s, params[0], params[1], c1, r)?;
            out.extend(triple_letters(
                s + 1,
                0,
                (params[2] - c1).rem_euclid(r as i64),
                params[3],
                r,
            )?);
            Ok(out)
        }
        5 => {
            let c1 = if r % 2 == 1 {
                params[2]
            } else {
                (params[0] + params[1]).rem_euclid(2)
            };
            let mut out = triple_letters(s, params[0], params[1], c1, r)?;
            out.extend(triple_letters(
                s + 2,
                (params[2] - c1).rem_euclid(r as i64),
                params[3],
                params[4],
                r,
            )?);
            Ok(out)
        }
        _ => unreachable!("blocks have at most 5 strands"),
    }
}

// ---------------------------------------------------------------------------
// Emission of a kernel correction through the packet algorithm.
// ---------------------------------------------------------------------------

struct Emitter {
    n: usize,
    r: u64,
    force: bool,
    out: TwistWord,
}

impl Emitter {
    /// Factors a kernel element given as upper-band letters, supported on
    /// few points, through the packet algorithm on the standard embedding
    /// of its support. Upper bands restrict to upper bands of the subdisk,
    /// so the reindexed word maps back to the correction exactly.
    fn emit(&mut self, letters: Vec<PureLetter>) -> Result<(), FactorError> {
        let letters = free_reduce_letters(letters);
        if letters.is_empty() {
            return Ok(());
        }
        let mut support: Vec<usize> = letters.iter().flat_map(|lt| [lt.i, lt.j]).collect();
        support.sort_unstable();
        support.dedup();
        let rank = |p: usize| support.binary_search(&p).unwrap() + 1;
        let sub: Vec<PureLetter> = letters
            .iter()
            .map(|lt| PureLetter::new(rank(lt.i), rank(lt.j), lt.sign))
            .collect();
        let alpha = expand_upper(support.len(), &sub)?;
        let embedding = StandardEmbedding::new(self.n, support)?;
        let (tw, _) = run_packet_algorithm(&alpha, &embedding, self.r, false, self.force)?;
        self.out.extend(&tw);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The un-nesting merge engine, shared by r = 2 (points = strands) and
// even r >= 4 (points = blocks).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MEntry {
    a: usize,
    b: usize,
    sign: i8,
}

#[derive(Debug, Clone, Copy)]
struct MLetter {
    a: usize,
    b: usize,
    sign: i8,
    /// ambient strands realizing the endpoints (anchors for pendings)
    sa: usize,
    sb: usize,
}

trait MergeSink {
    fn anchor(&self, point: usize) -> usize;
    fn correction(
        &mut self,
        consumed: &[MEntry],
        letter: Option<MLetter>,
        produced: &[MEntry],
    ) -> Result<(), FactorError>;
}

fn shares(e: &MEntry, a: usize, b: usize) -> bool {
    e.a == a || e.a == b || e.b == a || e.b == b
}

fn crosses(e: &MEntry, a: usize, b: usize) -> bool {
    (e.a < a && a < e.b && e.b < b) || (a < e.a && e.a < b && b < e.b)
}

fn nests(e: &MEntry, a: usize, b: usize) -> bool {
    (e.a < a && b < e.b) || (a < e.a && e.b < b)
}

/// Points of the union appearing exactly once, sorted.
fn odd_points(supports: &[(usize, usize)]) -> Vec<usize> {
    let mut pts: Vec<usize> = supports.iter().flat_map(|&(a, b)| [a, b]).collect();
    pts.sort_unstable();
    let mut out = Vec::new();
    let mut k = 0;
    while k < pts.len() {
        let mut m = k + 1;
        while m < pts.len() && pts[m] == pts[k] {
            m += 1;
        }
        if (m - k) % 2 == 1 {
            out.push(pts[k]);
        }
        k = m;
    }
    out
}

fn entries_from_odd(pts: &[usize]) -> Vec<MEntry> {
    debug_assert!(pts.len() % 2 == 0 && pts.len() <= 4);
    pts.chunks(2)
        .map(|c| MEntry {
            a: c[0],
            b: c[1],
            sign: 1,
        })
        .collect()
}

struct MergeEngine<'s, S: MergeSink> {
    sink: &'s mut S,
    family: Vec<MEntry>,
    queue: VecDeque<MLetter>,
}

impl<'s, S: MergeSink> MergeEngine<'s, S> {
    fn new(sink: &'s mut S) -> Self {
        MergeEngine {
            sink,
            family: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn entry_as_letter(&self, e: MEntry) -> MLetter {
        MLetter {
            a: e.a,
            b: e.b,
            sign: e.sign,
            sa: self.sink.anchor(e.a),
            sb: self.sink.anchor(e.b),
        }
    }

    fn push_front_entries(&mut self, entries: &[MEntry]) {
        for &e in entries.iter().rev() {
            let l = self.entry_as_letter(e);
            self.queue.push_front(l);
        }
    }

    fn feed(&mut self, letter: MLetter) -> Result<(), FactorError> {
        if std::env::var("MERGE_DEBUG").is_ok() {
            eprintln!("feed ({},{})^{} strands ({},{}), family {:?}", letter.a, letter.b, letter.sign, letter.sa, letter.sb, self.family);
        }
        self.queue.push_back(letter);
        let mut fuel = 10_000usize;
        while let Some(y) = self.queue.pop_front() {
            fuel = fuel
                .checked_sub(1)
                .ok_or(FactorError::CertificationFailed)?;
            self.merge_one(y)?;
        }
        Ok(())
    }

    fn merge_one(&mut self, y: MLetter) -> Result<(), FactorError> {
        // same support: combine exponents and retire
        if let Some(k) = self
            .family
            .iter()
            .position(|e| e.a == y.a && e.b == y.b)
        {
            let e = self.family.remove(k);
            self.sink.correction(&[e], Some(y), &[])?;
            return Ok(());
        }
        let h: Vec<usize> = self
            .family
            .iter()
            .enumerate()
            .filter(|(_, e)| shares(e, y.a, y.b) || crosses(e, y.a, y.b))
            .map(|(k, _)| k)
            .collect();
        match h.len() {
            0 => {
                if let Some(k) = self
                    .family
                    .iter()
                    .position(|e| nests(e, y.a, y.b))
                {
                    // un-nest against one nesting partner
                    let e = self.family.remove(k);
                    let mut pts = vec![e.a, e.b, y.a, y.b];
                    pts.sort_unstable();
                    let produced = entries_from_odd(&pts);
                    self.sink.correction(&[e], Some(y), &produced)?;
                    self.push_front_entries(&produced);
                } else {
                    let entry = MEntry {
                        a: y.a,
                        b: y.b,
                        sign: y.sign,
                    };
                    self.sink.correction(&[], Some(y), &[entry])?;
                    self.family.push(entry);
                }
            }
            1 => {
                let e = self.family.remove(h[0]);
                let odd = odd_points(&[(e.a, e.b), (y.a, y.b)]);
                let produced = entries_from_odd(&odd);
                self.sink.correction(&[e], Some(y), &produced)?;
                self.push_front_entries(&produced);
            }
            2 => {
                let (k1, k2) = if self.family[h[0]].a < self.family[h[1]].a {
                    (h[0], h[1])
                } else {
                    (h[1], h[0])
                };
                let j1 = self.family[k1];
                let j2 = self.family[k2];
                // remove higher index first
                let (hi, lo) = if k1 > k2 { (k1, k2) } else { (k2, k1) };
                self.family.remove(hi);
                self.family.remove(lo);
                let (a1, b1) = (j1.a, j1.b);
                let (a2, b2) = (j2.a, j2.b);
                let (c, d) = (y.a, y.b);
                debug_assert!(a1 <= c && c <= b1 && a2 <= d && d <= b2);
                let shared_c = c == a1 || c == b1;
                let shared_d = d == a2 || d == b2;
                if shared_c && shared_d {
                    let odd = odd_points(&[(a1, b1), (a2, b2), (c, d)]);
                    let produced = entries_from_odd(&odd);
                    self.sink.correction(&[j1, j2], Some(y), &produced)?;
                    self.push_front_entries(&produced);
                } else {
                    // re-pair as the nested pair: outer (a1,b2), inner (b1,a2)
                    let outer = MEntry {
                        a: a1,
                        b: b2,
                        sign: 1,
                    };
                    let inner = MEntry {
                        a: b1,
                        b: a2,
                        sign: 1,
                    };
                    self.sink.correction(&[j1, j2], None, &[outer, inner])?;
                    // resolve y against the nested pair; one of the two
                    // survives as a pending item
                    if (c, d) == (b1, a2) {
                        self.sink.correction(&[inner], Some(y), &[])?;
                        self.push_front_entries(&[outer]);
                    } else if (c, d) == (a1, b2) {
                        self.sink.correction(&[outer], Some(y), &[])?;
                        self.push_front_entries(&[inner]);
                    } else if c == a1 {
                        // d strictly inside (a2,b2)
                        let p = MEntry {
                            a: d,
                            b: b2,
                            sign: 1,
                        };
                        self.sink.correction(&[outer], Some(y), &[p])?;
                        self.push_front_entries(&[p, inner]);
                    } else if c == b1 {
                        let p = MEntry {
                            a: a2,
                            b: d,
                            sign: 1,
                        };
                        self.sink.correction(&[inner], Some(y), &[p])?;
                        self.push_front_entries(&[outer, p]);
                    } else if d == a2 {
                        let p = MEntry {
                            a: c,
                            b: b1,
                            sign: 1,
                        };
                        self.sink.correction(&[inner], Some(y), &[p])?;
                        self.push_front_entries(&[outer, p]);
                    } else if d == b2 {
                        let p = MEntry {
                            a: a1,
                            b: c,
                            sign: 1,
                        };
                        self.sink.correction(&[outer], Some(y), &[p])?;
                        self.push_front_entries(&[p, inner]);
                    } else {
                        // both strictly interior
                        let p1 = MEntry {
                            a: a1,
                            b: c,
                            sign: 1,
                        };
                        let p2 = MEntry {
                            a: d,
                            b: b2,
                            sign: 1,
                        };
                        self.sink.correction(&[outer], Some(y), &[p1, p2])?;
                        self.push_front_entries(&[p1, p2, inner]);
                    }
                }
            }
            _ => unreachable!("a letter intersects at most two disjoint supports"),
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// r = 2: points are strands, no block parameters.
// ---------------------------------------------------------------------------

struct StrandSink {
    emitter: Emitter,
}

impl MergeSink for StrandSink {
    fn anchor(&self, point: usize) -> usize {
        point
    }

    fn correction(
        &mut self,
        consumed: &[MEntry],
        letter: Option<MLetter>,
        produced: &[MEntry],
    ) -> Result<(), FactorError> {
        let mut letters: Vec<PureLetter> = Vec::new();
        for e in consumed {
            letters.push(PureLetter::new(e.a, e.b, e.sign));
        }
        if let Some(y) = letter {
            letters.push(PureLetter::new(y.sa, y.sb, y.sign));
        }
        for e in produced.iter().rev() {
            letters.push(PureLetter::new(e.a, e.b, -e.sign));
        }
        self.emitter.emit(letters)
    }
}

fn factor_r2(n: usize, upper: &[PureLetter], force: bool) -> Result<TwistWord, FactorError> {
    let mut sink = StrandSink {
        emitter: Emitter {
            n,
            r: 2,
            force,
            out: TwistWord::empty(n, 2),
        },
    };
    let mut engine = MergeEngine::new(&mut sink);
    for lt in upper {
        engine.feed(MLetter {
            a: lt.i,
            b: lt.j,
            sign: lt.sign,
            sa: lt.i,
            sb: lt.j,
        })?;
    }
    if !engine.family.is_empty() {
        return Err(FactorError::NotInKernel { r: 2 });
    }
    Ok(sink.emitter.out)
}

// ---------------------------------------------------------------------------
// Odd r: block parameters only.
// ---------------------------------------------------------------------------

struct BlockParams {
    blocks: Vec<Block>,
    params: Vec<Vec<i64>>,
    r: u64,
}

impl BlockParams {
    fn new(n: usize, r: u64) -> Self {
        let blocks = make_blocks(n);
        let params = blocks.iter().map(|b| vec![0i64; b.len]).collect();
        BlockParams { blocks, params, r }
    }

    fn element(&self, b: usize) -> Result<Vec<PureLetter>, FactorError> {
        block_element(self.blocks[b], &self.params[b], self.r)
    }

    fn add(&mut self, strand: usize, delta: i64) {
        let b = block_of(&self.blocks, strand);
        let slot = strand - self.blocks[b].start;
        let p = &mut self.params[b][slot];
        *p = (*p + delta).rem_euclid(self.r as i64);
    }

    fn all_zero(&self) -> bool {
        self.params.iter().all(|p| p.iter().all(|&x| x == 0))
    }
}

fn factor_odd(
    n: usize,
    upper: &[PureLetter],
    r: u64,
    force: bool,
) -> Result<TwistWord, FactorError> {
    let mut state = BlockParams::new(n, r);
    let mut emitter = Emitter {
        n,
        r,
        force,
        out: TwistWord::empty(n, r),
    };
    for lt in upper {
        let bu = block_of(&state.blocks, lt.i);
        let bv = block_of(&state.blocks, lt.j);
        let mut k: Vec<PureLetter> = Vec::new();
        k.extend(state.element(bu)?);
        if bv != bu {
            k.extend(state.element(bv)?);
        }
        k.push(*lt);
        state.add(lt.i, i64::from(lt.sign));
        state.add(lt.j, i64::from(lt.sign));
        let mut tail: Vec<PureLetter> = state.element(bu)?;
        if bv != bu {
            tail.extend(state.element(bv)?);
        }
        k.extend(tail.into_iter().rev().map(PureLetter::inverse));
        emitter.emit(k)?;
    }
    if !state.all_zero() {
        return Err(FactorError::NotInKernel { r });
    }
    Ok(emitter.out)
}

// ---------------------------------------------------------------------------
// Even r >= 4: block parameters plus pairwise links between odd blocks,
// managed by the merge engine at block granularity.
// ---------------------------------------------------------------------------

struct BlockSink {
    state: BlockParams,
    emitter: Emitter,
}

impl MergeSink for BlockSink {
    fn anchor(&self, point: usize) -> usize {
        self.state.blocks[point].start
    }

    fn correction(
        &mut self,
        consumed: &[MEntry],
        letter: Option<MLetter>,
        produced: &[MEntry],
    ) -> Result<(), FactorError> {
        // involved blocks, sorted
        let mut involved: Vec<usize> = Vec::new();
        let mut note = |b: usize| {
            if !involved.contains(&b) {
                involved.push(b);
            }
        };
        for e in consumed {
            note(e.a);
            note(e.b);
        }
        if let Some(y) = letter {
            note(y.a);
            note(y.b);
        }
        for e in produced {
            note(e.a);
            note(e.b);
        }
        involved.sort_unstable();

        let mut k: Vec<PureLetter> = Vec::new();
        for &b in &involved {
            k.extend(self.state.element(b)?);
        }
        for e in consumed {
            k.push(PureLetter::new(
                self.anchor(e.a),
                self.anchor(e.b),
                e.sign,
            ));
            // the link leaves the family: its phi moves into the params
            self.state.add(self.anchor(e.a), i64::from(e.sign));
            self.state.add(self.anchor(e.b), i64::from(e.sign));
        }
        if let Some(y) = letter {
            k.push(PureLetter::new(y.sa, y.sb, y.sign));
            self.state.add(y.sa, i64::from(y.sign));
            self.state.add(y.sb, i64::from(y.sign));
        }
        let mut tail: Vec<PureLetter> = Vec::new();
        for e in produced {
            tail.push(PureLetter::new(
                self.anchor(e.a),
                self.anchor(e.b),
                e.sign,
            ));
            self.state.add(self.anchor(e.a), -i64::from(e.sign));
            self.state.add(self.anchor(e.b), -i64::from(e.sign));
        }
        for &b in &involved {
            tail.extend(self.state.element(b)?);
        }
        k.extend(tail.into_iter().rev().map(PureLetter::inverse));
        self.emitter.emit(k)
    }
}

fn factor_even(
    n: usize,
    upper: &[PureLetter],
    r: u64,
    force: bool,
) -> Result<TwistWord, FactorError> {
    let mut sink = BlockSink {
        state: BlockParams::new(n, r),
        emitter: Emitter {
            n,
            r,
            force,
            out: TwistWord::empty(n, r),
        },
    };
    let blocks_snapshot = sink.state.blocks.clone();
    let mut engine = MergeEngine::new(&mut sink);
    for lt in upper {
        let bu = block_of(&blocks_snapshot, lt.i);
        let bv = block_of(&blocks_snapshot, lt.j);
        if bu == bv {
            // Same block: the correction stays inside the block, except that
            // a link anchored there must ride along (it does not commute
            // with letters touching its anchor strand) and is re-produced
            // unchanged.
            let y = MLetter {
                a: bu,
                b: bv,
                sign: lt.sign,
                sa: lt.i,
                sb: lt.j,
            };
            if let Some(k) = engine
                .family
                .iter()
                .position(|e| e.a == bu || e.b == bu)
            {
                let e = engine.family.remove(k);
                engine.sink.correction(&[e], Some(y), &[e])?;
                engine.family.push(e);
            } else {
                engine.sink.correction(&[], Some(y), &[])?;
            }
        } else {
            engine.feed(MLetter {
                a: bu,
                b: bv,
                sign: lt.sign,
                sa: lt.i,
                sb: lt.j,
            })?;
        }
    }
    if !engine.family.is_empty() {
        return Err(FactorError::NotInKernel { r });
    }
    if !sink.state.all_zero() {
        return Err(FactorError::NotInKernel { r });
    }
    Ok(sink.emitter.out)
}

// ---------------------------------------------------------------------------
// Public entry points.
// ---------------------------------------------------------------------------

/// Factors a pure kernel braid given directly as a word in the `A_{ij}`.
pub fn factor_pure_kernel_word(
    w: &PureWord,
    r: u64,
    force: bool,
) -> Result<TwistWord, FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
    }
    let threshold = super::n0_for(r, w.n);
    if w.n < threshold && !force {
        return Err(FactorError::BelowThreshold {
            n: w.n,
            r,
            n0: threshold,
        });
    }
    if !w.phi_vec(r).iter().all(|&x| x == 0) {
        return Err(FactorError::NotInKernel { r });
    }
    let upper = lower_word_to_upper(&w.letters);
    dispatch_upper(w.n, &upper, r, force)
}

fn dispatch_upper(
    n: usize,
    upper: &[PureLetter],
    r: u64,
    force: bool,
) -> Result<TwistWord, FactorError> {
    if r == 2 {
        factor_r2(n, upper, force)
    } else if r % 2 == 1 {
        factor_odd(n, upper, r, force)
    } else {
        factor_even(n, upper, r, force)
    }
}

/// Factors a pure kernel braid word in the Artin generators: rewrites it
/// into band letters and runs the initial-segment machinery.
pub fn factor_pure_kernel(u: &BraidWord, r: u64, force: bool) -> Result<TwistWord, FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
    }
    if !u.is_pure() {
        return Err(FactorError::NotPure);
    }
    if !phi(u, r).is_zero() {
        return Err(FactorError::NotInKernel { r });
    }
    let threshold = super::n0_for(r, u.n());
    if u.n() < threshold && !force {
        return Err(FactorError::BelowThreshold {
            n: u.n(),
            r,
            n0: threshold,
        });
    }
    let upper = telescope_upper(u)?;
    dispatch_upper(u.n(), &upper, r, force)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::sigma;
    use crate::word_problem::equals;

    fn assert_letters_equal(n: usize, letters: &[PureLetter], target: &BraidWord) {
        let w = PureWord::new(n, letters.to_vec()).expand().unwrap();
        assert!(equals(&w, target).unwrap());
    }

    #[test]
    fn conjugation_table_exhaustive() {
        // every case of σ_k^{±1} A_{ij}^{±1} σ_k^{∓1} against the oracle
        let n = 6;
        for i in 1..n {
            for j in (i + 1)..=n {
                for k in 1..n {
                    for eps in [1i8, -1] {
                        for delta in [1i8, -1] {
                            let a = pure_gen_word(n, i, j).unwrap();
                            let a = if delta > 0 { a } else { a.inverse() };
                            let g = sigma(n, k, eps).unwrap();
                            let target = a.conjugate_by(&g).unwrap();
                            let got =
                                conjugate_letter(k, eps, PureLetter::new(i, j, delta));
                            assert_letters_equal(n, &got, &target);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn upper_conjugation_table_exhaustive() {
        let n = 6;
        for i in 1..n {
            for j in (i + 1)..=n {
                for k in 1..n {
                    for eps in [1i8, -1] {
                        for delta in [1i8, -1] {
                            let u = upper_gen_word(n, i, j).unwrap();
                            let u = if delta > 0 { u } else { u.inverse() };
                            let g = sigma(n, k, eps).unwrap();
                            let target = u.conjugate_by(&g).unwrap();
                            let got =
                                conjugate_letter_upper(k, eps, PureLetter::new(i, j, delta));
                            let w = expand_upper(n, &got).unwrap();
                            assert!(
                                equals(&w, &target).unwrap(),
                                "upper conj failed: i={i} j={j} k={k} eps={eps} delta={delta}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lower_letters_convert_to_upper() {
        for n in [4usize, 6] {
            for i in 1..n {
                for j in (i + 1)..=n {
                    for sign in [1i8, -1] {
                        let target = pure_gen_word(n, i, j).unwrap();
                        let target = if sign > 0 { target } else { target.inverse() };
                        let upper = lower_letter_to_upper(PureLetter::new(i, j, sign));
                        let w = expand_upper(n, &upper).unwrap();
                        assert!(equals(&w, &target).unwrap(), "A->U failed: {i},{j},{sign}");
                    }
                }
            }
        }
    }

    #[test]
    fn upper_bands_restrict_to_subdisks() {
        // the standard embedding consistent with the packet algorithm sends
        // sub-disk upper bands to ambient upper bands
        let emb = StandardEmbedding::new(7, vec![2, 4, 7]).unwrap();
        for (u, v) in [(1usize, 2usize), (2, 3), (1, 3)] {
            let sub = expand_upper(3, &[PureLetter::new(u, v, 1)]).unwrap();
            let included = emb.include_word(&sub).unwrap();
            let targets = emb.targets();
            let ambient =
                expand_upper(7, &[PureLetter::new(targets[u - 1], targets[v - 1], 1)]).unwrap();
            assert!(
                equals(&included, &ambient).unwrap(),
                "upper band ({u},{v}) does not restrict"
            );
        }
    }

    #[test]
    fn telescope_rewrites_pure_words() {
        let cases = [
            (4, "+1 +1"),
            (4, "+1 -2 +2 -1"),
            (5, "+1 +2 +3 +3 +2 +1"),
            (5, "-1 -1 +2 +2 -3 -3"),
            (6, "+1 +2 +1 -2 -1 -2"),
        ];
        for (n, text) in cases {
            let u = BraidWord::parse(n, text).unwrap();
            assert!(u.is_pure(), "{text}");
            let w = pure_word_to_generators(&u).unwrap();
            let back = w.expand().unwrap();
            assert!(equals(&back, &u).unwrap(), "telescope failed on {text}");
        }
    }

    #[test]
    fn telescope_rejects_non_pure() {
        let u = BraidWord::parse(3, "+1").unwrap();
        assert_eq!(
            pure_word_to_generators(&u),
            Err(FactorError::NotPure)
        );
    }

    #[test]
    fn triple_block_phi() {
        for r in [3u64, 5, 4, 6] {
            for a in 0..r as i64 {
                for b in 0..r as i64 {
                    for c in 0..r as i64 {
                        if r % 2 == 0 && (a + b + c) % 2 == 1 {
                            assert!(triple_block_word(8, 2, a, b, c, r).is_err());
                            continue;
                        }
                        let w = triple_block_word(8, 2, a, b, c, r).unwrap();
                        let v = phi(&w, r);
                        let mut expect = vec![0i64; 8];
                        expect[1] = a;
                        expect[2] = b;
                        expect[3] = c;
                        assert_eq!(v.entries(), &expect, "r={r} a={a} b={b} c={c}");
                    }
                }
            }
        }
    }

    fn certify(w: &PureWord, r: u64, tw: &TwistWord) {
        assert!(tw.all_factors_valid());
        assert!(tw.all_widths_basic());
        let expanded = tw.expand().unwrap();
        assert!(phi(&expanded, r).is_zero());
        let target = w.expand().unwrap();
        assert!(
            equals(&expanded, &target).unwrap(),
            "factorization fails certification (n={}, r={r}, {} letters -> {} factors)",
            w.n,
            w.letters.len(),
            tw.len()
        );
    }

    /// Deterministic pseudo-random kernel words in the A-generators.
    fn kernel_word(n: usize, r: u64, len: usize, seed: u64) -> PureWord {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut letters = Vec::new();
        for _ in 0..len {
            let i = (next() as usize) % (n - 1) + 1;
            let j = i + 1 + (next() as usize) % (n - i);
            let sign = if next() % 2 == 0 { 1 } else { -1 };
            letters.push(PureLetter::new(i, j, sign));
        }
        // correcting suffix: zero out phi coordinate by coordinate
        let mut w = PureWord::new(n, letters);
        let push_power = |w: &mut PureWord, i: usize, j: usize, e: i64| {
            let sign = if e >= 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                w.letters.push(PureLetter::new(i.min(j), i.max(j), sign));
            }
        };
        loop {
            let v = w.phi_vec(r);
            let nonzero: Vec<usize> = (0..n).filter(|&k| v[k] != 0).collect();
            match nonzero.len() {
                0 => break,
                1 => {
                    // lone residue c at k: c·e_k = 2q·e_k with the triple
                    // A_{km}^{-q} A_{km'}^{-q} A_{mm'}^{q}
                    let k = nonzero[0] + 1;
                    let (m, m2) = if k == 1 {
                        (2, 3)
                    } else if k == 2 {
                        (1, 3)
                    } else {
                        (1, 2)
                    };
                    let c = v[k - 1];
                    let q = if r % 2 == 1 {
                        minimal_abs_residue((r as i64 + 1) / 2 * c, r)
                    } else {
                        debug_assert_eq!(c % 2, 0, "coordinate sum parity");
                        minimal_abs_residue(c / 2, r)
                    };
                    push_power(&mut w, k, m, -q);
                    push_power(&mut w, k, m2, -q);
                    push_power(&mut w, m, m2, q);
                }
                _ => {
                    let (k1, k2) = (nonzero[0], nonzero[1]);
                    push_power(&mut w, k1 + 1, k2 + 1, r as i64 - v[k1]);
                }
            }
        }
        assert!(w.phi_vec(r).iter().all(|&x| x == 0));
        w
    }

    #[test]
    fn factor_r2_simple_cases() {
        // A_{13}² A_{24}² in B_8 (interleaved supports)
        let w = PureWord::new(
            8,
            vec![
                PureLetter::new(1, 3, 1),
                PureLetter::new(1, 3, 1),
                PureLetter::new(2, 4, 1),
                PureLetter::new(2, 4, 1),
            ],
        );
        let tw = factor_pure_kernel_word(&w, 2, false).unwrap();
        certify(&w, 2, &tw);
        // identity
        let w = PureWord::new(8, vec![]);
        let tw = factor_pure_kernel_word(&w, 2, false).unwrap();
        assert!(tw.is_empty());
    }

    #[test]
    fn factor_r2_random_words() {
        for seed in 0..12 {
            let w = kernel_word(8, 2, 6, seed);
            let tw = factor_pure_kernel_word(&w, 2, false).unwrap();
            certify(&w, 2, &tw);
        }
    }

    #[test]
    fn factor_r3_triple_branch() {
        // A_{12}³ A_{13}³ A_{23}³ in B_18 through the triple-block branch
        let mut letters = Vec::new();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            for _ in 0..3 {
                letters.push(PureLetter::new(i, j, 1));
            }
        }
        let w = PureWord::new(18, letters);
        let tw = factor_pure_kernel_word(&w, 3, false).unwrap();
        certify(&w, 3, &tw);
    }

    #[test]
    fn factor_r3_random_words() {
        for seed in 0..6 {
            let w = kernel_word(18, 3, 5, seed);
            let tw = factor_pure_kernel_word(&w, 3, false).unwrap();
            certify(&w, 3, &tw);
        }
    }

    #[test]
    fn factor_r4_even_branch() {
        assert_eq!(super::super::n0_for(4, 52), 52); // (12+1)*4
        for seed in 0..3 {
            let w = kernel_word(52, 4, 4, seed);
            let tw = factor_pure_kernel_word(&w, 4, false).unwrap();
            certify(&w, 4, &tw);
        }
    }

    #[test]
    fn below_threshold_is_refused() {
        let w = kernel_word(7, 2, 4, 0);
        assert!(matches!(
            factor_pure_kernel_word(&w, 2, false),
            Err(FactorError::BelowThreshold { n0: 8, .. })
        ));
    }

    #[test]
    fn factor_from_artin_word() {
        // end to end: expand a kernel A-word, rewrite, factor, certify
        let w = kernel_word(8, 2, 4, 7);
        let u = w.expand().unwrap();
        let tw = factor_pure_kernel(&u, 2, false).unwrap();
        let expanded = tw.expand().unwrap();
        assert!(equals(&expanded, &u).unwrap());
    }

    #[test]
    fn block_elements_match_params() {
        // length-4 and length-5 blocks realize arbitrary parameter vectors
        for r in [3u64, 5, 4] {
            for len in [4usize, 5] {
                let block = Block { start: 2, len };
                let mut params = vec![0i64; len];
                for trial in 0..40 {
                    for (k, p) in params.iter_mut().enumerate() {
                        *p = ((trial * 7 + k * 3) as i64) % r as i64;
                    }
                    if r % 2 == 0 && params.iter().sum::<i64>() % 2 == 1 {
                        params[0] = (params[0] + 1) % r as i64;
                    }
                    let letters = block_element(block, &params, r).unwrap();
                    let w = PureWord::new(9, letters);
                    let v = w.phi_vec(r);
                    for (k, &p) in params.iter().enumerate() {
                        assert_eq!(v[block.start - 1 + k], p, "r={r} len={len} slot {k}");
                    }
                    for (k, &x) in v.iter().enumerate() {
                        if k + 1 < block.start || k + 1 >= block.start + len {
                            assert_eq!(x, 0);
                        }
                    }
                }
            }
        }
    }
}
