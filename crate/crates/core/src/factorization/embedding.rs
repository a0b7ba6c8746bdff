//! The packet-passing factorization algorithm for pure kernel braids
//! supported on a standardly embedded subdisk.
//!
//! The input braid `α ∈ B_s` lives on `s` black strands sitting at the
//! embedding's target positions; the other `n − s` strands are spare ("blue")
//! and never cross each other. Walking the crossings of `α` top to bottom we
//! maintain the count of blue strands in each gap between adjacent black
//! strands, and isotope blues so that every overcrossing passes over exactly
//! `r` strands:
//!
//! * resolving a crossing borrows `b ≡ −c−1 (mod r)` blues from the gap on
//!   the far side so that `c + 1 + b = r` strands go under, emitting one
//!   basic twist;
//! * whenever a gap accumulates `r` or more blues they are passed back to
//!   the right reservoir in packets of `r`, one basic twist per black strand
//!   hopped.
//!
//! With `n ≥ r·s` a donor packet always exists. For a pure kernel input the
//! final counts agree with the initial ones mod `r`, so a last sweep of
//! packet moves restores them exactly and the emitted twist word is equal to
//! the embedded input braid.

use super::{FactorError, TwistFactor, TwistWord};
use crate::braid::{BraidError, BraidWord};
use crate::crossed_hom::phi;
use serde::{Deserialize, Serialize};

/// A standardly embedded subdisk: `s` distinct marked points of `D_n`,
/// joined consecutively by disjoint arcs in the lower half-disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardEmbedding {
    n: usize,
    targets: Vec<usize>,
}

impl StandardEmbedding {
    /// Builds an embedding from ambient strand count and target points
    /// (deduplicated and sorted; 1-based).
    pub fn new(n: usize, mut targets: Vec<usize>) -> Result<Self, FactorError> {
        targets.sort_unstable();
        targets.dedup();
        if targets.is_empty() || targets[0] < 1 || *targets.last().unwrap() > n {
            return Err(FactorError::BadEmbedding { n });
        }
        Ok(StandardEmbedding { n, targets })
    }

    /// The embedding onto the first `s` points.
    pub fn first(n: usize, s: usize) -> Result<Self, FactorError> {
        if s == 0 || s > n {
            return Err(FactorError::BadEmbedding { n });
        }
        Ok(StandardEmbedding {
            n,
            targets: (1..=s).collect(),
        })
    }

    pub fn ambient_n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The induced inclusion `B_s → B_n` on words: the `j`-th sub-disk
    /// generator maps to the band crossing of targets `j`, `j+1` passing
    /// over all strands in between.
    pub fn include_word(&self, alpha: &BraidWord) -> Result<BraidWord, FactorError> {
        if alpha.n() != self.s() {
            return Err(BraidError::StrandMismatch {
                left: alpha.n(),
                right: self.s(),
            }
            .into());
        }
        let mut letters: Vec<i32> = Vec::new();
        for (j, sign) in alpha.iter_letters() {
            let a = self.targets[j - 1];
            let b = self.targets[j];
            for k in ((a + 1)..b).rev() {
                letters.push(-(k as i32));
            }
            letters.push(if sign > 0 { a as i32 } else { -(a as i32) });
            for k in (a + 1)..b {
                letters.push(k as i32);
            }
        }
        Ok(BraidWord::from_letters(self.n, letters)?)
    }

    /// Initial blue-strand counts per gap: positions `0..=s`.
    fn initial_counts(&self) -> Vec<usize> {
        let s = self.s();
        let mut c = Vec::with_capacity(s + 1);
        c.push(self.targets[0] - 1);
        for j in 1..s {
            c.push(self.targets[j] - self.targets[j - 1] - 1);
        }
        c.push(self.n - self.targets[s - 1]);
        c
    }
}

/// One resolved crossing in a factorization trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    /// generator index of the crossing in the sub-braid (1-based) and sign
    pub crossing: (usize, i8),
    /// blue counts per gap after resolving this crossing (raw integers)
    pub counts: Vec<usize>,
    /// the same counts mod r — the red bookkeeping numbers
    pub counts_mod_r: Vec<u64>,
    /// twist factors emitted for this crossing (including packet moves)
    pub emitted: Vec<TwistFactor>,
}

/// Full record of one run of the packet algorithm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorTrace {
    pub n: usize,
    pub r: u64,
    pub targets: Vec<usize>,
    pub initial_counts: Vec<usize>,
    pub steps: Vec<TraceStep>,
    /// factors emitted by the final count restoration
    pub restore: Vec<TwistFactor>,
}

struct PacketState {
    r: usize,
    counts: Vec<usize>,
    out: TwistWord,
    /// factors emitted since the last take()
    pending: Vec<TwistFactor>,
}

impl PacketState {
    fn emit(&mut self, f: TwistFactor) {
        self.out.push(f);
        self.pending.push(f);
    }

    fn take_pending(&mut self) -> Vec<TwistFactor> {
        std::mem::take(&mut self.pending)
    }

    /// Ambient position of black strand `j` (1-based).
    fn pos_of_black(&self, j: usize) -> usize {
        self.counts[..j].iter().sum::<usize>() + j
    }

    /// Moves a packet of `r` blues from gap `j` to gap `j−1` (black `j`
    /// crosses right over them).
    fn move_packet_left(&mut self, j: usize) {
        debug_assert!(self.counts[j] >= self.r);
        let p = self.pos_of_black(j);
        self.emit(TwistFactor::new(p, self.r, 1));
        self.counts[j] -= self.r;
        self.counts[j - 1] += self.r;
    }

    /// Moves a packet of `r` blues from gap `j` to gap `j+1` (black `j+1`
    /// crosses left over them).
    fn move_packet_right(&mut self, j: usize) {
        debug_assert!(self.counts[j] >= self.r);
        let q = self.pos_of_black(j + 1);
        self.emit(TwistFactor::new(q - self.r, self.r, -1));
        self.counts[j] -= self.r;
        self.counts[j + 1] += self.r;
    }

    /// Pulls packets into gap `recv` until it holds at least `need` blues.
    /// Donors are searched to the right first (nearest wins); if no gap to
    /// the right holds a full packet, the nearest donor to the left is used.
    fn ensure(&mut self, recv: usize, need: usize) -> Result<(), FactorError> {
        let s = self.counts.len() - 1;
        while self.counts[recv] < need {
            if let Some(donor) = ((recv + 1)..=s).find(|&t| self.counts[t] >= self.r) {
                for u in ((recv + 1)..=donor).rev() {
                    self.move_packet_left(u);
                }
            } else if let Some(donor) = (0..recv).rev().find(|&t| self.counts[t] >= self.r) {
                for u in donor..recv {
                    self.move_packet_right(u);
                }
            } else {
                return Err(FactorError::BorrowFailed { r: self.r as u64 });
            }
        }
        Ok(())
    }

    /// Resolves one crossing of the sub-braid between blacks `j` and `j+1`.
    ///
    /// The gap between the crossing strands is first thinned below `r` (one
    /// hop right per surplus packet); spare strands parked in other gaps
    /// stay where they are until borrowed or restored.
    fn resolve(&mut self, j: usize, sign: i8) -> Result<(), FactorError> {
        let r = self.r;
        while self.counts[j] >= r {
            self.move_packet_right(j);
        }
        let b = r - 1 - self.counts[j];
        if sign > 0 {
            self.ensure(j + 1, b)?;
            let p = self.pos_of_black(j);
            self.emit(TwistFactor::new(p, r, 1));
            self.counts[j - 1] += self.counts[j];
            self.counts[j] = b;
            self.counts[j + 1] -= b;
        } else {
            self.ensure(j - 1, b)?;
            let q = self.pos_of_black(j + 1);
            self.emit(TwistFactor::new(q - r, r, -1));
            let old_mid = self.counts[j];
            self.counts[j - 1] -= b;
            self.counts[j] = b;
            self.counts[j + 1] += old_mid;
        }
        Ok(())
    }
}

/// Factors a pure kernel braid supported on a standard embedding into basic
/// `(r+1)`-st twists.
///
/// `alpha` is a word in `B_s` for `s = embedding.s()`; the returned
/// [`TwistWord`] lives in `B_n` and its expansion equals
/// `embedding.include_word(alpha)`. Preconditions: `n ≥ r·s`, `alpha` pure,
/// and the embedded word in `ker(φ_r)`.
pub fn factor_standard_embedding(
    alpha: &BraidWord,
    embedding: &StandardEmbedding,
    r: u64,
) -> Result<TwistWord, FactorError> {
    let (word, _) = run_packet_algorithm(alpha, embedding, r, false, false)?;
    Ok(word)
}

/// Like [`factor_standard_embedding`] but also returns the bookkeeping
/// trace (blue counts per gap after each crossing).
pub fn factor_standard_embedding_traced(
    alpha: &BraidWord,
    embedding: &StandardEmbedding,
    r: u64,
) -> Result<(TwistWord, FactorTrace), FactorError> {
    let (word, trace) = run_packet_algorithm(alpha, embedding, r, true, false)?;
    Ok((word, trace.expect("trace requested")))
}

pub(crate) fn run_packet_algorithm(
    alpha: &BraidWord,
    embedding: &StandardEmbedding,
    r: u64,
    want_trace: bool,
    force: bool,
) -> Result<(TwistWord, Option<FactorTrace>), FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
    }
    let n = embedding.ambient_n();
    let s = embedding.s();
    if alpha.n() != s {
        return Err(BraidError::StrandMismatch {
            left: alpha.n(),
            right: s,
        }
        .into());
    }
    if n < (r as usize) * s && !force {
        return Err(FactorError::EmbeddingTooTight { n, r, s });
    }
    if !alpha.is_pure() {
        return Err(FactorError::NotPure);
    }
    let ambient = embedding.include_word(alpha)?;
    if !phi(&ambient, r).is_zero() {
        return Err(FactorError::NotInKernel { r });
    }

    let init = embedding.initial_counts();
    let mut st = PacketState {
        r: r as usize,
        counts: init.clone(),
        out: TwistWord::empty(n, r),
        pending: Vec::new(),
    };
    let mut steps: Vec<TraceStep> = Vec::new();

    for (j, sign) in alpha.iter_letters() {
        st.resolve(j, sign)?;
        let emitted = st.take_pending();
        if want_trace {
            steps.push(TraceStep {
                crossing: (j, sign),
                counts: st.counts.clone(),
                counts_mod_r: st.counts.iter().map(|&c| c as u64 % r).collect(),
                emitted,
            });
        }
    }

    // A pure kernel input leaves every gap count unchanged mod r.
    for j in 0..=s {
        if st.counts[j] % (r as usize) != init[j] % (r as usize) {
            return Err(FactorError::NotInKernel { r });
        }
    }

    // Exact restoration: sweep left to right, pushing surplus right and
    // pulling deficits from the right, in whole packets.
    for j in 0..s {
        while st.counts[j] > init[j] {
            st.move_packet_right(j);
        }
        if st.counts[j] < init[j] {
            st.ensure(j, init[j])?;
        }
    }
    debug_assert_eq!(st.counts, init);
    let restore = st.take_pending();

    let trace = want_trace.then(|| FactorTrace {
        n,
        r,
        targets: embedding.targets().to_vec(),
        initial_counts: init,
        steps,
        restore,
    });
    Ok((st.out, trace))
}
