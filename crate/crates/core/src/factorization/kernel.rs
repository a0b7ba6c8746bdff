//! Factoring arbitrary kernel elements: a permutation correction inside
//! `Γ_n^r` reduces to the pure case.
//!
//! The image of `Γ_n^r` in `S_n` contains every consecutive 3-cycle
//! `(i, i+1, i+2)` — built from `Σ_{i;r}^{-1}Σ_{i+1;r}` by conjugation with
//! twist powers — and hence the alternating group; for odd `r` a single
//! basic twist supplies an odd permutation. Given `u ∈ ker(φ_r)` we build
//! `γ ∈ Γ_n^r` with the same permutation image, factor the pure residue
//! `u·γ⁻¹`, and concatenate.

use super::pure::factor_pure_kernel;
use super::{FactorError, TwistFactor, TwistWord};
use crate::braid::{BraidWord, Permutation};
use crate::crossed_hom::phi;

/// Twist word for the 3-cycle `(i, i+1, i+2)` (1-based, `i ≤ n−2`).
fn three_cycle_word(n: usize, r: usize, i: usize) -> Result<Vec<TwistFactor>, FactorError> {
    if i + r + 1 <= n {
        // conjugate Σ_{i;r}^{-1} Σ_{i+1;r} by Σ_{i+1;r}²
        let c = TwistFactor::new(i + 1, r, 1);
        Ok(vec![
            c,
            c,
            TwistFactor::new(i, r, -1),
            TwistFactor::new(i + 1, r, 1),
            c.inverse(),
            c.inverse(),
        ])
    } else if i >= r {
        // mirrored form anchored at j = i − r + 1, conjugated by Σ_{j;r}^{r−1}
        let j = i - r + 1;
        let c = TwistFactor::new(j, r, 1);
        let mut out = Vec::with_capacity(2 * (r - 1) + 2);
        for _ in 0..(r - 1) {
            out.push(c);
        }
        out.push(c);
        out.push(TwistFactor::new(j + 1, r, -1));
        for _ in 0..(r - 1) {
            out.push(c.inverse());
        }
        Ok(out)
    } else {
        Err(FactorError::BorrowFailed { r: r as u64 })
    }
}

/// Adjacent-transposition word for a permutation: composing the slots in
/// word order reproduces it.
fn transposition_word(p: &Permutation) -> Vec<usize> {
    let mut v = p.one_based_images();
    let n = v.len();
    let mut swaps: Vec<usize> = Vec::new();
    loop {
        let mut done = true;
        for k in 0..n.saturating_sub(1) {
            if v[k] > v[k + 1] {
                v.swap(k, k + 1);
                swaps.push(k + 1);
                done = false;
            }
        }
        if done {
            break;
        }
    }
    swaps.reverse();
    swaps
}

/// Builds an explicit word in basic twists whose permutation image equals
/// `target`. For even `r` the image of `Γ_n^r` is the alternating group, so
/// an odd target is rejected.
pub fn permutation_correction(
    n: usize,
    r: u64,
    target: &Permutation,
) -> Result<TwistWord, FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
    }
    let r_us = r as usize;
    let mut out = TwistWord::empty(n, r);
    let mut rem = target.clone();
    if target.parity() == 1 {
        if r % 2 == 0 {
            return Err(FactorError::NotInKernel { r });
        }
        // prepend one basic twist: an (r+1)-cycle, odd for odd r
        if n < r_us + 1 {
            return Err(FactorError::BorrowFailed { r });
        }
        let head = TwistFactor::new(1, r_us, 1);
        out.push(head);
        // rem := image(head)^{-1} ∘ target
        let mut imgs: Vec<usize> = (1..=n).collect();
        for k in 1..=r_us {
            imgs[k - 1] = k + 1;
        }
        imgs[r_us] = 1;
        let z1 = Permutation::from_one_based(&imgs).expect("cycle");
        rem = z1.inverse().compose(target);
    }
    debug_assert_eq!(rem.parity(), 0);
    let word = transposition_word(&rem);
    debug_assert_eq!(word.len() % 2, 0);
    for pair in word.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            continue;
        }
        if a < b {
            for k in a..b {
                out.factors.extend(three_cycle_word(n, r_us, k)?);
            }
        } else {
            for k in (b..a).rev() {
                for f in three_cycle_word(n, r_us, k)?.iter().rev() {
                    out.factors.push(f.inverse());
                }
            }
        }
    }
    Ok(out)
}

/// Recognizes words that are literally products of basic twists, e.g.
/// `σ_3 σ_4` = `Σ_{3;2}`, so that such inputs come back unchanged.
fn parse_twist_word(u: &BraidWord, r: u64) -> Option<TwistWord> {
    let r_us = r as usize;
    let letters = u.letters();
    if letters.len() % r_us != 0 {
        return None;
    }
    let mut out = TwistWord::empty(u.n(), r);
    for chunk in letters.chunks(r_us) {
        if chunk.iter().all(|&l| l > 0) {
            let a = chunk[0] as usize;
            if (0..r_us).all(|k| chunk[k] == (a + k) as i32) {
                out.push(TwistFactor::new(a, r_us, 1));
                continue;
            }
            return None;
        } else if chunk.iter().all(|&l| l < 0) {
            let top = (-chunk[0]) as usize;
            if top < r_us {
                return None;
            }
            let a = top + 1 - r_us;
            if (0..r_us).all(|k| -chunk[k] == (top - k) as i32) {
                out.push(TwistFactor::new(a, r_us, -1));
                continue;
            }
            return None;
        }
        return None;
    }
    Some(out)
}

/// Factors any element of `ker(φ_r)` into basic `(r+1)`-st twists:
/// a permutation correction from [`permutation_correction`] followed by the
/// pure factorization of the residue.
pub fn factor_kernel(u: &BraidWord, r: u64, force: bool) -> Result<TwistWord, FactorError> {
    if r < 2 {
        return Err(FactorError::ModulusTooSmall(r));
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
    if let Some(tw) = parse_twist_word(u, r) {
        return Ok(tw);
    }
    let gamma = permutation_correction(u.n(), r, &u.permutation_image())?;
    let gamma_word = gamma.expand()?;
    debug_assert_eq!(gamma_word.permutation_image(), u.permutation_image());
    let residue = u.concat(&gamma_word.inverse())?;
    let mut out = factor_pure_kernel(&residue, r, force)?;
    out.extend(&gamma);
    Ok(out)
}
