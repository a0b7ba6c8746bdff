//! Computing with stratified braid monodromy.
//!
//! The crate evaluates the winding-number crossed homomorphisms `φ_r` and the
//! virtual undercrossing map `Υ_r` on braid words, decides kernel membership,
//! constructively factors kernel elements into basic `(r+1)`-st twists with a
//! certified equality oracle, and enumerates the labeling systems and
//! Type 1/2 moves that give the cell structure of the strata `Ω_κ` of
//! translation surfaces attached to logarithmic derivatives of polynomials.

pub mod braid;
pub mod crossed_hom;
pub mod factorization;
pub mod strata;
pub mod winding;
pub mod word_problem;

pub use braid::{basic_twist_word, pure_gen_word, sigma, BasicTwist, BraidError, BraidWord, Permutation, PureBraidGen};
pub use crossed_hom::{comparison_f, in_kernel, parity_obstruction, phi, upsilon, ResidueVector, UpsilonElement};
pub use word_problem::{equals, is_trivial, normal_form, NormalForm};
