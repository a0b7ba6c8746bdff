//! Winding-number bookkeeping on the punctured disk: curve norms from
//! enclosed weights, the twist-linearity update, and winding numbers of
//! braid images of the standard arcs.
//!
//! Marked points are weighted `−1` per root and `k > 0` per critical point
//! of order `k`; a simple closed curve `c` has `‖c‖ = 1 + Σ w(z)` over the
//! points it encloses, and a Dehn twist about `c` changes an arc's winding
//! number by `⟨a,c⟩·‖c‖`. Only the braid-group orbit of the standard arcs is
//! modeled; their values are exactly the components of `φ_r`.

use crate::braid::BraidWord;
use crate::crossed_hom::{phi_component, CrossedHomError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindingError {
    #[error("weights must be -1 (root) or positive (critical point), got {0}")]
    BadWeight(i64),
    #[error(transparent)]
    CrossedHom(#[from] CrossedHomError),
}

/// The multiset of weights of marked points enclosed by a simple closed
/// curve.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEnclosure {
    weights: Vec<i64>,
}

impl WeightedEnclosure {
    pub fn empty() -> Self {
        WeightedEnclosure::default()
    }

    pub fn new(weights: Vec<i64>) -> Result<Self, WindingError> {
        for &w in &weights {
            if w != -1 && w <= 0 {
                return Err(WindingError::BadWeight(w));
            }
        }
        Ok(WeightedEnclosure { weights })
    }

    /// Adds one enclosed root (weight −1).
    pub fn with_root(mut self) -> Self {
        self.weights.push(-1);
        self
    }

    /// Adds one enclosed critical point of order `k ≥ 1`.
    pub fn with_critical_point(mut self, k: i64) -> Self {
        debug_assert!(k > 0);
        self.weights.push(k);
        self
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
}

/// `‖c‖ = 1 + Σ` of the enclosed weights.
pub fn curve_norm(enclosure: &WeightedEnclosure) -> i64 {
    1 + enclosure.weights.iter().sum::<i64>()
}

/// Twist-linearity: `ψ(T_c(a)) = ψ(a) + ⟨a,c⟩·‖c‖`.
pub fn twist_update(psi_a: i64, intersection: i64, norm_c: i64) -> i64 {
    psi_a + intersection * norm_c
}

/// The mod-`r` winding number of `u⁻¹·a_i` for the `i`-th standard arc on
/// the reference surface: the `i`-th component of `φ_r(u)` (`r = 0` gives
/// the integral winding number).
pub fn standard_arc_winding(u: &BraidWord, i: usize, r: u64) -> Result<i64, WindingError> {
    Ok(phi_component(u, i, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::sigma;

    #[test]
    fn norms() {
        assert_eq!(curve_norm(&WeightedEnclosure::empty().with_root()), 0);
        assert_eq!(curve_norm(&WeightedEnclosure::empty()), 1);
        assert_eq!(
            curve_norm(&WeightedEnclosure::empty().with_critical_point(3)),
            4
        );
        assert!(WeightedEnclosure::new(vec![0]).is_err());
        assert!(WeightedEnclosure::new(vec![-2]).is_err());
    }

    #[test]
    fn twist_updates() {
        assert_eq!(twist_update(0, 1, 0), 0);
        assert_eq!(twist_update(3, -2, 2), -1);
        assert_eq!(twist_update(0, 1, 1), 1);
        // k-fold twisting about the same curve is linear in k
        let (psi, int, norm) = (5i64, -3i64, 2i64);
        let mut acc = psi;
        for _ in 0..4 {
            acc = twist_update(acc, int, norm);
        }
        assert_eq!(acc, psi + 4 * int * norm);
    }

    #[test]
    fn standard_arcs() {
        for n in 3..6 {
            for i in 1..n {
                let s = sigma(n, i, 1).unwrap();
                for j in 1..=n {
                    let expected = i64::from(j == i + 1);
                    assert_eq!(standard_arc_winding(&s, j, 5).unwrap(), expected);
                }
            }
        }
        let empty = BraidWord::identity(4);
        for i in 1..=4 {
            assert_eq!(standard_arc_winding(&empty, i, 3).unwrap(), 0);
        }
        assert!(standard_arc_winding(&empty, 5, 3).is_err());
    }
}
