//! Truncated blocks at the border of the Fock lattice.
//!
//! When `n₁ = −1` the `|g₁g₂⟩` member of a block would need `−1` photons, so
//! only `|e₁e₂, 1, n₂⟩` and the singly excited pair `|0, n₂+1⟩` remain. The
//! case `n₂ = −1` likewise loses `|e₁e₂⟩`. Both reduce to a two-level problem
//! (the pair `B = C` acts as one symmetric state) with a quadratic spectrum.

use num_complex::Complex64 as C64;

use crate::linalg::ZERO;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `|e₁e₂, 1, n₂⟩ ↔ |e₁g₂/g₁e₂, 0, n₂+1⟩`.
    Excited,
    /// `|e₁g₂/g₁e₂, n₁+1, 0⟩ ↔ |g₁g₂, n₁, 1⟩`.
    Ground,
}

/// Closed-form dynamics of a truncated block started in its doubly excited
/// (or doubly ground) member with unit amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSolution {
    pub kind: PairKind,
    /// Coupling between the surviving member and the symmetric pair state.
    pub coupling: f64,
    pub delta: f64,
    /// Kerr energy of the surviving member (V₁ or V₃).
    pub shift: f64,
    /// Frequencies `y` relative to `shift`, ascending.
    pub roots: [f64; 2],
    pub weights: [f64; 2],
}

impl PairSolution {
    /// `v` are the Kerr energies `[V₁, V₂, V₃]` of the block.
    pub fn new(kind: PairKind, coupling: f64, delta: f64, v: [f64; 3]) -> Self {
        let (p, shift) = match kind {
            PairKind::Excited => (v[0] - v[1] + delta, v[0]),
            PairKind::Ground => (-(delta + v[1] - v[2]), v[2]),
        };
        // Roots of y² − p·y − 2g², the large one first to avoid cancellation.
        let sign = if p < 0.0 { -1.0 } else { 1.0 };
        let big = 0.5 * (p + sign * (p * p + 8.0 * coupling * coupling).sqrt());
        let small = -2.0 * coupling * coupling / big;
        let roots = if big < small { [big, small] } else { [small, big] };
        let gap = roots[1] - roots[0];
        let weights = [roots[1] / gap, -roots[0] / gap];
        PairSolution { kind, coupling, delta, shift, roots, weights }
    }

    /// Amplitudes `(A, B, C, D)` at time `t` for initial amplitude `start` in
    /// the surviving member; the missing member stays zero.
    pub fn amplitudes_from(&self, t: f64, start: C64) -> [C64; 4] {
        let base = C64::cis(-self.shift * t);
        let mut direct = ZERO;
        let mut pair = ZERO;
        for (&y, &w) in self.roots.iter().zip(&self.weights) {
            let e = C64::cis(y * t) * w;
            direct += e;
            pair += e * y;
        }
        let direct = start * base * direct;
        let scale = 0.5 / self.coupling;
        match self.kind {
            PairKind::Excited => {
                let b = start * base * pair * C64::cis(-self.delta * t) * C64::new(0.0, scale);
                [direct, b, b, ZERO]
            }
            PairKind::Ground => {
                let b = start * base * pair * C64::cis(self.delta * t) * C64::new(0.0, -scale);
                [ZERO, b, b, direct]
            }
        }
    }
}
