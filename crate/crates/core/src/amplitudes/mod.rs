//! Closed-form block amplitudes for identical atoms.
//!
//! In a block `(n₁, n₂)` the amplitudes of `|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩`
//! are called `A, B, C, D`. For identical atoms `B = C`, and with `y = μ + V₃`
//! and `q = Δ + V₂ − V₃`
//!
//! ```text
//! D(t) = Σₘ bₘ e^{iμₘt}
//! B(t) = C(t) = −i e^{iΔt}/(2f₂) · Σₘ yₘ bₘ e^{iμₘt}
//! A(t) = e^{2iΔt}/(2f₁f₂) · Σₘ (2f₂² − yₘ(yₘ + q)) bₘ e^{iμₘt}
//! ```
//!
//! where `μₘ` are the roots of the characteristic cubic.

mod edge;

pub use edge::{PairKind, PairSolution};

use num_complex::Complex64 as C64;

use crate::cubic::{min_root_separation, solve_cubic_trig, CubicCoefficients, CubicRoots};
use crate::error::{Error, Result};
use crate::linalg::{solve3, ZERO};
use crate::model::{block_coefficients, kerr_shifts, BlockCoefficients, ModelParams};

/// Coefficients `x₁, x₂, x₃` of the characteristic cubic in `μ`.
pub fn characteristic_coefficients(b: &BlockCoefficients, delta: f64) -> CubicCoefficients {
    let [v1, v2, v3] = b.v;
    let (f1s, f2s) = (b.f1 * b.f1, b.f2 * b.f2);
    let x1 = 3.0 * delta + v1 + v2 + v3;
    let x2 = -2.0 * (f1s + f2s) + (2.0 * delta + v1) * (delta + v2) + (3.0 * delta + v1 + v2) * v3;
    let x3 = -2.0 * f2s * (2.0 * delta + v1) + (-2.0 * f1s + (2.0 * delta + v1) * (delta + v2)) * v3;
    CubicCoefficients::new(x1, x2, x3)
}

/// The same cubic written in `y = μ + V₃`.
///
/// The Kerr energies grow quadratically with the photon number while the
/// roots only spread with the couplings; shifting by `V₃` first keeps the
/// large common part out of the cancellation-prone trigonometric formula.
fn shifted_coefficients(b: &BlockCoefficients, delta: f64) -> CubicCoefficients {
    let [v1, v2, v3] = b.v;
    let p = 2.0 * delta + v1 - v3;
    let q = delta + v2 - v3;
    let (f1s, f2s) = (b.f1 * b.f1, b.f2 * b.f2);
    CubicCoefficients::new(p + q, p * q - 2.0 * (f1s + f2s), -2.0 * f2s * p)
}

/// Initial-condition weights of one block, from the linear system and from
/// the explicit Lagrange-type closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialWeights {
    pub weights: [f64; 3],
    pub closed_form: [f64; 3],
    /// `max |weights − closed_form| / max(1, max |weights|)`.
    pub discrepancy: f64,
}

/// Weights `bₘ` reproducing `A(0) = cos(β/2)`, `B(0) = C(0) = 0` and
/// `D(0) = sin(β/2)` for the characteristic roots `roots`.
pub fn initial_weights(beta: f64, block: &BlockCoefficients, delta: f64, roots: &CubicRoots) -> Result<InitialWeights> {
    let v3 = block.v[2];
    let y = roots.roots.map(|mu| mu + v3);
    let (s, c) = (0.5 * beta).sin_cos();
    weights_for(c, s, block, delta, y)
}

fn weights_for(a0: f64, d0: f64, b: &BlockCoefficients, delta: f64, y: [f64; 3]) -> Result<InitialWeights> {
    let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let sep = (y[0] - y[1]).abs().min((y[0] - y[2]).abs()).min((y[1] - y[2]).abs());
    if !(sep > 1e-12 * scale * scale) {
        return Err(Error::DegenerateRoots { separation: sep });
    }
    let q = delta + b.v[1] - b.v[2];
    let (f1, f2) = (b.f1, b.f2);
    // Rows: D(0) = d0, B(0) = 0, A(0) = a0.
    let system = [
        [1.0; 3],
        y,
        y.map(|ym| (2.0 * f2 * f2 - ym * (ym + q)) / (2.0 * f1 * f2)),
    ];
    let weights = solve3(system, [d0, 0.0, a0]).ok_or(Error::DegenerateRoots { separation: sep })?;

    let mut closed_form = [0.0; 3];
    for m in 0..3 {
        let (k, l) = ((m + 1) % 3, (m + 2) % 3);
        let num = -2.0 * a0 * f1 * f2 + d0 * (2.0 * f2 * f2 + y[k] * y[l]);
        closed_form[m] = num / ((y[m] - y[k]) * (y[m] - y[l]));
    }
    let size = weights.iter().fold(1.0f64, |m, w| m.max(w.abs()));
    let discrepancy = weights.iter().zip(&closed_form).map(|(w, c)| (w - c).abs()).fold(0.0, f64::max) / size;
    Ok(InitialWeights { weights, closed_form, discrepancy })
}

/// Analytic solution of one regular block `(n₁, n₂)` with `n₁, n₂ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSolution {
    pub coeffs: BlockCoefficients,
    pub delta: f64,
    pub beta: f64,
    /// Characteristic roots `μ₁ < μ₂ < μ₃`.
    pub roots: CubicRoots,
    /// `yₘ = μₘ + V₃`; amplitudes are evaluated from these.
    pub shifted: [f64; 3],
    /// Weights for the block's own initial condition `(cos β/2, 0, 0, sin β/2)`.
    pub weights: [f64; 3],
    /// Weights for a unit `|e₁e₂⟩` start and a unit `|g₁g₂⟩` start.
    pub excited_weights: [f64; 3],
    pub ground_weights: [f64; 3],
    pub closed_form_discrepancy: f64,
}

impl BlockSolution {
    pub fn new(coeffs: BlockCoefficients, delta: f64, beta: f64) -> Result<Self> {
        let shifted_roots = solve_cubic_trig(&shifted_coefficients(&coeffs, delta))?;
        let shifted = shifted_roots.roots;
        let v3 = coeffs.v[2];
        let roots = CubicRoots { roots: shifted.map(|y| y - v3), phi: shifted_roots.phi };
        let excited = weights_for(1.0, 0.0, &coeffs, delta, shifted)?;
        let ground = weights_for(0.0, 1.0, &coeffs, delta, shifted)?;
        let (s, c) = (0.5 * beta).sin_cos();
        let own = weights_for(c, s, &coeffs, delta, shifted)?;
        let closed_form_discrepancy = excited.discrepancy.max(ground.discrepancy).max(own.discrepancy);
        Ok(BlockSolution {
            coeffs,
            delta,
            beta,
            roots,
            shifted,
            weights: own.weights,
            excited_weights: excited.weights,
            ground_weights: ground.weights,
            closed_form_discrepancy,
        })
    }

    pub fn min_root_separation(&self) -> f64 {
        min_root_separation(&self.roots)
    }

    /// `(A, B, C, D)` at time `t` for the block's own initial condition.
    pub fn amplitudes_at(&self, t: f64) -> [C64; 4] {
        self.evaluate(t, self.weights.map(|w| C64::new(w, 0.0)))
    }

    /// `(A, B, C, D)` at time `t` for the initial condition
    /// `(a0, 0, 0, d0)`, by linearity in the two unit starts.
    pub fn amplitudes_from(&self, t: f64, a0: C64, d0: C64) -> [C64; 4] {
        let w = std::array::from_fn(|m| a0 * self.excited_weights[m] + d0 * self.ground_weights[m]);
        self.evaluate(t, w)
    }

    fn evaluate(&self, t: f64, w: [C64; 3]) -> [C64; 4] {
        let BlockCoefficients { f1, f2, v, .. } = self.coeffs;
        let q = self.delta + v[1] - v[2];
        let base = C64::cis(-v[2] * t);
        let (mut sa, mut sb, mut sd) = (ZERO, ZERO, ZERO);
        for (&y, &wm) in self.shifted.iter().zip(&w) {
            let e = wm * C64::cis(y * t);
            sd += e;
            sb += e * y;
            sa += e * (2.0 * f2 * f2 - y * (y + q));
        }
        let d = base * sd;
        let b = base * sb * C64::cis(self.delta * t) * C64::new(0.0, -0.5 / f2);
        let a = base * sa * C64::cis(2.0 * self.delta * t) / (2.0 * f1 * f2);
        [a, b, b, d]
    }
}

/// Closed-form dynamics of any block label on the truncated Fock lattice,
/// `n₁, n₂ ≥ −2`.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldBlock {
    Regular(BlockSolution),
    Pair(PairSolution),
    /// `|e₁e₂, 0, n₂⟩`, uncoupled, with Kerr energy `V₁`.
    ExcitedDark { v1: f64 },
    /// `|g₁g₂, n₁, 0⟩`, uncoupled, with Kerr energy `V₃`.
    GroundDark { v3: f64 },
    /// No member of the block both exists and can be populated.
    Empty,
}

impl FieldBlock {
    /// Amplitudes at `t` for the initial condition `(a0, 0, 0, d0)`.
    /// Entries of members that do not exist in this block are zero, and so
    /// is the start amplitude of such a member.
    pub fn amplitudes_from(&self, t: f64, a0: C64, d0: C64) -> [C64; 4] {
        match self {
            FieldBlock::Regular(s) => s.amplitudes_from(t, a0, d0),
            FieldBlock::Pair(p) => match p.kind {
                PairKind::Excited => p.amplitudes_from(t, a0),
                PairKind::Ground => p.amplitudes_from(t, d0),
            },
            FieldBlock::ExcitedDark { v1 } => [a0 * C64::cis(-v1 * t), ZERO, ZERO, ZERO],
            FieldBlock::GroundDark { v3 } => [ZERO, ZERO, ZERO, d0 * C64::cis(-v3 * t)],
            FieldBlock::Empty => [ZERO; 4],
        }
    }
}

/// Builds block solutions for a fixed set of identical-atom parameters.
#[derive(Clone, Debug)]
pub struct AnalyticSolver {
    pub lambda: f64,
    pub delta: f64,
    pub chi: f64,
    pub beta: f64,
}

impl AnalyticSolver {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let (lambda, delta) = params.identical_atoms()?;
        Ok(AnalyticSolver { lambda, delta, chi: params.kerr, beta: params.beta })
    }

    pub fn coefficients(&self, n1: usize, n2: usize) -> BlockCoefficients {
        block_coefficients(n1, n2, self.lambda, self.chi)
    }

    pub fn block(&self, n1: usize, n2: usize) -> Result<BlockSolution> {
        BlockSolution::new(self.coefficients(n1, n2), self.delta, self.beta).map_err(|e| e.in_block(n1 as i64, n2 as i64))
    }

    pub fn field_block(&self, n1: i64, n2: i64) -> Result<FieldBlock> {
        assert!(n1 >= -2 && n2 >= -2, "block labels start at -2");
        let v = kerr_shifts(n1, n2, self.chi);
        Ok(match (n1, n2) {
            (a, b) if a >= 0 && b >= 0 => FieldBlock::Regular(self.block(a as usize, b as usize)?),
            (-1, b) if b >= 0 => {
                let g = self.lambda * ((b + 1) as f64).sqrt();
                FieldBlock::Pair(PairSolution::new(PairKind::Excited, g, self.delta, v))
            }
            (a, -1) if a >= 0 => {
                let g = self.lambda * ((a + 1) as f64).sqrt();
                FieldBlock::Pair(PairSolution::new(PairKind::Ground, g, self.delta, v))
            }
            (-2, b) if b >= 0 => FieldBlock::ExcitedDark { v1: v[0] },
            (a, -2) if a >= 0 => FieldBlock::GroundDark { v3: v[2] },
            _ => FieldBlock::Empty,
        })
    }
}
