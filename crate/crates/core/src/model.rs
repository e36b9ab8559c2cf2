//! Physical parameters, the rotated (Bogoliubov–Valatin) mode frame and the
//! per-block coupling constants.
//!
//! The two cavity modes `a₁, a₂` are mixed into `b₁ = a₁ cos θ − a₂ sin θ`,
//! `b₂ = a₁ sin θ + a₂ cos θ`, which removes the `λ₁₂ (a₁†a₂ + h.c.)`
//! converter term. The dynamics then splits into photon blocks labelled by
//! `(n₁, n₂)`, each spanned by
//!
//! ```text
//! |e₁e₂, n₁+2, n₂⟩   |e₁g₂, n₁+1, n₂+1⟩   |g₁e₂, n₁+1, n₂+1⟩   |g₁g₂, n₁, n₂+2⟩
//! ```

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether the two atoms are identical.
const IDENTICAL_ATOM_RTOL: f64 = 1e-12;

/// All physical constants of the two-atom, two-mode Kerr cavity.
///
/// Frequencies and couplings share one arbitrary unit; the scaled time is
/// `τ = λ t` with `λ` the common atom–field coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Atomic transition frequencies ω₁, ω₂.
    pub atom_freq: [f64; 2],
    /// Bare mode frequencies Ω₁, Ω₂.
    pub mode_freq: [f64; 2],
    /// Field–field converter coupling λ₁₂.
    pub mode_coupling: f64,
    /// Atom–field couplings λ₁, λ₂.
    pub atom_coupling: [f64; 2],
    /// Kerr strength χ. Self-action is χ on each mode and cross-action 2χ,
    /// the only choice that keeps the Kerr terms invariant under the mode
    /// rotation.
    pub kerr: f64,
    /// Atomic superposition angle: the atoms start in
    /// `cos(β/2)|e₁e₂⟩ + sin(β/2)|g₁g₂⟩`.
    pub beta: f64,
    /// Coherent amplitudes of the two (rotated) modes.
    pub alpha: [C64; 2],
    /// Fock truncation per mode for the initial coherent states.
    pub n_max: usize,
    /// Largest coherent-state probability mass allowed beyond `n_max`.
    pub tail_tol: f64,
}

impl Default for ModelParams {
    /// Resonant, Kerr-free atoms in `|e₁e₂⟩` with `|α₁|² = |α₂|² = 10`.
    ///
    /// The bare mode frequencies are arbitrary: only the detuning enters the
    /// interaction-picture dynamics, and the atomic frequencies are placed on
    /// resonance with the rotated mode splitting.
    fn default() -> Self {
        let alpha = C64::new(10f64.sqrt(), 0.0);
        ModelParams {
            atom_freq: [0.0; 2],
            mode_freq: [10.0, 12.0],
            mode_coupling: 0.5,
            atom_coupling: [1.0; 2],
            kerr: 0.0,
            beta: 0.0,
            alpha: [alpha; 2],
            n_max: 40,
            tail_tol: 1e-8,
        }
        .with_detuning(0.0)
    }
}

impl ModelParams {
    /// Sets both atomic frequencies so that `Δ₁ = Δ₂ = delta`.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        let split = self.frame().mode_splitting();
        self.atom_freq = [split + delta; 2];
        self
    }

    /// Sets both atom–field couplings to `lambda`.
    pub fn with_coupling(mut self, lambda: f64) -> Self {
        self.atom_coupling = [lambda; 2];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.atom_freq.iter().chain(&self.mode_freq).chain(&self.atom_coupling).all(|x| x.is_finite())
            && self.mode_coupling.is_finite()
            && self.kerr.is_finite()
            && self.beta.is_finite()
            && self.alpha.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all frequencies, couplings and amplitudes must be finite".into()));
        }
        if self.atom_coupling.iter().any(|&l| l <= 0.0) {
            return Err(Error::InvalidParams(format!(
                "atom-field couplings must be positive, got {:?}",
                self.atom_coupling
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.beta) {
            return Err(Error::InvalidParams(format!("beta = {} is outside [0, pi]", self.beta)));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidParams(format!("tail_tol = {} must be positive", self.tail_tol)));
        }
        Ok(())
    }

    pub fn frame(&self) -> RotatedFrame {
        rotated_frame(self)
    }

    /// Common coupling λ and detuning Δ of identical atoms.
    ///
    /// Fails when the couplings or the detunings of the two atoms differ,
    /// since the closed-form solution only exists in that case.
    pub fn identical_atoms(&self) -> Result<(f64, f64)> {
        let [l1, l2] = self.atom_coupling;
        if !approx_equal(l1, l2) {
            return Err(Error::NonIdenticalAtoms(format!("lambda1 = {l1} differs from lambda2 = {l2}")));
        }
        let [d1, d2] = self.frame().detuning;
        if !approx_equal(d1, d2) {
            return Err(Error::NonIdenticalAtoms(format!("delta1 = {d1} differs from delta2 = {d2}")));
        }
        Ok((l1, d1))
    }
}

fn approx_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= IDENTICAL_ATOM_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Quantities of the rotated mode frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatedFrame {
    /// Mixing angle, `|θ| ≤ π/4`.
    pub theta: f64,
    /// Rotated mode frequencies Ω̄₁, Ω̄₂.
    pub mode_freq: [f64; 2],
    /// Detunings `Δⱼ = ωⱼ − (Ω̄₂ − Ω̄₁)`.
    pub detuning: [f64; 2],
}

impl RotatedFrame {
    /// `Ω̄₂ − Ω̄₁`, the frequency an atomic transition has to match.
    pub fn mode_splitting(&self) -> f64 {
        self.mode_freq[1] - self.mode_freq[0]
    }
}

/// The closed-form mixing angle `½·arctan(2λ₁₂ / (Ω₁ − Ω₂))` on its
/// principal branch.
///
/// At `Ω₁ = Ω₂` the angle is `π/4·sign(λ₁₂)` (and zero when `λ₁₂ = 0` too).
/// For the mixing convention of this crate the diagonalizing rotation is the
/// one with the mode labels exchanged; see [`rotated_frame`].
pub fn rotation_angle(mode1: f64, mode2: f64, coupling: f64) -> f64 {
    let denom = mode1 - mode2;
    if denom == 0.0 {
        if coupling == 0.0 {
            0.0
        } else {
            FRAC_PI_4.copysign(coupling)
        }
    } else {
        0.5 * (2.0 * coupling / denom).atan()
    }
}

/// Rotated frame for `params`.
///
/// The frequencies are
///
/// ```text
/// Ω̄₁ = Ω₁ cos²θ + Ω₂ sin²θ − λ₁₂ sin 2θ
/// Ω̄₂ = Ω₁ sin²θ + Ω₂ cos²θ + λ₁₂ sin 2θ
/// ```
///
/// with θ chosen so that the `b₁†b₂` cross term
/// `½(Ω₁ − Ω₂) sin 2θ + λ₁₂ cos 2θ` vanishes, i.e. `tan 2θ = 2λ₁₂/(Ω₂ − Ω₁)`.
/// Ω̄ⱼ then tends to Ωⱼ as `λ₁₂ → 0` and the pair is the spectrum of the
/// quadratic form `[[Ω₁, λ₁₂], [λ₁₂, Ω₂]]`.
pub fn rotated_frame(params: &ModelParams) -> RotatedFrame {
    let [w1, w2] = params.mode_freq;
    let g = params.mode_coupling;
    let theta = rotation_angle(w2, w1, g);
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let sin2 = (2.0 * theta).sin();
    let bar1 = w1 * c2 + w2 * s2 - g * sin2;
    let bar2 = w1 * s2 + w2 * c2 + g * sin2;
    let split = bar2 - bar1;
    RotatedFrame {
        theta,
        mode_freq: [bar1, bar2],
        detuning: [params.atom_freq[0] - split, params.atom_freq[1] - split],
    }
}

/// Coupling matrix elements and Kerr shifts of one photon block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockCoefficients {
    pub n1: usize,
    pub n2: usize,
    /// `λ √((n₁+2)(n₂+1))`, coupling of `|e₁e₂⟩` to the singly excited pair.
    pub f1: f64,
    /// `λ √((n₁+1)(n₂+2))`, coupling of `|g₁g₂⟩` to the singly excited pair.
    pub f2: f64,
    /// Kerr energies of the `|e₁e₂⟩`, singly excited and `|g₁g₂⟩` members.
    pub v: [f64; 3],
}

pub fn block_coefficients(n1: usize, n2: usize, lambda: f64, chi: f64) -> BlockCoefficients {
    let (a, b) = (n1 as f64, n2 as f64);
    BlockCoefficients {
        n1,
        n2,
        f1: lambda * ((a + 2.0) * (b + 1.0)).sqrt(),
        f2: lambda * ((a + 1.0) * (b + 2.0)).sqrt(),
        v: kerr_shifts(n1 as i64, n2 as i64, chi),
    }
}

/// Kerr energies `[V₁, V₂, V₃]` of block `(n₁, n₂)`.
///
/// The polynomials are also meaningful for the truncated edge blocks with
/// `n₁` or `n₂` equal to −1 or −2.
pub(crate) fn kerr_shifts(n1: i64, n2: i64, chi: f64) -> [f64; 3] {
    let v1 = (n1 + 2) * (n1 + 1) + n2 * (n2 - 1) + 2 * (n1 + 2) * n2;
    let v2 = n1 * (n1 + 1) + n2 * (n2 + 1) + 2 * (n1 + 1) * (n2 + 1);
    let v3 = n1 * (n1 - 1) + (n2 + 1) * (n2 + 2) + 2 * n1 * (n2 + 2);
    [chi * v1 as f64, chi * v2 as f64, chi * v3 as f64]
}
