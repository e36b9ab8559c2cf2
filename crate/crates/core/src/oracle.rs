//! Brute-force reference: fourth-order Runge–Kutta integration of the
//! four-amplitude block equations
//!
//! ```text
//! Ȧ = f₁⁽²⁾e^{iΔ₂t}B + f₁⁽¹⁾e^{iΔ₁t}C − iV₁A
//! Ḃ = −f₁⁽²⁾e^{−iΔ₂t}A + f₂⁽¹⁾e^{iΔ₁t}D − iV₂B
//! Ċ = −f₁⁽¹⁾e^{−iΔ₁t}A + f₂⁽²⁾e^{iΔ₂t}D − iV₂C
//! Ḋ = −f₂⁽¹⁾e^{−iΔ₁t}B − f₂⁽²⁾e^{−iΔ₂t}C − iV₃D
//! ```
//!
//! for arbitrary (not necessarily identical) atoms.
//!
//! A block never couples to another one: the interaction conserves the total
//! rotated-mode photon number `n₁ + n₂ + 2` and the difference `n₁` between
//! the photon number of the first mode and the atomic excitation, so the two
//! labels fix the four basis kets completely and each block is integrated on
//! its own.
//!
//! The equations are linear, and after the substitution
//! `uₖ = e^{i(s − aₖ)t} zₖ` with `a = (Δ₁+Δ₂, Δ₁, Δ₂, 0)` the explicit phase
//! factors disappear and the generator is constant. The RK4 map for one step
//! is then a fixed 4×4 matrix, and many steps are applied at once by matrix
//! powers. The step is halved until no grid point moves by more than
//! [`HALVING_TOL`].

use num_complex::Complex64 as C64;

use crate::amplitudes::BlockSolution;
use crate::error::{Error, Result};
use crate::linalg::{matvec4, power4_increment, CMat4, ONE, ZERO};
use crate::model::{kerr_shifts, ModelParams};

/// Trajectory change below which a step halving is accepted.
pub const HALVING_TOL: f64 = 1e-10;
/// Initial step in units of `1/λ`.
pub const INITIAL_STEP: f64 = 1e-3;
const MAX_HALVINGS: u32 = 20;

/// Coupling constants of one block for possibly different atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDynamics {
    pub n1: i64,
    pub n2: i64,
    /// `f₁⁽¹⁾, f₁⁽²⁾`.
    pub f1: [f64; 2],
    /// `f₂⁽¹⁾, f₂⁽²⁾`.
    pub f2: [f64; 2],
    pub v: [f64; 3],
    pub delta: [f64; 2],
}

impl BlockDynamics {
    /// Block `(n₁, n₂)`; labels down to −2 describe the truncated blocks at
    /// the lattice border, where the couplings to missing kets vanish.
    pub fn new(params: &ModelParams, n1: i64, n2: i64) -> Self {
        let pos = |k: i64| k.max(0) as f64;
        let s1 = (pos(n1 + 2) * pos(n2 + 1)).sqrt();
        let s2 = (pos(n1 + 1) * pos(n2 + 2)).sqrt();
        let [l1, l2] = params.atom_coupling;
        BlockDynamics {
            n1,
            n2,
            f1: [l1 * s1, l2 * s1],
            f2: [l1 * s2, l2 * s2],
            v: kerr_shifts(n1, n2, params.kerr),
            delta: params.frame().detuning,
        }
    }

    /// Which of `A, B, C, D` correspond to kets with non-negative photon
    /// numbers.
    pub fn exists(&self) -> [bool; 4] {
        let (n1, n2) = (self.n1, self.n2);
        let pair = n1 >= -1 && n2 >= -1;
        [n1 >= -2 && n2 >= 0, pair, pair, n1 >= 0 && n2 >= -2]
    }

    /// `(cos β/2, 0, 0, sin β/2)` with missing kets set to zero.
    pub fn initial_state(&self, beta: f64) -> [C64; 4] {
        let (s, c) = (0.5 * beta).sin_cos();
        let e = self.exists();
        let pick = |ok: bool, x: f64| if ok { C64::new(x, 0.0) } else { ZERO };
        [pick(e[0], c), ZERO, ZERO, pick(e[3], s)]
    }

    /// Right-hand side of the block equations, with the explicit phases.
    pub fn rhs(&self, t: f64, z: &[C64; 4]) -> [C64; 4] {
        let [a, b, c, d] = *z;
        let [f11, f12] = self.f1;
        let [f21, f22] = self.f2;
        let e1 = C64::cis(self.delta[0] * t);
        let e2 = C64::cis(self.delta[1] * t);
        let mi = C64::new(0.0, -1.0);
        [
            f12 * e2 * b + f11 * e1 * c + mi * self.v[0] * a,
            -f12 * e2.conj() * a + f21 * e1 * d + mi * self.v[1] * b,
            -f11 * e1.conj() * a + f22 * e2 * d + mi * self.v[1] * c,
            -f21 * e1.conj() * b - f22 * e2.conj() * c + mi * self.v[2] * d,
        ]
    }

    /// Phase rates `s − aₖ` of the co-rotating frame.
    fn frame_rates(&self) -> [f64; 4] {
        let [d1, d2] = self.delta;
        let a = [d1 + d2, d1, d2, 0.0];
        let vk = [self.v[0], self.v[1], self.v[1], self.v[2]];
        let s = (0..4).map(|k| vk[k] + a[k]).sum::<f64>() / 4.0;
        a.map(|ak| s - ak)
    }

    /// Constant generator `M` of `u̇ = M u` in the co-rotating frame.
    fn generator(&self) -> CMat4 {
        let [f11, f12] = self.f1;
        let [f21, f22] = self.f2;
        let rates = self.frame_rates();
        let vk = [self.v[0], self.v[1], self.v[1], self.v[2]];
        let r = |x: f64| C64::new(x, 0.0);
        let mut m = [
            [ZERO, r(f12), r(f11), ZERO],
            [r(-f12), ZERO, ZERO, r(f21)],
            [r(-f11), ZERO, ZERO, r(f22)],
            [ZERO, r(-f21), r(-f22), ZERO],
        ];
        for k in 0..4 {
            m[k][k] = C64::new(0.0, rates[k] - vk[k]);
        }
        m
    }
}

/// Change `y(t + h) − y(t)` made by one classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_increment<F>(f: &F, t: f64, y: &[C64; 4], h: f64) -> [C64; 4]
where
    F: Fn(f64, &[C64; 4]) -> [C64; 4],
{
    let axpy = |a: &[C64; 4], k: &[C64; 4], s: f64| -> [C64; 4] { std::array::from_fn(|i| a[i] + k[i] * s) };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(y, &k3, h));
    std::array::from_fn(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
}

/// One classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &[C64; 4], h: f64) -> [C64; 4]
where
    F: Fn(f64, &[C64; 4]) -> [C64; 4],
{
    let d = rk4_increment(f, t, y, h);
    std::array::from_fn(|i| y[i] + d[i])
}

/// Integrated amplitudes on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub amps: Vec<[C64; 4]>,
    /// Accepted nominal step.
    pub step: f64,
    /// Largest trajectory change of the last halving.
    pub halving_change: f64,
}

impl OdeTrajectory {
    /// Largest departure of `Σ|zₖ|²` from its initial value.
    pub fn norm_drift(&self) -> f64 {
        let norm = |z: &[C64; 4]| z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let n0 = self.amps.first().map(norm).unwrap_or(0.0);
        self.amps.iter().map(|z| (norm(z) - n0).abs()).fold(0.0, f64::max)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridMismatch("empty time grid".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::GridMismatch(format!("time grid starts at {} instead of 0", grid[0])));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("time grid is not strictly increasing".into()));
    }
    Ok(())
}

/// Integrates block `(n₁, n₂)` of `params` from `(cos β/2, 0, 0, sin β/2)`.
pub fn integrate_block(params: &ModelParams, n1: i64, n2: i64, grid: &[f64]) -> Result<OdeTrajectory> {
    let dynamics = BlockDynamics::new(params, n1, n2);
    let init = dynamics.initial_state(params.beta);
    let h0 = INITIAL_STEP / params.atom_coupling[0].max(params.atom_coupling[1]);
    integrate(&dynamics, init, grid, h0).map_err(|e| e.in_block(n1, n2))
}

/// Integrates `dynamics` from `init` on `grid` (which must start at 0),
/// halving the step from `h0` until the trajectory is stable.
pub fn integrate(dynamics: &BlockDynamics, init: [C64; 4], grid: &[f64], h0: f64) -> Result<OdeTrajectory> {
    check_grid(grid)?;
    let m = dynamics.generator();
    let rates = dynamics.frame_rates();
    let mut h = h0;
    let mut coarse = propagate(&m, init, grid, h);
    for _ in 0..MAX_HALVINGS {
        let fine = propagate(&m, init, grid, 0.5 * h);
        // The whole trajectory is compared, not only the endpoint: for an
        // oscillating solution the endpoint error of two step sizes can
        // coincide by accident while intermediate points still differ.
        let change = coarse
            .iter()
            .zip(&fine)
            .flat_map(|(a, b)| (0..4).map(move |k| (a[k] - b[k]).norm()))
            .fold(0.0, f64::max);
        h *= 0.5;
        if change < HALVING_TOL {
            let amps = grid
                .iter()
                .zip(&fine)
                .map(|(&t, u)| std::array::from_fn(|k| u[k] * C64::cis(-rates[k] * t)))
                .collect();
            return Ok(OdeTrajectory { times: grid.to_vec(), amps, step: h, halving_change: change });
        }
        if !change.is_finite() {
            return Err(Error::StepSizeFailure { step: h, change });
        }
        coarse = fine;
    }
    let change = f64::INFINITY;
    Err(Error::StepSizeFailure { step: h, change })
}

/// RK4 trajectory of `u̇ = M u` sampled on `grid`, with nominal step `h`.
fn propagate(m: &CMat4, init: [C64; 4], grid: &[f64], h: f64) -> Vec<[C64; 4]> {
    let f = |_t: f64, u: &[C64; 4]| matvec4(m, u);
    // Increment part `R − I` of the one-step map, column by column.
    let step_increment = |hh: f64| -> CMat4 {
        let cols: [[C64; 4]; 4] = std::array::from_fn(|j| {
            let mut e = [ZERO; 4];
            e[j] = ONE;
            rk4_increment(&f, 0.0, &e, hh)
        });
        std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]))
    };
    let mut out = Vec::with_capacity(grid.len());
    out.push(init);
    let mut u = init;
    let mut cached: Option<(f64, CMat4)> = None;
    for w in grid.windows(2) {
        let len = w[1] - w[0];
        let prop = match cached {
            Some((l, p)) if (l - len).abs() <= 1e-14 * len => p,
            _ => {
                let steps = (len / h - 1e-9).ceil().max(1.0);
                let p = power4_increment(&step_increment(len / steps), steps as u64);
                cached = Some((len, p));
                p
            }
        };
        let du = matvec4(&prop, &u);
        u = std::array::from_fn(|k| u[k] + du[k]);
        out.push(u);
    }
    out
}

/// Plain step-by-step RK4 on the literal right-hand side from `t0` to `t1`
/// with a step close to `|h|` (negative direction allowed).
pub fn integrate_stepwise(dynamics: &BlockDynamics, init: [C64; 4], t0: f64, t1: f64, h: f64) -> [C64; 4] {
    let steps = ((t1 - t0).abs() / h.abs()).round().max(1.0) as usize;
    let hh = (t1 - t0) / steps as f64;
    let f = |t: f64, z: &[C64; 4]| dynamics.rhs(t, z);
    let mut z = init;
    for k in 0..steps {
        z = rk4_step(&f, t0 + k as f64 * hh, &z, hh);
    }
    z
}

/// Largest absolute difference between `expected` and the trajectory, over
/// all grid points and amplitudes.
pub fn max_deviation(expected: &[[C64; 4]], numeric: &OdeTrajectory) -> Result<f64> {
    if expected.len() != numeric.amps.len() || expected.is_empty() {
        return Err(Error::GridMismatch(format!(
            "{} analytic samples against {} integrated samples",
            expected.len(),
            numeric.amps.len()
        )));
    }
    Ok(expected
        .iter()
        .zip(&numeric.amps)
        .flat_map(|(a, b)| (0..4).map(move |k| (a[k] - b[k]).norm()))
        .fold(0.0, f64::max))
}

/// Deviation of a closed-form block solution from an integrated trajectory.
pub fn compare_block(analytic: &BlockSolution, numeric: &OdeTrajectory) -> Result<f64> {
    let expected: Vec<_> = numeric.times.iter().map(|&t| analytic.amplitudes_at(t)).collect();
    max_deviation(&expected, numeric)
}
