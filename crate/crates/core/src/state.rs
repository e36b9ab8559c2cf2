//! Coherent-state weights, assembly of the joint atoms–fields state and its
//! reduction to the two-atom density matrix.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::amplitudes::{AnalyticSolver, FieldBlock};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat4, ZERO};
use crate::model::ModelParams;

/// Fock amplitudes `q₀ … q_{n_max}` of a coherent state `|α⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentWeights {
    pub alpha: C64,
    pub q: Vec<C64>,
    /// `1 − Σ|qₙ|²`, the probability beyond the truncation.
    pub tail_mass: f64,
}

impl CoherentWeights {
    /// `qₙ`, or zero outside the stored range.
    pub fn get(&self, n: i64) -> C64 {
        usize::try_from(n).ok().and_then(|n| self.q.get(n).copied()).unwrap_or(ZERO)
    }
}

/// `qₙ = e^{−|α|²/2} αⁿ/√(n!)` by the recurrence `q_{n+1} = qₙ α/√(n+1)`.
pub fn coherent_weights(alpha: C64, n_max: usize, tail_tol: f64) -> Result<CoherentWeights> {
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let mut q = Vec::with_capacity(n_max + 1);
    let mut cur = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        q.push(cur);
        cur = cur * alpha / ((n + 1) as f64).sqrt();
    }
    let kept: f64 = q.iter().map(|x| x.norm_sqr()).sum();
    let tail_mass = (1.0 - kept).max(0.0);
    if tail_mass > tail_tol {
        return Err(Error::TruncationTooSmall { tail_mass, tail_tol });
    }
    Ok(CoherentWeights { alpha, q, tail_mass })
}

/// How the initial atoms–fields state is split over photon blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StateConvention {
    /// The product `(cos(β/2)|e₁e₂⟩ + sin(β/2)|g₁g₂⟩) ⊗ |α₁⟩|α₂⟩`. Each
    /// branch lands in the block whose member carries the matching photon
    /// numbers, which also populates the truncated border blocks.
    #[default]
    Product,
    /// Every regular block `(n₁, n₂)` starts as `q_{n₁}q_{n₂}·(cos(β/2), 0,
    /// 0, sin(β/2))`. For `β ∉ {0, π}` this is not a product state.
    Ansatz,
}

impl FromStr for StateConvention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "product" => Ok(StateConvention::Product),
            "ansatz" => Ok(StateConvention::Ansatz),
            other => Err(format!("unknown initial_state '{other}' (expected product or ansatz)")),
        }
    }
}

impl fmt::Display for StateConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateConvention::Product => "product",
            StateConvention::Ansatz => "ansatz",
        })
    }
}

#[derive(Clone, Debug)]
struct BlockEntry {
    n1: i64,
    n2: i64,
    a0: C64,
    d0: C64,
    block: FieldBlock,
}

/// All block solutions and their initial amplitudes; evaluates the joint
/// state at any time.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub params: ModelParams,
    pub convention: StateConvention,
    pub weights: [CoherentWeights; 2],
    entries: Vec<BlockEntry>,
}

impl Evolution {
    pub fn new(params: &ModelParams, convention: StateConvention) -> Result<Self> {
        let solver = AnalyticSolver::new(params)?;
        let weights = [
            coherent_weights(params.alpha[0], params.n_max, params.tail_tol)?,
            coherent_weights(params.alpha[1], params.n_max, params.tail_tol)?,
        ];
        let (s, c) = (0.5 * params.beta).sin_cos();
        let n = params.n_max as i64;
        let lo = match convention {
            StateConvention::Product => -2,
            StateConvention::Ansatz => 0,
        };
        let mut entries = Vec::new();
        for n1 in lo..=n {
            for n2 in lo..=n {
                let (a0, d0) = match convention {
                    StateConvention::Product => {
                        (weights[0].get(n1 + 2) * weights[1].get(n2) * c, weights[0].get(n1) * weights[1].get(n2 + 2) * s)
                    }
                    StateConvention::Ansatz => {
                        let w = weights[0].get(n1) * weights[1].get(n2);
                        (w * c, w * s)
                    }
                };
                if a0 == ZERO && d0 == ZERO {
                    continue;
                }
                let block = solver.field_block(n1, n2)?;
                entries.push(BlockEntry { n1, n2, a0, d0, block });
            }
        }
        Ok(Evolution { params: params.clone(), convention, weights, entries })
    }

    /// Number of populated blocks.
    pub fn block_count(&self) -> usize {
        self.entries.len()
    }

    /// `Σ (|a₀|² + |d₀|²)` over blocks, the norm the state keeps for all time.
    pub fn initial_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.a0.norm_sqr() + e.d0.norm_sqr()).sum()
    }

    /// Largest weight discrepancy reported by any regular block.
    pub fn closed_form_discrepancy(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| match &e.block {
                FieldBlock::Regular(s) => Some(s.closed_form_discrepancy),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// The joint state at time `t`.
    pub fn assemble(&self, t: f64) -> JointState {
        let dim = self.params.n_max + 3;
        let mut amps = vec![ZERO; 4 * dim * dim];
        for e in &self.entries {
            let z = e.block.amplitudes_from(t, e.a0, e.d0);
            // Fock numbers of the A, B/C and D members.
            let kets = [(e.n1 + 2, e.n2), (e.n1 + 1, e.n2 + 1), (e.n1 + 1, e.n2 + 1), (e.n1, e.n2 + 2)];
            for (atom, (&(m1, m2), &amp)) in kets.iter().zip(&z).enumerate() {
                if m1 < 0 || m2 < 0 {
                    continue;
                }
                amps[(atom * dim + m1 as usize) * dim + m2 as usize] += amp;
            }
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum();
        JointState { time: t, dim, amps, norm }
    }
}

/// Amplitudes `ψ(i, n₁, n₂)` of the atoms–fields state at one time, for the
/// atomic basis `i ∈ {e₁e₂, e₁g₂, g₁e₂, g₁g₂}` and photon numbers below `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub time: f64,
    pub dim: usize,
    pub amps: Vec<C64>,
    pub norm: f64,
}

impl JointState {
    pub fn amp(&self, atom: usize, n1: usize, n2: usize) -> C64 {
        self.amps[(atom * self.dim + n1) * self.dim + n2]
    }

    /// Field component `|φᵢ⟩` attached to atomic basis state `atom`.
    pub fn field_vector(&self, atom: usize) -> &[C64] {
        let len = self.dim * self.dim;
        &self.amps[atom * len..(atom + 1) * len]
    }

    /// Writes `atom_index,n1,n2,re,im` rows with 1-based atom indices.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "atom_index,n1,n2,re,im")?;
        for atom in 0..4 {
            for n1 in 0..self.dim {
                for n2 in 0..self.dim {
                    let z = self.amp(atom, n1, n2);
                    writeln!(w, "{},{},{},{:.16e},{:.16e}", atom + 1, n1, n2, z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Two-atom density matrix in the basis `|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomDensityMatrix {
    pub rho: CMat4,
}

/// `ρᵢⱼ = Σ_{n₁,n₂} ψ(i,n₁,n₂) ψ*(j,n₁,n₂)`, unnormalized.
pub fn atom_density_matrix(state: &JointState) -> AtomDensityMatrix {
    let mut rho = [[ZERO; 4]; 4];
    for i in 0..4 {
        let vi = state.field_vector(i);
        for j in i..4 {
            let vj = state.field_vector(j);
            let s: C64 = vi.iter().zip(vj).map(|(a, b)| a * b.conj()).sum();
            rho[i][j] = s;
            rho[j][i] = s.conj();
        }
    }
    AtomDensityMatrix { rho }
}

impl AtomDensityMatrix {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// `ρ / Tr ρ`.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        AtomDensityMatrix { rho: self.rho.map(|row| row.map(|z| z / tr)) }
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (self.rho[i][j] - self.rho[j][i].conj()).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference between rows 2, 3 and columns 2, 3.
    pub fn exchange_asymmetry(&self) -> f64 {
        (0..4).map(|k| (self.rho[1][k] - self.rho[2][k]).norm().max((self.rho[k][1] - self.rho[k][2]).norm())).fold(0.0, f64::max)
    }

    /// Transpose on the second atom: `ρ[(a,b),(c,d)] → ρ[(a,d),(c,b)]`.
    pub fn partial_transpose(&self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out[2 * a + b][2 * c + d] = self.rho[2 * a + d][2 * c + b];
                    }
                }
            }
        }
        AtomDensityMatrix { rho: out }
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.rho)
    }
}

/// Squared Schmidt coefficients of the atoms–fields split from the Gram
/// matrix of the four field vectors, normalized to unit sum and ascending.
///
/// The vectors are orthogonalized by one-sided (Hestenes) Jacobi rotations;
/// their final squared norms are the Gram eigenvalues. This never forms the
/// atomic density matrix.
pub fn atom_gram_eigenvalues(state: &JointState) -> [f64; 4] {
    let mut v: Vec<Vec<C64>> = (0..4).map(|i| state.field_vector(i).to_vec()).collect();
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let nrm = |a: &[C64]| -> f64 { a.iter().map(|x| x.norm_sqr()).sum() };
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..4 {
            for q in p + 1..4 {
                let alpha = nrm(&v[p]);
                let beta = nrm(&v[q]);
                let gamma = dot(&v[p], &v[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let w = *y * phase;
                    let xp = *x * c - w * s;
                    *y = *x * s + w * c;
                    *x = xp;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut ev: [f64; 4] = std::array::from_fn(|i| nrm(&v[i]));
    let total: f64 = ev.iter().sum();
    if total > 0.0 {
        ev.iter_mut().for_each(|x| *x /= total);
    }
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(chi: f64, delta: f64, beta: f64) -> ModelParams {
        ModelParams { kerr: chi, beta, ..Default::default() }.with_detuning(delta)
    }

    /// Σ_{n>n_max} of the Poisson(m) distribution, summed term by term from
    /// log-space probabilities.
    fn poisson_tail(mean: f64, n_max: usize) -> f64 {
        let mut total = 0.0;
        for n in n_max + 1..n_max + 400 {
            let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
            total += (n as f64 * mean.ln() - mean - ln_fact).exp();
        }
        total
    }

    #[test]
    fn coherent_weights_examples() {
        let w = coherent_weights(ZERO, 5, 1e-8).unwrap();
        assert_eq!(w.q[0], C64::new(1.0, 0.0));
        assert!(w.q[1..].iter().all(|&x| x == ZERO));

        let alpha = C64::new(10f64.sqrt(), 0.0);
        let w = coherent_weights(alpha, 40, 1e-8).unwrap();
        let mean: f64 = w.q.iter().enumerate().map(|(n, x)| n as f64 * x.norm_sqr()).sum();
        assert!((mean - 10.0).abs() < 1e-6);
        assert!(w.tail_mass < 1e-8);
        let oracle = poisson_tail(10.0, 40);
        assert!((w.tail_mass - oracle).abs() < 1e-13, "{} vs {oracle}", w.tail_mass);
    }

    #[test]
    fn coherent_weights_match_closed_form() {
        let alpha = C64::new(1.2, -2.1);
        let w = coherent_weights(alpha, 30, 1e-6).unwrap();
        for n in 0..=30usize {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let want = (-0.5 * alpha.norm_sqr()).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!((w.q[n] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn truncation_too_small_is_reported() {
        let r = coherent_weights(C64::new(10f64.sqrt(), 0.0), 10, 1e-8);
        assert!(matches!(r, Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn product_start_density_matrices() {
        let ev = Evolution::new(&params(0.4, 5.0, 0.0), StateConvention::Product).unwrap();
        let rho = atom_density_matrix(&ev.assemble(0.0)).normalized();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((rho.rho[i][j] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }

        let ev = Evolution::new(&params(0.0, 0.0, FRAC_PI_2), StateConvention::Product).unwrap();
        let rho = atom_density_matrix(&ev.assemble(0.0)).normalized();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i == 0 || i == 3) && (j == 0 || j == 3) { 0.5 } else { 0.0 };
                assert!((rho.rho[i][j] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ansatz_start_is_not_a_product_for_mixed_beta() {
        let ev = Evolution::new(&params(0.0, 0.0, FRAC_PI_2), StateConvention::Ansatz).unwrap();
        let rho = atom_density_matrix(&ev.assemble(0.0)).normalized();
        assert!(rho.purity() < 0.99);
        // At β = 0 the ansatz is the excited atoms times shifted Fock weights.
        let ev = Evolution::new(&params(0.0, 0.0, 0.0), StateConvention::Ansatz).unwrap();
        let st = ev.assemble(0.0);
        let q = &ev.weights;
        assert!((st.amp(0, 5, 3) - q[0].q[3] * q[1].q[3]).norm() < 1e-15);
        assert!((st.norm - ev.initial_mass()).abs() < 1e-12);
    }

    #[test]
    fn norm_bookkeeping() {
        for &beta in &[0.0, 1.0, PI] {
            let ev = Evolution::new(&params(0.4, 5.0, beta), StateConvention::Product).unwrap();
            for &t in &[0.0, 3.7, 30.0] {
                let st = ev.assemble(t);
                assert!((st.norm - ev.initial_mass()).abs() < 1e-12);
                assert!((st.norm - 1.0).abs() < 10.0 * ev.params.tail_tol);
                let rho = atom_density_matrix(&st);
                assert!((rho.trace() - st.norm).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_state_keeps_pair_symmetry() {
        let ev = Evolution::new(&params(0.4, 0.0, 0.6), StateConvention::Product).unwrap();
        let st = ev.assemble(4.2);
        for n1 in 0..st.dim {
            for n2 in 0..st.dim {
                assert_eq!(st.amp(1, n1, n2), st.amp(2, n1, n2));
            }
        }
    }

    #[test]
    fn density_matrix_matches_double_loop() {
        let ev = Evolution::new(&params(0.4, 5.0, 1.3), StateConvention::Product).unwrap();
        let st = ev.assemble(6.1);
        let rho = atom_density_matrix(&st);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = ZERO;
                for n1 in 0..st.dim {
                    for n2 in 0..st.dim {
                        s += st.amp(i, n1, n2) * st.amp(j, n1, n2).conj();
                    }
                }
                assert!((rho.rho[i][j] - s).norm() < 1e-13);
            }
        }
        assert!(rho.hermiticity_error() < 1e-15);
        assert!(rho.exchange_asymmetry() < 1e-15);
    }

    #[test]
    fn gram_spectrum_matches_density_matrix() {
        let ev = Evolution::new(&params(0.0, 5.0, 0.9), StateConvention::Product).unwrap();
        let st0 = ev.assemble(0.0);
        let g0 = atom_gram_eigenvalues(&st0);
        assert!((g0[3] - 1.0).abs() < 1e-12 && g0[..3].iter().all(|x| x.abs() < 1e-12));
        for &t in &[1.0, 5.0, 17.5] {
            let st = ev.assemble(t);
            let g = atom_gram_eigenvalues(&st);
            let e = atom_density_matrix(&st).normalized().eigenvalues();
            for k in 0..4 {
                assert!((g[k] - e[k]).abs() < 1e-10, "{g:?} vs {e:?}");
            }
            assert!(g[0].abs() < 1e-10);
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let mut rho = [[ZERO; 4]; 4];
        rho[0][3] = C64::new(0.5, 0.0);
        rho[1][2] = C64::new(0.0, 0.25);
        let pt = AtomDensityMatrix { rho }.partial_transpose();
        assert_eq!(pt.rho[1][2], C64::new(0.5, 0.0));
        assert_eq!(pt.rho[0][3], C64::new(0.0, 0.25));
    }

    #[test]
    fn state_dump_has_all_rows() {
        let p = ModelParams { n_max: 30, alpha: [C64::new(1.0, 0.0); 2], ..Default::default() };
        let ev = Evolution::new(&p, StateConvention::Product).unwrap();
        let mut buf = Vec::new();
        ev.assemble(1.0).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 4 * 33 * 33);
        assert!(text.starts_with("atom_index,n1,n2,re,im\n1,0,0,"));
    }
}
