//! Entanglement between the atoms and the fields: von Neumann entropy of the
//! two-atom state, I-concurrence and negativity.

use crate::cubic::{solve_cubic_trig, CubicCoefficients};
use crate::error::{Error, Result};
use crate::state::{atom_density_matrix, atom_gram_eigenvalues, AtomDensityMatrix, JointState};

/// Eigenvalues below this are treated as roundoff and clamped to zero.
pub const EIGEN_CLAMP: f64 = -1e-10;
/// Allowed difference between rows/columns 2 and 3 for the Cardano path.
pub const STRUCTURE_TOL: f64 = 1e-9;
const RADICAND_CLAMP: f64 = -1e-12;

/// Cubic data of the closed-form entropy path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CardanoData {
    pub zeta: [f64; 3],
    /// Auxiliary angle ϖ of the trigonometric root formula.
    pub varpi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBreakdown {
    /// Eigenvalues ξ, descending; for the Cardano path `xi[3] = 0`.
    pub xi: [f64; 4],
    pub cardano: Option<CardanoData>,
    /// Entropy in nats.
    pub entropy: f64,
}

fn shannon(xi: &[f64]) -> f64 {
    -xi.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Clamps roundoff negatives and rescales to unit sum.
fn clean(mut xi: [f64; 4]) -> Result<[f64; 4]> {
    for x in xi.iter_mut() {
        if *x < EIGEN_CLAMP {
            return Err(Error::NegativeEigenvalue { value: *x });
        }
        *x = x.max(0.0);
    }
    let total: f64 = xi.iter().sum();
    xi.iter_mut().for_each(|x| *x /= total);
    xi.sort_by(|a, b| b.total_cmp(a));
    Ok(xi)
}

/// Entropy from the characteristic cubic of the exchange-symmetric part.
///
/// With rows and columns 2 and 3 equal, ρ has one zero eigenvalue and the
/// other three are the roots of `ξ³ + ζ₁ξ² + ζ₂ξ + ζ₃`, with
///
/// ```text
/// ζ₁ = −ρ₁₁ − 2ρ₂₂ − ρ₄₄
/// ζ₂ = −2ρ₁₂ρ₂₁ − ρ₁₄ρ₄₁ − 2ρ₂₄ρ₄₂ + 2ρ₂₂ρ₄₄ + ρ₁₁(2ρ₂₂ + ρ₄₄)
/// ζ₃ = 2ρ₁₄(ρ₂₂ρ₄₁ − ρ₂₁ρ₄₂) + 2ρ₁₂(ρ₂₁ρ₄₄ − ρ₂₄ρ₄₁) + 2ρ₁₁(ρ₂₄ρ₄₂ − ρ₂₂ρ₄₄)
/// ```
///
/// (ζ₃ is minus the determinant of the reduced 3×3 matrix
/// `[[ρ₁₁, √2ρ₁₂, ρ₁₄], [√2ρ₂₁, 2ρ₂₂, √2ρ₂₄], [ρ₄₁, √2ρ₄₂, ρ₄₄]]`).
/// A triple root `ξ = ⅓` is handled directly.
pub fn entropy_cardano(rho: &AtomDensityMatrix) -> Result<EntropyBreakdown> {
    let asym = rho.exchange_asymmetry();
    if asym > STRUCTURE_TOL {
        return Err(Error::StructureViolation { deviation: asym });
    }
    let r = rho.normalized().rho;
    let (r11, r12, r14) = (r[0][0], r[0][1], r[0][3]);
    let (r21, r22, r24) = (r[1][0], r[1][1], r[1][3]);
    let (r41, r42, r44) = (r[3][0], r[3][1], r[3][3]);
    let z1 = -r11 - 2.0 * r22 - r44;
    let z2 = -2.0 * r12 * r21 - r14 * r41 - 2.0 * r24 * r42 + 2.0 * r22 * r44 + r11 * (2.0 * r22 + r44);
    let z3 = 2.0 * r14 * (r22 * r41 - r21 * r42) + 2.0 * r12 * (r21 * r44 - r24 * r41) + 2.0 * r11 * (r24 * r42 - r22 * r44);
    let zeta = [z1.re, z2.re, z3.re];
    let cubic = CubicCoefficients::new(zeta[0], zeta[1], zeta[2]);
    let (roots, varpi) = match solve_cubic_trig(&cubic) {
        Ok(c) => (c.roots, c.phi),
        Err(Error::DegenerateDiscriminant { .. }) => ([-zeta[0] / 3.0; 3], 0.0),
        Err(e) => return Err(e),
    };
    let xi = clean([roots[0], roots[1], roots[2], 0.0])?;
    Ok(EntropyBreakdown { xi, cardano: Some(CardanoData { zeta, varpi }), entropy: shannon(&xi) })
}

/// Entropy from a general Hermitian eigensolver, without structural
/// assumptions.
pub fn entropy_eigen(rho: &AtomDensityMatrix) -> Result<EntropyBreakdown> {
    let xi = clean(rho.normalized().eigenvalues())?;
    Ok(EntropyBreakdown { xi, cardano: None, entropy: shannon(&xi) })
}

/// I-concurrence `√(2 Σ_{i≠j}(ρᵢᵢρⱼⱼ − ρᵢⱼρⱼᵢ))` of the normalized state.
pub fn concurrence(rho: &AtomDensityMatrix) -> Result<f64> {
    let r = rho.normalized().rho;
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sum += (r[i][i] * r[j][j] - r[i][j] * r[j][i]).re;
            }
        }
    }
    let rad = 2.0 * sum;
    if rad < RADICAND_CLAMP {
        return Err(Error::NegativeRadicand { value: rad });
    }
    Ok(rad.max(0.0).sqrt())
}

/// I-concurrence from the squared Schmidt coefficients `ξ` (unit sum),
/// as `2√(Σ_{i<j} ξᵢξⱼ)`, which equals `√(2(1 − Σξᵢ²))`.
///
/// The radicand of [`concurrence`] is a difference of O(1) products of ρ
/// entries and carries an absolute error of order ε, so a pure state comes
/// out with `C ≈ √ε`. Schmidt coefficients from the Gram route have small
/// relative error, and the pairwise products here involve no cancellation.
pub fn concurrence_from_schmidt(xi: &[f64; 4]) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            sum += xi[i].max(0.0) * xi[j].max(0.0);
        }
    }
    2.0 * sum.sqrt()
}

/// Eigenvalues of the partial transpose on the second atom, ascending.
pub fn partial_transpose_eigenvalues(rho: &AtomDensityMatrix) -> [f64; 4] {
    rho.normalized().partial_transpose().eigenvalues()
}

/// Negativity `−2 Σ μ_neg` over the partially transposed spectrum.
pub fn negativity(rho: &AtomDensityMatrix) -> f64 {
    let neg: f64 = partial_transpose_eigenvalues(rho).iter().filter(|&&m| m < 0.0).sum();
    (-2.0 * neg).max(0.0)
}

/// All reported quantities at one scaled time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureSample {
    pub tau: f64,
    pub entropy: f64,
    pub concurrence: f64,
    pub negativity: f64,
    /// `1 − Tr ρ` before normalization.
    pub norm_error: f64,
}

/// Measures of the joint state `state` taken at scaled time `tau`.
///
/// The concurrence is taken from the Schmidt spectrum; [`concurrence`] on ρ
/// is evaluated as well so that a negative radicand is still reported.
pub fn measure(state: &JointState, tau: f64) -> Result<MeasureSample> {
    let rho = atom_density_matrix(state);
    concurrence(&rho)?;
    Ok(MeasureSample {
        tau,
        entropy: entropy_eigen(&rho)?.entropy,
        concurrence: concurrence_from_schmidt(&atom_gram_eigenvalues(state)),
        negativity: negativity(&rho),
        norm_error: 1.0 - rho.trace(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMat4, ZERO};
    use num_complex::Complex64 as C64;
    use rand::{Rng, SeedableRng};

    fn diag(d: [f64; 4]) -> AtomDensityMatrix {
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            rho[i][i] = C64::new(d[i], 0.0);
        }
        AtomDensityMatrix { rho }
    }

    /// `Σ wₖ |vₖ⟩⟨vₖ|` for random unit vectors, optionally exchange-symmetric.
    fn random_rho(rng: &mut impl Rng, symmetric: bool) -> AtomDensityMatrix {
        let k = rng.gen_range(1..=4);
        random_rho_rank(rng, symmetric, k)
    }

    fn random_rho_rank(rng: &mut impl Rng, symmetric: bool, k: usize) -> AtomDensityMatrix {
        let mut rho = [[ZERO; 4]; 4];
        let mut total = 0.0;
        for _ in 0..k {
            let mut v: [C64; 4] = std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            if symmetric {
                v[2] = v[1];
            }
            let w: f64 = rng.gen_range(0.05..1.0);
            total += w * v.iter().map(|x| x.norm_sqr()).sum::<f64>();
            for i in 0..4 {
                for j in 0..4 {
                    rho[i][j] += v[i] * v[j].conj() * w;
                }
            }
        }
        AtomDensityMatrix { rho: rho.map(|r| r.map(|z| z / total)) }
    }

    /// Characteristic polynomial via Faddeev–LeVerrier, roots by bisection
    /// between the Gershgorin bounds: an eigenvalue oracle independent of any
    /// rotation method.
    fn polynomial_eigenvalues(m: &CMat4) -> Vec<f64> {
        let mul = |a: &CMat4, b: &CMat4| -> CMat4 {
            std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
        };
        // M₀ = 0, c₀ = 1; Mₖ = A·Mₖ₋₁ + cₖ₋₁I, cₖ = −tr(A·Mₖ)/k.
        let mut coeff = vec![1.0];
        let mut mk = [[ZERO; 4]; 4];
        let mut c_prev = C64::new(1.0, 0.0);
        for k in 1..=4 {
            let mut next = mul(m, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += c_prev;
            }
            mk = next;
            let am = mul(m, &mk);
            let tr: C64 = (0..4).map(|i| am[i][i]).sum();
            c_prev = -tr / k as f64;
            coeff.push(c_prev.re);
        }
        let p = |x: f64| coeff.iter().fold(0.0, |acc, c| acc * x + c);
        let bound = 1.0 + m.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        // Sample finely, then bisect each sign change.
        let n = 200_000;
        let mut roots = Vec::new();
        let mut x0 = -bound;
        let mut p0 = p(x0);
        for s in 1..=n {
            let x1 = -bound + 2.0 * bound * s as f64 / n as f64;
            let p1 = p(x1);
            if p0 == 0.0 {
                roots.push(x0);
            } else if p0 * p1 < 0.0 {
                let (mut a, mut b) = (x0, x1);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if p(a) * p(mid) <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            p0 = p1;
        }
        roots
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy_cardano(&diag([1.0, 0.0, 0.0, 0.0])).unwrap().entropy.abs() < 1e-13);
        assert!(entropy_eigen(&diag([1.0, 0.0, 0.0, 0.0])).unwrap().entropy.abs() < 1e-15);
        assert!((entropy_eigen(&diag([0.25; 4])).unwrap().entropy - 4f64.ln()).abs() < 1e-14);
        assert!((entropy_eigen(&diag([0.5, 0.5, 0.0, 0.0])).unwrap().entropy - 2f64.ln()).abs() < 1e-14);
        // ξ = {⅓, ⅓, ⅓, 0} with rows 2 and 3 equal: ρ₂₂ = ρ₂₃ = ρ₃₃ = ⅙.
        let mut rho = diag([1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]);
        rho.rho[1][2] = C64::new(1.0 / 6.0, 0.0);
        rho.rho[2][1] = C64::new(1.0 / 6.0, 0.0);
        let e = entropy_cardano(&rho).unwrap();
        assert!((e.entropy - 3f64.ln()).abs() < 1e-12);
        assert!((entropy_eigen(&rho).unwrap().entropy - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cardano_requires_exchange_symmetry() {
        let rho = diag([0.4, 0.3, 0.2, 0.1]);
        assert!(matches!(entropy_cardano(&rho), Err(Error::StructureViolation { .. })));
    }

    #[test]
    fn cardano_matches_eigen_on_symmetric_states() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..500 {
            let k = rng.gen_range(2..=4);
            let rho = random_rho_rank(&mut rng, true, k);
            let c = entropy_cardano(&rho).unwrap();
            let e = entropy_eigen(&rho).unwrap();
            let gap = e.xi[1] - e.xi[2];
            // Away from repeated eigenvalues the paths agree tightly.
            if gap.abs() > 1e-3 && e.xi[2] > 1e-3 {
                assert!((c.entropy - e.entropy).abs() < 1e-10);
                for k in 0..4 {
                    assert!((c.xi[k] - e.xi[k]).abs() < 1e-10);
                }
            }
            assert!(e.xi[3].abs() < 1e-10);
        }
    }

    /// A pure exchange-symmetric state puts a double root at zero, where
    /// roundoff δ in the coefficients moves the roots by about √δ.
    #[test]
    fn cardano_near_pure_states_is_square_root_accurate() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(6);
        for _ in 0..200 {
            let rho = random_rho_rank(&mut rng, true, 1);
            let e = entropy_eigen(&rho).unwrap();
            assert!(e.entropy < 1e-12);
            match entropy_cardano(&rho) {
                Ok(c) => assert!(c.xi.iter().zip(&e.xi).all(|(a, b)| (a - b).abs() < 1e-7)),
                Err(Error::NegativeEigenvalue { value }) => assert!(value > -1e-7),
                Err(other) => panic!("unexpected {other}"),
            }
        }
    }

    #[test]
    fn eigenvalues_match_polynomial_roots() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 20 {
            let mut rho = random_rho(&mut rng, false);
            // Full rank with separated eigenvalues so that every root has a sign change.
            for i in 0..4 {
                rho.rho[i][i] += C64::new(0.1 * i as f64, 0.0);
            }
            let want = polynomial_eigenvalues(&rho.rho);
            if want.len() != 4 {
                continue;
            }
            let got = rho.eigenvalues();
            for k in 0..4 {
                assert!((got[k] - want[k]).abs() < 1e-9, "{got:?} vs {want:?}");
            }
            checked += 1;
        }
    }

    #[test]
    fn concurrence_examples() {
        assert!(concurrence(&diag([1.0, 0.0, 0.0, 0.0])).unwrap().abs() < 1e-15);
        assert!((concurrence(&diag([0.25; 4])).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..200 {
            let rho = random_rho(&mut rng, false);
            let c = concurrence(&rho).unwrap();
            assert!((c * c - 2.0 * (1.0 - rho.purity())).abs() < 1e-12);
        }
    }

    #[test]
    fn schmidt_concurrence_matches_density_route() {
        assert_eq!(concurrence_from_schmidt(&[0.0, 0.0, 0.0, 1.0]), 0.0);
        assert!((concurrence_from_schmidt(&[0.25; 4]) - 1.5f64.sqrt()).abs() < 1e-15);
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..200 {
            let rho = random_rho(&mut rng, false);
            let mut xi = rho.eigenvalues();
            let total: f64 = xi.iter().sum();
            xi.iter_mut().for_each(|x| *x /= total);
            let c = concurrence_from_schmidt(&xi);
            assert!((c * c - concurrence(&rho).unwrap().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn negativity_examples() {
        for &beta in &[0.0, 0.3, std::f64::consts::FRAC_PI_2, 2.5, std::f64::consts::PI] {
            let (s, c) = (0.5f64 * beta).sin_cos();
            let mut rho = diag([c * c, 0.0, 0.0, s * s]);
            rho.rho[0][3] = C64::new(c * s, 0.0);
            rho.rho[3][0] = C64::new(c * s, 0.0);
            assert!((negativity(&rho) - beta.sin()).abs() < 1e-12);
            let pt = partial_transpose_eigenvalues(&rho);
            let abs_sum: f64 = pt.iter().map(|m| m.abs()).sum();
            let neg: f64 = pt.iter().filter(|&&m| m < 0.0).sum();
            assert!((abs_sum - (1.0 - 2.0 * neg)).abs() < 1e-10);
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for _ in 0..200 {
            let rho = random_rho(&mut rng, false);
            let pt = rho.normalized().partial_transpose();
            assert!((pt.trace() - 1.0).abs() < 1e-12);
            let n = negativity(&rho);
            assert!((0.0..=1.0 + 1e-9).contains(&n));
        }
    }

    #[test]
    fn negative_eigenvalue_is_an_error() {
        assert!(matches!(entropy_eigen(&diag([1.1, -0.1, 0.0, 0.0])), Err(Error::NegativeEigenvalue { .. })));
    }
}
