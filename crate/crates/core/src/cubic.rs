//! Real cubics with three real roots, solved in trigonometric (Viète) form.
//!
//! For `μ³ + x₁μ² + x₂μ + x₃ = 0` the roots are
//!
//! ```text
//! μₘ = −x₁/3 + (2/3)·√(x₁² − 3x₂)·cos(φ + 2π(m−1)/3),
//! φ  = ⅓·acos[(9x₁x₂ − 2x₁³ − 27x₃) / (2(x₁² − 3x₂)^{3/2})].
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slack allowed on the acos argument before it is treated as a genuine
/// complex-root case rather than roundoff.
const ACOS_SLACK: f64 = 1e-9;

/// Coefficients of the monic cubic `μ³ + x₁μ² + x₂μ + x₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicCoefficients {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl CubicCoefficients {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        CubicCoefficients { x1, x2, x3 }
    }

    /// Monic cubic with the given roots.
    pub fn from_roots(r: [f64; 3]) -> Self {
        CubicCoefficients {
            x1: -(r[0] + r[1] + r[2]),
            x2: r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            x3: -(r[0] * r[1] * r[2]),
        }
    }

    pub fn eval(&self, mu: f64) -> f64 {
        ((mu + self.x1) * mu + self.x2) * mu + self.x3
    }

    /// `x₁² − 3x₂`, positive exactly when the roots are not all equal.
    pub fn discriminant(&self) -> f64 {
        self.x1 * self.x1 - 3.0 * self.x2
    }
}

/// The three real roots in ascending order, with the auxiliary angle φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicRoots {
    pub roots: [f64; 3],
    pub phi: f64,
}

/// Smallest discriminant accepted by [`solve_cubic_trig`] for a given `x₁`.
pub fn discriminant_threshold(x1: f64) -> f64 {
    1e-12 * (x1 * x1).max(1.0)
}

pub fn solve_cubic_trig(c: &CubicCoefficients) -> Result<CubicRoots> {
    let p = c.discriminant();
    let threshold = discriminant_threshold(c.x1);
    if !(p > threshold) {
        return Err(Error::DegenerateDiscriminant { value: p, threshold });
    }
    let sp = p.sqrt();
    let arg = (9.0 * c.x1 * c.x2 - 2.0 * c.x1.powi(3) - 27.0 * c.x3) / (2.0 * p * sp);
    if !(arg.abs() <= 1.0 + ACOS_SLACK) {
        return Err(Error::ComplexRootRegime { argument: arg });
    }
    let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;
    let shift = -c.x1 / 3.0;
    let amp = 2.0 / 3.0 * sp;
    let mut roots = [0.0; 3];
    for (m, r) in roots.iter_mut().enumerate() {
        *r = shift + amp * (phi + 2.0 * PI * m as f64 / 3.0).cos();
    }
    roots.sort_by(f64::total_cmp);
    Ok(CubicRoots { roots, phi })
}

pub fn min_root_separation(r: &CubicRoots) -> f64 {
    let [a, b, c] = r.roots;
    (a - b).abs().min((a - c).abs()).min((b - c).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_roots(got: [f64; 3], want: [f64; 3], tol: f64) {
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn exact_cases() {
        let r = solve_cubic_trig(&CubicCoefficients::new(0.0, -2.0, 0.0)).unwrap();
        assert_roots(r.roots, [-2f64.sqrt(), 0.0, 2f64.sqrt()], 1e-12);
        assert!((min_root_separation(&r) - 2f64.sqrt()).abs() < 1e-12);

        let r = solve_cubic_trig(&CubicCoefficients::new(-6.0, 11.0, -6.0)).unwrap();
        assert_roots(r.roots, [1.0, 2.0, 3.0], 1e-12);
        assert!((min_root_separation(&r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separation_of_resonant_block_cubic() {
        let (f1, f2) = (3f64.sqrt(), 1.7);
        let s = 2.0 * (f1 * f1 + f2 * f2);
        let r = solve_cubic_trig(&CubicCoefficients::new(0.0, -s, 0.0)).unwrap();
        assert!((min_root_separation(&r) - s.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn repeated_roots_are_rejected() {
        let c = CubicCoefficients::from_roots([2.0, 2.0, 2.0]);
        assert!(matches!(solve_cubic_trig(&c), Err(Error::DegenerateDiscriminant { .. })));
    }

    #[test]
    fn complex_roots_are_rejected() {
        // μ³ − μ + 1 has one real root.
        let c = CubicCoefficients::new(0.0, -1.0, 1.0);
        assert!(matches!(solve_cubic_trig(&c), Err(Error::ComplexRootRegime { .. })));
    }

    #[test]
    fn double_root_is_recovered_through_the_clamp() {
        let c = CubicCoefficients::from_roots([-1.0, 1.0, 1.0]);
        let r = solve_cubic_trig(&c).unwrap();
        assert_roots(r.roots, [-1.0, 1.0, 1.0], 1e-7);
    }

    proptest! {
        #[test]
        fn constructed_roots_are_recovered(a in -50.0f64..50.0, d1 in 0.05f64..30.0, d2 in 0.05f64..30.0) {
            let want = [a, a + d1, a + d1 + d2];
            let c = CubicCoefficients::from_roots(want);
            let r = solve_cubic_trig(&c).unwrap();
            let scale = want.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (g, w) in r.roots.iter().zip(&want) {
                prop_assert!((g - w).abs() <= 1e-9 * scale * scale / d1.min(d2).min(1.0));
            }
            for &mu in &r.roots {
                prop_assert!(c.eval(mu).abs() <= 1e-9 * scale.powi(3));
            }
        }
    }
}
