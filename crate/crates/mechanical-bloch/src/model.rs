//! Physical parameter set, derived frequencies, eigenmode analysis for
//! constant detuning, and the transformations between oscillator and
//! eigenmode coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical configuration of the coupled-oscillator pair.
///
/// Both oscillators share the mass `m` and base spring constant `k`; they are
/// coupled by a spring `kappa` and damped at a common rate `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Oscillator mass (kg), > 0.
    pub m: f64,
    /// Base spring constant (N/m), > 0.
    pub k: f64,
    /// Coupling spring constant (N/m), >= 0.
    pub kappa: f64,
    /// Velocity damping rate (1/s), >= 0.
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(m: f64, k: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let p = Self { m, k, kappa, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::InvalidParams(format!(
                "m must be > 0, got {}",
                self.m
            )));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidParams(format!(
                "k must be > 0, got {}",
                self.k
            )));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParams(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Whether the configuration is in the weak-coupling regime the envelope
    /// model assumes. Not enforced anywhere; callers may warn.
    pub fn is_weak_coupling(&self) -> bool {
        self.kappa <= 0.1 * self.k
    }

    /// Coupling frequency squared, kappa / m.
    pub fn omega_c2(&self) -> f64 {
        self.kappa / self.m
    }

    /// Carrier frequency sqrt((k + kappa) / m).
    pub fn omega0(&self) -> f64 {
        ((self.k + self.kappa) / self.m).sqrt()
    }
}

/// Frequencies derived from a `SystemParams`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedFrequencies {
    /// Carrier frequency sqrt((k + kappa) / m) (rad/s).
    pub omega0: f64,
    /// Coupling frequency squared kappa / m (rad^2/s^2).
    pub omega_c2: f64,
    /// Exact splitting at zero detuning, sqrt((k + 2 kappa)/m) - sqrt(k/m).
    pub delta_omega_exact: f64,
    /// Weak-coupling approximation of the splitting, omega_c2 / omega0.
    pub delta_omega_approx: f64,
}

pub fn derive_frequencies(params: &SystemParams) -> Result<DerivedFrequencies> {
    params.validate()?;
    let omega0 = params.omega0();
    let omega_c2 = params.omega_c2();
    let delta_omega_exact =
        ((params.k + 2.0 * params.kappa) / params.m).sqrt() - (params.k / params.m).sqrt();
    let delta_omega_approx = omega_c2 / omega0;
    Ok(DerivedFrequencies {
        omega0,
        omega_c2,
        delta_omega_exact,
        delta_omega_approx,
    })
}

/// Spring-constant detuning applied antisymmetrically to the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetuningSpec {
    /// Static detuning dk (N/m).
    Constant { dk: f64 },
    /// Parametric drive dk(t) = -2 omega0 m A cos(omega_drive t + phase),
    /// with the amplitude `a` in rad/s.
    Harmonic {
        a: f64,
        omega_drive: f64,
        phase: f64,
    },
}

impl DetuningSpec {
    /// Instantaneous dk (N/m) at time t.
    pub fn dk_at(&self, params: &SystemParams, t: f64) -> f64 {
        match *self {
            DetuningSpec::Constant { dk } => dk,
            DetuningSpec::Harmonic {
                a,
                omega_drive,
                phase,
            } => -2.0 * params.omega0() * params.m * a * (omega_drive * t + phase).cos(),
        }
    }
}

/// Eigenfrequencies (omega_plus, omega_minus) for constant detuning dk.
///
/// omega_plus belongs to the (near-)symmetric branch and is the lower of the
/// two; the gap never closes for kappa > 0.
pub fn eigenfrequencies(params: &SystemParams, dk: f64) -> Result<(f64, f64)> {
    params.validate()?;
    let omega0_sq = (params.k + params.kappa) / params.m;
    let omega_d2 = dk / params.m;
    let omega_c2 = params.omega_c2();
    let split = (omega_d2 * omega_d2 + omega_c2 * omega_c2).sqrt();
    let radicand = omega0_sq - split;
    if radicand < 0.0 {
        return Err(Error::ImaginaryEigenfrequency { radicand });
    }
    Ok((radicand.sqrt(), (omega0_sq + split).sqrt()))
}

/// Transformation matrix whose rows are eigenvectors of the coupling matrix,
/// in the paper-style un-normalized convention (first component 1).
///
/// At dk = 0 this reduces to [[1, 1], [1, -1]], which is also returned for
/// the fully uncoupled degenerate case kappa = dk = 0.
pub fn transform_matrix(params: &SystemParams, dk: f64) -> Result<[[f64; 2]; 2]> {
    params.validate()?;
    if params.kappa == 0.0 {
        if dk == 0.0 {
            return Ok([[1.0, 1.0], [1.0, -1.0]]);
        }
        return Err(Error::DegenerateTransform);
    }
    // q = (Omega_d / Omega_c)^2 = dk / kappa
    let q = dk / params.kappa;
    let root = (1.0 + q * q).sqrt();
    Ok([[1.0, -q + root], [1.0, -q - root]])
}

/// Resonant basis change (x_plus, x_minus) = (x_a + x_b, x_a - x_b).
pub fn oscillators_to_modes(x_a: f64, x_b: f64) -> (f64, f64) {
    (x_a + x_b, x_a - x_b)
}

/// Inverse of [`oscillators_to_modes`]; the resonant transform is not
/// unitary, so the inverse carries the factor 1/2.
pub fn modes_to_oscillators(x_plus: f64, x_minus: f64) -> (f64, f64) {
    (0.5 * (x_plus + x_minus), 0.5 * (x_plus - x_minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn paper_params() -> SystemParams {
        SystemParams::new(1.0, 1.0, 0.05, 0.0).unwrap()
    }

    #[test]
    fn derive_frequencies_zero_coupling() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let f = derive_frequencies(&p).unwrap();
        assert_eq!(f.omega0, 1.0);
        assert_eq!(f.delta_omega_exact, 0.0);
        assert_eq!(f.delta_omega_approx, 0.0);
    }

    #[test]
    fn derive_frequencies_paper_values() {
        let f = derive_frequencies(&paper_params()).unwrap();
        assert_relative_eq!(f.omega0, 1.05f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            f.delta_omega_exact,
            1.1f64.sqrt() - 1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            f.delta_omega_approx,
            0.05 / 1.05f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn derive_frequencies_scale_invariance() {
        let f1 = derive_frequencies(&paper_params()).unwrap();
        let f2 = derive_frequencies(&SystemParams::new(4.0, 4.0, 0.2, 0.0).unwrap()).unwrap();
        assert_relative_eq!(f1.omega0, f2.omega0, max_relative = 1e-15);
        assert_relative_eq!(
            f1.delta_omega_exact,
            f2.delta_omega_exact,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            f1.delta_omega_approx,
            f2.delta_omega_approx,
            max_relative = 1e-15
        );
    }

    #[test]
    fn derive_frequencies_rejects_bad_params() {
        assert!(SystemParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, -0.1, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.1, -0.1).is_err());
    }

    #[test]
    fn eigenfrequencies_resonant() {
        let (wp, wm) = eigenfrequencies(&paper_params(), 0.0).unwrap();
        assert_relative_eq!(wp, 1.0, max_relative = 1e-14);
        assert_relative_eq!(wm, 1.1f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn eigenfrequencies_uncoupled_degenerate() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let (wp, wm) = eigenfrequencies(&p, 0.0).unwrap();
        assert_eq!(wp, 1.0);
        assert_eq!(wm, 1.0);
    }

    #[test]
    fn eigenfrequencies_detuned() {
        let (wp, wm) = eigenfrequencies(&paper_params(), 0.1).unwrap();
        let split = (0.01f64 + 0.0025).sqrt();
        assert_relative_eq!(wp, (1.05 - split).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(wm, (1.05 + split).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn eigenfrequencies_overdetuned_is_domain_error() {
        let p = SystemParams::new(1.0, 1.0, 0.05, 0.0).unwrap();
        let err = eigenfrequencies(&p, 100.0).unwrap_err();
        assert!(matches!(err, Error::ImaginaryEigenfrequency { .. }));
    }

    #[test]
    fn transform_matrix_resonant() {
        let u = transform_matrix(&paper_params(), 0.0).unwrap();
        assert_eq!(u, [[1.0, 1.0], [1.0, -1.0]]);
    }

    #[test]
    fn transform_matrix_equal_detuning_and_coupling() {
        let u = transform_matrix(&paper_params(), 0.05).unwrap();
        let s = 2.0f64.sqrt();
        assert_relative_eq!(u[0][1], -1.0 + s, max_relative = 1e-15);
        assert_relative_eq!(u[1][1], -1.0 - s, max_relative = 1e-15);
    }

    #[test]
    fn transform_matrix_localizes_at_large_detuning() {
        let u = transform_matrix(&paper_params(), 50.0).unwrap();
        assert!(u[0][1] > 0.0 && u[0][1] < 1e-3);
        assert!(u[1][1] < 0.0);
    }

    #[test]
    fn transform_matrix_degenerate_error() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            transform_matrix(&p, 0.1),
            Err(Error::DegenerateTransform)
        ));
        assert!(transform_matrix(&p, 0.0).is_ok());
    }

    #[test]
    fn mode_transform_examples() {
        assert_eq!(oscillators_to_modes(1.0, 1.0), (2.0, 0.0));
        assert_eq!(oscillators_to_modes(1.0, -1.0), (0.0, 2.0));
        let (xp, xm) = oscillators_to_modes(0.3, 0.7);
        assert_abs_diff_eq!(xp, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xm, -0.4, epsilon = 1e-15);
        let (xa, xb) = modes_to_oscillators(xp, xm);
        assert_abs_diff_eq!(xa, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(xb, 0.7, epsilon = 1e-15);
    }

    /// Residual of the eigenvalue relation M v = lambda v for both rows of U,
    /// with M the coupling matrix of the matrix-form equations of motion and
    /// the rows orthonormalized before the check.
    fn eigen_residual(params: &SystemParams, dk: f64) -> f64 {
        let u = transform_matrix(params, dk).unwrap();
        let omega_d2 = dk / params.m;
        let omega_c2 = params.omega_c2();
        let m = [[-omega_d2, -omega_c2], [-omega_c2, omega_d2]];
        let split = (omega_d2 * omega_d2 + omega_c2 * omega_c2).sqrt();
        let lambdas = [-split, split];
        let mut worst: f64 = 0.0;
        for (row, lambda) in u.iter().zip(lambdas) {
            let norm = (row[0] * row[0] + row[1] * row[1]).sqrt();
            let v = [row[0] / norm, row[1] / norm];
            let mv = [
                m[0][0] * v[0] + m[0][1] * v[1],
                m[1][0] * v[0] + m[1][1] * v[1],
            ];
            let r = [mv[0] - lambda * v[0], mv[1] - lambda * v[1]];
            worst = worst.max((r[0] * r[0] + r[1] * r[1]).sqrt());
        }
        worst
    }

    #[test]
    fn eigenvector_residuals_below_1e12() {
        let p = paper_params();
        for i in 0..81 {
            let dk = -0.2 + 0.005 * i as f64;
            assert!(
                eigen_residual(&p, dk) < 1e-12,
                "residual too large at dk={dk}"
            );
        }
    }

    #[test]
    fn anticrossing_gap_is_minimal_at_resonance() {
        let p = paper_params();
        let f = derive_frequencies(&p).unwrap();
        let mut min_gap = f64::INFINITY;
        for i in 0..=400 {
            let dk = -0.2 + 0.001 * i as f64;
            let (wp, wm) = eigenfrequencies(&p, dk).unwrap();
            min_gap = min_gap.min(wm - wp);
        }
        assert!(min_gap >= f.delta_omega_exact - 1e-12);
    }

    #[test]
    fn splitting_approximation_error_bound() {
        for kappa_over_k in [1e-3, 1e-2, 5e-2] {
            let p = SystemParams::new(1.0, 1.0, kappa_over_k, 0.0).unwrap();
            let f = derive_frequencies(&p).unwrap();
            let rel = ((f.delta_omega_approx - f.delta_omega_exact) / f.delta_omega_exact).abs();
            let bound = (f.omega_c2 / (f.omega0 * f.omega0)).powi(2);
            assert!(
                rel <= bound,
                "kappa/k={kappa_over_k}: rel={rel:e} bound={bound:e}"
            );
        }
    }

    proptest! {
        #[test]
        fn mode_round_trip_is_identity(xa in -1e3f64..1e3, xb in -1e3f64..1e3) {
            let (xp, xm) = oscillators_to_modes(xa, xb);
            let (ra, rb) = modes_to_oscillators(xp, xm);
            // rounding in the sum/difference is relative to the larger input,
            // not to each output
            let scale = xa.abs().max(xb.abs()).max(1.0);
            prop_assert!((ra - xa).abs() <= 1e-15 * scale);
            prop_assert!((rb - xb).abs() <= 1e-15 * scale);
        }

        #[test]
        fn branches_never_cross(kappa in 1e-4f64..0.5, dk in -0.3f64..0.3) {
            let p = SystemParams::new(1.0, 1.0, kappa, 0.0).unwrap();
            let f = derive_frequencies(&p).unwrap();
            let (wp, wm) = eigenfrequencies(&p, dk).unwrap();
            prop_assert!(wm - wp >= f.delta_omega_exact - 1e-12);
        }
    }
}
