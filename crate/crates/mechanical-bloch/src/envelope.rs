//! Envelope-level dynamics: the slowly-varying-envelope equations for the
//! eigenmode amplitudes, the rotating-frame / RWA reduction, the closed-form
//! segment solution, and the generalized Rabi frequency.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rk4::rk4_step;

/// Frame tag for a pair of envelope amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// Envelopes relative to the carrier only.
    LabEnvelope,
    /// Co-rotating with the drive at omega_drive / 2 per amplitude.
    RotatingFrame { omega_drive: f64 },
}

/// Complex envelope pair (a, b) with its frame tag; the state vector of the
/// mechanical atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
    pub t: f64,
    pub frame: Frame,
}

impl ModeAmplitudes {
    pub fn lab(a: Complex64, b: Complex64, t: f64) -> Self {
        Self {
            a,
            b,
            t,
            frame: Frame::LabEnvelope,
        }
    }

    pub fn rotating(a: Complex64, b: Complex64, t: f64, omega_drive: f64) -> Self {
        Self {
            a,
            b,
            t,
            frame: Frame::RotatingFrame { omega_drive },
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

/// Rotating-frame drive parameters: amplitude A (signed; a negative sign is a
/// pi phase flip of the drive), detuning delta between drive and splitting,
/// and the damping rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveParams {
    pub amplitude: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl DriveParams {
    pub fn free(delta: f64, gamma: f64) -> Self {
        Self {
            amplitude: 0.0,
            delta,
            gamma,
        }
    }
}

/// Generalized Rabi frequency sqrt(A^2 + delta^2).
pub fn rabi_frequency(drive: &DriveParams) -> f64 {
    drive.amplitude.hypot(drive.delta)
}

/// Time derivative of the lab-envelope amplitudes:
/// i (da, db)/dt = 1/2 [[dOmega - i gamma, omega_d], [omega_d, -dOmega - i gamma]] (a, b).
pub fn svea_rhs(
    a: Complex64,
    b: Complex64,
    omega_d: f64,
    delta_omega: f64,
    gamma: f64,
) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let diag = Complex64::new(delta_omega, -gamma);
    let da = -0.5 * i * (diag * a + omega_d * b);
    let db = -0.5 * i * (omega_d * a - diag.conj() * b);
    (da, db)
}

/// RWA-free propagation of the lab-envelope equations under the harmonic
/// parametric drive omega_d(t) = -2 A cos(omega_drive t + phase).
///
/// Used to quantify the error of the rotating wave approximation; `dt` is the
/// integration step, and every step is recorded.
#[allow(clippy::too_many_arguments)]
pub fn propagate_envelope_exactdrive(
    initial: &ModeAmplitudes,
    delta_omega: f64,
    gamma: f64,
    amplitude: f64,
    omega_drive: f64,
    phase: f64,
    t_end: f64,
    dt: f64,
) -> Result<Vec<ModeAmplitudes>> {
    if initial.frame != Frame::LabEnvelope {
        return Err(Error::FrameMismatch(
            "exact-drive propagation expects LabEnvelope".into(),
        ));
    }
    if !(t_end > initial.t) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(
            "need t_end > initial.t and dt > 0".into(),
        ));
    }
    let rhs = |t: f64, y: &[f64; 4]| {
        let a = Complex64::new(y[0], y[1]);
        let b = Complex64::new(y[2], y[3]);
        let omega_d = -2.0 * amplitude * (omega_drive * t + phase).cos();
        let (da, db) = svea_rhs(a, b, omega_d, delta_omega, gamma);
        [da.re, da.im, db.re, db.im]
    };
    let steps = ((t_end - initial.t) / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = [initial.a.re, initial.a.im, initial.b.re, initial.b.im];
    out.push(*initial);
    for i in 0..steps {
        let t = initial.t + i as f64 * dt;
        y = rk4_step(&rhs, t, &y, dt);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { t: t + dt });
        }
        out.push(ModeAmplitudes::lab(
            Complex64::new(y[0], y[1]),
            Complex64::new(y[2], y[3]),
            initial.t + (i + 1) as f64 * dt,
        ));
    }
    Ok(out)
}

/// Transform lab-envelope amplitudes into the frame rotating with the drive:
/// abar = a exp(+i omega_drive t / 2), bbar = b exp(-i omega_drive t / 2).
pub fn to_rotating_frame(state: &ModeAmplitudes, omega_drive: f64) -> Result<ModeAmplitudes> {
    if state.frame != Frame::LabEnvelope {
        return Err(Error::FrameMismatch(
            "to_rotating_frame expects a LabEnvelope state".into(),
        ));
    }
    let half = 0.5 * omega_drive * state.t;
    Ok(ModeAmplitudes::rotating(
        state.a * Complex64::from_polar(1.0, half),
        state.b * Complex64::from_polar(1.0, -half),
        state.t,
        omega_drive,
    ))
}

/// Inverse of [`to_rotating_frame`].
pub fn from_rotating_frame(state: &ModeAmplitudes) -> Result<ModeAmplitudes> {
    let Frame::RotatingFrame { omega_drive } = state.frame else {
        return Err(Error::FrameMismatch(
            "from_rotating_frame expects a RotatingFrame state".into(),
        ));
    };
    let half = 0.5 * omega_drive * state.t;
    Ok(ModeAmplitudes::lab(
        state.a * Complex64::from_polar(1.0, -half),
        state.b * Complex64::from_polar(1.0, half),
        state.t,
    ))
}

/// Rotating-frame RWA derivative:
/// i (dabar, dbbar)/dt = 1/2 [[delta - i gamma, -A], [-A, -delta - i gamma]] (abar, bbar).
pub fn rwa_rhs(a: Complex64, b: Complex64, drive: &DriveParams) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let diag = Complex64::new(drive.delta, -drive.gamma);
    let da = -0.5 * i * (diag * a - drive.amplitude * b);
    let db = -0.5 * i * (-drive.amplitude * a - diag.conj() * b);
    (da, db)
}

/// sin(x)/den with the series limit for small arguments; used for the
/// sin(Omega_R t / 2) / Omega_R factor of the closed-form solution.
fn half_sinc(omega_r: f64, t: f64) -> f64 {
    if (omega_r * t).abs() < 1e-6 {
        0.5 * t * (1.0 - (omega_r * t).powi(2) / 24.0)
    } else {
        (0.5 * omega_r * t).sin() / omega_r
    }
}

/// Closed-form rotating-frame solution over a segment of constant drive.
///
/// At gamma = 0 the map is exactly norm preserving; the Omega_R -> 0 limit is
/// handled by a series expansion, so there is no branch discontinuity.
pub fn analytic_solution(
    a0: Complex64,
    b0: Complex64,
    drive: &DriveParams,
    t: f64,
) -> (Complex64, Complex64) {
    let omega_r = rabi_frequency(drive);
    let i = Complex64::i();
    let c = (0.5 * omega_r * t).cos();
    let s = half_sinc(omega_r, t);
    let decay = (-0.5 * drive.gamma * t).exp();
    let a = (i * drive.amplitude * s * b0 + (c - i * drive.delta * s) * a0) * decay;
    let b = (i * drive.amplitude * s * a0 + (c + i * drive.delta * s) * b0) * decay;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rk4::rk4_integrate;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn svea_rhs_uncoupled_phase_rotation() {
        let (da, db) = svea_rhs(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.3, 0.0);
        assert!((da - c(0.0, -0.15)).norm() < 1e-15);
        assert_eq!(db, c(0.0, 0.0));
    }

    #[test]
    fn svea_rhs_pure_decay() {
        let a = c(0.4, -0.2);
        let b = c(-0.1, 0.7);
        let (da, db) = svea_rhs(a, b, 0.0, 0.0, 0.08);
        assert!((da + 0.04 * a).norm() < 1e-15);
        assert!((db + 0.04 * b).norm() < 1e-15);
    }

    #[test]
    fn svea_rhs_matches_finite_difference_of_exactdrive() {
        let a0 = c(0.6, 0.1);
        let b0 = c(-0.2, 0.3);
        let (delta_omega, gamma, amp, omega_drive) = (0.05, 0.002, 0.01, 0.048);
        let init = ModeAmplitudes::lab(a0, b0, 0.0);
        let run = |t_end: f64| {
            let traj = propagate_envelope_exactdrive(
                &init,
                delta_omega,
                gamma,
                amp,
                omega_drive,
                0.0,
                t_end,
                1e-4,
            )
            .unwrap();
            *traj.last().unwrap()
        };
        let h = 1e-3;
        let plus = run(h);
        let minus = run(2.0 * h);
        // centered difference around t = h using states at 0, h, 2h
        let da_fd = (minus.a - a0) / (2.0 * h);
        let db_fd = (minus.b - b0) / (2.0 * h);
        let omega_d = -2.0 * amp * (omega_drive * h).cos();
        let (da, db) = svea_rhs(plus.a, plus.b, omega_d, delta_omega, gamma);
        assert!((da - da_fd).norm() < 1e-8, "{:e}", (da - da_fd).norm());
        assert!((db - db_fd).norm() < 1e-8);
    }

    #[test]
    fn exactdrive_free_evolution_is_phase_and_decay() {
        let a0 = c(0.8, -0.3);
        let b0 = c(0.1, 0.2);
        let (delta_omega, gamma) = (0.05, 0.004);
        let init = ModeAmplitudes::lab(a0, b0, 0.0);
        let traj =
            propagate_envelope_exactdrive(&init, delta_omega, gamma, 0.0, 0.05, 0.0, 50.0, 0.01)
                .unwrap();
        let fin = traj.last().unwrap();
        let t = fin.t;
        let phase = Complex64::from_polar((-0.5 * gamma * t).exp(), -0.5 * delta_omega * t);
        assert!((fin.a - a0 * phase).norm() < 1e-9);
        assert!((fin.b - b0 * phase.conj()).norm() < 1e-9);
    }

    #[test]
    fn rwa_is_excellent_for_weak_drive() {
        // resonant drive, A = dOmega / 100: populations track the closed
        // form up to the counter-rotating micromotion, whose amplitude is
        // first order A / (4 omega_drive) = 2.5e-3 here and is not an
        // integration artifact
        let delta_omega = 0.05;
        let amp = delta_omega / 100.0;
        let init = ModeAmplitudes::lab(c(1.0, 0.0), c(0.0, 0.0), 0.0);
        let t_end = std::f64::consts::PI / amp; // one pi flop
        let traj = propagate_envelope_exactdrive(
            &init,
            delta_omega,
            0.0,
            amp,
            delta_omega,
            0.0,
            t_end,
            0.05,
        )
        .unwrap();
        let drive = DriveParams {
            amplitude: amp,
            delta: 0.0,
            gamma: 0.0,
        };
        let omega_r = rabi_frequency(&drive);
        let mut worst: f64 = 0.0;
        for s in &traj {
            let expect_b = (0.5 * omega_r * s.t).sin().powi(2);
            worst = worst.max((s.b.norm_sqr() - expect_b).abs());
        }
        assert!(worst < 5e-3, "max population error {worst:e}");
    }

    #[test]
    fn rwa_breaks_for_strong_drive() {
        let delta_omega = 0.05;
        let amp = delta_omega / 2.0;
        let init = ModeAmplitudes::lab(c(1.0, 0.0), c(0.0, 0.0), 0.0);
        let t_end = std::f64::consts::PI / amp;
        let traj = propagate_envelope_exactdrive(
            &init,
            delta_omega,
            0.0,
            amp,
            delta_omega,
            0.0,
            t_end,
            0.002,
        )
        .unwrap();
        let mut worst: f64 = 0.0;
        for s in &traj {
            let expect_b = (0.5 * amp * s.t).sin().powi(2);
            worst = worst.max((s.b.norm_sqr() - expect_b).abs());
        }
        assert!(
            worst > 1e-2,
            "expected visible RWA breakdown, got {worst:e}"
        );
    }

    #[test]
    fn rwa_error_decreases_with_drive_ratio() {
        let delta_omega = 0.05;
        let mut errors = Vec::new();
        for ratio in [0.5, 0.1, 0.01] {
            let amp = delta_omega * ratio;
            let init = ModeAmplitudes::lab(c(1.0, 0.0), c(0.0, 0.0), 0.0);
            let t_end = std::f64::consts::PI / amp;
            let dt = (0.02 / delta_omega).min(0.05 / amp);
            let traj = propagate_envelope_exactdrive(
                &init,
                delta_omega,
                0.0,
                amp,
                delta_omega,
                0.0,
                t_end,
                dt,
            )
            .unwrap();
            let mut worst: f64 = 0.0;
            for s in &traj {
                let expect_b = (0.5 * amp * s.t).sin().powi(2);
                worst = worst.max((s.b.norm_sqr() - expect_b).abs());
            }
            errors.push(worst);
        }
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    }

    #[test]
    fn rotating_frame_round_trip_and_hand_value() {
        let s = ModeAmplitudes::lab(c(1.0, 0.0), c(0.0, 0.0), std::f64::consts::FRAC_PI_2);
        let r = to_rotating_frame(&s, 2.0).unwrap();
        // abar = e^{i pi/2} = i
        assert!((r.a - c(0.0, 1.0)).norm() < 1e-15);
        let back = from_rotating_frame(&r).unwrap();
        assert!((back.a - s.a).norm() < 1e-15);
        assert!((back.b - s.b).norm() < 1e-15);

        let t0 = ModeAmplitudes::lab(c(0.3, 0.4), c(-0.5, 0.2), 0.0);
        let r0 = to_rotating_frame(&t0, 7.0).unwrap();
        assert_eq!(r0.a, t0.a);
        assert_eq!(r0.b, t0.b);
    }

    #[test]
    fn rotating_frame_preserves_norms() {
        let s = ModeAmplitudes::lab(c(0.3, 0.4), c(-0.5, 0.2), 13.7);
        let r = to_rotating_frame(&s, 3.1).unwrap();
        assert_abs_diff_eq!(r.a.norm(), s.a.norm(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.b.norm(), s.b.norm(), epsilon = 1e-15);
    }

    #[test]
    fn frame_mismatch_is_contract_error() {
        let rot = ModeAmplitudes::rotating(c(1.0, 0.0), c(0.0, 0.0), 0.0, 1.0);
        assert!(to_rotating_frame(&rot, 1.0).is_err());
        let lab = ModeAmplitudes::lab(c(1.0, 0.0), c(0.0, 0.0), 0.0);
        assert!(from_rotating_frame(&lab).is_err());
    }

    #[test]
    fn rwa_rhs_examples() {
        let drive = DriveParams {
            amplitude: 0.0,
            delta: 0.0,
            gamma: 0.0,
        };
        let (da, db) = rwa_rhs(c(0.7, 0.1), c(0.2, -0.3), &drive);
        assert_eq!(da, c(0.0, 0.0));
        assert_eq!(db, c(0.0, 0.0));

        let drive = DriveParams {
            amplitude: 0.1,
            delta: 0.0,
            gamma: 0.0,
        };
        let (_, db) = rwa_rhs(c(1.0, 0.0), c(0.0, 0.0), &drive);
        assert!((db - c(0.0, 0.05)).norm() < 1e-15);

        let drive = DriveParams {
            amplitude: 0.0,
            delta: 0.0,
            gamma: 0.12,
        };
        let a = c(0.3, 0.6);
        let b = c(-0.4, 0.2);
        let (da, db) = rwa_rhs(a, b, &drive);
        assert!((da + 0.06 * a).norm() < 1e-15);
        assert!((db + 0.06 * b).norm() < 1e-15);
    }

    #[test]
    fn analytic_pi_pulse_inverts() {
        let drive = DriveParams {
            amplitude: 0.1,
            delta: 0.0,
            gamma: 0.0,
        };
        let t = std::f64::consts::PI / 0.1;
        let (a, b) = analytic_solution(c(1.0, 0.0), c(0.0, 0.0), &drive, t);
        assert!(a.norm() < 1e-15);
        assert!((b - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn analytic_detuned_ceiling() {
        let drive = DriveParams {
            amplitude: 0.1,
            delta: 0.1,
            gamma: 0.0,
        };
        let omega_r = rabi_frequency(&drive);
        let mut max_b: f64 = 0.0;
        for i in 0..=4000 {
            let t = i as f64 * (4.0 * std::f64::consts::PI / omega_r) / 4000.0;
            let (_, b) = analytic_solution(c(1.0, 0.0), c(0.0, 0.0), &drive, t);
            max_b = max_b.max(b.norm_sqr());
        }
        assert!((max_b - 0.5).abs() < 1e-6);
        // exact ceiling at t = pi / Omega_R
        let (_, b) = analytic_solution(
            c(1.0, 0.0),
            c(0.0, 0.0),
            &drive,
            std::f64::consts::PI / omega_r,
        );
        assert!((b.norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn analytic_pure_decay() {
        let drive = DriveParams {
            amplitude: 0.0,
            delta: 0.0,
            gamma: 0.02,
        };
        let a0 = c(0.6, -0.2);
        let b0 = c(0.1, 0.5);
        let (a, b) = analytic_solution(a0, b0, &drive, 10.0);
        let scale = (-0.1f64).exp();
        assert!((a - a0 * scale).norm() < 1e-15);
        assert!((b - b0 * scale).norm() < 1e-15);
    }

    #[test]
    fn rabi_frequency_values() {
        assert_eq!(
            rabi_frequency(&DriveParams {
                amplitude: 0.1,
                delta: 0.0,
                gamma: 0.0
            }),
            0.1
        );
        assert_eq!(
            rabi_frequency(&DriveParams {
                amplitude: 0.0,
                delta: 0.3,
                gamma: 0.0
            }),
            0.3
        );
        assert!(
            (rabi_frequency(&DriveParams {
                amplitude: 0.3,
                delta: 0.4,
                gamma: 0.0
            }) - 0.5)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn analytic_matches_rk4_of_rwa_rhs() {
        let grid = [
            DriveParams {
                amplitude: 0.1,
                delta: 0.0,
                gamma: 0.0,
            },
            DriveParams {
                amplitude: 0.1,
                delta: 0.05,
                gamma: 0.01,
            },
            DriveParams {
                amplitude: 0.0,
                delta: 0.2,
                gamma: 0.0,
            },
            DriveParams {
                amplitude: 0.3,
                delta: -0.1,
                gamma: 0.02,
            },
            DriveParams {
                amplitude: -0.2,
                delta: 0.1,
                gamma: 0.005,
            },
        ];
        let a0 = c(0.6, 0.2);
        let b0 = c(-0.3, 0.5);
        for drive in grid {
            let omega_r = rabi_frequency(&drive).max(0.05);
            let t_end = 20.0 / omega_r;
            let rhs = |_t: f64, y: &[f64; 4]| {
                let (da, db) = rwa_rhs(c(y[0], y[1]), c(y[2], y[3]), &drive);
                [da.re, da.im, db.re, db.im]
            };
            let steps = 40_000;
            let traj = rk4_integrate(
                &rhs,
                0.0,
                [a0.re, a0.im, b0.re, b0.im],
                t_end / steps as f64,
                steps,
            );
            let (t, y) = traj.last().unwrap();
            let (a, b) = analytic_solution(a0, b0, &drive, *t);
            assert!((a - c(y[0], y[1])).norm() < 1e-9, "{drive:?}");
            assert!((b - c(y[2], y[3])).norm() < 1e-9, "{drive:?}");
        }
    }

    proptest! {
        #[test]
        fn norm_law_and_composition(
            amp in -0.5f64..0.5,
            delta in -0.5f64..0.5,
            gamma in 0.0f64..0.1,
            t1 in 0.0f64..30.0,
            t2 in 0.0f64..30.0,
            re_a in -1.0f64..1.0,
            im_a in -1.0f64..1.0,
            re_b in -1.0f64..1.0,
            im_b in -1.0f64..1.0,
        ) {
            let drive = DriveParams { amplitude: amp, delta, gamma };
            let a0 = c(re_a, im_a);
            let b0 = c(re_b, im_b);
            let n0 = a0.norm_sqr() + b0.norm_sqr();

            // exact exponential norm decay
            let (a, b) = analytic_solution(a0, b0, &drive, t1);
            let n = a.norm_sqr() + b.norm_sqr();
            prop_assert!((n - n0 * (-gamma * t1).exp()).abs() <= 1e-12 * n0.max(1.0));

            // time-independent generator composes
            let (a_two, b_two) = analytic_solution(a, b, &drive, t2);
            let (a_one, b_one) = analytic_solution(a0, b0, &drive, t1 + t2);
            prop_assert!((a_two - a_one).norm() <= 1e-12);
            prop_assert!((b_two - b_one).norm() <= 1e-12);
        }
    }
}
