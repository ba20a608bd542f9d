//! Lab-frame Newtonian dynamics: RK4 integration of the full coupled
//! equations of motion with time-dependent detuning, an energy audit, and
//! quadrature demodulation of the mode envelopes for comparison against the
//! envelope model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, DetuningSpec, SystemParams};
use crate::rk4::rk4_step;

/// Lab-frame phase-space sample of both oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonState {
    pub t: f64,
    pub x_a: f64,
    pub v_a: f64,
    pub x_b: f64,
    pub v_b: f64,
}

impl NewtonState {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.x_a.is_finite()
            && self.v_a.is_finite()
            && self.x_b.is_finite()
            && self.v_b.is_finite()
    }
}

/// External force on oscillator A; used only for state-preparation
/// demonstrations, never during protocol evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceSpec {
    None,
    /// F(t) = amplitude * cos(omega t + phase) for t <= t_off, zero after.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
        t_off: f64,
    },
}

impl ForceSpec {
    fn force_at(&self, t: f64) -> f64 {
        match *self {
            ForceSpec::None => 0.0,
            ForceSpec::Sinusoid {
                amplitude,
                omega,
                phase,
                t_off,
            } => {
                if t <= t_off {
                    amplitude * (omega * t + phase).cos()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fixed-step trajectory of the Newtonian integration.
#[derive(Debug, Clone)]
pub struct NewtonTrajectory {
    pub samples: Vec<NewtonState>,
    pub dt: f64,
    pub params: SystemParams,
    pub detuning: DetuningSpec,
}

/// Integrate the coupled equations of motion with RK4.
///
/// The step is tied to the carrier period: dt = 2 pi / (omega0 *
/// steps_per_period). The last sample lands at or past `t_end - dt`.
pub fn integrate(
    params: &SystemParams,
    detuning: DetuningSpec,
    force: ForceSpec,
    initial: NewtonState,
    t_end: f64,
    steps_per_period: u32,
) -> Result<NewtonTrajectory> {
    params.validate()?;
    if steps_per_period < 20 {
        return Err(Error::InvalidArgument(format!(
            "steps_per_period must be >= 20, got {steps_per_period}"
        )));
    }
    if !(t_end > initial.t) {
        return Err(Error::InvalidArgument(format!(
            "t_end ({t_end}) must exceed initial.t ({})",
            initial.t
        )));
    }
    let omega0 = params.omega0();
    let dt = 2.0 * std::f64::consts::PI / (omega0 * steps_per_period as f64);
    let steps = ((t_end - initial.t) / dt).ceil() as usize;

    let omega0_sq = omega0 * omega0;
    let omega_c2 = params.omega_c2();
    let gamma = params.gamma;
    let inv_m = 1.0 / params.m;
    let rhs = |t: f64, y: &[f64; 4]| {
        let [x_a, v_a, x_b, v_b] = *y;
        let omega_d2 = detuning.dk_at(params, t) * inv_m;
        let f = force.force_at(t) * inv_m;
        [
            v_a,
            f - gamma * v_a - omega0_sq * x_a + omega_d2 * x_a + omega_c2 * x_b,
            v_b,
            -gamma * v_b - omega0_sq * x_b - omega_d2 * x_b + omega_c2 * x_a,
        ]
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let mut y = [initial.x_a, initial.v_a, initial.x_b, initial.v_b];
    samples.push(initial);
    for i in 0..steps {
        let t = initial.t + i as f64 * dt;
        y = rk4_step(&rhs, t, &y, dt);
        let state = NewtonState {
            t: initial.t + (i + 1) as f64 * dt,
            x_a: y[0],
            v_a: y[1],
            x_b: y[2],
            v_b: y[3],
        };
        if !state.is_finite() {
            return Err(Error::Divergence { t: state.t });
        }
        samples.push(state);
    }
    Ok(NewtonTrajectory {
        samples,
        dt,
        params: *params,
        detuning,
    })
}

/// Total mechanical energy at a sample, for the instantaneous detuning
/// `dk_now`. Potential terms: base springs k -/+ dk and the coupling spring.
pub fn total_energy(params: &SystemParams, dk_now: f64, state: &NewtonState) -> f64 {
    let kinetic = 0.5 * params.m * (state.v_a * state.v_a + state.v_b * state.v_b);
    let spring_a = 0.5 * (params.k - dk_now) * state.x_a * state.x_a;
    let spring_b = 0.5 * (params.k + dk_now) * state.x_b * state.x_b;
    let d = state.x_a - state.x_b;
    kinetic + spring_a + spring_b + 0.5 * params.kappa * d * d
}

/// Complex mode envelopes extracted from a Newtonian trajectory.
#[derive(Debug, Clone)]
pub struct Envelopes {
    pub t: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Extract slowly varying mode envelopes by velocity-quadrature demodulation.
///
/// For each sample the symmetric/antisymmetric coordinates are formed and the
/// analytic amplitude (x - i xdot / omega) is rotated out of the frame at
/// `frame_omega`. The quadrature denominator uses each mode's resonant
/// eigenfrequency (omega_plus for x_+, omega_minus for x_-); using the bare
/// carrier instead would scale every envelope by 1 -/+ dOmega/(4 omega0),
/// a systematic population error of order the splitting.
///
/// The returned envelopes are quanta-normalized: the raw amplitudes are
/// scaled by sqrt(omega_plus / omega0) and sqrt(omega_minus / omega0)
/// respectively. The parametric exchange between the modes conserves quanta
/// (energy per unit frequency), not amplitude squared, so only in these
/// units is |a|^2 + |b|^2 an invariant of the undamped driven dynamics and
/// directly comparable to the two-level populations. [`prepare_state`]
/// applies the inverse scaling.
///
/// `smooth_periods` applies a centered rectangular moving average spanning
/// that many carrier periods (0 disables smoothing); near the trajectory
/// ends the window shrinks symmetrically.
pub fn demodulate(
    traj: &NewtonTrajectory,
    frame_omega: f64,
    smooth_periods: u32,
) -> Result<Envelopes> {
    let omega0 = traj.params.omega0();
    let (omega_plus, omega_minus) = model::eigenfrequencies(&traj.params, 0.0)?;
    let n = traj.samples.len();
    let period_steps = (2.0 * std::f64::consts::PI / (omega0 * traj.dt)).round() as usize;
    if period_steps < 20 {
        return Err(Error::InvalidArgument(
            "trajectory must be sampled with at least 20 steps per carrier period".into(),
        ));
    }
    let window = period_steps * smooth_periods as usize;
    if window >= n {
        return Err(Error::InvalidArgument(format!(
            "smoothing window ({window} samples) exceeds trajectory length ({n})"
        )));
    }

    // demodulate each mode in its own resonant frame, where the envelope is
    // slow (Rabi-scale only); smoothing there does not attenuate the
    // splitting-rate rotation that a common-frame envelope carries
    let mut t = Vec::with_capacity(n);
    let mut a_raw = Vec::with_capacity(n);
    let mut b_raw = Vec::with_capacity(n);
    for s in &traj.samples {
        let (x_p, x_m) = model::oscillators_to_modes(s.x_a, s.x_b);
        let (v_p, v_m) = model::oscillators_to_modes(s.v_a, s.v_b);
        let rot_p = Complex64::from_polar(1.0, -omega_plus * s.t);
        let rot_m = Complex64::from_polar(1.0, -omega_minus * s.t);
        a_raw.push(Complex64::new(x_p, -v_p / omega_plus) * rot_p * (omega_plus / omega0).sqrt());
        b_raw.push(Complex64::new(x_m, -v_m / omega_minus) * rot_m * (omega_minus / omega0).sqrt());
        t.push(s.t);
    }
    let (mut a, mut b) = if window < 2 {
        (a_raw, b_raw)
    } else {
        (smooth(&a_raw, window), smooth(&b_raw, window))
    };
    // shift both envelopes into the requested common frame
    for i in 0..n {
        a[i] *= Complex64::from_polar(1.0, (omega_plus - frame_omega) * t[i]);
        b[i] *= Complex64::from_polar(1.0, (omega_minus - frame_omega) * t[i]);
    }
    Ok(Envelopes { t, a, b })
}

/// Centered moving average with half-width shrinking at the ends.
fn smooth(x: &[Complex64], window: usize) -> Vec<Complex64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for v in x {
        acc += v;
        prefix.push(acc);
    }
    let half = window / 2;
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let lo = i - h;
            let hi = i + h + 1;
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Lab-frame initial conditions realizing desired envelope amplitudes
/// (a0, b0) at t = 0, by inverting the envelope ansatz and the resonant mode
/// transform. Inverse of the convention used by [`demodulate`]: quadratures
/// and quanta normalization are per-mode.
pub fn prepare_state(params: &SystemParams, a0: Complex64, b0: Complex64) -> NewtonState {
    // per-mode resonant frequencies at dk = 0, matching the demodulation
    // quadrature so prepared envelopes round-trip exactly
    let omega0 = params.omega0();
    let omega_plus = (params.k / params.m).sqrt();
    let omega_minus = ((params.k + 2.0 * params.kappa) / params.m).sqrt();
    let a_lab = a0 * (omega0 / omega_plus).sqrt();
    let b_lab = b0 * (omega0 / omega_minus).sqrt();
    let x_p = a_lab.re;
    let v_p = -omega_plus * a_lab.im;
    let x_m = b_lab.re;
    let v_m = -omega_minus * b_lab.im;
    let (x_a, x_b) = model::modes_to_oscillators(x_p, x_m);
    let (v_a, v_b) = model::modes_to_oscillators(v_p, v_m);
    NewtonState {
        t: 0.0,
        x_a,
        v_a,
        x_b,
        v_b,
    }
}
