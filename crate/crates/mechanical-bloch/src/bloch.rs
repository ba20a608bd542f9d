//! Bloch-vector representation: mapping from envelope amplitudes, the
//! classical Bloch equations, and exact piecewise-constant segment
//! propagation (axis-angle rotation times scalar decay).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envelope::{rabi_frequency, DriveParams, ModeAmplitudes};

/// Phase-free state of the mechanical atom. The norm equals the total mode
/// population |abar|^2 + |bbar|^2 and is not renormalized anywhere; its decay
/// is physical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const NORTH_POLE: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn scale(&self, c: f64) -> BlochVector {
        BlochVector::new(c * self.x, c * self.y, c * self.z)
    }

    pub fn sub(&self, other: &BlochVector) -> BlochVector {
        BlochVector::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    /// Populations (|abar|^2, |bbar|^2) recovered from the norm identity.
    pub fn populations(&self) -> (f64, f64) {
        let n = self.norm();
        (0.5 * (n + self.z), 0.5 * (n - self.z))
    }
}

/// Generator of Bloch precession, (-A, 0, delta); its length is the
/// generalized Rabi frequency.
pub fn rotation_vector(drive: &DriveParams) -> BlochVector {
    BlochVector::new(-drive.amplitude, 0.0, drive.delta)
}

/// Map rotating-frame amplitudes onto the Bloch vector; invariant under a
/// global phase of (abar, bbar).
pub fn to_bloch(state: &ModeAmplitudes) -> BlochVector {
    let ab = state.a * state.b.conj();
    BlochVector::new(
        2.0 * ab.re,
        -2.0 * ab.im,
        state.a.norm_sqr() - state.b.norm_sqr(),
    )
}

/// Rotating-frame amplitudes realizing a given Bloch vector, with abar chosen
/// real and non-negative (the global phase is unobservable).
pub fn amplitudes_from_bloch(s: &BlochVector) -> (Complex64, Complex64) {
    let (pop_a, pop_b) = s.populations();
    let mag_a = pop_a.max(0.0).sqrt();
    let mag_b = pop_b.max(0.0).sqrt();
    let phi = (-s.y).atan2(s.x); // relative phase; arbitrary when transverse part vanishes
    (
        Complex64::new(mag_a, 0.0),
        Complex64::from_polar(mag_b, -phi),
    )
}

/// Classical Bloch equations: ds/dt = R x s - gamma s.
pub fn bloch_rhs(s: &BlochVector, drive: &DriveParams) -> BlochVector {
    let r = rotation_vector(drive);
    let prec = r.cross(s);
    prec.sub(&s.scale(drive.gamma))
}

/// Exact propagation over a segment of constant drive:
/// s(t) = e^{-gamma t} Rot(Rhat, Omega_R t) s0 (Rodrigues form).
pub fn propagate_segment(s0: &BlochVector, drive: &DriveParams, t: f64) -> BlochVector {
    let decay = (-drive.gamma * t).exp();
    let omega_r = rabi_frequency(drive);
    let angle = omega_r * t;
    if omega_r == 0.0 || angle.abs() < 1e-300 {
        return s0.scale(decay);
    }
    let axis = rotation_vector(drive).scale(1.0 / omega_r);
    let (sin_t, cos_t) = angle.sin_cos();
    let kxv = axis.cross(s0);
    let kdv = axis.dot(s0);
    let rotated = BlochVector::new(
        s0.x * cos_t + kxv.x * sin_t + axis.x * kdv * (1.0 - cos_t),
        s0.y * cos_t + kxv.y * sin_t + axis.y * kdv * (1.0 - cos_t),
        s0.z * cos_t + kxv.z * sin_t + axis.z * kdv * (1.0 - cos_t),
    );
    rotated.scale(decay)
}

/// Rotation of the Bloch vector by `angle` about the resonant drive axis
/// (-x for a positive amplitude sign), with zero elapsed time; the
/// instantaneous-pulse limit of arbitrarily strong, arbitrarily short pulses.
pub fn instantaneous_pulse(s0: &BlochVector, angle: f64, amplitude_sign: f64) -> BlochVector {
    let axis = BlochVector::new(-amplitude_sign.signum(), 0.0, 0.0);
    let (sin_t, cos_t) = angle.sin_cos();
    let kxv = axis.cross(s0);
    let kdv = axis.dot(s0);
    BlochVector::new(
        s0.x * cos_t + kxv.x * sin_t + axis.x * kdv * (1.0 - cos_t),
        s0.y * cos_t + kxv.y * sin_t + axis.y * kdv * (1.0 - cos_t),
        s0.z * cos_t + kxv.z * sin_t + axis.z * kdv * (1.0 - cos_t),
    )
}

/// Discrepancy between the two independent propagation routes: the
/// closed-form amplitude solution mapped to Bloch form versus direct Bloch
/// segment propagation. Contract: <= 1e-10.
pub fn bloch_equivalence_check(initial: &ModeAmplitudes, drive: &DriveParams, t: f64) -> f64 {
    let (a, b) = crate::envelope::analytic_solution(initial.a, initial.b, drive, t);
    let via_amplitudes = to_bloch(&ModeAmplitudes { a, b, ..*initial });
    let via_bloch = propagate_segment(&to_bloch(initial), drive, t);
    via_amplitudes.sub(&via_bloch).norm()
}
