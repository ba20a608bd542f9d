//! Coherent-control protocols expressed as pulse sequences of
//! piecewise-constant drive segments, runnable on three model layers: exact
//! Bloch propagation, the analytic rotating-frame envelope solution, and the
//! full Newtonian simulation with quadrature demodulation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{
    amplitudes_from_bloch, instantaneous_pulse, propagate_segment, to_bloch, BlochVector,
};
use crate::envelope::{analytic_solution, DriveParams, ModeAmplitudes};
use crate::error::{Error, Result};
use crate::model::{derive_frequencies, DetuningSpec, SystemParams};
use crate::newton::{self, ForceSpec, NewtonState, NewtonTrajectory};
use crate::par::map_grid;

/// One piecewise-constant element of a pulse sequence. A `Wait` is
/// semantically a `Pulse` with zero amplitude; the detuning keeps accruing
/// phase during waits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Pulse {
        amplitude: f64,
        delta: f64,
        duration: f64,
    },
    Wait {
        delta: f64,
        duration: f64,
    },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match *self {
            Segment::Pulse { duration, .. } | Segment::Wait { duration, .. } => duration,
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            Segment::Pulse { delta, .. } | Segment::Wait { delta, .. } => delta,
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Segment::Pulse { amplitude, .. } => amplitude,
            Segment::Wait { .. } => 0.0,
        }
    }

    fn drive(&self, gamma: f64) -> DriveParams {
        DriveParams {
            amplitude: self.amplitude(),
            delta: self.delta(),
            gamma,
        }
    }
}

/// An ordered coherent-control program over one physical system (single
/// damping rate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequence {
    pub segments: Vec<Segment>,
    pub gamma: f64,
}

impl PulseSequence {
    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidArgument(
                "pulse sequence must be non-empty".into(),
            ));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.duration() >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "segment {i} has negative duration {}",
                    seg.duration()
                )));
            }
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration()).sum()
    }
}

/// Which layer evaluates the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    BlochExact,
    EnvelopeRwa,
    NewtonFull,
}

/// Physical realization needed for the Newtonian layer.
#[derive(Debug, Clone, Copy)]
pub struct NewtonRealization {
    pub params: SystemParams,
    pub steps_per_period: u32,
}

/// Sampled output of a protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub t: Vec<f64>,
    pub pop_a: Vec<f64>,
    pub pop_b: Vec<f64>,
    pub bloch: Vec<BlochVector>,
    pub model: Model,
}

impl ProtocolResult {
    fn push(&mut self, t: f64, s: BlochVector) {
        let (pa, pb) = s.populations();
        self.t.push(t);
        self.pop_a.push(pa);
        self.pop_b.push(pb);
        self.bloch.push(s);
    }

    pub fn final_bloch(&self) -> BlochVector {
        *self.bloch.last().expect("protocol result is never empty")
    }

    pub fn final_populations(&self) -> (f64, f64) {
        self.final_bloch().populations()
    }
}

/// Run a pulse sequence from an initial Bloch vector, sampling each segment
/// `samples_per_segment` times (plus the initial point).
pub fn run_sequence(
    seq: &PulseSequence,
    initial: BlochVector,
    samples_per_segment: usize,
    model: Model,
    newton: Option<&NewtonRealization>,
) -> Result<ProtocolResult> {
    seq.validate()?;
    if samples_per_segment == 0 {
        return Err(Error::InvalidArgument(
            "samples_per_segment must be >= 1".into(),
        ));
    }
    match model {
        Model::BlochExact => run_bloch(seq, initial, samples_per_segment),
        Model::EnvelopeRwa => run_rwa(seq, initial, samples_per_segment),
        Model::NewtonFull => {
            let realization = newton.ok_or_else(|| {
                Error::Config("NewtonFull requires SystemParams and a step resolution".into())
            })?;
            run_newton(seq, initial, samples_per_segment, realization)
        }
    }
}

fn empty_result(model: Model) -> ProtocolResult {
    ProtocolResult {
        t: Vec::new(),
        pop_a: Vec::new(),
        pop_b: Vec::new(),
        bloch: Vec::new(),
        model,
    }
}

fn run_bloch(
    seq: &PulseSequence,
    initial: BlochVector,
    samples_per_segment: usize,
) -> Result<ProtocolResult> {
    let mut out = empty_result(Model::BlochExact);
    out.push(0.0, initial);
    let mut t0 = 0.0;
    let mut s = initial;
    for seg in &seq.segments {
        let drive = seg.drive(seq.gamma);
        let dur = seg.duration();
        for j in 1..=samples_per_segment {
            let off = dur * j as f64 / samples_per_segment as f64;
            out.push(t0 + off, propagate_segment(&s, &drive, off));
        }
        s = propagate_segment(&s, &drive, dur);
        t0 += dur;
    }
    Ok(out)
}

fn run_rwa(
    seq: &PulseSequence,
    initial: BlochVector,
    samples_per_segment: usize,
) -> Result<ProtocolResult> {
    let mut out = empty_result(Model::EnvelopeRwa);
    let (mut a, mut b) = amplitudes_from_bloch(&initial);
    out.push(0.0, bloch_of(a, b));
    let mut t0 = 0.0;
    for seg in &seq.segments {
        let drive = seg.drive(seq.gamma);
        let dur = seg.duration();
        for j in 1..=samples_per_segment {
            let off = dur * j as f64 / samples_per_segment as f64;
            let (aj, bj) = analytic_solution(a, b, &drive, off);
            out.push(t0 + off, bloch_of(aj, bj));
        }
        let (an, bn) = analytic_solution(a, b, &drive, dur);
        a = an;
        b = bn;
        t0 += dur;
    }
    Ok(out)
}

fn bloch_of(a: Complex64, b: Complex64) -> BlochVector {
    to_bloch(&ModeAmplitudes::rotating(a, b, 0.0, 0.0))
}

fn run_newton(
    seq: &PulseSequence,
    initial: BlochVector,
    samples_per_segment: usize,
    realization: &NewtonRealization,
) -> Result<ProtocolResult> {
    // one coherent drive clock per sequence: all segments must share delta
    let delta = seq.segments[0].delta();
    if seq.segments.iter().any(|s| s.delta() != delta) {
        return Err(Error::Config(
            "NewtonFull requires a single detuning delta across the sequence".into(),
        ));
    }
    // the run's damping is the sequence's gamma
    let params = SystemParams {
        gamma: seq.gamma,
        ..realization.params
    };
    params.validate()?;
    let freqs = derive_frequencies(&params)?;
    let omega_drive = freqs.delta_omega_exact - delta;
    let dt = 2.0 * std::f64::consts::PI / (freqs.omega0 * realization.steps_per_period as f64);

    // snap each segment to an integer number of carrier-tied steps so the
    // full trajectory sits on one uniform time grid
    let seg_steps: Vec<usize> = seq
        .segments
        .iter()
        .map(|s| {
            if s.duration() == 0.0 {
                0
            } else {
                (s.duration() / dt).round().max(1.0) as usize
            }
        })
        .collect();

    let (a0, b0) = amplitudes_from_bloch(&initial);
    let mut state = newton::prepare_state(&params, a0, b0);
    let mut samples: Vec<NewtonState> = vec![state];
    for (seg, &steps) in seq.segments.iter().zip(&seg_steps) {
        if steps == 0 {
            continue;
        }
        let detuning = match seg {
            Segment::Pulse { amplitude, .. } => {
                // phase continuity: cos(omega_drive t) runs on global time
                DetuningSpec::Harmonic {
                    a: *amplitude,
                    omega_drive,
                    phase: 0.0,
                }
            }
            Segment::Wait { .. } => DetuningSpec::Constant { dk: 0.0 },
        };
        let t_end = state.t + (steps as f64 - 0.5) * dt;
        let traj = newton::integrate(
            &params,
            detuning,
            ForceSpec::None,
            state,
            t_end,
            realization.steps_per_period,
        )?;
        samples.extend_from_slice(&traj.samples[1..]);
        state = *traj.samples.last().unwrap();
    }
    // smoothing window: half a drive period puts the first sinc null of the
    // rectangular average right on the counter-rotating micromotion at
    // 2 * omega_drive, suppressing it ~20x
    let carrier_period = 2.0 * std::f64::consts::PI / freqs.omega0;
    let mut smooth_periods = if omega_drive.abs() > f64::EPSILON {
        ((std::f64::consts::PI / omega_drive.abs()) / carrier_period).round() as u32
    } else {
        1
    }
    .clamp(1, 50);

    // pad with free carrier periods so the smoothing window is full at the
    // nominal end of the sequence
    let pad_periods = (smooth_periods / 2 + 1) as f64;
    let pad_end = state.t + (pad_periods * realization.steps_per_period as f64 - 0.5) * dt;
    let pad = newton::integrate(
        &params,
        DetuningSpec::Constant { dk: 0.0 },
        ForceSpec::None,
        state,
        pad_end,
        realization.steps_per_period,
    )?;
    samples.extend_from_slice(&pad.samples[1..]);

    let traj = NewtonTrajectory {
        samples,
        dt,
        params,
        detuning: DetuningSpec::Constant { dk: 0.0 },
    };
    // shrink the window if the run is too short to carry it
    let max_periods = (traj.samples.len() - 1) / realization.steps_per_period as usize;
    smooth_periods = smooth_periods.min(max_periods.max(1) as u32);
    let env = newton::demodulate(&traj, freqs.omega0, smooth_periods)?;

    // output grid: nearest integration sample to each nominal sample time
    let mut out = empty_result(Model::NewtonFull);
    let mut emit = |idx: usize| {
        let t = env.t[idx];
        let half = 0.5 * omega_drive * t;
        let abar = env.a[idx] * Complex64::from_polar(1.0, half);
        let bbar = env.b[idx] * Complex64::from_polar(1.0, -half);
        out.push(t, bloch_of(abar, bbar));
    };
    emit(0);
    let mut start_step = 0usize;
    for &steps in &seg_steps {
        for j in 1..=samples_per_segment {
            let idx = start_step + (steps * j) / samples_per_segment;
            emit(idx.min(env.t.len() - 1));
        }
        start_step += steps;
    }
    Ok(out)
}

/// Continuous resonant-or-detuned drive from the north pole.
pub fn rabi_scan(
    drive: &DriveParams,
    t_max: f64,
    samples: usize,
    model: Model,
    newton: Option<&NewtonRealization>,
) -> Result<ProtocolResult> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be > 0, got {t_max}"
        )));
    }
    let seq = PulseSequence {
        segments: vec![Segment::Pulse {
            amplitude: drive.amplitude,
            delta: drive.delta,
            duration: t_max,
        }],
        gamma: drive.gamma,
    };
    run_sequence(&seq, BlochVector::NORTH_POLE, samples, model, newton)
}

/// How protocol pulses are realized: finite rectangular pulses of the given
/// amplitude, or the instantaneous-pulse (exact rotation) limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseTiming {
    Finite { amplitude: f64 },
    Instantaneous,
}

/// Final populations of a wait-time scan.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub t_wait: Vec<f64>,
    pub pop_a: Vec<f64>,
    pub pop_b: Vec<f64>,
}

fn kick_angles_to_sequence(
    timing: PulseTiming,
    angles_and_waits: &[(f64, f64)], // (pulse angle, following wait)
    delta: f64,
    gamma: f64,
) -> Result<PulseSequence> {
    let PulseTiming::Finite { amplitude } = timing else {
        return Err(Error::InvalidArgument(
            "instantaneous pulses are handled without a sequence".into(),
        ));
    };
    if amplitude <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "pulse amplitude must be > 0 to define pulse durations, got {amplitude}"
        )));
    }
    let mut segments = Vec::new();
    for &(angle, wait) in angles_and_waits {
        segments.push(Segment::Pulse {
            amplitude,
            delta,
            duration: angle / amplitude,
        });
        if wait > 0.0 {
            segments.push(Segment::Wait {
                delta,
                duration: wait,
            });
        }
    }
    Ok(PulseSequence { segments, gamma })
}

/// Final Bloch vector after kicks and waits in the instantaneous-pulse limit.
fn run_kicks_instantaneous(
    angles_and_waits: &[(f64, f64)],
    delta: f64,
    gamma: f64,
    model: Model,
) -> Result<BlochVector> {
    match model {
        Model::BlochExact => {
            let mut s = BlochVector::NORTH_POLE;
            for &(angle, wait) in angles_and_waits {
                s = instantaneous_pulse(&s, angle, 1.0);
                if wait > 0.0 {
                    s = propagate_segment(&s, &DriveParams::free(delta, gamma), wait);
                }
            }
            Ok(s)
        }
        Model::EnvelopeRwa => {
            let (mut a, mut b) = amplitudes_from_bloch(&BlochVector::NORTH_POLE);
            for &(angle, wait) in angles_and_waits {
                // a rotation by `angle` is the unit-Rabi-frequency solution
                // evaluated for a time equal to the angle
                let kick = DriveParams {
                    amplitude: 1.0,
                    delta: 0.0,
                    gamma: 0.0,
                };
                let (ak, bk) = analytic_solution(a, b, &kick, angle);
                a = ak;
                b = bk;
                if wait > 0.0 {
                    let (aw, bw) = analytic_solution(a, b, &DriveParams::free(delta, gamma), wait);
                    a = aw;
                    b = bw;
                }
            }
            Ok(bloch_of(a, b))
        }
        Model::NewtonFull => Err(Error::Config(
            "instantaneous pulses cannot be realized on the Newtonian layer".into(),
        )),
    }
}

fn protocol_scan(
    timing: PulseTiming,
    delta: f64,
    gamma: f64,
    t_grid: &[f64],
    model: Model,
    newton: Option<&NewtonRealization>,
    layout: impl Fn(f64) -> Vec<(f64, f64)> + Sync + Send,
) -> Result<ScanResult> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "wait-time grid must be non-empty".into(),
        ));
    }
    if t_grid.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidArgument(
            "wait times must be non-negative".into(),
        ));
    }
    let results: Vec<Result<(f64, f64)>> = map_grid(t_grid, |&t_wait| {
        let layout = layout(t_wait);
        match timing {
            PulseTiming::Instantaneous => {
                let s = run_kicks_instantaneous(&layout, delta, gamma, model)?;
                Ok(s.populations())
            }
            PulseTiming::Finite { .. } => {
                let seq = kick_angles_to_sequence(timing, &layout, delta, gamma)?;
                let res = run_sequence(&seq, BlochVector::NORTH_POLE, 1, model, newton)?;
                Ok(res.final_populations())
            }
        }
    });
    let mut out = ScanResult {
        t_wait: t_grid.to_vec(),
        pop_a: Vec::new(),
        pop_b: Vec::new(),
    };
    for r in results {
        let (pa, pb) = r?;
        out.pop_a.push(pa);
        out.pop_b.push(pb);
    }
    Ok(out)
}

/// Ramsey protocol: pi/2 pulse, wait T, pi/2 pulse; final populations per T.
pub fn ramsey_scan(
    timing: PulseTiming,
    delta: f64,
    gamma: f64,
    t_grid: &[f64],
    model: Model,
    newton: Option<&NewtonRealization>,
) -> Result<ScanResult> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    protocol_scan(timing, delta, gamma, t_grid, model, newton, move |t| {
        vec![(half_pi, t), (half_pi, 0.0)]
    })
}

/// Hahn echo: pi/2, wait T/2, pi, wait T/2, 3 pi/2; final populations per T.
pub fn hahn_scan(
    timing: PulseTiming,
    delta: f64,
    gamma: f64,
    t_grid: &[f64],
    model: Model,
    newton: Option<&NewtonRealization>,
) -> Result<ScanResult> {
    let pi = std::f64::consts::PI;
    protocol_scan(timing, delta, gamma, t_grid, model, newton, move |t| {
        vec![(0.5 * pi, 0.5 * t), (pi, 0.5 * t), (1.5 * pi, 0.0)]
    })
}
