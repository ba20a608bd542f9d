//! Command implementations behind the CLI: each takes the parsed config and
//! renders a deterministic output document.

use crate::bloch::{propagate_segment, BlochVector};
use crate::config::{CompareConfig, RunConfig};
use crate::envelope::DriveParams;
use crate::error::{Error, Result};
use crate::model::{derive_frequencies, eigenfrequencies, SystemParams};
use crate::newton;
use crate::newton::NewtonState;
use crate::output::{CompareReport, Table};
use crate::par::map_grid;
use crate::protocol::{hahn_scan, rabi_scan, ramsey_scan, Model, NewtonRealization, ScanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Simulate,
    Rabi,
    Ramsey,
    Hahn,
    Compare,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Simulate => "simulate",
            CommandKind::Rabi => "rabi",
            CommandKind::Ramsey => "ramsey",
            CommandKind::Hahn => "hahn",
            CommandKind::Compare => "compare",
        }
    }
}

fn render(table: Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    }
}

fn missing_section(cmd: CommandKind) -> Error {
    Error::Config(format!("config has no `{}` section", cmd.name()))
}

/// Run one subcommand against a validated config and return the rendered
/// output document.
pub fn run_command(
    cmd: CommandKind,
    cfg: &RunConfig,
    format: OutputFormat,
    model: Model,
) -> Result<String> {
    match cmd {
        CommandKind::Spectrum => cmd_spectrum(cfg, format),
        CommandKind::Simulate => cmd_simulate(cfg, format),
        CommandKind::Rabi => cmd_rabi(cfg, format, model),
        CommandKind::Ramsey => cmd_wait_scan(cfg, format, model, CommandKind::Ramsey),
        CommandKind::Hahn => cmd_wait_scan(cfg, format, model, CommandKind::Hahn),
        CommandKind::Compare => cmd_compare(cfg, format),
    }
}

fn cmd_spectrum(cfg: &RunConfig, format: OutputFormat) -> Result<String> {
    let spec = cfg
        .spectrum
        .as_ref()
        .ok_or_else(|| missing_section(CommandKind::Spectrum))?;
    let p = &cfg.system;
    let grid = spec.dk_grid.values()?;
    let mut table = Table::new(
        "spectrum",
        &[
            "dk",
            "omega_plus",
            "omega_minus",
            "omega_a_uncoupled",
            "omega_b_uncoupled",
        ],
    );
    let rows: Vec<Result<Vec<f64>>> = map_grid(&grid, |&dk| {
        let (wp, wm) = eigenfrequencies(p, dk)?;
        let wa = ((p.k + p.kappa - dk) / p.m).sqrt();
        let wb = ((p.k + p.kappa + dk) / p.m).sqrt();
        Ok(vec![dk, wp, wm, wa, wb])
    });
    for row in rows {
        table.push_row(row?);
    }
    Ok(render(table, format))
}

fn cmd_simulate(cfg: &RunConfig, format: OutputFormat) -> Result<String> {
    let sim = cfg
        .simulate
        .as_ref()
        .ok_or_else(|| missing_section(CommandKind::Simulate))?;
    let initial = NewtonState {
        t: 0.0,
        x_a: sim.initial.x_a,
        v_a: sim.initial.v_a,
        x_b: sim.initial.x_b,
        v_b: sim.initial.v_b,
    };
    let traj = newton::integrate(
        &cfg.system,
        sim.detuning,
        sim.force,
        initial,
        sim.t_end,
        sim.steps_per_period,
    )?;
    let mut table = Table::new("simulate", &["t", "xA", "vA", "xB", "vB"]);
    for s in &traj.samples {
        table.push_row(vec![s.t, s.x_a, s.v_a, s.x_b, s.v_b]);
    }
    Ok(render(table, format))
}

fn newton_realization(
    system: &SystemParams,
    gamma: f64,
    steps_per_period: u32,
) -> NewtonRealization {
    NewtonRealization {
        params: SystemParams { gamma, ..*system },
        steps_per_period,
    }
}

fn cmd_rabi(cfg: &RunConfig, format: OutputFormat, model: Model) -> Result<String> {
    let rabi = cfg
        .rabi
        .as_ref()
        .ok_or_else(|| missing_section(CommandKind::Rabi))?;
    let drive = DriveParams {
        amplitude: rabi.amplitude,
        delta: rabi.delta,
        gamma: rabi.gamma,
    };
    let realization = newton_realization(&cfg.system, rabi.gamma, rabi.steps_per_period);
    let res = rabi_scan(
        &drive,
        rabi.t_max,
        rabi.samples,
        model,
        (model == Model::NewtonFull).then_some(&realization),
    )?;
    let mut table = Table::new("rabi", &["t", "pop_a", "pop_b", "sx", "sy", "sz"]);
    for i in 0..res.t.len() {
        let s = res.bloch[i];
        table.push_row(vec![res.t[i], res.pop_a[i], res.pop_b[i], s.x, s.y, s.z]);
    }
    Ok(render(table, format))
}

fn cmd_wait_scan(
    cfg: &RunConfig,
    format: OutputFormat,
    model: Model,
    cmd: CommandKind,
) -> Result<String> {
    let scan_cfg = match cmd {
        CommandKind::Ramsey => cfg.ramsey.as_ref(),
        CommandKind::Hahn => cfg.hahn.as_ref(),
        _ => unreachable!(),
    }
    .ok_or_else(|| missing_section(cmd))?;
    let grid = scan_cfg.t_grid.values()?;
    let realization = newton_realization(&cfg.system, scan_cfg.gamma, scan_cfg.steps_per_period);
    let newton_ref = (model == Model::NewtonFull).then_some(&realization);
    let scan: ScanResult = match cmd {
        CommandKind::Ramsey => ramsey_scan(
            scan_cfg.pulses,
            scan_cfg.delta,
            scan_cfg.gamma,
            &grid,
            model,
            newton_ref,
        )?,
        CommandKind::Hahn => hahn_scan(
            scan_cfg.pulses,
            scan_cfg.delta,
            scan_cfg.gamma,
            &grid,
            model,
            newton_ref,
        )?,
        _ => unreachable!(),
    };
    let mut table = Table::new(cmd.name(), &["T", "pop_a", "pop_b"]);
    for i in 0..scan.t_wait.len() {
        table.push_row(vec![scan.t_wait[i], scan.pop_a[i], scan.pop_b[i]]);
    }
    Ok(render(table, format))
}

/// Max absolute population discrepancy between a full Newtonian resonant Rabi
/// run and exact Bloch propagation, over one full flop at drive amplitude
/// ratio * omega0.
pub fn compare_discrepancy_at_ratio(
    system: &SystemParams,
    compare: &CompareConfig,
    ratio: f64,
) -> Result<f64> {
    let freqs = derive_frequencies(system)?;
    let amplitude = ratio * freqs.omega0;
    let gamma = compare.gamma_ratio * freqs.omega0;
    let t_end = 2.0 * std::f64::consts::PI / amplitude;
    let drive = DriveParams {
        amplitude,
        delta: 0.0,
        gamma,
    };
    let realization = newton_realization(system, gamma, compare.steps_per_period);
    let res = rabi_scan(
        &drive,
        t_end,
        compare.samples,
        Model::NewtonFull,
        Some(&realization),
    )?;
    let mut worst: f64 = 0.0;
    for i in 0..res.t.len() {
        let exact = propagate_segment(&BlochVector::NORTH_POLE, &drive, res.t[i]);
        let (pa, pb) = exact.populations();
        worst = worst
            .max((res.pop_a[i] - pa).abs())
            .max((res.pop_b[i] - pb).abs());
    }
    Ok(worst)
}

fn cmd_compare(cfg: &RunConfig, format: OutputFormat) -> Result<String> {
    let compare = cfg
        .compare
        .as_ref()
        .ok_or_else(|| missing_section(CommandKind::Compare))?;
    if format != OutputFormat::Json {
        return Err(Error::InvalidArgument(
            "compare emits a structured report; use --format json".into(),
        ));
    }
    if compare.amplitude_ratios.is_empty() {
        return Err(Error::Config("amplitude_ratios must be non-empty".into()));
    }
    let discrepancies: Vec<Result<f64>> = map_grid(&compare.amplitude_ratios, |&r| {
        compare_discrepancy_at_ratio(&cfg.system, compare, r)
    });
    let mut values = Vec::with_capacity(discrepancies.len());
    for d in discrepancies {
        values.push(d?);
    }
    let monotonic = values.windows(2).all(|w| w[1] > w[0]);
    let report = CompareReport {
        schema: "mechanical-bloch v1 compare".into(),
        amplitude_ratios: compare.amplitude_ratios.clone(),
        max_population_discrepancy: values,
        monotonic_increasing: monotonic,
    };
    Ok(report.to_json())
}

/// Exit code mapping: validation and domain failures are 1, I/O failures 2.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 2,
        _ => 1,
    }
}
